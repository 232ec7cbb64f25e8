//! The product system `(K, {B_a}, {τ_ba})` with `B_a = ∏_{j ∈ U_a} A^{K_j}`,
//! and the finite-stage checks built on it.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::algebra::{
    compose, direct_product, realize_bounded, ConcreteElement, FdAlgebra, MultiplicityMorphism, ProductAlgebra,
    ASSERT_TOLERANCE, REALIZE_BOUND,
};
use crate::poset::Element;
use crate::report::CheckReport;
use crate::system::{Colimit, InductiveSystem, SystemError};
use crate::topology::IndexSet;

#[derive(Debug, Clone)]
pub struct ProductSystem {
    base: InductiveSystem,
    colimits: Vec<Colimit>,
    stages: Vec<ProductAlgebra>,
    indices: Vec<Vec<usize>>,
    tau: BTreeMap<(Element, Element), MultiplicityMorphism>,
    realize_bound: usize,
}

/// One row of a norm profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageNorm {
    pub stage: Element,
    pub comparable: bool,
    pub norm: f64,
    pub expected: f64,
}

/// `M_F|J` and `M̂_F|J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalProducts {
    pub indices: Vec<usize>,
    pub m_f: FdAlgebra,
    pub m_hat_f: FdAlgebra,
    pub all_isolated: bool,
}

impl GlobalProducts {
    pub fn dims_equal(&self) -> bool {
        self.m_f == self.m_hat_f
    }
}

impl ProductSystem {
    pub fn build(system: &InductiveSystem) -> Self {
        let base = system.clone();
        let colimits = base.colimits();
        let space = base.space();
        let mut stages = Vec::with_capacity(base.poset().len());
        let mut indices = Vec::with_capacity(base.poset().len());
        for a in base.poset().elements() {
            let u: Vec<usize> = space.u(a).iter().copied().collect();
            let factors: Vec<FdAlgebra> = u.iter().map(|&j| colimits[j].apex.clone()).collect();
            stages.push(direct_product(&factors).expect("every element lies in some component"));
            indices.push(u);
        }
        let mut product = Self {
            base,
            colimits,
            stages,
            indices,
            tau: BTreeMap::new(),
            realize_bound: REALIZE_BOUND,
        };
        let p = product.base.poset().clone();
        for a in p.elements() {
            for b in p.elements().filter(|&b| p.le(a, b)) {
                let t = product.restriction(a, b);
                product.tau.insert((a, b), t);
            }
        }
        product
    }

    pub fn with_realize_bound(mut self, bound: usize) -> Self {
        self.realize_bound = bound;
        self
    }

    pub fn base(&self) -> &InductiveSystem {
        &self.base
    }

    pub fn colimit(&self, i: usize) -> &Colimit {
        &self.colimits[i]
    }

    /// `B_a` with its factor partition; factors follow `self.indices(a)`.
    pub fn stage(&self, a: Element) -> &ProductAlgebra {
        &self.stages[a.0]
    }

    /// `U_a` in increasing order.
    pub fn indices(&self, a: Element) -> &[usize] {
        &self.indices[a.0]
    }

    fn restriction(&self, a: Element, b: Element) -> MultiplicityMorphism {
        let (src, dst) = (&self.stages[a.0], &self.stages[b.0]);
        let mut mult = vec![vec![0; src.algebra.block_count()]; dst.algebra.block_count()];
        for (pos_b, j) in self.indices[b.0].iter().enumerate() {
            let pos_a = self.indices[a.0].iter().position(|k| k == j).expect("U_b ⊆ U_a");
            for (row, col) in dst.parts[pos_b].clone().zip(src.parts[pos_a].clone()) {
                mult[row][col] = 1;
            }
        }
        MultiplicityMorphism::new_unital(src.algebra.clone(), dst.algebra.clone(), mult)
            .expect("coordinate restriction is unital")
    }

    /// `τ_ba : B_a → B_b`, dropping the coordinates in `U_a \ U_b`.
    pub fn tau(&self, a: Element, b: Element) -> Result<&MultiplicityMorphism, SystemError> {
        self.tau.get(&(a, b)).ok_or_else(|| SystemError::NotComparable {
            from: self.base.poset().name(a).to_string(),
            to: self.base.poset().name(b).to_string(),
        })
    }

    /// `τ_ca = τ_cb ∘ τ_ba`, `τ_aa = id`, and `τ_ba` is the identity on the
    /// surviving coordinates.
    pub fn check_tau_coherence(&self) -> CheckReport {
        let p = self.base.poset();
        let mut violations = Vec::new();
        for (&(a, b), ba) in &self.tau {
            if a == b && !ba.is_identity() {
                violations.push(json!({ "law": "identity", "a": p.name(a) }));
            }
            for c in p.elements().filter(|&c| p.le(b, c)) {
                if compose(&self.tau[&(b, c)], ba).expect("endpoints match") != self.tau[&(a, c)] {
                    violations.push(json!({ "law": "coherence", "a": p.name(a), "b": p.name(b), "c": p.name(c) }));
                }
            }
        }
        CheckReport::from_outcome("tau_coherence", violations, Vec::new())
    }

    /// `σ_a^{U_a}`, coordinate `j` being the colimit leg `σ_a^{K_j}`.
    pub fn sigma_u(&self, a: Element) -> MultiplicityMorphism {
        let legs: Vec<&MultiplicityMorphism> = self.indices[a.0]
            .iter()
            .map(|&j| self.colimits[j].leg(a).expect("a ∈ K_j for j ∈ U_a"))
            .collect();
        let (m, _) = MultiplicityMorphism::pairing(self.base.algebra(a), &legs).expect("legs share their source");
        m
    }

    pub fn sigma_a_ua(&self, a: Element, x: &ConcreteElement) -> Result<ConcreteElement, SystemError> {
        Ok(realize_bounded(&self.sigma_u(a), self.realize_bound)?.apply(x))
    }

    /// Each coordinate of `σ_a^{U_a}(x)` has the norm of `x`.
    pub fn check_sigma_isometry(&self, a: Element, x: &ConcreteElement) -> Result<CheckReport, SystemError> {
        let image = self.sigma_a_ua(a, x)?;
        let stage = self.stage(a);
        let norm = x.norm();
        let mut violations = Vec::new();
        for (pos, &j) in self.indices[a.0].iter().enumerate() {
            let coordinate = stage.project(&image, pos).norm();
            if (coordinate - norm).abs() > ASSERT_TOLERANCE {
                violations
                    .push(json!({ "a": self.base.poset().name(a), "index": j, "norm": coordinate, "expected": norm }));
            }
        }
        Ok(CheckReport::from_outcome("sigma_isometry", violations, Vec::new()))
    }

    /// `σ_b^{U_b} ∘ σ_ba = τ_ba ∘ σ_a^{U_a}`, compared coordinate by coordinate.
    pub fn check_square(&self, a: Element, b: Element) -> Result<CheckReport, SystemError> {
        let lhs = compose(&self.sigma_u(b), self.base.morphism(a, b)?)?;
        let rhs = compose(self.tau(a, b)?, &self.sigma_u(a))?;
        let p = self.base.poset();
        let stage = self.stage(b);
        let violations = self.indices[b.0]
            .iter()
            .enumerate()
            .filter(|&(pos, _)| {
                let rows = stage.parts[pos].clone();
                lhs.mult()[rows.clone()] != rhs.mult()[rows]
            })
            .map(|(_, &j)| json!({ "a": p.name(a), "b": p.name(b), "index": j }))
            .collect();
        Ok(CheckReport::from_outcome("square", violations, Vec::new()))
    }

    pub fn check_all_squares(&self) -> CheckReport {
        let mut violations = Vec::new();
        let mut pairs = 0;
        for &(a, b) in self.tau.keys() {
            pairs += 1;
            let r = self.check_square(a, b).expect("comparable pair");
            if !r.passed() {
                violations.extend(r.witnesses);
            }
        }
        CheckReport::from_outcome("square", violations, vec![json!({ "pairs": pairs })])
    }

    /// Injectivity of `θ_x ∘ σ_a^{U_a}` at every stage `x >= a`: the
    /// multiplicity composite `τ_xa ∘ σ_a^{U_a}` has no zero column.
    pub fn check_stage_injectivity(&self) -> CheckReport {
        let p = self.base.poset();
        let violations = self
            .tau
            .iter()
            .filter_map(|(&(a, x), t)| {
                let composite = compose(t, &self.sigma_u(a)).expect("endpoints match");
                (!composite.is_injective()).then(|| json!({ "a": p.name(a), "x": p.name(x) }))
            })
            .collect();
        CheckReport::from_outcome("stage_injectivity", violations, Vec::new())
    }

    /// Norms of the stage coordinates `[θ_a^{K_i}(σ_a^{U_a}(x1 - x2))](x)`:
    /// `‖x1 - x2‖` when `a <= x`, and `0` otherwise.
    pub fn stage_norm_profile(
        &self,
        i: usize,
        a: Element,
        x1: &ConcreteElement,
        x2: &ConcreteElement,
        stages: &[Element],
    ) -> Result<Vec<StageNorm>, SystemError> {
        if x1 == x2 {
            return Err(SystemError::EqualElements);
        }
        let component = self.base.space().component(i)?;
        let name = |e: Element| self.base.poset().name(e).to_string();
        if let Some(&e) = std::iter::once(&a).chain(stages).find(|e| !component.contains(**e)) {
            return Err(SystemError::UnknownElement(name(e)));
        }
        let diff = x1.sub(x2);
        let norm = diff.norm();
        let lifted = self.sigma_a_ua(a, &diff)?;
        stages
            .iter()
            .map(|&x| {
                let (comparable, value) = match self.tau.get(&(a, x)) {
                    Some(t) => (true, realize_bounded(t, self.realize_bound)?.apply(&lifted).norm()),
                    None => (false, 0.0),
                };
                Ok(StageNorm {
                    stage: x,
                    comparable,
                    norm: value,
                    expected: if comparable { norm } else { 0.0 },
                })
            })
            .collect()
    }

    /// The finite content of the isomorphism `B^{K_i} ≅ A^{K_i}` at an
    /// isolated index.
    pub fn verify_isolated_isomorphism(&self, i: usize) -> Result<CheckReport, SystemError> {
        let space = self.base.space();
        let component = space.component(i)?;
        let anchor = space.is_isolated(i).ok_or(SystemError::NotIsolated(i))?;
        let p = self.base.poset();
        let above: Vec<Element> = component.members.iter().copied().filter(|&b| p.le(anchor, b)).collect();
        let mut violations = Vec::new();
        for &b in &above {
            if space.u(b) != &IndexSet::from([i]) {
                violations.push(json!({ "part": "singleton", "b": p.name(b) }));
            }
            if self.stage(b).algebra != self.stage(anchor).algebra {
                violations.push(json!({ "part": "equal_stages", "b": p.name(b) }));
            }
            for &c in &above {
                if p.le(b, c) && !self.tau[&(b, c)].is_identity() {
                    violations.push(json!({ "part": "identity_bonding", "b": p.name(b), "c": p.name(c) }));
                }
            }
        }
        for &x in &component.members {
            if !above.iter().any(|&b| p.le(x, b)) {
                violations.push(json!({ "part": "cofinal", "x": p.name(x) }));
            }
        }
        let b_apex = self.stage(component.top).algebra.clone();
        let a_apex = self.colimits[i].apex.clone();
        let canonical = self.sigma_u(component.top);
        let bijective = canonical.src() == &a_apex && canonical.dst() == &b_apex;
        if !(bijective && canonical.is_block_permutation() && canonical.is_identity()) {
            violations.push(json!({ "part": "apex", "b_apex": b_apex, "a_apex": a_apex, "mult": canonical.mult() }));
        }
        let certificate = json!({
            "index": i,
            "anchor": p.name(anchor),
            "cofinal_size": above.len(),
            "apex": a_apex,
        });
        Ok(CheckReport::from_outcome(
            "isolated_isomorphism",
            violations,
            vec![certificate],
        ))
    }

    /// `M_F|J` from the component colimits, `M̂_F|J` from the colimits of the
    /// product system over each component.
    pub fn build_global_products(&self, subset: &IndexSet) -> Result<GlobalProducts, SystemError> {
        let space = self.base.space();
        let mut a_factors = Vec::new();
        let mut b_factors = Vec::new();
        for &i in subset {
            let component = space.component(i)?;
            a_factors.push(self.colimits[i].apex.clone());
            b_factors.push(self.stage(component.top).algebra.clone());
        }
        let all_isolated = subset.iter().all(|&i| space.is_isolated(i).is_some());
        Ok(GlobalProducts {
            indices: subset.iter().copied().collect(),
            m_f: direct_product(&a_factors)?.algebra,
            m_hat_f: direct_product(&b_factors)?.algebra,
            all_isolated,
        })
    }

    pub fn check_global_products(&self, subset: &IndexSet) -> Result<CheckReport, SystemError> {
        let g = self.build_global_products(subset)?;
        let certificate = json!({ "m_f": g.m_f, "m_hat_f": g.m_hat_f });
        Ok(if !g.all_isolated || g.dims_equal() {
            CheckReport::from_outcome("global_products", Vec::new(), vec![certificate])
        } else {
            CheckReport::fail("global_products", certificate)
        })
    }
}
