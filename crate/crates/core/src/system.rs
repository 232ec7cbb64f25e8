//! Inductive systems of finite-dimensional algebras over finite posets.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::algebra::{compose, make_morphism, AlgebraError, FdAlgebra, MultiplicityMorphism};
use crate::families::{FamilyError, FamilyKind, FamilySpec, FamilyWindow, WindowBounds};
use crate::poset::{DirectedComponent, Element, FinitePoset, PosetDocument, PosetError, Subset};
use crate::report::CheckReport;
use crate::symbolic::parse_q;
use crate::topology::{IndexSpace, TopologyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("no algebra given for element {0}")]
    MissingAlgebra(String),
    #[error("no morphism can be derived from {from} to {to}")]
    MissingMorphism { from: String, to: String },
    #[error("{from} is not below {to}")]
    NotComparable { from: String, to: String },
    #[error("morphism {from} -> {to} does not match the algebras at its ends")]
    EndpointMismatch { from: String, to: String },
    #[error("element {0} is outside the component")]
    UnknownElement(String),
    #[error("poset is not upward directed ({0} maximal elements)")]
    NotDirected(usize),
    #[error("cocone violates its law at {from} -> {to}")]
    BadCocone { from: String, to: String },
    #[error("the two elements are equal")]
    EqualElements,
    #[error("index {0} is not isolated")]
    NotIsolated(usize),
    #[error("index {0} is isolated; no strictly nested chain of neighborhoods exists")]
    IsolatedIndex(String),
    #[error("chain depth {0} is below the minimum of 3")]
    ChainTooShort(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("bad system document: {0}")]
    BadDocument(String),
}

/// `(K, {A_a}, {σ_ba})`: an algebra per element and a coherent morphism per
/// comparable pair.
#[derive(Debug, Clone)]
pub struct InductiveSystem {
    space: IndexSpace,
    algebras: Vec<FdAlgebra>,
    morphisms: BTreeMap<(Element, Element), MultiplicityMorphism>,
}

impl InductiveSystem {
    /// Builds the system from generating morphisms `(from, to, σ)`.
    ///
    /// Identities are implicit. Every other comparable pair gets the composite
    /// along the first path found through the given morphisms; whether that
    /// choice is path independent is what [`Self::validate_system`] reports.
    pub fn new(
        poset: FinitePoset,
        algebras: Vec<FdAlgebra>,
        generators: Vec<(Element, Element, MultiplicityMorphism)>,
    ) -> Result<Self, SystemError> {
        assert_eq!(algebras.len(), poset.len(), "one algebra per element");
        let mut morphisms = BTreeMap::new();
        let mut out_edges: Vec<Vec<(Element, MultiplicityMorphism)>> = vec![Vec::new(); poset.len()];
        for (a, b, m) in generators {
            let names = || (poset.name(a).to_string(), poset.name(b).to_string());
            if !poset.le(a, b) {
                let (from, to) = names();
                return Err(SystemError::NotComparable { from, to });
            }
            if m.src() != &algebras[a.0] || m.dst() != &algebras[b.0] {
                let (from, to) = names();
                return Err(SystemError::EndpointMismatch { from, to });
            }
            if a == b {
                morphisms.insert((a, a), m);
            } else {
                out_edges[a.0].push((b, m));
            }
        }
        for a in poset.elements() {
            morphisms
                .entry((a, a))
                .or_insert_with(|| MultiplicityMorphism::identity(&algebras[a.0]));
            let mut reached: BTreeMap<Element, MultiplicityMorphism> = BTreeMap::new();
            reached.insert(a, MultiplicityMorphism::identity(&algebras[a.0]));
            let mut queue = VecDeque::from([a]);
            while let Some(x) = queue.pop_front() {
                let to_x = reached[&x].clone();
                for (y, step) in &out_edges[x.0] {
                    if !reached.contains_key(y) {
                        reached.insert(*y, compose(step, &to_x)?);
                        queue.push_back(*y);
                    }
                }
            }
            for b in poset.elements().filter(|&b| b != a && poset.le(a, b)) {
                let m = reached.remove(&b).ok_or_else(|| SystemError::MissingMorphism {
                    from: poset.name(a).to_string(),
                    to: poset.name(b).to_string(),
                })?;
                morphisms.insert((a, b), m);
            }
        }
        Ok(Self {
            space: IndexSpace::new(poset),
            algebras,
            morphisms,
        })
    }

    /// Every algebra equal to `algebra`, every morphism the identity.
    pub fn constant(poset: FinitePoset, algebra: &FdAlgebra) -> Self {
        let algebras = vec![algebra.clone(); poset.len()];
        let generators = poset
            .covers()
            .iter()
            .map(|&(a, b)| (a, b, MultiplicityMorphism::identity(algebra)))
            .collect();
        Self::new(poset, algebras, generators).expect("identities compose")
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }

    pub fn poset(&self) -> &FinitePoset {
        self.space.poset()
    }

    pub fn algebra(&self, a: Element) -> &FdAlgebra {
        &self.algebras[a.0]
    }

    pub fn algebras(&self) -> &[FdAlgebra] {
        &self.algebras
    }

    /// `σ_ba : A_a → A_b` for `a <= b`.
    pub fn morphism(&self, a: Element, b: Element) -> Result<&MultiplicityMorphism, SystemError> {
        self.morphisms.get(&(a, b)).ok_or_else(|| SystemError::NotComparable {
            from: self.poset().name(a).to_string(),
            to: self.poset().name(b).to_string(),
        })
    }

    /// Replaces one stored morphism without re-deriving anything.
    pub fn set_morphism_unchecked(&mut self, a: Element, b: Element, m: MultiplicityMorphism) {
        self.morphisms.insert((a, b), m);
    }

    /// `σ_ca = σ_cb ∘ σ_ba` for every `a <= b <= c`, and `σ_aa = id`.
    pub fn validate_system(&self) -> CheckReport {
        let p = self.poset();
        let mut violations = Vec::new();
        for a in p.elements() {
            if !self.morphisms[&(a, a)].is_identity() {
                violations.push(json!({ "law": "identity", "a": p.name(a) }));
            }
        }
        for (&(a, b), ba) in &self.morphisms {
            if a == b {
                continue;
            }
            for c in p.elements().filter(|&c| c != b && p.le(b, c)) {
                let composite = compose(&self.morphisms[&(b, c)], ba).expect("endpoints match");
                if composite != self.morphisms[&(a, c)] {
                    violations.push(json!({
                        "law": "coherence",
                        "a": p.name(a),
                        "b": p.name(b),
                        "c": p.name(c),
                    }));
                }
            }
        }
        CheckReport::from_outcome("coherence", violations, Vec::new())
    }

    /// The system over `K_i` with the inherited algebras and morphisms.
    pub fn restrict_to_component(&self, i: usize) -> Result<InductiveSystem, SystemError> {
        let component = self.space.component(i)?;
        self.restrict_to(&component.members)
    }

    pub fn restrict_to(&self, members: &Subset) -> Result<InductiveSystem, SystemError> {
        let (poset, embed) = self.poset().induced(members)?;
        let algebras = embed.iter().map(|&a| self.algebras[a.0].clone()).collect();
        let mut morphisms = BTreeMap::new();
        for (x, &a) in embed.iter().enumerate() {
            for (y, &b) in embed.iter().enumerate() {
                if let Some(m) = self.morphisms.get(&(a, b)) {
                    morphisms.insert((Element(x), Element(y)), m.clone());
                }
            }
        }
        Ok(InductiveSystem {
            space: IndexSpace::new(poset),
            algebras,
            morphisms,
        })
    }

    /// Colimit of this system, which must be upward directed.
    pub fn colimit_finite(&self) -> Result<Colimit, SystemError> {
        let count = self.space.components().len();
        if count != 1 {
            return Err(SystemError::NotDirected(count));
        }
        self.component_colimit(0)
    }

    /// Colimit of the restriction to `K_i`: apex `A_m` at the maximum `m`,
    /// legs `σ_ma`.
    pub fn component_colimit(&self, i: usize) -> Result<Colimit, SystemError> {
        let component = self.space.component(i)?.clone();
        let top = component.top;
        let legs = component
            .members
            .iter()
            .map(|&a| Ok((a, self.morphism(a, top)?.clone())))
            .collect::<Result<_, SystemError>>()?;
        Ok(Colimit {
            apex: self.algebras[top.0].clone(),
            component,
            legs,
        })
    }

    pub fn colimits(&self) -> Vec<Colimit> {
        self.space
            .indices()
            .map(|i| self.component_colimit(i).expect("index from the space"))
            .collect()
    }

    /// The `x`-coordinate of `θ_a^{K_i}`: `σ_xa` when `a <= x`, zero otherwise.
    pub fn theta_map(&self, i: usize, a: Element, x: Element) -> Result<ThetaAction, SystemError> {
        let component = self.space.component(i)?;
        for e in [a, x] {
            if !component.contains(e) {
                return Err(SystemError::UnknownElement(self.poset().name(e).to_string()));
            }
        }
        Ok(match self.morphisms.get(&(a, x)) {
            Some(m) => ThetaAction::Map(m.clone()),
            None => ThetaAction::Zero,
        })
    }

    pub fn to_document(&self) -> SystemDocument {
        let p = self.poset();
        SystemDocument {
            poset: PosetSource::Explicit(p.to_document()),
            algebras: p
                .elements()
                .map(|a| (p.name(a).to_string(), self.algebras[a.0].clone()))
                .collect(),
            morphisms: p
                .covers()
                .iter()
                .map(|&(a, b)| MorphismLiteral {
                    from: p.name(a).to_string(),
                    to: p.name(b).to_string(),
                    mult: self.morphisms[&(a, b)].mult().to_vec(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaAction {
    Map(MultiplicityMorphism),
    Zero,
}

/// `(A^{K_i}, {σ_a^{K_i}})` for a finite directed component.
#[derive(Debug, Clone)]
pub struct Colimit {
    pub component: DirectedComponent,
    pub apex: FdAlgebra,
    pub legs: BTreeMap<Element, MultiplicityMorphism>,
}

impl Colimit {
    pub fn leg(&self, a: Element) -> Option<&MultiplicityMorphism> {
        self.legs.get(&a)
    }

    /// `leg(a) = leg(b) ∘ σ_ba` for `a <= b` in the component, and the leg at
    /// the maximum is the identity.
    pub fn check_cocone(&self, system: &InductiveSystem) -> CheckReport {
        let p = system.poset();
        let mut violations = Vec::new();
        if !self.legs[&self.component.top].is_identity() {
            violations.push(json!({ "law": "exhaustion", "top": p.name(self.component.top) }));
        }
        for &a in &self.component.members {
            for &b in &self.component.members {
                if a == b || !p.le(a, b) {
                    continue;
                }
                let via = compose(&self.legs[&b], system.morphism(a, b).expect("comparable")).expect("endpoints match");
                if via != self.legs[&a] {
                    violations.push(json!({ "law": "cocone", "a": p.name(a), "b": p.name(b) }));
                }
            }
        }
        CheckReport::from_outcome("cocone", violations, Vec::new())
    }

    /// The factoring morphism `φ` with `φ ∘ leg(a) = ψ_a` for a compatible
    /// cocone `ψ`; at finite scale it is `ψ_m`.
    pub fn factor(
        &self,
        system: &InductiveSystem,
        cocone: &BTreeMap<Element, MultiplicityMorphism>,
    ) -> Result<MultiplicityMorphism, SystemError> {
        let p = system.poset();
        let name = |e: Element| p.name(e).to_string();
        if let Some(&a) = self.component.members.iter().find(|a| !cocone.contains_key(a)) {
            return Err(SystemError::UnknownElement(name(a)));
        }
        for &a in &self.component.members {
            let psi_a = &cocone[&a];
            for &b in &self.component.members {
                if a != b && p.le(a, b) {
                    let via = compose(&cocone[&b], system.morphism(a, b)?)?;
                    if &via != psi_a {
                        return Err(SystemError::BadCocone {
                            from: name(a),
                            to: name(b),
                        });
                    }
                }
            }
        }
        let phi = cocone[&self.component.top].clone();
        for (a, leg) in &self.legs {
            debug_assert_eq!(compose(&phi, leg).as_ref(), Ok(&cocone[a]));
        }
        Ok(phi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphismLiteral {
    pub from: String,
    pub to: String,
    pub mult: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySource {
    pub family: String,
    pub window: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PosetSource {
    Explicit(PosetDocument),
    Family(FamilySource),
}

/// JSON form of a system: poset, `{element: dims}`, generating morphisms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDocument {
    pub poset: PosetSource,
    pub algebras: BTreeMap<String, FdAlgebra>,
    #[serde(default)]
    pub morphisms: Vec<MorphismLiteral>,
}

impl FamilySource {
    pub fn resolve(&self) -> Result<FamilyWindow, SystemError> {
        let kind: FamilyKind = self.family.parse()?;
        let param = self
            .param
            .as_deref()
            .map(parse_q)
            .transpose()
            .map_err(FamilyError::from)?;
        let step = self
            .step
            .as_deref()
            .map(parse_q)
            .transpose()
            .map_err(FamilyError::from)?;
        let spec = FamilySpec::new(kind, param)?;
        let bounds: WindowBounds = self.window.parse()?;
        Ok(spec.extract_window(&bounds, step)?)
    }
}

impl SystemDocument {
    pub fn parse(text: &str) -> Result<Self, SystemError> {
        serde_json::from_str(text).map_err(|e| SystemError::BadDocument(e.to_string()))
    }

    /// The system, and the family window when the poset came from one.
    pub fn build(&self) -> Result<(InductiveSystem, Option<FamilyWindow>), SystemError> {
        let (poset, window) = match &self.poset {
            PosetSource::Explicit(doc) => (FinitePoset::from_document(doc)?, None),
            PosetSource::Family(source) => {
                let w = source.resolve()?;
                (w.poset.clone(), Some(w))
            }
        };
        for name in self.algebras.keys() {
            poset.lookup(name)?;
        }
        let algebras = poset
            .elements()
            .map(|a| {
                let name = poset.name(a);
                self.algebras
                    .get(name)
                    .cloned()
                    .ok_or_else(|| SystemError::MissingAlgebra(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let generators = self
            .morphisms
            .iter()
            .map(|lit| {
                let (a, b) = (poset.lookup(&lit.from)?, poset.lookup(&lit.to)?);
                let m = make_morphism(algebras[a.0].clone(), algebras[b.0].clone(), lit.mult.clone())?;
                Ok((a, b, m))
            })
            .collect::<Result<Vec<_>, SystemError>>()?;
        Ok((InductiveSystem::new(poset, algebras, generators)?, window))
    }
}
