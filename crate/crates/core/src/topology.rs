//! The index set `I` of a finite poset, with the base `U_a = {i : a ∈ K_i}`.
//!
//! The generated topology is never materialized; every property is decided
//! on basic neighborhoods. Checks read the components and the base table
//! stored in the [`IndexSpace`], so a space assembled by
//! [`IndexSpace::from_parts`] with a tampered table is reported faithfully.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::poset::{DirectedComponent, Element, FinitePoset, PosetError};
use crate::report::CheckReport;

/// Upper bound on certificates attached to a passing report.
pub const CERTIFICATE_LIMIT: usize = 32;

pub type IndexSet = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("unknown component index {0}")]
    UnknownIndex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicNbhd {
    pub anchor: Element,
    pub members: IndexSet,
}

/// Both sides of the equivalence "`K^a` upward directed iff `|U_a| = 1`".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingletonCriterion {
    pub anchor: Element,
    pub up_set_directed: bool,
    pub singleton: bool,
}

impl SingletonCriterion {
    pub fn equivalent(&self) -> bool {
        self.up_set_directed == self.singleton
    }
}

#[derive(Debug, Clone)]
pub struct IndexSpace {
    poset: FinitePoset,
    components: Vec<DirectedComponent>,
    base: Vec<IndexSet>,
}

impl IndexSpace {
    pub fn new(poset: FinitePoset) -> Self {
        let components = poset.decompose();
        let base = poset
            .elements()
            .map(|a| components.iter().filter(|k| k.contains(a)).map(|k| k.index).collect())
            .collect();
        Self {
            poset,
            components,
            base,
        }
    }

    /// Assembles a space from explicit parts without recomputing anything;
    /// `base[a]` is taken as `U_a`. Used for fault injection.
    pub fn from_parts(poset: FinitePoset, components: Vec<DirectedComponent>, base: Vec<IndexSet>) -> Self {
        assert_eq!(base.len(), poset.len(), "one base set per element");
        Self {
            poset,
            components,
            base,
        }
    }

    pub fn into_parts(self) -> (FinitePoset, Vec<DirectedComponent>, Vec<IndexSet>) {
        (self.poset, self.components, self.base)
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn components(&self) -> &[DirectedComponent] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&DirectedComponent, TopologyError> {
        self.components.get(i).ok_or(TopologyError::UnknownIndex(i))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        0..self.components.len()
    }

    pub fn base(&self) -> &[IndexSet] {
        &self.base
    }

    /// `U_a` without bounds checking beyond the slice index.
    pub fn u(&self, a: Element) -> &IndexSet {
        &self.base[a.0]
    }

    pub fn neighborhood(&self, a: Element) -> Result<BasicNbhd, TopologyError> {
        self.poset.leq(a, a)?;
        Ok(BasicNbhd {
            anchor: a,
            members: self.base[a.0].clone(),
        })
    }

    fn name(&self, a: Element) -> &str {
        self.poset.name(a)
    }

    /// `a <= b` implies `U_b ⊆ U_a`.
    pub fn check_monotonicity(&self) -> CheckReport {
        let p = &self.poset;
        let mut violations = Vec::new();
        for a in p.elements() {
            for b in p.elements() {
                if a == b || !p.le(a, b) {
                    continue;
                }
                let missing: Vec<usize> = self.u(b).difference(self.u(a)).copied().collect();
                if !missing.is_empty() {
                    violations.push(json!({
                        "a": self.name(a),
                        "b": self.name(b),
                        "missing_from_u_a": missing,
                    }));
                }
            }
        }
        CheckReport::from_outcome("monotonicity", violations, Vec::new())
    }

    /// The two base axioms: every `i ∈ U_a ∩ U_b` has some `c` with
    /// `i ∈ U_c ⊆ U_a ∩ U_b`, and the `U_a` cover `I`.
    ///
    /// The candidate tried first is an upper bound of `a` and `b` inside
    /// `K_i`; any other element of the poset is accepted as a fallback.
    pub fn check_base_axioms(&self) -> CheckReport {
        let p = &self.poset;
        let mut violations = Vec::new();
        let mut certificates = Vec::new();
        let good = |c: Element, i: usize, meet: &IndexSet| self.u(c).contains(&i) && self.u(c).is_subset(meet);
        for a in p.elements() {
            for b in p.elements() {
                let meet: IndexSet = self.u(a).intersection(self.u(b)).copied().collect();
                for &i in &meet {
                    let recipe = self.components.get(i).and_then(|k| {
                        k.members
                            .iter()
                            .copied()
                            .find(|&c| p.le(a, c) && p.le(b, c) && good(c, i, &meet))
                    });
                    let found = recipe.or_else(|| p.elements().find(|&c| good(c, i, &meet)));
                    match found {
                        Some(c) => {
                            if a < b && certificates.len() < CERTIFICATE_LIMIT {
                                certificates.push(json!({
                                    "a": self.name(a), "b": self.name(b), "i": i, "c": self.name(c),
                                }));
                            }
                        }
                        None => violations.push(json!({
                            "a": self.name(a), "b": self.name(b), "i": i,
                            "reason": "no basic set between i and U_a ∩ U_b",
                        })),
                    }
                }
            }
        }
        for i in self.indices() {
            if !self.base.iter().any(|u| u.contains(&i)) {
                violations.push(json!({ "i": i, "reason": "index not covered by any U_a" }));
            }
        }
        CheckReport::from_outcome("base_axioms", violations, certificates)
    }

    /// Separating anchor for the ordered pair `(i, j)`: some `a` with
    /// `i ∈ U_a`, `j ∉ U_a`, preferring `a ∈ K_i \ K_j`.
    pub fn t1_anchor(&self, i: usize, j: usize) -> Option<Element> {
        let sep = |a: Element| self.u(a).contains(&i) && !self.u(a).contains(&j);
        let from_components = match (self.components.get(i), self.components.get(j)) {
            (Some(ki), Some(kj)) => ki.members.iter().copied().find(|&a| !kj.contains(a) && sep(a)),
            _ => None,
        };
        from_components.or_else(|| self.poset.elements().find(|&a| sep(a)))
    }

    pub fn check_t1(&self) -> CheckReport {
        let mut violations = Vec::new();
        let mut certificates = Vec::new();
        for i in self.indices() {
            for j in self.indices() {
                if i == j {
                    continue;
                }
                match self.t1_anchor(i, j) {
                    Some(a) => {
                        if certificates.len() < CERTIFICATE_LIMIT {
                            certificates.push(json!({ "i": i, "j": j, "anchor": self.name(a) }));
                        }
                    }
                    None => violations.push(json!({ "i": i, "j": j })),
                }
            }
        }
        CheckReport::from_outcome("t1", violations, certificates)
    }

    /// `⋂_{a ∈ K_i} U_a`.
    pub fn component_nbhd_intersection(&self, i: usize) -> Result<IndexSet, TopologyError> {
        let k = self.component(i)?;
        let mut members = k.members.iter();
        let Some(&first) = members.next() else {
            return Ok(IndexSet::new());
        };
        Ok(members.fold(self.u(first).clone(), |acc, &a| {
            acc.intersection(self.u(a)).copied().collect()
        }))
    }

    pub fn check_intersections(&self) -> CheckReport {
        let mut violations = Vec::new();
        for i in self.indices() {
            let meet = self.component_nbhd_intersection(i).unwrap_or_default();
            if meet != IndexSet::from([i]) {
                violations.push(json!({ "i": i, "intersection": meet }));
            }
        }
        CheckReport::from_outcome("component_intersection", violations, Vec::new())
    }

    /// An anchor `a` with `U_a = {i}`, if one exists.
    pub fn is_isolated(&self, i: usize) -> Option<Element> {
        let target = IndexSet::from([i]);
        self.poset.elements().find(|&a| *self.u(a) == target)
    }

    /// Anchors `(a, b)` with `i ∈ U_a`, `j ∈ U_b` and `U_a ∩ U_b = ∅`.
    pub fn hausdorff_witness(&self, i: usize, j: usize) -> Option<(Element, Element)> {
        if i == j {
            return None;
        }
        let p = &self.poset;
        p.elements().filter(|&a| self.u(a).contains(&i)).find_map(|a| {
            p.elements()
                .filter(|&b| self.u(b).contains(&j))
                .find(|&b| self.u(a).is_disjoint(self.u(b)))
                .map(|b| (a, b))
        })
    }

    pub fn singleton_criterion(&self, a: Element) -> Result<SingletonCriterion, TopologyError> {
        let up = self.poset.up_set(a)?;
        Ok(SingletonCriterion {
            anchor: a,
            up_set_directed: self.poset.is_upward_directed(&up)?,
            singleton: self.u(a).len() == 1,
        })
    }

    pub fn singleton_criterion_check(&self, a: Element) -> Result<CheckReport, TopologyError> {
        let c = self.singleton_criterion(a)?;
        let witness = json!({
            "anchor": self.name(a),
            "up_set_directed": c.up_set_directed,
            "singleton": c.singleton,
        });
        Ok(if c.equivalent() {
            CheckReport::from_outcome("singleton_criterion", Vec::new(), vec![witness])
        } else {
            CheckReport::fail("singleton_criterion", witness)
        })
    }

    pub fn check_singleton_criterion(&self) -> CheckReport {
        let mut violations = Vec::new();
        for a in self.poset.elements() {
            let c = self.singleton_criterion(a).expect("own element");
            if !c.equivalent() {
                violations.push(json!({
                    "anchor": self.name(a),
                    "up_set_directed": c.up_set_directed,
                    "singleton": c.singleton,
                }));
            }
        }
        CheckReport::from_outcome("singleton_criterion", violations, Vec::new())
    }

    /// Every index of a finite space is isolated, witnessed by the top of its
    /// component.
    pub fn check_all_isolated(&self) -> CheckReport {
        let mut violations = Vec::new();
        let mut certificates = Vec::new();
        for i in self.indices() {
            match self.is_isolated(i) {
                Some(a) => {
                    if certificates.len() < CERTIFICATE_LIMIT {
                        certificates.push(json!({ "i": i, "anchor": self.name(a) }));
                    }
                }
                None => violations.push(json!({ "i": i })),
            }
        }
        CheckReport::from_outcome("all_isolated", violations, certificates)
    }

    /// Monotonicity, base axioms, T1, component intersections and the
    /// singleton criterion.
    pub fn standard_checks(&self) -> Vec<CheckReport> {
        vec![
            self.check_monotonicity(),
            self.check_base_axioms(),
            self.check_t1(),
            self.check_intersections(),
            self.check_singleton_criterion(),
        ]
    }

    /// `{"anchor": name, "u": [..]}` rows for reports.
    pub fn base_table(&self) -> Vec<Value> {
        self.poset
            .elements()
            .map(|a| json!({ "anchor": self.name(a), "u": self.u(a) }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::PosetDocument;
    use crate::report::Status;

    fn space(elements: &[&str], relations: &[(&str, &str)]) -> IndexSpace {
        let doc = PosetDocument {
            elements: elements.iter().map(|s| s.to_string()).collect(),
            relations: relations.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        };
        IndexSpace::new(FinitePoset::from_document(&doc).unwrap())
    }

    fn lambda() -> IndexSpace {
        space(&["a", "b", "c"], &[("c", "a"), ("c", "b")])
    }

    fn el(s: &IndexSpace, name: &str) -> Element {
        s.poset().lookup(name).unwrap()
    }

    #[test]
    fn lambda_neighborhoods() {
        let s = lambda();
        assert_eq!(s.neighborhood(el(&s, "c")).unwrap().members, IndexSet::from([0, 1]));
        assert_eq!(s.neighborhood(el(&s, "a")).unwrap().members, IndexSet::from([0]));
        assert!(s.neighborhood(Element(5)).is_err());
    }

    #[test]
    fn checks_pass_on_small_posets() {
        for s in [
            lambda(),
            space(&["a", "b"], &[("a", "b")]),
            space(&["a", "b"], &[]),
            space(&["a", "b", "c"], &[("a", "c"), ("b", "c")]),
        ] {
            for r in s.standard_checks() {
                assert_eq!(r.status, Status::Pass, "{r:?}");
            }
        }
    }

    #[test]
    fn monotonicity_mutation_reports_pair() {
        let (p, comps, mut base) = space(&["a", "b"], &[("a", "b")]).into_parts();
        // chain: a single component 0; drop it from U_a
        base[0].remove(&0);
        base[0].insert(7);
        let s = IndexSpace::from_parts(p, comps, base);
        let r = s.check_monotonicity();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.witnesses[0]["a"], "a");
        assert_eq!(r.witnesses[0]["b"], "b");
    }

    #[test]
    fn t1_and_hausdorff_on_antichain() {
        let s = space(&["a", "b"], &[]);
        assert_eq!(s.t1_anchor(0, 1), Some(el(&s, "a")));
        assert_eq!(s.hausdorff_witness(0, 1), Some((el(&s, "a"), el(&s, "b"))));
        assert_eq!(s.hausdorff_witness(1, 0), Some((el(&s, "b"), el(&s, "a"))));
    }

    #[test]
    fn lambda_t1_and_intersection() {
        let s = lambda();
        assert_eq!(s.t1_anchor(0, 1), Some(el(&s, "a")));
        assert_eq!(s.component_nbhd_intersection(0).unwrap(), IndexSet::from([0]));
        assert_eq!(s.component_nbhd_intersection(3), Err(TopologyError::UnknownIndex(3)));
    }

    #[test]
    fn singleton_criterion_examples() {
        let chain = space(&["a", "b"], &[("a", "b")]);
        let c = chain.singleton_criterion(el(&chain, "a")).unwrap();
        assert!(c.up_set_directed && c.singleton);
        let s = lambda();
        let c = s.singleton_criterion(el(&s, "c")).unwrap();
        assert!(!c.up_set_directed && !c.singleton && c.equivalent());
        assert!(s.singleton_criterion_check(el(&s, "c")).unwrap().passed());
    }

    #[test]
    fn finite_indices_are_isolated_by_tops() {
        let s = lambda();
        assert_eq!(s.is_isolated(0), Some(el(&s, "a")));
        assert_eq!(s.is_isolated(1), Some(el(&s, "b")));
        assert_eq!(s.is_isolated(2), None);
        assert!(s.check_all_isolated().passed());
    }
}
