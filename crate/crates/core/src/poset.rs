//! Finite partially ordered sets and their decomposition into maximal
//! upward-directed components.
//!
//! A [`FinitePoset`] is built from a [`PosetDocument`] (element ids plus
//! arbitrary relation pairs). The order is always the reflexive-transitive
//! closure of the supplied pairs; a cycle through two or more distinct
//! elements is rejected with the cycle as certificate.
//!
//! For a finite poset every upward-directed subset has a maximum, so the
//! maximal upward-directed subsets are exactly the principal down-sets of the
//! maximal elements. [`FinitePoset::decompose`] uses that characterization;
//! [`FinitePoset::brute_force_decompose`] enumerates subsets and is kept as an
//! independent oracle.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default size limit for [`FinitePoset::brute_force_decompose`].
pub const BRUTE_FORCE_BOUND: usize = 15;

/// Handle to an element of a specific [`FinitePoset`] (its position in the
/// document order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element(pub usize);

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type Subset = BTreeSet<Element>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset has an empty carrier")]
    EmptyCarrier,
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("antisymmetry violated by the cycle {}", .cycle.join(" <= "))]
    AntisymmetryViolation { cycle: Vec<String> },
    #[error("brute-force enumeration is limited to {bound} elements, poset has {size}")]
    TooLarge { size: usize, bound: usize },
}

/// Serialized form: `{"elements": [..], "relations": [[a, b], ..]}` where each
/// pair `[a, b]` asserts `a <= b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDocument {
    pub elements: Vec<String>,
    #[serde(default)]
    pub relations: Vec<(String, String)>,
}

/// A maximal upward-directed subset `K_i`, identified by its maximum `top`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedComponent {
    pub index: usize,
    pub top: Element,
    pub members: Subset,
}

impl DirectedComponent {
    pub fn contains(&self, a: Element) -> bool {
        self.members.contains(&a)
    }
}

#[derive(Debug, Clone)]
pub struct FinitePoset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    // reach[a * n + b] is true iff a <= b
    reach: Vec<bool>,
    covers: Vec<(Element, Element)>,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.reach == other.reach
    }
}

impl FinitePoset {
    /// Validates a document and takes the reflexive-transitive closure of its
    /// relation pairs.
    pub fn from_document(doc: &PosetDocument) -> Result<Self, PosetError> {
        if doc.elements.is_empty() {
            return Err(PosetError::EmptyCarrier);
        }
        let mut index = HashMap::with_capacity(doc.elements.len());
        for (i, name) in doc.elements.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(PosetError::DuplicateElement(name.clone()));
            }
        }
        let lookup = |name: &String| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| PosetError::UnknownElement(name.clone()))
        };
        let n = doc.elements.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (a, b) in &doc.relations {
            let (a, b) = (lookup(a)?, lookup(b)?);
            if a != b {
                succ[a].insert(b);
            }
        }
        if let Some(cycle) = find_cycle(&succ) {
            return Err(PosetError::AntisymmetryViolation {
                cycle: cycle.into_iter().map(|i| doc.elements[i].clone()).collect(),
            });
        }
        let reach = closure(&succ);
        Ok(Self::from_closed(doc.elements.clone(), index, reach))
    }

    /// Builds a poset from a relation predicate evaluated on every ordered
    /// pair; the predicate is closed and validated like document pairs.
    pub fn from_predicate<F>(names: Vec<String>, mut leq: F) -> Result<Self, PosetError>
    where
        F: FnMut(usize, usize) -> bool,
    {
        let n = names.len();
        let mut relations = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && leq(a, b) {
                    relations.push((names[a].clone(), names[b].clone()));
                }
            }
        }
        Self::from_document(&PosetDocument {
            elements: names,
            relations,
        })
    }

    fn from_closed(names: Vec<String>, index: HashMap<String, usize>, reach: Vec<bool>) -> Self {
        let n = names.len();
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || !reach[a * n + b] {
                    continue;
                }
                let between = (0..n).any(|c| c != a && c != b && reach[a * n + c] && reach[c * n + b]);
                if !between {
                    covers.push((Element(a), Element(b)));
                }
            }
        }
        Self {
            names,
            index,
            reach,
            covers,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.names.len()).map(Element)
    }

    pub fn all(&self) -> Subset {
        self.elements().collect()
    }

    pub fn name(&self, a: Element) -> &str {
        &self.names[a.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Result<Element, PosetError> {
        self.index
            .get(name)
            .map(|&i| Element(i))
            .ok_or_else(|| PosetError::UnknownElement(name.to_string()))
    }

    fn check(&self, a: Element) -> Result<(), PosetError> {
        if a.0 < self.names.len() {
            Ok(())
        } else {
            Err(PosetError::UnknownElement(a.to_string()))
        }
    }

    fn check_all<'a>(&self, s: impl IntoIterator<Item = &'a Element>) -> Result<(), PosetError> {
        s.into_iter().try_for_each(|&a| self.check(a))
    }

    /// Unchecked order query for handles known to belong to this poset.
    pub(crate) fn le(&self, a: Element, b: Element) -> bool {
        self.reach[a.0 * self.names.len() + b.0]
    }

    pub fn leq(&self, a: Element, b: Element) -> Result<bool, PosetError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.le(a, b))
    }

    pub fn leq_by_name(&self, a: &str, b: &str) -> Result<bool, PosetError> {
        Ok(self.le(self.lookup(a)?, self.lookup(b)?))
    }

    /// Hasse cover pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> &[(Element, Element)] {
        &self.covers
    }

    pub fn is_upward_directed(&self, s: &Subset) -> Result<bool, PosetError> {
        self.check_all(s)?;
        Ok(self.directed_unchecked(s))
    }

    fn directed_unchecked(&self, s: &Subset) -> bool {
        s.iter()
            .all(|&x| s.iter().all(|&y| s.iter().any(|&z| self.le(x, z) && self.le(y, z))))
    }

    /// Maximal elements in document order.
    pub fn maximal_elements(&self) -> Vec<Element> {
        self.elements()
            .filter(|&m| self.elements().all(|x| x == m || !self.le(m, x)))
            .collect()
    }

    /// `K^a = {b : a <= b}`.
    pub fn up_set(&self, a: Element) -> Result<Subset, PosetError> {
        self.check(a)?;
        Ok(self.elements().filter(|&b| self.le(a, b)).collect())
    }

    /// `{b : b <= a}`.
    pub fn down_set(&self, a: Element) -> Result<Subset, PosetError> {
        self.check(a)?;
        Ok(self.elements().filter(|&b| self.le(b, a)).collect())
    }

    /// The maximum of `s`, if it has one.
    pub fn maximum(&self, s: &Subset) -> Option<Element> {
        s.iter().copied().find(|&m| s.iter().all(|&x| self.le(x, m)))
    }

    /// All maximal upward-directed subsets, indexed by their maximal elements
    /// in document order.
    pub fn decompose(&self) -> Vec<DirectedComponent> {
        self.maximal_elements()
            .into_iter()
            .enumerate()
            .map(|(index, top)| DirectedComponent {
                index,
                top,
                members: self.elements().filter(|&b| self.le(b, top)).collect(),
            })
            .collect()
    }

    /// Enumerates every subset, keeps the upward-directed ones and returns
    /// those maximal under inclusion, in sorted order.
    pub fn brute_force_decompose(&self, bound: usize) -> Result<Vec<Subset>, PosetError> {
        let n = self.len();
        if n > bound || n >= 63 {
            return Err(PosetError::TooLarge { size: n, bound });
        }
        let up: Vec<u64> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| self.reach[a * n + b])
                    .fold(0u64, |m, b| m | (1 << b))
            })
            .collect();
        let directed = |mask: u64| {
            let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            members
                .iter()
                .all(|&x| members.iter().all(|&y| up[x] & up[y] & mask != 0))
        };
        let mut found: Vec<u64> = (1u64..(1 << n)).filter(|&m| directed(m)).collect();
        found.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
        // A directed set with a directed strict superset lies inside some
        // maximal one, which is larger and therefore already collected.
        let mut maximal: Vec<u64> = Vec::new();
        for m in found {
            if !maximal.iter().any(|&big| big & m == m) {
                maximal.push(m);
            }
        }
        let mut out: Vec<Subset> = maximal
            .into_iter()
            .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).map(Element).collect())
            .collect();
        out.sort();
        Ok(out)
    }

    /// The sub-poset on `s` with the inherited order, plus the map from new
    /// handles back to the handles of `self`.
    pub fn induced(&self, s: &Subset) -> Result<(FinitePoset, Vec<Element>), PosetError> {
        self.check_all(s)?;
        if s.is_empty() {
            return Err(PosetError::EmptyCarrier);
        }
        let back: Vec<Element> = s.iter().copied().collect();
        let names: Vec<String> = back.iter().map(|&a| self.names[a.0].clone()).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let k = back.len();
        let mut reach = vec![false; k * k];
        for (i, &a) in back.iter().enumerate() {
            for (j, &b) in back.iter().enumerate() {
                reach[i * k + j] = self.le(a, b);
            }
        }
        Ok((Self::from_closed(names, index, reach), back))
    }

    /// Document listing the cover pairs; round-trips to an equal poset.
    pub fn to_document(&self) -> PosetDocument {
        PosetDocument {
            elements: self.names.clone(),
            relations: self
                .covers
                .iter()
                .map(|&(a, b)| (self.names[a.0].clone(), self.names[b.0].clone()))
                .collect(),
        }
    }

    pub fn subset_names(&self, s: &Subset) -> Vec<String> {
        s.iter().map(|&a| self.names[a.0].clone()).collect()
    }
}

/// A cycle through at least two distinct vertices, closed (first vertex
/// repeated at the end), or `None` if the relation graph is acyclic.
fn find_cycle(succ: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = succ.len();
    let mut mark = vec![Mark::New; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, succ[root].iter().copied().collect())];
        mark[root] = Mark::Open;
        while let Some((v, pending)) = stack.last_mut() {
            let v = *v;
            match pending.pop() {
                Some(w) => match mark[w] {
                    Mark::New => {
                        mark[w] = Mark::Open;
                        parent[w] = v;
                        stack.push((w, succ[w].iter().copied().collect()));
                    }
                    Mark::Open => {
                        let mut cycle = vec![v];
                        let mut u = v;
                        while u != w {
                            u = parent[u];
                            cycle.push(u);
                        }
                        cycle.reverse();
                        cycle.push(w);
                        return Some(cycle);
                    }
                    Mark::Done => {}
                },
                None => {
                    mark[v] = Mark::Done;
                    stack.pop();
                }
            }
        }
    }
    None
}

fn closure(succ: &[BTreeSet<usize>]) -> Vec<bool> {
    let n = succ.len();
    let mut reach = vec![false; n * n];
    for a in 0..n {
        let mut stack = vec![a];
        reach[a * n + a] = true;
        while let Some(v) = stack.pop() {
            for &w in &succ[v] {
                if !reach[a * n + w] {
                    reach[a * n + w] = true;
                    stack.push(w);
                }
            }
        }
    }
    reach
}
