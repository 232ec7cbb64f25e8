//! Central projections along a strictly nested neighborhood chain at a
//! non-isolated index, checked on the stage algebras of a window system.
//!
//! With `W_n = U_{a_n} \ U_{a_{n+1}}`, the function `f` is `1` on odd cells,
//! `0` on even cells and outside `U_{a_1}`. At truncation depth `N` the chain
//! stops at `a_N`; the remaining set `U_{a_N}` (which contains the index
//! itself) is treated as the cell `W_N`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::algebra::{realize_bounded, ConcreteElement, ScalarFunctionElement, REALIZE_BOUND};
use crate::families::{FamilyKind, FamilyPoint, FamilySpec, FamilyWindow, WindowBounds};
use crate::poset::Element;
use crate::product::ProductSystem;
use crate::random::{random_coherent_system, SystemShape};
use crate::report::CheckReport;
use crate::symbolic::{SymbolicIndex, SymbolicNbhd};
use crate::system::{InductiveSystem, SystemError};

pub const DEFAULT_DEPTH: usize = 6;
pub const COMMUTATION_SAMPLES: usize = 50;
pub const SUMMARY: &str = "center contains a non-trivial projection at every checked stage";

/// The window system shape used when no system is supplied.
pub const WINDOW_SHAPE: SystemShape = SystemShape {
    max_dim: 2,
    max_blocks: 2,
};

#[derive(Debug, Clone, Serialize)]
pub struct StageProjection {
    pub stage: usize,
    pub anchor: FamilyPoint,
    #[serde(skip)]
    pub element: Element,
    pub labels: BTreeMap<usize, SymbolicIndex>,
    pub f: ScalarFunctionElement,
    pub g: ScalarFunctionElement,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionPair {
    pub index: SymbolicIndex,
    pub chain: Vec<FamilyPoint>,
    pub cells: Vec<SymbolicNbhd>,
    pub tail: SymbolicNbhd,
    pub stages: Vec<StageProjection>,
}

impl ProjectionPair {
    /// `f(j)` on the symbolic side.
    pub fn value(&self, j: &SymbolicIndex) -> bool {
        match self.cells.iter().position(|w| w.contains(j)) {
            Some(n) => n % 2 == 0,
            None => self.tail.contains(j) && self.cells.len().is_multiple_of(2),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralOutcome {
    pub pair: ProjectionPair,
    pub checks: Vec<CheckReport>,
}

impl CentralOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }
}

fn require_chain(family: &FamilySpec, index: &SymbolicIndex, depth: usize) -> Result<(), SystemError> {
    if family.is_isolated(index)?.is_some() {
        return Err(SystemError::IsolatedIndex(index.to_string()));
    }
    if depth < 3 {
        return Err(SystemError::ChainTooShort(depth));
    }
    if family.kind() != FamilyKind::GridThreeColumns {
        return Err(SystemError::Unsupported(format!(
            "window stage algebras are only labelled for {}",
            FamilyKind::GridThreeColumns.cli_name()
        )));
    }
    Ok(())
}

/// The window `{-1, 0, 1} × [-1, depth + 1]`, which holds the chain and the
/// rows of every checked cell.
pub fn default_window(family: &FamilySpec, index: &SymbolicIndex, depth: usize) -> Result<WindowBounds, SystemError> {
    require_chain(family, index, depth)?;
    Ok(WindowBounds::int(-1, 1, -1, depth as i64 + 1))
}

/// A random coherent system on the window of [`WINDOW_SHAPE`].
pub fn default_system<R: Rng + ?Sized>(window: &FamilyWindow, rng: &mut R) -> InductiveSystem {
    random_coherent_system(rng, &window.poset, WINDOW_SHAPE)
}

pub fn central_projection_pair<R: Rng + ?Sized>(
    family: &FamilySpec,
    index: &SymbolicIndex,
    depth: usize,
    window: &FamilyWindow,
    system: &InductiveSystem,
    rng: &mut R,
) -> Result<CentralOutcome, SystemError> {
    require_chain(family, index, depth)?;
    let chain = family.nested_chain(index, depth)?;
    let nbhds = chain
        .iter()
        .map(|p| family.neighborhood(p))
        .collect::<Result<Vec<_>, _>>()?;
    let cells = nbhds
        .windows(2)
        .map(|w| w[0].difference(&w[1]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| SystemError::Unsupported(e.to_string()))?;
    let tail = nbhds.last().expect("depth >= 3").clone();

    let elements = chain
        .iter()
        .map(|p| {
            window
                .element(p)
                .ok_or_else(|| SystemError::UnknownElement(p.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let product = ProductSystem::build(system).with_realize_bound(REALIZE_BOUND);
    let space = system.space();

    let mut pair = ProjectionPair {
        index: *index,
        chain: chain.clone(),
        cells,
        tail,
        stages: Vec::new(),
    };
    let mut window_violations = Vec::new();
    for n in 0..depth - 1 {
        let e = elements[n];
        let mut labels = BTreeMap::new();
        let mut values = BTreeMap::new();
        for &j in product.indices(e) {
            let top = window.point(space.components()[j].top);
            let label = family
                .label_window_component(&top)
                .ok_or_else(|| SystemError::Unsupported(format!("window component at {top} has no index")))?;
            if !nbhds[n].contains(&label) {
                window_violations.push(json!({ "stage": n + 1, "component": j, "label": label }));
            }
            labels.insert(j, label);
            values.insert(j, pair.value(&label));
        }
        let f = ScalarFunctionElement::new(values);
        pair.stages.push(StageProjection {
            stage: n + 1,
            anchor: chain[n],
            element: e,
            labels,
            g: f.complement(),
            f,
        });
    }

    let checks = vec![
        check_chain(family, index, &chain, &nbhds),
        check_cells(&pair, &nbhds),
        CheckReport::from_outcome("window_consistency", window_violations, Vec::new()),
        check_identities(&pair, &product),
        check_nontrivial(&pair),
        check_stage_consistency(&pair, &product)?,
        check_commutation(&pair, &product, rng),
    ];
    Ok(CentralOutcome { pair, checks })
}

fn check_chain(
    family: &FamilySpec,
    index: &SymbolicIndex,
    chain: &[FamilyPoint],
    nbhds: &[SymbolicNbhd],
) -> CheckReport {
    let mut violations = Vec::new();
    for (n, u) in nbhds.iter().enumerate() {
        if !u.contains(index) {
            violations.push(json!({ "stage": n + 1, "reason": "index outside neighborhood" }));
        }
    }
    for n in 0..chain.len() - 1 {
        if !family.leq(&chain[n], &chain[n + 1]).unwrap_or(false) {
            violations.push(json!({ "stage": n + 1, "reason": "chain not increasing" }));
        }
        let strict =
            nbhds[n + 1].is_subset(&nbhds[n]).unwrap_or(false) && !nbhds[n].is_subset(&nbhds[n + 1]).unwrap_or(true);
        if !strict {
            violations.push(json!({ "stage": n + 1, "reason": "neighborhoods not strictly nested" }));
        }
    }
    let certificate = json!({ "chain": chain, "neighborhoods": nbhds });
    CheckReport::from_outcome("nested_chain", violations, vec![certificate])
}

fn check_cells(pair: &ProjectionPair, nbhds: &[SymbolicNbhd]) -> CheckReport {
    let mut violations = Vec::new();
    for (n, w) in pair.cells.iter().enumerate() {
        if w.is_empty() {
            violations.push(json!({ "cell": n + 1, "reason": "empty" }));
        }
        if !w.is_subset(&nbhds[n]).unwrap_or(false) || !w.is_disjoint(&nbhds[n + 1]).unwrap_or(false) {
            violations.push(json!({ "cell": n + 1, "reason": "not a difference of consecutive neighborhoods" }));
        }
        for (m, v) in pair.cells.iter().enumerate().skip(n + 1) {
            if !w.is_disjoint(v).unwrap_or(false) {
                violations.push(json!({ "cells": [n + 1, m + 1], "reason": "overlap" }));
            }
        }
    }
    let certificate = json!({ "cells": pair.cells });
    CheckReport::from_outcome("cell_partition", violations, vec![certificate])
}

fn realize_pair(stage: &StageProjection, product: &ProductSystem) -> (ConcreteElement, ConcreteElement) {
    let algebra = product.stage(stage.element);
    (stage.f.realize(algebra), stage.g.realize(algebra))
}

fn check_identities(pair: &ProjectionPair, product: &ProductSystem) -> CheckReport {
    let mut violations = Vec::new();
    for stage in &pair.stages {
        let (f, g) = realize_pair(stage, product);
        let algebra = &product.stage(stage.element).algebra;
        let laws = [
            ("fg = 0", f.mul(&g) == ConcreteElement::zero(algebra)),
            ("f + g = 1", f.add(&g) == ConcreteElement::identity(algebra)),
            ("f^2 = f", f.mul(&f) == f),
            ("f* = f", f.adjoint() == f),
        ];
        for (law, ok) in laws {
            if !ok {
                violations.push(json!({ "stage": stage.stage, "law": law }));
            }
        }
    }
    CheckReport::from_outcome("projection_identities", violations, Vec::new())
}

fn check_nontrivial(pair: &ProjectionPair) -> CheckReport {
    let mut violations = Vec::new();
    let mut certificates = Vec::new();
    for stage in &pair.stages {
        if stage.f.is_zero() || stage.f.is_unit() {
            violations.push(json!({ "stage": stage.stage, "f": stage.f }));
        } else {
            let ones: Vec<_> = stage
                .f
                .values
                .iter()
                .filter(|(_, &v)| v)
                .map(|(j, _)| stage.labels[j])
                .collect();
            certificates.push(json!({ "stage": stage.stage, "f_support": ones }));
        }
    }
    CheckReport::from_outcome("nontrivial", violations, certificates)
}

fn check_stage_consistency(pair: &ProjectionPair, product: &ProductSystem) -> Result<CheckReport, SystemError> {
    let mut violations = Vec::new();
    for (m, early) in pair.stages.iter().enumerate() {
        let (f_early, _) = realize_pair(early, product);
        for late in &pair.stages[m + 1..] {
            let restricted = early.f.restrict(&late.f.support().collect());
            let tau = realize_bounded(product.tau(early.element, late.element)?, REALIZE_BOUND)?;
            let (f_late, _) = realize_pair(late, product);
            if restricted != late.f || tau.apply(&f_early) != f_late {
                violations.push(json!({ "from": early.stage, "to": late.stage }));
            }
        }
    }
    Ok(CheckReport::from_outcome("stage_consistency", violations, Vec::new()))
}

fn check_commutation<R: Rng + ?Sized>(pair: &ProjectionPair, product: &ProductSystem, rng: &mut R) -> CheckReport {
    let mut violations = Vec::new();
    for stage in &pair.stages {
        let (f, g) = realize_pair(stage, product);
        let algebra = &product.stage(stage.element).algebra;
        for sample in 0..COMMUTATION_SAMPLES {
            let h = ConcreteElement::random(algebra, rng);
            if f.mul(&h) != h.mul(&f) || g.mul(&h) != h.mul(&g) {
                violations.push(json!({ "stage": stage.stage, "sample": sample }));
            }
        }
    }
    let certificate = json!({ "stages": pair.stages.len(), "samples_per_stage": COMMUTATION_SAMPLES });
    CheckReport::from_outcome("commutation", violations, vec![certificate])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(depth: usize, seed: u64) -> (CentralOutcome, ProductSystem) {
        let family = FamilySpec::grid_three_columns();
        let index = SymbolicIndex::PlusInfinity;
        let bounds = default_window(&family, &index, depth).unwrap();
        let window = family.extract_window(&bounds, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let system = default_system(&window, &mut rng);
        let out = central_projection_pair(&family, &index, depth, &window, &system, &mut rng).unwrap();
        (out, ProductSystem::build(&system))
    }

    fn run(depth: usize, seed: u64) -> CentralOutcome {
        setup(depth, seed).0
    }

    #[test]
    fn grid_plus_infinity_cells() {
        let out = run(3, 1);
        assert!(out.passed(), "{:?}", out.checks);
        let cells = &out.pair.cells;
        assert_eq!(cells[0], SymbolicNbhd::IntegerInterval { lo: 1, hi: 1 });
        assert_eq!(cells[1], SymbolicNbhd::IntegerInterval { lo: 2, hi: 2 });
        assert!(out.pair.value(&SymbolicIndex::Int(1)));
        assert!(!out.pair.value(&SymbolicIndex::Int(2)));
        assert!(out.pair.value(&SymbolicIndex::Int(3)));
        assert!(!out.pair.value(&SymbolicIndex::Int(0)));
    }

    #[test]
    fn passes_at_several_depths() {
        for depth in [4, 6, 7] {
            let out = run(depth, depth as u64);
            assert!(out.passed(), "depth {depth}: {:?}", out.checks);
            assert_eq!(out.pair.stages.len(), depth - 1);
        }
    }

    #[test]
    fn f_and_g_are_complementary() {
        let out = run(6, 2);
        for s in &out.pair.stages {
            assert_eq!(s.g, s.f.complement());
        }
    }

    #[test]
    fn preconditions() {
        let family = FamilySpec::grid_three_columns();
        assert_eq!(
            default_window(&family, &SymbolicIndex::Int(5), 6),
            Err(SystemError::IsolatedIndex("5".into()))
        );
        assert_eq!(
            default_window(&family, &SymbolicIndex::PlusInfinity, 2),
            Err(SystemError::ChainTooShort(2))
        );
        assert_eq!(
            default_window(&FamilySpec::integer_cone(), &SymbolicIndex::Int(0), 6),
            Err(SystemError::IsolatedIndex("0".into()))
        );
        assert!(default_window(&family, &SymbolicIndex::MinusInfinity, 4).is_ok());
    }

    #[test]
    fn flipped_value_is_caught() {
        let (mut out, product) = setup(4, 3);
        assert!(out.passed());
        let stage = &mut out.pair.stages[1];
        let first = *stage.f.values.keys().next().unwrap();
        stage.f.values.insert(first, !stage.f.values[&first]);
        assert!(!check_stage_consistency(&out.pair, &product).unwrap().passed());

        let stage = &mut out.pair.stages[0];
        stage.g = stage.f.clone();
        assert!(!check_identities(&out.pair, &product).passed());

        for v in out.pair.stages[2].f.values.values_mut() {
            *v = false;
        }
        assert!(!check_nontrivial(&out.pair).passed());
    }
}
