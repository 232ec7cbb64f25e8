use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use indlim::algebra::{ConcreteElement, ASSERT_TOLERANCE};
use indlim::central::{central_projection_pair, default_system, default_window, SUMMARY};
use indlim::dot::{poset_dot, window_dot};
use indlim::families::{FamilyKind, FamilyPoint, FamilySpec, FamilyWindow, WindowBounds};
use indlim::poset::{Element, FinitePoset, PosetDocument, Subset, BRUTE_FORCE_BOUND};
use indlim::product::ProductSystem;
use indlim::random::seeded;
use indlim::report::CheckReport;
use indlim::symbolic::{format_q, parse_q, SymbolicIndex, SymbolicNbhd, Q};
use indlim::system::{PosetSource, SystemDocument};
use indlim::topology::{IndexSet, IndexSpace};
use serde_json::{json, Value};

use crate::report::{digest, Report};

/// Stage algebras above this size are not realized as matrices.
const REALIZE_BOUND: usize = 512;
const SAMPLE_RADIUS: i64 = 6;

#[derive(Debug, Clone)]
pub struct Options {
    pub seed: u64,
    pub brute_check: bool,
    pub stages: Option<usize>,
    pub depth: usize,
}

impl Options {
    fn fingerprint(&self) -> Vec<u8> {
        format!(
            "seed={};brute={};stages={:?};depth={}",
            self.seed, self.brute_check, self.stages, self.depth
        )
        .into_bytes()
    }
}

#[derive(Debug, Clone)]
pub struct FamilyArgs {
    pub kind: String,
    pub param: Option<String>,
    pub window: Option<String>,
    pub step: Option<String>,
    pub points: Vec<String>,
    pub samples: usize,
}

pub struct Output {
    pub report: Report,
    pub dot: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn names(poset: &FinitePoset, s: &Subset) -> String {
    poset.subset_names(s).join(", ")
}

fn index_list(u: &IndexSet) -> String {
    let parts: Vec<String> = u.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn describe_space(report: &mut Report, space: &IndexSpace) {
    let p = space.poset();
    report.note(format!("{} elements, {} components", p.len(), space.components().len()));
    for k in space.components() {
        report.note(format!(
            "K_{} = down({}) = {{{}}}",
            k.index,
            p.name(k.top),
            names(p, &k.members)
        ));
    }
    for a in p.elements() {
        report.note(format!("U_{} = {}", p.name(a), index_list(space.u(a))));
    }
    report.detail(
        "components",
        space
            .components()
            .iter()
            .map(|k| json!({ "index": k.index, "top": p.name(k.top), "members": p.subset_names(&k.members) }))
            .collect::<Vec<_>>(),
    );
    report.detail("base", space.base_table());
}

fn interval_or_set(u: &SymbolicNbhd) -> String {
    match u {
        SymbolicNbhd::OpenInterval { lo, hi } => format!("({},{})", format_q(lo), format_q(hi)),
        other => other.to_string(),
    }
}

fn brute_force_check(poset: &FinitePoset) -> Result<CheckReport> {
    let oracle = poset.brute_force_decompose(BRUTE_FORCE_BOUND)?;
    let mut fast: Vec<Subset> = poset.decompose().into_iter().map(|k| k.members).collect();
    fast.sort();
    let violations = if fast == oracle {
        Vec::new()
    } else {
        let show = |v: &[Subset]| v.iter().map(|s| poset.subset_names(s)).collect::<Vec<_>>();
        vec![json!({ "decompose": show(&fast), "brute_force": show(&oracle) })]
    };
    Ok(CheckReport::from_outcome(
        "brute_force_oracle",
        violations,
        vec![json!({ "components": oracle.len() })],
    ))
}

pub fn analyze(path: &Path, opts: &Options) -> Result<Output> {
    let text = read(path)?;
    let doc: PosetDocument = serde_json::from_str(&text).context("not a poset document")?;
    let poset = FinitePoset::from_document(&doc)?;
    let mut report = Report::new(
        "analyze",
        digest([b"analyze".as_slice(), text.as_bytes(), &opts.fingerprint()]),
    );
    let space = IndexSpace::new(poset);
    describe_space(&mut report, &space);
    for r in space.standard_checks() {
        report.check(r);
    }
    if opts.brute_check {
        report.check(brute_force_check(space.poset())?);
    }
    let dot = poset_dot(&space);
    Ok(Output { report, dot: Some(dot) })
}

fn family_spec(kind: &str, param: Option<&str>) -> Result<FamilySpec> {
    let kind: FamilyKind = kind.parse()?;
    let param = match (kind, param) {
        (FamilyKind::ConeHalfPlane, None) => Some(Q::from_integer(1)),
        (_, p) => p.map(parse_q).transpose()?,
    };
    Ok(FamilySpec::new(kind, param)?)
}

fn default_bounds(kind: FamilyKind) -> (WindowBounds, Option<Q>) {
    match kind {
        FamilyKind::GridThreeColumns => (WindowBounds::int(-1, 1, -3, 3), None),
        FamilyKind::ConeHalfPlane => (
            WindowBounds {
                xmin: Q::from_integer(-2),
                xmax: Q::from_integer(2),
                ymin: Q::from_integer(-2),
                ymax: Q::new(-1, 2),
            },
            Some(Q::new(1, 2)),
        ),
        FamilyKind::IntegerCone => (WindowBounds::int(-2, 2, -3, 0), None),
    }
}

fn probe_indices(spec: &FamilySpec, window: &FamilyWindow) -> Vec<SymbolicIndex> {
    let mut xs: Vec<Q> = window.points.iter().map(|p| p.x).collect();
    xs.dedup();
    match spec.kind() {
        FamilyKind::GridThreeColumns => std::iter::once(SymbolicIndex::MinusInfinity)
            .chain((-3..=3).map(SymbolicIndex::Int))
            .chain(std::iter::once(SymbolicIndex::PlusInfinity))
            .collect(),
        FamilyKind::ConeHalfPlane => xs.into_iter().map(SymbolicIndex::Real).collect(),
        FamilyKind::IntegerCone => {
            let mut v: Vec<SymbolicIndex> = xs.iter().map(|x| SymbolicIndex::Int(*x.numer() as i64)).collect();
            v.sort();
            v.dedup();
            v
        }
    }
}

fn isolation_analysis(report: &mut Report, spec: &FamilySpec, probes: &[SymbolicIndex]) -> Result<()> {
    let mut isolated = Vec::new();
    let mut open = Vec::new();
    let mut violations = Vec::new();
    for i in probes {
        match spec.is_isolated(i)? {
            Some(anchor) => {
                if !spec.neighborhood(&anchor)?.set_eq(&SymbolicNbhd::singleton(*i))? {
                    violations.push(json!({ "index": i, "anchor": anchor }));
                }
                isolated.push(json!({ "index": i, "anchor": anchor }));
            }
            None => open.push(*i),
        }
    }
    if open.is_empty() {
        report.note("discrete: every index isolated");
    } else {
        let shown: Vec<String> = open.iter().map(ToString::to_string).collect();
        report.note(format!("not isolated: {}", shown.join(", ")));
    }
    report.detail("isolated", &isolated);
    report.detail("not_isolated", &open);
    report.check(CheckReport::from_outcome("isolation_witnesses", violations, isolated));

    let mut unseparated = Vec::new();
    let mut violations = Vec::new();
    for (k, i) in probes.iter().enumerate() {
        for j in &probes[k + 1..] {
            match spec.hausdorff_witness(i, j)? {
                Some((p, q)) => {
                    let (up, uq) = (spec.neighborhood(&p)?, spec.neighborhood(&q)?);
                    if !(up.contains(i) && uq.contains(j) && up.is_disjoint(&uq)?) {
                        violations.push(json!({ "i": i, "j": j, "anchors": [p, q] }));
                    }
                }
                None => unseparated.push((*i, *j)),
            }
        }
    }
    match unseparated.first() {
        Some((i, j)) => report.note(format!("not Hausdorff: witness pair ({i},{j})")),
        None => report.note("Hausdorff on the probed indices"),
    }
    report.detail("unseparated_pairs", &unseparated);
    report.check(CheckReport::from_outcome(
        "separation_witnesses",
        violations,
        Vec::new(),
    ));
    Ok(())
}

pub fn family(args: &FamilyArgs, opts: &Options) -> Result<Output> {
    let spec = family_spec(&args.kind, args.param.as_deref())?;
    let (mut bounds, mut step) = default_bounds(spec.kind());
    if let Some(w) = &args.window {
        bounds = w.parse()?;
    }
    if let Some(s) = &args.step {
        step = Some(parse_q(s)?);
    }
    let mut points: Vec<FamilyPoint> = args.points.iter().map(|p| p.parse()).collect::<Result<_, _>>()?;
    for p in &points {
        spec.validate_point(p)?;
    }
    let mut rng = seeded(opts.seed);
    points.extend((0..args.samples).map(|_| spec.sample_point(&mut rng, SAMPLE_RADIUS)));

    let inputs = format!(
        "{}|{:?}|{bounds}|{step:?}|{:?}|{}",
        spec.kind().cli_name(),
        spec.param(),
        args.points,
        args.samples
    );
    let mut report = Report::new(
        "family",
        digest([b"family".as_slice(), inputs.as_bytes(), &opts.fingerprint()]),
    );
    if let Some(a) = spec.param() {
        report.note(format!("{} with slope {a}", spec.kind().cli_name()));
    }

    let mut rows = Vec::new();
    let mut disagreements = Vec::new();
    for p in &points {
        let u = spec.neighborhood(p)?;
        if !u.set_eq(&spec.components_of(p)?)? {
            disagreements.push(json!({ "point": p }));
        }
        report.note(format!("U_({p}) = {}", interval_or_set(&u)));
        rows.push(spec.neighborhood_row(p)?);
    }
    report.detail("neighborhoods", &rows);
    report.check(CheckReport::from_outcome(
        "neighborhood_routes",
        disagreements,
        Vec::new(),
    ));
    if spec.kind() == FamilyKind::ConeHalfPlane {
        report.check(spec.check_open_interval_shape(&points));
        let unit = Q::from_integer(1);
        report.check(spec.check_interval_density(&[(-unit, unit), (Q::new(1, 3), Q::new(1, 2))], 8));
    }

    let window = spec.extract_window(&bounds, step)?;
    isolation_analysis(&mut report, &spec, &probe_indices(&spec, &window))?;
    let space = IndexSpace::new(window.poset.clone());
    let labels = spec.window_labels(&window, &space);
    report.note(format!(
        "window {bounds}: {} points, {} components",
        window.points.len(),
        space.components().len()
    ));
    report.detail(
        "window",
        json!({
            "bounds": bounds.to_string(),
            "points": window.points.len(),
            "components": space.components().iter().zip(&labels).map(|(k, l)| {
                json!({ "index": k.index, "top": window.point(k.top), "size": k.members.len(), "label": l })
            }).collect::<Vec<_>>(),
        }),
    );
    report.check(spec.check_window_order(&window));
    report.check(spec.check_window_traces(&window));
    for r in space.standard_checks() {
        report.check(r);
    }
    let dot = window_dot(&window, &space);
    Ok(Output { report, dot: Some(dot) })
}

pub fn topology(path: &Path, opts: &Options) -> Result<Output> {
    let text = read(path)?;
    let source: PosetSource = serde_json::from_str(&text).context("neither a poset document nor a family window")?;
    let (poset, window) = match &source {
        PosetSource::Explicit(doc) => (FinitePoset::from_document(doc)?, None),
        PosetSource::Family(f) => {
            let w = f.resolve()?;
            (w.poset.clone(), Some(w))
        }
    };
    let mut report = Report::new(
        "topology",
        digest([b"topology".as_slice(), text.as_bytes(), &opts.fingerprint()]),
    );
    let space = IndexSpace::new(poset);
    describe_space(&mut report, &space);
    let p = space.poset();
    let anchors: Vec<Value> = space
        .indices()
        .map(|i| json!({ "index": i, "anchor": space.is_isolated(i).map(|a| p.name(a).to_string()) }))
        .collect();
    report.detail("isolated", &anchors);
    let all_isolated = space.indices().all(|i| space.is_isolated(i).is_some());
    if all_isolated {
        report.note("discrete: every index isolated");
    }
    let mut unseparated = Vec::new();
    for i in space.indices() {
        for j in space.indices().filter(|&j| j > i) {
            if space.hausdorff_witness(i, j).is_none() {
                unseparated.push((i, j));
            }
        }
    }
    match unseparated.first() {
        Some((i, j)) => report.note(format!("not Hausdorff: witness pair ({i},{j})")),
        None => report.note("Hausdorff"),
    }
    report.detail("unseparated_pairs", &unseparated);
    for r in space.standard_checks() {
        report.check(r);
    }
    report.check(space.check_all_isolated());
    let dot = match &window {
        Some(w) => window_dot(w, &space),
        None => poset_dot(&space),
    };
    Ok(Output { report, dot: Some(dot) })
}

fn merge(name: &str, reports: Vec<CheckReport>) -> CheckReport {
    let mut violations = Vec::new();
    let mut certificates = Vec::new();
    for r in reports {
        if r.passed() {
            certificates.extend(r.witnesses);
        } else {
            violations.extend(r.witnesses);
        }
    }
    CheckReport::from_outcome(name, violations, certificates)
}

/// The first member of `members` with nothing strictly below it in `members`.
fn lowest(poset: &FinitePoset, members: &Subset) -> Element {
    let below = |b: Element| members.iter().any(|&a| a != b && poset.leq(a, b).unwrap_or(false));
    members
        .iter()
        .copied()
        .find(|&b| !below(b))
        .expect("finite nonempty set has a minimal element")
}

pub fn indsys(path: &Path, opts: &Options) -> Result<Output> {
    let text = read(path)?;
    let doc = SystemDocument::parse(&text)?;
    let (system, window) = doc.build()?;
    let mut report = Report::new(
        "indsys",
        digest([b"indsys".as_slice(), text.as_bytes(), &opts.fingerprint()]),
    );
    let coherence = system.validate_system();
    let coherent = coherence.passed();
    report.check(coherence);
    let poset = system.poset();
    let colimits = system.colimits();
    for c in &colimits {
        report.note(format!(
            "component {} (top {}): apex {}",
            c.component.index,
            poset.name(c.component.top),
            c.apex
        ));
    }
    report.detail(
        "colimits",
        colimits
            .iter()
            .map(|c| json!({ "index": c.component.index, "top": poset.name(c.component.top), "apex": c.apex }))
            .collect::<Vec<_>>(),
    );
    report.check(merge(
        "cocone",
        colimits.iter().map(|c| c.check_cocone(&system)).collect(),
    ));
    if !coherent {
        return Ok(Output {
            report,
            dot: Some(poset_dot(system.space())),
        });
    }

    let products = ProductSystem::build(&system).with_realize_bound(REALIZE_BOUND);
    report.detail("stages", poset.elements().map(|a| {
        json!({ "element": poset.name(a), "indices": products.indices(a), "algebra": products.stage(a).algebra })
    }).collect::<Vec<_>>());
    report.check(products.check_tau_coherence());
    report.check(products.check_all_squares());
    report.check(products.check_stage_injectivity());

    let mut rng = seeded(opts.seed);
    let isometry = poset
        .elements()
        .map(|a| products.check_sigma_isometry(a, &ConcreteElement::random(system.algebra(a), &mut rng)))
        .collect::<Result<Vec<_>, _>>()?;
    report.check(merge("sigma_isometry", isometry));

    let mut profiles = Vec::new();
    let mut violations = Vec::new();
    for c in &colimits {
        let members = &c.component.members;
        let a = lowest(poset, members);
        let stages: Vec<Element> = members
            .iter()
            .copied()
            .take(opts.stages.unwrap_or(members.len()))
            .collect();
        let x1 = ConcreteElement::random(system.algebra(a), &mut rng);
        let x2 = ConcreteElement::random(system.algebra(a), &mut rng);
        let rows = products.stage_norm_profile(c.component.index, a, &x1, &x2, &stages)?;
        for row in &rows {
            let bad =
                (row.norm - row.expected).abs() > ASSERT_TOLERANCE || (row.comparable && row.norm <= ASSERT_TOLERANCE);
            if bad {
                violations.push(json!({ "component": c.component.index, "from": poset.name(a), "stage": poset.name(row.stage), "norm": row.norm }));
            }
        }
        report.note(format!(
            "norm profile of component {} from {}: {} stage rows",
            c.component.index,
            poset.name(a),
            rows.len()
        ));
        profiles.push(json!({
            "component": c.component.index,
            "from": poset.name(a),
            "rows": rows.iter().map(|r| json!({
                "stage": poset.name(r.stage), "comparable": r.comparable, "norm": r.norm, "expected": r.expected,
            })).collect::<Vec<_>>(),
        }));
    }
    report.detail("norm_profiles", &profiles);
    report.check(CheckReport::from_outcome("norm_profile", violations, Vec::new()));

    let isolated: Vec<usize> = system
        .space()
        .indices()
        .filter(|&i| system.space().is_isolated(i).is_some())
        .collect();
    let iso = isolated
        .iter()
        .map(|&i| products.verify_isolated_isomorphism(i))
        .collect::<Result<Vec<_>, _>>()?;
    report.check(merge("isolated_isomorphism", iso));

    let all: IndexSet = system.space().indices().collect();
    let globals = products.build_global_products(&all)?;
    report.note(format!("M_F = {}, M^_F = {}", globals.m_f, globals.m_hat_f));
    report.detail("global_products", &globals);
    report.check(products.check_global_products(&all)?);

    let dot = match &window {
        Some(w) => window_dot(w, system.space()),
        None => poset_dot(system.space()),
    };
    Ok(Output { report, dot: Some(dot) })
}

pub fn thm3(kind: &str, index: &str, param: Option<&str>, opts: &Options) -> Result<Output> {
    let spec = family_spec(kind, param)?;
    let index: SymbolicIndex = index.parse()?;
    let inputs = format!("{}|{:?}|{index}", spec.kind().cli_name(), spec.param());
    let mut report = Report::new(
        "thm3",
        digest([b"thm3".as_slice(), inputs.as_bytes(), &opts.fingerprint()]),
    );
    let bounds = default_window(&spec, &index, opts.depth)?;
    let window = spec.extract_window(&bounds, None)?;
    let mut rng = seeded(opts.seed);
    let system = default_system(&window, &mut rng);
    let outcome = central_projection_pair(&spec, &index, opts.depth, &window, &system, &mut rng)?;
    let pair = &outcome.pair;
    let chain: Vec<String> = pair.chain.iter().map(|p| format!("({p})")).collect();
    report.note(format!("chain at {index}: {}", chain.join(" <= ")));
    for (n, cell) in pair.cells.iter().enumerate() {
        report.note(format!("W_{} = {cell}, f = {}", n + 1, u8::from(n % 2 == 0)));
    }
    report.note(format!("tail = {}", pair.tail));
    for r in outcome.checks.iter().cloned() {
        report.check(r);
    }
    if report.passed() {
        report.note(SUMMARY);
    }
    report.detail("projection_pair", pair);
    let dot = window_dot(&window, system.space());
    Ok(Output { report, dot: Some(dot) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn opts() -> Options {
        Options {
            seed: 1,
            brute_check: true,
            stages: None,
            depth: 6,
        }
    }

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn lowest_finds_a_minimal_member() {
        let doc = PosetDocument {
            elements: vec!["a".into(), "b".into(), "c".into()],
            relations: vec![("c".into(), "a".into()), ("c".into(), "b".into())],
        };
        let p = FinitePoset::from_document(&doc).unwrap();
        assert_eq!(p.name(lowest(&p, &p.all())), "c");
    }

    #[test]
    fn analyze_lambda_passes_with_oracle() {
        let f = file(r#"{"elements":["a","b","c"],"relations":[["c","a"],["c","b"]]}"#);
        let out = analyze(f.path(), &opts()).unwrap();
        assert!(out.report.passed());
        assert!(out.report.checks.iter().any(|c| c.check == "brute_force_oracle"));
        assert_eq!(out.report.details["components"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn family_notes_match_the_examples() {
        let args = |kind: &str| FamilyArgs {
            kind: kind.into(),
            param: None,
            window: None,
            step: None,
            points: vec!["0,-1".into()],
            samples: 4,
        };
        let ex1 = family(&args("ex1"), &opts()).unwrap().report;
        assert!(ex1.notes.iter().any(|n| n == "not Hausdorff: witness pair (-inf,+inf)"));
        let ex3 = family(&args("ex3"), &opts()).unwrap().report;
        assert!(ex3.notes.iter().any(|n| n == "discrete: every index isolated"));
        let ex2 = family(&args("ex2"), &opts()).unwrap().report;
        assert!(ex2.notes.iter().any(|n| n == "U_(0,-1) = (-1,1)"), "{:?}", ex2.notes);
        assert!(ex1.passed() && ex2.passed() && ex3.passed());
    }

    #[test]
    fn thm3_rejects_isolated_indices() {
        assert!(thm3("ex1", "5", None, &opts()).is_err());
        assert!(thm3("ex3", "0", None, &opts()).is_err());
        let out = thm3("ex1", "+inf", None, &opts()).unwrap();
        assert!(out.report.passed());
        assert!(out.report.notes.iter().any(|n| n == SUMMARY));
    }
}
