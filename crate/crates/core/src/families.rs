//! The three built-in infinite posets, handled symbolically.
//!
//! * [`FamilyKind::GridThreeColumns`] (`ex1`): `{-1, 0, 1} × ℤ`; the side
//!   columns are chains, and `(±1, y1) <= (0, y2)` iff `y1 < y2`. Index set
//!   `ℤ ∪ {-∞, +∞}`; not Hausdorff.
//! * [`FamilyKind::ConeHalfPlane`] (`ex2`): the open lower half-plane with
//!   `p <= q` iff `p = q` or `y2 - y1 > a·|x2 - x1|`. Index set `ℝ`.
//! * [`FamilyKind::IntegerCone`] (`ex3`): `ℤ × ℤ_{<=0}` with
//!   `(n1, m1) <= (n2, m2)` iff `m2 - m1 >= n2 - n1 >= 0`. Index set `ℤ`,
//!   discrete.
//!
//! Each family has two independently written routes to `U_p`:
//! [`FamilySpec::components_of`] solves the component membership formulas,
//! [`FamilySpec::neighborhood`] returns the closed-form neighborhoods.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::poset::{Element, FinitePoset, PosetError};
use crate::report::CheckReport;
use crate::symbolic::{format_q, parse_q, q_abs, SymbolicError, SymbolicIndex, SymbolicNbhd, Q};
use crate::topology::IndexSpace;

/// Largest window that [`FamilySpec::extract_window`] will build.
pub const WINDOW_LIMIT: usize = 400;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("bad coordinates {point} for {family}: {reason}")]
    BadCoordinates {
        family: &'static str,
        point: String,
        reason: &'static str,
    },
    #[error("bad family parameter: {0}")]
    BadParam(String),
    #[error("index {index} does not belong to the index set of {family}")]
    UnknownIndex { family: &'static str, index: String },
    #[error("window contains no carrier points")]
    EmptyWindow,
    #[error("window has {0} points, limit is {WINDOW_LIMIT}")]
    WindowTooLarge(usize),
    #[error("index {0} is isolated; no strictly nested chain of neighborhoods exists")]
    IsolatedIndex(String),
    #[error("cannot parse `{0}` (expected x,y)")]
    BadPoint(String),
    #[error("cannot parse window `{0}` (expected xmin,xmax,ymin,ymax)")]
    BadWindow(String),
    #[error("unknown family `{0}` (expected ex1, ex2 or ex3)")]
    UnknownFamily(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    GridThreeColumns,
    ConeHalfPlane,
    IntegerCone,
}

impl FamilyKind {
    pub fn cli_name(self) -> &'static str {
        match self {
            FamilyKind::GridThreeColumns => "ex1",
            FamilyKind::ConeHalfPlane => "ex2",
            FamilyKind::IntegerCone => "ex3",
        }
    }
}

impl FromStr for FamilyKind {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ex1" | "grid-three-columns" => Ok(FamilyKind::GridThreeColumns),
            "ex2" | "cone-half-plane" => Ok(FamilyKind::ConeHalfPlane),
            "ex3" | "integer-cone" => Ok(FamilyKind::IntegerCone),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }
}

impl Serialize for FamilyKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.cli_name())
    }
}

/// A carrier point `(x, y)`; integer families use integral coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyPoint {
    pub x: Q,
    pub y: Q,
}

impl FamilyPoint {
    pub fn int(x: i64, y: i64) -> Self {
        Self {
            x: Q::from_integer(x as i128),
            y: Q::from_integer(y as i128),
        }
    }

    pub fn new(x: Q, y: Q) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for FamilyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", format_q(&self.x), format_q(&self.y))
    }
}

impl FromStr for FamilyPoint {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (x, y) = t.split_once(',').ok_or_else(|| FamilyError::BadPoint(s.to_string()))?;
        let x = parse_q(x).map_err(|_| FamilyError::BadPoint(s.to_string()))?;
        let y = parse_q(y).map_err(|_| FamilyError::BadPoint(s.to_string()))?;
        Ok(Self { x, y })
    }
}

impl Serialize for FamilyPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Coordinate box `xmin <= x <= xmax`, `ymin <= y <= ymax`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowBounds {
    pub xmin: Q,
    pub xmax: Q,
    pub ymin: Q,
    pub ymax: Q,
}

impl WindowBounds {
    pub fn int(xmin: i64, xmax: i64, ymin: i64, ymax: i64) -> Self {
        let q = |v: i64| Q::from_integer(v as i128);
        Self {
            xmin: q(xmin),
            xmax: q(xmax),
            ymin: q(ymin),
            ymax: q(ymax),
        }
    }
}

impl FromStr for WindowBounds {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FamilyError::BadWindow(s.to_string());
        let parts: Vec<Q> = s.split(',').map(parse_q).collect::<Result<_, _>>().map_err(|_| bad())?;
        let [xmin, xmax, ymin, ymax] = parts[..] else {
            return Err(bad());
        };
        Ok(Self { xmin, xmax, ymin, ymax })
    }
}

impl fmt::Display for WindowBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            format_q(&self.xmin),
            format_q(&self.xmax),
            format_q(&self.ymin),
            format_q(&self.ymax)
        )
    }
}

/// A finite window of a family: the poset plus the point behind each element.
#[derive(Debug, Clone)]
pub struct FamilyWindow {
    pub family: FamilySpec,
    pub bounds: WindowBounds,
    pub poset: FinitePoset,
    pub points: Vec<FamilyPoint>,
}

impl FamilyWindow {
    pub fn point(&self, a: Element) -> FamilyPoint {
        self.points[a.0]
    }

    pub fn element(&self, p: &FamilyPoint) -> Option<Element> {
        self.points.iter().position(|q| q == p).map(Element)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    kind: FamilyKind,
    param: Option<Q>,
}

fn as_int(q: &Q) -> Option<i64> {
    if q.is_integer() {
        i64::try_from(*q.numer()).ok()
    } else {
        None
    }
}

fn q_int(v: i64) -> Q {
    Q::from_integer(v as i128)
}

impl FamilySpec {
    pub fn grid_three_columns() -> Self {
        Self {
            kind: FamilyKind::GridThreeColumns,
            param: None,
        }
    }

    /// The cone order on the lower half-plane with slope parameter `a > 0`.
    pub fn cone_half_plane(a: Q) -> Result<Self, FamilyError> {
        if a <= Q::zero() {
            return Err(FamilyError::BadParam(format!(
                "cone parameter must be positive, got {}",
                format_q(&a)
            )));
        }
        Ok(Self {
            kind: FamilyKind::ConeHalfPlane,
            param: Some(a),
        })
    }

    pub fn integer_cone() -> Self {
        Self {
            kind: FamilyKind::IntegerCone,
            param: None,
        }
    }

    /// `param` is required for `ConeHalfPlane` and rejected otherwise.
    pub fn new(kind: FamilyKind, param: Option<Q>) -> Result<Self, FamilyError> {
        match (kind, param) {
            (FamilyKind::ConeHalfPlane, Some(a)) => Self::cone_half_plane(a),
            (FamilyKind::ConeHalfPlane, None) => Err(FamilyError::BadParam("ex2 needs a parameter".into())),
            (_, Some(_)) => Err(FamilyError::BadParam(format!("{} takes no parameter", kind.cli_name()))),
            (FamilyKind::GridThreeColumns, None) => Ok(Self::grid_three_columns()),
            (FamilyKind::IntegerCone, None) => Ok(Self::integer_cone()),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn param(&self) -> Option<Q> {
        self.param
    }

    fn slope(&self) -> Q {
        self.param.expect("cone family carries its parameter")
    }

    fn bad(&self, p: &FamilyPoint, reason: &'static str) -> FamilyError {
        FamilyError::BadCoordinates {
            family: self.kind.cli_name(),
            point: p.to_string(),
            reason,
        }
    }

    /// Integer coordinates of a validated point (integer families only).
    fn int_coords(&self, p: &FamilyPoint) -> Result<(i64, i64), FamilyError> {
        self.validate_point(p)?;
        Ok((as_int(&p.x).expect("validated"), as_int(&p.y).expect("validated")))
    }

    pub fn validate_point(&self, p: &FamilyPoint) -> Result<(), FamilyError> {
        match self.kind {
            FamilyKind::GridThreeColumns => {
                let (Some(x), Some(_)) = (as_int(&p.x), as_int(&p.y)) else {
                    return Err(self.bad(p, "coordinates must be integers"));
                };
                if !(-1..=1).contains(&x) {
                    return Err(self.bad(p, "x must be -1, 0 or 1"));
                }
            }
            FamilyKind::ConeHalfPlane => {
                if p.y >= Q::zero() {
                    return Err(self.bad(p, "y must be negative"));
                }
            }
            FamilyKind::IntegerCone => {
                let (Some(_), Some(m)) = (as_int(&p.x), as_int(&p.y)) else {
                    return Err(self.bad(p, "coordinates must be integers"));
                };
                if m > 0 {
                    return Err(self.bad(p, "m must be <= 0"));
                }
            }
        }
        Ok(())
    }

    /// The family's order predicate, evaluated exactly.
    pub fn leq(&self, p: &FamilyPoint, q: &FamilyPoint) -> Result<bool, FamilyError> {
        self.validate_point(p)?;
        self.validate_point(q)?;
        Ok(match self.kind {
            FamilyKind::GridThreeColumns => {
                let (x1, y1) = self.int_coords(p)?;
                let (x2, y2) = self.int_coords(q)?;
                let side = |x: i64| x == -1 || x == 1;
                p == q || (side(x1) && x1 == x2 && y1 <= y2) || (side(x1) && x2 == 0 && y1 < y2)
            }
            FamilyKind::ConeHalfPlane => p == q || q.y - p.y > self.slope() * q_abs(q.x - p.x),
            FamilyKind::IntegerCone => {
                let (n1, m1) = self.int_coords(p)?;
                let (n2, m2) = self.int_coords(q)?;
                m2 - m1 >= n2 - n1 && n2 - n1 >= 0
            }
        })
    }

    pub fn contains_index(&self, i: &SymbolicIndex) -> bool {
        matches!(
            (self.kind, i),
            (FamilyKind::GridThreeColumns, SymbolicIndex::Int(_))
                | (FamilyKind::GridThreeColumns, SymbolicIndex::PlusInfinity)
                | (FamilyKind::GridThreeColumns, SymbolicIndex::MinusInfinity)
                | (FamilyKind::ConeHalfPlane, SymbolicIndex::Real(_))
                | (FamilyKind::IntegerCone, SymbolicIndex::Int(_))
        )
    }

    fn check_index(&self, i: &SymbolicIndex) -> Result<(), FamilyError> {
        if self.contains_index(i) {
            Ok(())
        } else {
            Err(FamilyError::UnknownIndex {
                family: self.kind.cli_name(),
                index: i.to_string(),
            })
        }
    }

    /// Membership `p ∈ K_i` from the component formulas.
    pub fn component_contains(&self, i: &SymbolicIndex, p: &FamilyPoint) -> Result<bool, FamilyError> {
        self.check_index(i)?;
        self.validate_point(p)?;
        Ok(match (self.kind, i) {
            (FamilyKind::GridThreeColumns, _) => {
                let (x, y) = self.int_coords(p)?;
                match i {
                    SymbolicIndex::MinusInfinity => x == -1,
                    SymbolicIndex::PlusInfinity => x == 1,
                    SymbolicIndex::Int(k) => (x == 0 && y == *k) || (x != 0 && y < *k),
                    SymbolicIndex::Real(_) => unreachable!("checked"),
                }
            }
            (FamilyKind::ConeHalfPlane, SymbolicIndex::Real(r)) => -p.y > self.slope() * q_abs(*r - p.x),
            (FamilyKind::IntegerCone, SymbolicIndex::Int(k)) => {
                let (n, m) = self.int_coords(p)?;
                -m >= k - n && k - n >= 0
            }
            _ => unreachable!("checked"),
        })
    }

    /// `{i : p ∈ K_i}`, obtained by solving the component formulas for `i`.
    pub fn components_of(&self, p: &FamilyPoint) -> Result<SymbolicNbhd, FamilyError> {
        self.validate_point(p)?;
        Ok(match self.kind {
            FamilyKind::GridThreeColumns => {
                let (x, y) = self.int_coords(p)?;
                if x == 0 {
                    // (0, y) ∈ K_k only through the apex term, i.e. k = y
                    SymbolicNbhd::singleton(SymbolicIndex::Int(y))
                } else {
                    // a side point lies in its column's component and in every
                    // K_k whose apex row k is strictly above it
                    SymbolicNbhd::TaggedRay {
                        minus_infinity: x == -1,
                        plus_infinity: x == 1,
                        above: y,
                    }
                }
            }
            FamilyKind::ConeHalfPlane => {
                // -y > a|i - x|  <=>  |i - x| < -y / a
                let radius = -p.y / self.slope();
                SymbolicNbhd::OpenInterval {
                    lo: p.x - radius,
                    hi: p.x + radius,
                }
            }
            FamilyKind::IntegerCone => {
                // -m >= i - n >= 0  <=>  i ranges over n, n + 1, .., n - m
                let (n, m) = self.int_coords(p)?;
                SymbolicNbhd::Finite((0..=-m).map(|d| SymbolicIndex::Int(n + d)).collect())
            }
        })
    }

    /// The closed-form basic neighborhood `U_p`.
    pub fn neighborhood(&self, p: &FamilyPoint) -> Result<SymbolicNbhd, FamilyError> {
        self.validate_point(p)?;
        Ok(match self.kind {
            FamilyKind::GridThreeColumns => {
                let (x, y) = self.int_coords(p)?;
                match x {
                    -1 => SymbolicNbhd::TaggedRay {
                        minus_infinity: true,
                        plus_infinity: false,
                        above: y,
                    },
                    1 => SymbolicNbhd::TaggedRay {
                        minus_infinity: false,
                        plus_infinity: true,
                        above: y,
                    },
                    _ => SymbolicNbhd::singleton(SymbolicIndex::Int(y)),
                }
            }
            FamilyKind::ConeHalfPlane => {
                let a = self.slope();
                SymbolicNbhd::OpenInterval {
                    lo: p.x + p.y / a,
                    hi: p.x - p.y / a,
                }
            }
            FamilyKind::IntegerCone => {
                let (n, m) = self.int_coords(p)?;
                SymbolicNbhd::IntegerInterval { lo: n, hi: n - m }
            }
        })
    }

    /// An anchor `p` with `U_p = {i}`, if `i` is isolated.
    ///
    /// `ex1`: integers are isolated by `(0, y)`; every neighborhood of `±∞`
    /// is an infinite ray. `ex2`: every `U_p` is an open interval of positive
    /// length. `ex3`: `U_(n,0) = {n}`.
    pub fn is_isolated(&self, i: &SymbolicIndex) -> Result<Option<FamilyPoint>, FamilyError> {
        self.check_index(i)?;
        Ok(match (self.kind, i) {
            (FamilyKind::GridThreeColumns, SymbolicIndex::Int(y)) => Some(FamilyPoint::int(0, *y)),
            (FamilyKind::IntegerCone, SymbolicIndex::Int(n)) => Some(FamilyPoint::int(*n, 0)),
            _ => None,
        })
    }

    /// Anchors of disjoint basic neighborhoods of `i` and `j`, or `None` when
    /// no basic pair separates them.
    pub fn hausdorff_witness(
        &self,
        i: &SymbolicIndex,
        j: &SymbolicIndex,
    ) -> Result<Option<(FamilyPoint, FamilyPoint)>, FamilyError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Ok(None);
        }
        use SymbolicIndex::*;
        let candidate = match (self.kind, i, j) {
            (FamilyKind::GridThreeColumns, Int(a), Int(b)) => Some((FamilyPoint::int(0, *a), FamilyPoint::int(0, *b))),
            (FamilyKind::GridThreeColumns, Int(a), tag) | (FamilyKind::GridThreeColumns, tag, Int(a)) => {
                // {a} is disjoint from the ray of the tag starting at a
                let side = if *tag == PlusInfinity { 1 } else { -1 };
                let pair = (FamilyPoint::int(0, *a), FamilyPoint::int(side, *a));
                Some(if matches!(i, Int(_)) { pair } else { (pair.1, pair.0) })
            }
            // U_(-1,y1) ∩ U_(1,y2) ⊇ {k > max(y1, y2)} for every choice
            (FamilyKind::GridThreeColumns, _, _) => None,
            (FamilyKind::ConeHalfPlane, Real(a), Real(b)) => {
                let half_gap = q_abs(*b - *a) / 2;
                let y = -self.slope() * half_gap;
                Some((FamilyPoint::new(*a, y), FamilyPoint::new(*b, y)))
            }
            (FamilyKind::IntegerCone, Int(a), Int(b)) => Some((FamilyPoint::int(*a, 0), FamilyPoint::int(*b, 0))),
            _ => None,
        };
        if let Some((p, q)) = &candidate {
            let (up, uq) = (self.neighborhood(p)?, self.neighborhood(q)?);
            debug_assert!(up.contains(i) && uq.contains(j) && up.is_disjoint(&uq)?);
        }
        Ok(candidate)
    }

    /// `a_1 <= .. <= a_depth` in `K_i` with strictly decreasing neighborhoods
    /// that all contain `i`.
    pub fn nested_chain(&self, i: &SymbolicIndex, depth: usize) -> Result<Vec<FamilyPoint>, FamilyError> {
        self.check_index(i)?;
        match (self.kind, i) {
            (FamilyKind::GridThreeColumns, SymbolicIndex::PlusInfinity) => {
                Ok((0..depth as i64).map(|y| FamilyPoint::int(1, y)).collect())
            }
            (FamilyKind::GridThreeColumns, SymbolicIndex::MinusInfinity) => {
                Ok((0..depth as i64).map(|y| FamilyPoint::int(-1, y)).collect())
            }
            (FamilyKind::ConeHalfPlane, SymbolicIndex::Real(x)) => {
                if depth > 100 {
                    return Err(FamilyError::BadParam(
                        "chain depth above 100 is not supported for ex2".into(),
                    ));
                }
                // (x, -2^-k): radius halves at every step
                Ok((0..depth as u32)
                    .map(|k| FamilyPoint::new(*x, -Q::new(1, 1i128 << k)))
                    .collect())
            }
            _ => Err(FamilyError::IsolatedIndex(i.to_string())),
        }
    }

    /// The finite sub-poset on the grid points inside `bounds`. Integer
    /// families use unit steps; `ex2` steps by `step` from the lower corner.
    pub fn extract_window(&self, bounds: &WindowBounds, step: Option<Q>) -> Result<FamilyWindow, FamilyError> {
        let step = match self.kind {
            FamilyKind::ConeHalfPlane => step.unwrap_or_else(|| q_int(1)),
            _ => q_int(1),
        };
        if step <= Q::zero() {
            return Err(FamilyError::BadParam("grid step must be positive".into()));
        }
        if bounds.xmin > bounds.xmax || bounds.ymin > bounds.ymax {
            return Err(FamilyError::EmptyWindow);
        }
        let (xs, ys) = match self.kind {
            FamilyKind::ConeHalfPlane => (
                grid(bounds.xmin, bounds.xmax, step)?,
                grid(bounds.ymin, bounds.ymax, step)?,
            ),
            _ => (
                grid(bounds.xmin.ceil(), bounds.xmax.floor(), step)?,
                grid(bounds.ymin.ceil(), bounds.ymax.floor(), step)?,
            ),
        };
        let points: Vec<FamilyPoint> = xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| FamilyPoint::new(x, y)))
            .filter(|p| self.validate_point(p).is_ok())
            .collect();
        if points.is_empty() {
            return Err(FamilyError::EmptyWindow);
        }
        if points.len() > WINDOW_LIMIT {
            return Err(FamilyError::WindowTooLarge(points.len()));
        }
        let names = points.iter().map(ToString::to_string).collect();
        let poset = FinitePoset::from_predicate(names, |a, b| self.leq(&points[a], &points[b]).unwrap_or(false))?;
        Ok(FamilyWindow {
            family: *self,
            bounds: *bounds,
            poset,
            points,
        })
    }

    /// The family index whose component trace a window component with maximum
    /// `top` represents, when the window boundary does not distort it.
    pub fn label_window_component(&self, top: &FamilyPoint) -> Option<SymbolicIndex> {
        match self.kind {
            FamilyKind::GridThreeColumns => {
                let (x, y) = self.int_coords(top).ok()?;
                Some(match x {
                    -1 => SymbolicIndex::MinusInfinity,
                    1 => SymbolicIndex::PlusInfinity,
                    _ => SymbolicIndex::Int(y),
                })
            }
            FamilyKind::IntegerCone => {
                let (n, m) = self.int_coords(top).ok()?;
                (m == 0).then_some(SymbolicIndex::Int(n))
            }
            FamilyKind::ConeHalfPlane => None,
        }
    }

    /// Pairwise agreement of the window order with the family predicate.
    pub fn check_window_order(&self, window: &FamilyWindow) -> CheckReport {
        let mut violations = Vec::new();
        for a in window.poset.elements() {
            for b in window.poset.elements() {
                let expected = self.leq(&window.point(a), &window.point(b)).unwrap_or(false);
                if window.poset.le(a, b) != expected {
                    violations.push(json!({ "p": window.point(a), "q": window.point(b), "expected": expected }));
                }
            }
        }
        CheckReport::from_outcome("window_order", violations, Vec::new())
    }

    /// Every labelled window component equals the trace `K_i ∩ window`.
    pub fn check_window_traces(&self, window: &FamilyWindow) -> CheckReport {
        let mut violations = Vec::new();
        let mut certificates = Vec::new();
        for k in window.poset.decompose() {
            let top = window.point(k.top);
            let Some(label) = self.label_window_component(&top) else {
                continue;
            };
            let trace: std::collections::BTreeSet<Element> = window
                .poset
                .elements()
                .filter(|&a| self.component_contains(&label, &window.point(a)).unwrap_or(false))
                .collect();
            if trace == k.members {
                certificates.push(json!({ "component": k.index, "label": label, "size": trace.len() }));
            } else {
                violations.push(json!({ "component": k.index, "label": label }));
            }
        }
        CheckReport::from_outcome("window_traces", violations, certificates)
    }

    /// Window components whose index is known in the family.
    pub fn window_labels(&self, window: &FamilyWindow, space: &IndexSpace) -> Vec<Option<SymbolicIndex>> {
        space
            .components()
            .iter()
            .map(|k| self.label_window_component(&window.point(k.top)))
            .collect()
    }

    /// A carrier point with small coordinates (denominators up to 4 for `ex2`).
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> FamilyPoint {
        match self.kind {
            FamilyKind::GridThreeColumns => FamilyPoint::int(rng.gen_range(-1..=1), rng.gen_range(-radius..=radius)),
            FamilyKind::IntegerCone => FamilyPoint::int(rng.gen_range(-radius..=radius), rng.gen_range(-radius..=0)),
            FamilyKind::ConeHalfPlane => {
                let den = rng.gen_range(1..=4) as i128;
                let r = radius as i128 * den;
                let x = Q::new(rng.gen_range(-r..=r), den);
                let y = Q::new(-rng.gen_range(1..=r.max(1)), den);
                FamilyPoint::new(x, y)
            }
        }
    }

    /// Neighborhood table rows for reports.
    pub fn neighborhood_row(&self, p: &FamilyPoint) -> Result<Value, FamilyError> {
        Ok(json!({ "point": p, "u": self.neighborhood(p)? }))
    }

    /// Each open interval `(l, h)` contains, around each sampled point `t`, a
    /// basic neighborhood `U_(t, y)` inside `(l, h)`. Only meaningful for `ex2`.
    pub fn check_interval_density(&self, intervals: &[(Q, Q)], samples_per_interval: usize) -> CheckReport {
        if self.kind != FamilyKind::ConeHalfPlane {
            return CheckReport::pass("interval_density");
        }
        let mut violations = Vec::new();
        let mut certificates = Vec::new();
        for &(l, h) in intervals {
            if l >= h {
                continue;
            }
            let target = SymbolicNbhd::OpenInterval { lo: l, hi: h };
            for s in 1..=samples_per_interval {
                let t = l + (h - l) * Q::new(s as i128, samples_per_interval as i128 + 1);
                let half_width = (t - l).min(h - t);
                let anchor = FamilyPoint::new(t, -self.slope() * half_width);
                let ok = self
                    .neighborhood(&anchor)
                    .map(|u| u.contains(&SymbolicIndex::Real(t)) && u.is_subset(&target).unwrap_or(false))
                    .unwrap_or(false);
                if ok {
                    if certificates.len() < 8 {
                        certificates.push(json!({ "interval": [format_q(&l), format_q(&h)], "point": format_q(&t), "anchor": anchor }));
                    }
                } else {
                    violations.push(json!({ "interval": [format_q(&l), format_q(&h)], "point": format_q(&t) }));
                }
            }
        }
        CheckReport::from_outcome("interval_density", violations, certificates)
    }

    /// Every `U_p` for `ex2` is an open interval with endpoints `x ± y/a`.
    pub fn check_open_interval_shape(&self, points: &[FamilyPoint]) -> CheckReport {
        if self.kind != FamilyKind::ConeHalfPlane {
            return CheckReport::pass("open_interval_shape");
        }
        let a = self.slope();
        let mut violations = Vec::new();
        for p in points {
            let ok = matches!(
                self.neighborhood(p),
                Ok(SymbolicNbhd::OpenInterval { lo, hi }) if lo == p.x + p.y / a && hi == p.x - p.y / a && lo < hi
            );
            if !ok {
                violations.push(json!({ "point": p }));
            }
        }
        CheckReport::from_outcome("open_interval_shape", violations, Vec::new())
    }
}

fn grid(lo: Q, hi: Q, step: Q) -> Result<Vec<Q>, FamilyError> {
    if lo > hi {
        return Ok(Vec::new());
    }
    let count = ((hi - lo) / step).floor();
    if count.abs() > Q::from_integer(WINDOW_LIMIT as i128) {
        return Err(FamilyError::WindowTooLarge(*count.numer() as usize));
    }
    let count = *count.numer();
    Ok((0..=count).map(|k| lo + step * k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use SymbolicIndex::*;

    fn p(x: i64, y: i64) -> FamilyPoint {
        FamilyPoint::int(x, y)
    }

    fn ex2(a: i128) -> FamilySpec {
        FamilySpec::cone_half_plane(Q::from_integer(a)).unwrap()
    }

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn order_predicates() {
        let e1 = FamilySpec::grid_three_columns();
        assert!(e1.leq(&p(-1, 0), &p(0, 1)).unwrap());
        assert!(!e1.leq(&p(-1, 1), &p(0, 1)).unwrap());
        assert!(!e1.leq(&p(-1, 0), &p(1, 5)).unwrap());
        assert!(e1.leq(&p(0, 3), &p(0, 3)).unwrap());
        assert!(!e1.leq(&p(0, 3), &p(0, 4)).unwrap());
        assert!(ex2(1).leq(&p(0, -3), &p(1, -1)).unwrap());
        assert!(!ex2(2).leq(&p(0, -3), &p(1, -1)).unwrap());
        let e3 = FamilySpec::integer_cone();
        assert!(!e3.leq(&p(0, -1), &p(2, 0)).unwrap());
        assert!(e3.leq(&p(0, -2), &p(1, -1)).unwrap());
    }

    #[test]
    fn bad_coordinates_and_params() {
        let e1 = FamilySpec::grid_three_columns();
        assert!(matches!(
            e1.leq(&p(2, 0), &p(0, 0)),
            Err(FamilyError::BadCoordinates { .. })
        ));
        assert!(ex2(1).neighborhood(&p(0, 0)).is_err());
        assert!(FamilySpec::integer_cone().neighborhood(&p(0, 1)).is_err());
        assert!(FamilySpec::cone_half_plane(Q::zero()).is_err());
        assert!(FamilySpec::new(FamilyKind::IntegerCone, Some(q(1, 1))).is_err());
        assert!(FamilySpec::new(FamilyKind::ConeHalfPlane, None).is_err());
    }

    #[test]
    fn components_of_examples() {
        let e1 = FamilySpec::grid_three_columns();
        let u = e1.components_of(&p(1, 2)).unwrap();
        assert!(u.contains(&PlusInfinity) && u.contains(&Int(3)) && !u.contains(&Int(2)));
        assert!(!u.contains(&MinusInfinity));
        assert_eq!(
            ex2(1).components_of(&p(0, -2)).unwrap(),
            SymbolicNbhd::OpenInterval {
                lo: q(-2, 1),
                hi: q(2, 1)
            }
        );
        assert_eq!(
            FamilySpec::integer_cone().components_of(&p(1, -2)).unwrap(),
            SymbolicNbhd::Finite([Int(1), Int(2), Int(3)].into())
        );
    }

    #[test]
    fn neighborhood_examples() {
        assert_eq!(
            FamilySpec::grid_three_columns().neighborhood(&p(0, 7)).unwrap(),
            SymbolicNbhd::singleton(Int(7))
        );
        assert_eq!(
            ex2(1).neighborhood(&p(0, -1)).unwrap(),
            SymbolicNbhd::OpenInterval {
                lo: q(-1, 1),
                hi: q(1, 1)
            }
        );
        assert_eq!(
            FamilySpec::integer_cone().neighborhood(&p(2, -3)).unwrap(),
            SymbolicNbhd::IntegerInterval { lo: 2, hi: 5 }
        );
    }

    #[test]
    fn two_routes_agree_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in [
            FamilySpec::grid_three_columns(),
            ex2(1),
            FamilySpec::cone_half_plane(q(3, 2)).unwrap(),
            FamilySpec::integer_cone(),
        ] {
            for _ in 0..100 {
                let pt = f.sample_point(&mut rng, 6);
                let a = f.components_of(&pt).unwrap();
                let b = f.neighborhood(&pt).unwrap();
                assert!(a.set_eq(&b).unwrap(), "{pt}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn isolation_classification() {
        let e1 = FamilySpec::grid_three_columns();
        assert_eq!(e1.is_isolated(&Int(4)).unwrap(), Some(p(0, 4)));
        assert_eq!(e1.is_isolated(&PlusInfinity).unwrap(), None);
        assert_eq!(
            FamilySpec::integer_cone().is_isolated(&Int(-2)).unwrap(),
            Some(p(-2, 0))
        );
        assert_eq!(ex2(1).is_isolated(&Real(q(1, 3))).unwrap(), None);
        assert!(e1.is_isolated(&Real(q(1, 2))).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let e1 = FamilySpec::grid_three_columns();
        assert_eq!(e1.hausdorff_witness(&MinusInfinity, &PlusInfinity).unwrap(), None);
        assert_eq!(
            e1.hausdorff_witness(&Int(3), &Int(5)).unwrap(),
            Some((p(0, 3), p(0, 5)))
        );
        let (a, b) = e1.hausdorff_witness(&PlusInfinity, &Int(2)).unwrap().unwrap();
        assert!(e1.neighborhood(&a).unwrap().contains(&PlusInfinity));
        assert!(e1.neighborhood(&b).unwrap().contains(&Int(2)));
        assert!(e1
            .neighborhood(&a)
            .unwrap()
            .is_disjoint(&e1.neighborhood(&b).unwrap())
            .unwrap());
        let f = ex2(2);
        let (a, b) = f.hausdorff_witness(&Real(q(0, 1)), &Real(q(1, 3))).unwrap().unwrap();
        assert!(f
            .neighborhood(&a)
            .unwrap()
            .is_disjoint(&f.neighborhood(&b).unwrap())
            .unwrap());
    }

    #[test]
    fn nested_chains() {
        let e1 = FamilySpec::grid_three_columns();
        let chain = e1.nested_chain(&PlusInfinity, 3).unwrap();
        assert_eq!(chain, vec![p(1, 0), p(1, 1), p(1, 2)]);
        for w in chain.windows(2) {
            assert!(e1.leq(&w[0], &w[1]).unwrap());
            let (u0, u1) = (e1.neighborhood(&w[0]).unwrap(), e1.neighborhood(&w[1]).unwrap());
            assert!(u1.is_subset(&u0).unwrap() && !u0.is_subset(&u1).unwrap());
        }
        assert_eq!(e1.nested_chain(&Int(5), 3), Err(FamilyError::IsolatedIndex("5".into())));
        assert!(matches!(
            FamilySpec::integer_cone().nested_chain(&Int(0), 3),
            Err(FamilyError::IsolatedIndex(_))
        ));
        let f = ex2(1);
        let chain = f.nested_chain(&Real(q(1, 2)), 5).unwrap();
        for w in chain.windows(2) {
            assert!(f.leq(&w[0], &w[1]).unwrap());
            let (u0, u1) = (f.neighborhood(&w[0]).unwrap(), f.neighborhood(&w[1]).unwrap());
            assert!(u1.is_subset(&u0).unwrap() && !u0.is_subset(&u1).unwrap());
            assert!(u1.contains(&Real(q(1, 2))));
        }
    }

    #[test]
    fn windows() {
        let w3 = FamilySpec::integer_cone()
            .extract_window(&WindowBounds::int(0, 2, -2, 0), None)
            .unwrap();
        assert_eq!(w3.poset.len(), 9);
        assert_eq!(w3.poset.decompose().len(), 3);
        assert!(FamilySpec::integer_cone().check_window_traces(&w3).passed());
        let w1 = FamilySpec::grid_three_columns()
            .extract_window(&WindowBounds::int(-1, 1, -2, 2), None)
            .unwrap();
        assert_eq!(w1.poset.len(), 15);
        assert!(FamilySpec::grid_three_columns().check_window_order(&w1).passed());
        let w2 = ex2(1).extract_window(&WindowBounds::int(-2, 2, -4, -1), None).unwrap();
        assert_eq!(w2.poset.len(), 20);
        assert!(ex2(1).check_window_order(&w2).passed());
        assert_eq!(
            FamilySpec::integer_cone()
                .extract_window(&WindowBounds::int(0, 2, 1, 3), None)
                .unwrap_err(),
            FamilyError::EmptyWindow
        );
    }

    #[test]
    fn parsing() {
        assert_eq!(
            "1/2,-3".parse::<FamilyPoint>().unwrap(),
            FamilyPoint::new(q(1, 2), q(-3, 1))
        );
        assert_eq!("(0,-1)".parse::<FamilyPoint>().unwrap(), p(0, -1));
        assert_eq!(
            "0,2,-2,0".parse::<WindowBounds>().unwrap(),
            WindowBounds::int(0, 2, -2, 0)
        );
        assert!("0,2".parse::<WindowBounds>().is_err());
        assert_eq!("ex3".parse::<FamilyKind>().unwrap(), FamilyKind::IntegerCone);
        assert_eq!(p(1, -2).to_string(), "1,-2");
    }

    #[test]
    fn density_and_shape_checks() {
        let f = FamilySpec::cone_half_plane(q(1, 3)).unwrap();
        let r = f.check_interval_density(&[(q(-1, 1), q(2, 1)), (q(1, 3), q(1, 2))], 5);
        assert!(r.passed(), "{r:?}");
        let pts = [p(0, -1), FamilyPoint::new(q(1, 2), q(-3, 4))];
        assert!(f.check_open_interval_shape(&pts).passed());
    }
}
