//! Exact set algebra on the neighborhood shapes that occur for the built-in
//! infinite families: finite sets, integer intervals, integer rays carrying
//! optional `±∞` tags, and open real intervals with rational endpoints.
//!
//! Integer shapes and real intervals live in different universes; mixing them
//! in one operation is an error rather than a silent `false`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

pub type Q = Ratio<i128>;

/// Largest integer interval that gets enumerated when compared against a
/// finite set or differenced into one.
const ENUMERATION_LIMIT: i128 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("cannot combine an integer-indexed set with a real interval")]
    UniverseMismatch,
    #[error("set difference of {0} is not representable by a single shape")]
    Unrepresentable(String),
    #[error("cannot parse `{0}` as an index (expected an integer, p/q, +inf or -inf)")]
    BadIndex(String),
    #[error("cannot parse `{0}` as a rational number")]
    BadRational(String),
}

/// A point of an index set: an integer, a real (rational) number, or one of
/// two infinity tags. The tags are genuine points, never numeric sentinels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicIndex {
    MinusInfinity,
    Int(i64),
    Real(Q),
    PlusInfinity,
}

impl fmt::Display for SymbolicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicIndex::MinusInfinity => f.write_str("-inf"),
            SymbolicIndex::PlusInfinity => f.write_str("+inf"),
            SymbolicIndex::Int(n) => write!(f, "{n}"),
            SymbolicIndex::Real(q) => f.write_str(&format_q(q)),
        }
    }
}

impl Serialize for SymbolicIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for SymbolicIndex {
    type Err = SymbolicError;

    /// `+inf`/`inf`/`-inf`, an integer, or a rational `p/q` (read as a real).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "+inf" | "inf" | "+∞" | "∞" => return Ok(SymbolicIndex::PlusInfinity),
            "-inf" | "-∞" | "−∞" => return Ok(SymbolicIndex::MinusInfinity),
            _ => {}
        }
        if let Ok(n) = t.parse::<i64>() {
            return Ok(SymbolicIndex::Int(n));
        }
        parse_q(t)
            .map(SymbolicIndex::Real)
            .map_err(|_| SymbolicError::BadIndex(s.to_string()))
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `-1.25`.
pub fn parse_q(s: &str) -> Result<Q, SymbolicError> {
    let bad = || SymbolicError::BadRational(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Q::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let w: i128 = if whole.is_empty() || whole == "-" || whole == "+" {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().map_err(|_| bad())?;
        let magnitude = w.abs() * scale + f;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Q::new(signed, scale));
    }
    t.parse::<i128>().map(Q::from_integer).map_err(|_| bad())
}

pub fn format_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_abs(q: Q) -> Q {
    if q < Q::zero() {
        -q
    } else {
        q
    }
}

pub fn q_half() -> Q {
    Q::new(1, 2)
}

pub fn q_one() -> Q {
    Q::one()
}

/// A neighborhood shape with exact membership, intersection, inclusion and
/// emptiness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicNbhd {
    Finite(BTreeSet<SymbolicIndex>),
    /// `{i ∈ ℤ : lo <= i <= hi}`.
    IntegerInterval {
        lo: i64,
        hi: i64,
    },
    /// The selected tags together with `{i ∈ ℤ : i > above}`.
    TaggedRay {
        minus_infinity: bool,
        plus_infinity: bool,
        above: i64,
    },
    /// `{i ∈ ℝ : lo < i < hi}`.
    OpenInterval {
        lo: Q,
        hi: Q,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Universe {
    Any,
    Integer,
    Real,
}

impl SymbolicNbhd {
    pub fn singleton(i: SymbolicIndex) -> Self {
        SymbolicNbhd::Finite(BTreeSet::from([i]))
    }

    pub fn empty() -> Self {
        SymbolicNbhd::Finite(BTreeSet::new())
    }

    fn universe(&self) -> Universe {
        match self {
            SymbolicNbhd::Finite(_) => Universe::Any,
            SymbolicNbhd::IntegerInterval { .. } | SymbolicNbhd::TaggedRay { .. } => Universe::Integer,
            SymbolicNbhd::OpenInterval { .. } => Universe::Real,
        }
    }

    fn compatible(&self, other: &Self) -> Result<(), SymbolicError> {
        match (self.universe(), other.universe()) {
            (Universe::Integer, Universe::Real) | (Universe::Real, Universe::Integer) => {
                Err(SymbolicError::UniverseMismatch)
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, i: &SymbolicIndex) -> bool {
        match (self, i) {
            (SymbolicNbhd::Finite(s), _) => s.contains(i),
            (SymbolicNbhd::IntegerInterval { lo, hi }, SymbolicIndex::Int(n)) => lo <= n && n <= hi,
            (SymbolicNbhd::IntegerInterval { .. }, _) => false,
            (SymbolicNbhd::TaggedRay { minus_infinity, .. }, SymbolicIndex::MinusInfinity) => *minus_infinity,
            (SymbolicNbhd::TaggedRay { plus_infinity, .. }, SymbolicIndex::PlusInfinity) => *plus_infinity,
            (SymbolicNbhd::TaggedRay { above, .. }, SymbolicIndex::Int(n)) => n > above,
            (SymbolicNbhd::TaggedRay { .. }, SymbolicIndex::Real(_)) => false,
            (SymbolicNbhd::OpenInterval { lo, hi }, SymbolicIndex::Real(q)) => lo < q && q < hi,
            (SymbolicNbhd::OpenInterval { .. }, _) => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SymbolicNbhd::Finite(s) => s.is_empty(),
            SymbolicNbhd::IntegerInterval { lo, hi } => lo > hi,
            SymbolicNbhd::TaggedRay { .. } => false,
            SymbolicNbhd::OpenInterval { lo, hi } => lo >= hi,
        }
    }

    /// The unique member, if the set has exactly one.
    pub fn as_singleton(&self) -> Option<SymbolicIndex> {
        match self {
            SymbolicNbhd::Finite(s) if s.len() == 1 => s.iter().next().copied(),
            SymbolicNbhd::IntegerInterval { lo, hi } if lo == hi => Some(SymbolicIndex::Int(*lo)),
            _ => None,
        }
    }

    /// All members when the set is finite and small enough to list.
    pub fn finite_members(&self) -> Option<BTreeSet<SymbolicIndex>> {
        match self {
            SymbolicNbhd::Finite(s) => Some(s.clone()),
            SymbolicNbhd::IntegerInterval { lo, hi } => {
                if lo > hi {
                    Some(BTreeSet::new())
                } else if (*hi as i128) - (*lo as i128) < ENUMERATION_LIMIT {
                    Some((*lo..=*hi).map(SymbolicIndex::Int).collect())
                } else {
                    None
                }
            }
            _ if self.is_empty() => Some(BTreeSet::new()),
            _ => None,
        }
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, SymbolicError> {
        use SymbolicNbhd::*;
        self.compatible(other)?;
        Ok(match (self, other) {
            (Finite(s), x) | (x, Finite(s)) => Finite(s.iter().filter(|i| x.contains(i)).copied().collect()),
            (IntegerInterval { lo: l1, hi: h1 }, IntegerInterval { lo: l2, hi: h2 }) => IntegerInterval {
                lo: *l1.max(l2),
                hi: *h1.min(h2),
            },
            (IntegerInterval { lo, hi }, TaggedRay { above, .. })
            | (TaggedRay { above, .. }, IntegerInterval { lo, hi }) => IntegerInterval {
                lo: (*lo).max(above.saturating_add(1)),
                hi: *hi,
            },
            (
                TaggedRay {
                    minus_infinity: m1,
                    plus_infinity: p1,
                    above: a1,
                },
                TaggedRay {
                    minus_infinity: m2,
                    plus_infinity: p2,
                    above: a2,
                },
            ) => TaggedRay {
                minus_infinity: *m1 && *m2,
                plus_infinity: *p1 && *p2,
                above: *a1.max(a2),
            },
            (OpenInterval { lo: l1, hi: h1 }, OpenInterval { lo: l2, hi: h2 }) => OpenInterval {
                lo: *l1.max(l2),
                hi: *h1.min(h2),
            },
            _ => return Err(SymbolicError::UniverseMismatch),
        })
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, SymbolicError> {
        use SymbolicNbhd::*;
        self.compatible(other)?;
        if self.is_empty() {
            return Ok(true);
        }
        Ok(match (self, other) {
            (Finite(s), x) => s.iter().all(|i| x.contains(i)),
            (IntegerInterval { lo, hi }, Finite(s)) => {
                let count = (*hi as i128) - (*lo as i128) + 1;
                count <= s.len() as i128 && (*lo..=*hi).all(|n| s.contains(&SymbolicIndex::Int(n)))
            }
            (IntegerInterval { lo, hi }, IntegerInterval { lo: l2, hi: h2 }) => l2 <= lo && hi <= h2,
            (IntegerInterval { lo, .. }, TaggedRay { above, .. }) => lo > above,
            (TaggedRay { .. }, Finite(_) | IntegerInterval { .. }) => false,
            (
                TaggedRay {
                    minus_infinity: m1,
                    plus_infinity: p1,
                    above: a1,
                },
                TaggedRay {
                    minus_infinity: m2,
                    plus_infinity: p2,
                    above: a2,
                },
            ) => (!m1 || *m2) && (!p1 || *p2) && a1 >= a2,
            (OpenInterval { .. }, Finite(_)) => false,
            (OpenInterval { lo, hi }, OpenInterval { lo: l2, hi: h2 }) => l2 <= lo && hi <= h2,
            _ => return Err(SymbolicError::UniverseMismatch),
        })
    }

    /// Equality as sets, independent of shape.
    pub fn set_eq(&self, other: &Self) -> Result<bool, SymbolicError> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool, SymbolicError> {
        Ok(self.intersect(other)?.is_empty())
    }

    /// `self \ other`, when the result fits a single shape.
    pub fn difference(&self, other: &Self) -> Result<Self, SymbolicError> {
        use SymbolicNbhd::*;
        self.compatible(other)?;
        if self.is_subset(other)? {
            return Ok(Self::empty());
        }
        let unrepresentable = || SymbolicError::Unrepresentable(format!("{self} minus {other}"));
        Ok(match (self, other) {
            (Finite(s), x) => Finite(s.iter().filter(|i| !x.contains(i)).copied().collect()),
            (IntegerInterval { lo, hi }, TaggedRay { above, .. }) => IntegerInterval {
                lo: *lo,
                hi: (*hi).min(*above),
            },
            (IntegerInterval { .. }, Finite(_) | IntegerInterval { .. }) => {
                let members = self.finite_members().ok_or_else(unrepresentable)?;
                Finite(members.into_iter().filter(|i| !other.contains(i)).collect())
            }
            (
                TaggedRay {
                    minus_infinity: m1,
                    plus_infinity: p1,
                    above: a1,
                },
                TaggedRay {
                    minus_infinity: m2,
                    plus_infinity: p2,
                    above: a2,
                },
            ) => {
                let mut tags = BTreeSet::new();
                if *m1 && !m2 {
                    tags.insert(SymbolicIndex::MinusInfinity);
                }
                if *p1 && !p2 {
                    tags.insert(SymbolicIndex::PlusInfinity);
                }
                let ints = IntegerInterval {
                    lo: a1.saturating_add(1),
                    hi: *a2,
                };
                match (tags.is_empty(), ints.is_empty()) {
                    (true, _) => ints,
                    (false, true) => Finite(tags),
                    (false, false) => return Err(unrepresentable()),
                }
            }
            _ => return Err(unrepresentable()),
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            SymbolicNbhd::Finite(s) => json!({
                "shape": "finite-set",
                "members": s.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "text": self.to_string(),
            }),
            SymbolicNbhd::IntegerInterval { lo, hi } => json!({
                "shape": "integer-interval", "lo": lo, "hi": hi, "text": self.to_string(),
            }),
            SymbolicNbhd::TaggedRay {
                minus_infinity,
                plus_infinity,
                above,
            } => json!({
                "shape": "integer-ray-with-tag",
                "minus_infinity": minus_infinity,
                "plus_infinity": plus_infinity,
                "above": above,
                "text": self.to_string(),
            }),
            SymbolicNbhd::OpenInterval { lo, hi } => json!({
                "shape": "open-real-interval", "lo": format_q(lo), "hi": format_q(hi), "text": self.to_string(),
            }),
        }
    }
}

impl Serialize for SymbolicNbhd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for SymbolicNbhd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicNbhd::Finite(s) => {
                let items: Vec<String> = s.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            SymbolicNbhd::IntegerInterval { lo, hi } => write!(f, "{{i in Z : {lo} <= i <= {hi}}}"),
            SymbolicNbhd::TaggedRay {
                minus_infinity,
                plus_infinity,
                above,
            } => {
                let mut tags = Vec::new();
                if *minus_infinity {
                    tags.push("-inf");
                }
                if *plus_infinity {
                    tags.push("+inf");
                }
                if tags.is_empty() {
                    write!(f, "{{i in Z : i > {above}}}")
                } else {
                    write!(f, "{{{}}} u {{i in Z : i > {above}}}", tags.join(", "))
                }
            }
            SymbolicNbhd::OpenInterval { lo, hi } => {
                write!(f, "{{i in R : {} < i < {}}}", format_q(lo), format_q(hi))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SymbolicIndex::*;

    fn ray(minus: bool, plus: bool, above: i64) -> SymbolicNbhd {
        SymbolicNbhd::TaggedRay {
            minus_infinity: minus,
            plus_infinity: plus,
            above,
        }
    }

    fn q(p: i128, d: i128) -> Q {
        Q::new(p, d)
    }

    #[test]
    fn parse_indices_and_rationals() {
        assert_eq!("+inf".parse::<SymbolicIndex>().unwrap(), PlusInfinity);
        assert_eq!("-inf".parse::<SymbolicIndex>().unwrap(), MinusInfinity);
        assert_eq!("-4".parse::<SymbolicIndex>().unwrap(), Int(-4));
        assert_eq!("3/2".parse::<SymbolicIndex>().unwrap(), Real(q(3, 2)));
        assert!("x".parse::<SymbolicIndex>().is_err());
        assert_eq!(parse_q("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_q("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_q("6/4").unwrap(), q(3, 2));
        assert!(parse_q("1/0").is_err());
        assert_eq!(format_q(&q(4, 2)), "2");
        assert_eq!(format_q(&q(-1, 3)), "-1/3");
    }

    #[test]
    fn opposite_rays_always_meet() {
        for y1 in -5..5 {
            for y2 in -5..5 {
                let meet = ray(true, false, y1).intersect(&ray(false, true, y2)).unwrap();
                assert!(!meet.is_empty());
                assert!(meet.contains(&Int(y1.max(y2) + 1)));
                assert!(!meet.contains(&PlusInfinity) && !meet.contains(&MinusInfinity));
            }
        }
    }

    #[test]
    fn ray_inclusions() {
        assert!(ray(false, true, 2).is_subset(&ray(false, true, 1)).unwrap());
        assert!(!ray(false, true, 1).is_subset(&ray(false, true, 2)).unwrap());
        assert!(!ray(false, true, 2).is_subset(&ray(true, false, 1)).unwrap());
        assert!(SymbolicNbhd::singleton(Int(5)).is_subset(&ray(false, true, 4)).unwrap());
        assert!(!SymbolicNbhd::singleton(Int(4)).is_subset(&ray(false, true, 4)).unwrap());
    }

    #[test]
    fn nested_ray_difference_is_an_interval() {
        let w = ray(false, true, 0).difference(&ray(false, true, 3)).unwrap();
        assert_eq!(w, SymbolicNbhd::IntegerInterval { lo: 1, hi: 3 });
        let w = ray(true, true, 0).difference(&ray(false, true, 0)).unwrap();
        assert_eq!(w, SymbolicNbhd::singleton(MinusInfinity));
        assert!(ray(true, true, 0).difference(&ray(false, true, 2)).is_err());
    }

    #[test]
    fn interval_shapes_compare_as_sets() {
        let a = SymbolicNbhd::IntegerInterval { lo: 1, hi: 3 };
        let b = SymbolicNbhd::Finite([Int(1), Int(2), Int(3)].into());
        assert!(a.set_eq(&b).unwrap());
        let c = SymbolicNbhd::Finite([Int(1), Int(3)].into());
        assert!(!a.set_eq(&c).unwrap());
        assert_eq!(a.as_singleton(), None);
        assert_eq!(
            SymbolicNbhd::IntegerInterval { lo: 4, hi: 4 }.as_singleton(),
            Some(Int(4))
        );
        assert_eq!(a.difference(&c).unwrap(), SymbolicNbhd::Finite([Int(2)].into()));
    }

    #[test]
    fn open_intervals() {
        let u = SymbolicNbhd::OpenInterval {
            lo: q(-1, 1),
            hi: q(1, 1),
        };
        assert!(u.contains(&Real(q(0, 1))));
        assert!(!u.contains(&Real(q(1, 1))));
        let v = SymbolicNbhd::OpenInterval {
            lo: q(1, 1),
            hi: q(3, 1),
        };
        assert!(u.is_disjoint(&v).unwrap());
        let w = SymbolicNbhd::OpenInterval {
            lo: q(1, 2),
            hi: q(3, 1),
        };
        assert!(!u.is_disjoint(&w).unwrap());
        assert_eq!(u.intersect(&ray(false, true, 0)), Err(SymbolicError::UniverseMismatch));
        assert!(!u.is_subset(&SymbolicNbhd::singleton(Real(q(0, 1)))).unwrap());
    }

    #[test]
    fn display_forms() {
        assert_eq!(ray(false, true, 2).to_string(), "{+inf} u {i in Z : i > 2}");
        assert_eq!(SymbolicNbhd::singleton(Int(7)).to_string(), "{7}");
        assert_eq!(
            SymbolicNbhd::OpenInterval {
                lo: q(-2, 1),
                hi: q(1, 2)
            }
            .to_string(),
            "{i in R : -2 < i < 1/2}"
        );
    }
}
