use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one property check.
///
/// On failure `witnesses` lists the violations (never empty); on success it
/// may list certificates, e.g. the anchors found for each separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub witnesses: Vec<Value>,
}

impl CheckReport {
    pub fn from_outcome(check: impl Into<String>, violations: Vec<Value>, certificates: Vec<Value>) -> Self {
        let check = check.into();
        if violations.is_empty() {
            Self {
                check,
                status: Status::Pass,
                witnesses: certificates,
            }
        } else {
            Self {
                check,
                status: Status::Fail,
                witnesses: violations,
            }
        }
    }

    pub fn pass(check: impl Into<String>) -> Self {
        Self::from_outcome(check, Vec::new(), Vec::new())
    }

    pub fn fail(check: impl Into<String>, witness: Value) -> Self {
        Self::from_outcome(check, vec![witness], Vec::new())
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn all_passed<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> bool {
    reports.into_iter().all(CheckReport::passed)
}
