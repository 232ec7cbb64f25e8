use std::fmt::Write;

use indlim::report::{all_passed, CheckReport};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub checks: Vec<CheckReport>,
    pub notes: Vec<String>,
    pub details: Map<String, Value>,
    pub timing: Timing,
}

/// Hex SHA-256 over the length-prefixed parts, so `["ab", "c"]` and
/// `["a", "bc"]` differ.
pub fn digest<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hex::encode(hasher.finalize())
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        Self {
            command: command.to_string(),
            inputs_digest,
            checks: Vec::new(),
            notes: Vec::new(),
            details: Map::new(),
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn check(&mut self, r: CheckReport) {
        self.checks.push(r);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.details.insert(key.to_string(), value);
    }

    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} [{}]", self.command, &self.inputs_digest[..12]);
        for line in &self.notes {
            let _ = writeln!(out, "  {line}");
        }
        for r in &self.checks {
            if r.passed() {
                let _ = writeln!(out, "PASS {}", r.check);
            } else {
                let first = r.witnesses.first().map(Value::to_string).unwrap_or_default();
                let _ = writeln!(out, "FAIL {} ({} witnesses) e.g. {first}", r.check, r.witnesses.len());
            }
        }
        let passed = self.checks.iter().filter(|r| r.passed()).count();
        let _ = writeln!(
            out,
            "{passed}/{} checks passed in {:.1} ms",
            self.checks.len(),
            self.timing.elapsed_ms
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_separates_parts() {
        let a = digest([b"ab".as_slice(), b"c".as_slice()]);
        let b = digest([b"a".as_slice(), b"bc".as_slice()]);
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
        assert_eq!(a, digest([b"ab".as_slice(), b"c".as_slice()]));
    }

    #[test]
    fn exit_code_follows_checks() {
        let mut r = Report::new("analyze", digest([b"x".as_slice()]));
        r.check(CheckReport::pass("t1"));
        assert_eq!(r.exit_code(), EXIT_PASS);
        r.check(CheckReport::fail("base_axioms", json!({ "a": "x" })));
        assert_eq!(r.exit_code(), EXIT_FAIL);
        let text = r.to_text();
        assert!(text.contains("PASS t1") && text.contains("FAIL base_axioms"));
    }

    #[test]
    fn json_round_trips() {
        let mut r = Report::new("family", digest([b"ex1".as_slice()]));
        r.note("not Hausdorff");
        r.detail("points", vec!["1,2"]);
        r.check(CheckReport::pass("t1"));
        let text = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
