//! Machine-readable verification reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a report decides `pass`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    /// `route_a` and `route_b` compute the same quantity: `rel_error <= tolerance`.
    Identity,
    /// `route_a / route_b` is compared against an expected constant, or against
    /// the other members of its group for constancy.
    Audit,
    /// A bound such as a residual, a z-score or a test statistic.
    Bound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub mode: CheckMode,
    pub parameters: serde_json::Value,
    pub route_a: Option<[f64; 2]>,
    pub route_b: Option<[f64; 2]>,
    pub abs_error: f64,
    pub rel_error: f64,
    pub audit_ratio: Option<[f64; 2]>,
    pub pass: bool,
    pub tolerance: f64,
    pub runtime_ms: f64,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// `|a - b| / |b|`, with the absolute error when `b` vanishes. Non-finite
/// results become `f64::MAX`.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    let r = if b.norm() == 0.0 { d } else { d / b.norm() };
    finite(r)
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

impl VerificationReport {
    /// Two routes to one quantity.
    pub fn identity(id: impl Into<String>, parameters: serde_json::Value, a: Complex64, b: Complex64, tolerance: f64) -> Self {
        let rel = relative_error(a, b);
        VerificationReport {
            id: id.into(),
            mode: CheckMode::Identity,
            parameters,
            route_a: Some(pair(a)),
            route_b: Some(pair(b)),
            abs_error: finite((a - b).norm()),
            rel_error: rel,
            audit_ratio: None,
            pass: rel <= tolerance,
            tolerance,
            runtime_ms: 0.0,
            seed: None,
            note: String::new(),
        }
    }

    /// Ratio `a / b` against an expected constant.
    pub fn audit(
        id: impl Into<String>,
        parameters: serde_json::Value,
        a: Complex64,
        b: Complex64,
        expected: Complex64,
        tolerance: f64,
    ) -> Self {
        let ratio = a / b;
        let rel = relative_error(ratio, expected);
        VerificationReport {
            mode: CheckMode::Audit,
            audit_ratio: Some(pair(ratio)),
            abs_error: finite((ratio - expected).norm()),
            rel_error: rel,
            pass: rel <= tolerance,
            ..Self::identity(id, parameters, a, b, tolerance)
        }
    }

    /// A nonnegative quantity that must stay at or below `bound`.
    pub fn bound(id: impl Into<String>, parameters: serde_json::Value, value: f64, bound: f64) -> Self {
        VerificationReport {
            id: id.into(),
            mode: CheckMode::Bound,
            parameters,
            route_a: Some([finite(value), 0.0]),
            route_b: None,
            abs_error: finite(value),
            rel_error: finite(value),
            audit_ratio: None,
            pass: value <= bound,
            tolerance: bound,
            runtime_ms: 0.0,
            seed: None,
            note: String::new(),
        }
    }

    /// A report for a computation that failed outright; errors are set to
    /// `f64::MAX` so that the JSON stays finite.
    pub fn failure(id: impl Into<String>, parameters: serde_json::Value, err: &Error, tolerance: f64) -> Self {
        VerificationReport {
            note: err.to_string(),
            pass: false,
            abs_error: f64::MAX,
            rel_error: f64::MAX,
            ..Self::bound(id, parameters, f64::MAX, tolerance)
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Marks the report as informational: recorded, but always passing.
    pub fn recorded(mut self) -> Self {
        if !self.pass {
            self.note = if self.note.is_empty() {
                "recorded only".to_string()
            } else {
                format!("{}; recorded only", self.note)
            };
        }
        self.pass = true;
        self
    }
}

/// Sorts by id so that output order does not depend on scheduling.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| a.id.cmp(&b.id));
}

/// Pretty-printed JSON array of the reports.
pub fn to_json(reports: &[VerificationReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Config(e.to_string()))
}

pub fn from_json(s: &str) -> Result<Vec<VerificationReport>> {
    serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
}

/// One CSV line per report: id, mode, pass, rel_error, tolerance.
pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("id,mode,pass,rel_error,tolerance\n");
    for r in reports {
        let mode = match r.mode {
            CheckMode::Identity => "identity",
            CheckMode::Audit => "audit",
            CheckMode::Bound => "bound",
        };
        out.push_str(&format!("{},{mode},{},{:e},{:e}\n", r.id, r.pass, r.rel_error, r.tolerance));
    }
    out
}

/// The reports with `runtime_ms` zeroed, for comparing runs.
pub fn without_runtime(reports: &[VerificationReport]) -> Vec<VerificationReport> {
    reports.iter().cloned().map(|r| VerificationReport { runtime_ms: 0.0, ..r }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let r = VerificationReport::identity(
            "x/y",
            serde_json::json!({"n": 2}),
            Complex64::new(0.1 + 0.2, -1e-300),
            Complex64::new(0.3, 0.0),
            1e-12,
        );
        let s = to_json(&[r.clone()]).unwrap();
        assert_eq!(from_json(&s).unwrap(), vec![r]);
    }

    #[test]
    fn audit_ratio() {
        let r = VerificationReport::audit("a", serde_json::Value::Null, Complex64::new(-2.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0), 1e-12);
        assert!(r.pass);
        assert_eq!(r.audit_ratio, Some([-1.0, 0.0]));
    }
}
