//! Machine-readable check records. Invariant: `pass ⇔ residual < tolerance`, and a
//! case that raised an error never passes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    #[serde(rename = "check-id")]
    pub check_id: String,
    #[serde(rename = "params-digest")]
    pub params_digest: String,
    /// `null` in JSON when the case failed to evaluate.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    /// True when the error came from a zero or pole of the inputs.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub degenerate: bool,
}

impl CaseRecord {
    /// Record for an evaluated residual; NaN never passes.
    pub fn evaluated(check_id: String, params: &str, residual: f64, tolerance: f64) -> Self {
        let finite = residual.is_finite();
        CaseRecord {
            check_id,
            params_digest: digest(params),
            residual: finite.then_some(residual),
            tolerance,
            pass: finite && residual < tolerance,
            error: (!finite).then(|| format!("non-finite residual {residual}")),
            degenerate: false,
        }
    }

    /// Record for a case whose evaluation failed.
    pub fn failed(check_id: String, params: &str, tolerance: f64, err: &Error) -> Self {
        CaseRecord {
            check_id,
            params_digest: digest(params),
            residual: None,
            tolerance,
            pass: false,
            error: Some(err.to_string()),
            degenerate: err.is_degeneracy(),
        }
    }
}

/// Report of one suite run. Cases are sorted by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub cases: Vec<CaseRecord>,
    pub seed: u64,
    pub wall_time_ms: u64,
}

impl CheckReport {
    pub fn new(suite: &str, mut cases: Vec<CaseRecord>, seed: u64, wall_time_ms: u64) -> Self {
        cases.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        CheckReport { suite: suite.to_string(), cases, seed, wall_time_ms }
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    /// True when some case failed only because it hit a degenerate point.
    pub fn has_degeneracy(&self) -> bool {
        self.cases.iter().any(|c| c.degenerate)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// Pretty-printed JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// First 16 hex digits of `SHA-256(params)`.
pub fn digest(params: &str) -> String {
    let d = Sha256::digest(params.as_bytes());
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_below_tolerance() {
        assert!(CaseRecord::evaluated("a".into(), "", 1e-12, 1e-11).pass);
        assert!(!CaseRecord::evaluated("a".into(), "", 1e-11, 1e-11).pass);
        let nan = CaseRecord::evaluated("a".into(), "", f64::NAN, 1.0);
        assert!(!nan.pass && nan.residual.is_none());
        let e = CaseRecord::failed("b".into(), "", 1.0, &Error::Pole("x".into()));
        assert!(!e.pass && e.degenerate);
    }

    #[test]
    fn json_shape_and_order() {
        let r = CheckReport::new(
            "demo",
            vec![
                CaseRecord::evaluated("z.case".into(), "p=1", 0.5, 1.0),
                CaseRecord::evaluated("a.case".into(), "p=2", 2.0, 1.0),
            ],
            42,
            0,
        );
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["cases"][0]["check-id"], "a.case");
        assert_eq!(v["cases"][0]["pass"], false);
        assert_eq!(v["seed"], 42);
        assert_eq!(v["cases"][1]["params-digest"].as_str().unwrap().len(), 16);
        assert!(v["cases"][1].get("error").is_none());
        let back: CheckReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
