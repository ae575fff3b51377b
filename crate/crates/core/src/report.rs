//! Verification records and the report document emitted by the CLI.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::form::Form;
use crate::operator::LinearOperator;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// More than one consistent answer; not a failure.
    Ambiguous,
    /// Recorded for information only; never affects the verdict.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Ambiguous,
}

/// Size of a residual: number of nonzero entries and the largest magnitude.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub nonzero: usize,
    pub max_abs: Scalar,
}

impl Residual {
    pub fn zero() -> Self {
        Residual { nonzero: 0, max_abs: Scalar::zero() }
    }

    pub fn of_operator(m: &LinearOperator) -> Self {
        Residual { nonzero: m.nnz(), max_abs: m.max_abs() }
    }

    pub fn of_form(diff: &Form) -> Self {
        let mut r = Residual::zero();
        for (_, c) in diff.terms() {
            r.merge(&Residual::of_scalar(c));
        }
        r
    }

    pub fn of_scalar(diff: &Scalar) -> Self {
        Residual { nonzero: usize::from(!diff.is_zero()), max_abs: diff.abs() }
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero == 0
    }

    /// Entrywise worst case of two residuals.
    pub fn merge(&mut self, other: &Residual) {
        self.nonzero += other.nonzero;
        if other.max_abs > self.max_abs {
            self.max_abs = other.max_abs.clone();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The formula or statement being certified.
    pub paper_anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Residual>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub params: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, status: Status) -> Self {
        CheckRecord {
            id: id.into(),
            paper_anchor: anchor.into(),
            status,
            residual: None,
            params: BTreeMap::new(),
            detail: None,
        }
    }

    /// Pass iff `ok`.
    pub fn check(id: impl Into<String>, anchor: impl Into<String>, ok: bool) -> Self {
        Self::new(id, anchor, if ok { Status::Pass } else { Status::Fail })
    }

    /// Pass iff the residual vanishes.
    pub fn from_residual(id: impl Into<String>, anchor: impl Into<String>, residual: Residual) -> Self {
        let mut r = Self::check(id, anchor, residual.is_zero());
        r.residual = Some(residual);
        r
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Info)
    }
}

/// Overall verdict: FAIL if anything failed, AMBIGUOUS if anything was
/// ambiguous, PASS otherwise.
pub fn verdict(records: &[CheckRecord]) -> Verdict {
    if records.iter().any(|r| r.status == Status::Fail) {
        Verdict::Fail
    } else if records.iter().any(|r| r.status == Status::Ambiguous) {
        Verdict::Ambiguous
    } else {
        Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: Value,
    pub records: Vec<CheckRecord>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(config: Value, records: Vec<CheckRecord>) -> Self {
        let verdict = verdict(&records);
        Report { version: env!("CARGO_PKG_VERSION").to_string(), config, records, verdict }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        let pass = CheckRecord::check("a", "x", true);
        let info = CheckRecord::new("b", "x", Status::Info);
        let amb = CheckRecord::new("c", "x", Status::Ambiguous);
        let fail = CheckRecord::check("d", "x", false);
        assert_eq!(verdict(&[]), Verdict::Pass);
        assert_eq!(verdict(&[pass.clone(), info.clone()]), Verdict::Pass);
        assert_eq!(verdict(&[pass.clone(), amb.clone()]), Verdict::Ambiguous);
        assert_eq!(verdict(&[pass, amb, fail, info]), Verdict::Fail);
    }

    #[test]
    fn json_shape() {
        let r = CheckRecord::from_residual("alg.1", "[X∧,Λ]", Residual::zero()).param("p", 3);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["residual"]["max_abs"], "0");
        assert_eq!(v["params"]["p"], 3);
        assert!(v.get("detail").is_none());
    }
}
