use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of a verification check. `Report` marks informational checks that
/// never affect the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Report,
}

/// One named check with its worst deviation and a free-form diagnostic payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub status: Status,
    pub max_error: f64,
    pub details: Value,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, family: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            family: family.into(),
            params: BTreeMap::new(),
            status: Status::Report,
            max_error: 0.0,
            details: Value::Object(Default::default()),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Sets `status` to pass/fail by comparing `max_error` against `tol`.
    pub fn judged(mut self, max_error: f64, tol: f64) -> Self {
        self.max_error = max_error;
        self.status = if max_error.is_finite() && max_error <= tol {
            Status::Pass
        } else {
            Status::Fail
        };
        self
    }

    pub fn informational(mut self, max_error: f64) -> Self {
        self.max_error = max_error;
        self.status = Status::Report;
        self
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}
