//! Structured pass/fail records for operator identities.
//!
//! A report serializes as a JSON array of
//! `{"identity":...,"residual":...,"bound":...,"passed":...}` records, and a
//! record passes exactly when its residual is at or below its bound.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerificationReport {
    records: Vec<IdentityCheck>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; `passed` is derived, never supplied.
    pub fn push(&mut self, identity: impl Into<String>, residual: f64, bound: f64) {
        self.records.push(IdentityCheck {
            identity: identity.into(),
            residual,
            bound,
            passed: residual <= bound,
        });
    }

    /// Appends every record of `other` under a `prefix/` namespace.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut record in other.records {
            record.identity = format!("{prefix}/{}", record.identity);
            self.records.push(record);
        }
    }

    pub fn records(&self) -> &[IdentityCheck] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.records
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.identity.as_str())
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// (passed, failed) record counts.
    pub fn counts(&self) -> (usize, usize) {
        let passed = self.records.iter().filter(|r| r.passed).count();
        (passed, self.records.len() - passed)
    }

    pub fn find(&self, identity: &str) -> Option<&IdentityCheck> {
        self.records.iter().find(|r| r.identity == identity)
    }
}
