//! Verification report records produced by the projector and prover drivers.

use crate::maps::{IntertwinerFailure, MapDifference};
use crate::repmod::LinComb;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Witness attached to a failing claim; carries enough data to recheck the
/// failure by hand (which level, which input vector, the exact residual).
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub level: Option<i64>,
    pub vector: Value,
    pub residual: Value,
}

impl Counterexample {
    pub fn from_difference(d: &MapDifference) -> Self {
        Counterexample {
            level: Some(d.level),
            vector: json!(d.vector),
            residual: lincomb_json(&d.residual),
        }
    }

    pub fn from_intertwiner(f: &IntertwinerFailure) -> Self {
        Counterexample {
            level: Some(f.level),
            vector: json!(format!("{} at {}", f.generator, f.vector)),
            residual: lincomb_json(&f.residual),
        }
    }
}

pub fn lincomb_json(lc: &LinComb) -> Value {
    Value::Array(lc.terms().map(|(idx, c)| json!([idx, c])).collect())
}

/// Outcome of one verified claim.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub status: Status,
    pub depth: i64,
    pub counterexample: Option<Counterexample>,
    pub ms: u64,
}

impl VerificationReport {
    pub fn pass(claim: impl Into<String>, depth: i64, ms: u64) -> Self {
        VerificationReport {
            claim: claim.into(),
            status: Status::Pass,
            depth,
            counterexample: None,
            ms,
        }
    }

    pub fn fail(claim: impl Into<String>, depth: i64, ce: Counterexample, ms: u64) -> Self {
        VerificationReport {
            claim: claim.into(),
            status: Status::Fail,
            depth,
            counterexample: Some(ce),
            ms,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One human-readable line per claim.
    pub fn pretty(&self) -> String {
        match self.status {
            Status::Pass => format!(
                "PASS  {} (depth {}, {} ms)",
                self.claim, self.depth, self.ms
            ),
            Status::Fail => {
                let loc = self
                    .counterexample
                    .as_ref()
                    .map(|c| match c.level {
                        Some(l) => format!(" at level {l}, vector {}", c.vector),
                        None => format!(" at {}", c.vector),
                    })
                    .unwrap_or_default();
                format!(
                    "FAIL  {} (depth {}, {} ms){loc}",
                    self.claim, self.depth, self.ms
                )
            }
        }
    }
}

pub fn all_pass(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.passed())
}
