use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Verdict {
    /// Passes when `value <= tolerance`.
    pub fn at_most(check: &str, value: f64, tolerance: f64) -> Self {
        Verdict { check: check.into(), pass: value <= tolerance, value, tolerance, detail: None }
    }

    pub fn flag(check: &str, pass: bool) -> Self {
        Verdict { check: check.into(), pass, value: if pass { 1.0 } else { 0.0 }, tolerance: 1.0, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub wall_time_s: f64,
    pub verdicts: Vec<Verdict>,
    pub outputs: Vec<PathBuf>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}
