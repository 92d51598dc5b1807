//! Structured pass/fail records emitted by the checkers.

use serde::{Deserialize, Serialize};

/// Outcome of one inequality or property check.
///
/// `passed` is true iff the inequality held at every sampled point with the
/// stated constant. `worst_sample` records the input tuple achieving the
/// extreme ratio and `achieved_constant` the extreme itself (for fitted
/// checks this is the constant that was asserted).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub worst_sample: Vec<f64>,
    pub achieved_constant: f64,
    pub notes: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            worst_sample: Vec::new(),
            achieved_constant: 0.0,
            notes: String::new(),
        }
    }

    pub fn fail(mut self, worst: &[f64], achieved: f64, notes: impl Into<String>) -> Self {
        self.passed = false;
        self.worst_sample = worst.to_vec();
        self.achieved_constant = achieved;
        self.notes = notes.into();
        self
    }

    pub fn pass(mut self, worst: &[f64], achieved: f64, notes: impl Into<String>) -> Self {
        self.passed = true;
        self.worst_sample = worst.to_vec();
        self.achieved_constant = achieved;
        self.notes = notes.into();
        self
    }
}

/// True iff every report in the slice passed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
