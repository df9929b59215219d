//! Pass/fail records produced by the verification scans.

use serde::{Deserialize, Serialize};

/// Outcome of one named verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    /// Threshold the worst value is compared against.
    pub threshold: f64,
    /// Human-readable descriptions of individual violations (capped).
    pub violations: Vec<String>,
}

const MAX_LISTED: usize = 20;

impl CheckResult {
    /// Check passing when `worst <= threshold`.
    pub fn at_most(name: impl Into<String>, worst: f64, threshold: f64, violations: Vec<String>) -> Self {
        let passed = worst <= threshold && violations.is_empty() && worst.is_finite();
        Self::finish(name, passed, worst, threshold, violations)
    }

    /// Check passing when `worst >= threshold`.
    pub fn at_least(name: impl Into<String>, worst: f64, threshold: f64, violations: Vec<String>) -> Self {
        let passed = worst >= threshold && violations.is_empty() && worst.is_finite();
        Self::finish(name, passed, worst, threshold, violations)
    }

    fn finish(name: impl Into<String>, passed: bool, worst: f64, threshold: f64, mut violations: Vec<String>) -> Self {
        violations.truncate(MAX_LISTED);
        CheckResult { name: name.into(), passed, worst, threshold, violations }
    }
}

/// True when every check passed.
pub fn all_passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.passed)
}
