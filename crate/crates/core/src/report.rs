//! Structured verification outcomes.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::C64;

/// `|lhs − rhs| / (1 + |lhs|)`.
pub fn relative_residual(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / (1.0 + lhs.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub kind: String,
    pub seed: u64,
    pub dim: usize,
    pub degree: i64,
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_ms: f64,
    /// Secondary values: alternative right-hand sides, ratios, bounds.
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// One line of a campaign summary CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub seed: u64,
    pub dim: usize,
    pub kind: String,
    pub degree: i64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub residual: f64,
    pub verdict: String,
}

impl VerificationReport {
    /// Compares two values with the relative residual.
    pub fn compare(check: impl Into<String>, lhs: C64, rhs: C64, tolerance: f64) -> Self {
        let residual = relative_residual(lhs, rhs);
        Self::from_residual(check, lhs, rhs, residual, tolerance)
    }

    /// A report whose residual is computed by the caller (ratios, norms).
    pub fn from_residual(check: impl Into<String>, lhs: C64, rhs: C64, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            kind: String::new(),
            seed: 0,
            dim: 0,
            degree: 0,
            lhs,
            rhs,
            residual,
            tolerance,
            passed: residual <= tolerance,
            runtime_ms: 0.0,
            extra: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// A failed report carrying an error message instead of a value.
    pub fn failure(check: impl Into<String>, tolerance: f64, message: impl Into<String>) -> Self {
        let nan = C64::new(f64::NAN, f64::NAN);
        let mut r = Self::from_residual(check, nan, nan, f64::INFINITY, tolerance);
        r.warnings.push(message.into());
        r
    }

    pub fn with_context(mut self, kind: impl Into<String>, seed: u64, dim: usize, degree: i64) -> Self {
        self.kind = kind.into();
        self.seed = seed;
        self.dim = dim;
        self.degree = degree;
        self
    }

    pub fn with_extra(mut self, key: impl Into<String>, value: f64) -> Self {
        self.extra.insert(key.into(), value);
        self
    }

    pub fn with_warnings(mut self, w: impl IntoIterator<Item = String>) -> Self {
        self.warnings.extend(w);
        self
    }

    /// Adds a secondary comparison; the report passes only if every check does.
    pub fn and_check(mut self, key: &str, residual: f64, tolerance: f64) -> Self {
        self.extra.insert(format!("{key}_residual"), residual);
        self.extra.insert(format!("{key}_tolerance"), tolerance);
        if !(residual <= tolerance) {
            self.passed = false;
        }
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn csv_row(&self) -> CsvRow {
        CsvRow {
            seed: self.seed,
            dim: self.dim,
            kind: self.kind.clone(),
            degree: self.degree,
            lhs_re: self.lhs.re,
            lhs_im: self.lhs.im,
            rhs_re: self.rhs.re,
            rhs_im: self.rhs.im,
            residual: self.residual,
            verdict: self.verdict().to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_is_relative() {
        let r = VerificationReport::compare("x", C64::new(3.0, 4.0), C64::new(3.0, 4.0 + 6e-8), 1e-8);
        assert!((r.residual - 1e-8).abs() < 1e-15);
        assert!(r.passed);
        let r = r.and_check("other", 2.0, 1.0);
        assert!(!r.passed);
        assert_eq!(r.verdict(), "fail");
    }

    #[test]
    fn failure_never_passes() {
        let r = VerificationReport::failure("q", 1.0, "quadrature");
        assert!(!r.passed);
        assert_eq!(r.csv_row().verdict, "fail");
    }
}
