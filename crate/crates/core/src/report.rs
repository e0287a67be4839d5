//! Uniform result record shared by every verification routine.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Complex number in its JSON wire form `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// One checked index tuple, trial or sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub label: String,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl CaseRecord {
    pub fn new(label: impl Into<String>, residual: f64) -> Self {
        Self {
            label: label.into(),
            residual,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

/// Outcome of a named check. `pass` is always `max_residual <= tolerance`;
/// a NaN residual therefore fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub params: BTreeMap<String, Value>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub cases: Vec<CaseRecord>,
}

impl VerificationReport {
    /// Builds a report whose `max_residual` is the largest case residual
    /// (NaN-propagating).
    pub fn from_cases(
        check_name: impl Into<String>,
        params: BTreeMap<String, Value>,
        tolerance: f64,
        cases: Vec<CaseRecord>,
    ) -> Self {
        let max_residual = cases.iter().fold(0.0_f64, |acc, c| {
            if acc.is_nan() || c.residual.is_nan() {
                f64::NAN
            } else {
                acc.max(c.residual)
            }
        });
        Self::with_residual(check_name, params, max_residual, tolerance, cases)
    }

    pub fn with_residual(
        check_name: impl Into<String>,
        params: BTreeMap<String, Value>,
        max_residual: f64,
        tolerance: f64,
        cases: Vec<CaseRecord>,
    ) -> Self {
        Self {
            check_name: check_name.into(),
            params,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            cases,
        }
    }

    /// Labels of the cases whose residual exceeds the tolerance.
    pub fn failing_cases(&self) -> Vec<&str> {
        self.cases
            .iter()
            .filter(|c| c.residual.is_nan() || c.residual > self.tolerance)
            .map(|c| c.label.as_str())
            .collect()
    }
}

/// Shorthand for assembling `params` maps.
#[macro_export]
macro_rules! params {
    ($($key:expr => $value:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut map = ::std::collections::BTreeMap::<String, ::serde_json::Value>::new();
        $( map.insert(($key).to_string(), ::serde_json::json!($value)); )*
        map
    }};
}
