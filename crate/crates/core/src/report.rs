//! Structured verification reports shared by every `verify` surface.

use serde::Serialize;

/// One compared sample inside a check.
#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    /// What was evaluated (a point, a λ, a mode index, ...).
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl Sample {
    pub fn new(label: impl Into<String>, value: f64, reference: f64) -> Self {
        let abs_err = (value - reference).abs();
        let scale = reference.abs().max(1e-300);
        Sample {
            label: label.into(),
            value,
            reference,
            abs_err,
            rel_err: abs_err / scale,
        }
    }

    /// A sample whose value is already a normalized residual (compared
    /// against zero): rel_err is the value itself.
    pub fn residual(label: impl Into<String>, value: f64) -> Self {
        Sample {
            label: label.into(),
            value,
            reference: 0.0,
            abs_err: value.abs(),
            rel_err: value.abs(),
        }
    }

    /// A pass/fail sample for exact (rational-arithmetic) checks:
    /// rel_err is 0 when the identity holds and 1 when it does not.
    pub fn exact(label: impl Into<String>, holds: bool) -> Self {
        Sample {
            label: label.into(),
            value: if holds { 1.0 } else { 0.0 },
            reference: 1.0,
            abs_err: if holds { 0.0 } else { 1.0 },
            rel_err: if holds { 0.0 } else { 1.0 },
        }
    }
}

/// Self-contained result of one verification check. `pass` holds exactly
/// when `max_rel_err <= tolerance`.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub check: String,
    pub params: serde_json::Value,
    pub samples: Vec<Sample>,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl VerificationReport {
    pub fn new(
        check: impl Into<String>,
        params: serde_json::Value,
        samples: Vec<Sample>,
        tolerance: f64,
    ) -> Self {
        let max_rel_err = samples.iter().map(|s| s.rel_err).fold(0.0, f64::max);
        VerificationReport {
            schema: 1,
            check: check.into(),
            params,
            samples,
            max_rel_err,
            tolerance,
            pass: max_rel_err <= tolerance,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization cannot fail")
    }
}
