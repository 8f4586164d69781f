//! Machine-diffable JSON report for suite runs.
//!
//! Reports are deterministic given config and seed: field order is fixed by
//! the struct definitions and every stochastic choice flows through the
//! seeded sampler. The only nondeterministic field is `seconds`, which
//! comparisons must ignore.

use serde::{Deserialize, Serialize};

/// Frozen convention choices, echoed in every report so residuals are
/// reproducible across implementations.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Conventions {
    /// Curvature tensor sign: `R(X,Y)Z = [nabla_X, nabla_Y] Z - nabla_[X,Y] Z`
    /// with `R(X,Y,Z,W) = g(R(X,Y)Z, W)`; unit sphere has sectional +1.
    pub curvature_sign: String,
    /// Exterior derivative: unnormalized Palais sum; the normality condition
    /// carries coefficient 1 on `d eta` in this convention.
    pub deta_norm: String,
    /// Normal frames: modified Gram-Schmidt over coordinate-axis candidates
    /// ranked at the source domain center.
    pub normal_orientation: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            curvature_sign: "R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z"
                .into(),
            deta_norm: "unnormalized Palais sum; normality defect uses [phi,phi] + d_eta (x) xi"
                .into(),
            normal_orientation: "gram-schmidt over coordinate candidates ranked at domain center"
                .into(),
        }
    }
}

/// One labeled term group of a check: either a constituent of a long display
/// or a variant comparison (e.g. as-printed vs derived form).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermGroup {
    pub label: String,
    pub max_residual: f64,
}

/// Result of one (check, space, immersion) job.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub immersion: Option<String>,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub relative_residual: f64,
    pub pass: bool,
    pub term_groups: Vec<TermGroup>,
    pub seconds: f64,
}

/// Full suite report: conventions fingerprint, config echo, per-check rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub conventions: Conventions,
    pub config: serde_json::Value,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| !c.applicable || c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Copy with timing zeroed, for byte-comparing reports across runs.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.checks {
            c.seconds = 0.0;
        }
        out
    }
}
