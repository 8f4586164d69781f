//! Registry of named residual checks and the deterministic suite runner.
//!
//! Each check evaluates one identity (or theorem restated as a residual) over
//! seeded sample points and probe tuples, reporting absolute and relative
//! residuals plus labeled term groups. Long displays carry their as-printed
//! form as a `display` group next to the independently derived form, so a
//! deviating display shows up as one flagged group instead of an opaque
//! failure.

mod ambient;
mod anti;
mod cr;
mod fundamental;
mod invariant;

pub use anti::{check_recurrent_with, RecurrenceSpec};

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::ConformalSasakianSpace;
use crate::manifold::GeomError;
use crate::report::{CheckResult, Conventions, SuiteReport, TermGroup};
use crate::spaces::{self, CatalogImmersion, ConformalFactor};

/// Relative-residual floor: defects at or below this absolute size pass
/// regardless of term scale.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Stable check ids, in report order.
pub const CHECK_IDS: &[&str] = &[
    "eq2.1", "eq2.2", "eq2.6", "eq2.7", "eq2.8", "eq2.9", "eq2.10", "eq2.11", "eq2.12", "eq2.13",
    "eq2.14", "eq2.15", "eq2.16", "eq2.17", "eq3.2", "thm3.1", "eq4.1", "eq4.2", "prop4.2",
    "thm4.3", "thm5.1", "thm5.3",
];

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("{0}")]
    Catalog(#[from] spaces::CatalogError),
    #[error("invalid config: {0}")]
    BadConfig(String),
    #[error("geometry evaluation failed: {0}")]
    Geom(#[from] GeomError),
    #[error("jet evaluation failed: {0}")]
    Jet(#[from] crate::jets::JetError),
}

/// One space requested in a run: model parameter, factor, and an optional
/// deliberate structure corruption for fault-injection runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub n: usize,
    pub factor: String,
    #[serde(default = "default_phi_scale")]
    pub phi_scale: f64,
}

fn default_phi_scale() -> f64 {
    1.0
}

impl SpaceSpec {
    pub fn id(&self) -> String {
        let mut s = format!("sasakian:n={}+{}", self.n, self.factor);
        if self.phi_scale != 1.0 {
            s.push_str(&format!("+phi_scale={}", self.phi_scale));
        }
        s
    }

    pub fn build(&self) -> Result<ConformalSasakianSpace, SuiteError> {
        let factor = ConformalFactor::parse(&self.factor)?;
        let model = spaces::sasakian_model(self.n)?;
        let model = if self.phi_scale != 1.0 {
            spaces::scale_phi(&model, self.phi_scale)
        } else {
            model
        };
        Ok(ConformalSasakianSpace::from_sasakian(model, factor.field()))
    }
}

/// Full run configuration (the CLI parses flags/files into this).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub spaces: Vec<SpaceSpec>,
    pub immersions: Vec<String>,
    pub checks: Vec<String>,
    pub samples: usize,
    pub probes: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            spaces: vec![
                SpaceSpec {
                    n: 1,
                    factor: "linear_z:a=0.3".into(),
                    phi_scale: 1.0,
                },
                SpaceSpec {
                    n: 2,
                    factor: "linear_z:a=0.3".into(),
                    phi_scale: 1.0,
                },
                SpaceSpec {
                    n: 2,
                    factor: "quad:c=0.05".into(),
                    phi_scale: 1.0,
                },
                SpaceSpec {
                    n: 3,
                    factor: "linear_coord:i=4,a=0.2".into(),
                    phi_scale: 1.0,
                },
            ],
            immersions: vec![
                "invariant_1_in_2".into(),
                "anti_xaxis_r3".into(),
                "anti_y0_plane_r3".into(),
                "anti_surface_r5".into(),
                "cr_r5".into(),
                "cr_r7".into(),
            ],
            checks: vec!["all".into()],
            samples: 12,
            probes: 6,
            seed: 42,
            tolerance: 1e-6,
        }
    }
}

/// Per-job context handed to each check implementation.
pub struct CheckCtx<'a> {
    pub space: &'a ConformalSasakianSpace,
    pub space_id: &'a str,
    pub immersion: Option<&'a CatalogImmersion>,
    pub samples: usize,
    pub probes: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl CheckCtx<'_> {
    /// Sampler stream decoupled per (check, space, immersion).
    pub fn sampler(&self, check_id: &str) -> crate::sample::Sampler {
        let imm = self.immersion.map(|i| i.id.as_str()).unwrap_or("-");
        crate::sample::Sampler::for_key(
            self.seed,
            &format!("{check_id}|{}|{imm}", self.space_id),
        )
    }
}

/// Residual accumulator: tracks absolute and scale-relative residuals plus
/// named term groups (kept as max over samples).
#[derive(Default, Clone, Debug)]
pub struct Accum {
    max_abs: f64,
    sum_abs: f64,
    count: usize,
    max_rel: f64,
    groups: BTreeMap<String, f64>,
}

impl Accum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, abs: f64, scale: f64) {
        let abs = abs.abs();
        self.max_abs = self.max_abs.max(abs);
        self.sum_abs += abs;
        self.count += 1;
        let rel = if abs <= RESIDUAL_FLOOR {
            0.0
        } else {
            abs / scale.abs().max(RESIDUAL_FLOOR)
        };
        self.max_rel = self.max_rel.max(rel);
    }

    pub fn add_vec(&mut self, defect: &[f64], scale: f64) {
        self.add(crate::tensor::max_abs(defect), scale);
    }

    /// Records a labeled group residual (max over calls).
    pub fn group(&mut self, label: &str, value: f64) {
        let e = self.groups.entry(label.to_string()).or_insert(0.0);
        *e = e.max(value.abs());
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn max_rel(&self) -> f64 {
        self.max_rel
    }

    pub fn into_outcome(self) -> CheckOutcome {
        CheckOutcome {
            applicable: true,
            reason: None,
            max_abs: self.max_abs,
            mean_abs: if self.count == 0 {
                0.0
            } else {
                self.sum_abs / self.count as f64
            },
            max_rel: self.max_rel,
            groups: self
                .groups
                .into_iter()
                .map(|(label, max_residual)| TermGroup {
                    label,
                    max_residual,
                })
                .collect(),
        }
    }
}

/// What one check produced before pass/fail is decided.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub applicable: bool,
    pub reason: Option<String>,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub groups: Vec<TermGroup>,
}

impl CheckOutcome {
    pub fn not_applicable(reason: impl Into<String>) -> Self {
        Self {
            applicable: false,
            reason: Some(reason.into()),
            max_abs: 0.0,
            mean_abs: 0.0,
            max_rel: 0.0,
            groups: Vec::new(),
        }
    }
}

/// Spec for driving a single check programmatically, outside a full suite
/// run.
#[derive(Clone, Debug)]
pub struct CheckSpec {
    pub check_id: String,
    pub space: SpaceSpec,
    pub immersion_id: Option<String>,
    pub sample_count: usize,
    pub probe_count: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl CheckSpec {
    pub fn run(&self) -> Result<CheckResult, SuiteError> {
        if !CHECK_IDS.contains(&self.check_id.as_str()) {
            return Err(SuiteError::UnknownCheck(self.check_id.clone()));
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(SuiteError::BadConfig("tolerance must be > 0".into()));
        }
        let start = Instant::now();
        let space = self.space.build()?;
        let imm = self
            .immersion_id
            .as_ref()
            .map(|id| spaces::immersion_catalog(id, self.space.n))
            .transpose()?;
        let ctx = CheckCtx {
            space: &space,
            space_id: &self.space.id(),
            immersion: imm.as_ref(),
            samples: self.sample_count,
            probes: self.probe_count,
            seed: self.seed,
            tolerance: self.tolerance,
        };
        let outcome = run_check(&self.check_id, &ctx)?;
        let pass = !outcome.applicable || outcome.max_rel <= self.tolerance;
        Ok(CheckResult {
            id: self.check_id.clone(),
            space: self.space.id(),
            immersion: self.immersion_id.clone(),
            applicable: outcome.applicable,
            reason: outcome.reason,
            max_residual: outcome.max_abs,
            mean_residual: outcome.mean_abs,
            relative_residual: outcome.max_rel,
            pass,
            term_groups: outcome.groups,
            seconds: start.elapsed().as_secs_f64(),
        })
    }
}

enum Requirement {
    Ambient,
    Immersion,
    Either,
}

fn requirement(id: &str) -> Requirement {
    match id {
        "eq2.1" | "eq2.2" | "eq2.6" | "eq2.7" | "eq2.8" | "eq2.9" | "eq2.10" => {
            Requirement::Ambient
        }
        "prop4.2" => Requirement::Either,
        _ => Requirement::Immersion,
    }
}

/// Runs one check in a context (dispatch by id).
pub fn run_check(id: &str, ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let out = match id {
        "eq2.1" => ambient::check_structure(ctx)?,
        "eq2.2" => ambient::check_sasakian(ctx)?,
        "eq2.6" => ambient::check_conformal_construction(ctx)?,
        "eq2.7" => ambient::check_connection_law(ctx)?,
        "eq2.8" => ambient::check_curvature_law(ctx)?,
        "eq2.9" => ambient::check_dphi_law(ctx)?,
        "eq2.10" => ambient::check_dxi_law(ctx)?,
        "eq2.11" => fundamental::check_structure_eq(ctx, fundamental::StructureBlock::P)?,
        "eq2.12" => fundamental::check_structure_eq(ctx, fundamental::StructureBlock::F)?,
        "eq2.13" => fundamental::check_structure_eq(ctx, fundamental::StructureBlock::T)?,
        "eq2.14" => fundamental::check_structure_eq(ctx, fundamental::StructureBlock::FNor)?,
        "eq2.15" => fundamental::check_gauss(ctx)?,
        "eq2.16" => fundamental::check_codazzi(ctx)?,
        "eq2.17" => fundamental::check_ricci(ctx)?,
        "eq3.2" => invariant::check_invariant_h(ctx)?,
        "thm3.1" => invariant::check_minimality(ctx)?,
        "eq4.1" => anti::check_anti_shape(ctx)?,
        "eq4.2" => anti::check_commutator(ctx)?,
        "prop4.2" => anti::check_flat_normal_equiv(ctx)?,
        "thm4.3" => anti::check_recurrent(ctx)?,
        "thm5.1" => cr::check_cr_integrability(ctx)?,
        "thm5.3" => cr::check_mixed_geodesic(ctx)?,
        other => return Err(SuiteError::UnknownCheck(other.into())),
    };
    Ok(out)
}

struct Job {
    check: String,
    space: SpaceSpec,
    immersion: Option<String>,
}

/// Expands a config into jobs, runs them (in parallel), and assembles the
/// deterministic report.
pub fn run_suite(config: &RunConfig) -> Result<SuiteReport, SuiteError> {
    if config.samples == 0 || config.probes == 0 {
        return Err(SuiteError::BadConfig("samples and probes must be >= 1".into()));
    }
    if !config.tolerance.is_finite() || config.tolerance <= 0.0 {
        return Err(SuiteError::BadConfig("tolerance must be > 0".into()));
    }

    let selected: Vec<String> = if config.checks.iter().any(|c| c == "all") {
        CHECK_IDS.iter().map(|s| s.to_string()).collect()
    } else {
        for c in &config.checks {
            if !CHECK_IDS.contains(&c.as_str()) {
                return Err(SuiteError::UnknownCheck(c.clone()));
            }
        }
        config.checks.clone()
    };

    // Validate all spaces and immersion ids up front (configuration errors
    // beat partial reports).
    for s in &config.spaces {
        s.build()?;
    }
    for imm_id in &config.immersions {
        let known = spaces::catalog_ids()
            .iter()
            .any(|(id, _)| imm_id == id || imm_id.starts_with(&format!("{id}:")));
        if !known && !imm_id.starts_with("invariant_k_in_n") {
            return Err(SuiteError::Catalog(spaces::CatalogError::UnknownImmersion(
                imm_id.clone(),
            )));
        }
    }

    let mut jobs: Vec<Job> = Vec::new();
    for check in &selected {
        match requirement(check) {
            Requirement::Ambient => {
                for s in &config.spaces {
                    jobs.push(Job {
                        check: check.clone(),
                        space: s.clone(),
                        immersion: None,
                    });
                }
            }
            Requirement::Immersion | Requirement::Either => {
                let mut any = false;
                for s in &config.spaces {
                    for imm_id in &config.immersions {
                        if spaces::immersion_catalog(imm_id, s.n).is_ok() {
                            jobs.push(Job {
                                check: check.clone(),
                                space: s.clone(),
                                immersion: Some(imm_id.clone()),
                            });
                            any = true;
                        }
                    }
                }
                if !any && matches!(requirement(check), Requirement::Either) {
                    for s in &config.spaces {
                        jobs.push(Job {
                            check: check.clone(),
                            space: s.clone(),
                            immersion: None,
                        });
                    }
                }
            }
        }
    }

    let results: Result<Vec<CheckResult>, SuiteError> = jobs
        .par_iter()
        .map(|job| {
            let start = Instant::now();
            let space = job.space.build()?;
            let imm = job
                .immersion
                .as_ref()
                .map(|id| spaces::immersion_catalog(id, job.space.n))
                .transpose()?;
            let ctx = CheckCtx {
                space: &space,
                space_id: &job.space.id(),
                immersion: imm.as_ref(),
                samples: config.samples,
                probes: config.probes,
                seed: config.seed,
                tolerance: config.tolerance,
            };
            let outcome = run_check(&job.check, &ctx)?;
            let pass = !outcome.applicable || outcome.max_rel <= config.tolerance;
            Ok(CheckResult {
                id: job.check.clone(),
                space: job.space.id(),
                immersion: job.immersion.clone(),
                applicable: outcome.applicable,
                reason: outcome.reason,
                max_residual: outcome.max_abs,
                mean_residual: outcome.mean_abs,
                relative_residual: outcome.max_rel,
                pass,
                term_groups: outcome.groups,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect();
    let mut results = results?;

    let order: BTreeMap<&str, usize> = CHECK_IDS.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    results.sort_by(|a, b| {
        order
            .get(a.id.as_str())
            .cmp(&order.get(b.id.as_str()))
            .then(a.space.cmp(&b.space))
            .then(a.immersion.cmp(&b.immersion))
    });

    Ok(SuiteReport {
        conventions: Conventions::default(),
        config: serde_json::to_value(config).expect("config serializes"),
        checks: results,
    })
}
