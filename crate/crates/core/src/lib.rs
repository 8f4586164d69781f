//! Chart-based numerical differential geometry for conformal Sasakian
//! structures and their submanifolds.
//!
//! The crate builds everything on top of truncated Taylor arithmetic
//! ([`jets`]): metric charts yield connections and curvature ([`manifold`]),
//! almost contact metric structures get tensorial diagnostics ([`contact`]),
//! conformal rescalings carry Lee-form corrections ([`conformal`]), and
//! isometric immersions produce second fundamental forms, shape operators and
//! normal curvature ([`submanifold`]). A catalog of concrete spaces
//! ([`spaces`]) feeds a registry of named residual checks ([`checks`]) that a
//! runner executes deterministically from a seed.

// Tensor formulas read clearest with explicit index loops.
#![allow(clippy::needless_range_loop)]

pub mod checks;
pub mod conformal;
pub mod contact;
pub mod jets;
pub mod linalg;
pub mod manifold;
pub mod report;
pub mod sample;
pub mod spaces;
pub mod submanifold;
pub mod tensor;

pub use checks::{run_check, run_suite, CheckCtx, CheckOutcome, CheckSpec, RunConfig, SpaceSpec};
pub use conformal::{AmbientPointData, ConformalSasakianSpace, LeeData};
pub use contact::AlmostContactStructure;
pub use jets::{Jet, JetError, JetSpace};
pub use manifold::{GeomError, MetricChart, ScalarField, TangentVector, VectorField};
pub use report::SuiteReport;
pub use spaces::{conformal_space, immersion_catalog, sasakian_model, ConformalFactor};
pub use submanifold::{Immersion, SubmanifoldData, SubmanifoldStructure};

