//! Verification harness: analytic example curves, reference arclength
//! parametrizations, error metrics and convergence studies.

mod examples;
mod metrics;
mod study;
mod truth;

pub use examples::{ExampleCurve, DROPLET_WAIST};
pub use metrics::{compare_invariants, default_dense_n, loglog_slope, ErrorRow, ErrorTable, LENGTH_MISMATCH_WARN};
pub use study::{run_study, step1_error, RefinementStudy, Rk4Study, Step1Study, Study, StudyKind};
pub use truth::ArclengthTruth;
