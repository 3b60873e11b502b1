//! Static reparametrization of smooth periodic planar curves under the
//! equidistribution rule.
//!
//! The pipeline has three stages:
//!
//! 1. [`invariants::extract`] computes the Fourier coefficients of the
//!    arclength parametrization of the input curve (a Type-1 NUFFT of the
//!    curvature, followed by spectral integration of `θ_s = κ`).
//! 2. [`evolution::evolve`] deforms the unit circle into the open curve whose
//!    curvature is the normalized monitor function, carrying the local spacing
//!    `s_α` with the tangential velocity that keeps `s_α κ` constant. At `t = 1`
//!    the spacing equidistributes the monitor.
//! 3. [`resample::refine`] evaluates the invariants at the arclength targets
//!    generated by the new spacing.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` aliases below name the double-precision instantiations that the
//! file formats and the command-line driver use.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod geometry;
pub mod invariants;
pub mod io;
pub mod monitor;
pub mod nufft;
pub mod resample;
pub mod scalar;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

pub type FourierSeriesF64 = spectral::FourierSeries<f64>;
pub type SemiPeriodicFieldF64 = spectral::SemiPeriodicField<f64>;
pub type NufftPlanF64 = nufft::NufftPlan<f64>;
pub type PlanarCurveSamplesF64 = geometry::PlanarCurveSamples<f64>;
pub type CurveGeometryF64 = geometry::CurveGeometry<f64>;
pub type MonitorF64 = monitor::Monitor<f64>;
pub type NormalizedMonitorF64 = monitor::NormalizedMonitor<f64>;
pub type ArclengthInvariantsF64 = invariants::ArclengthInvariants<f64>;
pub type SpacingStateF64 = evolution::SpacingState<f64>;
pub type EvolutionFieldsF64 = evolution::EvolutionFields<f64>;
pub type RefinedCurveF64 = resample::RefinedCurve<f64>;
pub type ExampleCurveF64 = validation::ExampleCurve<f64>;
