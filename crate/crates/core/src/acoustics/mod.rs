//! Bottom profiles, the wedge-to-strip transform and transmission loss.

mod coefficients;
mod profile;
mod wedge;

pub use coefficients::{wedge_coefficients, CoefficientSet};
pub use profile::BottomProfile;
pub use wedge::{
    transform_initial, transform_initial_deriv, transmission_loss, Bathymetry, FieldRecovery,
    WedgeEnvironment,
};

use std::sync::Arc;

use thiserror::Error;

/// A function of the range variable `t`.
pub type TimeFn<T> = Arc<dyn Fn(f64) -> T + Send + Sync>;
/// A function of `(t, x)`.
pub type FieldFn<T> = Arc<dyn Fn(f64, f64) -> T + Send + Sync>;

/// Transmission loss reported where `|ψ| = 0`.
pub const TL_CLIP_DB: f64 = 400.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcousticsError {
    #[error("coefficients evaluated at t={t}, a kink of the bottom profile")]
    KinkEvaluation { t: f64 },
    #[error("depth z={z} m lies outside the water column [0, {depth}] at r={r} m")]
    OutsideWaterColumn { r: f64, z: f64, depth: f64 },
    #[error("bottom depth must be positive, got {depth} at r={r}")]
    NonPositiveDepth { r: f64, depth: f64 },
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
}
