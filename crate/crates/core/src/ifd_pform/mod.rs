//! Bottom condition with `w_t` replaced through the equation, solved for
//! `p = s·w_y` (after a stabilising phase `ζ`) on the strip.
//!
//! The unknown `p` has a natural condition at the surface, so it lives in the
//! unpinned linear space. `θ_h = ∫₀ˣ p_h` is carried as extra nodal unknowns
//! tied to `p` by exact trapezoid constraints, which keeps every coupling
//! (the boundary value `θ_h(1)` and the volume term `(G_x θ_h, φ)`) inside a
//! narrow band.

mod stepper;
mod zeta;

pub use stepper::{build_p_initial, recover_w, CumulativeIntegral, PStepContext, StabilityMonitor};
pub use zeta::{SlopeDirection, ZetaCoefficients, DEFAULT_EPS_SIGMA};

use thiserror::Error;

use crate::fem1d::FemError;
use crate::schrodinger::GridError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PFormError {
    #[error("bottom is flat at t={t} (ṡ = 0); the p-formulation needs a strictly monotone bottom")]
    FlatBottom { t: f64 },
    #[error("bottom slope changes sign within step {step}")]
    NonMonotone { step: usize },
    #[error("1 − R1·B(t,1) = {value:.3e} at t={t} is too close to zero")]
    DegenerateBoundary { t: f64, value: f64 },
    #[error("stability margin 1/R1 − B(t,1)/2 = {value:.3e} ≥ 0 at t={t} on a downsloping bottom")]
    SignInvariant { t: f64, value: f64 },
    #[error("ε_σ must be positive, got {0}")]
    EpsSigma(f64),
    #[error("p-formulation needs the unpinned linear space")]
    Space,
    #[error("step matrix singular at step {step}: step-size condition violated ({source})")]
    StepSize { step: usize, source: FemError },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Grid(#[from] GridError),
}
