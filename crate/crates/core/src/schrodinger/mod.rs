//! Crank-Nicolson Galerkin steppers for the strip Schrödinger problem with
//! the dynamical Neumann and the Abrahamsson-Kreiss bottom conditions.

mod grid;
mod history;
mod stepper;

pub use grid::{GridError, TimeGrid};
pub(crate) use history::march;
pub use history::{mass_norm, FieldHistory, RunOptions, Termination};
pub use stepper::{
    init_ak, init_neumann, BoundaryMode, CnStepContext, InitialProjection, StepMatrices,
};

use thiserror::Error;

use crate::acoustics::AcousticsError;
use crate::fem1d::FemError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchrodingerError {
    #[error("step matrix singular at step {step}: step-size condition violated ({source})")]
    StepSize { step: usize, source: FemError },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Coefficients(#[from] AcousticsError),
    #[error(transparent)]
    Grid(#[from] GridError),
}
