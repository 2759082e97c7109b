//! Reproducible experiments: manufactured convergence studies, wedge TL runs,
//! the bottom-profile growth study and cross-model comparisons.

mod convergence;
mod growth;
mod manufactured;
mod parallel;
mod wedge;

pub use convergence::{
    dissipative_study, initial_norm, rate_table_study, reactive_steps, reactive_study, solve_strip,
    strip_study, ConvergenceLevel, ConvergenceReport, ErrorNorm, TABLE_LEVELS,
};
pub use growth::{growth_study, GrowthProfile, GrowthReport, ONSET_FACTOR};
pub use manufactured::{sample_points, BottomCase, ManufacturedProblem, ParabolicManufactured};
pub use parallel::{parallel_map, thread_cap, THREADS_ENV};
pub use wedge::{
    asa_wedge, compare_tl, null_mask, Slope, TlComparison, TlSample, WedgeModel, WedgeReport,
    WedgeRun, NULL_BAND_DB, NULL_PROMINENCE_DB,
};

use thiserror::Error;

use crate::acoustics::AcousticsError;
use crate::fem1d::FemError;
use crate::ifd_pform::PFormError;
use crate::parabolic::ParabolicError;
use crate::schrodinger::{GridError, SchrodingerError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Acoustics(#[from] AcousticsError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
    #[error(transparent)]
    PForm(#[from] PFormError),
    #[error(transparent)]
    Parabolic(#[from] ParabolicError),
}
