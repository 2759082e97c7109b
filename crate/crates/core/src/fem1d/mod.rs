//! Meshes, finite-element spaces, assembly, banded solves and projections.

mod assembly;
mod banded;
mod field;
mod mesh;
mod projection;
mod quadrature;
mod scalar;
mod space;

pub use assembly::{
    assemble_bstar, assemble_form, assemble_load, assemble_mass, assemble_stiffness, Deriv,
};
pub use banded::{solve, BandedSystem, Pivoting};
pub use field::DofField;
pub use mesh::Mesh1D;
pub use projection::{elliptic_project, elliptic_project_star, l2_project};
pub use quadrature::QuadratureRule;
pub use scalar::{Scalar, C64, I};
pub use space::{BasisValue, Family, FeSpace};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("operation needs a {expected:?} space, got {found:?}")]
    WrongFamily { expected: Family, found: Family },
    #[error("singular matrix (zero pivot at row {index})")]
    Singular { index: usize },
    #[error("ill-conditioned matrix (pivot ratio {ratio:.3e})")]
    IllConditioned { ratio: f64 },
    #[error("solve called on an unfactored matrix")]
    NotFactored,
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
}
