//! Galerkin finite elements with Crank-Nicolson time stepping for
//! one-dimensional problems whose boundary condition at `x = 1` contains the
//! time derivative of the solution.
//!
//! The guide in `book/` walks through each module; its code listings are
//! compiled as doc-tests of this crate.
//!
//! ```
//! use paraxfem::harness::{strip_study, BottomCase};
//! use paraxfem::schrodinger::BoundaryMode;
//!
//! let r = strip_study(BottomCase::Linear, BoundaryMode::AbrahamssonKreiss, &[16, 32], 1);
//! assert!(r.levels[0].rate.unwrap() > 1.9);
//! ```

// `!(x > tol)` also rejects NaN; index loops follow the matrix notation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acoustics;
pub mod cli;
pub mod fem1d;
pub mod harness;
pub mod ifd_pform;
pub mod parabolic;
pub mod schrodinger;

/// Chapters of the guide, checked by `cargo test --doc`.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/elements.md")]
    pub mod elements {}
    #[doc = include_str!("../../../book/src/strip.md")]
    pub mod strip {}
    #[doc = include_str!("../../../book/src/parabolic.md")]
    pub mod parabolic {}
    #[doc = include_str!("../../../book/src/wedge.md")]
    pub mod wedge {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
