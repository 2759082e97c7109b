//! Real parabolic problems `u_t = a u_xx + β u + f`, `u(t, 0) = 0`, with the
//! dynamical condition `a u_x(t, 1) = ε u_t(t, 1) + δ u(t, 1) + g`.
//!
//! `ε ≤ 0` (dissipative) is solved with Crank-Nicolson Galerkin on linear
//! elements; `ε > 0` (reactive) with the H¹-Galerkin variant on Hermite cubics,
//! where `u_t(1)` is eliminated through the equation.

mod dissipative;
mod reactive;

pub use dissipative::{init_dissipative, DissipativeStepper};
pub use reactive::{init_reactive, ReactiveStepper};

use std::sync::Arc;

use thiserror::Error;

use crate::acoustics::{FieldFn, TimeFn};
use crate::fem1d::{Family, FemError};
use crate::schrodinger::{GridError, TimeGrid};

/// Sign class of `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParabolicMode {
    /// `ε ≤ 0`.
    Dissipative,
    /// `ε > 0`.
    Reactive,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParabolicError {
    #[error("{mode:?} solver needs the matching sign of ε, got ε={epsilon} at t={t}")]
    WrongSign {
        mode: ParabolicMode,
        t: f64,
        epsilon: f64,
    },
    #[error("ε changes sign on the time grid (unsupported)")]
    MixedSign,
    #[error("step matrix singular at step {step}: step-size condition violated ({source})")]
    StepSize { step: usize, source: FemError },
    #[error("{0:?} space required")]
    Family(Family),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Real coefficients. `beta_x` and `f_x` are only read by the reactive scheme.
#[derive(Clone)]
pub struct ParabolicCoeffs {
    pub a: TimeFn<f64>,
    pub beta: FieldFn<f64>,
    pub beta_x: FieldFn<f64>,
    pub f: FieldFn<f64>,
    pub f_x: FieldFn<f64>,
    pub epsilon: TimeFn<f64>,
    pub delta: TimeFn<f64>,
    pub g: TimeFn<f64>,
}

impl std::fmt::Debug for ParabolicCoeffs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParabolicCoeffs").finish_non_exhaustive()
    }
}

impl ParabolicCoeffs {
    /// `u_t = a u_xx` with `a u_x(1) = ε u_t(1)`, all other data zero.
    pub fn homogeneous(a: f64, epsilon: f64) -> Self {
        let zero_t: TimeFn<f64> = Arc::new(|_| 0.0);
        let zero_f: FieldFn<f64> = Arc::new(|_, _| 0.0);
        ParabolicCoeffs {
            a: Arc::new(move |_| a),
            beta: zero_f.clone(),
            beta_x: zero_f.clone(),
            f: zero_f.clone(),
            f_x: zero_f,
            epsilon: Arc::new(move |_| epsilon),
            delta: zero_t.clone(),
            g: zero_t,
        }
    }

    /// Mode implied by `ε` at the half-steps of `grid`.
    pub fn mode_on(&self, grid: &TimeGrid) -> Result<ParabolicMode, ParabolicError> {
        let mut modes = (1..=grid.steps()).map(|n| {
            if (self.epsilon)(grid.t_half(n)) > 0.0 {
                ParabolicMode::Reactive
            } else {
                ParabolicMode::Dissipative
            }
        });
        let Some(first) = modes.next() else {
            let e = (self.epsilon)(0.0);
            return Ok(if e > 0.0 {
                ParabolicMode::Reactive
            } else {
                ParabolicMode::Dissipative
            });
        };
        if modes.all(|m| m == first) {
            Ok(first)
        } else {
            Err(ParabolicError::MixedSign)
        }
    }

    pub(crate) fn require_mode(
        &self,
        grid: &TimeGrid,
        mode: ParabolicMode,
    ) -> Result<(), ParabolicError> {
        for n in 1..=grid.steps() {
            let t = grid.t_half(n);
            let epsilon = (self.epsilon)(t);
            let ok = match mode {
                ParabolicMode::Dissipative => epsilon <= 0.0,
                ParabolicMode::Reactive => epsilon > 0.0,
            };
            if !ok {
                return Err(ParabolicError::WrongSign { mode, t, epsilon });
            }
        }
        Ok(())
    }
}
