use std::fmt;
use std::sync::Arc;

use super::{AcousticsError, TimeFn};

/// Dimensionless depth `s(t)` with its first two derivatives.
#[derive(Clone)]
pub struct BottomProfile {
    name: String,
    s: TimeFn<f64>,
    s_dot: TimeFn<f64>,
    s_ddot: TimeFn<f64>,
    kinks: Vec<f64>,
}

impl fmt::Debug for BottomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BottomProfile")
            .field("name", &self.name)
            .field("kinks", &self.kinks)
            .finish_non_exhaustive()
    }
}

/// Distance from a kink under which an evaluation is rejected.
const KINK_TOL: f64 = 1e-12;

impl BottomProfile {
    pub fn new(
        name: impl Into<String>,
        s: impl Fn(f64) -> f64 + Send + Sync + 'static,
        s_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
        s_ddot: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BottomProfile {
            name: name.into(),
            s: Arc::new(s),
            s_dot: Arc::new(s_dot),
            s_ddot: Arc::new(s_ddot),
            kinks: Vec::new(),
        }
    }

    /// Declares points where `ṡ` does not exist.
    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn flat(depth: f64) -> Self {
        Self::new("flat", move |_| depth, |_| 0.0, |_| 0.0)
    }

    /// `s(t) = s0 + slope·t`.
    pub fn linear(s0: f64, slope: f64) -> Self {
        Self::new("linear", move |t| s0 + slope * t, move |_| slope, |_| 0.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    #[inline]
    pub fn s(&self, t: f64) -> f64 {
        (self.s)(t)
    }

    #[inline]
    pub fn s_dot(&self, t: f64) -> f64 {
        (self.s_dot)(t)
    }

    #[inline]
    pub fn s_ddot(&self, t: f64) -> f64 {
        (self.s_ddot)(t)
    }

    /// `δ = s·ṡ/2`.
    pub fn delta(&self, t: f64) -> f64 {
        0.5 * self.s(t) * self.s_dot(t)
    }

    /// `δ̇ = (ṡ² + s·s̈)/2`.
    pub fn delta_dot(&self, t: f64) -> f64 {
        let sd = self.s_dot(t);
        0.5 * (sd * sd + self.s(t) * self.s_ddot(t))
    }

    /// `ṡ(t) ≤ 0`.
    pub fn is_upsloping_at(&self, t: f64) -> bool {
        self.s_dot(t) <= 0.0
    }

    /// Upsloping at every sample time.
    pub fn is_upsloping_on(&self, times: impl IntoIterator<Item = f64>) -> bool {
        times.into_iter().all(|t| self.is_upsloping_at(t))
    }

    /// Rejects `t` if it sits on a declared kink.
    pub fn check_smooth(&self, t: f64) -> Result<(), AcousticsError> {
        match self.kinks.iter().find(|&&k| (t - k).abs() < KINK_TOL) {
            Some(_) => Err(AcousticsError::KinkEvaluation { t }),
            None => Ok(()),
        }
    }

    /// Checks `s > 0` at the sample times.
    pub fn check_positive(
        &self,
        times: impl IntoIterator<Item = f64>,
    ) -> Result<(), AcousticsError> {
        for t in times {
            let d = self.s(t);
            if !(d > 0.0) {
                return Err(AcousticsError::NonPositiveDepth { r: t, depth: d });
            }
        }
        Ok(())
    }
}
