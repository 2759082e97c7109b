use std::fmt;
use std::sync::Arc;

use super::{AcousticsError, BottomProfile, FieldFn, TimeFn};
use crate::fem1d::{C64, I};

/// Coefficients of the strip problem
/// `u_t = i a u_xx + i β u + f` on `0 < x < 1`, `u(t, 0) = 0`, with the bottom condition
/// `u_x(t, 1) = μ [S u_t(t, 1) + G u(t, 1)] + f1`.
#[derive(Clone)]
pub struct CoefficientSet {
    pub a: TimeFn<f64>,
    pub beta: FieldFn<C64>,
    pub mu: TimeFn<f64>,
    /// `S`, multiplying `u_t(t, 1)` in the bottom condition.
    pub s_bc: TimeFn<f64>,
    /// `G`, multiplying `u(t, 1)` in the bottom condition.
    pub g_bc: TimeFn<C64>,
    pub delta: TimeFn<f64>,
    pub g: TimeFn<C64>,
    pub f: Option<FieldFn<C64>>,
    pub f1: Option<TimeFn<C64>>,
    /// Times where the coefficients must not be evaluated.
    pub kinks: Vec<f64>,
}

impl fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSet")
            .field("forced", &self.f.is_some())
            .field("boundary_forced", &self.f1.is_some())
            .field("kinks", &self.kinks)
            .finish_non_exhaustive()
    }
}

impl CoefficientSet {
    pub fn check_time(&self, t: f64) -> Result<(), AcousticsError> {
        match self.kinks.iter().find(|&&k| (t - k).abs() < 1e-12) {
            Some(_) => Err(AcousticsError::KinkEvaluation { t }),
            None => Ok(()),
        }
    }

    /// Same set with `β` replaced.
    pub fn with_beta(mut self, beta: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        self.beta = Arc::new(beta);
        self
    }

    pub fn with_forcing(
        mut self,
        f: impl Fn(f64, f64) -> C64 + Send + Sync + 'static,
        f1: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        self.f = Some(Arc::new(f));
        self.f1 = Some(Arc::new(f1));
        self
    }
}

/// Strip coefficients for a bottom profile.
///
/// `gamma(t, y)` is the index-of-refraction term in the unmapped depth `y`;
/// `g(t)` is the dimensionless bottom coefficient.
pub fn wedge_coefficients(
    profile: &BottomProfile,
    gamma: Option<FieldFn<C64>>,
    g: TimeFn<C64>,
) -> CoefficientSet {
    let p = Arc::new(profile.clone());

    let q = p.clone();
    let a: TimeFn<f64> = Arc::new(move |t| {
        let s = q.s(t);
        0.5 / (s * s)
    });

    let q = p.clone();
    let beta: FieldFn<C64> = Arc::new(move |t, x| {
        let s = q.s(t);
        let gm = gamma.as_ref().map_or(C64::new(0.0, 0.0), |gm| gm(t, x * s));
        let re = gm.re - 0.5 * q.s_ddot(t) * s * x * x;
        let im = gm.im + q.s_dot(t) / (2.0 * s);
        C64::new(re, im)
    });

    let q = p.clone();
    let mu: TimeFn<f64> = Arc::new(move |t| q.s_dot(t) / q.s(t));

    let q = p.clone();
    let s_bc: TimeFn<f64> = Arc::new(move |t| {
        let (s, sd) = (q.s(t), q.s_dot(t));
        s * s / (1.0 + sd * sd)
    });

    let q = p.clone();
    let gg = g.clone();
    let g_bc: TimeFn<C64> = Arc::new(move |t| {
        let (s, sd) = (q.s(t), q.s_dot(t));
        let sb = s * s / (1.0 + sd * sd);
        gg(t) * sb + I * (sb * q.delta_dot(t) - s * s)
    });

    let q = p.clone();
    let delta: TimeFn<f64> = Arc::new(move |t| q.delta(t));

    CoefficientSet {
        a,
        beta,
        mu,
        s_bc,
        g_bc,
        delta,
        g,
        f: None,
        f1: None,
        kinks: profile.kinks().to_vec(),
    }
}
