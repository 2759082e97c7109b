use super::PFormError;
use crate::acoustics::{BottomProfile, FieldFn, TimeFn};
use crate::fem1d::{C64, I};

/// Default positive shift in `σ = 2(1+ṡ²)/ṡ² + ε_σ`.
pub const DEFAULT_EPS_SIGMA: f64 = 0.1;

/// Sign of `ṡ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeDirection {
    /// `ṡ < 0`, `ζ ≡ 0`.
    Up,
    /// `ṡ > 0`, `ζ = (i/2)(σ−1) ṡ s x²`.
    Down,
}

/// Phase `ζ`, `σ` and the coefficients of the transformed p-problem.
///
/// With `q = (σ − 1) ṡ s`: `ζ = (i/2) q x²`, `A = 2s²`, `B = x σ ṡ/s`,
/// `G = i[q̇/2 − (ṡ/s) q − q²/(2s²)] x² + q/(2s²) + iγ`,
/// `R1 = ṡ s/(1+ṡ²)`, `R2 = (g − (i/2) q̇) R1 + i q`.
#[derive(Clone)]
pub struct ZetaCoefficients {
    profile: BottomProfile,
    g: TimeFn<C64>,
    gamma: Option<(FieldFn<C64>, FieldFn<C64>)>,
    eps_sigma: f64,
}

impl std::fmt::Debug for ZetaCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZetaCoefficients")
            .field("profile", &self.profile)
            .field("eps_sigma", &self.eps_sigma)
            .finish_non_exhaustive()
    }
}

impl ZetaCoefficients {
    pub fn new(profile: BottomProfile, g: TimeFn<C64>, eps_sigma: f64) -> Result<Self, PFormError> {
        if !(eps_sigma > 0.0) {
            return Err(PFormError::EpsSigma(eps_sigma));
        }
        Ok(ZetaCoefficients {
            profile,
            g,
            gamma: None,
            eps_sigma,
        })
    }

    /// Adds `γ(t, y)` and `γ_y(t, y)` in the unmapped depth.
    pub fn with_gamma(mut self, gamma: FieldFn<C64>, gamma_y: FieldFn<C64>) -> Self {
        self.gamma = Some((gamma, gamma_y));
        self
    }

    pub fn profile(&self) -> &BottomProfile {
        &self.profile
    }

    pub fn eps_sigma(&self) -> f64 {
        self.eps_sigma
    }

    pub fn direction(&self, t: f64) -> Result<SlopeDirection, PFormError> {
        let sd = self.profile.s_dot(t);
        if sd > 0.0 {
            Ok(SlopeDirection::Down)
        } else if sd < 0.0 {
            Ok(SlopeDirection::Up)
        } else {
            Err(PFormError::FlatBottom { t })
        }
    }

    fn downslope(&self, t: f64) -> bool {
        self.profile.s_dot(t) > 0.0
    }

    pub fn sigma(&self, t: f64) -> f64 {
        if self.downslope(t) {
            let sd2 = self.profile.s_dot(t).powi(2);
            2.0 * (1.0 + sd2) / sd2 + self.eps_sigma
        } else {
            1.0
        }
    }

    pub fn sigma_dot(&self, t: f64) -> f64 {
        if self.downslope(t) {
            -4.0 * self.profile.s_ddot(t) / self.profile.s_dot(t).powi(3)
        } else {
            0.0
        }
    }

    fn q(&self, t: f64) -> f64 {
        (self.sigma(t) - 1.0) * self.profile.s_dot(t) * self.profile.s(t)
    }

    fn q_dot(&self, t: f64) -> f64 {
        let p = &self.profile;
        let (s, sd, sdd) = (p.s(t), p.s_dot(t), p.s_ddot(t));
        self.sigma_dot(t) * sd * s + (self.sigma(t) - 1.0) * (sdd * s + sd * sd)
    }

    pub fn zeta(&self, t: f64, x: f64) -> C64 {
        0.5 * I * self.q(t) * x * x
    }

    pub fn zeta_x(&self, t: f64, x: f64) -> C64 {
        I * self.q(t) * x
    }

    pub fn zeta_xx(&self, t: f64) -> C64 {
        I * self.q(t)
    }

    pub fn zeta_t(&self, t: f64, x: f64) -> C64 {
        0.5 * I * self.q_dot(t) * x * x
    }

    /// `A = 2s²`.
    pub fn a(&self, t: f64) -> f64 {
        2.0 * self.profile.s(t).powi(2)
    }

    /// `B(t, x) = x σ ṡ/s`.
    pub fn b(&self, t: f64, x: f64) -> f64 {
        x * self.b_x(t)
    }

    /// `B_x = B(t, 1)`.
    pub fn b_x(&self, t: f64) -> f64 {
        self.sigma(t) * self.profile.s_dot(t) / self.profile.s(t)
    }

    fn gamma_at(&self, t: f64, x: f64) -> (C64, C64) {
        match &self.gamma {
            Some((gm, gy)) => {
                let s = self.profile.s(t);
                (gm(t, x * s), gy(t, x * s) * s)
            }
            None => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        }
    }

    fn quadratic_part(&self, t: f64) -> C64 {
        let (s, sd) = (self.profile.s(t), self.profile.s_dot(t));
        let q = self.q(t);
        I * (0.5 * self.q_dot(t) - sd / s * q - q * q / (2.0 * s * s))
    }

    pub fn g_coef(&self, t: f64, x: f64) -> C64 {
        let s = self.profile.s(t);
        self.quadratic_part(t) * x * x + self.q(t) / (2.0 * s * s) + I * self.gamma_at(t, x).0
    }

    pub fn g_x(&self, t: f64, x: f64) -> C64 {
        2.0 * self.quadratic_part(t) * x + I * self.gamma_at(t, x).1
    }

    pub fn r1(&self, t: f64) -> f64 {
        let (s, sd) = (self.profile.s(t), self.profile.s_dot(t));
        sd * s / (1.0 + sd * sd)
    }

    pub fn r2(&self, t: f64) -> C64 {
        ((self.g)(t) - 0.5 * I * self.q_dot(t)) * self.r1(t) + I * self.q(t)
    }

    /// `1 − R1 B(t, 1)`.
    pub fn boundary_factor(&self, t: f64) -> f64 {
        1.0 - self.r1(t) * self.b_x(t)
    }

    /// `c1 = (1 − R1 B(t,1))/R1`, multiplying `p(1)`.
    pub fn c1(&self, t: f64) -> f64 {
        self.boundary_factor(t) / self.r1(t)
    }

    /// `c2 = (R1 G(t,1) + R2)/R1`, multiplying `−θ(1)`.
    pub fn c2(&self, t: f64) -> C64 {
        let r1 = self.r1(t);
        (r1 * self.g_coef(t, 1.0) + self.r2(t)) / r1
    }

    /// `1/R1 − B(t,1)/2`, negative on downsloping bottoms.
    pub fn stability_margin(&self, t: f64) -> f64 {
        1.0 / self.r1(t) - 0.5 * self.b_x(t)
    }

    /// `g(t)`.
    pub fn g(&self, t: f64) -> C64 {
        (self.g)(t)
    }
}

/// Constant `g` for tests.
#[cfg(test)]
pub(crate) fn constant_g(g: C64) -> TimeFn<C64> {
    std::sync::Arc::new(move |_| g)
}
