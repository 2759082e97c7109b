use std::f64::consts::PI;
use std::sync::Arc;

use crate::acoustics::{wedge_coefficients, BottomProfile, CoefficientSet, FieldFn, TimeFn};
use crate::fem1d::{C64, I};
use crate::parabolic::ParabolicCoeffs;
use crate::schrodinger::BoundaryMode;

/// Bottom profiles of the strip convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BottomCase {
    /// `s = 0.7 − 0.3t`, upsloping.
    Linear,
    /// `s = 0.3 + 0.4t`, downsloping.
    Downslope,
    /// `s = 0.7 + 0.2 cos 4πt + 0.2 sin 4πt`.
    Oscillating,
}

impl BottomCase {
    pub fn from_index(i: u32) -> Option<Self> {
        match i {
            1 => Some(BottomCase::Linear),
            2 => Some(BottomCase::Downslope),
            3 => Some(BottomCase::Oscillating),
            _ => None,
        }
    }

    pub fn index(self) -> u32 {
        match self {
            BottomCase::Linear => 1,
            BottomCase::Downslope => 2,
            BottomCase::Oscillating => 3,
        }
    }

    pub fn profile(self) -> BottomProfile {
        match self {
            BottomCase::Linear => BottomProfile::linear(0.7, -0.3),
            BottomCase::Downslope => BottomProfile::linear(0.3, 0.4),
            BottomCase::Oscillating => {
                let w = 4.0 * PI;
                BottomProfile::new(
                    "oscillating",
                    move |t| 0.7 + 0.2 * (w * t).cos() + 0.2 * (w * t).sin(),
                    move |t| w * (0.2 * (w * t).cos() - 0.2 * (w * t).sin()),
                    move |t| -w * w * (0.2 * (w * t).cos() + 0.2 * (w * t).sin()),
                )
            }
        }
    }
}

/// Exact solution of the strip problem together with the data that makes it exact.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub mode: BoundaryMode,
    pub coeffs: CoefficientSet,
    pub t_end: f64,
    pub u: FieldFn<C64>,
    pub u_t: FieldFn<C64>,
    pub u_x: FieldFn<C64>,
    pub u_xx: FieldFn<C64>,
}

impl std::fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedProblem")
            .field("mode", &self.mode)
            .field("t_end", &self.t_end)
            .finish_non_exhaustive()
    }
}

impl ManufacturedProblem {
    /// `u = −x(x−1)³ + x sin t`, `β = xt + i(3x + t²)`, `T = 1`.
    pub fn strip(case: BottomCase, mode: BoundaryMode) -> Self {
        let base = wedge_coefficients(&case.profile(), None, Arc::new(|_| C64::new(0.0, 0.0)));
        let beta = |t: f64, x: f64| C64::new(x * t, 3.0 * x + t * t);
        let u = |t: f64, x: f64| C64::new(-x * (x - 1.0).powi(3) + t.sin() * x, 0.0);
        let u_t = |t: f64, x: f64| C64::new(x * t.cos(), 0.0);
        let u_x = |t: f64, x: f64| {
            C64::new(
                -(x - 1.0).powi(3) - 3.0 * x * (x - 1.0).powi(2) + t.sin(),
                0.0,
            )
        };
        let u_xx = |_: f64, x: f64| C64::new(-6.0 * (x - 1.0) * (2.0 * x - 1.0), 0.0);

        let a = base.a.clone();
        let f = move |t: f64, x: f64| u_t(t, x) - I * a(t) * u_xx(t, x) - I * beta(t, x) * u(t, x);
        let (mu, sb, gb) = (base.mu.clone(), base.s_bc.clone(), base.g_bc.clone());
        let f1 = move |t: f64| match mode {
            BoundaryMode::AbrahamssonKreiss => u_x(t, 1.0),
            BoundaryMode::NeumannDynamical => {
                u_x(t, 1.0) - mu(t) * (sb(t) * u_t(t, 1.0) + gb(t) * u(t, 1.0))
            }
        };
        ManufacturedProblem {
            mode,
            coeffs: base.with_beta(beta).with_forcing(f, f1),
            t_end: 1.0,
            u: Arc::new(u),
            u_t: Arc::new(u_t),
            u_x: Arc::new(u_x),
            u_xx: Arc::new(u_xx),
        }
    }

    /// `|u_t − i a u_xx − i β u − f|` at `(t, x)`.
    pub fn pde_residual(&self, t: f64, x: f64) -> f64 {
        let c = &self.coeffs;
        let f = c.f.as_ref().map_or(C64::new(0.0, 0.0), |f| f(t, x));
        ((self.u_t)(t, x)
            - I * (c.a)(t) * (self.u_xx)(t, x)
            - I * (c.beta)(t, x) * (self.u)(t, x)
            - f)
            .norm()
    }

    /// Residual of the bottom condition at `t`.
    pub fn boundary_residual(&self, t: f64) -> f64 {
        let c = &self.coeffs;
        let f1 = c.f1.as_ref().map_or(C64::new(0.0, 0.0), |f1| f1(t));
        let rhs = match self.mode {
            BoundaryMode::AbrahamssonKreiss => f1,
            BoundaryMode::NeumannDynamical => {
                (c.mu)(t) * ((c.s_bc)(t) * (self.u_t)(t, 1.0) + (c.g_bc)(t) * (self.u)(t, 1.0)) + f1
            }
        };
        ((self.u_x)(t, 1.0) - rhs).norm()
    }

    /// Largest PDE, bottom and surface residual over `points` in `[0, T] × [0, 1]`.
    pub fn max_residual(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(t, x)| {
                self.pde_residual(t, x)
                    .max(self.boundary_residual(t))
                    .max((self.u)(t, 0.0).norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Exact solution of a real parabolic problem with its data.
#[derive(Clone)]
pub struct ParabolicManufactured {
    pub coeffs: ParabolicCoeffs,
    pub t_end: f64,
    pub u: FieldFn<f64>,
    pub u_t: FieldFn<f64>,
    pub u_x: FieldFn<f64>,
    pub u_xx: FieldFn<f64>,
}

impl std::fmt::Debug for ParabolicManufactured {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParabolicManufactured")
            .field("t_end", &self.t_end)
            .finish_non_exhaustive()
    }
}

impl ParabolicManufactured {
    /// `u = −x(x−1)³ + x sin t` with `a = 1 + t/2`, `β = xt − 1`, `ε = −1 − t`, `δ = −1/2`.
    pub fn dissipative() -> Self {
        let a = |t: f64| 1.0 + 0.5 * t;
        let beta = |t: f64, x: f64| x * t - 1.0;
        let eps = |t: f64| -1.0 - t;
        let delta = -0.5;
        let u = |t: f64, x: f64| -x * (x - 1.0).powi(3) + t.sin() * x;
        let u_t = |t: f64, x: f64| x * t.cos();
        let u_x = |t: f64, x: f64| -(x - 1.0).powi(3) - 3.0 * x * (x - 1.0).powi(2) + t.sin();
        let u_xx = |_: f64, x: f64| -6.0 * (x - 1.0) * (2.0 * x - 1.0);
        Self::from_exact(
            Arc::new(a),
            Arc::new(beta),
            Arc::new(|t, _| t),
            Arc::new(eps),
            delta,
            u,
            u_t,
            u_x,
            u_xx,
            None,
        )
    }

    /// `u = x sin t + x³` with `a = 1 + t/4`, `β = x − t`, `ε = 1`, `δ = 1/2`.
    ///
    /// Cubic in `x`, so Hermite cubics only see the time error.
    pub fn reactive_cubic() -> Self {
        let a = |t: f64| 1.0 + 0.25 * t;
        let beta = |t: f64, x: f64| x - t;
        let u = |t: f64, x: f64| x * t.sin() + x.powi(3);
        let u_t = |t: f64, x: f64| x * t.cos();
        let u_x = |t: f64, x: f64| t.sin() + 3.0 * x * x;
        let u_xx = |_: f64, x: f64| 6.0 * x;
        let u_xxx: FieldFn<f64> = Arc::new(|_, _| 6.0);
        let u_tx: FieldFn<f64> = Arc::new(|t, _| t.cos());
        Self::from_exact(
            Arc::new(a),
            Arc::new(beta),
            Arc::new(|_, _| 1.0),
            Arc::new(|_| 1.0),
            0.5,
            u,
            u_t,
            u_x,
            u_xx,
            Some((u_tx, u_xxx)),
        )
    }

    /// `u = e^{−t} sin 2x + xt` with `a = 1`, `β = x`, `ε = 1`, `δ = 0.3`.
    pub fn reactive_transcendental() -> Self {
        let u = |t: f64, x: f64| (-t).exp() * (2.0 * x).sin() + x * t;
        let u_t = |t: f64, x: f64| -(-t).exp() * (2.0 * x).sin() + x;
        let u_x = |t: f64, x: f64| 2.0 * (-t).exp() * (2.0 * x).cos() + t;
        let u_xx = |t: f64, x: f64| -4.0 * (-t).exp() * (2.0 * x).sin();
        let u_xxx: FieldFn<f64> = Arc::new(|t, x| -8.0 * (-t).exp() * (2.0 * x).cos());
        let u_tx: FieldFn<f64> = Arc::new(|t, x| -2.0 * (-t).exp() * (2.0 * x).cos() + 1.0);
        Self::from_exact(
            Arc::new(|_| 1.0),
            Arc::new(|_, x| x),
            Arc::new(|_, _| 1.0),
            Arc::new(|_| 1.0),
            0.3,
            u,
            u_t,
            u_x,
            u_xx,
            Some((u_tx, u_xxx)),
        )
    }

    /// Derives `f` (and `f_x` when the mixed and third derivatives are given) and `g`
    /// from `u_t = a u_xx + β u + f`, `a u_x(1) = ε u_t(1) + δ u(1) + g`.
    #[allow(clippy::too_many_arguments)]
    fn from_exact(
        a: TimeFn<f64>,
        beta: FieldFn<f64>,
        beta_x: FieldFn<f64>,
        epsilon: TimeFn<f64>,
        delta: f64,
        u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        u_t: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        u_x: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        u_xx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        higher: Option<(FieldFn<f64>, FieldFn<f64>)>,
    ) -> Self {
        let (u, u_t, u_x, u_xx): (FieldFn<f64>, FieldFn<f64>, FieldFn<f64>, FieldFn<f64>) =
            (Arc::new(u), Arc::new(u_t), Arc::new(u_x), Arc::new(u_xx));
        let f: FieldFn<f64> = {
            let (a, beta, u, u_t, u_xx) = (
                a.clone(),
                beta.clone(),
                u.clone(),
                u_t.clone(),
                u_xx.clone(),
            );
            Arc::new(move |t, x| u_t(t, x) - a(t) * u_xx(t, x) - beta(t, x) * u(t, x))
        };
        let f_x: FieldFn<f64> = match higher {
            Some((u_tx, u_xxx)) => {
                let (a, beta, beta_x, u, u_x) = (
                    a.clone(),
                    beta.clone(),
                    beta_x.clone(),
                    u.clone(),
                    u_x.clone(),
                );
                Arc::new(move |t, x| {
                    u_tx(t, x)
                        - a(t) * u_xxx(t, x)
                        - beta_x(t, x) * u(t, x)
                        - beta(t, x) * u_x(t, x)
                })
            }
            None => Arc::new(|_, _| f64::NAN),
        };
        let g: TimeFn<f64> = {
            let (a, eps, u, u_t, u_x) = (
                a.clone(),
                epsilon.clone(),
                u.clone(),
                u_t.clone(),
                u_x.clone(),
            );
            Arc::new(move |t| a(t) * u_x(t, 1.0) - eps(t) * u_t(t, 1.0) - delta * u(t, 1.0))
        };
        ParabolicManufactured {
            coeffs: ParabolicCoeffs {
                a,
                beta,
                beta_x,
                f,
                f_x,
                epsilon,
                delta: Arc::new(move |_| delta),
                g,
            },
            t_end: 1.0,
            u,
            u_t,
            u_x,
            u_xx,
        }
    }

    pub fn pde_residual(&self, t: f64, x: f64) -> f64 {
        let c = &self.coeffs;
        ((self.u_t)(t, x)
            - (c.a)(t) * (self.u_xx)(t, x)
            - (c.beta)(t, x) * (self.u)(t, x)
            - (c.f)(t, x))
        .abs()
    }

    pub fn boundary_residual(&self, t: f64) -> f64 {
        let c = &self.coeffs;
        ((c.a)(t) * (self.u_x)(t, 1.0)
            - (c.epsilon)(t) * (self.u_t)(t, 1.0)
            - (c.delta)(t) * (self.u)(t, 1.0)
            - (c.g)(t))
        .abs()
    }

    pub fn max_residual(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(t, x)| {
                self.pde_residual(t, x)
                    .max(self.boundary_residual(t))
                    .max((self.u)(t, 0.0).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// `n` points of the additive recurrence with the plastic-number ratios, scaled to
/// `[0, t_end] × [0, 1]`. Low-discrepancy and reproducible without an RNG.
pub fn sample_points(n: usize, t_end: f64) -> Vec<(f64, f64)> {
    let g = 1.324_717_957_244_746_f64;
    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
    (1..=n)
        .map(|i| {
            let i = i as f64;
            (t_end * (0.5 + a1 * i).fract(), (0.5 + a2 * i).fract())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_forcing_makes_solution_exact() {
        let pts = sample_points(1000, 1.0);
        for case in [
            BottomCase::Linear,
            BottomCase::Downslope,
            BottomCase::Oscillating,
        ] {
            for mode in [
                BoundaryMode::NeumannDynamical,
                BoundaryMode::AbrahamssonKreiss,
            ] {
                let p = ManufacturedProblem::strip(case, mode);
                assert!(p.max_residual(&pts) <= 1e-10, "{case:?} {mode:?}");
            }
        }
    }

    #[test]
    fn parabolic_forcing_makes_solution_exact() {
        let pts = sample_points(1000, 1.0);
        for p in [
            ParabolicManufactured::dissipative(),
            ParabolicManufactured::reactive_cubic(),
            ParabolicManufactured::reactive_transcendental(),
        ] {
            assert!(p.max_residual(&pts) <= 1e-10);
        }
    }

    #[test]
    fn reactive_fx_matches_finite_difference_of_f() {
        let p = ParabolicManufactured::reactive_transcendental();
        let (f, fx) = (&p.coeffs.f, &p.coeffs.f_x);
        let d = 1e-5;
        for &(t, x) in &sample_points(50, 1.0) {
            let fd = (f(t, x + d) - f(t, x - d)) / (2.0 * d);
            assert!((fd - fx(t, x)).abs() < 1e-7);
        }
    }

    #[test]
    fn wrong_forcing_is_caught() {
        let mut p = ManufacturedProblem::strip(BottomCase::Linear, BoundaryMode::NeumannDynamical);
        p.coeffs.f1 = Some(Arc::new(|t: f64| C64::new(t.sin(), 0.0)));
        assert!(p.max_residual(&sample_points(100, 1.0)) > 1e-3);
    }

    #[test]
    fn samples_fill_the_box() {
        let pts = sample_points(1000, 2.0);
        assert!(pts
            .iter()
            .all(|&(t, x)| (0.0..2.0).contains(&t) && (0.0..1.0).contains(&x)));
        let low = pts.iter().filter(|p| p.0 < 1.0 && p.1 < 0.5).count();
        assert!((200..300).contains(&low));
    }
}
