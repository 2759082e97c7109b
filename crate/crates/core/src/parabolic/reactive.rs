use std::sync::Arc;

use super::{ParabolicCoeffs, ParabolicError, ParabolicMode};
use crate::fem1d::{
    assemble_bstar, assemble_form, assemble_load, assemble_mass, assemble_stiffness,
    elliptic_project_star, BandedSystem, Deriv, DofField, Family, FeSpace, Pivoting,
    QuadratureRule,
};
use crate::schrodinger::{march, mass_norm, FieldHistory, RunOptions, TimeGrid};

/// H¹-Galerkin Crank-Nicolson for `ε > 0` on Hermite cubics.
///
/// With `𝒦 = (φ_j', φ_l')` the step reads `(𝒦 − k/2 L) U^n = (𝒦 + k/2 L) U^{n−1} + k b`,
/// where
/// `L = (a/ε) e₁e₁ᵀ − (δ/ε + β(1)) e₁e_vᵀ − a 𝒦* + 𝒦_β`,
/// `e₁` / `e_v` pick the slope / value at `x = 1`, `𝒦* = (φ_j'', φ_l'')`,
/// `𝒦_β = ((β φ_j)', φ_l')`, and
/// `b = −(g/ε + f(1)) e₁ + f(0) e₀ + ((f_x, φ_l'))` with `e₀` the slope at `x = 0`.
pub struct ReactiveStepper {
    space: Arc<FeSpace>,
    coeffs: ParabolicCoeffs,
    grid: TimeGrid,
    stiffness: BandedSystem<f64>,
    bstar: BandedSystem<f64>,
    mass: BandedSystem<f64>,
    rule: QuadratureRule,
}

impl ReactiveStepper {
    pub fn new(
        space: Arc<FeSpace>,
        coeffs: ParabolicCoeffs,
        grid: TimeGrid,
    ) -> Result<Self, ParabolicError> {
        if space.family() != Family::HermiteCubic {
            return Err(ParabolicError::Family(Family::HermiteCubic));
        }
        coeffs.require_mode(&grid, ParabolicMode::Reactive)?;
        let stiffness = assemble_stiffness(&space);
        let bstar = assemble_bstar(&space)?;
        let mass = assemble_mass(&space, |_| 1.0);
        let rule = space.default_quadrature();
        Ok(ReactiveStepper {
            space,
            coeffs,
            grid,
            stiffness,
            bstar,
            mass,
            rule,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    /// `(left, right, load)` of step `n`; the load is already scaled by `k`.
    pub fn step_matrices(&self, n: usize) -> (BandedSystem<f64>, BandedSystem<f64>, Vec<f64>) {
        let (t, k) = (self.grid.t_half(n), self.grid.k(n));
        let c = &self.coeffs;
        let (a, eps) = ((c.a)(t), (c.epsilon)(t));
        let slope1 = self.space.last_slope_dof().expect("hermite space");
        let slope0 = self.space.first_slope_dof().expect("hermite space");
        let value1 = self.space.last_value_dof();

        let mut op = assemble_form(&self.space, &self.rule, Deriv::Value, Deriv::First, |x| {
            (c.beta_x)(t, x)
        });
        op.add_scaled(
            1.0,
            &assemble_form(&self.space, &self.rule, Deriv::First, Deriv::First, |x| {
                (c.beta)(t, x)
            }),
        );
        op.add_scaled(-a, &self.bstar);
        op.add(slope1, slope1, a / eps);
        op.add(slope1, value1, -((c.delta)(t) / eps + (c.beta)(t, 1.0)));

        let mut left = self.stiffness.clone();
        left.add_scaled(-0.5 * k, &op);
        let mut right = self.stiffness.clone();
        right.add_scaled(0.5 * k, &op);

        let mut load = assemble_load(&self.space, &self.rule, Deriv::First, |x| k * (c.f_x)(t, x));
        load[slope1] -= k * ((c.g)(t) / eps + (c.f)(t, 1.0));
        load[slope0] += k * (c.f)(t, 0.0);
        (left, right, load)
    }

    pub fn step(&self, prev: &DofField<f64>, n: usize) -> Result<DofField<f64>, ParabolicError> {
        let (mut left, right, load) = self.step_matrices(n);
        let mut rhs = right.matvec(prev.coeffs());
        for (r, l) in rhs.iter_mut().zip(&load) {
            *r += l;
        }
        left.factorize(Pivoting::Partial)
            .map_err(|source| ParabolicError::StepSize { step: n, source })?;
        Ok(DofField::new(
            self.space.clone(),
            left.solve_factored(&rhs)?,
        )?)
    }

    pub fn run(
        &self,
        u0: DofField<f64>,
        opts: RunOptions,
    ) -> Result<FieldHistory<f64>, ParabolicError> {
        march(
            u0,
            self.grid.times(),
            opts,
            |u| mass_norm(&self.mass, u),
            |u, n| self.step(u, n),
            |_, _, _| {},
        )
    }
}

/// `U⁰ = R*_h u0`.
pub fn init_reactive(
    space: &Arc<FeSpace>,
    du0: impl Fn(f64) -> f64,
    d2u0: impl Fn(f64) -> f64,
) -> Result<DofField<f64>, ParabolicError> {
    Ok(elliptic_project_star(space, du0, d2u0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::QuadratureRule;

    /// `u = x sin t + x³`, `a = 1 + t/4`, `β = x − t`, `ε = 1`, `δ = 1/2`.
    fn manufactured() -> ParabolicCoeffs {
        let a = |t: f64| 1.0 + 0.25 * t;
        let beta = |t: f64, x: f64| x - t;
        let u = |t: f64, x: f64| x * t.sin() + x.powi(3);
        let ux = |t: f64, x: f64| t.sin() + 3.0 * x * x;
        ParabolicCoeffs {
            a: Arc::new(a),
            beta: Arc::new(beta),
            beta_x: Arc::new(|_, _| 1.0),
            f: Arc::new(move |t, x| x * t.cos() - 6.0 * a(t) * x - beta(t, x) * u(t, x)),
            f_x: Arc::new(move |t, x| t.cos() - 6.0 * a(t) - u(t, x) - beta(t, x) * ux(t, x)),
            epsilon: Arc::new(|_| 1.0),
            delta: Arc::new(|_| 0.5),
            g: Arc::new(move |t| a(t) * ux(t, 1.0) - t.cos() - 0.5 * u(t, 1.0)),
        }
    }

    fn solve(n: usize, steps: usize) -> DofField<f64> {
        let space = FeSpace::uniform(Family::HermiteCubic, n).unwrap();
        let st = ReactiveStepper::new(
            space.clone(),
            manufactured(),
            TimeGrid::uniform(1.0, steps).unwrap(),
        )
        .unwrap();
        let u0 = init_reactive(&space, |x| 3.0 * x * x, |x| 6.0 * x).unwrap();
        st.run(u0, RunOptions::default()).unwrap().last
    }

    #[test]
    fn manufactured_h1_rate() {
        let du = |x: f64| 1f64.sin() + 3.0 * x * x;
        let e: Vec<f64> = [(4, 8), (16, 64), (64, 512)]
            .iter()
            .map(|&(n, steps)| solve(n, steps).h1_error(du))
            .collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).ln() / 4f64.ln() >= 2.8, "{e:?}");
        }
    }

    /// Non-polynomial `u = e^{−t} sin 2x + xt`, so the spatial error is not zero.
    #[test]
    fn transcendental_h1_rate() {
        let u = |t: f64, x: f64| (-t).exp() * (2.0 * x).sin() + x * t;
        let ux = |t: f64, x: f64| 2.0 * (-t).exp() * (2.0 * x).cos() + t;
        let uxx = |t: f64, x: f64| -4.0 * (-t).exp() * (2.0 * x).sin();
        let uxxx = |t: f64, x: f64| -8.0 * (-t).exp() * (2.0 * x).cos();
        let ut = |t: f64, x: f64| -(-t).exp() * (2.0 * x).sin() + x;
        let utx = |t: f64, x: f64| -2.0 * (-t).exp() * (2.0 * x).cos() + 1.0;
        let c = ParabolicCoeffs {
            a: Arc::new(|_| 1.0),
            beta: Arc::new(|_, x| x),
            beta_x: Arc::new(|_, _| 1.0),
            f: Arc::new(move |t, x| ut(t, x) - uxx(t, x) - x * u(t, x)),
            f_x: Arc::new(move |t, x| utx(t, x) - uxxx(t, x) - u(t, x) - x * ux(t, x)),
            epsilon: Arc::new(|_| 1.0),
            delta: Arc::new(|_| 0.3),
            g: Arc::new(move |t| ux(t, 1.0) - ut(t, 1.0) - 0.3 * u(t, 1.0)),
        };
        let e: Vec<f64> = [(8, 23), (16, 64), (32, 181)]
            .iter()
            .map(|&(n, steps)| {
                let space = FeSpace::uniform(Family::HermiteCubic, n).unwrap();
                let st = ReactiveStepper::new(
                    space.clone(),
                    c.clone(),
                    TimeGrid::uniform(1.0, steps).unwrap(),
                )
                .unwrap();
                let u0 = init_reactive(
                    &space,
                    |x| 2.0 * (2.0 * x).cos(),
                    |x| -4.0 * (2.0 * x).sin(),
                )
                .unwrap();
                st.run(u0, RunOptions::default())
                    .unwrap()
                    .last
                    .h1_error(|x| ux(1.0, x))
            })
            .collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).log2() > 2.8, "{e:?}");
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let space = FeSpace::uniform(Family::HermiteCubic, 6).unwrap();
        let st = ReactiveStepper::new(
            space.clone(),
            ParabolicCoeffs::homogeneous(1.0, 2.0),
            TimeGrid::uniform(1.0, 5).unwrap(),
        )
        .unwrap();
        let h = st
            .run(DofField::zeros(space), RunOptions::default())
            .unwrap();
        assert!(h.last.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn initial_field_satisfies_boundary_identity() {
        let v = |x: f64| (1.5 * x).sin() + x * x * x;
        let dv = |x: f64| 1.5 * (1.5 * x).cos() + 3.0 * x * x;
        let d2v = |x: f64| -2.25 * (1.5 * x).sin() + 6.0 * x;
        let space = FeSpace::uniform(Family::HermiteCubic, 7).unwrap();
        let r = init_reactive(&space, dv, d2v).unwrap();
        let (r1, dr1) = r.boundary_eval();
        let q = QuadratureRule::gauss_legendre(12);
        let b: f64 = (0..7)
            .map(|e| {
                let (xa, xb) = space.mesh().element(e);
                q.integrate(xa, xb, |x| (r.eval_deriv(x) - dv(x)) * 3.0 * x * x)
            })
            .sum();
        assert!((dr1 - (dv(1.0) + r1 - v(1.0) - b / 6.0)).abs() < 1e-11);
    }

    #[test]
    fn rejects_dissipative_sign_and_linear() {
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        let her = FeSpace::uniform(Family::HermiteCubic, 4).unwrap();
        let r = ReactiveStepper::new(her, ParabolicCoeffs::homogeneous(1.0, -0.5), grid.clone());
        assert!(matches!(r, Err(ParabolicError::WrongSign { .. })));
        let lin = FeSpace::uniform(Family::LagrangeLinear, 4).unwrap();
        let r = ReactiveStepper::new(lin, ParabolicCoeffs::homogeneous(1.0, 0.5), grid);
        assert!(matches!(r, Err(ParabolicError::Family(_))));
    }

    #[test]
    fn mixed_sign_is_reported() {
        let mut c = ParabolicCoeffs::homogeneous(1.0, 1.0);
        c.epsilon = Arc::new(|t| t - 0.5);
        assert_eq!(
            c.mode_on(&TimeGrid::uniform(1.0, 4).unwrap()),
            Err(ParabolicError::MixedSign)
        );
    }
}
