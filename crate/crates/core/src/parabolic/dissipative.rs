use std::sync::Arc;

use super::{ParabolicCoeffs, ParabolicError, ParabolicMode};
use crate::fem1d::{
    assemble_load, assemble_mass, assemble_stiffness, elliptic_project, BandedSystem, Deriv,
    DofField, Family, FeSpace, Pivoting, QuadratureRule,
};
use crate::schrodinger::{march, mass_norm, FieldHistory, RunOptions, TimeGrid};

/// Crank-Nicolson Galerkin for `ε ≤ 0` on linear elements:
/// `(M − εE + k/2 A) U^n = (M − εE − k/2 A) U^{n−1} + k F + k g e`,
/// `A = a K − M_β − δ E`, coefficients at `t^{n−1/2}`.
pub struct DissipativeStepper {
    space: Arc<FeSpace>,
    coeffs: ParabolicCoeffs,
    grid: TimeGrid,
    mass: BandedSystem<f64>,
    stiffness: BandedSystem<f64>,
    rule: QuadratureRule,
}

impl DissipativeStepper {
    pub fn new(
        space: Arc<FeSpace>,
        coeffs: ParabolicCoeffs,
        grid: TimeGrid,
    ) -> Result<Self, ParabolicError> {
        if space.family() != Family::LagrangeLinear || !space.pinned_at_zero() {
            return Err(ParabolicError::Family(Family::LagrangeLinear));
        }
        coeffs.require_mode(&grid, ParabolicMode::Dissipative)?;
        let mass = assemble_mass(&space, |_| 1.0);
        let stiffness = assemble_stiffness(&space);
        let rule = space.default_quadrature();
        Ok(DissipativeStepper {
            space,
            coeffs,
            grid,
            mass,
            stiffness,
            rule,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `(left, right, load)` of step `n`.
    pub fn step_matrices(&self, n: usize) -> (BandedSystem<f64>, BandedSystem<f64>, Vec<f64>) {
        let (t, k) = (self.grid.t_half(n), self.grid.k(n));
        let c = &self.coeffs;
        let last = self.space.last_value_dof();
        let mut q = self.mass.clone();
        q.add(last, last, -(c.epsilon)(t));
        let mut op = assemble_mass(&self.space, |x| -(c.beta)(t, x));
        op.add_scaled((c.a)(t), &self.stiffness);
        op.add(last, last, -(c.delta)(t));
        let mut left = q.clone();
        left.add_scaled(0.5 * k, &op);
        let mut right = q;
        right.add_scaled(-0.5 * k, &op);
        let mut load = assemble_load(&self.space, &self.rule, Deriv::Value, |x| k * (c.f)(t, x));
        load[last] += k * (c.g)(t);
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

/// `U⁰ = R_h u0`.
pub fn init_dissipative(
    space: &Arc<FeSpace>,
    du0: impl Fn(f64) -> f64,
) -> Result<DofField<f64>, ParabolicError> {
    Ok(elliptic_project(space, du0)?)
}
