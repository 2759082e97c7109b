use std::sync::Arc;

use super::{march, mass_norm, FieldHistory, RunOptions, SchrodingerError, TimeGrid};
use crate::acoustics::CoefficientSet;
use crate::fem1d::{
    assemble_load, assemble_mass, assemble_stiffness, elliptic_project, l2_project, BandedSystem,
    Deriv, DofField, FeSpace, Pivoting, QuadratureRule, C64, I,
};

/// Treatment of the bottom condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    /// `u_x(1) = μ [S u_t(1) + G u(1)] + f1`.
    NeumannDynamical,
    /// `u_x(1) = f1` (zero for the wedge).
    AbrahamssonKreiss,
}

/// Initial projection for the AK scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialProjection {
    L2,
    Elliptic,
}

/// Crank-Nicolson Galerkin stepper for the strip problem.
///
/// Each step solves `(Q + k/2 A) U^n = (Q − k/2 A) U^{n−1} + k F + i k a f1 e`
/// with every coefficient taken at `t^{n−1/2}`, where
/// `Q = M − i a μ S E`, `A = i a K − i M_β − i a μ G E` and `E = e eᵀ`
/// picks the value at `x = 1`. AK mode drops the `E` terms.
pub struct CnStepContext {
    space: Arc<FeSpace>,
    coeffs: CoefficientSet,
    grid: TimeGrid,
    mode: BoundaryMode,
    mass: BandedSystem<f64>,
    stiffness: BandedSystem<f64>,
    rule: QuadratureRule,
}

/// Assembled step at one level (exposed for residual checks).
pub struct StepMatrices {
    pub left: BandedSystem<C64>,
    pub right: BandedSystem<C64>,
    pub load: Vec<C64>,
}

impl CnStepContext {
    pub fn new(
        space: Arc<FeSpace>,
        coeffs: CoefficientSet,
        grid: TimeGrid,
        mode: BoundaryMode,
    ) -> Result<Self, SchrodingerError> {
        for n in 1..=grid.steps() {
            coeffs.check_time(grid.t_half(n))?;
        }
        if mode == BoundaryMode::NeumannDynamical {
            if let Some(n) = (1..=grid.steps()).find(|&n| (coeffs.mu)(grid.t_half(n)) > 0.0) {
                log::warn!(
                    "downsloping bottom at t={:.6}: analysis requires upsloping (ṡ ≤ 0)",
                    grid.t_half(n)
                );
            }
        }
        let mass = assemble_mass(&space, |_| 1.0);
        let stiffness = assemble_stiffness(&space);
        let rule = space.default_quadrature();
        Ok(CnStepContext {
            space,
            coeffs,
            grid,
            mode,
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

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn coeffs(&self) -> &CoefficientSet {
        &self.coeffs
    }

    /// Left/right matrices and load of step `n` (`1 ≤ n ≤ N`).
    pub fn step_matrices(&self, n: usize) -> StepMatrices {
        let (t, k) = (self.grid.t_half(n), self.grid.k(n));
        let c = &self.coeffs;
        let a = (c.a)(t);
        let bw = self.space.bandwidth();
        let dofs = self.space.dof_count();
        let last = self.space.last_value_dof();

        let m_beta = assemble_mass(&self.space, |x| (c.beta)(t, x));
        let mut q = BandedSystem::<C64>::zeros(dofs, bw, bw);
        q.add_scaled(C64::new(1.0, 0.0), &self.mass);
        let mut op = BandedSystem::<C64>::zeros(dofs, bw, bw);
        op.add_scaled(I * a, &self.stiffness);
        op.add_scaled(-I, &m_beta);
        if self.mode == BoundaryMode::NeumannDynamical {
            let mu = (c.mu)(t);
            q.add(last, last, -I * a * mu * (c.s_bc)(t));
            op.add(last, last, -I * a * mu * (c.g_bc)(t));
        }
        let mut left = q.clone();
        left.add_scaled(C64::new(0.5 * k, 0.0), &op);
        let mut right = q;
        right.add_scaled(C64::new(-0.5 * k, 0.0), &op);

        let mut load = match &c.f {
            Some(f) => assemble_load(&self.space, &self.rule, Deriv::Value, |x| f(t, x) * k),
            None => vec![C64::new(0.0, 0.0); dofs],
        };
        if let Some(f1) = &c.f1 {
            load[last] += I * k * a * f1(t);
        }
        StepMatrices { left, right, load }
    }

    /// `U^n` from `U^{n−1}`.
    pub fn step(&self, prev: &DofField<C64>, n: usize) -> Result<DofField<C64>, SchrodingerError> {
        let StepMatrices {
            mut left,
            right,
            load,
        } = self.step_matrices(n);
        let mut rhs = right.matvec(prev.coeffs());
        for (r, l) in rhs.iter_mut().zip(&load) {
            *r += *l;
        }
        left.factorize(Pivoting::Partial)
            .map_err(|source| SchrodingerError::StepSize { step: n, source })?;
        let u = left.solve_factored(&rhs)?;
        Ok(DofField::new(self.space.clone(), u)?)
    }

    pub fn run(
        &self,
        u0: DofField<C64>,
        opts: RunOptions,
    ) -> Result<FieldHistory<C64>, SchrodingerError> {
        self.run_observed(u0, opts, |_, _, _| {})
    }

    /// As [`run`](Self::run), calling `observe(n, t^n, U^n)` at every level.
    pub fn run_observed(
        &self,
        u0: DofField<C64>,
        opts: RunOptions,
        observe: impl FnMut(usize, f64, &DofField<C64>),
    ) -> Result<FieldHistory<C64>, SchrodingerError> {
        march(
            u0,
            self.grid.times(),
            opts,
            |u| mass_norm(&self.mass, u),
            |u, n| self.step(u, n),
            observe,
        )
    }
}

/// `U⁰ = R_h u0`, from `u0'` (the projection only needs the derivative).
pub fn init_neumann(
    space: &Arc<FeSpace>,
    du0: impl Fn(f64) -> C64,
) -> Result<DofField<C64>, SchrodingerError> {
    Ok(elliptic_project(space, du0)?)
}

/// `U⁰ = P_h u0` or `R_h u0`.
pub fn init_ak(
    space: &Arc<FeSpace>,
    projection: InitialProjection,
    u0: impl Fn(f64) -> C64,
    du0: impl Fn(f64) -> C64,
) -> Result<DofField<C64>, SchrodingerError> {
    Ok(match projection {
        InitialProjection::L2 => l2_project(space, u0)?,
        InitialProjection::Elliptic => elliptic_project(space, du0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustics::{wedge_coefficients, BottomProfile};
    use crate::fem1d::Family;

    fn zero_g() -> crate::acoustics::TimeFn<C64> {
        Arc::new(|_| C64::new(0.0, 0.0))
    }

    /// Manufactured `u = −x(x−1)³ + x sin t` on `s(t) = 0.7 − 0.3t`.
    fn manufactured(ak: bool) -> CoefficientSet {
        let base = wedge_coefficients(&BottomProfile::linear(0.7, -0.3), None, zero_g());
        let beta = |t: f64, x: f64| C64::new(x * t, 3.0 * x + t * t);
        let u = |t: f64, x: f64| C64::new(-x * (x - 1.0).powi(3) + t.sin() * x, 0.0);
        let (a, mu, sb, gb) = (
            base.a.clone(),
            base.mu.clone(),
            base.s_bc.clone(),
            base.g_bc.clone(),
        );
        let f = move |t: f64, x: f64| {
            C64::new(x * t.cos(), 0.0) + I * 6.0 * a(t) * (x - 1.0) * (2.0 * x - 1.0)
                - I * beta(t, x) * u(t, x)
        };
        let f1 = move |t: f64| {
            let ux = C64::new(t.sin(), 0.0);
            if ak {
                ux
            } else {
                ux - mu(t) * (sb(t) * t.cos() + gb(t) * t.sin())
            }
        };
        base.with_beta(beta).with_forcing(f, f1)
    }

    fn du0(x: f64) -> C64 {
        C64::new(-(x - 1.0).powi(3) - 3.0 * x * (x - 1.0).powi(2), 0.0)
    }

    fn context(
        n: usize,
        coeffs: CoefficientSet,
        grid: TimeGrid,
        mode: BoundaryMode,
    ) -> CnStepContext {
        let space = FeSpace::uniform(Family::LagrangeLinear, n).unwrap();
        CnStepContext::new(space, coeffs, grid, mode).unwrap()
    }

    #[test]
    fn ak_conserves_norm_without_forcing_or_absorption() {
        let p = BottomProfile::new(
            "wavy",
            |t: f64| 1.0 + 0.3 * t.sin(),
            |t: f64| 0.3 * t.cos(),
            |t: f64| -0.3 * t.sin(),
        );
        let c = wedge_coefficients(&p, None, zero_g()).with_beta(|t, x| C64::new(x * t - 2.0, 0.0));
        let grid = TimeGrid::from_nodes(vec![0.0, 0.03, 0.1, 0.12, 0.3, 0.31, 0.5]).unwrap();
        let ctx = context(40, c, grid, BoundaryMode::AbrahamssonKreiss);
        let u0 = init_ak(
            ctx.space(),
            InitialProjection::L2,
            |x| C64::new(x.sin(), x * x),
            |_| C64::new(0.0, 0.0),
        )
        .unwrap();
        let h = ctx.run(u0, RunOptions::default()).unwrap();
        for &n in &h.l2_norms {
            assert!(
                (n / h.initial_norm() - 1.0).abs() < 1e-12,
                "{:?}",
                h.l2_norms
            );
        }
    }

    #[test]
    fn flat_bottom_neumann_matches_ak_bitwise() {
        let c = wedge_coefficients(&BottomProfile::flat(1.0), None, Arc::new(|_| I));
        let grid = TimeGrid::uniform(0.5, 7).unwrap();
        let n_ctx = context(30, c.clone(), grid.clone(), BoundaryMode::NeumannDynamical);
        let a_ctx = context(30, c, grid, BoundaryMode::AbrahamssonKreiss);
        for n in 1..=7 {
            let (l, r) = (n_ctx.step_matrices(n), a_ctx.step_matrices(n));
            assert_eq!(l.left, r.left);
            assert_eq!(l.right, r.right);
        }
        let u0 = init_neumann(n_ctx.space(), |x| C64::new(x.cos(), 0.0)).unwrap();
        let hn = n_ctx.run(u0.clone(), RunOptions::default()).unwrap();
        let ha = a_ctx.run(u0, RunOptions::default()).unwrap();
        assert_eq!(hn.last, ha.last);
        // with μ = 0, |U^n| is conserved as well
        assert!((hn.final_norm() / hn.initial_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let c = wedge_coefficients(&BottomProfile::linear(0.7, -0.3), None, Arc::new(|_| I));
        let ctx = context(
            20,
            c,
            TimeGrid::uniform(1.0, 10).unwrap(),
            BoundaryMode::NeumannDynamical,
        );
        let h = ctx
            .run(DofField::zeros(ctx.space().clone()), RunOptions::default())
            .unwrap();
        assert!(h.last.coeffs().iter().all(|c| *c == C64::new(0.0, 0.0)));
        assert!(h.l2_norms.iter().all(|&n| n == 0.0));
    }

    #[test]
    fn no_operator_means_no_change() {
        let mut c = wedge_coefficients(&BottomProfile::flat(1.0), None, zero_g());
        c.a = Arc::new(|_| 0.0);
        let ctx = context(
            12,
            c,
            TimeGrid::uniform(0.3, 1).unwrap(),
            BoundaryMode::AbrahamssonKreiss,
        );
        let u0 = init_ak(
            ctx.space(),
            InitialProjection::L2,
            |x| C64::new(x, 1.0 - x),
            |_| C64::new(1.0, -1.0),
        )
        .unwrap();
        let u1 = ctx.step(&u0, 1).unwrap();
        for (a, b) in u1.coeffs().iter().zip(u0.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn empty_grid_keeps_initial_field() {
        let ctx = context(
            8,
            manufactured(false),
            TimeGrid::uniform(1.0, 0).unwrap(),
            BoundaryMode::NeumannDynamical,
        );
        let u0 = init_neumann(ctx.space(), du0).unwrap();
        let h = ctx
            .run(
                u0.clone(),
                RunOptions {
                    snapshot_every: 1,
                    growth_limit: None,
                },
            )
            .unwrap();
        assert_eq!(h.l2_norms.len(), 1);
        assert_eq!(h.snapshots.len(), 1);
        assert_eq!(h.last, u0);
    }

    #[test]
    fn step_satisfies_the_discrete_equation() {
        let ctx = context(
            25,
            manufactured(false),
            TimeGrid::uniform(1.0, 5).unwrap(),
            BoundaryMode::NeumannDynamical,
        );
        let mut u = init_neumann(ctx.space(), du0).unwrap();
        for n in 1..=5 {
            let next = ctx.step(&u, n).unwrap();
            let m = ctx.step_matrices(n);
            let lhs = m.left.matvec(next.coeffs());
            let rhs = m.right.matvec(u.coeffs());
            let scale: f64 = rhs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for i in 0..lhs.len() {
                assert!((lhs[i] - rhs[i] - m.load[i]).norm() <= 1e-10 * scale.max(1.0));
            }
            u = next;
        }
    }

    #[test]
    fn neumann_boundary_term_enters_only_at_the_last_dof() {
        let c = manufactured(false);
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        let n_ctx = context(6, c.clone(), grid.clone(), BoundaryMode::NeumannDynamical);
        let a_ctx = context(6, c, grid, BoundaryMode::AbrahamssonKreiss);
        let (l, r) = (
            n_ctx.step_matrices(2).left.to_dense(),
            a_ctx.step_matrices(2).left.to_dense(),
        );
        let last = n_ctx.space().last_value_dof();
        for i in 0..l.len() {
            for j in 0..l.len() {
                if (i, j) != (last, last) {
                    assert_eq!(l[i][j], r[i][j]);
                }
            }
        }
        assert_ne!(l[last][last], r[last][last]);
    }

    /// One step of length `k` against two of `k/2`: the gap is the local
    /// truncation error, third order in `k`.
    #[test]
    fn local_error_is_third_order() {
        let gaps: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&k| {
                let one = TimeGrid::from_nodes(vec![0.0, k]).unwrap();
                let two = TimeGrid::from_nodes(vec![0.0, k / 2.0, k]).unwrap();
                let mk = |g: TimeGrid| {
                    context(40, manufactured(false), g, BoundaryMode::NeumannDynamical)
                };
                let (c1, c2) = (mk(one), mk(two));
                let u0 = init_neumann(c1.space(), du0).unwrap();
                let a = c1.run(u0.clone(), RunOptions::default()).unwrap().last;
                let b = c2.run(u0, RunOptions::default()).unwrap().last;
                DofField::new(
                    c1.space().clone(),
                    a.coeffs()
                        .iter()
                        .zip(b.coeffs())
                        .map(|(x, y)| x - y)
                        .collect(),
                )
                .unwrap()
                .l2_norm()
            })
            .collect();
        for w in gaps.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 2.7, "{gaps:?}");
        }
    }

    #[test]
    fn upsloping_steps_are_solvable_up_to_k_one_tenth() {
        for (n, k) in [(100, 0.1), (100, 0.05), (200, 0.02), (50, 0.1)] {
            let steps = (1.0 / k) as usize;
            let ctx = context(
                n,
                manufactured(false),
                TimeGrid::uniform(1.0, steps).unwrap(),
                BoundaryMode::NeumannDynamical,
            );
            for s in 1..=steps {
                let mut l = ctx.step_matrices(s).left;
                assert!(
                    l.factorize(Pivoting::Partial).is_ok(),
                    "n={n} k={k} step {s}"
                );
            }
        }
    }
}
