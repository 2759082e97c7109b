use std::sync::Arc;

use super::{PFormError, SlopeDirection, ZetaCoefficients};
use crate::fem1d::{
    assemble_form, assemble_mass, assemble_stiffness, l2_project, BandedSystem, Deriv, DofField,
    Family, FeSpace, Pivoting, QuadratureRule, C64, I,
};
use crate::schrodinger::{march, mass_norm, FieldHistory, RunOptions, TimeGrid};

/// Smallest accepted `|1 − R1 B(t,1)|`.
const BOUNDARY_FACTOR_FLOOR: f64 = 1e-10;

#[inline]
fn p_index(j: usize) -> usize {
    if j == 0 {
        0
    } else {
        2 * j - 1
    }
}

#[inline]
fn theta_index(m: usize) -> usize {
    2 * m
}

/// `θ_h(x) = ∫₀ˣ p_h` for a piecewise-linear `p_h`.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    p: DofField<C64>,
    nodal: Vec<C64>,
}

impl CumulativeIntegral {
    pub fn new(p: &DofField<C64>) -> Self {
        let mesh = p.space().mesh();
        let c = p.coeffs();
        let mut nodal = Vec::with_capacity(mesh.node_count());
        nodal.push(C64::new(0.0, 0.0));
        for e in 0..mesh.element_count() {
            let (a, b) = mesh.element(e);
            let next = nodal[e] + (c[e] + c[e + 1]) * (0.5 * (b - a));
            nodal.push(next);
        }
        CumulativeIntegral {
            p: p.clone(),
            nodal,
        }
    }

    pub fn nodal(&self) -> &[C64] {
        &self.nodal
    }

    pub fn at_one(&self) -> C64 {
        *self.nodal.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> C64 {
        let mesh = self.p.space().mesh();
        let e = mesh.locate(x);
        let (a, b) = mesh.element(e);
        let h = b - a;
        let xi = ((x - a) / h).clamp(0.0, 1.0);
        let c = self.p.coeffs();
        self.nodal[e] + (c[e] * (xi - 0.5 * xi * xi) + c[e + 1] * (0.5 * xi * xi)) * h
    }
}

/// Running bound `max_n ‖p^n‖ / ‖p⁰‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityMonitor {
    pub initial: f64,
    pub max_ratio: f64,
}

impl StabilityMonitor {
    pub fn from_norms(norms: &[f64]) -> Self {
        let initial = norms[0];
        let max = norms.iter().copied().fold(0.0, f64::max);
        StabilityMonitor {
            initial,
            max_ratio: if initial > 0.0 { max / initial } else { 0.0 },
        }
    }

    pub fn within(&self, c: f64) -> bool {
        self.max_ratio <= c
    }
}

/// Crank-Nicolson for the semidiscrete p-problem, coefficients at `t^{n−1/2}`.
///
/// Unknowns are ordered `p_0, p_1, Θ_1, p_2, Θ_2, …, p_N, Θ_N` with
/// `Θ_m = θ_h(x_m)`; rows at `Θ_m` enforce
/// `Θ_m − Θ_{m−1} − h_m (p_{m−1} + p_m)/2 = 0` at the new level.
pub struct PStepContext {
    space: Arc<FeSpace>,
    zc: ZetaCoefficients,
    grid: TimeGrid,
    mass: BandedSystem<f64>,
    stiffness: BandedSystem<f64>,
    rule: QuadratureRule,
}

impl PStepContext {
    pub fn new(
        space: Arc<FeSpace>,
        zc: ZetaCoefficients,
        grid: TimeGrid,
    ) -> Result<Self, PFormError> {
        if space.family() != Family::LagrangeLinear || space.pinned_at_zero() {
            return Err(PFormError::Space);
        }
        for n in 1..=grid.steps() {
            let ends = [grid.t(n - 1), grid.t_half(n), grid.t(n)];
            let dirs = ends
                .iter()
                .map(|&t| zc.direction(t))
                .collect::<Result<Vec<_>, _>>()?;
            if dirs.iter().any(|d| *d != dirs[0]) {
                return Err(PFormError::NonMonotone { step: n });
            }
            let t = grid.t_half(n);
            let value = zc.boundary_factor(t);
            if !(value.abs() >= BOUNDARY_FACTOR_FLOOR) {
                return Err(PFormError::DegenerateBoundary { t, value });
            }
            let margin = zc.stability_margin(t);
            if dirs[1] == SlopeDirection::Down && !(margin < 0.0) {
                return Err(PFormError::SignInvariant { t, value: margin });
            }
        }
        let mass = assemble_mass(&space, |_| 1.0);
        let stiffness = assemble_stiffness(&space);
        let rule = space.default_quadrature();
        Ok(PStepContext {
            space,
            zc,
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

    pub fn coefficients(&self) -> &ZetaCoefficients {
        &self.zc
    }

    fn order(&self) -> usize {
        2 * self.space.mesh().element_count() + 1
    }

    /// The semidiscrete operator at time `t`, on the augmented unknowns
    /// (constraint rows left empty).
    pub fn operator(&self, t: f64) -> BandedSystem<C64> {
        let zc = &self.zc;
        let mesh = self.space.mesh();
        let ne = mesh.element_count();
        let mut op = BandedSystem::<C64>::zeros(self.order(), 3, 2);

        let mut pp = BandedSystem::<C64>::zeros(ne + 1, 1, 1);
        pp.add_scaled(-I / zc.a(t), &self.stiffness);
        pp.add_scaled(
            C64::new(1.0, 0.0),
            &assemble_form(&self.space, &self.rule, Deriv::First, Deriv::Value, |x| {
                C64::new(zc.b(t, x), 0.0)
            }),
        );
        let bx = zc.b_x(t);
        pp.add_scaled(
            C64::new(1.0, 0.0),
            &assemble_mass(&self.space, |x| zc.g_coef(t, x) + bx),
        );
        for i in 0..=ne {
            for j in i.saturating_sub(1)..=(i + 1).min(ne) {
                op.add(p_index(i), p_index(j), pp.get(i, j));
            }
        }

        // boundary: [c1 p(1) − c2 θ(1)] φ(1)
        op.add(p_index(ne), p_index(ne), C64::new(zc.c1(t), 0.0));
        op.add(p_index(ne), theta_index(ne), -zc.c2(t));

        // (G_x θ_h, φ_l) with θ_h = Θ_{m−1} + h[p_{m−1}(ξ − ξ²/2) + p_m ξ²/2] on element m
        for e in 0..ne {
            let (a, b) = mesh.element(e);
            let h = b - a;
            let mut local = [[C64::new(0.0, 0.0); 3]; 2];
            for (&xi, &w) in self.rule.points.iter().zip(&self.rule.weights) {
                let gx = zc.g_x(t, a + h * xi) * (w * h);
                let phi = [1.0 - xi, xi];
                let theta = [1.0, h * (xi - 0.5 * xi * xi), h * 0.5 * xi * xi];
                for l in 0..2 {
                    for c in 0..3 {
                        local[l][c] += gx * (phi[l] * theta[c]);
                    }
                }
            }
            for l in 0..2 {
                let row = p_index(e + l);
                if e > 0 {
                    op.add(row, theta_index(e), local[l][0]);
                }
                op.add(row, p_index(e), local[l][1]);
                op.add(row, p_index(e + 1), local[l][2]);
            }
        }
        op
    }

    /// `(left, right)` of step `n`.
    pub fn step_matrices(&self, n: usize) -> (BandedSystem<C64>, BandedSystem<C64>) {
        let (t, k) = (self.grid.t_half(n), self.grid.k(n));
        let op = self.operator(t);
        let ne = self.space.mesh().element_count();
        let mut m = BandedSystem::<C64>::zeros(self.order(), 3, 2);
        for i in 0..=ne {
            for j in i.saturating_sub(1)..=(i + 1).min(ne) {
                m.add(p_index(i), p_index(j), C64::new(self.mass.get(i, j), 0.0));
            }
        }
        let mut left = m.clone();
        left.add_scaled(C64::new(-0.5 * k, 0.0), &op);
        let mut right = m;
        right.add_scaled(C64::new(0.5 * k, 0.0), &op);
        let one = C64::new(1.0, 0.0);
        for e in 0..ne {
            let (a, b) = self.space.mesh().element(e);
            let row = theta_index(e + 1);
            left.set(row, row, one);
            if e > 0 {
                left.set(row, theta_index(e), -one);
            }
            let half = C64::new(-0.5 * (b - a), 0.0);
            left.set(row, p_index(e), half);
            left.set(row, p_index(e + 1), half);
        }
        (left, right)
    }

    fn pack(&self, p: &DofField<C64>) -> Vec<C64> {
        let theta = CumulativeIntegral::new(p);
        let mut z = vec![C64::new(0.0, 0.0); self.order()];
        for (j, &c) in p.coeffs().iter().enumerate() {
            z[p_index(j)] = c;
        }
        for (m, &c) in theta.nodal().iter().enumerate().skip(1) {
            z[theta_index(m)] = c;
        }
        z
    }

    /// `p^n` from `p^{n−1}`.
    pub fn step(&self, prev: &DofField<C64>, n: usize) -> Result<DofField<C64>, PFormError> {
        let (mut left, right) = self.step_matrices(n);
        let rhs = right.matvec(&self.pack(prev));
        left.factorize(Pivoting::Partial)
            .map_err(|source| PFormError::StepSize { step: n, source })?;
        let z = left.solve_factored(&rhs)?;
        let ne = self.space.mesh().element_count();
        let p = (0..=ne).map(|j| z[p_index(j)]).collect();
        Ok(DofField::new(self.space.clone(), p)?)
    }

    pub fn run(
        &self,
        p0: DofField<C64>,
        opts: RunOptions,
    ) -> Result<FieldHistory<C64>, PFormError> {
        self.run_observed(p0, opts, |_, _, _| {})
    }

    pub fn run_observed(
        &self,
        p0: DofField<C64>,
        opts: RunOptions,
        observe: impl FnMut(usize, f64, &DofField<C64>),
    ) -> Result<FieldHistory<C64>, PFormError> {
        march(
            p0,
            self.grid.times(),
            opts,
            |p| mass_norm(&self.mass, p),
            |p, n| self.step(p, n),
            observe,
        )
    }
}

/// `p_h⁰`: L² projection of `p0(x) = e^{ζ(0,x)} [s(0) w0'(x s(0)) + ζ_x(0,x) w0(x s(0))]`.
pub fn build_p_initial(
    space: &Arc<FeSpace>,
    zc: &ZetaCoefficients,
    w0: impl Fn(f64) -> C64,
    dw0: impl Fn(f64) -> C64,
) -> Result<DofField<C64>, PFormError> {
    let s0 = zc.profile().s(0.0);
    let p0 = |x: f64| zc.zeta(0.0, x).exp() * (dw0(x * s0) * s0 + zc.zeta_x(0.0, x) * w0(x * s0));
    Ok(l2_project(space, p0)?)
}

/// `x ↦ w(t, x s(t)) = e^{−ζ(t,x)} θ_h(t, x)`.
pub fn recover_w<'a>(
    zc: &'a ZetaCoefficients,
    t: f64,
    p: &DofField<C64>,
) -> impl Fn(f64) -> C64 + 'a {
    let theta = CumulativeIntegral::new(p);
    move |x| (-zc.zeta(t, x)).exp() * theta.eval(x)
}
