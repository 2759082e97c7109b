use std::sync::Arc;

use super::{Family, FeSpace, FemError, QuadratureRule, Scalar};

/// Coefficients of a finite-element function in a given space.
#[derive(Debug, Clone, PartialEq)]
pub struct DofField<T> {
    space: Arc<FeSpace>,
    coeffs: Vec<T>,
}

/// Rule used for norms and errors against arbitrary functions.
fn error_rule() -> QuadratureRule {
    QuadratureRule::gauss_legendre(8)
}

impl<T: Scalar> DofField<T> {
    pub fn new(space: Arc<FeSpace>, coeffs: Vec<T>) -> Result<Self, FemError> {
        if coeffs.len() != space.dof_count() {
            return Err(FemError::LengthMismatch {
                expected: space.dof_count(),
                found: coeffs.len(),
            });
        }
        Ok(DofField { space, coeffs })
    }

    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let coeffs = vec![T::zero(); space.dof_count()];
        DofField { space, coeffs }
    }

    /// Nodal (Hermite: value and slope) interpolant.
    pub fn interpolate(space: Arc<FeSpace>, v: impl Fn(f64) -> T, dv: impl Fn(f64) -> T) -> Self {
        let coeffs = space.interpolate(v, dv);
        DofField { space, coeffs }
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Value and first two derivatives on element `e` at reference point `xi`.
    pub fn eval_local(&self, e: usize, xi: f64) -> (T, T, T) {
        let basis = self.space.local_basis(e, xi);
        let dofs = self.space.element_dofs(e);
        let (mut v, mut d1, mut d2) = (T::zero(), T::zero(), T::zero());
        for (b, d) in basis.iter().zip(dofs) {
            if let Some(g) = d {
                let c = self.coeffs[g];
                v += c.scale(b.v);
                d1 += c.scale(b.d1);
                d2 += c.scale(b.d2);
            }
        }
        (v, d1, d2)
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let mesh = self.space.mesh();
        let e = mesh.locate(x);
        let (a, b) = mesh.element(e);
        (e, ((x - a) / (b - a)).clamp(0.0, 1.0))
    }

    pub fn eval(&self, x: f64) -> T {
        let (e, xi) = self.locate(x);
        self.eval_local(e, xi).0
    }

    pub fn eval_deriv(&self, x: f64) -> T {
        let (e, xi) = self.locate(x);
        self.eval_local(e, xi).1
    }

    /// `(v(1), v'(1))`; for linear elements the slope of the last element.
    pub fn boundary_eval(&self) -> (T, T) {
        let ne = self.space.mesh().element_count();
        let (v, d1, _) = self.eval_local(ne - 1, 1.0);
        match self.space.family() {
            Family::HermiteCubic => {
                let k = self.space.last_slope_dof().expect("hermite slope dof");
                (self.coeffs[self.space.last_value_dof()], self.coeffs[k])
            }
            Family::LagrangeLinear => (v, d1),
        }
    }

    /// Values at the mesh nodes.
    pub fn nodal_values(&self) -> Vec<T> {
        let mesh = self.space.mesh();
        let ne = mesh.element_count();
        let mut out = Vec::with_capacity(ne + 1);
        out.push(self.eval_local(0, 0.0).0);
        for e in 0..ne {
            out.push(self.eval_local(e, 1.0).0);
        }
        out
    }

    fn integrate_sq(&self, rule: &QuadratureRule, mut f: impl FnMut(f64, (T, T, T)) -> f64) -> f64 {
        let mesh = self.space.mesh();
        let mut acc = 0.0;
        for e in 0..mesh.element_count() {
            let (a, b) = mesh.element(e);
            let h = b - a;
            for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
                acc += w * h * f(a + h * xi, self.eval_local(e, xi));
            }
        }
        acc
    }

    pub fn l2_norm(&self) -> f64 {
        self.integrate_sq(&error_rule(), |_, (v, _, _)| v.modulus().powi(2))
            .sqrt()
    }

    /// `|v|_1 = ‖v'‖`.
    pub fn h1_seminorm(&self) -> f64 {
        self.integrate_sq(&error_rule(), |_, (_, d, _)| d.modulus().powi(2))
            .sqrt()
    }

    /// `|v|_2 = ‖v''‖` (elementwise).
    pub fn h2_seminorm(&self) -> f64 {
        self.integrate_sq(&error_rule(), |_, (_, _, d)| d.modulus().powi(2))
            .sqrt()
    }

    /// `max |v|` over the quadrature points.
    pub fn max_abs_sampled(&self) -> f64 {
        let mut m: f64 = 0.0;
        self.integrate_sq(&error_rule(), |_, (v, _, _)| {
            m = m.max(v.modulus());
            0.0
        });
        m
    }

    /// `‖v − u‖`.
    pub fn l2_error(&self, u: impl Fn(f64) -> T) -> f64 {
        self.integrate_sq(&error_rule(), |x, (v, _, _)| (v - u(x)).modulus().powi(2))
            .sqrt()
    }

    /// `|v − u|_1`.
    pub fn h1_error(&self, du: impl Fn(f64) -> T) -> f64 {
        self.integrate_sq(&error_rule(), |x, (_, d, _)| (d - du(x)).modulus().powi(2))
            .sqrt()
    }

    /// `sqrt(h Σ_j |v(x_j) − u(x_j)|²)` over the mesh nodes, `h = h_max`.
    pub fn nodal_l2_error(&self, u: impl Fn(f64) -> T) -> f64 {
        let h = self.space.mesh().h_max();
        let nodes = self.space.mesh().nodes();
        let sum: f64 = self
            .nodal_values()
            .iter()
            .zip(nodes)
            .map(|(&v, &x)| (v - u(x)).modulus().powi(2))
            .sum();
        (h * sum).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{Mesh1D, C64};

    #[test]
    fn pinned_field_vanishes_at_zero() {
        let s = FeSpace::uniform(Family::HermiteCubic, 4).unwrap();
        let f = DofField::interpolate(s, |x| C64::new(x.cos(), x), |x| C64::new(-x.sin(), 1.0));
        assert_eq!(f.eval(0.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn boundary_eval_examples() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 5).unwrap();
        let f = DofField::interpolate(s.clone(), |x| x, |_| 1.0);
        let (v, d) = f.boundary_eval();
        assert!((v - 1.0).abs() < 1e-15 && (d - 1.0).abs() < 1e-12);
        assert_eq!(DofField::<f64>::zeros(s).boundary_eval(), (0.0, 0.0));

        let s = FeSpace::hermite(Mesh1D::from_nodes(vec![0.0, 0.3, 1.0]).unwrap());
        let f = DofField::interpolate(s, |x| x * x, |x| 2.0 * x);
        assert_eq!(f.boundary_eval(), (1.0, 2.0));
    }

    #[test]
    fn norms_of_x() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 3).unwrap();
        let f = DofField::interpolate(s, |x| x, |_| 1.0);
        assert!((f.l2_norm() - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((f.h1_seminorm() - 1.0).abs() < 1e-14);
        assert!(f.l2_error(|x| x) < 1e-15);
    }

    #[test]
    fn length_mismatch_rejected() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 3).unwrap();
        assert!(DofField::new(s, vec![0.0; 4]).is_err());
    }
}
