//! L², elliptic (Ritz) and γ*-projections onto a finite-element space.

use std::sync::Arc;

use super::{
    assemble_bstar, assemble_form, assemble_load, solve, BandedSystem, Deriv, DofField, Family,
    FeSpace, FemError, Pivoting, QuadratureRule, Scalar,
};

fn projection_rule() -> QuadratureRule {
    QuadratureRule::gauss_legendre(8)
}

/// Solves a real SPD system for a real or complex right-hand side.
fn solve_real<T: Scalar + From<f64>>(
    a: &BandedSystem<f64>,
    rhs: Vec<T>,
) -> Result<Vec<T>, FemError> {
    let mut lifted = BandedSystem::<T>::zeros(a.order(), a.lower_bandwidth(), a.upper_bandwidth());
    lifted.add_scaled(T::one(), a);
    solve(&lifted, &rhs, Pivoting::None)
}

/// `P_h f`: `(P_h f, φ) = (f, φ)` for every basis function `φ`.
pub fn l2_project<T: Scalar + From<f64>>(
    space: &Arc<FeSpace>,
    f: impl Fn(f64) -> T,
) -> Result<DofField<T>, FemError> {
    let rule = projection_rule();
    let m = assemble_form(space, &rule, Deriv::Value, Deriv::Value, |_| 1.0);
    let b = assemble_load(space, &rule, Deriv::Value, f);
    DofField::new(space.clone(), solve_real(&m, b)?)
}

/// `R_h v`: `(R_h v', φ') = (v', φ')`. Only `v'` is needed since `v(0) = 0`.
pub fn elliptic_project<T: Scalar + From<f64>>(
    space: &Arc<FeSpace>,
    dv: impl Fn(f64) -> T,
) -> Result<DofField<T>, FemError> {
    if !space.pinned_at_zero() {
        return Err(FemError::InvalidMesh(
            "elliptic projection needs the value at x=0 eliminated".into(),
        ));
    }
    let rule = projection_rule();
    let k = assemble_form(space, &rule, Deriv::First, Deriv::First, |_| 1.0);
    let b = assemble_load(space, &rule, Deriv::First, dv);
    DofField::new(space.clone(), solve_real(&k, b)?)
}

/// `R*_h v`: `γ*(R*_h v, χ) = γ*(v, χ)` with `γ*(v, w) = (v'', w'') + (v', w')`.
pub fn elliptic_project_star<T: Scalar + From<f64>>(
    space: &Arc<FeSpace>,
    dv: impl Fn(f64) -> T,
    d2v: impl Fn(f64) -> T,
) -> Result<DofField<T>, FemError> {
    if space.family() != Family::HermiteCubic {
        return Err(FemError::WrongFamily {
            expected: Family::HermiteCubic,
            found: space.family(),
        });
    }
    let rule = projection_rule();
    let mut g = assemble_bstar(space)?;
    g.add_scaled(
        1.0,
        &assemble_form(space, &rule, Deriv::First, Deriv::First, |_| 1.0),
    );
    let mut b = assemble_load(space, &rule, Deriv::Second, d2v);
    for (bi, ci) in b
        .iter_mut()
        .zip(assemble_load(space, &rule, Deriv::First, dv))
    {
        *bi += ci;
    }
    DofField::new(space.clone(), solve_real(&g, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{Mesh1D, C64};
    use std::f64::consts::PI;

    fn slope(e1: f64, e2: f64) -> f64 {
        (e1 / e2).log2()
    }

    #[test]
    fn l2_projection_is_identity_on_the_space() {
        let s = FeSpace::hermite(Mesh1D::from_nodes(vec![0.0, 0.15, 0.5, 0.8, 1.0]).unwrap());
        let v = DofField::interpolate(s.clone(), |x| x * x * x - x, |x| 3.0 * x * x - 1.0);
        let p = l2_project(&s, |x| v.eval(x)).unwrap();
        for (a, b) in p.coeffs().iter().zip(v.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        let z = l2_project(&s, |_| 0.0).unwrap();
        assert!(z.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn l2_projection_is_galerkin_orthogonal() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 8).unwrap();
        let f = |x: f64| C64::new(x.exp() - 1.0, (3.0 * x).sin());
        let p = l2_project(&s, f).unwrap();
        let rule = QuadratureRule::gauss_legendre(8);
        let r = assemble_load(&s, &rule, Deriv::Value, |x| p.eval(x) - f(x));
        assert!(r.iter().all(|c| c.norm() < 1e-10));
    }

    #[test]
    fn l2_projection_error_is_second_order() {
        let f = |x: f64| x * (1.0 - x);
        let errs: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let s = FeSpace::uniform(Family::LagrangeLinear, n).unwrap();
                l2_project(&s, f).unwrap().l2_error(f)
            })
            .collect();
        for w in errs.windows(2) {
            assert!((slope(w[0], w[1]) - 2.0).abs() < 0.1);
        }
    }

    #[test]
    fn ritz_projection_of_linear_is_exact() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 5).unwrap();
        let r = elliptic_project(&s, |_| 1.0).unwrap();
        assert!(r.l2_error(|x| x) < 1e-14);
    }

    #[test]
    fn ritz_projection_is_exact_at_one() {
        let dv = |x: f64| -(x - 1.0).powi(3) - 3.0 * x * (x - 1.0).powi(2);
        for n in [3, 10, 37] {
            let s = FeSpace::uniform(Family::LagrangeLinear, n).unwrap();
            let (v1, _) = elliptic_project(&s, dv).unwrap().boundary_eval();
            assert!(v1.abs() < 1e-12);
        }
    }

    #[test]
    fn ritz_projection_rates() {
        let v = |x: f64| (PI * x / 2.0).sin();
        let dv = |x: f64| PI / 2.0 * (PI * x / 2.0).cos();
        let mut l2 = vec![];
        let mut h1 = vec![];
        for n in [8, 16, 32, 64] {
            let s = FeSpace::uniform(Family::LagrangeLinear, n).unwrap();
            let r = elliptic_project(&s, dv).unwrap();
            l2.push(r.l2_error(v));
            h1.push(r.h1_error(dv));
        }
        for i in 0..3 {
            assert!((slope(l2[i], l2[i + 1]) - 2.0).abs() < 0.1);
            assert!((slope(h1[i], h1[i + 1]) - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn projections_are_idempotent() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 9).unwrap();
        let p = l2_project(&s, |x: f64| (4.0 * x).cos() - 1.0).unwrap();
        let pp = l2_project(&s, |x| p.eval(x)).unwrap();
        let r = elliptic_project(&s, |x: f64| (4.0 * x).cos()).unwrap();
        let rr = elliptic_project(&s, |x| r.eval_deriv(x)).unwrap();
        for (a, b) in p.coeffs().iter().zip(pp.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in r.coeffs().iter().zip(rr.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn star_projection_of_cubic_is_exact() {
        let s = FeSpace::uniform(Family::HermiteCubic, 4).unwrap();
        let r = elliptic_project_star(&s, |x| 3.0 * x * x, |x| 6.0 * x).unwrap();
        let err = r.l2_error(|x| x * x * x);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn star_projection_rejects_linear() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 4).unwrap();
        let r = elliptic_project_star(&s, |_| 1.0, |_| 0.0);
        assert!(matches!(r, Err(FemError::WrongFamily { .. })));
    }

    #[test]
    fn star_projection_h1_rate_three() {
        let dv = |x: f64| 5.0 * x.powi(4) - 1.0;
        let d2v = |x: f64| 20.0 * x.powi(3);
        let errs: Vec<f64> = [4, 8, 16, 32]
            .iter()
            .map(|&n| {
                let s = FeSpace::uniform(Family::HermiteCubic, n).unwrap();
                elliptic_project_star(&s, dv, d2v).unwrap().h1_error(dv)
            })
            .collect();
        for w in errs.windows(2) {
            assert!(slope(w[0], w[1]) > 2.9, "{errs:?}");
        }
    }

    /// `(R*v)'(1) = v'(1) + e(1) − B(e, x³)/6`, `e = R*v − v`.
    #[test]
    fn star_projection_boundary_identity() {
        let v = |x: f64| (2.0 * x).sin() + x * x;
        let dv = |x: f64| 2.0 * (2.0 * x).cos() + 2.0 * x;
        let d2v = |x: f64| -4.0 * (2.0 * x).sin() + 2.0;
        for n in [2, 5, 11] {
            let s = FeSpace::uniform(Family::HermiteCubic, n).unwrap();
            let r = elliptic_project_star(&s, dv, d2v).unwrap();
            let (r1, dr1) = r.boundary_eval();
            let q = QuadratureRule::gauss_legendre(8);
            let mut b = 0.0;
            for e in 0..n {
                let (xa, xb) = s.mesh().element(e);
                b += q.integrate(xa, xb, |x| (r.eval_deriv(x) - dv(x)) * 3.0 * x * x);
            }
            let rhs = dv(1.0) + (r1 - v(1.0)) - b / 6.0;
            assert!((dr1 - rhs).abs() < 1e-11, "n={n}: {}", dr1 - rhs);
        }
    }
}
