//! Element-by-element assembly of weighted bilinear forms and load vectors.

use super::space::BasisValue;
use super::{BandedSystem, Family, FeSpace, FemError, QuadratureRule, Scalar};

/// Which derivative of a basis function enters a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deriv {
    Value,
    First,
    Second,
}

#[inline]
fn pick(b: &BasisValue, d: Deriv) -> f64 {
    match d {
        Deriv::Value => b.v,
        Deriv::First => b.d1,
        Deriv::Second => b.d2,
    }
}

/// Assembles `A[l][j] = ∫ w(x) · D^p φ_j · D^q φ_l dx`, `p = trial`, `q = test`.
///
/// The basis is real, so no conjugation is needed on the test side.
pub fn assemble_form<T: Scalar>(
    space: &FeSpace,
    rule: &QuadratureRule,
    trial: Deriv,
    test: Deriv,
    weight: impl Fn(f64) -> T,
) -> BandedSystem<T> {
    let n = space.dof_count();
    let bw = space.bandwidth();
    let mut a = BandedSystem::zeros(n, bw, bw);
    let nl = space.local_dofs();
    let mesh = space.mesh();
    for e in 0..mesh.element_count() {
        let (xa, xb) = mesh.element(e);
        let h = xb - xa;
        let dofs = space.element_dofs(e);
        let mut local = [[T::zero(); 4]; 4];
        for (&xi, &wq) in rule.points.iter().zip(&rule.weights) {
            let x = xa + h * xi;
            let w = weight(x).scale(wq * h);
            let basis = space.local_basis(e, xi);
            for l in 0..nl {
                let bl = pick(&basis[l], test);
                if bl == 0.0 {
                    continue;
                }
                for j in 0..nl {
                    local[l][j] += w.scale(pick(&basis[j], trial) * bl);
                }
            }
        }
        for l in 0..nl {
            let Some(gl) = dofs[l] else { continue };
            for j in 0..nl {
                let Some(gj) = dofs[j] else { continue };
                a.add(gl, gj, local[l][j]);
            }
        }
    }
    a
}

/// `(w φ_j, φ_l)`.
pub fn assemble_mass<T: Scalar>(space: &FeSpace, weight: impl Fn(f64) -> T) -> BandedSystem<T> {
    assemble_form(
        space,
        &space.default_quadrature(),
        Deriv::Value,
        Deriv::Value,
        weight,
    )
}

/// `(φ_j', φ_l')`.
pub fn assemble_stiffness(space: &FeSpace) -> BandedSystem<f64> {
    assemble_form(
        space,
        &space.default_quadrature(),
        Deriv::First,
        Deriv::First,
        |_| 1.0,
    )
}

/// `(φ_j'', φ_l'')`, Hermite spaces only.
pub fn assemble_bstar(space: &FeSpace) -> Result<BandedSystem<f64>, FemError> {
    if space.family() != Family::HermiteCubic {
        return Err(FemError::WrongFamily {
            expected: Family::HermiteCubic,
            found: space.family(),
        });
    }
    Ok(assemble_form(
        space,
        &space.default_quadrature(),
        Deriv::Second,
        Deriv::Second,
        |_| 1.0,
    ))
}

/// `b[l] = ∫ f(x) · D^q φ_l dx`.
pub fn assemble_load<T: Scalar>(
    space: &FeSpace,
    rule: &QuadratureRule,
    test: Deriv,
    f: impl Fn(f64) -> T,
) -> Vec<T> {
    let mut b = vec![T::zero(); space.dof_count()];
    let nl = space.local_dofs();
    let mesh = space.mesh();
    for e in 0..mesh.element_count() {
        let (xa, xb) = mesh.element(e);
        let h = xb - xa;
        let dofs = space.element_dofs(e);
        for (&xi, &wq) in rule.points.iter().zip(&rule.weights) {
            let fx = f(xa + h * xi).scale(wq * h);
            let basis = space.local_basis(e, xi);
            for l in 0..nl {
                if let Some(g) = dofs[l] {
                    b[g] += fx.scale(pick(&basis[l], test));
                }
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{Mesh1D, C64};

    /// Dense oracle: integrates over each element with a 20-point rule using
    /// the basis directly, with no band bookkeeping.
    fn dense_form(
        space: &FeSpace,
        trial: Deriv,
        test: Deriv,
        w: impl Fn(f64) -> C64,
    ) -> Vec<Vec<C64>> {
        let n = space.dof_count();
        let q = QuadratureRule::gauss_legendre(20);
        let mut a = vec![vec![C64::new(0.0, 0.0); n]; n];
        for e in 0..space.mesh().element_count() {
            let (xa, xb) = space.mesh().element(e);
            let dofs = space.element_dofs(e);
            for (&xi, &wq) in q.points.iter().zip(&q.weights) {
                let x = xa + (xb - xa) * xi;
                let b = space.local_basis(e, xi);
                for l in 0..4 {
                    for j in 0..4 {
                        if let (Some(gl), Some(gj)) = (dofs[l], dofs[j]) {
                            a[gl][gj] +=
                                w(x) * pick(&b[j], trial) * pick(&b[l], test) * wq * (xb - xa);
                        }
                    }
                }
            }
        }
        a
    }

    #[test]
    fn linear_mass_two_elements() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 2).unwrap();
        let m = assemble_mass(&s, |_| 1.0);
        let h = 0.5;
        assert!((m.get(0, 0) - 4.0 * h / 6.0).abs() < 1e-15);
        assert!((m.get(0, 1) - h / 6.0).abs() < 1e-15);
        assert!((m.get(1, 1) - 2.0 * h / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_gives_zero_matrix() {
        let s = FeSpace::uniform(Family::HermiteCubic, 3).unwrap();
        let m = assemble_mass(&s, |_| 0.0);
        assert!(m.to_dense().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn complex_weight_matches_dense_oracle() {
        let t = 1.0;
        let beta = |x: f64| C64::new(x * t, 3.0 * x + t * t);
        for family in [Family::LagrangeLinear, Family::HermiteCubic] {
            let s = FeSpace::uniform(family, 4).unwrap();
            let m = assemble_mass(&s, beta).to_dense();
            let want = dense_form(&s, Deriv::Value, Deriv::Value, beta);
            for (r, w) in m.iter().zip(&want) {
                for (a, b) in r.iter().zip(w) {
                    assert!((a - b).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn linear_stiffness_pattern() {
        let n = 5;
        let s = FeSpace::uniform(Family::LagrangeLinear, n).unwrap();
        let k = assemble_stiffness(&s);
        let h = 1.0 / n as f64;
        for i in 0..n {
            let d = if i == n - 1 { 1.0 } else { 2.0 };
            assert!((k.get(i, i) - d / h).abs() < 1e-12);
            if i + 1 < n {
                assert!((k.get(i, i + 1) + 1.0 / h).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stiffness_energy_of_x_is_one() {
        for family in [Family::LagrangeLinear, Family::HermiteCubic] {
            let s = FeSpace::uniform(family, 7).unwrap();
            let v = s.interpolate(|x| x, |_| 1.0);
            let e = assemble_stiffness(&s).form(&v, &v);
            assert!((e - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn stiffness_energy_matches_dense_oracle() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 6).unwrap();
        let v: Vec<f64> = (0..6).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let k = assemble_stiffness(&s).form(&v, &v);
        let dense = dense_form(&s, Deriv::First, Deriv::First, |_| C64::new(1.0, 0.0));
        let mut want = 0.0;
        for l in 0..6 {
            for j in 0..6 {
                want += v[l] * dense[l][j].re * v[j];
            }
        }
        assert!((k - want).abs() < 1e-12);
    }

    #[test]
    fn bstar_of_monomials() {
        let s = FeSpace::hermite(Mesh1D::from_nodes(vec![0.0, 0.2, 0.55, 1.0]).unwrap());
        let b = assemble_bstar(&s).unwrap();
        type Monomial = fn(f64) -> f64;
        let cases: [(Monomial, Monomial, f64); 3] = [
            (|x| x, |_| 1.0, 0.0),
            (|x| x * x, |x| 2.0 * x, 4.0),
            (|x| x * x * x, |x| 3.0 * x * x, 12.0),
        ];
        for (v, dv, want) in cases {
            let c = s.interpolate(v, dv);
            assert!((b.form(&c, &c) - want).abs() < 1e-11);
        }
    }

    #[test]
    fn bstar_rejects_linear_space() {
        let s = FeSpace::uniform(Family::LagrangeLinear, 3).unwrap();
        assert!(matches!(
            assemble_bstar(&s),
            Err(FemError::WrongFamily { .. })
        ));
    }

    #[test]
    fn load_vector_integrates_basis() {
        // Σ_l (1, φ_l) over a partition of unity minus the eliminated hat
        let s = FeSpace::uniform(Family::LagrangeLinear, 4).unwrap();
        let b = assemble_load(&s, &s.default_quadrature(), Deriv::Value, |_| 1.0);
        let total: f64 = b.iter().sum();
        assert!((total - (1.0 - 0.125)).abs() < 1e-14);
    }
}
