//! Functional inequalities checked on random finite-element fields with `v(0) = 0`.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::sync::Arc;

use paraxfem::fem1d::{DofField, FeSpace, Mesh1D, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIELDS: usize = 200;
const SLACK: f64 = 1e-10;

fn jittered_mesh(rng: &mut ChaCha8Rng) -> Mesh1D {
    let n = rng.gen_range(2..30);
    let h = 1.0 / n as f64;
    let x = (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                i as f64 * h
            } else {
                (i as f64 + rng.gen_range(-0.3..0.3)) * h
            }
        })
        .collect();
    Mesh1D::from_nodes(x).unwrap()
}

fn random_field(rng: &mut ChaCha8Rng, space: Arc<FeSpace>) -> DofField<C64> {
    let c = (0..space.dof_count())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    DofField::new(space, c).unwrap()
}

fn hermite_fields() -> Vec<DofField<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..FIELDS)
        .map(|_| {
            let s = FeSpace::hermite(jittered_mesh(&mut rng));
            random_field(&mut rng, s)
        })
        .collect()
}

/// Largest `‖p'‖ / ‖p‖` over cubics on `[0, 1]`, via the derivative matrix in the
/// orthonormal Legendre basis and power iteration on `DᵀD`.
fn cubic_inverse_constant() -> f64 {
    let mut d = [[0.0f64; 4]; 4];
    for n in 0..4 {
        for k in 0..n {
            if (n - k) % 2 == 1 {
                d[k][n] = 2.0 * (((2 * n + 1) * (2 * k + 1)) as f64).sqrt();
            }
        }
    }
    let mut x = [1.0, 0.7, 0.5, 0.3];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let dx: Vec<f64> = (0..4)
            .map(|i| (0..4).map(|j| d[i][j] * x[j]).sum())
            .collect();
        let mut y = [0.0; 4];
        for j in 0..4 {
            y[j] = (0..4).map(|i| d[i][j] * dx[i]).sum();
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        lambda = norm / x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.map(|v| v / norm);
    }
    lambda.sqrt()
}

#[test]
fn trace_inequalities() {
    for v in hermite_fields() {
        let (v1, _) = v.boundary_eval();
        let (l2, h1) = (v.l2_norm(), v.h1_seminorm());
        assert!(v1.norm_sqr() <= 2.0 * l2 * h1 + SLACK);
        assert!(v1.norm() <= h1 + SLACK);
    }
}

#[test]
fn trace_with_weighted_split() {
    for (i, v) in hermite_fields().into_iter().enumerate() {
        let eps = 0.05 + 0.1 * (i % 20) as f64;
        let (v1, _) = v.boundary_eval();
        assert!(v1.norm_sqr() <= eps * v.h1_seminorm().powi(2) + v.l2_norm().powi(2) / eps + SLACK);
    }
}

#[test]
fn derivative_trace_inequality() {
    // w = v' is continuous and piecewise quadratic, with no condition at 0
    for v in hermite_fields() {
        let (_, dv1) = v.boundary_eval();
        let (w, dw) = (v.h1_seminorm(), v.h2_seminorm());
        assert!(dv1.norm_sqr() <= w * w + 2.0 * w * dw + SLACK);
    }
}

#[test]
fn sobolev_and_poincare() {
    for v in hermite_fields() {
        let h1 = v.h1_seminorm();
        assert!(v.max_abs_sampled() <= h1 + SLACK);
        assert!(v.l2_norm() <= 2.0 / PI * h1 + SLACK);
    }
}

#[test]
fn poincare_constant_is_sharp_in_the_limit() {
    let s = FeSpace::uniform(paraxfem::fem1d::Family::HermiteCubic, 40).unwrap();
    let v = DofField::interpolate(
        s,
        |x| C64::new((PI * x / 2.0).sin(), 0.0),
        |x| C64::new(PI / 2.0 * (PI * x / 2.0).cos(), 0.0),
    );
    let ratio = v.l2_norm() / v.h1_seminorm();
    assert!((ratio - 2.0 / PI).abs() < 1e-8);
}

#[test]
fn inverse_estimate() {
    let c = cubic_inverse_constant();
    assert!(
        c > 2.0 * 3f64.sqrt(),
        "a cubic is at least as steep as a line"
    );
    for v in hermite_fields() {
        let h = v.space().mesh().h_min();
        assert!(v.h1_seminorm() <= c / h * v.l2_norm() * (1.0 + 1e-12));
    }
}

#[test]
fn linear_fields_obey_the_same_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..FIELDS {
        let s = FeSpace::lagrange(jittered_mesh(&mut rng));
        let v = random_field(&mut rng, s);
        let (v1, _) = v.boundary_eval();
        let (l2, h1) = (v.l2_norm(), v.h1_seminorm());
        assert!(v1.norm_sqr() <= 2.0 * l2 * h1 + SLACK);
        assert!(l2 <= 2.0 / PI * h1 + SLACK);
        // linear: ‖v'‖ ≤ √12/h ‖v‖ elementwise
        assert!(h1 <= 12f64.sqrt() / v.space().mesh().h_min() * l2 * (1.0 + 1e-12));
    }
}
