use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::{
    wedge_coefficients, AcousticsError, BottomProfile, CoefficientSet, FieldFn, TimeFn, TL_CLIP_DB,
};
use crate::fem1d::{Mesh1D, QuadratureRule, C64, I};

/// Bottom depth `ℓ(r)` in metres with its range derivatives.
#[derive(Clone)]
pub struct Bathymetry {
    pub l: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub l_dot: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub l_ddot: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Bathymetry {
    /// `ℓ(r) = depth0 + slope·r`.
    pub fn linear(depth0: f64, slope: f64) -> Self {
        Bathymetry {
            l: Arc::new(move |r| depth0 + slope * r),
            l_dot: Arc::new(move |_| slope),
            l_ddot: Arc::new(|_| 0.0),
        }
    }
}

/// A range-dependent waveguide with a rigid bottom.
#[derive(Clone)]
pub struct WedgeEnvironment {
    pub f0: f64,
    pub c0: f64,
    pub zs: f64,
    pub range_max: f64,
    pub bathymetry: Bathymetry,
    /// Bottom admittance parameter in 1/m.
    pub g_b: C64,
    /// Index-of-refraction term `γ(t, y)` in dimensionless variables; `None` is zero.
    pub gamma: Option<FieldFn<C64>>,
}

impl fmt::Debug for WedgeEnvironment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WedgeEnvironment")
            .field("f0", &self.f0)
            .field("c0", &self.c0)
            .field("zs", &self.zs)
            .field("range_max", &self.range_max)
            .field("depth0", &(self.bathymetry.l)(0.0))
            .field("g_b", &self.g_b)
            .finish_non_exhaustive()
    }
}

impl WedgeEnvironment {
    /// Linear bottom with constant sound speed, no attenuation and `g_B = i k0`.
    pub fn linear(f0: f64, c0: f64, zs: f64, depth0: f64, slope: f64, range_max: f64) -> Self {
        let k0 = 2.0 * PI * f0 / c0;
        WedgeEnvironment {
            f0,
            c0,
            zs,
            range_max,
            bathymetry: Bathymetry::linear(depth0, slope),
            g_b: I * k0,
            gamma: None,
        }
    }

    /// 25 Hz, `ℓ = 200 − 0.05 r` over 3339 m, source at 100 m.
    pub fn asa_upslope() -> Self {
        Self::linear(25.0, 1500.0, 100.0, 200.0, -0.05, 3339.0)
    }

    /// 25 Hz, `ℓ = 33.05 + 0.05 r` over 3339 m, source at 25 m.
    pub fn asa_downslope() -> Self {
        Self::linear(25.0, 1500.0, 25.0, 33.05, 0.05, 3339.0)
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI * self.f0 / self.c0
    }

    pub fn depth(&self, r: f64) -> f64 {
        (self.bathymetry.l)(r)
    }

    /// Final dimensionless range `T = k0 · range_max`.
    pub fn t_max(&self) -> f64 {
        self.k0() * self.range_max
    }

    pub fn validate(&self) -> Result<(), AcousticsError> {
        let bad = |m: &str| Err(AcousticsError::InvalidEnvironment(m.into()));
        if !(self.f0 > 0.0) || !(self.c0 > 0.0) {
            return bad("f0 and c0 must be positive");
        }
        if !(self.range_max > 0.0) {
            return bad("range must be positive");
        }
        for i in 0..=1000 {
            let r = self.range_max * i as f64 / 1000.0;
            let d = self.depth(r);
            if !(d > 0.0) {
                return Err(AcousticsError::NonPositiveDepth { r, depth: d });
            }
        }
        if !(self.zs > 0.0 && self.zs < self.depth(0.0)) {
            return bad("source depth must lie strictly inside the initial water column");
        }
        Ok(())
    }

    /// `s(t) = k0 ℓ(t/k0)`.
    pub fn profile(&self) -> BottomProfile {
        let k0 = self.k0();
        let (l, ld, ldd) = (
            self.bathymetry.l.clone(),
            self.bathymetry.l_dot.clone(),
            self.bathymetry.l_ddot.clone(),
        );
        BottomProfile::new(
            "wedge",
            move |t| k0 * l(t / k0),
            move |t| ld(t / k0),
            move |t| ldd(t / k0) / k0,
        )
    }

    /// Dimensionless bottom coefficient `g(t) = g_B(t/k0) / k0`.
    pub fn g(&self) -> TimeFn<C64> {
        let g = self.g_b / self.k0();
        Arc::new(move |_| g)
    }

    pub fn coefficients(&self) -> CoefficientSet {
        wedge_coefficients(&self.profile(), self.gamma.clone(), self.g())
    }

    /// Gaussian starter with its image source, `ψ0(z)`.
    pub fn source(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let (k0, zs) = (self.k0(), self.zs);
        let amp = (k0 / 2.0).sqrt();
        let c = k0 * k0 / 4.0;
        move |z| amp * ((-(z - zs).powi(2) * c).exp() - (-(z + zs).powi(2) * c).exp())
    }

    /// `ψ0'(z)`.
    pub fn source_dz(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let (k0, zs) = (self.k0(), self.zs);
        let amp = (k0 / 2.0).sqrt();
        let c = k0 * k0 / 4.0;
        move |z| {
            amp * (-2.0 * c * (z - zs) * (-(z - zs).powi(2) * c).exp()
                + 2.0 * c * (z + zs) * (-(z + zs).powi(2) * c).exp())
        }
    }

    /// `max |ψ0|` over the quadrature points of `mesh` mapped to the initial column.
    pub fn psi_ref(&self, mesh: &Mesh1D, rule: &QuadratureRule) -> f64 {
        let psi0 = self.source();
        let d0 = self.depth(0.0);
        let mut m: f64 = 0.0;
        for e in 0..mesh.element_count() {
            let (a, b) = mesh.element(e);
            for &xi in &rule.points {
                m = m.max(psi0((a + (b - a) * xi) * d0).abs());
            }
        }
        m
    }

    /// Dimensionless starter `w0(y) = ψ0(y/k0)/ψ_ref` and its derivative.
    pub fn w0(
        &self,
        psi_ref: f64,
    ) -> (
        impl Fn(f64) -> f64 + Send + Sync + 'static,
        impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) {
        let k0 = self.k0();
        let (p, dp) = (self.source(), self.source_dz());
        (
            move |y| p(y / k0) / psi_ref,
            move |y| dp(y / k0) / (k0 * psi_ref),
        )
    }

    pub fn recovery(&self, psi_ref: f64) -> FieldRecovery {
        FieldRecovery {
            k0: self.k0(),
            profile: self.profile(),
            psi_ref,
        }
    }
}

/// `u0(x) = exp(−i δ(0) x²) w0(x s(0))`.
pub fn transform_initial(profile: &BottomProfile, w0: impl Fn(f64) -> C64) -> impl Fn(f64) -> C64 {
    let (d0, s0) = (profile.delta(0.0), profile.s(0.0));
    move |x| (-I * d0 * x * x).exp() * w0(x * s0)
}

/// `u0'(x)` for [`transform_initial`].
pub fn transform_initial_deriv(
    profile: &BottomProfile,
    w0: impl Fn(f64) -> C64,
    dw0: impl Fn(f64) -> C64,
) -> impl Fn(f64) -> C64 {
    let (d0, s0) = (profile.delta(0.0), profile.s(0.0));
    move |x| (-I * d0 * x * x).exp() * (-2.0 * I * d0 * x * w0(x * s0) + s0 * dw0(x * s0))
}

/// Maps strip solutions back to the physical field `ψ(r, z)`.
#[derive(Debug, Clone)]
pub struct FieldRecovery {
    pub k0: f64,
    pub profile: BottomProfile,
    pub psi_ref: f64,
}

impl FieldRecovery {
    /// Strip coordinate of depth `z` at range `r`.
    pub fn strip_x(&self, r: f64, z: f64) -> Result<f64, AcousticsError> {
        let t = self.k0 * r;
        let s = self.profile.s(t);
        let depth = s / self.k0;
        if z < 0.0 || z > depth * (1.0 + 1e-12) {
            return Err(AcousticsError::OutsideWaterColumn { r, z, depth });
        }
        Ok((z * self.k0 / s).min(1.0))
    }

    /// `ψ(r, z) = ψ_ref exp(i δ(t) x²) u(t, x)` with `t = k0 r`, `x = k0 z / s(t)`.
    pub fn psi(&self, r: f64, z: f64, u: impl Fn(f64) -> C64) -> Result<C64, AcousticsError> {
        let x = self.strip_x(r, z)?;
        let delta = self.profile.delta(self.k0 * r);
        Ok(self.psi_ref * (I * delta * x * x).exp() * u(x))
    }

    /// `ψ(r, z) = ψ_ref w(t, x s(t))` from a strip function already free of the phase.
    pub fn psi_from_w(
        &self,
        r: f64,
        z: f64,
        w: impl Fn(f64) -> C64,
    ) -> Result<C64, AcousticsError> {
        Ok(self.psi_ref * w(self.strip_x(r, z)?))
    }
}

/// `TL = −20 log10 |ψ| + 10 log10 r` in dB; `|ψ| = 0` maps to [`TL_CLIP_DB`].
pub fn transmission_loss(psi_abs: f64, r: f64) -> f64 {
    if psi_abs == 0.0 {
        return TL_CLIP_DB;
    }
    (-20.0 * psi_abs.log10() + 10.0 * r.log10()).min(TL_CLIP_DB)
}
