use std::fmt;
use std::str::FromStr;

use crate::acoustics::{transform_initial_deriv, transmission_loss, WedgeEnvironment};
use crate::fem1d::{DofField, FeSpace, Mesh1D, C64};
use crate::ifd_pform::{
    build_p_initial, recover_w, PStepContext, StabilityMonitor, ZetaCoefficients, DEFAULT_EPS_SIGMA,
};
use crate::schrodinger::{
    init_neumann, BoundaryMode, CnStepContext, RunOptions, Termination, TimeGrid,
};

use super::HarnessError;

/// Bottom treatment of a wedge run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WedgeModel {
    /// Dynamical Neumann condition.
    N,
    /// Abrahamsson-Kreiss condition.
    AK,
    /// p-formulation of the dynamical condition.
    IFDP,
}

impl fmt::Display for WedgeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WedgeModel::N => "N",
            WedgeModel::AK => "AK",
            WedgeModel::IFDP => "IFDP",
        })
    }
}

impl FromStr for WedgeModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "N" => Ok(WedgeModel::N),
            "AK" => Ok(WedgeModel::AK),
            "IFDP" => Ok(WedgeModel::IFDP),
            _ => Err(format!("unknown model '{s}' (expected N, AK or IFDP)")),
        }
    }
}

/// The two benchmark wedges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slope {
    Up,
    Down,
}

impl Slope {
    pub fn environment(self) -> WedgeEnvironment {
        match self {
            Slope::Up => WedgeEnvironment::asa_upslope(),
            Slope::Down => WedgeEnvironment::asa_downslope(),
        }
    }

    /// Receiver depth in metres.
    pub fn receiver_depth(self) -> f64 {
        match self {
            Slope::Up => 90.0,
            Slope::Down => 25.0,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slope::Up => "up",
            Slope::Down => "down",
        })
    }
}

impl FromStr for Slope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "up" => Ok(Slope::Up),
            "down" => Ok(Slope::Down),
            _ => Err(format!("unknown direction '{s}' (expected up or down)")),
        }
    }
}

/// One wedge run.
#[derive(Debug, Clone)]
pub struct WedgeRun {
    pub model: WedgeModel,
    pub env: WedgeEnvironment,
    pub depth_m: f64,
    /// Elements across the strip.
    pub elements: usize,
    /// Range steps over `[0, T]`.
    pub steps: usize,
    /// TL is sampled at step levels with `0 < r ≤ r_max_m`.
    pub r_max_m: f64,
    /// Keep every `sample_every`-th step level.
    pub sample_every: usize,
    /// Stop once the norm exceeds this multiple of the initial one.
    pub growth_limit: f64,
}

impl WedgeRun {
    /// Benchmark setup: receiver at the usual depth, TL up to 2200 m, growth limit `10⁶`.
    pub fn asa(model: WedgeModel, slope: Slope, elements: usize, steps: usize) -> Self {
        WedgeRun {
            model,
            env: slope.environment(),
            depth_m: slope.receiver_depth(),
            elements,
            steps,
            r_max_m: 2200.0,
            sample_every: 1,
            growth_limit: 1e6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlSample {
    pub r_m: f64,
    pub tl_db: f64,
}

/// TL series of one run plus its norm monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeReport {
    pub model: WedgeModel,
    pub depth_m: f64,
    pub samples: Vec<TlSample>,
    pub initial_norm: f64,
    pub max_norm: f64,
    pub final_norm: f64,
    /// Set when the growth limit stopped the run.
    pub unstable: Option<Termination>,
}

impl WedgeReport {
    /// `max_n ‖U^n‖ / ‖U⁰‖`.
    pub fn max_norm_ratio(&self) -> f64 {
        self.max_norm / self.initial_norm
    }

    pub fn monitor(&self) -> StabilityMonitor {
        StabilityMonitor::from_norms(&[self.initial_norm, self.max_norm])
    }
}

/// Runs the wedge model and samples TL at the receiver depth.
pub fn asa_wedge(run: &WedgeRun) -> Result<WedgeReport, HarnessError> {
    run.env.validate()?;
    if run.elements == 0 || run.steps == 0 {
        return Err(HarnessError::Invalid(
            "elements and steps must be positive".into(),
        ));
    }
    let env = &run.env;
    let mesh = Mesh1D::uniform(run.elements)?;
    let grid = TimeGrid::uniform(env.t_max(), run.steps)?;
    let opts = RunOptions {
        snapshot_every: 0,
        growth_limit: Some(run.growth_limit),
    };
    let k0 = env.k0();
    let stride = run.sample_every.max(1);
    let mut samples = Vec::new();
    let mut record = |t: f64, psi: C64| {
        samples.push(TlSample {
            r_m: t / k0,
            tl_db: transmission_loss(psi.norm(), t / k0),
        });
    };
    let wanted = |i: usize, t: f64| {
        i > 0 && i.is_multiple_of(stride) && t / k0 <= run.r_max_m * (1.0 + 1e-12)
    };
    let depth = run.depth_m;
    let mut failure = None;

    let history = match run.model {
        WedgeModel::N | WedgeModel::AK => {
            let space = FeSpace::lagrange(mesh);
            let psi_ref = env.psi_ref(space.mesh(), &space.default_quadrature());
            let (w0, dw0) = env.w0(psi_ref);
            let du0 = transform_initial_deriv(
                &env.profile(),
                |y| C64::new(w0(y), 0.0),
                |y| C64::new(dw0(y), 0.0),
            );
            let u0: DofField<C64> = init_neumann(&space, du0)?;
            let mode = match run.model {
                WedgeModel::N => BoundaryMode::NeumannDynamical,
                _ => BoundaryMode::AbrahamssonKreiss,
            };
            let ctx = CnStepContext::new(space, env.coefficients(), grid, mode)?;
            let rec = env.recovery(psi_ref);
            ctx.run_observed(u0, opts, |i, t, u| {
                if wanted(i, t) {
                    match rec.psi(t / k0, depth, |x| u.eval(x)) {
                        Ok(psi) => record(t, psi),
                        Err(e) => failure = failure.take().or(Some(e)),
                    }
                }
            })?
        }
        WedgeModel::IFDP => {
            let space = FeSpace::lagrange_unpinned(mesh);
            let psi_ref = env.psi_ref(space.mesh(), &space.default_quadrature());
            let (w0, dw0) = env.w0(psi_ref);
            let zc = ZetaCoefficients::new(env.profile(), env.g(), DEFAULT_EPS_SIGMA)?;
            let p0 = build_p_initial(
                &space,
                &zc,
                |y| C64::new(w0(y), 0.0),
                |y| C64::new(dw0(y), 0.0),
            )?;
            let ctx = PStepContext::new(space, zc.clone(), grid)?;
            let rec = env.recovery(psi_ref);
            ctx.run_observed(p0, opts, |i, t, p| {
                if wanted(i, t) {
                    let w = recover_w(&zc, t, p);
                    match rec.psi_from_w(t / k0, depth, &w) {
                        Ok(psi) => record(t, psi),
                        Err(e) => failure = failure.take().or(Some(e)),
                    }
                }
            })?
        }
    };
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(WedgeReport {
        model: run.model,
        depth_m: depth,
        samples,
        initial_norm: history.initial_norm(),
        max_norm: history.max_norm(),
        final_norm: history.final_norm(),
        unstable: history.terminated,
    })
}

/// Points excluded around nulls: every local TL maximum with prominence at least
/// `prominence_db` is a null, and the contiguous run of points within
/// `band_db` of it is masked.
pub fn null_mask(tl: &[f64], prominence_db: f64, band_db: f64) -> Vec<bool> {
    let n = tl.len();
    let mut mask = vec![false; n];
    for i in 1..n.saturating_sub(1) {
        if !(tl[i] > tl[i - 1] && tl[i] >= tl[i + 1]) {
            continue;
        }
        if prominence(tl, i) < prominence_db {
            continue;
        }
        let floor = tl[i] - band_db;
        mask[i] = true;
        let mut j = i;
        while j > 0 && tl[j - 1] >= floor {
            j -= 1;
            mask[j] = true;
        }
        let mut j = i;
        while j + 1 < n && tl[j + 1] >= floor {
            j += 1;
            mask[j] = true;
        }
    }
    mask
}

/// Topographic prominence of the peak at `i`: its height above the higher of the
/// two minima reached before a higher point (or the end) on either side.
fn prominence(tl: &[f64], i: usize) -> f64 {
    let peak = tl[i];
    let mut left_min = peak;
    for &v in tl[..i].iter().rev() {
        if v > peak {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = peak;
    for &v in &tl[i + 1..] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}

/// Null-masked comparison of two TL series.
#[derive(Debug, Clone, PartialEq)]
pub struct TlComparison {
    /// Common ranges found in both series.
    pub compared: usize,
    /// Common ranges outside the null mask of either series.
    pub kept: usize,
    pub max_abs_diff_db: f64,
    pub mean_abs_diff_db: f64,
    /// Kept points whose difference exceeds the tolerance passed to [`compare_tl`].
    pub exceeding: usize,
    /// Largest difference among kept points with TL below `quiet_db` in both series.
    pub max_abs_diff_loud_db: f64,
}

/// Null prominence and band in dB.
pub const NULL_PROMINENCE_DB: f64 = 3.0;
pub const NULL_BAND_DB: f64 = 3.0;

/// Compares `a` with `b` at the ranges they share (matched to a relative `1e-9`).
/// `b` may be sampled more finely than `a`.
pub fn compare_tl(a: &[TlSample], b: &[TlSample], tol_db: f64, quiet_db: f64) -> TlComparison {
    let mut pairs = Vec::new();
    let mut j = 0;
    for sa in a {
        while j < b.len() && b[j].r_m < sa.r_m * (1.0 - 1e-9) {
            j += 1;
        }
        if j < b.len() && (b[j].r_m - sa.r_m).abs() <= 1e-9 * sa.r_m.abs().max(1.0) {
            pairs.push((sa.tl_db, b[j].tl_db));
        }
    }
    let ta: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let tb: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (ma, mb) = (
        null_mask(&ta, NULL_PROMINENCE_DB, NULL_BAND_DB),
        null_mask(&tb, NULL_PROMINENCE_DB, NULL_BAND_DB),
    );
    let mut kept = 0;
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut exceeding = 0;
    let mut loud = 0.0f64;
    for i in 0..pairs.len() {
        if ma[i] || mb[i] {
            continue;
        }
        let d = (ta[i] - tb[i]).abs();
        kept += 1;
        max = max.max(d);
        sum += d;
        if d > tol_db {
            exceeding += 1;
        }
        if ta[i] < quiet_db && tb[i] < quiet_db {
            loud = loud.max(d);
        }
    }
    TlComparison {
        compared: pairs.len(),
        kept,
        max_abs_diff_db: max,
        mean_abs_diff_db: if kept > 0 { sum / kept as f64 } else { 0.0 },
        exceeding,
        max_abs_diff_loud_db: loud,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(tl: &[f64]) -> Vec<TlSample> {
        tl.iter()
            .enumerate()
            .map(|(i, &tl_db)| TlSample {
                r_m: (i + 1) as f64,
                tl_db,
            })
            .collect()
    }

    #[test]
    fn null_mask_covers_prominent_peaks_only() {
        let tl = [50.0, 52.0, 60.0, 58.0, 51.0, 50.0, 51.0, 50.5, 50.0];
        let m = null_mask(&tl, 3.0, 3.0);
        assert_eq!(
            m,
            [false, false, true, true, false, false, false, false, false]
        );
    }

    #[test]
    fn prominence_stops_at_higher_ground() {
        let tl = [70.0, 60.0, 62.0, 61.0, 80.0];
        assert_eq!(prominence(&tl, 2), 1.0);
    }

    #[test]
    fn comparison_ignores_nulls_and_unmatched_ranges() {
        let a = series(&[50.0, 51.0, 70.0, 51.0, 50.0]);
        let mut b = series(&[50.5, 51.0, 90.0, 51.0, 50.0]);
        b.push(TlSample {
            r_m: 10.0,
            tl_db: 0.0,
        });
        let c = compare_tl(&a, &b, 0.4, 80.0);
        assert_eq!(c.compared, 5);
        assert_eq!(c.kept, 4);
        assert!((c.max_abs_diff_db - 0.5).abs() < 1e-12);
        assert_eq!(c.exceeding, 1);
    }

    #[test]
    fn finer_series_is_matched_by_range() {
        let a = series(&[40.0, 41.0, 42.0]);
        let b: Vec<TlSample> = (1..=6)
            .map(|i| TlSample {
                r_m: i as f64 * 0.5,
                tl_db: 40.0 + (i as f64 * 0.5 - 1.0),
            })
            .collect();
        let c = compare_tl(&a, &b, 0.1, 100.0);
        assert_eq!(c.compared, 3);
        assert_eq!(c.max_abs_diff_db, 0.0);
    }

    #[test]
    fn parses_models_and_slopes() {
        for m in [WedgeModel::N, WedgeModel::AK, WedgeModel::IFDP] {
            assert_eq!(m.to_string().parse::<WedgeModel>().unwrap(), m);
        }
        assert_eq!("down".parse::<Slope>().unwrap(), Slope::Down);
        assert!("sideways".parse::<Slope>().is_err());
    }

    #[test]
    fn short_upslope_runs_agree_near_the_source() {
        let mut reports = Vec::new();
        for model in [WedgeModel::N, WedgeModel::AK, WedgeModel::IFDP] {
            let mut run = WedgeRun::asa(model, Slope::Up, 200, 2000);
            run.r_max_m = 300.0;
            reports.push(asa_wedge(&run).unwrap());
        }
        for r in &reports {
            assert!(!r.samples.is_empty());
            assert!(r.unstable.is_none());
            assert!(r
                .samples
                .iter()
                .all(|s| s.r_m <= 300.0 + 1e-9 && s.tl_db.is_finite()));
        }
        let c = compare_tl(&reports[0].samples, &reports[2].samples, 0.5, 80.0);
        assert!(c.max_abs_diff_db < 0.5, "{c:?}");
    }
}
