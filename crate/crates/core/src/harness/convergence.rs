use super::manufactured::{BottomCase, ManufacturedProblem, ParabolicManufactured};
use super::parallel::parallel_map;
use crate::fem1d::{Family, FeSpace, C64};
use crate::parabolic::{init_dissipative, init_reactive, DissipativeStepper, ReactiveStepper};
use crate::schrodinger::{
    init_ak, init_neumann, BoundaryMode, CnStepContext, InitialProjection, RunOptions, TimeGrid,
};

/// Norm in which a study measures the error at the final time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorNorm {
    /// Discrete `l²` over the nodes, `(h Σ |e_i|²)^{1/2}`.
    NodalL2,
    L2,
    H1,
}

/// One refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceLevel {
    pub h: f64,
    pub k: f64,
    pub error: f64,
    /// `log2(e_h / e_{h/2})` against the next level, when that level halves `h`.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub norm: ErrorNorm,
    pub levels: Vec<ConvergenceLevel>,
    /// Levels whose solve failed, by element count.
    pub failures: Vec<(usize, String)>,
}

impl ConvergenceReport {
    /// Builds the report from `(elements, steps, error)` in refinement order.
    pub fn from_runs(
        norm: ErrorNorm,
        runs: Vec<(usize, usize, Result<f64, String>)>,
        t_end: f64,
    ) -> Self {
        let mut levels: Vec<ConvergenceLevel> = Vec::new();
        let mut failures = Vec::new();
        for (n, steps, e) in runs {
            match e {
                Ok(error) => levels.push(ConvergenceLevel {
                    h: 1.0 / n as f64,
                    k: t_end / steps as f64,
                    error,
                    rate: None,
                }),
                Err(msg) => failures.push((n, msg)),
            }
        }
        for i in 0..levels.len().saturating_sub(1) {
            let (a, b) = (&levels[i], &levels[i + 1]);
            if (a.h / b.h - 2.0).abs() < 1e-9 {
                levels[i].rate = Some((a.error / b.error).log2());
            }
        }
        ConvergenceReport {
            norm,
            levels,
            failures,
        }
    }

    /// Rate at the level with mesh size `h`.
    pub fn rate_at(&self, h: f64) -> Option<f64> {
        self.levels
            .iter()
            .find(|l| (l.h / h - 1.0).abs() < 1e-9)
            .and_then(|l| l.rate)
    }
}

/// Strip manufactured study with `k = h`, `T = 1`, errors in the nodal `l²` norm.
///
/// `elements` lists `1/h` per level; include one extra halving to get a rate
/// at the last level of interest.
pub fn strip_study(
    case: BottomCase,
    mode: BoundaryMode,
    elements: &[usize],
    threads: usize,
) -> ConvergenceReport {
    let problem = ManufacturedProblem::strip(case, mode);
    let runs = parallel_map(elements, threads, |&n| {
        (n, n, solve_strip(&problem, n).map_err(|e| e.to_string()))
    });
    ConvergenceReport::from_runs(ErrorNorm::NodalL2, runs, problem.t_end)
}

/// Final-time nodal error of one level of [`strip_study`].
pub fn solve_strip(
    problem: &ManufacturedProblem,
    n: usize,
) -> Result<f64, crate::schrodinger::SchrodingerError> {
    let space = FeSpace::uniform(Family::LagrangeLinear, n)?;
    let grid = TimeGrid::uniform(problem.t_end, n)?;
    let du0 = {
        let u_x = problem.u_x.clone();
        move |x: f64| u_x(0.0, x)
    };
    let u0 = match problem.mode {
        BoundaryMode::NeumannDynamical => init_neumann(&space, du0)?,
        BoundaryMode::AbrahamssonKreiss => {
            let u = problem.u.clone();
            init_ak(&space, InitialProjection::Elliptic, move |x| u(0.0, x), du0)?
        }
    };
    let ctx = CnStepContext::new(space, problem.coeffs.clone(), grid, problem.mode)?;
    let h = ctx.run(u0, RunOptions::default())?;
    let t = problem.t_end;
    Ok(h.last.nodal_l2_error(|x| (problem.u)(t, x)))
}

/// Paper table study: levels `1/100 … 1/800` plus `1/1600` for the last rate.
pub fn rate_table_study(case: BottomCase, mode: BoundaryMode, threads: usize) -> ConvergenceReport {
    strip_study(case, mode, &TABLE_LEVELS, threads)
}

pub const TABLE_LEVELS: [usize; 5] = [100, 200, 400, 800, 1600];

/// Dissipative manufactured study with `k = h`; returns the `L²` and `H¹` reports.
pub fn dissipative_study(
    elements: &[usize],
    threads: usize,
) -> (ConvergenceReport, ConvergenceReport) {
    let p = ParabolicManufactured::dissipative();
    let runs = parallel_map(elements, threads, |&n| {
        let r = (|| {
            let space = FeSpace::uniform(Family::LagrangeLinear, n)?;
            let st = DissipativeStepper::new(
                space.clone(),
                p.coeffs.clone(),
                TimeGrid::uniform(p.t_end, n)?,
            )?;
            let u_x = p.u_x.clone();
            let u0 = init_dissipative(&space, move |x| u_x(0.0, x))?;
            let last = st.run(u0, RunOptions::default())?.last;
            let t = p.t_end;
            Ok::<_, crate::parabolic::ParabolicError>((
                last.l2_error(|x| (p.u)(t, x)),
                last.h1_error(|x| (p.u_x)(t, x)),
            ))
        })();
        (n, r.map_err(|e| e.to_string()))
    });
    split_reports(runs, |n| n, p.t_end)
}

/// Reactive manufactured study with `k ≈ h^{3/2}` on Hermite cubics; `H¹` errors.
pub fn reactive_study(
    problem: &ParabolicManufactured,
    elements: &[usize],
    threads: usize,
) -> ConvergenceReport {
    let runs = parallel_map(elements, threads, |&n| {
        let steps = reactive_steps(n);
        let r = (|| {
            let space = FeSpace::uniform(Family::HermiteCubic, n)?;
            let grid = TimeGrid::uniform(problem.t_end, steps)?;
            let st = ReactiveStepper::new(space.clone(), problem.coeffs.clone(), grid)?;
            let (u_x, u_xx) = (problem.u_x.clone(), problem.u_xx.clone());
            let u0 = init_reactive(&space, move |x| u_x(0.0, x), move |x| u_xx(0.0, x))?;
            let last = st.run(u0, RunOptions::default())?.last;
            let t = problem.t_end;
            Ok::<_, crate::parabolic::ParabolicError>(last.h1_error(|x| (problem.u_x)(t, x)))
        })();
        (n, steps, r.map_err(|e| e.to_string()))
    });
    ConvergenceReport::from_runs(ErrorNorm::H1, runs, problem.t_end)
}

/// Step count with `k = h^{3/2}` rounded to the nearest integer.
pub fn reactive_steps(elements: usize) -> usize {
    ((elements as f64).powf(1.5).round() as usize).max(1)
}

/// Elements and the `(L², H¹)` errors of one level.
type NormPairRun = (usize, Result<(f64, f64), String>);

fn split_reports(
    runs: Vec<NormPairRun>,
    steps: impl Fn(usize) -> usize,
    t_end: f64,
) -> (ConvergenceReport, ConvergenceReport) {
    let l2 = runs
        .iter()
        .map(|(n, r)| (*n, steps(*n), r.clone().map(|e| e.0)))
        .collect();
    let h1 = runs
        .iter()
        .map(|(n, r)| (*n, steps(*n), r.clone().map(|e| e.1)))
        .collect();
    (
        ConvergenceReport::from_runs(ErrorNorm::L2, l2, t_end),
        ConvergenceReport::from_runs(ErrorNorm::H1, h1, t_end),
    )
}

/// `‖R_h u0‖` for `u0 = −x(x−1)³` on `n` linear elements.
pub fn initial_norm(n: usize) -> Result<f64, crate::fem1d::FemError> {
    let space = FeSpace::uniform(Family::LagrangeLinear, n)?;
    let u0 = crate::fem1d::elliptic_project(&space, |x: f64| {
        C64::new(-(x - 1.0).powi(3) - 3.0 * x * (x - 1.0).powi(2), 0.0)
    })?;
    Ok(u0.l2_norm())
}
