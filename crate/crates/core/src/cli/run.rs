use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{Model, Params, RunConfig};
use super::report::{fmt_num, write_report, GrowthRow, Report, ReportError};
use crate::fem1d::{Family, FeSpace};
use crate::harness::{
    asa_wedge, dissipative_study, growth_study, parallel_map, reactive_study, strip_study,
    GrowthReport, ManufacturedProblem, ParabolicManufactured, WedgeModel, WedgeReport, WedgeRun,
};
use crate::parabolic::{init_dissipative, init_reactive, DissipativeStepper, ReactiveStepper};
use crate::schrodinger::{init_neumann, BoundaryMode, CnStepContext, RunOptions, TimeGrid};

/// What a batch produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub runs: usize,
    pub completed: usize,
    /// Runs stopped by the growth limit; they still count as completed.
    pub flagged: usize,
    pub files: Vec<PathBuf>,
    /// `key = value` lines for the manifest.
    pub summary: Vec<(String, String)>,
}

impl Outcome {
    pub fn all_completed(&self) -> bool {
        self.completed == self.runs
    }
}

/// Runs `config`, writing CSV reports and `manifest.txt` into `out`.
pub fn execute(config: &RunConfig, out: &Path, threads: usize) -> Result<Outcome, ReportError> {
    fs::create_dir_all(out).map_err(|source| ReportError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let mut o = Outcome::default();
    let emit = |o: &mut Outcome, name: &str, report: Report| -> Result<(), ReportError> {
        let path = out.join(name);
        write_report(&report, &path)?;
        o.files.push(path);
        Ok(())
    };

    match &config.params {
        Params::Converge { case, levels } => {
            let model = config.models[0];
            let reports = match model {
                Model::Wedge(m) => {
                    let mode = boundary_mode(m);
                    vec![("converge.csv", strip_study(*case, mode, levels, threads))]
                }
                Model::ParabolicDissipative => {
                    let (l2, h1) = dissipative_study(levels, threads);
                    vec![("converge_l2.csv", l2), ("converge_h1.csv", h1)]
                }
                Model::ParabolicReactive => {
                    let p = ParabolicManufactured::reactive_transcendental();
                    vec![("converge.csv", reactive_study(&p, levels, threads))]
                }
            };
            // every level is one run; a level reported in several norms counts once
            o.runs = levels.len();
            o.completed = levels.len() - reports[0].1.failures.len();
            for (n, msg) in &reports[0].1.failures {
                o.summary.push((format!("failed_level_{n}"), msg.clone()));
            }
            for (name, r) in reports {
                emit(&mut o, name, Report::from(&r))?;
            }
        }
        Params::Wedge {
            direction,
            elements,
            steps,
            depth_m,
            range_m,
            sample_every,
            growth_limit,
        } => {
            let runs: Vec<WedgeRun> = config
                .models
                .iter()
                .map(|m| {
                    let Model::Wedge(m) = m else {
                        unreachable!("validated by parse_config")
                    };
                    let mut run = WedgeRun::asa(*m, *direction, *elements, *steps);
                    run.depth_m = depth_m.unwrap_or(run.depth_m);
                    run.r_max_m = *range_m;
                    run.sample_every = *sample_every;
                    run.growth_limit = *growth_limit;
                    run
                })
                .collect();
            let results = parallel_map(&runs, threads, asa_wedge);
            o.runs = runs.len();
            let mut done: Vec<WedgeReport> = Vec::new();
            for (run, r) in runs.iter().zip(results) {
                match r {
                    Ok(rep) => {
                        o.completed += 1;
                        if let Some(t) = &rep.unstable {
                            o.flagged += 1;
                            o.summary.push((
                                format!("flag_{}", rep.model),
                                format!(
                                    "unstable at step {} (t={}, norm ratio {})",
                                    t.step,
                                    fmt_num(t.t),
                                    fmt_num(t.norm_ratio)
                                ),
                            ));
                        }
                        o.summary.push((
                            format!("max_norm_ratio_{}", rep.model),
                            fmt_num(rep.max_norm_ratio()),
                        ));
                        done.push(rep);
                    }
                    Err(e) => o
                        .summary
                        .push((format!("failed_{}", run.model), e.to_string())),
                }
            }
            emit(&mut o, "wedge.csv", Report::from(&done[..]))?;
        }
        Params::Growth { profiles, elements } => {
            let results = parallel_map(profiles, threads, |&p| growth_study(p, *elements));
            o.runs = profiles.len();
            let mut done: Vec<GrowthReport> = Vec::new();
            for (p, r) in profiles.iter().zip(results) {
                match r {
                    Ok(rep) => {
                        o.completed += 1;
                        let onset = rep.onset().map(fmt_num).unwrap_or_else(|| "none".into());
                        o.summary.push((
                            format!("profile_{p}"),
                            format!(
                                "final={} peak={} onset={onset}",
                                fmt_num(rep.final_norm()),
                                fmt_num(rep.peak())
                            ),
                        ));
                        done.push(rep);
                    }
                    Err(e) => o.summary.push((format!("failed_{p}"), e.to_string())),
                }
            }
            emit(&mut o, "growth.csv", Report::from(&done[..]))?;
        }
        Params::Solve {
            case,
            elements,
            steps,
        } => {
            let model = config.models[0];
            o.runs = 1;
            match solve_one(model, *case, *elements, *steps) {
                Ok((times, norms, error)) => {
                    o.completed = 1;
                    o.summary.push(("final_error".into(), fmt_num(error)));
                    let rows = times
                        .into_iter()
                        .zip(norms)
                        .map(|(t, l2_norm)| GrowthRow {
                            t,
                            l2_norm,
                            profile: model.to_string(),
                        })
                        .collect();
                    emit(&mut o, "solve.csv", Report::Growth(rows))?;
                }
                Err(e) => o.summary.push(("failed".into(), e)),
            }
        }
    }
    write_manifest(config, &o, out)?;
    Ok(o)
}

fn boundary_mode(m: WedgeModel) -> BoundaryMode {
    match m {
        WedgeModel::AK => BoundaryMode::AbrahamssonKreiss,
        _ => BoundaryMode::NeumannDynamical,
    }
}

type Trajectory = (Vec<f64>, Vec<f64>, f64);

/// One manufactured run: norm trajectory and final-time error
/// (nodal `l²` for the strip problem, `L²` or `H¹` for the parabolic ones).
fn solve_one(
    model: Model,
    case: crate::harness::BottomCase,
    n: usize,
    steps: usize,
) -> Result<Trajectory, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match model {
        Model::Wedge(m) => {
            let p = ManufacturedProblem::strip(case, boundary_mode(m));
            let space = FeSpace::uniform(Family::LagrangeLinear, n).map_err(|e| err(&e))?;
            let grid = TimeGrid::uniform(p.t_end, steps).map_err(|e| err(&e))?;
            let u_x = p.u_x.clone();
            let u0 = init_neumann(&space, move |x| u_x(0.0, x)).map_err(|e| err(&e))?;
            let ctx =
                CnStepContext::new(space, p.coeffs.clone(), grid, p.mode).map_err(|e| err(&e))?;
            let h = ctx.run(u0, RunOptions::default()).map_err(|e| err(&e))?;
            let e = h.last.nodal_l2_error(|x| (p.u)(p.t_end, x));
            Ok((h.times, h.l2_norms, e))
        }
        Model::ParabolicDissipative => {
            let p = ParabolicManufactured::dissipative();
            let space = FeSpace::uniform(Family::LagrangeLinear, n).map_err(|e| err(&e))?;
            let grid = TimeGrid::uniform(p.t_end, steps).map_err(|e| err(&e))?;
            let st = DissipativeStepper::new(space.clone(), p.coeffs.clone(), grid)
                .map_err(|e| err(&e))?;
            let u_x = p.u_x.clone();
            let u0 = init_dissipative(&space, move |x| u_x(0.0, x)).map_err(|e| err(&e))?;
            let h = st.run(u0, RunOptions::default()).map_err(|e| err(&e))?;
            let e = h.last.l2_error(|x| (p.u)(p.t_end, x));
            Ok((h.times, h.l2_norms, e))
        }
        Model::ParabolicReactive => {
            let p = ParabolicManufactured::reactive_transcendental();
            let space = FeSpace::uniform(Family::HermiteCubic, n).map_err(|e| err(&e))?;
            let grid = TimeGrid::uniform(p.t_end, steps).map_err(|e| err(&e))?;
            let st =
                ReactiveStepper::new(space.clone(), p.coeffs.clone(), grid).map_err(|e| err(&e))?;
            let (u_x, u_xx) = (p.u_x.clone(), p.u_xx.clone());
            let u0 = init_reactive(&space, move |x| u_x(0.0, x), move |x| u_xx(0.0, x))
                .map_err(|e| err(&e))?;
            let h = st.run(u0, RunOptions::default()).map_err(|e| err(&e))?;
            let e = h.last.h1_error(|x| (p.u_x)(p.t_end, x));
            Ok((h.times, h.l2_norms, e))
        }
    }
}

fn write_manifest(config: &RunConfig, o: &Outcome, out: &Path) -> Result<(), ReportError> {
    let mut m = String::new();
    let _ = writeln!(m, "experiment = {}", config.experiment);
    let models: Vec<String> = config.models.iter().map(|m| m.to_string()).collect();
    let _ = writeln!(m, "models = {}", models.join(","));
    let _ = writeln!(m, "runs = {}", o.runs);
    let _ = writeln!(m, "completed = {}", o.completed);
    let _ = writeln!(m, "flagged = {}", o.flagged);
    for f in &o.files {
        let _ = writeln!(
            m,
            "file = {}",
            f.file_name().map_or_else(
                || f.display().to_string(),
                |n| n.to_string_lossy().into_owned()
            )
        );
    }
    for note in &config.notes {
        let _ = writeln!(m, "note = {note}");
    }
    for (k, v) in &o.summary {
        let _ = writeln!(m, "{k} = {v}");
    }
    let path = out.join("manifest.txt");
    fs::write(&path, m).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}
