use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::harness::{ConvergenceReport, GrowthReport, WedgeModel, WedgeReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    pub h: f64,
    pub k: f64,
    pub error: f64,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WedgeRow {
    pub r_m: f64,
    pub depth_m: f64,
    pub tl_db: f64,
    pub model: WedgeModel,
    /// The run was stopped by the growth limit.
    pub unstable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub t: f64,
    pub l2_norm: f64,
    pub profile: String,
}

/// A CSV table with a fixed column schema.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Converge(Vec<ConvergeRow>),
    Wedge(Vec<WedgeRow>),
    Growth(Vec<GrowthRow>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Converge,
    Wedge,
    Growth,
}

impl ReportKind {
    pub fn header(self) -> &'static str {
        match self {
            ReportKind::Converge => "h,k,error,rate",
            ReportKind::Wedge => "r_m,depth_m,TL_dB,model,flag",
            ReportKind::Growth => "t,l2_norm,profile",
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Report {
    pub fn kind(&self) -> ReportKind {
        match self {
            Report::Converge(_) => ReportKind::Converge,
            Report::Wedge(_) => ReportKind::Wedge,
            Report::Growth(_) => ReportKind::Growth,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Report::Converge(r) => r.len(),
            Report::Wedge(r) => r.len(),
            Report::Growth(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(self.kind().header());
        out.push('\n');
        match self {
            Report::Converge(rows) => {
                for r in rows {
                    let rate = r.rate.map(fmt_num).unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        fmt_num(r.h),
                        fmt_num(r.k),
                        fmt_num(r.error),
                        rate
                    );
                }
            }
            Report::Wedge(rows) => {
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        fmt_num(r.r_m),
                        fmt_num(r.depth_m),
                        fmt_num(r.tl_db),
                        r.model,
                        if r.unstable { "unstable" } else { "" }
                    );
                }
            }
            Report::Growth(rows) => {
                for r in rows {
                    let _ = writeln!(out, "{},{},{}", fmt_num(r.t), fmt_num(r.l2_norm), r.profile);
                }
            }
        }
        out
    }

    pub fn from_csv(kind: ReportKind, text: &str) -> Result<Self, ReportError> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == kind.header() => {}
            other => {
                return Err(ReportError::Parse {
                    row: 1,
                    message: format!(
                        "expected header '{}', got {:?}",
                        kind.header(),
                        other.unwrap_or("")
                    ),
                })
            }
        }
        let rows = lines
            .enumerate()
            .map(|(i, l)| (i + 2, l.split(',').collect::<Vec<_>>()));
        let bad = |row: usize, message: String| ReportError::Parse { row, message };
        let num = |row: usize, s: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(row, format!("'{s}': {e}")))
        };
        let width = kind.header().split(',').count();
        let check = |row: usize, f: &[&str]| {
            if f.len() == width {
                Ok(())
            } else {
                Err(bad(
                    row,
                    format!("expected {width} fields, got {}", f.len()),
                ))
            }
        };
        Ok(match kind {
            ReportKind::Converge => Report::Converge(
                rows.map(|(row, f)| {
                    check(row, &f)?;
                    Ok(ConvergeRow {
                        h: num(row, f[0])?,
                        k: num(row, f[1])?,
                        error: num(row, f[2])?,
                        rate: if f[3].is_empty() {
                            None
                        } else {
                            Some(num(row, f[3])?)
                        },
                    })
                })
                .collect::<Result<_, ReportError>>()?,
            ),
            ReportKind::Wedge => Report::Wedge(
                rows.map(|(row, f)| {
                    check(row, &f)?;
                    Ok(WedgeRow {
                        r_m: num(row, f[0])?,
                        depth_m: num(row, f[1])?,
                        tl_db: num(row, f[2])?,
                        model: f[3].parse().map_err(|e| bad(row, e))?,
                        unstable: match f[4] {
                            "" => false,
                            "unstable" => true,
                            s => return Err(bad(row, format!("unknown flag '{s}'"))),
                        },
                    })
                })
                .collect::<Result<_, ReportError>>()?,
            ),
            ReportKind::Growth => Report::Growth(
                rows.map(|(row, f)| {
                    check(row, &f)?;
                    Ok(GrowthRow {
                        t: num(row, f[0])?,
                        l2_norm: num(row, f[1])?,
                        profile: f[2].to_string(),
                    })
                })
                .collect::<Result<_, ReportError>>()?,
            ),
        })
    }
}

impl From<&ConvergenceReport> for Report {
    fn from(r: &ConvergenceReport) -> Self {
        Report::Converge(
            r.levels
                .iter()
                .map(|l| ConvergeRow {
                    h: l.h,
                    k: l.k,
                    error: l.error,
                    rate: l.rate,
                })
                .collect(),
        )
    }
}

impl From<&[WedgeReport]> for Report {
    fn from(reports: &[WedgeReport]) -> Self {
        Report::Wedge(
            reports
                .iter()
                .flat_map(|w| {
                    w.samples.iter().map(move |s| WedgeRow {
                        r_m: s.r_m,
                        depth_m: w.depth_m,
                        tl_db: s.tl_db,
                        model: w.model,
                        unstable: w.unstable.is_some(),
                    })
                })
                .collect(),
        )
    }
}

impl From<&[GrowthReport]> for Report {
    fn from(reports: &[GrowthReport]) -> Self {
        Report::Growth(
            reports
                .iter()
                .flat_map(|g| {
                    g.times.iter().zip(&g.norms).map(move |(&t, &n)| GrowthRow {
                        t,
                        l2_norm: n,
                        profile: g.profile.to_string(),
                    })
                })
                .collect(),
        )
    }
}

pub fn write_report(report: &Report, path: &Path) -> Result<(), ReportError> {
    fs::write(path, report.to_csv()).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::GrowthProfile;

    #[test]
    fn empty_growth_report_is_header_only() {
        let r = Report::from(&[] as &[GrowthReport]);
        assert_eq!(r.to_csv(), "t,l2_norm,profile\n");
        assert_eq!(
            Report::from_csv(ReportKind::Growth, &r.to_csv()).unwrap(),
            r
        );
    }

    #[test]
    fn numbers_round_trip_bitwise() {
        let awkward = [
            0.1,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            1e300,
            -2.5e-17,
            6.02214076e23,
        ];
        for x in awkward {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn every_kind_round_trips() {
        let reports = [
            Report::Converge(vec![
                ConvergeRow {
                    h: 0.01,
                    k: 0.01,
                    error: 1.234e-5,
                    rate: Some(1.9987),
                },
                ConvergeRow {
                    h: 0.005,
                    k: 0.005,
                    error: 3.1e-6,
                    rate: None,
                },
            ]),
            Report::Wedge(vec![WedgeRow {
                r_m: 1.5,
                depth_m: 90.0,
                tl_db: 61.25,
                model: WedgeModel::IFDP,
                unstable: true,
            }]),
            Report::from(
                &[GrowthReport {
                    profile: GrowthProfile::C,
                    times: vec![0.0, 0.5],
                    norms: vec![0.06, 0.07],
                }][..],
            ),
        ];
        for r in reports {
            assert_eq!(Report::from_csv(r.kind(), &r.to_csv()).unwrap(), r);
        }
    }

    #[test]
    fn malformed_rows_are_reported() {
        let e = Report::from_csv(ReportKind::Converge, "h,k,error,rate\n1,2,3\n").unwrap_err();
        assert!(matches!(e, ReportError::Parse { row: 2, .. }));
        assert!(Report::from_csv(ReportKind::Growth, "t,l2\n").is_err());
    }
}
