//! Batch front door: config parsing, dispatch to the harness, CSV reports and
//! run manifests.

mod config;
mod report;
mod run;

pub use config::{parse_config, ConfigError, Experiment, Model, Params, RunConfig};
pub use report::{
    fmt_num, write_report, ConvergeRow, GrowthRow, Report, ReportError, ReportKind, WedgeRow,
};
pub use run::{execute, Outcome};

/// Exit status when every run completed (flagged runs included).
pub const EXIT_OK: i32 = 0;
/// Exit status when at least one run did not complete.
pub const EXIT_INCOMPLETE: i32 = 1;
/// Exit status for a bad config or an unwritable output directory.
pub const EXIT_USAGE: i32 = 2;
