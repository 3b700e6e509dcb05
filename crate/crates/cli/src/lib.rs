//! Config-driven runner for the inequality checks in `hsconvex-core`.

pub mod config;
pub mod report;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, Format, RunConfig};
pub use report::{emit_report, from_json, render, to_canonical_json, CSV_HEADER};
pub use run::{run, task_seed, RunOptions, RunReport, Summary, TaskEntry};
