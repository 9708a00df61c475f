//! Scenario files, element text format, reports and the task runner
//! around `ncergo-core`.

pub mod config;
pub mod format;
pub mod report;
pub mod runner;

pub use config::{ConfigError, Scenario, ScenarioConfig};
pub use report::{emit_report, OutputFormat, RunReport, Status};
pub use runner::{configured_tasks, run_scenario, RunOptions, Task};
