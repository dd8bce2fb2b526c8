//! Scenario runner behind the `syncsub` command-line tool.
//!
//! A scenario file describes one experiment (compatibility classification,
//! drift/fidelity trace, kernel extraction or group analysis). Parsing
//! validates it completely; running it yields a [`Report`] that serializes
//! deterministically to CSV, JSON or text.

pub mod error;
pub mod format;
pub mod literal;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::{HarnessError, Result};
pub use report::{emit_report, Format, Report};
pub use run::run_scenario;
pub use scenario::{parse_scenario, parse_scenario_str, Kind, Scenario};
