//! Front end for `deltaiso`: the Witt expression language, the JSON report
//! schema and the subcommands behind the `deltaiso` binary.

pub mod commands;
pub mod expr;
pub mod report;

pub use commands::{exit_code, run, Cli, Output};
pub use report::AnalysisReport;
