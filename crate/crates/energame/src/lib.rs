//! Command-line explorer for energy games: per-graph reports, inequality
//! audits, exhaustive sweeps and Shapley computations, with graph6 and
//! edge-list input and JSON, CSV or text output.

pub mod audit;
pub mod checks;
pub mod doc;
pub mod error;
pub mod format;
pub mod input;
pub mod report;
pub mod shapley;
pub mod sweep;

pub use error::{CliError, ExitCode};
