//! Problem files, fixtures, reports and the `qbh` command line.

pub mod commands;
pub mod fixtures;
pub mod problem;
pub mod report;

pub use commands::{run, Outcome};
pub use problem::{load_problem, parse_problem, ProblemError, ProblemSpec};
pub use report::RunReport;
