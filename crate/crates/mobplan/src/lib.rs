//! File formats and command-line front end for the mobplan planner.

pub mod cli;
pub mod domain_file;
mod error;
pub mod number;
pub mod plan_text;
pub mod problem_file;
pub mod report;

use std::path::Path;

pub use domain_file::{parse_domain, read_domain, DomainFile};
pub use error::IoError;
pub use plan_text::{parse_plan, render_plan};
pub use problem_file::{parse_problem, read_problem, ProblemFile};

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_path_buf(), source })
}
