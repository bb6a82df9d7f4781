//! Manufactured problems, error measures, convergence and conditioning studies,
//! and their CSV/JSON output.

mod errors;
mod output;
mod problems;
mod study;

pub use errors::{compute_errors, fill_rates, Diagnostics, ErrorReport, Rates};
pub use output::{write_csv, write_json, CSV_HEADER};
pub use problems::{problem_polynomial, problem_table123, ManufacturedProblem, Scalar, Vector};
pub use study::{
    condition_study_h, condition_study_kappa, convergence_study, kappa_study_mesh, loglog_slope,
    solve_problem, KappaMode,
};
