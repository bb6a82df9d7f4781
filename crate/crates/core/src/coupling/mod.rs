//! The condensed coupled system in the unknowns (û_h, φ_h): assembly, solution,
//! recovery of the element fields, and the discrete structural checks.

mod solve;
mod system;

pub use solve::{
    back_substitute, check_density_mean, check_local_conservation, condition_number, dense_condition_number,
    solve_coupled, CoupledSolution,
};
pub use system::{assemble_coupled, CoupledSystem};

use crate::mesh::Point;

pub type ScalarField = Box<dyn Fn(Point) -> f64 + Send + Sync>;
/// Boundary datum depending on the point and the outward unit normal there.
pub type NormalField = Box<dyn Fn(Point, Point) -> f64 + Send + Sync>;

/// Coefficient and data of the transmission problem.
pub struct ProblemData {
    pub kappa: ScalarField,
    pub f: ScalarField,
    /// Trace jump u - u₊ on Γ.
    pub beta0: ScalarField,
    /// Flux jump -q·n - ∂ₙu₊ on Γ.
    pub beta1: NormalField,
}

impl std::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ProblemData { .. }")
    }
}

impl ProblemData {
    /// κ ≡ 1 and all data zero.
    pub fn homogeneous() -> Self {
        Self {
            kappa: Box::new(|_| 1.0),
            f: Box::new(|_| 0.0),
            beta0: Box::new(|_| 0.0),
            beta1: Box::new(|_, _| 0.0),
        }
    }
}
