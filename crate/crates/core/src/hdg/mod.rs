//! Hybridizable discontinuous Galerkin pieces: per-element local solvers and
//! their condensed flux maps, the HDG projection, and skeleton (trace) functions.

mod element;
mod projection;
mod skeleton;

pub use element::{
    build_element_operator, local_backsolve, ElementLoad, ElementOperator, LocalFields,
    ReferenceData,
};
pub(crate) use element::gather_traces;
pub use projection::hdg_projection;
pub use skeleton::{
    h_weighted_norm_with, h_weighted_skeleton_norm, skeleton_l2_project, SkeletonFunction,
};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Per-element, per-side stabilization values τ.
#[derive(Debug, Clone)]
pub struct StabilizationField {
    values: Vec<[f64; 3]>,
}

impl StabilizationField {
    /// τ ≡ value on every side of every element.
    pub fn uniform(mesh: &Mesh, value: f64) -> Result<Self> {
        Self::from_values(vec![[value; 3]; mesh.num_triangles()])
    }

    /// Checks τ ≥ 0 everywhere with at least one strictly positive side per element.
    pub fn from_values(values: Vec<[f64; 3]>) -> Result<Self> {
        for (t, tau) in values.iter().enumerate() {
            if tau.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Stabilization {
                    element: t,
                    msg: format!("values {tau:?} must be finite and nonnegative"),
                });
            }
            if tau.iter().all(|&v| v == 0.0) {
                return Err(Error::Stabilization {
                    element: t,
                    msg: "no strictly positive side".into(),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn element(&self, t: usize) -> [f64; 3] {
        self.values[t]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tau_max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// ‖𝔥τ‖_∞ with 𝔥 the side length.
    pub fn h_tau_sup(&self, mesh: &Mesh) -> f64 {
        self.values
            .iter()
            .enumerate()
            .flat_map(|(t, tau)| (0..3).map(move |j| (t, j, tau[j])))
            .map(|(t, j, tau)| mesh.side_length(t, j) * tau)
            .fold(0.0, f64::max)
    }

    /// Largest value of τ left on any element after removing one side where it is maximal.
    pub fn delta_tau(&self) -> f64 {
        self.values
            .iter()
            .map(|tau| {
                let mut v = *tau;
                v.sort_by(f64::total_cmp);
                v[1]
            })
            .fold(0.0, f64::max)
    }
}
