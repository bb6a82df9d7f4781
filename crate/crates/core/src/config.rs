//! Tunable numerical parameters shared by the assembly and study routines.

use crate::error::{Error, Result};

/// Quadrature and size settings. The defaults reproduce the published studies.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Volume rules integrate polynomials of degree `2k + volume_extra` exactly.
    pub volume_extra: usize,
    /// Error norms use degree `2k + error_extra` rules.
    pub error_extra: usize,
    /// Largest refinement level accepted by [`crate::mesh::make_square_mesh`].
    pub max_levels: usize,
    /// Largest system handed to the dense SVD.
    pub dense_cap: usize,
    pub bem: BemQuadrature,
}

/// Panel-pair quadrature parameters for the boundary operators.
#[derive(Debug, Clone, PartialEq)]
pub struct BemQuadrature {
    /// Gauss points per graded piece for panels sharing a vertex.
    pub adjacent_points: usize,
    /// Number of geometric grading levels toward a shared vertex.
    pub grading_levels: usize,
    /// Geometric grading ratio in (0, 1).
    pub grading_ratio: f64,
    /// Gauss points per piece for non-touching panels closer than `far_ratio` lengths.
    pub near_points: usize,
    /// Pairs whose distance is at least `far_ratio` times the longer panel use plain tensor Gauss.
    pub far_ratio: f64,
    /// Extra points added to the `2(k + 2)` tensor rule for well-separated pairs.
    pub far_extra: usize,
    /// Gauss points per piece when evaluating potentials.
    pub potential_points: usize,
}

impl Default for BemQuadrature {
    fn default() -> Self {
        Self {
            adjacent_points: 12,
            grading_levels: 8,
            grading_ratio: 0.15,
            near_points: 16,
            far_ratio: 2.0,
            far_extra: 6,
            potential_points: 16,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Self {
            volume_extra: 4,
            error_extra: 6,
            max_levels: 8,
            dense_cap: 8000,
            bem: BemQuadrature::default(),
        }
    }
}

impl BemQuadrature {
    /// Same rules with every point count doubled.
    pub fn doubled(&self) -> Self {
        Self {
            adjacent_points: 2 * self.adjacent_points,
            grading_levels: 2 * self.grading_levels,
            near_points: 2 * self.near_points,
            far_extra: 2 * self.far_extra + 8,
            potential_points: 2 * self.potential_points,
            ..self.clone()
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.max_levels > 10 {
            return Err(Error::Config(format!(
                "max_levels {} is larger than 10",
                self.max_levels
            )));
        }
        let b = &self.bem;
        if !(b.grading_ratio > 0.0 && b.grading_ratio < 1.0) {
            return Err(Error::Config("grading_ratio must lie in (0, 1)".into()));
        }
        if b.adjacent_points == 0 || b.near_points == 0 || b.potential_points == 0 {
            return Err(Error::Config("BEM point counts must be positive".into()));
        }
        if b.far_ratio <= 0.0 {
            return Err(Error::Config("far_ratio must be positive".into()));
        }
        Ok(())
    }

    pub fn volume_exactness(&self, k: usize) -> usize {
        2 * k + self.volume_extra
    }

    pub fn error_exactness(&self, k: usize) -> usize {
        2 * k + self.error_extra
    }
}
