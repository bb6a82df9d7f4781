use faer::linalg::solvers::Solve;
use faer::Mat;

use super::system::CoupledSystem;
use crate::error::{Error, Result};
use crate::hdg::{local_backsolve, LocalFields, SkeletonFunction};

/// Solution of the coupled system with the recovered element fields.
#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub uhat: SkeletonFunction,
    /// Y_h coefficients of φ_h.
    pub phi: Vec<f64>,
    pub fields: Vec<LocalFields>,
    /// ‖Ax - b‖_∞ / (‖A‖_∞ ‖x‖_∞ + ‖b‖_∞).
    pub residual: f64,
    /// ∫_Γ φ_h.
    pub density_mean: f64,
}

fn residual(sys: &CoupledSystem, x: &[f64]) -> (Vec<f64>, f64) {
    let mut r: Vec<f64> = sys.rhs.iter().map(|b| -b).collect();
    let mut row_sums = vec![0.0; sys.dim()];
    for t in &sys.triplets {
        r[t.row] += t.val * x[t.col];
        row_sums[t.row] += t.val.abs();
    }
    let norm_a = row_sums.iter().copied().fold(0.0, f64::max);
    let norm_x = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let norm_b = sys.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let rn = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let denom = norm_a * norm_x + norm_b;
    (r, if denom == 0.0 { rn } else { rn / denom })
}

/// Sparse LU solve with one step of iterative refinement, followed by local back-substitution.
pub fn solve_coupled(sys: &CoupledSystem) -> Result<CoupledSolution> {
    let n = sys.dim();
    let a = sys.sparse()?;
    let lu = match a.sp_lu() {
        Ok(lu) => lu,
        Err(e) => {
            log::error!("sparse LU failed: {e:?}");
            return Err(Error::Singular {
                condition: condition_estimate(sys),
            });
        }
    };
    let b = Mat::<f64>::from_fn(n, 1, |i, _| sys.rhs[i]);
    let sol = lu.solve(&b);
    let mut x: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
    let (r, _) = residual(sys, &x);
    let rm = Mat::<f64>::from_fn(n, 1, |i, _| r[i]);
    let dx = lu.solve(&rm);
    for (i, xi) in x.iter_mut().enumerate() {
        *xi -= dx[(i, 0)];
    }
    let (_, rel) = residual(sys, &x);
    if !rel.is_finite() || rel > 1e-10 {
        return Err(Error::Singular {
            condition: condition_estimate(sys),
        });
    }
    log::debug!("coupled solve: dim {n}, relative residual {rel:.3e}");

    let ns = sys.num_skeleton_dofs();
    let uhat = SkeletonFunction {
        k: sys.k,
        coeffs: x[..ns].to_vec(),
    };
    let phi = x[ns..].to_vec();
    let fields = back_substitute(sys, &uhat);
    let density_mean = sys.boundary.mean.iter().zip(&phi).map(|(m, p)| m * p).sum();
    Ok(CoupledSolution {
        uhat,
        phi,
        fields,
        residual: rel,
        density_mean,
    })
}

fn condition_estimate(sys: &CoupledSystem) -> f64 {
    condition_number(sys).unwrap_or(f64::INFINITY)
}

/// Element fields (q_h, u_h) from the skeleton traces.
pub fn back_substitute(sys: &CoupledSystem, uhat: &SkeletonFunction) -> Vec<LocalFields> {
    use rayon::prelude::*;
    (0..sys.mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let lam = crate::hdg::gather_traces(&sys.mesh, t, sys.k, &uhat.coeffs);
            local_backsolve(&sys.operators[t], &sys.loads[t], &lam)
        })
        .collect()
}

/// ∫_Γ φ_h.
pub fn check_density_mean(sys: &CoupledSystem, sol: &CoupledSolution) -> f64 {
    sys.boundary.mean.iter().zip(&sol.phi).map(|(m, p)| m * p).sum()
}

/// max_K |⟨q̂_h·n, 1⟩_∂K - (f, 1)_K|, with (f, 1)_K taken from the assembled load.
pub fn check_local_conservation(sys: &CoupledSystem, sol: &CoupledSolution) -> f64 {
    let nk = sys.k + 1;
    let mut worst = 0.0f64;
    for (t, op) in sys.operators.iter().enumerate() {
        let lam = crate::hdg::gather_traces(&sys.mesh, t, sys.k, &sol.uhat.coeffs);
        let flux = op.flux(&sys.loads[t], &lam);
        // ∫_e q̂·n = c₀ · sqrt(L) for the orthonormal Legendre coefficient c₀.
        let net: f64 = (0..3).map(|s| flux[s * nk] * sys.mesh.side_length(t, s).sqrt()).sum();
        let src = super::system::load_integral(op, &sys.loads[t], &sys.reference);
        worst = worst.max((net - src).abs());
    }
    worst
}

/// 2-norm condition number of a dense matrix from its singular values.
pub fn dense_condition_number(a: &Mat<f64>) -> Result<f64> {
    let s = a
        .singular_values()
        .map_err(|e| Error::LinearAlgebra(format!("SVD failed: {e:?}")))?;
    let max = s.iter().copied().fold(0.0, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// 2-norm condition number of the coupled matrix, refused above the configured dense cap.
pub fn condition_number(sys: &CoupledSystem) -> Result<f64> {
    let cap = sys.config.dense_cap;
    if sys.dim() > cap {
        return Err(Error::DenseCap { dim: sys.dim(), cap });
    }
    dense_condition_number(&sys.dense())
}
