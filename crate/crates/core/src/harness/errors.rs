use serde::Serialize;

use super::problems::ManufacturedProblem;
use crate::approximation::triangle_quadrature;
use crate::bem::eval_double_layer;
use crate::coupling::{check_local_conservation, CoupledSolution, CoupledSystem};
use crate::error::Result;
use crate::hdg::{
    h_weighted_norm_with, h_weighted_skeleton_norm, hdg_projection, skeleton_l2_project,
    ReferenceData, SkeletonFunction,
};

/// Errors and diagnostics of one solve.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub level: usize,
    pub h: f64,
    /// ‖q - q_h‖_Ω / ‖q‖_Ω
    pub e_q: f64,
    /// ‖u - û_h‖_h / ‖u‖_h
    pub e_uhat: f64,
    /// ‖Πu - u_h‖_Ω / ‖u‖_Ω
    pub eps_u: f64,
    /// |u₊(x_obs) - Dφ_h(x_obs)| / |u₊(x_obs)|, absolute when u₊(x_obs) = 0.
    pub e_plus: f64,
    /// ‖Pu - û_h‖_h / ‖u‖_h
    pub eps_uhat: f64,
    pub rates: Option<Rates>,
    pub diagnostics: Diagnostics,
}

/// log₂ of consecutive error ratios.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Rates {
    pub e_q: f64,
    pub e_uhat: f64,
    pub eps_u: f64,
    pub e_plus: f64,
    pub eps_uhat: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub dim: usize,
    pub num_edges: usize,
    pub num_boundary_edges: usize,
    pub solver_residual: f64,
    /// ∫_Γ φ_h and the scale it is compared against (‖φ_h‖ in the Y_h mass norm times |Γ|^{1/2}).
    pub density_mean: f64,
    pub density_scale: f64,
    pub conservation: f64,
    pub conservation_scale: f64,
    pub compatibility: f64,
    /// ∫f + ∫β₁ under the assembly quadratures; |Γ| ∫_Γ φ_h reproduces it.
    pub discrete_compatibility: f64,
    pub perimeter: f64,
    pub compatibility_scale: f64,
    pub kappa_max: f64,
    pub kappa_warning: bool,
    pub tau_max: f64,
    pub h_tau: f64,
    pub delta_tau: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Computes all five error measures of `sol` against the exact fields of `prob`.
pub fn compute_errors(
    sys: &CoupledSystem,
    sol: &CoupledSolution,
    prob: &ManufacturedProblem,
    level: usize,
) -> Result<ErrorReport> {
    let mesh = &sys.mesh;
    let k = sys.k;
    let cfg = &sys.config;
    let rule = triangle_quadrature(cfg.error_exactness(k))?;
    let basis_at: Vec<Vec<f64>> = rule.points.iter().map(|&p| sys.reference.basis.eval(p)).collect();

    let (mut dq, mut nq, mut nu) = (0.0, 0.0, 0.0);
    for (t, op) in sys.operators.iter().enumerate() {
        let s = 1.0 / op.det().sqrt();
        for (i, (r, w)) in rule.iter().enumerate() {
            let x = op.to_physical(r);
            let psi: Vec<f64> = basis_at[i].iter().map(|v| v * s).collect();
            let (qh, _) = sol.fields[t].eval(&psi);
            let q = (prob.q)(x);
            let wt = w * op.det();
            dq += wt * ((q[0] - qh[0]).powi(2) + (q[1] - qh[1]).powi(2));
            nq += wt * (q[0] * q[0] + q[1] * q[1]);
            nu += wt * (prob.u)(x).powi(2);
        }
    }

    let proj_ref = ReferenceData::with_exactness(k, cfg.error_exactness(k), (k + 8).min(32))?;
    let mut du = 0.0;
    for t in 0..mesh.num_triangles() {
        let p = hdg_projection(mesh, t, &*prob.q, &*prob.u, sys.tau.element(t), &proj_ref)?;
        du += p.u.iter().zip(&sol.fields[t].u).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }

    let points = (k + 8).min(32);
    let u_skel = |e: usize, t: f64| {
        let [a, b] = mesh.edge_points(e);
        (prob.u)(crate::mesh::lerp(a, b, t))
    };
    let norm_u_h = h_weighted_norm_with(mesh, points, &u_skel);
    let d_uhat = h_weighted_norm_with(mesh, points, &|e, t| u_skel(e, t) - sol.uhat.eval(mesh, e, t));
    let pu = skeleton_l2_project(&*prob.u, mesh, k);
    let diff = SkeletonFunction {
        k,
        coeffs: pu.coeffs.iter().zip(&sol.uhat.coeffs).map(|(a, b)| a - b).collect(),
    };
    let d_puhat = h_weighted_skeleton_norm(&diff, mesh);

    let d_phi = eval_double_layer(&sys.bmesh, &sys.space, &sol.phi, prob.x_obs, &cfg.bem)?;
    let up = (prob.u_plus)(prob.x_obs);

    let conservation = check_local_conservation(sys, sol);
    let f_scale: f64 = {
        let mut s = 0.0;
        for op in &sys.operators {
            for (r, w) in rule.iter() {
                s += w * op.det() * (prob.f)(op.to_physical(r)).abs();
            }
        }
        s
    };
    let mass = sys.space.mass_matrix(&sys.bmesh);
    let phi_l2 = (0..sol.phi.len())
        .map(|i| (0..sol.phi.len()).map(|j| sol.phi[i] * mass[i][j] * sol.phi[j]).sum::<f64>())
        .sum::<f64>()
        .max(0.0)
        .sqrt();

    Ok(ErrorReport {
        level,
        h: mesh.h(),
        e_q: ratio(dq.sqrt(), nq.sqrt()),
        e_uhat: ratio(d_uhat, norm_u_h),
        eps_u: ratio(du.sqrt(), nu.sqrt()),
        e_plus: ratio((up - d_phi).abs(), up.abs()),
        eps_uhat: ratio(d_puhat, norm_u_h),
        rates: None,
        diagnostics: Diagnostics {
            dim: sys.dim(),
            num_edges: mesh.num_edges(),
            num_boundary_edges: mesh.num_boundary_edges(),
            solver_residual: sol.residual,
            density_mean: sol.density_mean,
            density_scale: phi_l2 * sys.bmesh.perimeter().sqrt(),
            conservation,
            conservation_scale: f_scale,
            compatibility: sys.compatibility_residual,
            discrete_compatibility: sys.discrete_compatibility,
            perimeter: sys.bmesh.perimeter(),
            compatibility_scale: sys.data_scale,
            kappa_max: sys.kappa_max,
            kappa_warning: sys.kappa_max >= 4.0,
            tau_max: sys.tau.tau_max(),
            h_tau: sys.tau.h_tau_sup(mesh),
            delta_tau: sys.tau.delta_tau(),
        },
    })
}

/// Fills the rate fields of every report after the first.
pub fn fill_rates(reports: &mut [ErrorReport]) {
    for l in 1..reports.len() {
        let (a, b) = (&reports[l - 1], &reports[l]);
        let r = |x: f64, y: f64| (x / y).log2();
        let rates = Rates {
            e_q: r(a.e_q, b.e_q),
            e_uhat: r(a.e_uhat, b.e_uhat),
            eps_u: r(a.eps_u, b.eps_u),
            e_plus: r(a.e_plus, b.e_plus),
            eps_uhat: r(a.eps_uhat, b.eps_uhat),
        };
        reports[l].rates = Some(rates);
    }
}
