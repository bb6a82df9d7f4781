use serde::Serialize;

use super::errors::{compute_errors, fill_rates, ErrorReport};
use super::problems::ManufacturedProblem;
use crate::config::Config;
use crate::coupling::{assemble_coupled, condition_number, solve_coupled, CoupledSolution, CoupledSystem, ProblemData};
use crate::error::{Error, Result};
use crate::hdg::StabilizationField;
use crate::mesh::{boundary_trace, make_rect_mesh, make_square_mesh, Mesh};

/// Assembles and solves one manufactured problem on `mesh` with τ ≡ `tau`.
pub fn solve_problem(
    mesh: &Mesh,
    k: usize,
    tau: f64,
    prob: &ManufacturedProblem,
    config: &Config,
) -> Result<(CoupledSystem, CoupledSolution)> {
    let bmesh = boundary_trace(mesh)?;
    let stab = StabilizationField::uniform(mesh, tau)?;
    let sys = assemble_coupled(mesh, &bmesh, k, &stab, &prob.data(), config)?;
    let sol = solve_coupled(&sys)?;
    Ok((sys, sol))
}

/// Errors on the unit square at levels `0..levels`, with rates between consecutive levels.
pub fn convergence_study(
    k: usize,
    levels: usize,
    tau: f64,
    prob: &ManufacturedProblem,
    config: &Config,
) -> Result<Vec<ErrorReport>> {
    if levels == 0 || levels > config.max_levels {
        return Err(Error::Config(format!(
            "levels must be in 1..={}, got {levels}",
            config.max_levels
        )));
    }
    let mut reports = Vec::with_capacity(levels);
    let mut mesh = make_square_mesh(0);
    for level in 0..levels {
        if level > 0 {
            mesh = mesh.refine_uniform();
        }
        let (sys, sol) = solve_problem(&mesh, k, tau, prob, config)?;
        let report = compute_errors(&sys, &sol, prob, level)?;
        log::info!(
            "k={k} level={level} dim={} e_q={:.4e} e_uhat={:.4e} eps_u={:.4e} e_plus={:.4e} eps_uhat={:.4e}",
            sys.dim(),
            report.e_q,
            report.e_uhat,
            report.eps_u,
            report.e_plus,
            report.eps_uhat
        );
        reports.push(report);
    }
    fill_rates(&mut reports);
    Ok(reports)
}

/// How a large diffusion value is placed in the domain for the conditioning study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaMode {
    /// κ ≡ value everywhere.
    Constant,
    /// κ = value on (-3/4, 3/4) × (-1/2, 1/2) and 1 elsewhere.
    Interior,
}

impl KappaMode {
    pub fn coefficient(self, value: f64) -> Box<dyn Fn([f64; 2]) -> f64 + Send + Sync> {
        match self {
            KappaMode::Constant => Box::new(move |_| value),
            KappaMode::Interior => Box::new(move |x| {
                if x[0].abs() < 0.75 && x[1].abs() < 0.5 {
                    value
                } else {
                    1.0
                }
            }),
        }
    }
}

/// Default mesh of the κ study: 18 × 12 cells on (-3/2, 3/2) × (-1, 1).
pub fn kappa_study_mesh() -> Result<Mesh> {
    make_rect_mesh(18, 12, [[-1.5, -1.0], [1.5, 1.0]])
}

fn condition_for(mesh: &Mesh, k: usize, kappa: Box<dyn Fn([f64; 2]) -> f64 + Send + Sync>, config: &Config) -> Result<f64> {
    let bmesh = boundary_trace(mesh)?;
    let tau = StabilizationField::uniform(mesh, 1.0)?;
    let data = ProblemData {
        kappa,
        ..ProblemData::homogeneous()
    };
    let sys = assemble_coupled(mesh, &bmesh, k, &tau, &data, config)?;
    condition_number(&sys)
}

/// Condition numbers for each κ value. Failures are recorded as infinity.
pub fn condition_study_kappa(
    values: &[f64],
    mode: KappaMode,
    mesh: &Mesh,
    k: usize,
    config: &Config,
) -> Result<Vec<(f64, f64)>> {
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Config(format!("κ values must be positive, got {v}")));
    }
    values
        .iter()
        .map(|&v| match condition_for(mesh, k, mode.coefficient(v), config) {
            Ok(c) => Ok((v, c)),
            Err(e @ (Error::DenseCap { .. } | Error::Config(_))) => Err(e),
            Err(e) => {
                log::warn!("condition study at κ = {v}: {e}");
                Ok((v, f64::INFINITY))
            }
        })
        .collect()
}

/// Condition numbers of the unit-square system at the given refinement levels.
pub fn condition_study_h(
    mode: KappaMode,
    value: f64,
    levels: &[usize],
    k: usize,
    config: &Config,
) -> Result<Vec<(f64, f64)>> {
    levels
        .iter()
        .map(|&l| {
            let mesh = make_square_mesh(l);
            let c = condition_for(&mesh, k, mode.coefficient(value), config)?;
            Ok((mesh.h(), c))
        })
        .collect()
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
