use std::io::Write;

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rayon::prelude::*;

use super::ProblemData;
use crate::approximation::{segment_gauss, triangle_quadrature, SegmentBasis};
use crate::bem::{BoundaryOperatorSet, BoundarySpace};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::hdg::{
    build_element_operator, ElementLoad, ElementOperator, ReferenceData, StabilizationField,
};
use crate::mesh::{norm, sub, BoundaryMesh, Mesh};

/// Assembled global system. Unknowns are the skeleton coefficients
/// (`k + 1` per edge, edge-major) followed by the Y_h coefficients of φ_h.
pub struct CoupledSystem {
    pub k: usize,
    pub mesh: Mesh,
    pub bmesh: BoundaryMesh,
    pub space: BoundarySpace,
    pub tau: StabilizationField,
    pub reference: ReferenceData,
    pub operators: Vec<ElementOperator>,
    pub loads: Vec<ElementLoad>,
    pub boundary: BoundaryOperatorSet,
    pub triplets: Vec<Triplet<usize, usize, f64>>,
    pub rhs: Vec<f64>,
    /// |∫_Ω f + ∫_Γ β₁|.
    pub compatibility_residual: f64,
    /// ∫_Ω f + ∫_Γ β₁ with the quadratures of the assembled load, so that
    /// |Γ| ∫_Γ φ_h equals it up to round-off.
    pub discrete_compatibility: f64,
    /// ∫_Ω |f| + ∫_Γ |β₁|, the scale of the compatibility residual.
    pub data_scale: f64,
    pub kappa_max: f64,
    pub config: Config,
}

impl std::fmt::Debug for CoupledSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoupledSystem")
            .field("k", &self.k)
            .field("dim", &self.dim())
            .field("nnz", &self.triplets.len())
            .finish_non_exhaustive()
    }
}

fn check_topology(mesh: &Mesh, bmesh: &BoundaryMesh) -> Result<()> {
    if bmesh.len() != mesh.num_boundary_edges() {
        return Err(Error::TopologyMismatch(format!(
            "{} panels for {} boundary edges",
            bmesh.len(),
            mesh.num_boundary_edges()
        )));
    }
    let tol = 1e-12 * bmesh.perimeter();
    for (i, p) in bmesh.panels.iter().enumerate() {
        if p.edge >= mesh.num_edges() || !mesh.edges[p.edge].boundary {
            return Err(Error::TopologyMismatch(format!("panel {i} is not on a boundary edge")));
        }
        let [a, b] = mesh.edge_points(p.edge);
        let (s, e) = if p.along_edge { (a, b) } else { (b, a) };
        if norm(sub(s, p.start)) > tol || norm(sub(e, p.end)) > tol {
            return Err(Error::TopologyMismatch(format!(
                "panel {i} endpoints differ from edge {}",
                p.edge
            )));
        }
    }
    Ok(())
}

/// Boundary data quadrature: Gauss points per panel.
fn data_points(k: usize) -> usize {
    (k + 8).min(32)
}

/// B[b][l] = ∫_panel μ_b φ_l for the panel's edge Legendre functions μ_b and local Y_h shapes φ_l.
fn panel_coupling(space: &BoundarySpace, panel: &crate::mesh::Panel) -> Vec<Vec<f64>> {
    let k = space.k();
    let seg = SegmentBasis::new(k);
    let mut out = vec![vec![0.0; space.local_dim()]; k + 1];
    let s = panel.length.sqrt();
    for (t, w) in segment_gauss(k + 3).iter_1d() {
        let mu = seg.eval(panel.edge_param(t));
        let v = space.shape_values(t);
        for b in 0..=k {
            for l in 0..space.local_dim() {
                // μ_b = mu / sqrt(L), dΓ = L dt
                out[b][l] += w * s * mu[b] * v[l];
            }
        }
    }
    out
}

/// (f, 1)_K as carried by the assembled load: the constant-mode moment over the constant basis value.
pub(crate) fn load_integral(op: &ElementOperator, load: &ElementLoad, reference: &ReferenceData) -> f64 {
    let psi0 = reference.vol_values[0][0] / op.det().sqrt();
    load.rhs[2 * op.n()] / psi0
}

/// Builds the coupled system for degree `k`, stabilization `tau`, and data `data`.
///
/// Row blocks: interior edges carry flux continuity Σ_K ⟨q̂·n, μ⟩_e = 0;
/// boundary edges carry ⟨û, μ⟩ - ⟨(½I + K)φ, μ⟩ = ⟨β₀, μ⟩;
/// Y_h test functions carry -⟨q̂·n, ϕ⟩_Γ + ω(φ, ϕ) = ⟨β₁, ϕ⟩_Γ.
pub fn assemble_coupled(
    mesh: &Mesh,
    bmesh: &BoundaryMesh,
    k: usize,
    tau: &StabilizationField,
    data: &ProblemData,
    config: &Config,
) -> Result<CoupledSystem> {
    config.validate()?;
    check_topology(mesh, bmesh)?;
    if tau.len() != mesh.num_triangles() {
        return Err(Error::Config(format!(
            "stabilization has {} elements, mesh has {}",
            tau.len(),
            mesh.num_triangles()
        )));
    }
    let reference = ReferenceData::new(k, config)?;
    let space = BoundarySpace::new(bmesh, k)?;
    let nk = k + 1;
    let n_skel = nk * mesh.num_edges();
    let dim = n_skel + space.dim();

    let operators: Vec<ElementOperator> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| build_element_operator(mesh, t, &*data.kappa, tau.element(t), &reference))
        .collect::<Result<_>>()?;
    let loads: Vec<ElementLoad> = operators
        .par_iter()
        .map(|op| op.load(&*data.f, &reference))
        .collect();
    let kappa_max = operators.iter().map(|o| o.kappa_max()).fold(0.0, f64::max);
    if kappa_max >= 4.0 {
        log::warn!("κ_max = {kappa_max:.3} ≥ 4: outside the range covered by the coercivity argument");
    }
    let boundary = BoundaryOperatorSet::assemble(bmesh, &space, &config.bem)?;

    let mut triplets: Vec<Triplet<usize, usize, f64>> = Vec::new();
    let mut rhs = vec![0.0; dim];
    let mut push = |r: usize, c: usize, v: f64| {
        if v != 0.0 {
            triplets.push(Triplet::new(r, c, v));
        }
    };

    // Flux continuity on interior edges.
    for (t, op) in operators.iter().enumerate() {
        for s in 0..3 {
            let e = mesh.tri_edges[t][s];
            if mesh.edges[e].boundary {
                continue;
            }
            for b in 0..nk {
                let row = e * nk + b;
                for (s2, &e2) in mesh.tri_edges[t].iter().enumerate() {
                    for a in 0..nk {
                        push(row, e2 * nk + a, op.flux_map[(s * nk + b, s2 * nk + a)]);
                    }
                }
                rhs[row] -= loads[t].flux[s * nk + b];
            }
        }
    }

    // Trace transmission on boundary edges.
    let seg = SegmentBasis::new(k);
    let rule = segment_gauss(data_points(k));
    for (p, panel) in bmesh.panels.iter().enumerate() {
        let e = panel.edge;
        for a in 0..nk {
            let row = e * nk + a;
            push(row, row, 1.0);
            for c in 0..space.dim() {
                push(row, n_skel + c, -boundary.k_block[(p * nk + a, c)]);
            }
        }
        let [x0, x1] = mesh.edge_points(e);
        let l = panel.length;
        for (t, w) in rule.iter_1d() {
            let v = (data.beta0)(crate::mesh::lerp(x0, x1, t));
            for (a, mu) in seg.eval(t).into_iter().enumerate() {
                rhs[e * nk + a] += w * l.sqrt() * v * mu;
            }
        }
    }

    // Flux transmission tested with Y_h.
    for (p, panel) in bmesh.panels.iter().enumerate() {
        let couple = panel_coupling(&space, panel);
        let (t, s) = (panel.triangle, panel.side);
        let op = &operators[t];
        let dofs = space.local_dofs(p);
        for (l, &d) in dofs.iter().enumerate() {
            let row = n_skel + d;
            for b in 0..nk {
                let c = couple[b][l];
                for (s2, &e2) in mesh.tri_edges[t].iter().enumerate() {
                    for a in 0..nk {
                        push(row, e2 * nk + a, -c * op.flux_map[(s * nk + b, s2 * nk + a)]);
                    }
                }
                rhs[row] += c * loads[t].flux[s * nk + b];
            }
        }
        for (tp, w) in rule.iter_1d() {
            let v = (data.beta1)(panel.point(tp), panel.normal);
            for (l, sv) in space.shape_values(tp).into_iter().enumerate() {
                rhs[n_skel + dofs[l]] += w * panel.length * v * sv;
            }
        }
    }
    for r in 0..space.dim() {
        for c in 0..space.dim() {
            push(n_skel + r, n_skel + c, boundary.omega[(r, c)]);
        }
    }

    // Compatibility ∫_Ω f + ∫_Γ β₁ of the data, with the finest rules available.
    let vol = triangle_quadrature(crate::approximation::MAX_TRIANGLE_EXACTNESS)?;
    let (mut int_f, mut abs_f) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let area = mesh.area(t);
        for (r, w) in vol.iter() {
            let v = (data.f)(operators[t].to_physical(r));
            int_f += 2.0 * area * w * v;
            abs_f += 2.0 * area * w * v.abs();
        }
    }
    let fine = segment_gauss(32);
    let (mut int_b, mut abs_b) = (0.0, 0.0);
    for panel in &bmesh.panels {
        for (t, w) in fine.iter_1d() {
            let v = (data.beta1)(panel.point(t), panel.normal);
            int_b += w * panel.length * v;
            abs_b += w * panel.length * v.abs();
        }
    }
    let compatibility_residual = (int_f + int_b).abs();
    let data_scale = abs_f + abs_b;

    // The same integral with the quadratures of the assembled right-hand side.
    let mut discrete_compatibility: f64 = (0..mesh.num_triangles())
        .map(|t| load_integral(&operators[t], &loads[t], &reference))
        .sum();
    for panel in &bmesh.panels {
        for (t, w) in rule.iter_1d() {
            discrete_compatibility += w * panel.length * (data.beta1)(panel.point(t), panel.normal);
        }
    }
    if compatibility_residual > 1e-8 * data_scale {
        log::warn!(
            "data violate compatibility: |∫f + ∫β₁| = {compatibility_residual:.3e} (scale {data_scale:.3e})"
        );
    }

    Ok(CoupledSystem {
        k,
        mesh: mesh.clone(),
        bmesh: bmesh.clone(),
        space,
        tau: tau.clone(),
        reference,
        operators,
        loads,
        boundary,
        triplets,
        rhs,
        compatibility_residual,
        discrete_compatibility,
        data_scale,
        kappa_max,
        config: config.clone(),
    })
}

impl CoupledSystem {
    /// (k + 1)(E + N_b).
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_skeleton_dofs(&self) -> usize {
        (self.k + 1) * self.mesh.num_edges()
    }

    pub fn sparse(&self) -> Result<SparseColMat<usize, f64>> {
        SparseColMat::try_new_from_triplets(self.dim(), self.dim(), &self.triplets)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
    }

    pub fn dense(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.dim(), self.dim());
        for t in &self.triplets {
            m[(t.row, t.col)] += t.val;
        }
        m
    }

    /// max |A - Aᵀ| / max |A|.
    pub fn relative_asymmetry(&self) -> f64 {
        let a = self.dense();
        let scale = a.norm_max();
        let mut worst = 0.0f64;
        for r in 0..a.nrows() {
            for c in 0..r {
                worst = worst.max((a[(r, c)] - a[(c, r)]).abs());
            }
        }
        worst / scale
    }

    /// Writes the matrix as `i j value` lines (0-based, duplicates summed).
    pub fn write_matrix<W: Write>(&self, mut out: W) -> Result<()> {
        let a = self.sparse()?;
        for c in 0..a.ncols() {
            let rows = a.row_idx_of_col_raw(c);
            let vals = a.val_of_col(c);
            for (r, v) in rows.iter().zip(vals) {
                writeln!(out, "{} {} {:.17e}", r, c, v)?;
            }
        }
        Ok(())
    }

    /// Writes the right-hand side as `i value` lines.
    pub fn write_rhs<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, v) in self.rhs.iter().enumerate() {
            writeln!(out, "{} {:.17e}", i, v)?;
        }
        Ok(())
    }
}
