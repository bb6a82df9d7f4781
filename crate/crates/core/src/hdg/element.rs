//! Local HDG solver on one triangle.
//!
//! Unknowns are ordered `[q_x (n), q_y (n), u (n)]` in the physical orthonormal
//! basis ψ_i = φ_i ∘ F_K⁻¹ / sqrt(det J), so element mass matrices are identities.
//! Trace unknowns are ordered side by side, `k + 1` Legendre coefficients per
//! side, expressed in the canonical orientation of the underlying edge.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;

use crate::approximation::{segment_gauss, triangle_quadrature, SegmentBasis, TriangleBasis};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

/// Basis values tabulated at the reference quadrature points, shared by every element.
#[derive(Debug, Clone)]
pub struct ReferenceData {
    pub k: usize,
    pub basis: TriangleBasis,
    pub segment: SegmentBasis,
    pub(crate) vol_points: Vec<[f64; 2]>,
    pub(crate) vol_weights: Vec<f64>,
    pub(crate) vol_values: Vec<Vec<f64>>,
    pub(crate) vol_grads: Vec<Vec<[f64; 2]>>,
    pub(crate) side_params: Vec<f64>,
    pub(crate) side_weights: Vec<f64>,
    /// `[side][qp][i]` basis values on the reference sides.
    pub(crate) side_values: Vec<Vec<Vec<f64>>>,
    /// Legendre values at `t` and at `1 - t` (unnormalized by length).
    pub(crate) mu_forward: Vec<Vec<f64>>,
    pub(crate) mu_reverse: Vec<Vec<f64>>,
}

const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

impl ReferenceData {
    pub fn new(k: usize, config: &Config) -> Result<Self> {
        Self::with_exactness(k, config.volume_exactness(k), k + 3)
    }

    /// Reference tables with a volume rule exact to `exactness` and `side_points` Gauss points per side.
    pub fn with_exactness(k: usize, exactness: usize, side_points: usize) -> Result<Self> {
        let basis = TriangleBasis::new(k);
        let segment = SegmentBasis::new(k);
        let rule = triangle_quadrature(exactness)?;
        let vol_values = rule.points.iter().map(|&p| basis.eval(p)).collect();
        let vol_grads = rule.points.iter().map(|&p| basis.eval_grad(p)).collect();
        let srule = segment_gauss(side_points);
        let side_params: Vec<f64> = srule.iter_1d().map(|(t, _)| t).collect();
        let side_weights = srule.weights.clone();
        let side_values = (0..3)
            .map(|s| {
                let (a, b) = (REF_VERTICES[s], REF_VERTICES[(s + 1) % 3]);
                side_params
                    .iter()
                    .map(|&t| basis.eval([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]))
                    .collect()
            })
            .collect();
        let mu_forward = side_params.iter().map(|&t| segment.eval(t)).collect();
        let mu_reverse = side_params.iter().map(|&t| segment.eval(1.0 - t)).collect();
        Ok(Self {
            k,
            basis,
            segment,
            vol_points: rule.points,
            vol_weights: rule.weights,
            vol_values,
            vol_grads,
            side_params,
            side_weights,
            side_values,
            mu_forward,
            mu_reverse,
        })
    }

    /// dim P_k(K).
    pub fn n(&self) -> usize {
        self.basis.dim()
    }

    /// Trace unknowns per element: 3(k + 1).
    pub fn n_trace(&self) -> usize {
        3 * (self.k + 1)
    }
}

/// Affine map from the reference triangle onto element K.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Affine {
    pub origin: Point,
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    /// J^{-T}
    pub inv_t: [[f64; 2]; 2],
}

impl Affine {
    pub fn new(p: [Point; 3]) -> Self {
        let jac = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_t = [
            [jac[1][1] / det, -jac[1][0] / det],
            [-jac[0][1] / det, jac[0][0] / det],
        ];
        Self {
            origin: p[0],
            jac,
            det,
            inv_t,
        }
    }

    pub fn map(&self, r: [f64; 2]) -> Point {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn inverse(&self, x: Point) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J^{-1} = (J^{-T})^T
        [
            self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1],
            self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1],
        ]
    }

    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }
}

/// Side geometry of one element as seen by the local solver.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SideInfo {
    pub length: f64,
    pub normal: Point,
    pub forward: bool,
}

pub(crate) fn side_info(mesh: &Mesh, t: usize) -> [SideInfo; 3] {
    std::array::from_fn(|j| SideInfo {
        length: mesh.side_length(t, j),
        normal: mesh.side_normal(t, j),
        forward: mesh.tri_edge_signs[t][j] > 0,
    })
}

/// Condensed local operator of one element.
pub struct ElementOperator {
    pub element: usize,
    pub k: usize,
    pub tau: [f64; 3],
    pub(crate) affine: Affine,
    /// Local (q, u) matrix of the element equations.
    pub a: Mat<f64>,
    lu: PartialPivLu<f64>,
    /// Trace-to-equation coupling: A z = C λ + F.
    pub c: Mat<f64>,
    /// Normal-flux moments from (q, u): row (s, b) gives ⟨q·n + τu, μ_b⟩_s.
    pub g: Mat<f64>,
    /// λ ↦ (q, u).
    pub solution_map: Mat<f64>,
    /// λ ↦ ⟨q̂·n, μ_b⟩_s, the condensed flux map.
    pub flux_map: Mat<f64>,
    kappa_max: f64,
}

impl std::fmt::Debug for ElementOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ElementOperator")
            .field("element", &self.element)
            .field("k", &self.k)
            .field("tau", &self.tau)
            .finish_non_exhaustive()
    }
}

/// Data-dependent part of the local solve for one element.
#[derive(Debug, Clone)]
pub struct ElementLoad {
    /// (f, w) moments, padded with zeros for the q rows.
    pub rhs: Vec<f64>,
    /// A⁻¹ F: the local solution for λ = 0.
    pub response: Vec<f64>,
    /// Flux moments of the λ = 0 solution.
    pub flux: Vec<f64>,
}

/// Local fields in the physical orthonormal basis of element `element`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFields {
    pub qx: Vec<f64>,
    pub qy: Vec<f64>,
    pub u: Vec<f64>,
}

fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Builds the local blocks of the HDG equations on triangle `t` and condenses them.
///
/// The blocks realize (κ⁻¹q, r) - (u, div r) + ⟨λ, r·n⟩ and
/// -(q, ∇w) + ⟨q·n + τ(u - λ), w⟩ against all local test functions.
pub fn build_element_operator(
    mesh: &Mesh,
    t: usize,
    kappa: &(dyn Fn(Point) -> f64 + Sync),
    tau: [f64; 3],
    reference: &ReferenceData,
) -> Result<ElementOperator> {
    let n = reference.n();
    let k = reference.k;
    let nl = reference.n_trace();
    let nz = 3 * n;
    let affine = Affine::new(mesh.triangle_points(t));
    let sides = side_info(mesh, t);
    let scale = 1.0 / affine.det.sqrt();

    let mut a = Mat::<f64>::zeros(nz, nz);
    let mut kappa_max = 0.0f64;
    for (qp, &r) in reference.vol_points.iter().enumerate() {
        let x = affine.map(r);
        let kv = kappa(x);
        if !(kv > 1e-12) {
            return Err(Error::DegenerateDiffusion { element: t, value: kv });
        }
        kappa_max = kappa_max.max(kv);
        let w = reference.vol_weights[qp] * affine.det;
        let psi: Vec<f64> = reference.vol_values[qp].iter().map(|v| v * scale).collect();
        let grad: Vec<[f64; 2]> = reference.vol_grads[qp]
            .iter()
            .map(|g| {
                let p = affine.grad(*g);
                [p[0] * scale, p[1] * scale]
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let m = w * psi[i] * psi[j] / kv;
                a[(i, j)] += m;
                a[(n + i, n + j)] += m;
                // -(u, div r)
                a[(i, 2 * n + j)] -= w * psi[j] * grad[i][0];
                a[(n + i, 2 * n + j)] -= w * psi[j] * grad[i][1];
                // -(q, ∇w)
                a[(2 * n + i, j)] -= w * psi[j] * grad[i][0];
                a[(2 * n + i, n + j)] -= w * psi[j] * grad[i][1];
            }
        }
    }

    let mut c = Mat::<f64>::zeros(nz, nl);
    let mut g = Mat::<f64>::zeros(nl, nz);
    for s in 0..3 {
        let side = sides[s];
        let mu_tab = if side.forward {
            &reference.mu_forward
        } else {
            &reference.mu_reverse
        };
        let mu_scale = 1.0 / side.length.sqrt();
        let [nx, ny] = side.normal;
        let ts = tau[s];
        for (qp, &ws) in reference.side_weights.iter().enumerate() {
            let w = ws * side.length;
            let psi: Vec<f64> = reference.side_values[s][qp].iter().map(|v| v * scale).collect();
            let mu: Vec<f64> = mu_tab[qp].iter().map(|v| v * mu_scale).collect();
            for i in 0..n {
                for j in 0..n {
                    // ⟨q·n, w⟩ and ⟨τu, w⟩
                    a[(2 * n + i, j)] += w * psi[j] * nx * psi[i];
                    a[(2 * n + i, n + j)] += w * psi[j] * ny * psi[i];
                    a[(2 * n + i, 2 * n + j)] += w * ts * psi[j] * psi[i];
                }
                for b in 0..=k {
                    let col = s * (k + 1) + b;
                    c[(i, col)] -= w * mu[b] * nx * psi[i];
                    c[(n + i, col)] -= w * mu[b] * ny * psi[i];
                    c[(2 * n + i, col)] += w * ts * mu[b] * psi[i];
                    g[(col, i)] += w * psi[i] * nx * mu[b];
                    g[(col, n + i)] += w * psi[i] * ny * mu[b];
                    g[(col, 2 * n + i)] += w * ts * psi[i] * mu[b];
                }
            }
        }
    }

    let lu = a.partial_piv_lu();
    let solution_map = lu.solve(&c);
    if solution_map.col_iter().flat_map(|c| c.iter().copied()).any(|v| !v.is_finite()) {
        return Err(Error::SingularLocal { element: t });
    }
    let mut flux_map = &g * &solution_map;
    for s in 0..3 {
        for b in 0..=k {
            let r = s * (k + 1) + b;
            flux_map[(r, r)] -= tau[s];
        }
    }
    Ok(ElementOperator {
        element: t,
        k,
        tau,
        affine,
        a,
        lu,
        c,
        g,
        solution_map,
        flux_map,
        kappa_max,
    })
}

impl ElementOperator {
    pub fn n(&self) -> usize {
        self.a.nrows() / 3
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa_max
    }

    pub fn det(&self) -> f64 {
        self.affine.det
    }

    /// Source moments (f, ψ_i)_K and the corresponding λ = 0 local response.
    pub fn load(&self, f: &(dyn Fn(Point) -> f64 + Sync), reference: &ReferenceData) -> ElementLoad {
        let n = self.n();
        let scale = 1.0 / self.affine.det.sqrt();
        let mut rhs = vec![0.0; 3 * n];
        for (qp, &r) in reference.vol_points.iter().enumerate() {
            let w = reference.vol_weights[qp] * self.affine.det;
            let fv = f(self.affine.map(r));
            for i in 0..n {
                rhs[2 * n + i] += w * fv * reference.vol_values[qp][i] * scale;
            }
        }
        self.load_from_moments(rhs)
    }

    pub fn load_from_moments(&self, rhs: Vec<f64>) -> ElementLoad {
        let b = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let y = self.lu.solve(&b);
        let response: Vec<f64> = (0..rhs.len()).map(|i| y[(i, 0)]).collect();
        let flux = mat_vec(&self.g, &response);
        ElementLoad {
            rhs,
            response,
            flux,
        }
    }

    /// Condensed normal-flux moments ⟨q̂·n, μ_b⟩ on every side for the given traces.
    pub fn flux(&self, load: &ElementLoad, lambda: &[f64]) -> Vec<f64> {
        let mut v = mat_vec(&self.flux_map, lambda);
        for (a, b) in v.iter_mut().zip(&load.flux) {
            *a += b;
        }
        v
    }

    /// Relative residual of the local equations A z = C λ + F.
    pub fn residual(&self, load: &ElementLoad, lambda: &[f64], fields: &LocalFields) -> f64 {
        let z: Vec<f64> = fields
            .qx
            .iter()
            .chain(&fields.qy)
            .chain(&fields.u)
            .copied()
            .collect();
        let az = mat_vec(&self.a, &z);
        let cl = mat_vec(&self.c, lambda);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..z.len() {
            let rhs = cl[i] + load.rhs[i];
            num = num.max((az[i] - rhs).abs());
            den = den.max(az[i].abs()).max(rhs.abs());
        }
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    /// Reference coordinates of a physical point.
    pub fn to_reference(&self, x: Point) -> [f64; 2] {
        self.affine.inverse(x)
    }

    pub fn to_physical(&self, r: [f64; 2]) -> Point {
        self.affine.map(r)
    }

    /// Physical orthonormal basis values at reference point `r`.
    pub fn basis_values(&self, reference: &ReferenceData, r: [f64; 2]) -> Vec<f64> {
        let scale = 1.0 / self.affine.det.sqrt();
        reference.basis.eval(r).into_iter().map(|v| v * scale).collect()
    }
}

/// Recovers (q_K, u_K) from the element traces λ_∂K.
pub fn local_backsolve(op: &ElementOperator, load: &ElementLoad, lambda: &[f64]) -> LocalFields {
    let n = op.n();
    let mut z = mat_vec(&op.solution_map, lambda);
    for (a, b) in z.iter_mut().zip(&load.response) {
        *a += b;
    }
    LocalFields {
        qx: z[..n].to_vec(),
        qy: z[n..2 * n].to_vec(),
        u: z[2 * n..].to_vec(),
    }
}

impl LocalFields {
    pub fn eval(&self, psi: &[f64]) -> ([f64; 2], f64) {
        let dot = |c: &[f64]| c.iter().zip(psi).map(|(a, b)| a * b).sum::<f64>();
        ([dot(&self.qx), dot(&self.qy)], dot(&self.u))
    }
}

/// Gathers the trace coefficients of element `t` from a global skeleton vector.
pub(crate) fn gather_traces(mesh: &Mesh, t: usize, k: usize, skeleton: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(3 * (k + 1));
    for &e in &mesh.tri_edges[t] {
        out.extend_from_slice(&skeleton[e * (k + 1)..(e + 1) * (k + 1)]);
    }
    out
}
