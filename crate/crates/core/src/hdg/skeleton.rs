use crate::approximation::{segment_gauss, SegmentBasis};
use crate::mesh::{lerp, Mesh, Point};

/// Member of M_h: a degree-k polynomial per edge, stored as orthonormal Legendre
/// coefficients in the edge's canonical orientation (`k + 1` per edge).
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFunction {
    pub k: usize,
    pub coeffs: Vec<f64>,
}

impl SkeletonFunction {
    pub fn zeros(mesh: &Mesh, k: usize) -> Self {
        Self {
            k,
            coeffs: vec![0.0; (k + 1) * mesh.num_edges()],
        }
    }

    pub fn edge(&self, e: usize) -> &[f64] {
        &self.coeffs[e * (self.k + 1)..(e + 1) * (self.k + 1)]
    }

    /// Value at canonical parameter `t ∈ [0, 1]` of edge `e`.
    pub fn eval(&self, mesh: &Mesh, e: usize, t: f64) -> f64 {
        let mu = SegmentBasis::new(self.k).eval(t);
        let s: f64 = self.edge(e).iter().zip(&mu).map(|(c, m)| c * m).sum();
        s / mesh.edge_length(e).sqrt()
    }
}

fn rule_points(k: usize) -> usize {
    (k + 8).min(32)
}

/// Edge-wise L² projection onto P_k.
pub fn skeleton_l2_project(u: &dyn Fn(Point) -> f64, mesh: &Mesh, k: usize) -> SkeletonFunction {
    let seg = SegmentBasis::new(k);
    let rule = segment_gauss(rule_points(k));
    let mut out = SkeletonFunction::zeros(mesh, k);
    for e in 0..mesh.num_edges() {
        let [a, b] = mesh.edge_points(e);
        let sl = mesh.edge_length(e).sqrt();
        for (t, w) in rule.iter_1d() {
            let v = u(lerp(a, b, t));
            for (i, m) in seg.eval(t).into_iter().enumerate() {
                // ∫_e u μ_i ds with μ_i = m / sqrt(L), ds = L dt
                out.coeffs[e * (k + 1) + i] += w * v * m * sl;
            }
        }
    }
    out
}

/// Σ over elements incident to `e` of h_K.
fn edge_weight(mesh: &Mesh, e: usize) -> f64 {
    mesh.edge_triangles[e]
        .iter()
        .flatten()
        .map(|&(t, _)| mesh.diameters[t])
        .sum()
}

/// (Σ_K h_K ‖v‖²_{∂K})^{1/2}.
pub fn h_weighted_skeleton_norm(v: &SkeletonFunction, mesh: &Mesh) -> f64 {
    (0..mesh.num_edges())
        .map(|e| edge_weight(mesh, e) * v.edge(e).iter().map(|c| c * c).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// The same norm for a function given pointwise as `f(edge, canonical parameter)`,
/// integrated with an `points`-point Gauss rule per edge.
pub fn h_weighted_norm_with(mesh: &Mesh, points: usize, f: &dyn Fn(usize, f64) -> f64) -> f64 {
    let rule = segment_gauss(points);
    (0..mesh.num_edges())
        .map(|e| {
            let l2: f64 = rule.iter_1d().map(|(t, w)| w * f(e, t).powi(2)).sum();
            edge_weight(mesh, e) * l2 * mesh.edge_length(e)
        })
        .sum::<f64>()
        .sqrt()
}
