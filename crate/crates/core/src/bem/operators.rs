//! Galerkin matrices of the double-layer trace ½I + K and the hypersingular form W.
//!
//! Panel pairs fall into four classes. Coincident pairs are integrated in closed
//! form. For pairs that touch at a vertex or lie close together the inner
//! integral over the source panel is evaluated exactly (complex log and Cauchy
//! moments) and the outer one by composite Gauss rules, geometrically graded
//! toward a shared vertex. Well-separated pairs use tensor Gauss rules.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::space::BoundarySpace;
use crate::approximation::{
    cauchy_moment, log_moment_complex, log_moment_product, segment_gauss, SegmentBasis,
};
use crate::config::BemQuadrature;
use crate::error::{Error, Result};
use crate::mesh::{cross, dot, norm, sub, BoundaryMesh, Panel, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PairKind {
    Coincident,
    /// Shared vertex at parameter 0 or 1 of the test panel.
    Touching { at_end: bool },
    Near,
    Far,
}

fn point_segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let d = sub(b, a);
    let t = (dot(sub(x, a), d) / dot(d, d)).clamp(0.0, 1.0);
    norm(sub(x, [a[0] + t * d[0], a[1] + t * d[1]]))
}

pub(crate) fn panel_distance(a: &Panel, b: &Panel) -> f64 {
    point_segment_distance(a.start, b.start, b.end)
        .min(point_segment_distance(a.end, b.start, b.end))
        .min(point_segment_distance(b.start, a.start, a.end))
        .min(point_segment_distance(b.end, a.start, a.end))
}

fn classify(bmesh: &BoundaryMesh, i: usize, j: usize, q: &BemQuadrature) -> (PairKind, f64) {
    let n = bmesh.len();
    if i == j {
        return (PairKind::Coincident, 0.0);
    }
    if j == (i + 1) % n {
        return (PairKind::Touching { at_end: true }, 0.0);
    }
    if i == (j + 1) % n {
        return (PairKind::Touching { at_end: false }, 0.0);
    }
    let (a, b) = (&bmesh.panels[i], &bmesh.panels[j]);
    let d = panel_distance(a, b);
    if d >= q.far_ratio * a.length.max(b.length) {
        (PairKind::Far, d)
    } else {
        (PairKind::Near, d)
    }
}

/// Outer rule on the test panel for a given pair class, as (t, w) pairs.
fn outer_rule(kind: PairKind, length: f64, dist: f64, q: &BemQuadrature) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut push = |lo: f64, hi: f64, n: usize| {
        for (t, w) in segment_gauss(n).iter_1d() {
            out.push((lo + t * (hi - lo), w * (hi - lo)));
        }
    };
    match kind {
        PairKind::Touching { at_end } => {
            let mut x = 1.0;
            for _ in 0..q.grading_levels {
                let y = x * q.grading_ratio;
                push(y, x, q.adjacent_points);
                x = y;
            }
            push(0.0, x, q.adjacent_points);
            if at_end {
                for p in out.iter_mut() {
                    p.0 = 1.0 - p.0;
                }
            }
        }
        PairKind::Near => {
            let pieces = ((length / dist).ceil() as usize).clamp(1, 64);
            for m in 0..pieces {
                push(m as f64 / pieces as f64, (m + 1) as f64 / pieces as f64, q.near_points);
            }
        }
        _ => unreachable!("outer rule requested for {kind:?}"),
    }
    out
}

/// Coordinates of `x` relative to source panel `b`: y(σ) = b.start + σ d_B gives
/// |x - y|² = L_B² ((σ - s)² + η²) and (x - y)·n_B = sign · η L_B.
fn local_coords(b: &Panel, x: Point) -> (Complex64, f64) {
    let d = b.direction();
    let r = sub(x, b.start);
    let l2 = dot(d, d);
    let s = dot(r, d) / l2;
    let delta = dot(r, b.normal);
    let eta = delta.abs() / l2.sqrt();
    (Complex64::new(s, eta), delta.signum())
}

/// ∫_B (1/2π) (x - y)·n_B / |x - y|² p(σ) dΓ(y) for p given by monomial coefficients.
fn double_layer_inner(b: &Panel, x: Point, p: &[f64]) -> f64 {
    let (z, sign) = local_coords(b, x);
    if z.im <= 1e-15 {
        return 0.0;
    }
    let s: f64 = p
        .iter()
        .enumerate()
        .map(|(m, c)| c * cauchy_moment(m, z).im)
        .sum();
    sign * s / (2.0 * PI)
}

/// ∫₀¹ p(σ) Φ(|x - y(σ)|) dσ with Φ(r) = -(1/2π) log r.
fn log_inner(b: &Panel, x: Point, p: &[f64]) -> f64 {
    let (z, _) = local_coords(b, x);
    let mean: f64 = p.iter().enumerate().map(|(m, c)| c / (m as f64 + 1.0)).sum();
    let moments: f64 = p
        .iter()
        .enumerate()
        .map(|(m, c)| c * log_moment_complex(m, z).re)
        .sum();
    -(b.length.ln() * mean + moments) / (2.0 * PI)
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

fn far_points(k: usize, q: &BemQuadrature) -> usize {
    (2 * (k + 2) + q.far_extra).min(32)
}

/// Local block of ⟨½φ_j + Kφ_j, μ_a⟩ with μ_a on test panel `i` and φ_j on source panel `j`.
fn k_pair(bmesh: &BoundaryMesh, space: &BoundarySpace, i: usize, j: usize, q: &BemQuadrature) -> Vec<Vec<f64>> {
    let k = space.k();
    let seg = SegmentBasis::new(k);
    let (a, b) = (&bmesh.panels[i], &bmesh.panels[j]);
    let mut out = vec![vec![0.0; space.local_dim()]; k + 1];
    let (kind, dist) = classify(bmesh, i, j, q);
    let mu = |t: f64| -> Vec<f64> {
        let s = 1.0 / a.length.sqrt();
        seg.eval(a.edge_param(t)).into_iter().map(|v| v * s).collect()
    };
    match kind {
        PairKind::Coincident => {
            // K vanishes on a straight panel; only ½ I remains.
            for (t, w) in segment_gauss(k + 3).iter_1d() {
                let m = mu(t);
                let v = space.shape_values(t);
                for (ra, ma) in m.iter().enumerate() {
                    for (cj, vj) in v.iter().enumerate() {
                        out[ra][cj] += 0.5 * w * a.length * ma * vj;
                    }
                }
            }
        }
        PairKind::Far => {
            let n = far_points(k, q);
            let rule = segment_gauss(n);
            let src: Vec<(Point, f64, Vec<f64>)> = rule
                .iter_1d()
                .map(|(s, w)| (b.point(s), w * b.length, space.shape_values(s)))
                .collect();
            for (t, w) in rule.iter_1d() {
                let x = a.point(t);
                let m = mu(t);
                let mut inner = vec![0.0; space.local_dim()];
                for (y, wy, v) in &src {
                    let r = sub(x, *y);
                    let ker = dot(r, b.normal) / dot(r, r) / (2.0 * PI);
                    for (c, vj) in inner.iter_mut().zip(v) {
                        *c += wy * ker * vj;
                    }
                }
                for (ra, ma) in m.iter().enumerate() {
                    for (cj, ij) in inner.iter().enumerate() {
                        out[ra][cj] += w * a.length * ma * ij;
                    }
                }
            }
        }
        _ => {
            // Collinear panels give (x - y)·n_B ≡ 0.
            if cross(a.direction(), b.direction()).abs() <= 1e-14 * a.length * b.length
                && dot(sub(a.start, b.start), b.normal).abs() <= 1e-14 * b.length
            {
                return out;
            }
            for (t, w) in outer_rule(kind, a.length, dist, q) {
                let x = a.point(t);
                let m = mu(t);
                for (cj, p) in space.shape_monomials().iter().enumerate() {
                    let inner = double_layer_inner(b, x, p);
                    for (ra, ma) in m.iter().enumerate() {
                        out[ra][cj] += w * a.length * ma * inner;
                    }
                }
            }
        }
    }
    out
}

/// Local block of ⟨Wφ_j, φ_i⟩ = ∫∫ φ_i'(t) φ_j'(σ) Φ(|x(t) - y(σ)|) dσ dt.
fn w_pair(bmesh: &BoundaryMesh, space: &BoundarySpace, i: usize, j: usize, q: &BemQuadrature) -> Vec<Vec<f64>> {
    let k = space.k();
    let nl = space.local_dim();
    let (a, b) = (&bmesh.panels[i], &bmesh.panels[j]);
    let dm = space.derivative_monomials();
    let mut out = vec![vec![0.0; nl]; nl];
    let (kind, dist) = classify(bmesh, i, j, q);
    match kind {
        PairKind::Coincident => {
            let ints: Vec<f64> = dm
                .iter()
                .map(|c| c.iter().enumerate().map(|(m, v)| v / (m as f64 + 1.0)).sum())
                .collect();
            let log_l = a.length.ln();
            for r in 0..nl {
                for c in 0..nl {
                    let mut d = 0.0;
                    for (al, ca) in dm[r].iter().enumerate() {
                        for (be, cb) in dm[c].iter().enumerate() {
                            d += ca * cb * log_moment_product(al, be);
                        }
                    }
                    out[r][c] = -(log_l * ints[r] * ints[c] + d) / (2.0 * PI);
                }
            }
        }
        PairKind::Far => {
            let rule = segment_gauss(far_points(k, q));
            let src: Vec<(Point, f64, Vec<f64>)> = rule
                .iter_1d()
                .map(|(s, w)| (b.point(s), w, space.shape_derivatives(s)))
                .collect();
            for (t, w) in rule.iter_1d() {
                let x = a.point(t);
                let dv = space.shape_derivatives(t);
                let mut inner = vec![0.0; nl];
                for (y, wy, v) in &src {
                    let phi = -norm(sub(x, *y)).ln() / (2.0 * PI);
                    for (c, vj) in inner.iter_mut().zip(v) {
                        *c += wy * phi * vj;
                    }
                }
                for r in 0..nl {
                    for c in 0..nl {
                        out[r][c] += w * dv[r] * inner[c];
                    }
                }
            }
        }
        _ => {
            for (t, w) in outer_rule(kind, a.length, dist, q) {
                let x = a.point(t);
                let dv: Vec<f64> = dm.iter().map(|c| horner(c, t)).collect();
                for c in 0..nl {
                    let inner = log_inner(b, x, &dm[c]);
                    for r in 0..nl {
                        out[r][c] += w * dv[r] * inner;
                    }
                }
            }
        }
    }
    out
}

/// Matrix of ⟨½φ_j + Kφ_j, μ_a⟩_Γ. Row `panel·(k+1) + a` tests against the
/// a-th orthonormal Legendre function of the panel's edge (canonical edge orientation).
pub fn assemble_k_block(bmesh: &BoundaryMesh, space: &BoundarySpace, q: &BemQuadrature) -> Mat<f64> {
    let k = space.k();
    let n = bmesh.len();
    let rows: Vec<Vec<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut block = vec![vec![0.0; space.dim()]; k + 1];
            for j in 0..n {
                let local = k_pair(bmesh, space, i, j, q);
                for (r, row) in local.iter().enumerate() {
                    for (c, d) in space.local_dofs(j).into_iter().enumerate() {
                        block[r][d] += row[c];
                    }
                }
            }
            block
        })
        .collect();
    Mat::from_fn(n * (k + 1), space.dim(), |r, c| rows[r / (k + 1)][r % (k + 1)][c])
}

/// Galerkin matrix of W. Fails if the two independently integrated triangles
/// differ by more than 1e-8 relative; otherwise returns the symmetric part.
pub fn assemble_w(bmesh: &BoundaryMesh, space: &BoundarySpace, q: &BemQuadrature) -> Result<Mat<f64>> {
    let n = bmesh.len();
    let dim = space.dim();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            // contributions to rows owned by panel i's test shapes
            let dofs_i = space.local_dofs(i);
            let mut block = vec![0.0; dofs_i.len() * dim];
            for j in 0..n {
                let local = w_pair(bmesh, space, i, j, q);
                for (r, row) in local.iter().enumerate() {
                    for (c, d) in space.local_dofs(j).into_iter().enumerate() {
                        block[r * dim + d] += row[c];
                    }
                }
            }
            block
        })
        .collect();
    let mut w = Mat::<f64>::zeros(dim, dim);
    for (i, block) in rows.iter().enumerate() {
        for (r, gr) in space.local_dofs(i).into_iter().enumerate() {
            for c in 0..dim {
                w[(gr, c)] += block[r * dim + c];
            }
        }
    }
    let scale = w.norm_max();
    let mut asym = 0.0f64;
    for r in 0..dim {
        for c in 0..r {
            asym = asym.max((w[(r, c)] - w[(c, r)]).abs());
        }
    }
    if asym > 1e-8 * scale {
        return Err(Error::OperatorCheck(format!(
            "W matrix asymmetry {asym:.3e} exceeds 1e-8 relative to {scale:.3e}"
        )));
    }
    log::debug!("W asymmetry before symmetrization: {:.3e}", asym / scale);
    Ok(Mat::from_fn(dim, dim, |r, c| 0.5 * (w[(r, c)] + w[(c, r)])))
}

/// All boundary matrices used by the coupled system.
#[derive(Debug, Clone)]
pub struct BoundaryOperatorSet {
    pub k_block: Mat<f64>,
    pub w: Mat<f64>,
    /// Ω = W + m mᵀ.
    pub omega: Mat<f64>,
    pub mean: Vec<f64>,
    /// |Γ|.
    pub perimeter: f64,
}

/// Ω = W + m mᵀ with m_i = ∫_Γ φ_i.
pub fn assemble_omega(bmesh: &BoundaryMesh, space: &BoundarySpace, q: &BemQuadrature) -> Result<(Mat<f64>, Mat<f64>, Vec<f64>)> {
    let w = assemble_w(bmesh, space, q)?;
    let m = space.mean_vector(bmesh);
    let omega = Mat::from_fn(w.nrows(), w.ncols(), |r, c| w[(r, c)] + m[r] * m[c]);
    Ok((omega, w, m))
}

impl BoundaryOperatorSet {
    pub fn assemble(bmesh: &BoundaryMesh, space: &BoundarySpace, q: &BemQuadrature) -> Result<Self> {
        let k_block = assemble_k_block(bmesh, space, q);
        let (omega, w, mean) = assemble_omega(bmesh, space, q)?;
        Ok(Self {
            k_block,
            w,
            omega,
            mean,
            perimeter: bmesh.perimeter(),
        })
    }
}
