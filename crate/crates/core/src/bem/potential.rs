use std::f64::consts::PI;

use super::space::BoundarySpace;
use crate::approximation::segment_gauss;
use crate::config::BemQuadrature;
use crate::error::{Error, Result};
use crate::mesh::{dot, norm, sub, BoundaryMesh, Panel, Point};

const MAX_DEPTH: usize = 60;

fn point_segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let d = sub(b, a);
    let t = (dot(sub(x, a), d) / dot(d, d)).clamp(0.0, 1.0);
    norm(sub(x, [a[0] + t * d[0], a[1] + t * d[1]]))
}

/// Distance from `x` to the polygon Γ_h.
pub fn distance_to_boundary(bmesh: &BoundaryMesh, x: Point) -> f64 {
    bmesh
        .panels
        .iter()
        .map(|p| point_segment_distance(x, p.start, p.end))
        .fold(f64::INFINITY, f64::min)
}

fn check_off_boundary(bmesh: &BoundaryMesh, x: Point) -> Result<()> {
    let d = distance_to_boundary(bmesh, x);
    if d <= 1e-12 * bmesh.perimeter() {
        return Err(Error::TooCloseToBoundary {
            x: x[0],
            y: x[1],
            distance: d,
        });
    }
    Ok(())
}

/// ∫ over parameters [lo, hi] of `panel` of kernel(x, y) f(t) dΓ, bisecting until
/// every piece is at least its own length away from `x`.
fn panel_integral(
    panel: &Panel,
    lo: f64,
    hi: f64,
    x: Point,
    kernel: &dyn Fn(Point) -> f64,
    f: &dyn Fn(f64) -> f64,
    points: usize,
    depth: usize,
) -> f64 {
    let (a, b) = (panel.point(lo), panel.point(hi));
    let len = (hi - lo) * panel.length;
    if depth < MAX_DEPTH && point_segment_distance(x, a, b) < len {
        let mid = 0.5 * (lo + hi);
        return panel_integral(panel, lo, mid, x, kernel, f, points, depth + 1)
            + panel_integral(panel, mid, hi, x, kernel, f, points, depth + 1);
    }
    segment_gauss(points)
        .iter_1d()
        .map(|(s, w)| {
            let t = lo + s * (hi - lo);
            w * len * kernel(panel.point(t)) * f(t)
        })
        .sum()
}

/// (Dφ)(x) = (1/2π) ∫_Γ (x - y)·n(y) / |x - y|² φ(y) dΓ(y), with φ given per panel
/// as `phi(panel, t)`.
pub fn eval_double_layer_with(
    bmesh: &BoundaryMesh,
    phi: &dyn Fn(usize, f64) -> f64,
    x: Point,
    q: &BemQuadrature,
) -> Result<f64> {
    check_off_boundary(bmesh, x)?;
    let total: f64 = bmesh
        .panels
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let kernel = |y: Point| {
                let r = sub(x, y);
                dot(r, p.normal) / dot(r, r)
            };
            panel_integral(p, 0.0, 1.0, x, &kernel, &|t| phi(i, t), q.potential_points, 0)
        })
        .sum();
    Ok(total / (2.0 * PI))
}

/// Double-layer potential of a member of Y_h.
pub fn eval_double_layer(
    bmesh: &BoundaryMesh,
    space: &BoundarySpace,
    coeffs: &[f64],
    x: Point,
    q: &BemQuadrature,
) -> Result<f64> {
    eval_double_layer_with(bmesh, &|i, t| space.eval(coeffs, i, t), x, q)
}

/// (Sλ)(x) = ∫_Γ Φ(|x - y|) λ(y) dΓ(y) with Φ(r) = -(1/2π) log r.
pub fn eval_single_layer(
    bmesh: &BoundaryMesh,
    lambda: &dyn Fn(usize, f64) -> f64,
    x: Point,
    q: &BemQuadrature,
) -> Result<f64> {
    check_off_boundary(bmesh, x)?;
    let total: f64 = bmesh
        .panels
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let kernel = |y: Point| norm(sub(x, y)).ln();
            panel_integral(p, 0.0, 1.0, x, &kernel, &|t| lambda(i, t), q.potential_points, 0)
        })
        .sum();
    Ok(-total / (2.0 * PI))
}
