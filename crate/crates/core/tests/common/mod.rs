//! Brute-force oracles shared by the integration and acceptance tests. Nothing
//! here reuses the library's quadrature, shape functions or moment formulas.

#![allow(dead_code)]

use std::f64::consts::PI;

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use hdgbem::hdg::{LocalFields, ReferenceData};
use hdgbem::mesh::{BoundaryMesh, Mesh, Panel, Point};

/// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
pub fn gauss(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 2..=n {
        let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Legendre polynomial P_n(x) by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for m in 2..=n {
        let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Adaptive Gauss quadrature: a 10-point rule is accepted on an interval when
/// it agrees with the sum over both halves to `tol` absolute or `rel` relative.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, rel: f64) -> f64 {
    let rule = gauss(10);
    let apply = |lo: f64, hi: f64| rule.iter().map(|(t, w)| w * (hi - lo) * f(lo + t * (hi - lo))).sum::<f64>();
    #[allow(clippy::too_many_arguments)]
    fn go(apply: &dyn Fn(f64, f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, rel: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        if b - a <= 1e-13 * a.abs().max(b.abs()).max(1.0) {
            return whole;
        }
        let (l, r) = (apply(a, m), apply(m, b));
        if (l + r - whole).abs() <= tol.max(rel * (l.abs() + r.abs())) || depth == 0 {
            l + r
        } else {
            go(apply, a, m, l, 0.5 * tol, rel, depth - 1) + go(apply, m, b, r, 0.5 * tol, rel, depth - 1)
        }
    }
    go(&apply, a, b, apply(a, b), tol, rel, 60)
}

/// Adaptive quadrature with extra break points inside (a, b).
pub fn adaptive_split(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64, rel: f64) -> f64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&s| s > a && s < b));
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.windows(2).map(|w| adaptive(f, w[0], w[1], tol, rel)).sum()
}

/// Local Y_h shape `c` on a panel: [start hat, end hat, bubbles t(1-t)P_j(2t-1)].
pub fn shape(c: usize, t: f64) -> f64 {
    match c {
        0 => 1.0 - t,
        1 => t,
        j => t * (1.0 - t) * legendre(j - 2, 2.0 * t - 1.0),
    }
}

/// d/dt of `shape(c, t)`.
pub fn shape_derivative(c: usize, t: f64) -> f64 {
    match c {
        0 => -1.0,
        1 => 1.0,
        j => {
            let n = j - 2;
            let x = 2.0 * t - 1.0;
            let p = legendre(n, x);
            let dp = if n == 0 {
                0.0
            } else if (x * x - 1.0).abs() < 1e-14 {
                x.powi(n as i32 + 1) * (n * (n + 1)) as f64 / 2.0
            } else {
                n as f64 * (x * p - legendre(n - 1, x)) / (x * x - 1.0)
            };
            (1.0 - 2.0 * t) * p + t * (1.0 - t) * 2.0 * dp
        }
    }
}

/// Panels of `bmesh` carrying global Y_h DOF `d`, with the local shape index.
pub fn support(bmesh: &BoundaryMesh, k: usize, d: usize) -> Vec<(usize, usize)> {
    let n = bmesh.len();
    if d < n {
        vec![(d, 0), ((d + n - 1) % n, 1)]
    } else {
        let p = (d - n) / k;
        vec![(p, 2 + (d - n) % k)]
    }
}

/// x(t) - y(s) for points on two panels, measured from the nearest endpoints so
/// that the difference keeps full relative accuracy next to a shared vertex.
fn difference(pi: &Panel, t: f64, pj: &Panel, s: f64) -> Point {
    let (ta, xa) = if t < 0.5 { (0.0, pi.start) } else { (1.0, pi.end) };
    let (sa, ya) = if s < 0.5 { (0.0, pj.start) } else { (1.0, pj.end) };
    let (di, dj) = (pi.direction(), pj.direction());
    [
        (xa[0] - ya[0]) + (t - ta) * di[0] - (s - sa) * dj[0],
        (xa[1] - ya[1]) + (t - ta) * di[1] - (s - sa) * dj[1],
    ]
}

fn double_layer_kernel(d: Point, n: Point) -> f64 {
    (d[0] * n[0] + d[1] * n[1]) / (2.0 * PI * (d[0] * d[0] + d[1] * d[1]))
}

fn log_kernel(d: Point) -> f64 {
    -(d[0] * d[0] + d[1] * d[1]).sqrt().ln() / (2.0 * PI)
}

fn edge_legendre(p: &Panel, a: usize, t: f64) -> f64 {
    let s = if p.along_edge { t } else { 1.0 - t };
    (2.0 * a as f64 + 1.0).sqrt() * legendre(a, 2.0 * s - 1.0) / p.length.sqrt()
}

/// Outer integrals accept at `tol` absolute or 1e-10 relative; inner ones are
/// 100 times tighter in absolute terms and 1e-13 relative, so their noise stays
/// below the outer acceptance test.
///
/// Entry of the ½I + K block at test row `panel·(k+1) + a`, trial Y_h DOF `col`.
pub fn k_entry(bmesh: &BoundaryMesh, k: usize, row: usize, col: usize, tol: f64) -> f64 {
    let (i, a) = (row / (k + 1), row % (k + 1));
    let pi = &bmesh.panels[i];
    let mut total = 0.0;
    for (j, c) in support(bmesh, k, col) {
        if j == i {
            total += adaptive(&|t| 0.5 * edge_legendre(pi, a, t) * shape(c, t) * pi.length, 0.0, 1.0, tol, 1e-10);
            continue;
        }
        let pj = &bmesh.panels[j];
        let outer = |t: f64| {
            let inner = adaptive(&|s| double_layer_kernel(difference(pi, t, pj, s), pj.normal) * shape(c, s) * pj.length, 0.0, 1.0, 1e-2 * tol, 1e-13);
            edge_legendre(pi, a, t) * inner * pi.length
        };
        total += adaptive(&outer, 0.0, 1.0, tol, 1e-10);
    }
    total
}

/// Entry (r, c) of the hypersingular Galerkin matrix ∫∫ φ_r' φ_c' Φ.
pub fn w_entry(bmesh: &BoundaryMesh, k: usize, r: usize, c: usize, tol: f64) -> f64 {
    let mut total = 0.0;
    for (i, ci) in support(bmesh, k, r) {
        for (j, cj) in support(bmesh, k, c) {
            let (pi, pj) = (&bmesh.panels[i], &bmesh.panels[j]);
            let outer = |t: f64| {
                let inner = if i == j {
                    // -(1/2π) ∫ log(L|t - s|) g(s) ds with g(t) taken out analytically.
                    let g0 = shape_derivative(cj, t);
                    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
                    let smooth = adaptive_split(
                        &|s| -(t - s).abs().ln() / (2.0 * PI) * (shape_derivative(cj, s) - g0),
                        0.0,
                        1.0,
                        &[t],
                        1e-2 * tol,
                        1e-13,
                    );
                    let log_part = xlogx(t) + xlogx(1.0 - t) - 1.0;
                    smooth - g0 * log_part / (2.0 * PI) - pi.length.ln() / (2.0 * PI) * adaptive(&|s| shape_derivative(cj, s), 0.0, 1.0, 1e-2 * tol, 1e-13)
                } else {
                    adaptive(&|s| log_kernel(difference(pi, t, pj, s)) * shape_derivative(cj, s), 0.0, 1.0, 1e-2 * tol, 1e-13)
                };
                shape_derivative(ci, t) * inner
            };
            total += adaptive(&outer, 0.0, 1.0, tol, 1e-10);
        }
    }
    total
}

/// Integral over a triangle by a collapsed (Duffy) tensor Gauss rule.
pub fn triangle_integral(p: [Point; 3], n: usize, f: &dyn Fn(Point) -> f64) -> f64 {
    let g = gauss(n);
    let det = ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs();
    let mut s = 0.0;
    for &(a, wa) in &g {
        for &(b, wb) in &g {
            let (r0, r1) = (a, b * (1.0 - a));
            let x = [
                p[0][0] + r0 * (p[1][0] - p[0][0]) + r1 * (p[2][0] - p[0][0]),
                p[0][1] + r0 * (p[1][1] - p[0][1]) + r1 * (p[2][1] - p[0][1]),
            ];
            s += wa * wb * (1.0 - a) * det * f(x);
        }
    }
    s
}

fn monomials(deg: isize) -> Vec<(i32, i32)> {
    let mut v = Vec::new();
    for d in 0..=deg.max(-1) {
        for a in (0..=d).rev() {
            v.push((a as i32, (d - a) as i32));
        }
    }
    v
}

/// HDG projection of (q, u) onto triangle `t` from an overdetermined system in a
/// scaled monomial basis: interior moments against all monomials of degree k - 1
/// and side conditions against both monomials and Legendre polynomials of degree
/// k on each side, solved in the least-squares sense. Returns a closure that
/// evaluates (Πq, Πu) at a physical point.
pub fn projection_oracle(
    mesh: &Mesh,
    t: usize,
    k: usize,
    q: &dyn Fn(Point) -> [f64; 2],
    u: &dyn Fn(Point) -> f64,
    tau: [f64; 3],
) -> impl Fn(Point) -> ([f64; 2], f64) {
    let p = mesh.triangle_points(t);
    let c = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
    let h = mesh.diameters[t];
    let basis = monomials(k as isize);
    let test = monomials(k as isize - 1);
    let nb = basis.len();
    let eval_basis = move |x: Point| -> Vec<f64> {
        let (dx, dy) = ((x[0] - c[0]) / h, (x[1] - c[1]) / h);
        basis.iter().map(|&(a, b)| dx.powi(a) * dy.powi(b)).collect()
    };
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let nq = k + 6;
    for &(a, b) in &test {
        let w = |x: Point| ((x[0] - c[0]) / h).powi(a) * ((x[1] - c[1]) / h).powi(b);
        for comp in 0..3 {
            let mut row = vec![0.0; 3 * nb];
            for (m, r) in row[comp * nb..(comp + 1) * nb].iter_mut().enumerate() {
                *r = triangle_integral(p, nq, &|x| eval_basis(x)[m] * w(x));
            }
            let rhs = triangle_integral(p, nq, &|x| {
                let v = match comp {
                    0 => q(x)[0],
                    1 => q(x)[1],
                    _ => u(x),
                };
                v * w(x)
            });
            rows.push((row, rhs));
        }
    }
    let g = gauss(k + 8);
    for s in 0..3 {
        let (a, b) = (p[s], p[(s + 1) % 3]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let n = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
        let at = |tt: f64| [a[0] + tt * (b[0] - a[0]), a[1] + tt * (b[1] - a[1])];
        let tests: Vec<Box<dyn Fn(f64) -> f64>> = (0..=k)
            .flat_map(|d| {
                let mono: Box<dyn Fn(f64) -> f64> = Box::new(move |tt: f64| tt.powi(d as i32));
                let leg: Box<dyn Fn(f64) -> f64> = Box::new(move |tt: f64| legendre(d, 2.0 * tt - 1.0));
                [mono, leg]
            })
            .collect();
        for mu in &tests {
            let mut row = vec![0.0; 3 * nb];
            let mut rhs = 0.0;
            for &(tt, w) in &g {
                let x = at(tt);
                let phi = eval_basis(x);
                let wt = w * len * mu(tt);
                for m in 0..nb {
                    row[m] += wt * phi[m] * n[0];
                    row[nb + m] += wt * phi[m] * n[1];
                    row[2 * nb + m] += wt * tau[s] * phi[m];
                }
                let qv = q(x);
                rhs += wt * (qv[0] * n[0] + qv[1] * n[1] + tau[s] * u(x));
            }
            rows.push((row, rhs));
        }
    }
    let a = Mat::from_fn(rows.len(), 3 * nb, |i, j| rows[i].0[j]);
    let b = Mat::from_fn(rows.len(), 1, |i, _| rows[i].1);
    let x = a.qr().solve_lstsq(&b);
    let coef: Vec<f64> = (0..3 * nb).map(|i| x[(i, 0)]).collect();
    move |pt: Point| {
        let phi = eval_basis(pt);
        let dot = |off: usize| (0..nb).map(|m| coef[off + m] * phi[m]).sum::<f64>();
        ([dot(0), dot(nb)], dot(2 * nb))
    }
}

/// Evaluates library element fields at a physical point of triangle `t`.
pub fn eval_fields(mesh: &Mesh, t: usize, reference: &ReferenceData, f: &LocalFields, x: Point) -> ([f64; 2], f64) {
    let p = mesh.triangle_points(t);
    let j = [[p[1][0] - p[0][0], p[2][0] - p[0][0]], [p[1][1] - p[0][1], p[2][1] - p[0][1]]];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let d = [x[0] - p[0][0], x[1] - p[0][1]];
    let r = [(j[1][1] * d[0] - j[0][1] * d[1]) / det, (-j[1][0] * d[0] + j[0][0] * d[1]) / det];
    let psi: Vec<f64> = reference.basis.eval(r).into_iter().map(|v| v / det.sqrt()).collect();
    f.eval(&psi)
}

/// An irregular star-shaped heptagon split into a fan around an interior point,
/// refined `levels` times. Adjacent boundary panels meet at varying angles.
pub fn heptagon_mesh(levels: usize) -> Mesh {
    let radii = [1.0, 0.8, 1.15, 0.9, 1.05, 0.75, 1.1];
    let mut v = vec![[0.05, -0.02]];
    for (i, r) in radii.iter().enumerate() {
        let th = 2.0 * PI * (i as f64 + 0.1 * (i % 3) as f64) / 7.0;
        v.push([r * th.cos(), r * th.sin()]);
    }
    let tris: Vec<[usize; 3]> = (0..7).map(|i| [0, 1 + i, 1 + (i + 1) % 7]).collect();
    let mut m = Mesh::from_triangles(v, tris).expect("heptagon mesh");
    for _ in 0..levels {
        m = m.refine_uniform();
    }
    m
}
