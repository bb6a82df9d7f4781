use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_TRIANGLE_EXACTNESS: usize = 20;
const MAX_GAUSS_POINTS: usize = 32;

/// Points and weights on a reference cell: the triangle (0,0),(1,0),(0,1) or the segment [0,1].
///
/// Segment rules store the parameter in the first coordinate and 0 in the second.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Iterator over (parameter, weight) for segment rules.
    pub fn iter_1d(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().map(|p| p[0]).zip(self.weights.iter().copied())
    }
}

/// Legendre polynomial P_n and its derivative at `z`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1], by Newton iteration.
fn gauss_legendre_symmetric(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `n`-point Gauss-Legendre rule on [0, 1], exact to degree 2n - 1.
///
/// # Panics
/// If `n` is zero or larger than 32.
pub fn segment_gauss(n: usize) -> QuadRule {
    assert!(
        (1..=MAX_GAUSS_POINTS).contains(&n),
        "segment_gauss supports 1..=32 points, got {n}"
    );
    let (x, w) = gauss_legendre_symmetric(n);
    QuadRule {
        points: x.iter().map(|&t| [0.5 * (t + 1.0), 0.0]).collect(),
        weights: w.iter().map(|&wi| 0.5 * wi).collect(),
        exactness: 2 * n - 1,
    }
}

/// Rule on the reference triangle exact for polynomials of total degree `exactness`.
///
/// Degree 0 and 1 use the centroid rule; higher degrees use a collapsed
/// (Duffy) tensor product of Gauss rules, which has positive weights.
pub fn triangle_quadrature(exactness: usize) -> Result<QuadRule> {
    if exactness > MAX_TRIANGLE_EXACTNESS {
        return Err(Error::QuadratureOrder {
            requested: exactness,
            max: MAX_TRIANGLE_EXACTNESS,
        });
    }
    if exactness <= 1 {
        return Ok(QuadRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            exactness,
        });
    }
    // x = u, y = (1 - u) v, Jacobian (1 - u): degree p + 1 in u, p in v.
    let nu = (exactness + 2).div_ceil(2);
    let nv = (exactness + 1).div_ceil(2);
    let ru = segment_gauss(nu);
    let rv = segment_gauss(nv);
    let mut points = Vec::with_capacity(nu * nv);
    let mut weights = Vec::with_capacity(nu * nv);
    for (u, wu) in ru.iter_1d() {
        for (v, wv) in rv.iter_1d() {
            points.push([u, (1.0 - u) * v]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    Ok(QuadRule {
        points,
        weights,
        exactness,
    })
}
