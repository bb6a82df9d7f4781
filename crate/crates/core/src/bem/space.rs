use crate::approximation::shifted_legendre_monomials;
use crate::error::{Error, Result};
use crate::mesh::BoundaryMesh;

/// Continuous piecewise polynomials of degree `k + 1` on the closed panel loop.
///
/// Vertex DOF `i` is the start vertex of panel `i`, so panel `i` ends at DOF
/// `(i + 1) % N`. Interior (bubble) DOFs follow: panel `i` owns
/// `N + i·k .. N + (i+1)·k` with shapes t(1 - t) P_j(2t - 1).
#[derive(Debug, Clone)]
pub struct BoundarySpace {
    k: usize,
    n_panels: usize,
    /// Monomial coefficients in t of the `k + 2` local shapes: start hat, end hat, bubbles.
    shapes: Vec<Vec<f64>>,
    dshapes: Vec<Vec<f64>>,
}

fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(m, v)| m as f64 * v).collect()
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

impl BoundarySpace {
    /// Y_h paired with HDG degree `k`.
    pub fn new(bmesh: &BoundaryMesh, k: usize) -> Result<Self> {
        if bmesh.len() < 3 {
            return Err(Error::BoundaryTopology(format!(
                "a closed loop needs at least 3 panels, got {}",
                bmesh.len()
            )));
        }
        let mut shapes = vec![vec![1.0, -1.0], vec![0.0, 1.0]];
        for j in 0..k {
            let p = shifted_legendre_monomials(j);
            let mut c = vec![0.0; j + 3];
            for (m, v) in p.iter().enumerate() {
                c[m + 1] += v;
                c[m + 2] -= v;
            }
            shapes.push(c);
        }
        let dshapes = shapes.iter().map(|c| derivative(c)).collect();
        Ok(Self {
            k,
            n_panels: bmesh.len(),
            shapes,
            dshapes,
        })
    }

    /// HDG degree k; the polynomial degree on each panel is k + 1.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.k + 1
    }

    pub fn num_panels(&self) -> usize {
        self.n_panels
    }

    /// N_panels · (k + 1).
    pub fn dim(&self) -> usize {
        self.n_panels * (self.k + 1)
    }

    /// Local shapes per panel.
    pub fn local_dim(&self) -> usize {
        self.k + 2
    }

    pub fn local_dofs(&self, panel: usize) -> Vec<usize> {
        let n = self.n_panels;
        let mut d = vec![panel, (panel + 1) % n];
        d.extend((0..self.k).map(|j| n + panel * self.k + j));
        d
    }

    pub fn shape_monomials(&self) -> &[Vec<f64>] {
        &self.shapes
    }

    /// Monomial coefficients of the shape derivatives d/dt.
    pub fn derivative_monomials(&self) -> &[Vec<f64>] {
        &self.dshapes
    }

    pub fn shape_values(&self, t: f64) -> Vec<f64> {
        self.shapes.iter().map(|c| horner(c, t)).collect()
    }

    pub fn shape_derivatives(&self, t: f64) -> Vec<f64> {
        self.dshapes.iter().map(|c| horner(c, t)).collect()
    }

    /// Value of the member with coefficients `coeffs` at parameter `t` of `panel`.
    pub fn eval(&self, coeffs: &[f64], panel: usize, t: f64) -> f64 {
        self.local_dofs(panel)
            .iter()
            .zip(self.shape_values(t))
            .map(|(&d, v)| coeffs[d] * v)
            .sum()
    }

    /// Coefficients of the constant function `c`.
    pub fn constant(&self, c: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[..self.n_panels].fill(c);
        v
    }

    /// Piecewise linear interpolant of vertex values; bubbles are zero.
    pub fn interpolate_vertices(&self, bmesh: &BoundaryMesh, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for (i, p) in bmesh.panels.iter().enumerate() {
            v[i] = f(p.start);
        }
        v
    }

    /// m_i = ∫_Γ φ_i.
    pub fn mean_vector(&self, bmesh: &BoundaryMesh) -> Vec<f64> {
        let integrals: Vec<f64> = self
            .shapes
            .iter()
            .map(|c| c.iter().enumerate().map(|(m, v)| v / (m as f64 + 1.0)).sum())
            .collect();
        let mut m = vec![0.0; self.dim()];
        for (i, p) in bmesh.panels.iter().enumerate() {
            for (d, s) in self.local_dofs(i).into_iter().zip(&integrals) {
                m[d] += p.length * s;
            }
        }
        m
    }

    /// Gram matrix ∫_Γ φ_i φ_j, row-major.
    pub fn mass_matrix(&self, bmesh: &BoundaryMesh) -> Vec<Vec<f64>> {
        let rule = crate::approximation::segment_gauss(self.k + 3);
        let mut mass = vec![vec![0.0; self.dim()]; self.dim()];
        for (i, p) in bmesh.panels.iter().enumerate() {
            let dofs = self.local_dofs(i);
            for (t, w) in rule.iter_1d() {
                let v = self.shape_values(t);
                for (a, &da) in dofs.iter().enumerate() {
                    for (b, &db) in dofs.iter().enumerate() {
                        mass[da][db] += w * p.length * v[a] * v[b];
                    }
                }
            }
        }
        mass
    }
}
