use super::quadrature::triangle_quadrature;

/// Orthonormal modal basis of P_k on the reference triangle (0,0),(1,0),(0,1).
///
/// Built by Cholesky orthonormalization of centroid-shifted monomials ordered by
/// total degree, so the first `dim(P_j)` functions span P_j for every j ≤ k.
#[derive(Debug, Clone)]
pub struct TriangleBasis {
    degree: usize,
    exponents: Vec<(usize, usize)>,
    /// Row i holds the monomial coefficients of basis function i (lower triangular).
    coeffs: Vec<Vec<f64>>,
}

const CENTER: f64 = 1.0 / 3.0;

impl TriangleBasis {
    pub fn new(degree: usize) -> Self {
        let exponents: Vec<(usize, usize)> = (0..=degree)
            .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
            .collect();
        let n = exponents.len();
        let rule = triangle_quadrature(2 * degree).expect("degree within quadrature table");
        let mut gram = vec![vec![0.0; n]; n];
        for (p, w) in rule.iter() {
            let m = monomials(&exponents, p);
            for i in 0..n {
                for j in 0..=i {
                    gram[i][j] += w * m[i] * m[j];
                }
            }
        }
        let l = cholesky(&gram);
        let coeffs = lower_inverse(&l);
        Self {
            degree,
            exponents,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// (k+1)(k+2)/2.
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// dim P_j for j ≤ k; zero for j < 0.
    pub fn dim_of_degree(j: isize) -> usize {
        if j < 0 {
            0
        } else {
            let j = j as usize;
            (j + 1) * (j + 2) / 2
        }
    }

    pub fn eval(&self, p: [f64; 2]) -> Vec<f64> {
        let m = monomials(&self.exponents, p);
        self.coeffs
            .iter()
            .map(|row| row.iter().zip(&m).map(|(c, v)| c * v).sum())
            .collect()
    }

    /// Reference gradients (∂ξ, ∂η) of every basis function.
    pub fn eval_grad(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        let (dx, dy) = monomial_grads(&self.exponents, p);
        self.coeffs
            .iter()
            .map(|row| {
                let gx = row.iter().zip(&dx).map(|(c, v)| c * v).sum();
                let gy = row.iter().zip(&dy).map(|(c, v)| c * v).sum();
                [gx, gy]
            })
            .collect()
    }

    /// Mass matrix on the reference triangle; the identity by construction.
    pub fn mass_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    }
}

fn monomials(exponents: &[(usize, usize)], p: [f64; 2]) -> Vec<f64> {
    let (x, y) = (p[0] - CENTER, p[1] - CENTER);
    exponents
        .iter()
        .map(|&(a, b)| x.powi(a as i32) * y.powi(b as i32))
        .collect()
}

fn monomial_grads(exponents: &[(usize, usize)], p: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
    let (x, y) = (p[0] - CENTER, p[1] - CENTER);
    let dx = exponents
        .iter()
        .map(|&(a, b)| {
            if a == 0 {
                0.0
            } else {
                a as f64 * x.powi(a as i32 - 1) * y.powi(b as i32)
            }
        })
        .collect();
    let dy = exponents
        .iter()
        .map(|&(a, b)| {
            if b == 0 {
                0.0
            } else {
                b as f64 * x.powi(a as i32) * y.powi(b as i32 - 1)
            }
        })
        .collect();
    (dx, dy)
}

fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>();
            if i == j {
                assert!(s > 0.0, "monomial Gram matrix is not positive definite");
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

fn lower_inverse(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = l.len();
    let mut inv = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in col..n {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = rhs - (col..i).map(|p| l[i][p] * inv[p][col]).sum::<f64>();
            inv[i][col] = s / l[i][i];
        }
    }
    inv
}

/// Monomial coefficients of the shifted Legendre polynomial P_n(2t - 1).
pub fn shifted_legendre_monomials(n: usize) -> Vec<f64> {
    let binom = |a: usize, b: usize| -> f64 {
        (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
    };
    (0..=n)
        .map(|j| {
            let sign = if (n + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binom(n, j) * binom(n + j, j)
        })
        .collect()
}

/// Orthonormal Legendre basis of P_p on [0, 1]: sqrt(2j+1) P_j(2t - 1).
#[derive(Debug, Clone, Copy)]
pub struct SegmentBasis {
    degree: usize,
}

impl SegmentBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.eval_with_derivative(t).0
    }

    pub fn eval_derivative(&self, t: f64) -> Vec<f64> {
        self.eval_with_derivative(t).1
    }

    fn eval_with_derivative(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let x = 2.0 * t - 1.0;
        let n = self.dim();
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        p[0] = 1.0;
        if n > 1 {
            p[1] = x;
            dp[1] = 1.0;
        }
        for j in 2..n {
            let jf = j as f64;
            p[j] = ((2.0 * jf - 1.0) * x * p[j - 1] - (jf - 1.0) * p[j - 2]) / jf;
            dp[j] = dp[j - 2] + (2.0 * jf - 1.0) * p[j - 1];
        }
        for j in 0..n {
            let s = (2.0 * j as f64 + 1.0).sqrt();
            p[j] *= s;
            // d/dt = 2 d/dx
            dp[j] *= 2.0 * s;
        }
        (p, dp)
    }

    /// Monomial coefficients in t of every basis function.
    pub fn monomial_coeffs(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|j| {
                let s = (2.0 * j as f64 + 1.0).sqrt();
                shifted_legendre_monomials(j).into_iter().map(|c| s * c).collect()
            })
            .collect()
    }
}
