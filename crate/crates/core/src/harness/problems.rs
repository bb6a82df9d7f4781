use std::f64::consts::PI;
use std::sync::Arc;

use crate::coupling::ProblemData;
use crate::mesh::Point;

pub type Scalar = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type Vector = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// Exact interior and exterior fields together with the data they induce.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub name: String,
    pub kappa: Scalar,
    pub u: Scalar,
    /// q = -κ∇u.
    pub q: Vector,
    /// f = div q.
    pub f: Scalar,
    pub u_plus: Scalar,
    pub grad_u_plus: Vector,
    pub x_obs: Point,
}

impl std::fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedProblem")
            .field("name", &self.name)
            .field("x_obs", &self.x_obs)
            .finish_non_exhaustive()
    }
}

impl ManufacturedProblem {
    /// β₀ = u - u₊ on Γ.
    pub fn beta0(&self, x: Point) -> f64 {
        (self.u)(x) - (self.u_plus)(x)
    }

    /// β₁ = -q·n - ∇u₊·n on Γ.
    pub fn beta1(&self, x: Point, n: Point) -> f64 {
        let q = (self.q)(x);
        let g = (self.grad_u_plus)(x);
        -(q[0] * n[0] + q[1] * n[1]) - (g[0] * n[0] + g[1] * n[1])
    }

    pub fn data(&self) -> ProblemData {
        let (u, up) = (self.u.clone(), self.u_plus.clone());
        let (q, gp) = (self.q.clone(), self.grad_u_plus.clone());
        let (kappa, f) = (self.kappa.clone(), self.f.clone());
        ProblemData {
            kappa: Box::new(move |x| kappa(x)),
            f: Box::new(move |x| f(x)),
            beta0: Box::new(move |x| u(x) - up(x)),
            beta1: Box::new(move |x, n| {
                let (qv, g) = (q(x), gp(x));
                -(qv[0] * n[0] + qv[1] * n[1]) - (g[0] * n[0] + g[1] * n[1])
            }),
        }
    }
}

/// κ = 1 + x², u = e^{x+y}, and the exterior field of a source/sink pair inside Ω.
pub fn problem_table123() -> ManufacturedProblem {
    const X1: Point = [0.3, 0.4];
    const X2: Point = [0.7, 0.6];
    let dist2 = |x: Point, c: Point| (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
    ManufacturedProblem {
        name: "table123".into(),
        kappa: Arc::new(|x| 1.0 + x[0] * x[0]),
        u: Arc::new(|x| (x[0] + x[1]).exp()),
        q: Arc::new(|x| {
            let v = -(1.0 + x[0] * x[0]) * (x[0] + x[1]).exp();
            [v, v]
        }),
        f: Arc::new(|x| -(x[0] + x[1]).exp() * (2.0 * x[0] + 2.0 * (1.0 + x[0] * x[0]))),
        u_plus: Arc::new(move |x| -(dist2(x, X1) / dist2(x, X2)).ln() / (4.0 * PI)),
        grad_u_plus: Arc::new(move |x| {
            let (a, b) = (dist2(x, X1), dist2(x, X2));
            let c = -1.0 / (2.0 * PI);
            [
                c * ((x[0] - X1[0]) / a - (x[0] - X2[0]) / b),
                c * ((x[1] - X1[1]) / a - (x[1] - X2[1]) / b),
            ]
        }),
        x_obs: [-0.1, 0.1],
    }
}

/// Monomial coefficients (a, b, c) of c·x^a·y^b for the degree-k polynomial problem.
fn polynomial_terms(k: usize) -> Vec<(i32, i32, f64)> {
    let all = [
        (0, 0, 1.5),
        (1, 0, 0.7),
        (0, 1, -0.4),
        (2, 0, 0.3),
        (1, 1, -0.2),
        (0, 2, 0.5),
        (3, 0, -0.1),
        (2, 1, 0.25),
        (1, 2, 0.15),
        (0, 3, -0.35),
    ];
    all.into_iter().filter(|&(a, b, _)| (a + b) as usize <= k).collect()
}

fn mono(x: Point, a: i32, b: i32) -> f64 {
    if a < 0 || b < 0 {
        0.0
    } else {
        x[0].powi(a) * x[1].powi(b)
    }
}

/// A global polynomial of degree `k` with κ ≡ 1 and no exterior field, which the
/// discretization reproduces exactly.
pub fn problem_polynomial(k: usize) -> ManufacturedProblem {
    let terms = Arc::new(polynomial_terms(k));
    let (t1, t2, t3) = (terms.clone(), terms.clone(), terms);
    ManufacturedProblem {
        name: format!("polynomial{k}"),
        kappa: Arc::new(|_| 1.0),
        u: Arc::new(move |x| t1.iter().map(|&(a, b, c)| c * mono(x, a, b)).sum()),
        q: Arc::new(move |x| {
            let gx: f64 = t2.iter().map(|&(a, b, c)| c * a as f64 * mono(x, a - 1, b)).sum();
            let gy: f64 = t2.iter().map(|&(a, b, c)| c * b as f64 * mono(x, a, b - 1)).sum();
            [-gx, -gy]
        }),
        f: Arc::new(move |x| {
            let lap: f64 = t3
                .iter()
                .map(|&(a, b, c)| {
                    c * ((a * (a - 1)) as f64 * mono(x, a - 2, b) + (b * (b - 1)) as f64 * mono(x, a, b - 2))
                })
                .sum();
            -lap
        }),
        u_plus: Arc::new(|_| 0.0),
        grad_u_plus: Arc::new(|_| [0.0, 0.0]),
        x_obs: [-0.1, 0.1],
    }
}
