use faer::linalg::solvers::Solve;
use faer::Mat;

use super::element::{side_info, Affine, LocalFields, ReferenceData};
use crate::approximation::TriangleBasis;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

/// HDG projection (Πq, Πu) of smooth fields onto triangle `t`.
///
/// Πq and Πu match the L² moments of q and u against polynomials of degree k - 1,
/// and Πq·n + τΠu matches the moments of q·n + τu against P_k on every side.
/// Coefficients are returned in the element's physical orthonormal basis.
/// `reference` fixes the quadrature; build it with enough exactness for the data.
pub fn hdg_projection(
    mesh: &Mesh,
    t: usize,
    q: &dyn Fn(Point) -> [f64; 2],
    u: &dyn Fn(Point) -> f64,
    tau: [f64; 3],
    reference: &ReferenceData,
) -> Result<LocalFields> {
    let k = reference.k;
    let n = reference.n();
    let m = TriangleBasis::dim_of_degree(k as isize - 1);
    let affine = Affine::new(mesh.triangle_points(t));
    let sides = side_info(mesh, t);
    let scale = 1.0 / affine.det.sqrt();
    let nz = 3 * n;

    let mut mat = Mat::<f64>::zeros(nz, nz);
    let mut rhs = Mat::<f64>::zeros(nz, 1);

    // Interior moments. The basis is hierarchical and orthonormal, so these rows
    // pin the leading coefficients directly.
    for (qp, &r) in reference.vol_points.iter().enumerate() {
        let x = affine.map(r);
        let w = reference.vol_weights[qp] * affine.det;
        let qv = q(x);
        let uv = u(x);
        for i in 0..m {
            let psi = reference.vol_values[qp][i] * scale;
            rhs[(i, 0)] += w * qv[0] * psi;
            rhs[(n + i, 0)] += w * qv[1] * psi;
            rhs[(2 * n + i, 0)] += w * uv * psi;
        }
    }
    for c in 0..3 {
        for i in 0..m {
            mat[(c * n + i, c * n + i)] = 1.0;
        }
    }

    // Side moments fill the remaining 3(k + 1) rows of each block, one row per (side, b).
    let free_rows: Vec<usize> = (0..3).flat_map(|c| (m..n).map(move |i| c * n + i)).collect();
    for s in 0..3 {
        let side = sides[s];
        let mu_tab = if side.forward {
            &reference.mu_forward
        } else {
            &reference.mu_reverse
        };
        let [p0, p1] = mesh.side_points(t, s);
        let mu_scale = 1.0 / side.length.sqrt();
        let [nx, ny] = side.normal;
        for (qp, &ws) in reference.side_weights.iter().enumerate() {
            let w = ws * side.length;
            let ts = reference.side_params[qp];
            let x = [p0[0] + ts * (p1[0] - p0[0]), p0[1] + ts * (p1[1] - p0[1])];
            let qv = q(x);
            let data = qv[0] * nx + qv[1] * ny + tau[s] * u(x);
            for b in 0..=k {
                let row = free_rows[s * (k + 1) + b];
                let mu = mu_tab[qp][b] * mu_scale;
                rhs[(row, 0)] += w * data * mu;
                for j in 0..n {
                    let psi = reference.side_values[s][qp][j] * scale;
                    mat[(row, j)] += w * psi * nx * mu;
                    mat[(row, n + j)] += w * psi * ny * mu;
                    mat[(row, 2 * n + j)] += w * tau[s] * psi * mu;
                }
            }
        }
    }

    let sol = mat.partial_piv_lu().solve(&rhs);
    let resid = &mat * &sol - &rhs;
    let rnorm = resid.norm_max();
    let bound = 1e-10 * (1.0 + rhs.norm_max()) * (1.0 + mat.norm_max() * sol.norm_max());
    if !(rnorm <= bound) {
        return Err(Error::SingularLocal { element: t });
    }
    let z: Vec<f64> = (0..nz).map(|i| sol[(i, 0)]).collect();
    Ok(LocalFields {
        qx: z[..n].to_vec(),
        qy: z[n..2 * n].to_vec(),
        u: z[2 * n..].to_vec(),
    })
}
