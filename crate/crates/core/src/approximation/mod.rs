//! Polynomial bases on the reference triangle and segment, quadrature rules,
//! and closed-form moments of the logarithmic and Cauchy kernels.

mod basis;
mod log_moment;
mod quadrature;

pub use basis::{shifted_legendre_monomials, SegmentBasis, TriangleBasis};
pub use log_moment::{
    cauchy_moment, log_moment, log_moment_complex, log_moment_product, MAX_LOG_MOMENT,
};
pub use quadrature::{segment_gauss, triangle_quadrature, QuadRule, MAX_TRIANGLE_EXACTNESS};
