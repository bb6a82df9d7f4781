//! Closed-form moments ∫₀¹ tᵐ log|t - s| dt and their complex and Cauchy-kernel
//! relatives. They make the log-singular panel integrals of the boundary
//! operators exact in the inner variable.

use num_complex::Complex64;

/// Largest power accepted by the moment routines.
pub const MAX_LOG_MOMENT: usize = 12;

/// ∫₀¹ tᵐ log|t - s| dt for any real `s`, including the endpoints 0 and 1.
///
/// Integration by parts gives
/// `(1/(m+1)) [(1 - s^{m+1}) log|1-s| + s^{m+1} log|s| - Σ_{j=0}^{m} s^{m-j}/(j+1)]`,
/// with `0 · log 0 = 0`.
///
/// # Panics
/// If `m > MAX_LOG_MOMENT`.
pub fn log_moment(m: usize, s: f64) -> f64 {
    assert!(m <= MAX_LOG_MOMENT, "log_moment power {m} exceeds {MAX_LOG_MOMENT}");
    let sp = s.powi(m as i32 + 1);
    let one_minus = 1.0 - s;
    let t1 = if one_minus == 0.0 {
        0.0
    } else {
        (1.0 - sp) * one_minus.abs().ln()
    };
    let t0 = if s == 0.0 { 0.0 } else { sp * s.abs().ln() };
    let poly: f64 = (0..=m).map(|j| s.powi((m - j) as i32) / (j as f64 + 1.0)).sum();
    (t1 + t0 - poly) / (m as f64 + 1.0)
}

/// ∫₀¹ tᵐ log(t - z) dt with the principal logarithm, for `z` off the open segment (0, 1)
/// or with nonzero imaginary part. The real part is ∫₀¹ tᵐ log|t - z| dt.
pub fn log_moment_complex(m: usize, z: Complex64) -> Complex64 {
    assert!(m <= MAX_LOG_MOMENT, "log_moment power {m} exceeds {MAX_LOG_MOMENT}");
    let one = Complex64::new(1.0, 0.0);
    let zp = z.powu(m as u32 + 1);
    let w = one - z;
    let t1 = if w.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        (one - zp) * w.ln()
    };
    let t0 = if z.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        zp * (-z).ln()
    };
    let poly: Complex64 = (0..=m).map(|j| z.powu((m - j) as u32) / (j as f64 + 1.0)).sum();
    (t1 + t0 - poly) / (m as f64 + 1.0)
}

/// ∫₀¹ tᵐ / (t - z) dt for `z` with nonzero imaginary part.
///
/// Its imaginary part, for Im z = η > 0, equals η ∫₀¹ tᵐ / ((t - Re z)² + η²) dt,
/// which is the double-layer kernel integrated against tᵐ on a straight panel.
pub fn cauchy_moment(m: usize, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let poly: Complex64 = (0..m)
        .map(|j| z.powu((m - 1 - j) as u32) / (j as f64 + 1.0))
        .sum();
    poly + z.powu(m as u32) * ((one - z).ln() - (-z).ln())
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// ∫₀¹∫₀¹ s^a t^b log|t - s| dt ds in closed form.
pub fn log_moment_product(a: usize, b: usize) -> f64 {
    let n = a + b + 1;
    // ∫ s^a log|1-s| = -H_{a+1}/(a+1),  ∫ s^n log s = -1/(n+1)^2.
    let log1 = |p: usize| -harmonic(p + 1) / (p as f64 + 1.0);
    let log0 = |p: usize| -1.0 / ((p as f64 + 1.0) * (p as f64 + 1.0));
    let poly: f64 = (0..=b)
        .map(|j| 1.0 / ((j as f64 + 1.0) * ((a + b - j) as f64 + 1.0)))
        .sum();
    (log1(a) - log1(n) + log0(n) - poly) / (b as f64 + 1.0)
}
