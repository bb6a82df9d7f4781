//! Non-symmetric coupling of the hybridizable discontinuous Galerkin (HDG)
//! method with a Galerkin boundary element method built on the double-layer
//! potential, for the 2D transmission problem
//!
//! ```text
//!   q + κ∇u = 0,  div q = f      in Ω
//!   Δu₊ = 0                      in ℝ² \ Ω̄,  u₊ → 0 at infinity
//!   u = u₊ + β₀,  -q·n = ∂ₙu₊ + β₁   on Γ = ∂Ω
//! ```
//!
//! The exterior field is represented as u₊ = Dφ. After static condensation of
//! the element unknowns the discrete system involves only the skeleton trace
//! û_h and the continuous boundary density φ_h.

pub mod approximation;
pub mod bem;
pub mod config;
pub mod coupling;
pub mod error;
pub mod harness;
pub mod hdg;
pub mod mesh;

pub use config::Config;
pub use error::{Error, Result};
