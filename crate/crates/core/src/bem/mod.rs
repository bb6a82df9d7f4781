//! Boundary element side: the continuous density space Y_h, the Galerkin
//! matrices of ½I + K and of the stabilized hypersingular form ω, and
//! evaluation of layer potentials off Γ.

mod operators;
mod potential;
mod space;

pub use operators::{assemble_k_block, assemble_omega, assemble_w, BoundaryOperatorSet};
pub use potential::{
    distance_to_boundary, eval_double_layer, eval_double_layer_with, eval_single_layer,
};
pub use space::BoundarySpace;
