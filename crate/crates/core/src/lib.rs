//! Functions on position-orientation space stored as voxel grids of spherical
//! harmonic (or Wigner-D) coefficients, with left-invariant convection and
//! diffusion operators applied algebraically in the angular index and by
//! finite differences in space.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod deconvolution;
pub mod error;
pub mod evolution;
pub mod fields;
pub mod harmonics;
pub mod hough;
pub mod maxima;
pub mod operators;

pub use error::{Error, Result};
pub use num_complex::Complex64;
