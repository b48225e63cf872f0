//! Left-invariant vector fields and their quadratic forms acting on
//! coefficient fields: algebraic in the angular index, finite differences
//! in space.

mod channel_op;
mod generator;
mod s2;
mod stencil;
mod wigner_ops;

pub use channel_op::{cartesian_weights, Basis, ChannelOp};
pub use generator::{build_generator, build_wigner_generator, GeneratorSpec, SphGenerator, S2_NAMES, WIGNER_NAMES};
pub use s2::{
    apply_convolved_quadratic, apply_h, apply_j_squared_s2, apply_t0_s2, apply_txy2_s2, apply_tz2_s2, conv_inner_operator,
    conv_outer_operator, diagonal_operator, jsq_operator, laplace_operator, path_split, t0_operator, txy2_operator, tz2_operator, z_block,
    z_weight, ConvolvedVariant, SphOperator, ZBlock,
};
pub use stencil::{fd_apply, Kernel};
pub use wigner_ops::{
    apply_j_squared, apply_jpm, apply_jz, apply_mixed_tj, apply_tk, apply_tt, jpm_operator, jsq_wigner_operator, jz_operator,
    mixed_operator, tk_operator, tt_operator, MixedVariant, WignerOperator,
};
