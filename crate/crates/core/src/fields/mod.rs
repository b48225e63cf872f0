//! Coefficient-field containers on regular voxel grids, direction sets,
//! sampling and projection, real even-order packing, rotation and SHV I/O.

mod directions;
mod grid;
mod packing;
mod projection;
pub mod shv;
mod spherical;
mod wigner_field;

pub use directions::DirectionSet;
pub use grid::GridSpec;
pub use packing::{pack_real_even, packed_len, unpack_real_even, PackedField};
pub use projection::{band_limited_delta, evaluate_on_directions, project_to_sh, synthesis_matrix, Projector, SampledField};
pub use spherical::{rotate_coeffs, Parity, SphLayout, SphericalField};
pub use wigner_field::{WignerField, WignerLayout};
