//! Direction sets, FOD maxima extraction and detection scoring.

mod detect;
mod electrostatic;
mod score;

pub use detect::{detect_maxima, Detection, MaximaFinder, DEFAULT_RELATIVE_THRESHOLD};
pub use electrostatic::{cached_directions, electrostatic_directions, electrostatic_with, RepulsionOptions, DEFAULT_SEED};
pub use score::{angle_deg, match_and_score, match_pairs, ScoreReport};
