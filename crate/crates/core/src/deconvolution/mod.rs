//! Spatially regularized spherical deconvolution: fiber response, crossing
//! phantom with Rician noise, normal equations and Krylov solve.

mod experiment;
mod phantom;
mod response;
mod solver;

pub use experiment::{
    crossing_experiment, phantom_finder, run_crossing_trial, sampling_directions, score_phantom, stream_rng, CrossingTrial, ExperimentRow,
    PHANTOM_RELATIVE_THRESHOLD,
};
pub use phantom::{add_rician, gradient_table, isotropic_level, seeded_rng, simulate_crossing, Phantom, PhantomSpec};
pub use response::{apply_response, response_coeffs, response_coeffs_with, FiberResponse, ResponseModel, DEFAULT_NODES};
pub use solver::{
    kernel_matrix, krylov_solve, project_signal, solve_fod, solve_fod_discrete, DiscreteSolution, FodSolution, Krylov, NormalOperator,
    SolverConfig,
};
