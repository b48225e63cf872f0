use super::phantom::{add_rician, simulate_crossing, Phantom, PhantomSpec};
use super::solver::{solve_fod, SolverConfig};
use crate::fields::{DirectionSet, Parity, SphLayout};
use crate::maxima::{angle_deg, cached_directions, match_and_score, match_pairs, MaximaFinder, ScoreReport};
use crate::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Direction set used to sample FODs for maxima search.
pub fn sampling_directions() -> Result<Arc<DirectionSet>> {
    cached_directions(512, false)
}

/// Relative maxima threshold for phantom scoring. Band-limited FODs of a
/// planar phantom carry side lobes up to about 0.4 of the peak, mostly on the
/// great circle the transport regularizer leaves unpenalized.
pub const PHANTOM_RELATIVE_THRESHOLD: f64 = 0.5;

/// Maxima finder used for phantom scoring at band limit `l`.
pub fn phantom_finder(l: usize) -> Result<MaximaFinder> {
    Ok(MaximaFinder::new(sampling_directions()?, SphLayout::new(l, Parity::Even)).with_relative_threshold(PHANTOM_RELATIVE_THRESHOLD))
}

/// Outcome of one noisy phantom solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossingTrial {
    pub report: ScoreReport,
    /// Per voxel carrying the first tract: angle of the closest matched
    /// detection to that tract, degrees.
    pub first_tract_error: Vec<f64>,
    /// `(phi, theta)` in degrees of every detection in tract voxels.
    pub scatter: Vec<(f64, f64)>,
}

impl CrossingTrial {
    pub fn mean_first_tract_error(&self) -> f64 {
        if self.first_tract_error.is_empty() {
            return f64::NAN;
        }
        self.first_tract_error.iter().sum::<f64>() / self.first_tract_error.len() as f64
    }
}

/// RNG for repetition `stream` of a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn score_phantom(phantom: &Phantom, spec: &PhantomSpec, fod: &crate::fields::SphericalField, finder: &MaximaFinder) -> CrossingTrial {
    let dets = finder.detect_field(fod, Some(&phantom.mask), None);
    let first = spec.tract_directions()[0];
    let mut report = ScoreReport::default();
    let mut first_tract_error = Vec::new();
    let mut scatter = Vec::new();
    let mut start = 0;
    for v in 0..phantom.grid.nvox() {
        if !phantom.mask[v] {
            continue;
        }
        let end = start + dets[start..].iter().take_while(|d| d.voxel == v).count();
        let dirs: Vec<_> = dets[start..end].iter().map(|d| d.direction).collect();
        start = end;
        let truth = &phantom.truth[v];
        report = report.merge(&match_and_score(&dirs, truth, 10.0, true));
        for d in &dirs {
            let phi = d.y.atan2(d.x).to_degrees();
            let theta = d.z.clamp(-1.0, 1.0).acos().to_degrees();
            scatter.push((phi, theta));
        }
        if truth.iter().any(|t| angle_deg(t, &first, true) < 1e-9) {
            let pairs = match_pairs(&dirs, &[first], 10.0, true);
            if let Some(&(i, _, _)) = pairs.first() {
                first_tract_error.push(angle_deg(&dirs[i], &first, true));
            }
        }
    }
    CrossingTrial { report, first_tract_error, scatter }
}

pub fn run_crossing_trial(spec: &PhantomSpec, cfg: &SolverConfig, rng: &mut ChaCha8Rng, finder: &MaximaFinder) -> Result<CrossingTrial> {
    let phantom = simulate_crossing(spec)?;
    let noisy = add_rician(&phantom.signal, spec.sigma(), rng)?;
    let sol = solve_fod(&noisy, &phantom.gradients, &phantom.mask, cfg)?;
    Ok(score_phantom(&phantom, spec, &sol.fod, finder))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub crossing_angle: f64,
    pub alpha: f64,
    pub reps: usize,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
    pub first_tract_error: f64,
}

impl ExperimentRow {
    pub const CSV_HEADER: &'static str = "crossing_angle,alpha,reps,precision,recall,fscore,first_tract_error_deg";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.crossing_angle, self.alpha, self.reps, self.precision, self.recall, self.fscore, self.first_tract_error
        )
    }
}

/// Sweep over crossing and absolute angles; repetition `r` of configuration
/// `c` draws noise from stream `c * 2^20 + r` of the master seed. Rates are
/// averaged over repetitions.
pub fn crossing_experiment(
    base: &PhantomSpec,
    cfg: &SolverConfig,
    angles: &[f64],
    alphas: &[f64],
    reps: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    let finder = phantom_finder(cfg.l)?;
    let mut rows = Vec::new();
    for (ai, &angle) in angles.iter().enumerate() {
        for (bi, &alpha) in alphas.iter().enumerate() {
            let spec = PhantomSpec { crossing_angle: angle, alpha, ..base.clone() };
            let config = (ai * alphas.len() + bi) as u64;
            let trials: Vec<CrossingTrial> = (0..reps)
                .into_par_iter()
                .map(|r| run_crossing_trial(&spec, cfg, &mut stream_rng(seed, (config << 20) + r as u64), &finder))
                .collect::<Result<_>>()?;
            let n = reps.max(1) as f64;
            let mean = |f: &dyn Fn(&CrossingTrial) -> f64| trials.iter().map(f).sum::<f64>() / n;
            rows.push(ExperimentRow {
                crossing_angle: angle,
                alpha,
                reps,
                precision: mean(&|t| t.report.precision),
                recall: mean(&|t| t.report.recall),
                fscore: mean(&|t| t.report.fscore),
                first_tract_error: mean(&|t| t.mean_first_tract_error()),
            });
        }
    }
    Ok(rows)
}
