use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Detection counts and the derived rates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreReport {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
}

impl ScoreReport {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let fscore = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Self { tp, fp, fn_, precision, recall, fscore }
    }

    /// Pooled counts.
    pub fn merge(&self, other: &ScoreReport) -> ScoreReport {
        Self::from_counts(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)
    }
}

/// Angle in degrees; axial ignores orientation.
pub fn angle_deg(a: &Vector3<f64>, b: &Vector3<f64>, axial: bool) -> f64 {
    let c = a.normalize().dot(&b.normalize());
    let c = if axial { c.abs() } else { c };
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Greedy one-to-one matching by ascending angle. Pairs further apart than
/// `tol_deg` never match.
pub fn match_pairs(detections: &[Vector3<f64>], truths: &[Vector3<f64>], tol_deg: f64, axial: bool) -> Vec<(usize, usize, f64)> {
    let mut cand = Vec::new();
    for (i, d) in detections.iter().enumerate() {
        for (k, t) in truths.iter().enumerate() {
            let a = angle_deg(d, t, axial);
            if a <= tol_deg {
                cand.push((i, k, a));
            }
        }
    }
    cand.sort_by(|x, y| x.2.total_cmp(&y.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));
    let mut used_d = vec![false; detections.len()];
    let mut used_t = vec![false; truths.len()];
    let mut out = Vec::new();
    for (i, k, a) in cand {
        if !used_d[i] && !used_t[k] {
            used_d[i] = true;
            used_t[k] = true;
            out.push((i, k, a));
        }
    }
    out
}

pub fn match_and_score(detections: &[Vector3<f64>], truths: &[Vector3<f64>], tol_deg: f64, axial: bool) -> ScoreReport {
    let tp = match_pairs(detections, truths, tol_deg, axial).len();
    ScoreReport::from_counts(tp, detections.len() - tp, truths.len() - tp)
}
