use crate::fields::{synthesis_matrix, DirectionSet, Parity, SphLayout, SphericalField};
use nalgebra::{DMatrix, DVector, Matrix2, Vector2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A refined local maximum of one voxel's orientation distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub voxel: usize,
    pub direction: Vector3<f64>,
    pub value: f64,
}

/// Fraction of the per-voxel maximum used when no threshold is given.
pub const DEFAULT_RELATIVE_THRESHOLD: f64 = 0.1;

/// Samples coefficient vectors of a fixed layout on a direction set and
/// extracts refined maxima.
#[derive(Debug, Clone)]
pub struct MaximaFinder {
    pub dirs: Arc<DirectionSet>,
    pub layout: SphLayout,
    /// Fraction of the sampled maximum applied when no absolute threshold
    /// is passed.
    pub relative_threshold: f64,
    synthesis: DMatrix<Complex64>,
}

impl MaximaFinder {
    pub fn new(dirs: Arc<DirectionSet>, layout: SphLayout) -> Self {
        let synthesis = synthesis_matrix(&dirs, layout);
        Self { dirs, layout, relative_threshold: DEFAULT_RELATIVE_THRESHOLD, synthesis }
    }

    pub fn with_relative_threshold(mut self, fraction: f64) -> Self {
        self.relative_threshold = fraction;
        self
    }

    /// Real part of the synthesized function on every direction.
    pub fn sample(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let c = DVector::from_column_slice(coeffs);
        (&self.synthesis * c).iter().map(|z| z.re).collect()
    }

    /// Maxima of one voxel. `threshold` is absolute; `None` means
    /// `relative_threshold` times the sampled maximum.
    pub fn detect(&self, voxel: usize, coeffs: &[Complex64], threshold: Option<f64>) -> Vec<Detection> {
        let vals = self.sample(coeffs);
        let vmax = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !(scale > 0.0) {
            return Vec::new();
        }
        let thr = threshold.unwrap_or(self.relative_threshold * vmax.max(0.0));
        let eps = 1e-12 * scale;
        let mut found: Vec<(Detection, usize)> = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            if v < thr || v <= 0.0 {
                continue;
            }
            if self.dirs.neighbors[i].iter().all(|&k| v > vals[k] + eps) {
                let (direction, value) = refine(&self.dirs, &vals, i);
                found.push((Detection { voxel, direction, value }, i));
            }
        }
        if self.layout.parity == Parity::Even {
            merge_antipodal(&self.dirs, found)
        } else {
            found.into_iter().map(|(d, _)| d).collect()
        }
    }

    /// Maxima of every voxel with positive mask (or all voxels), in voxel order.
    pub fn detect_field(&self, fod: &SphericalField, mask: Option<&[bool]>, threshold: Option<f64>) -> Vec<Detection> {
        let field = if fod.layout == self.layout { None } else { Some(fod.relayout(self.layout.l, self.layout.parity)) };
        let f = field.as_ref().unwrap_or(fod);
        (0..f.nvox())
            .into_par_iter()
            .filter(|&v| mask.is_none_or(|m| m[v]))
            .flat_map_iter(|v| self.detect(v, &f.voxel(v), threshold))
            .collect()
    }
}

/// One-shot maxima extraction for a single coefficient vector.
pub fn detect_maxima(coeffs: &[Complex64], layout: SphLayout, dirs: Arc<DirectionSet>, threshold: Option<f64>) -> Vec<Detection> {
    MaximaFinder::new(dirs, layout).detect(0, coeffs, threshold)
}

fn tangent_basis(s: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if s.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (helper - s * s.dot(&helper)).normalize();
    (e1, s.cross(&e1))
}

/// Least-squares quadratic in gnomonic coordinates around the seed; falls
/// back to the seed if the fit is not a proper maximum inside its cell.
fn refine(dirs: &DirectionSet, vals: &[f64], seed: usize) -> (Vector3<f64>, f64) {
    let s = dirs.directions[seed];
    let mut pts = vec![seed];
    pts.extend(&dirs.neighbors[seed]);
    if pts.len() < 7 {
        // sparse ring: widen to second neighbors
        for &k in &dirs.neighbors[seed] {
            for &q in &dirs.neighbors[k] {
                if !pts.contains(&q) {
                    pts.push(q);
                }
            }
        }
    }
    let fallback = (s, vals[seed]);
    if pts.len() < 6 {
        return fallback;
    }
    let (e1, e2) = tangent_basis(&s);
    let mut a = DMatrix::zeros(pts.len(), 6);
    let mut b = DVector::zeros(pts.len());
    for (row, &p) in pts.iter().enumerate() {
        let d = dirs.directions[p];
        let h = d.dot(&s);
        if h <= 1e-6 {
            return fallback;
        }
        let (u, v) = (d.dot(&e1) / h, d.dot(&e2) / h);
        for (col, x) in [1.0, u, v, u * u, u * v, v * v].into_iter().enumerate() {
            a[(row, col)] = x;
        }
        b[row] = vals[p];
    }
    let Ok(x) = a.svd(true, true).solve(&b, 1e-12) else {
        return fallback;
    };
    let hess = Matrix2::new(2.0 * x[3], x[4], x[4], 2.0 * x[5]);
    if !(hess[(0, 0)] < 0.0 && hess.determinant() > 0.0) {
        return fallback;
    }
    let grad = Vector2::new(x[1], x[2]);
    let Some(inv) = hess.try_inverse() else {
        return fallback;
    };
    let t = -(inv * grad);
    let dir = (s + e1 * t.x + e2 * t.y).normalize();
    if dir.dot(&s).clamp(-1.0, 1.0).acos() > dirs.cell_radius[seed] {
        return fallback;
    }
    let value = x[0] + x[1] * t.x + x[2] * t.y + x[3] * t.x * t.x + x[4] * t.x * t.y + x[5] * t.y * t.y;
    (dir, value)
}

/// Keeps the stronger of two detections whose axes agree within the sum of
/// their seeds' cell radii, oriented into the upper half space.
fn merge_antipodal(dirs: &DirectionSet, mut found: Vec<(Detection, usize)>) -> Vec<Detection> {
    found.sort_by(|a, b| b.0.value.total_cmp(&a.0.value));
    let mut kept: Vec<(Detection, usize)> = Vec::new();
    for (d, seed) in found {
        let dup = kept.iter().any(|(k, ks)| {
            let axial = k.direction.dot(&d.direction).abs().clamp(-1.0, 1.0).acos();
            axial < dirs.cell_radius[seed] + dirs.cell_radius[*ks]
        });
        if !dup {
            kept.push((d, seed));
        }
    }
    kept.into_iter()
        .map(|(mut d, _)| {
            if d.direction.z < 0.0 || (d.direction.z == 0.0 && d.direction.y < 0.0) {
                d.direction = -d.direction;
            }
            d
        })
        .collect()
}
