use super::response::ResponseModel;
use crate::fields::{DirectionSet, GridSpec, SampledField};
use crate::maxima::cached_directions;
use crate::{Error, Result};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Two straight in-plane tracts crossing at the grid centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomSpec {
    pub dims: [usize; 3],
    /// Angle between the tracts, degrees.
    pub crossing_angle: f64,
    /// Clockwise rotation of the whole configuration, degrees; at 0 the
    /// first tract runs along x.
    pub alpha: f64,
    #[serde(rename = "bD")]
    pub bd: f64,
    pub n_gradients: usize,
    /// Tract width in voxels.
    pub thickness: f64,
    pub snr: f64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self { dims: [24, 24, 1], crossing_angle: 90.0, alpha: 0.0, bd: 1.0, n_gradients: 64, thickness: 5.0, snr: 50.0 }
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.crossing_angle > 0.0 && self.crossing_angle <= 90.0) {
            return Err(Error::Config(format!("crossing angle {} outside (0, 90]", self.crossing_angle)));
        }
        if !(self.bd >= 0.0 && self.thickness > 0.0 && self.snr > 0.0) {
            return Err(Error::Config("bD, thickness and snr must be positive".into()));
        }
        GridSpec::new(self.dims, 1.0)?.check_stencil()
    }

    /// In-plane unit directions of the two tracts.
    pub fn tract_directions(&self) -> [Vector3<f64>; 2] {
        let a = -self.alpha.to_radians();
        let b = a + self.crossing_angle.to_radians();
        [Vector3::new(a.cos(), a.sin(), 0.0), Vector3::new(b.cos(), b.sin(), 0.0)]
    }

    pub fn sigma(&self) -> f64 {
        1.0 / self.snr
    }
}

/// Noise-free phantom: signal on the gradient directions, ground truth and
/// white-matter mask.
#[derive(Debug, Clone)]
pub struct Phantom {
    pub grid: GridSpec,
    pub gradients: Arc<DirectionSet>,
    pub signal: SampledField,
    pub truth: Vec<Vec<Vector3<f64>>>,
    pub mask: Vec<bool>,
}

/// Antipodally spread gradient table of `n` axes.
pub fn gradient_table(n: usize) -> Result<Arc<DirectionSet>> {
    cached_directions(n, true)
}

/// Isotropic mean of the response, used as background signal.
pub fn isotropic_level(model: &ResponseModel) -> f64 {
    let (t, w) = crate::harmonics::gauss_legendre(64);
    t.iter().zip(&w).map(|(t, w)| model.eval(*t) * w).sum::<f64>() / 2.0
}

pub fn simulate_crossing(spec: &PhantomSpec) -> Result<Phantom> {
    spec.validate()?;
    let grid = GridSpec::new(spec.dims, 1.0)?;
    let gradients = gradient_table(spec.n_gradients)?;
    let model = ResponseModel::ExpBd { bd: spec.bd };
    let tracts = spec.tract_directions();
    let centre = Vector3::new((spec.dims[0] as f64 - 1.0) / 2.0, (spec.dims[1] as f64 - 1.0) / 2.0, (spec.dims[2] as f64 - 1.0) / 2.0);
    let nv = grid.nvox();
    let nd = gradients.len();
    let background = isotropic_level(&model);
    let mut truth = vec![Vec::new(); nv];
    let mut mask = vec![false; nv];
    let mut signal = SampledField::zeros(grid, nd);
    for (v, t) in truth.iter_mut().enumerate() {
        let c = grid.coords(v);
        let p = Vector3::new(c[0] as f64, c[1] as f64, c[2] as f64) - centre;
        for d in &tracts {
            let off = (p - d * p.dot(d)).norm();
            if off <= spec.thickness / 2.0 {
                t.push(*d);
            }
        }
        mask[v] = !t.is_empty();
        for (i, g) in gradients.directions.iter().enumerate() {
            let s = if t.is_empty() { background } else { t.iter().map(|d| model.eval(g.dot(d))).sum::<f64>() / t.len() as f64 };
            signal.data[i * nv + v] = s.into();
        }
    }
    Ok(Phantom { grid, gradients, signal, truth, mask })
}

/// `sqrt((S + n_re)^2 + n_im^2)` with independent normal draws per sample.
pub fn add_rician(signal: &SampledField, sigma: f64, rng: &mut ChaCha8Rng) -> Result<SampledField> {
    if !(sigma >= 0.0) {
        return Err(Error::Config(format!("noise level {sigma} must be non-negative")));
    }
    let mut out = signal.clone();
    if sigma == 0.0 {
        for x in &mut out.data {
            *x = x.norm().into();
        }
        return Ok(out);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
    for x in &mut out.data {
        let re = x.re + normal.sample(rng);
        let im: f64 = normal.sample(rng);
        *x = re.hypot(im).into();
    }
    Ok(out)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
