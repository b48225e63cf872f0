//! Spherical Hough transform: gradient orientation histograms transported
//! along their own directions, read out as the `j = 0` channel per radius.

use crate::evolution::{euler_integrate_with, EvolutionConfig};
use crate::fields::{band_limited_delta, GridSpec, Parity, SphLayout, SphericalField};
use crate::harmonics::EulerZYZ;
use crate::operators::{fd_apply, GeneratorSpec, Kernel};
use crate::{Error, Result};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Separable Gaussian blur, kernel truncated at `4 sigma`, zero padded.
/// Flat axes (size 1) are left alone.
pub fn gaussian_smooth(volume: &[f64], grid: &GridSpec, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Config(format!("smoothing sigma must be non-negative, got {sigma}")));
    }
    assert_eq!(volume.len(), grid.nvox(), "volume size does not match grid");
    if sigma == 0.0 {
        return Ok(volume.to_vec());
    }
    let r = (4.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);

    let mut cur = volume.to_vec();
    for axis in 0..3 {
        let n = grid.dims[axis] as isize;
        if n == 1 {
            continue;
        }
        let stride = grid.stride(axis) as isize;
        let src = cur;
        cur = (0..grid.nvox())
            .into_par_iter()
            .map(|i| {
                let c = grid.coords(i)[axis] as isize;
                let mut acc = 0.0;
                for (k, w) in kernel.iter().enumerate() {
                    let p = c + k as isize - r;
                    if p >= 0 && p < n {
                        acc += w * src[(i as isize + (p - c) * stride) as usize];
                    }
                }
                acc
            })
            .collect();
    }
    Ok(cur)
}

/// Gradient magnitude and direction of a scalar volume.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub grid: GridSpec,
    pub m: Vec<f64>,
    /// Unit direction, `None` where the magnitude is below `1e-12`.
    pub v: Vec<Option<Vector3<f64>>>,
}

/// Central differences with zero padding.
pub fn gradient_field(volume: &[f64], grid: &GridSpec) -> Result<GradientField> {
    let gx = fd_apply(Kernel::CentralX, volume, grid)?;
    let gy = fd_apply(Kernel::CentralY, volume, grid)?;
    let gz = fd_apply(Kernel::CentralZ, volume, grid)?;
    let h = grid.voxel_size;
    let (m, v) = (0..grid.nvox())
        .map(|i| {
            let g = Vector3::new(gx[i], gy[i], gz[i]) / h;
            let m = g.norm();
            (m, (m > 1e-12).then(|| g / m))
        })
        .unzip();
    Ok(GradientField { grid: *grid, m, v })
}

/// Orientation histogram `m(r) delta_{v(r)}(n)` with a band-limited delta.
pub fn init_hough(gf: &GradientField, l: usize) -> SphericalField {
    let mut f = SphericalField::zeros(gf.grid, l, Parity::All);
    f.real = true;
    let layout = SphLayout::new(l, Parity::All);
    for (i, (m, v)) in gf.m.iter().zip(&gf.v).enumerate() {
        if let Some(v) = v {
            let c: Vec<_> = band_limited_delta(layout, v).into_iter().map(|z| z * *m).collect();
            f.set_voxel(i, &c);
        }
    }
    f
}

/// Sign of the transport term. With `Inward` votes travel against the
/// gradient (`r - rho v`), with `Outward` along it (`r + rho v`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Inward,
    Outward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HoughConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub drho: f64,
    pub rho_max: f64,
    pub orientation: Orientation,
    pub diffusion_eps: f64,
    pub sigma: f64,
    /// Radius spacing of recorded voting maps.
    pub snapshot_every: f64,
    /// Fraction of the global stack maximum a center must reach.
    pub min_score: f64,
    pub nms_radius: f64,
}

impl Default for HoughConfig {
    fn default() -> Self {
        Self {
            l: 4,
            drho: 0.1,
            rho_max: 10.0,
            orientation: Orientation::Inward,
            diffusion_eps: 0.1,
            sigma: 1.0,
            snapshot_every: 0.5,
            min_score: 0.5,
            nms_radius: 3.0,
        }
    }
}

impl HoughConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        pos("drho", self.drho)?;
        pos("rho_max", self.rho_max)?;
        pos("snapshot_every", self.snapshot_every)?;
        if self.l == 0 {
            return Err(Error::Config("L must be positive".into()));
        }
        if !(self.diffusion_eps >= 0.0 && self.sigma >= 0.0 && self.nms_radius >= 0.0) {
            return Err(Error::Config("diffusion_eps, sigma and nms_radius must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.min_score) {
            return Err(Error::Config(format!("min_score is a fraction in [0, 1], got {}", self.min_score)));
        }
        Ok(())
    }

    pub fn generator(&self) -> GeneratorSpec {
        let s = match self.orientation {
            Orientation::Inward => 1.0,
            Orientation::Outward => -1.0,
        };
        let mut terms = vec![("T0", s)];
        if self.diffusion_eps > 0.0 {
            terms.push(("T0_sq", self.diffusion_eps));
        }
        GeneratorSpec::new(&terms)
    }

    pub fn steps(&self) -> usize {
        (self.rho_max / self.drho).round().max(1.0) as usize
    }

    pub fn snapshot_stride(&self) -> usize {
        (self.snapshot_every / self.drho).round().max(1.0) as usize
    }
}

/// Voting maps `h(r, rho_k)` for `rho_k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct VotingStack {
    pub grid: GridSpec,
    pub rhos: Vec<f64>,
    pub maps: Vec<Vec<f64>>,
}

impl VotingStack {
    /// Global maximum as `(voxel, rho, score)`.
    pub fn global_max(&self) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (rho, map) in self.rhos.iter().zip(&self.maps) {
            for (i, &v) in map.iter().enumerate() {
                if best.is_none_or(|b| v > b.2) {
                    best = Some((i, *rho, v));
                }
            }
        }
        best
    }
}

pub fn hough_transform(h0: &SphericalField, cfg: &HoughConfig) -> Result<VotingStack> {
    cfg.validate()?;
    let evo = EvolutionConfig::new(cfg.drho, cfg.steps(), cfg.generator());
    let stride = cfg.snapshot_stride();
    let mut rhos = Vec::new();
    let mut maps = Vec::new();
    euler_integrate_with(h0, &evo, |step, f| {
        if step > 0 && step % stride == 0 {
            rhos.push(step as f64 * cfg.drho);
            maps.push(f.channel(0).iter().map(|z| z.re).collect());
        }
        Ok(())
    })?;
    Ok(VotingStack { grid: h0.grid, rhos, maps })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub voxel: [usize; 3],
    pub rho: f64,
    pub score: f64,
}

/// Local maxima over `(x, y, z, rho)` scoring at least `min_score` times the
/// global maximum, thinned so no two centers are closer than `nms_radius`.
pub fn find_centers(stack: &VotingStack, min_score: f64, nms_radius: f64) -> Vec<Center> {
    let Some((_, _, top)) = stack.global_max() else { return Vec::new() };
    if !(top > 0.0) {
        return Vec::new();
    }
    let thr = min_score * top;
    let g = stack.grid;
    let nk = stack.maps.len() as isize;
    let mut cands: Vec<Center> = (0..stack.maps.len())
        .into_par_iter()
        .flat_map_iter(|k| {
            let map = &stack.maps[k];
            let mut out = Vec::new();
            for (i, &v) in map.iter().enumerate() {
                if v < thr || v <= 0.0 {
                    continue;
                }
                let c = g.coords(i);
                if is_local_max(stack, k as isize, nk, c, v) {
                    out.push(Center { voxel: c, rho: stack.rhos[k], score: v });
                }
            }
            out
        })
        .collect();
    cands.sort_by(|a, b| b.score.total_cmp(&a.score));
    let mut kept: Vec<Center> = Vec::new();
    for c in cands {
        let far = kept.iter().all(|k| {
            let d2: f64 = (0..3).map(|a| (k.voxel[a] as f64 - c.voxel[a] as f64).powi(2)).sum();
            d2.sqrt() > nms_radius
        });
        if far {
            kept.push(c);
        }
    }
    kept
}

/// Ties go to the neighbour with the smaller `(rho, voxel)` index.
fn is_local_max(stack: &VotingStack, k: isize, nk: isize, c: [usize; 3], v: f64) -> bool {
    let g = stack.grid;
    let here = (k, g.index(c[0], c[1], c[2]));
    for dk in -1..=1isize {
        let kk = k + dk;
        if kk < 0 || kk >= nk {
            continue;
        }
        for dz in -1..=1isize {
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    if dk == 0 && dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let p = [c[0] as isize + dx, c[1] as isize + dy, c[2] as isize + dz];
                    if (0..3).any(|a| p[a] < 0 || p[a] >= g.dims[a] as isize) {
                        continue;
                    }
                    let j = g.index(p[0] as usize, p[1] as usize, p[2] as usize);
                    let w = stack.maps[kk as usize][j];
                    if w > v || (w == v && (kk, j) < here) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Smoothing, gradients, transport and center search in one call.
pub fn detect_spheres(volume: &[f64], grid: &GridSpec, cfg: &HoughConfig) -> Result<(VotingStack, Vec<Center>)> {
    cfg.validate()?;
    let smooth = gaussian_smooth(volume, grid, cfg.sigma)?;
    let gf = gradient_field(&smooth, grid)?;
    let stack = hough_transform(&init_hough(&gf, cfg.l), cfg)?;
    let centers = find_centers(&stack, cfg.min_score, cfg.nms_radius);
    Ok((stack, centers))
}

/// Noisy shell phantom: voxels within half a voxel of the sphere are set to
/// one, a random `delete_fraction` of them is cleared, then Gaussian noise is
/// added. Random draws are keyed by object-frame lattice coordinates, so an
/// integer `offset` moves deletions and noise with the shell. `rotation`
/// turns the deletion pattern; the shell itself is rotation invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToySpec {
    pub size: usize,
    pub radius: f64,
    pub noise: f64,
    pub delete_fraction: f64,
    pub rotation: EulerZYZ,
    pub offset: [i64; 3],
    pub seed: u64,
}

impl Default for ToySpec {
    fn default() -> Self {
        Self { size: 32, radius: 7.0, noise: 0.3, delete_fraction: 0.5, rotation: EulerZYZ::IDENTITY, offset: [0; 3], seed: 0 }
    }
}

impl ToySpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 3 {
            return Err(Error::Config(format!("toy size {} must be at least 3", self.size)));
        }
        if !(self.radius > 0.0 && self.noise >= 0.0 && (0.0..=1.0).contains(&self.delete_fraction)) {
            return Err(Error::Config("toy needs radius > 0, noise >= 0 and delete_fraction in [0, 1]".into()));
        }
        Ok(())
    }

    /// Object centre in voxel coordinates after the offset; without offset
    /// it is the voxel `size / 2`.
    pub fn center(&self) -> [f64; 3] {
        let c = (self.size / 2) as f64;
        [c + self.offset[0] as f64, c + self.offset[1] as f64, c + self.offset[2] as f64]
    }
}

/// Generator for one lattice point and purpose, independent of visit order.
fn lattice_rng(seed: u64, tag: u64, q: [i64; 3]) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let k = |x: i64| (x + (1 << 19)) as u64 & 0xf_ffff;
    r.set_stream(tag << 60 | k(q[0]) << 40 | k(q[1]) << 20 | k(q[2]));
    r
}

pub fn render_toy(spec: &ToySpec) -> Result<(GridSpec, Vec<f64>)> {
    spec.validate()?;
    let grid = GridSpec::cube(spec.size);
    let c = (spec.size / 2) as f64;
    let normal = Normal::new(0.0, spec.noise).map_err(|e| Error::Config(e.to_string()))?;
    let rt = spec.rotation.rotation_matrix().transpose();
    let out = (0..grid.nvox())
        .into_par_iter()
        .map(|i| {
            let p = grid.coords(i);
            let q: [i64; 3] = std::array::from_fn(|a| p[a] as i64 - spec.offset[a]);
            let d = Vector3::new(q[0] as f64 - c, q[1] as f64 - c, q[2] as f64 - c);
            let mut value = 0.0;
            if (d.norm() - spec.radius).abs() <= 0.5 {
                let s = rt * d;
                let key = [s.x.round() as i64, s.y.round() as i64, s.z.round() as i64];
                if lattice_rng(spec.seed, 1, key).gen::<f64>() >= spec.delete_fraction {
                    value = 1.0;
                }
            }
            if spec.noise > 0.0 {
                value += normal.sample(&mut lattice_rng(spec.seed, 2, q));
            }
            value
        })
        .collect();
    Ok((grid, out))
}

/// Solid balls of value one, `(center, radius)` in voxel coordinates.
pub fn render_balls(grid: &GridSpec, balls: &[([f64; 3], f64)]) -> Vec<f64> {
    (0..grid.nvox())
        .map(|i| {
            let p = grid.coords(i);
            let inside = balls.iter().any(|(c, r)| {
                let d2: f64 = (0..3).map(|a| (p[a] as f64 - c[a]).powi(2)).sum();
                d2 <= r * r
            });
            if inside {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}
