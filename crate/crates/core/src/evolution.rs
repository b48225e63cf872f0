//! Forward-Euler integration of generator specs and the translation
//! experiment helpers.

use crate::fields::{band_limited_delta, evaluate_on_directions, DirectionSet, GridSpec, Parity, SphLayout, SphericalField, WignerField};
use crate::operators::{build_generator, build_wigner_generator, GeneratorSpec, SphGenerator};
use crate::{Error, Result};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub generator: GeneratorSpec,
    /// Record every `snapshot_stride` steps (step 0 included); 0 disables.
    #[serde(default)]
    pub snapshot_stride: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize, generator: GeneratorSpec) -> Self {
        Self { dt, steps, generator, snapshot_stride: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        self.generator.validate()
    }

    /// Total evolution parameter `dt * steps`.
    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub field: SphericalField,
    pub snapshots: Vec<(usize, SphericalField)>,
}

/// Generator whose output layout equals its input layout; odd orders are
/// switched on when the generator couples parities.
pub fn closed_generator(spec: &GeneratorSpec, l: usize, parity: Parity) -> Result<SphGenerator> {
    let g = build_generator(spec, l, parity)?;
    if g.in_layout() == g.out_layout() {
        return Ok(g);
    }
    build_generator(spec, l, Parity::All)
}

/// `f <- f + dt A f`, calling `observe(step, f)` at step 0 and after every
/// step. Stops with [`Error::Divergence`] on the first non-finite value.
pub fn euler_integrate_with(
    f0: &SphericalField,
    cfg: &EvolutionConfig,
    mut observe: impl FnMut(usize, &SphericalField) -> Result<()>,
) -> Result<SphericalField> {
    cfg.validate()?;
    let gen = closed_generator(&cfg.generator, f0.l(), f0.parity())?;
    let layout = gen.in_layout();
    let mut f = if f0.layout == layout { f0.clone() } else { f0.relayout(layout.l, layout.parity) };
    observe(0, &f)?;
    for step in 1..=cfg.steps {
        let a = gen.apply(&f)?;
        f.axpy(cfg.dt, &a);
        if !f.is_finite() {
            return Err(Error::Divergence { step });
        }
        observe(step, &f)?;
    }
    Ok(f)
}

pub fn euler_integrate(f0: &SphericalField, cfg: &EvolutionConfig) -> Result<Evolution> {
    let mut snapshots = Vec::new();
    let stride = cfg.snapshot_stride;
    let field = euler_integrate_with(f0, cfg, |step, f| {
        if stride > 0 && step % stride == 0 {
            snapshots.push((step, f.clone()));
        }
        Ok(())
    })?;
    Ok(Evolution { field, snapshots })
}

/// Same scheme on Wigner coefficient fields.
pub fn euler_integrate_wigner(f0: &WignerField, cfg: &EvolutionConfig) -> Result<WignerField> {
    cfg.validate()?;
    let gen = build_wigner_generator(&cfg.generator, f0.l())?;
    let mut f = f0.clone();
    let dt = num_complex::Complex64::new(cfg.dt, 0.0);
    for step in 1..=cfg.steps {
        let a = gen.apply(&f)?;
        f.axpy(dt, &a);
        if f.data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Divergence { step });
        }
    }
    Ok(f)
}

/// `exp(-|r - c|^2 / 2) delta_v(n)` centred on voxel `center`.
pub fn gaussian_pulse(grid: GridSpec, l: usize, parity: Parity, center: [usize; 3], v: &Vector3<f64>) -> SphericalField {
    let layout = SphLayout::new(l, parity);
    let delta = band_limited_delta(layout, v);
    let mut f = SphericalField::zeros(grid, l, parity);
    f.real = true;
    let nv = grid.nvox();
    for i in 0..nv {
        let c = grid.coords(i);
        let r2: f64 = (0..3).map(|a| ((c[a] as f64 - center[a] as f64) * grid.voxel_size).powi(2)).sum();
        let g = (-r2 / 2.0).exp();
        if g < 1e-300 {
            continue;
        }
        for (ch, d) in delta.iter().enumerate() {
            f.data[ch * nv + i] = d * g;
        }
    }
    f
}

/// Profiles along the z column through `(x, y)`, with `z` measured from
/// `z_origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationProfile {
    pub z: Vec<f64>,
    pub max_phi: Vec<f64>,
    pub f0: Vec<f64>,
}

impl TranslationProfile {
    /// `z` of the largest `max_phi`.
    pub fn peak_z(&self) -> f64 {
        let i = argmax(&self.max_phi);
        self.z[i]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("z,max_phi,f0\n");
        for i in 0..self.z.len() {
            s.push_str(&format!("{},{:.12e},{:.12e}\n", self.z[i], self.max_phi[i], self.f0[i]));
        }
        s
    }
}

/// First moment of `values` over `z`.
pub fn centroid(z: &[f64], values: &[f64]) -> f64 {
    let mass: f64 = values.iter().sum();
    z.iter().zip(values).map(|(z, v)| z * v).sum::<f64>() / mass
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

pub fn translation_profile(
    field: &SphericalField,
    dirs: &DirectionSet,
    column: (usize, usize),
    z_origin: usize,
) -> Result<TranslationProfile> {
    let grid = field.grid;
    let nz = grid.dims[2];
    if column.0 >= grid.dims[0] || column.1 >= grid.dims[1] {
        return Err(Error::Contract(format!("column {column:?} outside grid {:?}", grid.dims)));
    }
    let line = GridSpec::new([1, 1, nz], grid.voxel_size)?;
    let mut col = SphericalField::zeros(line, field.l(), field.parity());
    col.real = field.real;
    let nv = grid.nvox();
    for ch in 0..field.n_channels() {
        for z in 0..nz {
            col.data[ch * nz + z] = field.data[ch * nv + grid.index(column.0, column.1, z)];
        }
    }
    let samples = evaluate_on_directions(&col, dirs);
    let mut max_phi = vec![f64::NEG_INFINITY; nz];
    for d in 0..samples.n_dirs {
        for (z, m) in max_phi.iter_mut().enumerate() {
            *m = m.max(samples.get(d, z).re);
        }
    }
    let f0 = (0..nz).map(|z| col.data[z].re).collect();
    let z = (0..nz).map(|z| (z as f64 - z_origin as f64) * grid.voxel_size).collect();
    Ok(TranslationProfile { z, max_phi, f0 })
}

/// 1-D reference: `phi <- phi + dt * (phi[i+1] - phi[i-1]) / 2`, zero padded.
pub fn reference_advection_1d(initial: &[f64], dt: f64, steps: usize) -> Vec<f64> {
    let mut phi = initial.to_vec();
    let n = phi.len();
    for _ in 0..steps {
        let prev = phi.clone();
        for i in 0..n {
            let up = if i + 1 < n { prev[i + 1] } else { 0.0 };
            let dn = if i > 0 { prev[i - 1] } else { 0.0 };
            phi[i] = prev[i] + dt * 0.5 * (up - dn);
        }
    }
    phi
}

/// Oscillation beyond a single bump: total variation minus twice the peak
/// height. Zero for unimodal non-negative profiles.
pub fn oscillation_amplitude(profile: &[f64]) -> f64 {
    let tv: f64 = profile.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()
        + profile.first().map_or(0.0, |x| x.abs())
        + profile.last().map_or(0.0, |x| x.abs());
    let peak = profile.iter().copied().fold(0.0, f64::max);
    tv - 2.0 * peak
}

/// Settings of the translation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TranslationSetup {
    /// Cube edge length in voxels.
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub dt: f64,
    pub steps: usize,
    /// Weight of the `T0_sq` diffusion term.
    pub diffusion: f64,
}

impl Default for TranslationSetup {
    fn default() -> Self {
        Self { n: 32, l: 12, dt: 0.05, steps: 150, diffusion: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct TranslationRun {
    pub initial: TranslationProfile,
    pub fin: TranslationProfile,
    /// 1-D reference started from the initial `f0` column.
    pub reference: Vec<f64>,
}

impl TranslationRun {
    pub fn reference_deviation(&self) -> f64 {
        self.fin.f0.iter().zip(&self.reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Pulse at the grid centre pointing along `e_z`, transported by
/// `T0 + diffusion * T0_sq`.
pub fn run_translation(setup: &TranslationSetup, dirs: &DirectionSet) -> Result<TranslationRun> {
    let grid = GridSpec::cube(setup.n);
    let c = setup.n / 2;
    let f0 = gaussian_pulse(grid, setup.l, Parity::All, [c, c, c], &Vector3::z());
    let mut terms = vec![("T0", 1.0)];
    if setup.diffusion != 0.0 {
        terms.push(("T0_sq", setup.diffusion));
    }
    let cfg = EvolutionConfig::new(setup.dt, setup.steps, GeneratorSpec::new(&terms));
    let initial = translation_profile(&f0, dirs, (c, c), c)?;
    let fin = euler_integrate(&f0, &cfg)?.field;
    let fin = translation_profile(&fin, dirs, (c, c), c)?;
    let reference = reference_advection_1d(&initial.f0, setup.dt, setup.steps);
    Ok(TranslationRun { initial, fin, reference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_generator_is_identity() {
        let f = gaussian_pulse(GridSpec::cube(5), 4, Parity::Even, [2, 2, 2], &Vector3::x());
        let cfg = EvolutionConfig::new(0.1, 5, GeneratorSpec::new(&[]));
        let out = euler_integrate(&f, &cfg).unwrap();
        assert_eq!(out.field, f);
    }

    #[test]
    fn casimir_decay_is_geometric() {
        let mut f = SphericalField::zeros(GridSpec::cube(1), 4, Parity::Even);
        f.set(2, 1, 0, Complex64::new(1.0, 0.5));
        let cfg = EvolutionConfig::new(0.1, 10, GeneratorSpec::new(&[("Jsq", 1.0)]));
        let out = euler_integrate(&f, &cfg).unwrap().field;
        let want = Complex64::new(1.0, 0.5) * 0.4f64.powi(10);
        assert!((out.get(2, 1, 0) - want).norm() < 1e-15);
    }

    #[test]
    fn divergence_reports_step() {
        let mut f = SphericalField::zeros(GridSpec::cube(1), 2, Parity::Even);
        f.set(2, 0, 0, Complex64::new(1.0, 0.0));
        let cfg = EvolutionConfig::new(1e300, 5, GeneratorSpec::new(&[("Jsq", 1.0)]));
        match euler_integrate(&f, &cfg) {
            Err(Error::Divergence { step }) => assert_eq!(step, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn snapshots_follow_stride() {
        let f = SphericalField::zeros(GridSpec::cube(3), 2, Parity::Even);
        let mut cfg = EvolutionConfig::new(0.1, 7, GeneratorSpec::new(&[("Laplace", 1.0)]));
        cfg.snapshot_stride = 3;
        let out = euler_integrate(&f, &cfg).unwrap();
        let steps: Vec<usize> = out.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(steps, vec![0, 3, 6]);
    }

    #[test]
    fn advection_reference_moves_toward_negative_index() {
        let mut init = vec![0.0; 41];
        for (i, v) in init.iter_mut().enumerate() {
            *v = (-((i as f64 - 20.0).powi(2)) / 2.0).exp();
        }
        let out = reference_advection_1d(&init, 0.05, 150);
        let peak = argmax(&out);
        assert!((peak as f64 - 12.5).abs() <= 1.5, "{peak}");
    }

    #[test]
    fn oscillation_of_bump_is_zero() {
        assert!(oscillation_amplitude(&[0.0, 1.0, 3.0, 1.0, 0.0]).abs() < 1e-15);
        assert!((oscillation_amplitude(&[0.0, 1.0, -1.0, 3.0, 0.0]) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_config() {
        let cfg = EvolutionConfig::new(-1.0, 3, GeneratorSpec::new(&[]));
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
