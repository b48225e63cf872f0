//! Command-line front end. Every run writes its outputs plus a
//! `<command>.manifest.json` into the output directory; a manifest can be fed
//! back through `--config` to repeat the run.

use crate::deconvolution::{
    add_rician, crossing_experiment, phantom_finder, sampling_directions, seeded_rng, simulate_crossing, solve_fod, ExperimentRow,
    PhantomSpec, SolverConfig,
};
use crate::evolution::{centroid, oscillation_amplitude, run_translation, TranslationSetup};
use crate::fields::shv::{
    read_headers, read_stack, scalar_record, scalar_values, write_stack, ShvRecord, FLAG_EVEN, FLAG_PACKED, FLAG_WIGNER,
};
use crate::fields::{pack_real_even, unpack_real_even, DirectionSet, GridSpec, Parity, SampledField, SphericalField};
use crate::harmonics::EulerZYZ;
use crate::hough::{detect_spheres, render_toy, HoughConfig, Orientation, ToySpec};
use crate::maxima::match_and_score;
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_DIVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "se3h", version, about = "Orientation-field transport, deconvolution and sphere detection")]
pub struct Cli {
    /// JSON configuration (or a previous run manifest); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for every random draw of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, short, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transport a single oriented pulse and compare with the 1-D scheme.
    TranslateTest(TranslateArgs),
    /// Simulate the two-tract crossing phantom.
    Phantom(PhantomArgs),
    /// Regularized deconvolution of a signal stack.
    Deconvolve(DeconvolveArgs),
    /// Maxima extraction and scoring of an FOD against ground truth.
    Score(ScoreArgs),
    /// Noisy crossing sweep over angles and rotations.
    ExperimentCrossing(ExperimentArgs),
    /// Sphere detection on a scalar volume.
    Hough(HoughArgs),
    /// Render the spherical-shell test volume.
    RenderToy(ToyArgs),
    /// Print the record headers of an SHV file.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub diffusion: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long)]
    pub angle: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub snr: Option<f64>,
    #[arg(long)]
    pub gradients: Option<usize>,
    /// Write the clean signal.
    #[arg(long)]
    pub noise_free: bool,
}

#[derive(Debug, Args)]
pub struct DeconvolveArgs {
    /// Signal stack, one scalar record per gradient direction.
    #[arg(long)]
    pub signal: PathBuf,
    /// CSV of gradient directions `x,y,z` in record order.
    #[arg(long)]
    pub gradients: PathBuf,
    /// Scalar mask volume; all voxels when absent.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub fod: PathBuf,
    /// CSV of true directions `x,y,z,dx,dy,dz` (voxel, axis).
    #[arg(long)]
    pub truth: PathBuf,
    /// Scored voxels; those listed in the truth file when absent.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Crossing angles, `a:step:b` or a comma list.
    #[arg(long, value_parser = parse_list)]
    pub angles: Option<NumList>,
    /// Rotations of the configuration, same syntax.
    #[arg(long, value_parser = parse_list)]
    pub alphas: Option<NumList>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub snr: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HoughArgs {
    /// Scalar volume (first record is used).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub drho: Option<f64>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[arg(long, value_enum)]
    pub orientation: Option<OrientationArg>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum OrientationArg {
    Inward,
    Outward,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub delete_fraction: Option<f64>,
    /// ZYZ angles `gamma,beta,alpha` in degrees.
    #[arg(long, value_parser = parse_list)]
    pub rotate: Option<NumList>,
    /// Integer shift `dx,dy,dz` in voxels.
    #[arg(long, value_parser = parse_list)]
    pub offset: Option<NumList>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub path: PathBuf,
}

/// Parsed list value. The alias keeps clap from treating the option as
/// repeatable, so one occurrence yields the whole list.
pub type NumList = Vec<f64>;

/// `a:step:b` (inclusive) or `a,b,c`.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (a, step, b) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || b < a {
                return Err(format!("bad range `{s}`"));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(format!("expected `a:step:b` or a comma list, got `{s}`")),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_clock_s: f64,
    /// File path to sha256 hex digest.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomRun {
    #[serde(flatten)]
    pub spec: PhantomSpec,
    pub seed: u64,
    pub noise: bool,
}

impl Default for PhantomRun {
    fn default() -> Self {
        Self { spec: PhantomSpec::default(), seed: 0, noise: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreConfig {
    /// Fraction of each voxel's sampled maximum.
    pub threshold: f64,
    pub tolerance_deg: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self { threshold: crate::deconvolution::PHANTOM_RELATIVE_THRESHOLD, tolerance_deg: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub phantom: PhantomSpec,
    pub solver: SolverConfig,
    pub angles: Vec<f64>,
    pub alphas: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            phantom: PhantomSpec::default(),
            solver: SolverConfig::default(),
            angles: vec![50.0, 70.0, 90.0],
            alphas: vec![0.0],
            reps: 20,
            seed: 0,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Divergence { .. } => EXIT_DIVERGENCE,
        _ => EXIT_FAILURE,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// `SE3H_THREADS` sizes the global rayon pool; 0 or unset leaves it automatic.
fn configure_threads() {
    if let Some(n) = std::env::var("SE3H_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            // fails harmlessly when the pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let start = Instant::now();
    let mut run = Run { out: cli.out.clone(), inputs: BTreeMap::new(), outputs: BTreeMap::new() };
    if !matches!(cli.command, Command::Info(_)) {
        fs::create_dir_all(&cli.out)?;
    }
    let (name, config, seed) = match &cli.command {
        Command::TranslateTest(a) => translate(cli, a, &mut run)?,
        Command::Phantom(a) => phantom(cli, a, &mut run)?,
        Command::Deconvolve(a) => deconvolve(cli, a, &mut run)?,
        Command::Score(a) => score(cli, a, &mut run)?,
        Command::ExperimentCrossing(a) => experiment(cli, a, &mut run)?,
        Command::Hough(a) => hough(cli, a, &mut run)?,
        Command::RenderToy(a) => toy(cli, a, &mut run)?,
        Command::Info(a) => return info(a),
    };
    let manifest = RunManifest {
        command: name.to_string(),
        config,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_s: start.elapsed().as_secs_f64(),
        inputs: run.inputs,
        outputs: run.outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(cli.out.join(format!("{name}.manifest.json")), text + "\n")?;
    Ok(())
}

struct Run {
    out: PathBuf,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl Run {
    fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.out.join(name), bytes)?;
        self.outputs.insert(name.to_string(), hex_digest(bytes));
        Ok(())
    }

    fn write_shv(&mut self, name: &str, recs: &[ShvRecord]) -> Result<()> {
        let path = self.out.join(name);
        write_stack(&path, recs)?;
        self.outputs.insert(name.to_string(), sha256_file(&path)?);
        Ok(())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex_digest(&fs::read(path)?))
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Format(e.to_string()))
}

/// Reads `T` from a JSON file; a run manifest contributes its `config`.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path)?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if v.get("command").is_some() {
        if let Some(c) = v.get("config") {
            v = c.clone();
        }
    }
    serde_json::from_value(v).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn set<T>(dst: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *dst = v;
    }
}

type Outcome = (&'static str, Value, Option<u64>);

fn translate(cli: &Cli, a: &TranslateArgs, run: &mut Run) -> Result<Outcome> {
    let mut s: TranslationSetup = load_config(cli.config.as_deref())?;
    set(&mut s.l, a.l);
    set(&mut s.dt, a.dt);
    set(&mut s.steps, a.steps);
    set(&mut s.diffusion, a.diffusion);
    set(&mut s.n, a.n);
    if s.n < 3 || !(s.dt > 0.0) || s.diffusion < 0.0 {
        return Err(Error::Config("need n >= 3, dt > 0 and diffusion >= 0".into()));
    }
    log::info!("translation L={} dt={} steps={}", s.l, s.dt, s.steps);
    let r = run_translation(&s, &*sampling_directions()?)?;
    let mut csv = String::from("z,initial_max_phi,initial_f0,final_max_phi,final_f0,reference_f0\n");
    for i in 0..r.fin.z.len() {
        csv += &format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.fin.z[i], r.initial.max_phi[i], r.initial.f0[i], r.fin.max_phi[i], r.fin.f0[i], r.reference[i]
        );
    }
    run.write("translation.csv", csv.as_bytes())?;
    let summary = serde_json::json!({
        "peak_z": r.fin.peak_z(),
        "reference_centroid": centroid(&r.fin.z, &r.reference),
        "displacement": (r.fin.peak_z() - r.initial.peak_z()).abs(),
        "reference_deviation": r.reference_deviation(),
        "oscillation": oscillation_amplitude(&r.fin.f0),
    });
    run.write("translation_summary.json", (summary.to_string() + "\n").as_bytes())?;
    Ok(("translate-test", to_json(&s)?, None))
}

fn phantom(cli: &Cli, a: &PhantomArgs, run: &mut Run) -> Result<Outcome> {
    let mut p: PhantomRun = load_config(cli.config.as_deref())?;
    set(&mut p.spec.crossing_angle, a.angle);
    set(&mut p.spec.alpha, a.alpha);
    set(&mut p.spec.snr, a.snr);
    set(&mut p.spec.n_gradients, a.gradients);
    set(&mut p.seed, cli.seed);
    if a.noise_free {
        p.noise = false;
    }
    p.spec.validate()?;
    let ph = simulate_crossing(&p.spec)?;
    let signal = if p.noise { add_rician(&ph.signal, p.spec.sigma(), &mut seeded_rng(p.seed))? } else { ph.signal.clone() };
    run.write_shv("signal.shv", &signal_records(&signal))?;
    let mut g = String::from("x,y,z\n");
    for d in &ph.gradients.directions {
        g += &format!("{:.17e},{:.17e},{:.17e}\n", d.x, d.y, d.z);
    }
    run.write("gradients.csv", g.as_bytes())?;
    let mut t = String::from("x,y,z,dx,dy,dz\n");
    for (v, dirs) in ph.truth.iter().enumerate() {
        let [x, y, z] = ph.grid.coords(v);
        for d in dirs {
            t += &format!("{x},{y},{z},{:.17e},{:.17e},{:.17e}\n", d.x, d.y, d.z);
        }
    }
    run.write("truth.csv", t.as_bytes())?;
    let mask: Vec<f64> = ph.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
    run.write_shv("mask.shv", &[scalar_record(ph.grid, &mask)])?;
    Ok(("phantom", to_json(&p)?, Some(p.seed)))
}

fn signal_records(s: &SampledField) -> Vec<ShvRecord> {
    let nv = s.grid.nvox();
    (0..s.n_dirs)
        .map(|d| {
            let vals: Vec<f64> = s.data[d * nv..(d + 1) * nv].iter().map(|c| c.re).collect();
            scalar_record(s.grid, &vals)
        })
        .collect()
}

fn read_scalar(path: &Path) -> Result<(GridSpec, Vec<f64>)> {
    let recs = read_stack(path)?;
    let first = recs.first().ok_or_else(|| Error::Format(format!("{}: no records", path.display())))?;
    scalar_values(first)
}

fn read_mask(path: Option<&Path>, grid: GridSpec, run: &mut Run) -> Result<Option<Vec<bool>>> {
    let Some(path) = path else { return Ok(None) };
    run.input(path)?;
    let (g, v) = read_scalar(path)?;
    if g.dims != grid.dims {
        return Err(Error::Format(format!("mask grid {:?} does not match {:?}", g.dims, grid.dims)));
    }
    Ok(Some(v.iter().map(|&x| x > 0.5).collect()))
}

fn read_csv_rows(path: &Path, width: usize) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic())) {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if row.len() != width {
            return Err(Error::Format(format!("{}:{}: expected {width} columns", path.display(), i + 1)));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn deconvolve(cli: &Cli, a: &DeconvolveArgs, run: &mut Run) -> Result<Outcome> {
    let mut cfg: SolverConfig = load_config(cli.config.as_deref())?;
    set(&mut cfg.l, a.l);
    set(&mut cfg.lambda, a.lambda);
    set(&mut cfg.cg_iterations, a.iterations);
    cfg.validate()?;
    run.input(&a.signal)?;
    run.input(&a.gradients)?;
    let recs = read_stack(&a.signal)?;
    let dirs: Vec<Vector3<f64>> = read_csv_rows(&a.gradients, 3)?.iter().map(|r| Vector3::new(r[0], r[1], r[2]).normalize()).collect();
    if recs.len() != dirs.len() || recs.is_empty() {
        return Err(Error::Format(format!("{} signal records for {} gradients", recs.len(), dirs.len())));
    }
    let grid = scalar_values(&recs[0])?.0;
    let mut data = Vec::with_capacity(grid.nvox() * recs.len());
    for r in &recs {
        let (g, v) = scalar_values(r)?;
        if g.dims != grid.dims {
            return Err(Error::Format("signal records differ in grid".into()));
        }
        data.extend(v);
    }
    let signal = SampledField::from_real(grid, dirs.len(), &data);
    let mask = read_mask(a.mask.as_deref(), grid, run)?.unwrap_or_else(|| vec![true; grid.nvox()]);
    let gradients = DirectionSet::new(dirs)?;
    log::info!("deconvolving {} voxels, {} gradients", grid.nvox(), gradients.len());
    let sol = solve_fod(&signal, &gradients, &mask, &cfg)?;
    run.write_shv("fod.shv", &[ShvRecord::Packed(pack_real_even(&sol.fod)?)])?;
    let mut res = String::from("iteration,residual\n");
    for (i, r) in sol.residuals.iter().enumerate() {
        res += &format!("{i},{r:.12e}\n");
    }
    run.write("residuals.csv", res.as_bytes())?;
    Ok(("deconvolve", to_json(&cfg)?, None))
}

fn read_fod(path: &Path) -> Result<SphericalField> {
    match read_stack(path)?.into_iter().next() {
        Some(ShvRecord::Packed(p)) => Ok(unpack_real_even(&p)),
        Some(ShvRecord::Spherical(f)) if f.parity() == Parity::Even => Ok(f),
        _ => Err(Error::Format(format!("{}: expected an even-order FOD record", path.display()))),
    }
}

fn score(cli: &Cli, a: &ScoreArgs, run: &mut Run) -> Result<Outcome> {
    let mut cfg: ScoreConfig = load_config(cli.config.as_deref())?;
    set(&mut cfg.threshold, a.threshold);
    set(&mut cfg.tolerance_deg, a.tolerance);
    if !(cfg.threshold >= 0.0 && cfg.tolerance_deg > 0.0) {
        return Err(Error::Config("threshold must be >= 0 and tolerance > 0".into()));
    }
    run.input(&a.fod)?;
    run.input(&a.truth)?;
    let fod = read_fod(&a.fod)?;
    let grid = fod.grid;
    let mut truth = vec![Vec::new(); grid.nvox()];
    for r in read_csv_rows(&a.truth, 6)? {
        let [x, y, z] = [r[0], r[1], r[2]].map(|c| c as usize);
        if x >= grid.dims[0] || y >= grid.dims[1] || z >= grid.dims[2] {
            return Err(Error::Format(format!("truth voxel ({x}, {y}, {z}) outside the grid")));
        }
        truth[grid.index(x, y, z)].push(Vector3::new(r[3], r[4], r[5]).normalize());
    }
    let mask = read_mask(a.mask.as_deref(), grid, run)?.unwrap_or_else(|| truth.iter().map(|t| !t.is_empty()).collect());
    let finder = phantom_finder(fod.l())?.with_relative_threshold(cfg.threshold);
    let dets = finder.detect_field(&fod, Some(&mask), None);
    let mut report = crate::maxima::ScoreReport::default();
    let mut csv = String::from("x,y,z,dx,dy,dz,value\n");
    for v in (0..grid.nvox()).filter(|&v| mask[v]) {
        let dirs: Vec<Vector3<f64>> = dets.iter().filter(|d| d.voxel == v).map(|d| d.direction).collect();
        report = report.merge(&match_and_score(&dirs, &truth[v], cfg.tolerance_deg, true));
    }
    for d in &dets {
        let [x, y, z] = grid.coords(d.voxel);
        csv += &format!("{x},{y},{z},{:.12e},{:.12e},{:.12e},{:.12e}\n", d.direction.x, d.direction.y, d.direction.z, d.value);
    }
    run.write("detections.csv", csv.as_bytes())?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))?;
    println!("precision {:.4} recall {:.4} fscore {:.4}", report.precision, report.recall, report.fscore);
    run.write("score.json", (text + "\n").as_bytes())?;
    Ok(("score", to_json(&cfg)?, None))
}

fn experiment(cli: &Cli, a: &ExperimentArgs, run: &mut Run) -> Result<Outcome> {
    let mut cfg: ExperimentConfig = load_config(cli.config.as_deref())?;
    set(&mut cfg.angles, a.angles.clone());
    set(&mut cfg.alphas, a.alphas.clone());
    set(&mut cfg.reps, a.reps);
    set(&mut cfg.phantom.snr, a.snr);
    set(&mut cfg.solver.lambda, a.lambda);
    set(&mut cfg.seed, cli.seed);
    if cfg.angles.is_empty() || cfg.alphas.is_empty() || cfg.reps == 0 {
        return Err(Error::Config("need at least one angle, one alpha and one repetition".into()));
    }
    cfg.solver.validate()?;
    for &angle in &cfg.angles {
        PhantomSpec { crossing_angle: angle, ..cfg.phantom.clone() }.validate()?;
    }
    log::info!("crossing sweep: {} configurations x {} reps", cfg.angles.len() * cfg.alphas.len(), cfg.reps);
    let rows = crossing_experiment(&cfg.phantom, &cfg.solver, &cfg.angles, &cfg.alphas, cfg.reps, cfg.seed)?;
    let mut csv = format!("{}\n", ExperimentRow::CSV_HEADER);
    for r in &rows {
        csv += &r.csv();
        csv.push('\n');
    }
    run.write("crossing.csv", csv.as_bytes())?;
    Ok(("experiment-crossing", to_json(&cfg)?, Some(cfg.seed)))
}

fn hough(cli: &Cli, a: &HoughArgs, run: &mut Run) -> Result<Outcome> {
    let mut cfg: HoughConfig = load_config(cli.config.as_deref())?;
    set(&mut cfg.l, a.l);
    set(&mut cfg.drho, a.drho);
    set(&mut cfg.rho_max, a.rho_max);
    set(&mut cfg.sigma, a.sigma);
    set(&mut cfg.diffusion_eps, a.eps);
    if let Some(o) = a.orientation {
        cfg.orientation = match o {
            OrientationArg::Inward => Orientation::Inward,
            OrientationArg::Outward => Orientation::Outward,
        };
    }
    cfg.validate()?;
    run.input(&a.input)?;
    let (grid, vol) = read_scalar(&a.input)?;
    let (stack, centers) = detect_spheres(&vol, &grid, &cfg)?;
    let recs: Vec<ShvRecord> = stack.maps.iter().map(|m| scalar_record(grid, m)).collect();
    run.write_shv("votes.shv", &recs)?;
    let mut rhos = String::from("record,rho\n");
    for (i, r) in stack.rhos.iter().enumerate() {
        rhos += &format!("{i},{r}\n");
    }
    run.write("votes_rho.csv", rhos.as_bytes())?;
    let mut csv = String::from("x,y,z,rho,score\n");
    for c in &centers {
        csv += &format!("{},{},{},{},{:.12e}\n", c.voxel[0], c.voxel[1], c.voxel[2], c.rho, c.score);
    }
    run.write("centers.csv", csv.as_bytes())?;
    Ok(("hough", to_json(&cfg)?, None))
}

fn toy(cli: &Cli, a: &ToyArgs, run: &mut Run) -> Result<Outcome> {
    let mut spec: ToySpec = load_config(cli.config.as_deref())?;
    set(&mut spec.size, a.size);
    set(&mut spec.radius, a.radius);
    set(&mut spec.noise, a.noise);
    set(&mut spec.delete_fraction, a.delete_fraction);
    set(&mut spec.seed, cli.seed);
    if let Some(r) = &a.rotate {
        let [g, b, al] = triple(r, "--rotate")?;
        spec.rotation = EulerZYZ::new(g.to_radians(), b.to_radians(), al.to_radians());
    }
    if let Some(o) = &a.offset {
        let t = triple(o, "--offset")?;
        if t.iter().any(|v| v.fract() != 0.0) {
            return Err(Error::Config("--offset takes integers".into()));
        }
        spec.offset = t.map(|v| v as i64);
    }
    spec.validate()?;
    let (grid, vol) = render_toy(&spec)?;
    run.write_shv("toy.shv", &[scalar_record(grid, &vol)])?;
    let c = spec.center();
    let truth = serde_json::json!({ "center": c, "radius": spec.radius });
    run.write("toy_truth.json", (truth.to_string() + "\n").as_bytes())?;
    Ok(("render-toy", to_json(&spec)?, Some(spec.seed)))
}

fn triple(v: &[f64], flag: &str) -> Result<[f64; 3]> {
    v.try_into().map_err(|_| Error::Config(format!("{flag} takes three values")))
}

fn info(a: &InfoArgs) -> Result<()> {
    for (i, h) in read_headers(&a.path)?.iter().enumerate() {
        let mut flags = Vec::new();
        for (bit, name) in [(FLAG_EVEN, "even"), (FLAG_PACKED, "packed"), (FLAG_WIGNER, "wigner")] {
            if h.flags & bit != 0 {
                flags.push(name);
            }
        }
        println!(
            "record {i}: dims {}x{}x{} voxel {} L {} flags [{}] channels {} payload {} bytes",
            h.grid.dims[0],
            h.grid.dims[1],
            h.grid.dims[2],
            h.grid.voxel_size,
            h.l,
            flags.join(","),
            h.channel_count(),
            h.payload_bytes()
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_syntax() {
        assert_eq!(parse_list("30:10:60").unwrap(), vec![30.0, 40.0, 50.0, 60.0]);
        assert_eq!(parse_list("0,15.5").unwrap(), vec![0.0, 15.5]);
        assert_eq!(parse_list("0:0.1:0.3").unwrap().len(), 4);
        assert!(parse_list("5:1").is_err());
        assert!(parse_list("9:1:3").is_err());
    }

    #[test]
    fn manifest_config_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        fs::write(&p, r#"{"command": "render-toy", "config": {"size": 20, "seed": 4}}"#).unwrap();
        let spec: ToySpec = load_config(Some(&p)).unwrap();
        assert_eq!((spec.size, spec.seed), (20, 4));
        fs::write(&p, r#"{"size": "big"}"#).unwrap();
        assert!(matches!(load_config::<ToySpec>(Some(&p)), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Divergence { step: 3 }), EXIT_DIVERGENCE);
        assert_eq!(exit_code(&Error::Format("x".into())), EXIT_FAILURE);
        assert_eq!(run(["se3h", "no-such-command"]), EXIT_USAGE);
    }
}
