use crate::fields::DirectionSet;
use crate::{Error, Result};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const DEFAULT_SEED: u64 = 0x5e3_d1e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepulsionOptions {
    pub iters: usize,
    pub seed: u64,
    /// Each point also repels the antipodes of the others (axis sets).
    pub antipodal: bool,
}

impl Default for RepulsionOptions {
    fn default() -> Self {
        Self { iters: 1000, seed: DEFAULT_SEED, antipodal: false }
    }
}

/// `n` points minimizing the Coulomb energy on the sphere.
pub fn electrostatic_directions(n: usize, iters: usize) -> Result<DirectionSet> {
    electrostatic_with(n, RepulsionOptions { iters, ..Default::default() })
}

pub fn electrostatic_with(n: usize, opts: RepulsionOptions) -> Result<DirectionSet> {
    DirectionSet::new(repel(n, opts)?)
}

/// Shared, lazily computed direction sets keyed by size and symmetry.
pub fn cached_directions(n: usize, antipodal: bool) -> Result<Arc<DirectionSet>> {
    type Cache = Mutex<HashMap<(usize, bool), Arc<DirectionSet>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(d) = cache.lock().unwrap().get(&(n, antipodal)) {
        return Ok(d.clone());
    }
    let d = Arc::new(electrostatic_with(n, RepulsionOptions { antipodal, ..Default::default() })?);
    cache.lock().unwrap().insert((n, antipodal), d.clone());
    Ok(d)
}

fn energy(p: &[Vector3<f64>], antipodal: bool) -> f64 {
    let mut e = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            e += 1.0 / (p[i] - p[j]).norm();
            if antipodal {
                e += 1.0 / (p[i] + p[j]).norm();
            }
        }
    }
    e
}

fn forces(p: &[Vector3<f64>], antipodal: bool) -> Vec<Vector3<f64>> {
    let mut f = vec![Vector3::zeros(); p.len()];
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d = p[i] - p[j];
            let r = d.norm();
            let mut g = d / (r * r * r);
            if antipodal {
                let s = p[i] + p[j];
                let r2 = s.norm();
                let h = s / (r2 * r2 * r2);
                f[i] += h;
                f[j] += h;
            }
            f[i] += g;
            g = -g;
            f[j] += g;
        }
    }
    // tangential part
    for (fi, pi) in f.iter_mut().zip(p) {
        *fi -= pi * fi.dot(pi);
    }
    f
}

fn repel(n: usize, opts: RepulsionOptions) -> Result<Vec<Vector3<f64>>> {
    if n == 0 {
        return Err(Error::Contract("need at least one direction".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut p: Vec<Vector3<f64>> = (0..n)
        .map(|_| {
            let v = Vector3::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            v.normalize()
        })
        .collect();
    if n == 1 {
        return Ok(p);
    }
    let mut e = energy(&p, opts.antipodal);
    let mut step = 0.1 / n as f64;
    let mut converged = false;
    for _ in 0..opts.iters {
        let f = forces(&p, opts.antipodal);
        let fmax = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if fmax < 1e-10 {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let q: Vec<Vector3<f64>> = p.iter().zip(&f).map(|(x, g)| (x + g * step).normalize()).collect();
            let eq = energy(&q, opts.antipodal);
            if eq < e {
                let rel = (e - eq) / e;
                p = q;
                e = eq;
                step *= 1.5;
                accepted = true;
                if rel < 1e-15 {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("electrostatic repulsion for {n} points stopped before convergence");
    }
    Ok(p)
}


#[cfg(test)]
mod large {
    use super::*;

    #[test]
    fn packing_of_512() {
        let d = electrostatic_directions(512, 1000).unwrap();
        let mut min = f64::MAX;
        for i in 0..512 {
            for j in i + 1..512 {
                min = min.min(d.directions[i].dot(&d.directions[j]).clamp(-1.0, 1.0).acos());
            }
        }
        let equal_area = 2.0 * (2.0f64 / 512.0).sqrt().asin();
        let hexagonal = (8.0 * std::f64::consts::PI / (3f64.sqrt() * 512.0)).sqrt();
        assert!(min >= 0.9 * equal_area && min <= hexagonal, "min angle {min}");
        assert!(d.is_connected());
        assert!(d.neighbors.iter().all(|v| (4..=8).contains(&v.len())));
    }
}
