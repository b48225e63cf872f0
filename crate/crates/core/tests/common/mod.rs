#![allow(dead_code)]

pub mod algebra;
pub mod oracles;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use se3h::fields::{GridSpec, Parity, SphericalField, WignerField};
use se3h::harmonics::{spherical_basis, wigner_d_matrix, EulerZYZ};
use se3h::operators::{fd_apply, Kernel};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn crand(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Random complex coefficients for orders `j <= band`, zero above.
pub fn random_sph(grid: GridSpec, l: usize, band: usize, parity: Parity, seed: u64) -> SphericalField {
    let mut r = rng(seed);
    let mut f = SphericalField::zeros(grid, l, parity);
    for (c, (j, _)) in f.layout.channels().into_iter().enumerate() {
        if j as usize <= band {
            for v in f.channel_mut(c) {
                *v = crand(&mut r);
            }
        }
    }
    f
}

/// Random real-valued (symmetric) coefficients.
pub fn random_real_sph(grid: GridSpec, l: usize, band: usize, parity: Parity, seed: u64) -> SphericalField {
    let mut f = random_sph(grid, l, band, parity, seed);
    let nv = grid.nvox();
    for j in f.layout.orders().collect::<Vec<_>>() {
        for n in 0..=j {
            let a = f.layout.index(j, n).unwrap();
            let b = f.layout.index(j, -n).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for v in 0..nv {
                if n == 0 {
                    f.data[a * nv + v].im = 0.0;
                } else {
                    f.data[b * nv + v] = f.data[a * nv + v].conj() * sign;
                }
            }
        }
    }
    f.real = true;
    f
}

pub fn random_wigner(grid: GridSpec, l: usize, band: usize, seed: u64) -> WignerField {
    let mut r = rng(seed);
    let mut f = WignerField::zeros(grid, l);
    let nv = grid.nvox();
    for (c, (j, _, _)) in f.layout.channels().into_iter().enumerate() {
        if j as usize <= band {
            for v in 0..nv {
                f.data[c * nv + v] = crand(&mut r);
            }
        }
    }
    f
}

/// Cartesian derivative volumes of every channel: index 0 identity,
/// 1..=3 central x/y/z, then (a, b) compact second differences.
pub fn channel_derivatives(data: &[Complex64], nch: usize, grid: &GridSpec) -> Vec<Vec<Vec<Complex64>>> {
    let nv = grid.nvox();
    let kernels = [
        Kernel::CentralX,
        Kernel::CentralY,
        Kernel::CentralZ,
        Kernel::Dxx,
        Kernel::Dyy,
        Kernel::Dzz,
        Kernel::Dxy,
        Kernel::Dxz,
        Kernel::Dyz,
    ];
    (0..nch)
        .map(|c| {
            let src = &data[c * nv..(c + 1) * nv];
            let mut v = vec![src.to_vec()];
            for k in kernels {
                v.push(fd_apply(k, src, grid).unwrap());
            }
            v
        })
        .collect()
}

/// Slot of the second difference `d_ab` in [`channel_derivatives`].
pub fn second_slot(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 0) => 4,
        (1, 1) => 5,
        (2, 2) => 6,
        (0, 1) => 7,
        (0, 2) => 8,
        _ => 9,
    }
}

/// Synthesis weights `(2j+1)/(8 pi^2) conj(D^j_{nm}(g))` in Wigner channel order.
pub fn synthesis_weights(l: usize, g: &EulerZYZ) -> Vec<Complex64> {
    let mut w = Vec::new();
    for j in 0..=l as i32 {
        let d = wigner_d_matrix(j, g);
        for n in 0..(2 * j + 1) as usize {
            for m in 0..(2 * j + 1) as usize {
                w.push(d[(n, m)].conj() * ((2 * j + 1) as f64 / (8.0 * PI * PI)));
            }
        }
    }
    w
}

/// Analysis weights `D^j_{nm}(g)` in Wigner channel order.
pub fn analysis_weights(l: usize, g: &EulerZYZ) -> Vec<Complex64> {
    let mut w = Vec::new();
    for j in 0..=l as i32 {
        let d = wigner_d_matrix(j, g);
        for n in 0..(2 * j + 1) as usize {
            for m in 0..(2 * j + 1) as usize {
                w.push(d[(n, m)]);
            }
        }
    }
    w
}

/// Synthesizes derivative slot `slot` of all channels at `g`.
pub fn synth_slot(derivs: &[Vec<Vec<Complex64>>], w: &[Complex64], slot: usize, nv: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); nv];
    for (c, wc) in w.iter().enumerate() {
        if c >= derivs.len() {
            break;
        }
        for (o, x) in out.iter_mut().zip(&derivs[c][slot]) {
            *o += wc * x;
        }
    }
    out
}

/// `S R_g^T`: row `k` maps the Cartesian gradient to `T_k`.
pub fn t_matrix(g: &EulerZYZ) -> nalgebra::Matrix3<Complex64> {
    let r: Matrix3<f64> = g.rotation_matrix();
    spherical_basis() * r.transpose().map(Complex64::from)
}

pub fn sphere_dir(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}
