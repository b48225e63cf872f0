use super::GridSpec;
use crate::harmonics::{wigner_d_matrix, EulerZYZ};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    All,
    Even,
}

/// Channel enumeration `(j, n)` for a band limit and parity, `j` then `n`
/// ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphLayout {
    pub l: usize,
    pub parity: Parity,
}

impl SphLayout {
    pub fn new(l: usize, parity: Parity) -> Self {
        Self { l, parity }
    }

    pub fn has_order(&self, j: i32) -> bool {
        j >= 0 && j as usize <= self.l && (self.parity == Parity::All || j % 2 == 0)
    }

    pub fn orders(&self) -> impl Iterator<Item = i32> + '_ {
        (0..=self.l as i32).filter(move |&j| self.has_order(j))
    }

    pub fn len(&self) -> usize {
        self.orders().map(|j| (2 * j + 1) as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// First channel of order `j`.
    pub fn offset(&self, j: i32) -> usize {
        match self.parity {
            Parity::All => (j * j) as usize,
            // sum of (2k+1) over even k < j is j(j-1)/2
            Parity::Even => (j * (j - 1) / 2) as usize,
        }
    }

    pub fn index(&self, j: i32, n: i32) -> Option<usize> {
        if !self.has_order(j) || n.abs() > j {
            return None;
        }
        Some(self.offset(j) + (n + j) as usize)
    }

    pub fn channels(&self) -> Vec<(i32, i32)> {
        self.orders().flat_map(|j| (-j..=j).map(move |n| (j, n))).collect()
    }
}

/// Grid of spherical harmonic coefficients `f^j_n(r)`, channel-planar.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalField {
    pub grid: GridSpec,
    pub layout: SphLayout,
    /// Set when the represented angular function is real-valued.
    pub real: bool,
    pub data: Vec<Complex64>,
}

impl SphericalField {
    pub fn zeros(grid: GridSpec, l: usize, parity: Parity) -> Self {
        let layout = SphLayout::new(l, parity);
        Self { grid, layout, real: false, data: vec![Complex64::default(); layout.len() * grid.nvox()] }
    }

    pub fn l(&self) -> usize {
        self.layout.l
    }

    pub fn parity(&self) -> Parity {
        self.layout.parity
    }

    pub fn nvox(&self) -> usize {
        self.grid.nvox()
    }

    pub fn n_channels(&self) -> usize {
        self.layout.len()
    }

    pub fn channel(&self, c: usize) -> &[Complex64] {
        let n = self.nvox();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.nvox();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn order(&self, j: i32) -> Option<&[Complex64]> {
        let o = self.layout.index(j, -j)?;
        let n = self.nvox();
        Some(&self.data[o * n..(o + (2 * j + 1) as usize) * n])
    }

    pub fn get(&self, j: i32, n: i32, voxel: usize) -> Complex64 {
        match self.layout.index(j, n) {
            Some(c) => self.data[c * self.nvox() + voxel],
            None => Complex64::default(),
        }
    }

    pub fn set(&mut self, j: i32, n: i32, voxel: usize, v: Complex64) {
        let c = self.layout.index(j, n).expect("channel outside layout");
        let nv = self.nvox();
        self.data[c * nv + voxel] = v;
    }

    /// All coefficients of one voxel in channel order.
    pub fn voxel(&self, voxel: usize) -> Vec<Complex64> {
        let nv = self.nvox();
        (0..self.n_channels()).map(|c| self.data[c * nv + voxel]).collect()
    }

    pub fn set_voxel(&mut self, voxel: usize, coeffs: &[Complex64]) {
        let nv = self.nvox();
        for (c, v) in coeffs.iter().enumerate() {
            self.data[c * nv + voxel] = *v;
        }
    }

    /// Same coefficients in another layout; orders missing from the target
    /// are dropped, new orders are zero.
    pub fn relayout(&self, l: usize, parity: Parity) -> SphericalField {
        let mut out = SphericalField::zeros(self.grid, l, parity);
        out.real = self.real;
        let nv = self.nvox();
        for (j, n) in out.layout.channels() {
            if let Some(src) = self.layout.index(j, n) {
                let dst = out.layout.index(j, n).unwrap();
                out.data[dst * nv..(dst + 1) * nv].copy_from_slice(&self.data[src * nv..(src + 1) * nv]);
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += a * other`, layouts must match.
    pub fn axpy(&mut self, a: f64, other: &SphericalField) {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        self.data.par_iter_mut().zip(other.data.par_iter()).for_each(|(x, y)| *x += y * a);
    }

    /// `L^2(R^3 x S^2)` inner product of the represented functions (per unit
    /// voxel volume): `sum (2j+1)/(16 pi^3) f conj(g)`.
    pub fn inner(&self, other: &SphericalField) -> Complex64 {
        let nv = self.nvox();
        let mut total = Complex64::default();
        for j in self.layout.orders() {
            if !other.layout.has_order(j) {
                continue;
            }
            let w = (2 * j + 1) as f64 / (16.0 * PI * PI * PI);
            for n in -j..=j {
                let a = self.layout.index(j, n).unwrap();
                let b = other.layout.index(j, n).unwrap();
                let s: Complex64 =
                    self.data[a * nv..(a + 1) * nv].iter().zip(&other.data[b * nv..(b + 1) * nv]).map(|(x, y)| x * y.conj()).sum();
                total += s * w;
            }
        }
        total
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn max_abs_diff(&self, other: &SphericalField) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..=self.l().max(other.l()) as i32 {
            for n in -j..=j {
                for v in 0..self.nvox() {
                    m = m.max((self.get(j, n, v) - other.get(j, n, v)).norm());
                }
            }
        }
        m
    }

    /// Largest violation of `f^j_{-n} = (-1)^n conj(f^j_n)`.
    pub fn real_symmetry_residual(&self) -> f64 {
        let nv = self.nvox();
        let mut worst: f64 = 0.0;
        for j in self.layout.orders() {
            for n in 0..=j {
                let a = self.layout.index(j, n).unwrap();
                let b = self.layout.index(j, -n).unwrap();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                for v in 0..nv {
                    let d = self.data[b * nv + v] - self.data[a * nv + v].conj() * sign;
                    worst = worst.max(d.norm());
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Rotates the angular part: `f'^j = D^j(g) f^j` per voxel, so the rotated
/// function at `R_g n` equals the original at `n`.
pub fn rotate_coeffs(field: &SphericalField, g: &EulerZYZ) -> SphericalField {
    let mut out = field.clone();
    let nv = field.nvox();
    for j in field.layout.orders() {
        let d = wigner_d_matrix(j, g);
        let o = field.layout.offset(j);
        let dim = (2 * j + 1) as usize;
        let src = &field.data[o * nv..(o + dim) * nv];
        let dst = &mut out.data[o * nv..(o + dim) * nv];
        dst.par_chunks_mut(nv).enumerate().for_each(|(r, row)| {
            row.iter_mut().for_each(|x| *x = Complex64::default());
            for c in 0..dim {
                let w = d[(r, c)];
                if w.norm() == 0.0 {
                    continue;
                }
                for (x, y) in row.iter_mut().zip(&src[c * nv..(c + 1) * nv]) {
                    *x += w * y;
                }
            }
        });
    }
    out
}
