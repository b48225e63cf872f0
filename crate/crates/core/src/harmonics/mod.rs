//! Special functions: Legendre polynomials, Clebsch-Gordan coefficients,
//! Wigner d/D matrices, Racah-normalized spherical and solid harmonics and
//! quadrature on the rotation group.

mod clebsch;
mod legendre;
mod quadrature;
mod sph;
mod wigner;

pub use clebsch::{cg, cg_or_zero, CgKey};
pub use legendre::{gauss_legendre, legendre_all, legendre_eval};
pub use quadrature::{so3_quadrature, triple_product_integral};
pub use sph::{sh_all, sh_eval, sh_vector, solid_harmonic_eval, solid_harmonic_monomials, Monomial};
pub use wigner::{wigner_d_matrix, wigner_small_d, wigner_small_d_matrix};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Channel index of `(j, m)` in an all-orders layout.
#[inline]
pub fn lm_index(j: i32, m: i32) -> usize {
    (j * j + j + m) as usize
}

/// Euler angles in ZYZ convention, `R = Rz(gamma) Ry(beta) Rz(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerZYZ {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl EulerZYZ {
    pub const IDENTITY: EulerZYZ = EulerZYZ { gamma: 0.0, beta: 0.0, alpha: 0.0 };

    pub fn new(gamma: f64, beta: f64, alpha: f64) -> Self {
        Self { gamma, beta, alpha }
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        rot_z(self.gamma) * rot_y(self.beta) * rot_z(self.alpha)
    }

    /// Recovers angles from a rotation matrix. Gimbal-locked inputs put the
    /// whole z-rotation into `gamma`.
    pub fn from_matrix(r: &Matrix3<f64>) -> Self {
        let beta = r[(2, 2)].clamp(-1.0, 1.0).acos();
        let s = beta.sin();
        if s.abs() < 1e-12 {
            let gamma = if r[(2, 2)] > 0.0 { r[(1, 0)].atan2(r[(0, 0)]) } else { (-r[(1, 0)]).atan2(-r[(0, 0)]) };
            return Self { gamma, beta, alpha: 0.0 };
        }
        Self { gamma: r[(1, 2)].atan2(r[(0, 2)]), beta, alpha: r[(2, 1)].atan2(-r[(2, 0)]) }
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &EulerZYZ) -> EulerZYZ {
        Self::from_matrix(&(self.rotation_matrix() * other.rotation_matrix()))
    }

    /// Rotation taking `e_z` to the given unit direction.
    pub fn from_direction(d: &Vector3<f64>) -> Self {
        let beta = d.z.clamp(-1.0, 1.0).acos();
        let gamma = if d.x == 0.0 && d.y == 0.0 { 0.0 } else { d.y.atan2(d.x) };
        Self { gamma, beta, alpha: 0.0 }
    }
}

pub fn rot_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub fn rot_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Change of basis from Cartesian to spherical components used for the
/// first-order spherical derivative: rows are `m = -1, 0, 1`, and
/// `D^1(g) = S R_g S^H`.
pub fn spherical_basis() -> nalgebra::Matrix3<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    nalgebra::Matrix3::new(c(h, 0.0), c(0.0, h), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(-h, 0.0), c(0.0, h), c(0.0, 0.0))
}

pub(crate) fn ln_factorial(n: i64) -> f64 {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; 512];
        for i in 1..v.len() {
            v[i] = v[i - 1] + (i as f64).ln();
        }
        v
    });
    assert!(n >= 0, "negative factorial argument");
    t[n as usize]
}
