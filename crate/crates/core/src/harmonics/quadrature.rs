use super::{cg_or_zero, gauss_legendre, EulerZYZ};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Product rule on SO(3): `2B` uniform nodes in gamma and alpha, `B`
/// Gauss-Legendre nodes in `cos beta`. Weights sum to `8 pi^2`.
pub fn so3_quadrature(resolution: usize) -> Result<Vec<(EulerZYZ, f64)>> {
    if resolution < 2 {
        return Err(Error::Contract(format!("quadrature resolution {resolution} < 2")));
    }
    let b = resolution;
    let (x, w) = gauss_legendre(b);
    let step = 2.0 * PI / (2 * b) as f64;
    let mut out = Vec::with_capacity(4 * b * b * b);
    for (xi, wi) in x.iter().zip(&w) {
        let beta = xi.clamp(-1.0, 1.0).acos();
        for ig in 0..2 * b {
            for ia in 0..2 * b {
                let g = EulerZYZ::new(ig as f64 * step, beta, ia as f64 * step);
                out.push((g, wi * step * step));
            }
        }
    }
    Ok(out)
}

/// Integral of `D^j_{nm} conj(D^{j'}_{n'm'}) conj(D^l_{k'k})` over SO(3):
/// `(8 pi^2 / (2j+1)) <j n | j' n', l k'> <j m | j' m', l k>`.
#[allow(clippy::too_many_arguments)]
pub fn triple_product_integral(j: i32, n: i32, m: i32, jp: i32, np: i32, mp: i32, l: i32, kp: i32, k: i32) -> f64 {
    8.0 * PI * PI / (2 * j + 1) as f64 * cg_or_zero(j, n, jp, np, l, kp) * cg_or_zero(j, m, jp, mp, l, k)
}
