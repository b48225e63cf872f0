use super::{lm_index, ln_factorial};
use crate::{Error, Result};
use nalgebra::Vector3;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Racah-normalized spherical harmonic `Y^j_m(n)` (Condon-Shortley phase,
/// `Y^j_m(e_z) = delta_{m0}`).
pub fn sh_eval(j: i32, m: i32, dir: &Vector3<f64>) -> Result<Complex64> {
    check_unit(dir)?;
    if m.abs() > j {
        return Err(Error::Contract(format!("|m| = {} > j = {j}", m.abs())));
    }
    Ok(sh_vector(j, dir)[(m + j) as usize])
}

fn check_unit(dir: &Vector3<f64>) -> Result<()> {
    let n = dir.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("direction norm {n} is not 1")));
    }
    Ok(())
}

/// `Y^j_m` for `m = -j..=j`. No unit-norm check.
pub fn sh_vector(j: i32, dir: &Vector3<f64>) -> Vec<Complex64> {
    let all = sh_all(j, dir);
    all[lm_index(j, -j)..=lm_index(j, j)].to_vec()
}

/// All `Y^j_m` with `j <= l_max`, indexed by `j^2 + j + m`.
pub fn sh_all(l_max: i32, dir: &Vector3<f64>) -> Vec<Complex64> {
    let l = l_max.max(0) as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); (l + 1) * (l + 1)];
    let ct = dir.z;
    let st = (dir.x * dir.x + dir.y * dir.y).sqrt();
    let phase = if st > 0.0 { Complex64::new(dir.x / st, dir.y / st) } else { Complex64::new(1.0, 0.0) };
    // q[l] holds sqrt((l-m)!/(l+m)!) P_l^m(cos theta) for the current m.
    let mut qmm = 1.0;
    let mut eim = Complex64::new(1.0, 0.0);
    for m in 0..=l {
        if m > 0 {
            let mf = m as f64;
            qmm *= -((2.0 * mf - 1.0) / (2.0 * mf)).sqrt() * st;
            eim *= phase;
        }
        let mut q_prev = 0.0;
        let mut q = qmm;
        for jj in m..=l {
            if jj == m + 1 {
                q_prev = q;
                q = (2.0 * m as f64 + 1.0).sqrt() * ct * qmm;
            } else if jj > m + 1 {
                let jf = jj as f64;
                let mf = m as f64;
                let next = ((2.0 * jf - 1.0) * ct * q - ((jf - 1.0) * (jf - 1.0) - mf * mf).sqrt() * q_prev) / (jf * jf - mf * mf).sqrt();
                q_prev = q;
                q = next;
            }
            let v = eim * q;
            let (ji, mi) = (jj as i32, m as i32);
            out[lm_index(ji, mi)] = v;
            if m > 0 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out[lm_index(ji, -mi)] = v.conj() * sign;
            }
        }
    }
    out
}

/// One term `coeff * x^px y^py z^pz` of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub px: u32,
    pub py: u32,
    pub pz: u32,
}

/// Racah-normalized solid harmonic `R^j_m(r)`, a harmonic homogeneous
/// polynomial of degree `j`.
pub fn solid_harmonic_eval(j: i32, m: i32, r: &Vector3<f64>) -> Complex64 {
    let (x, y, z) = (r.x, r.y, r.z);
    let a = Complex64::new(x, -y);
    let b = Complex64::new(-x, -y);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, jj, k, w) in solid_terms(j, m) {
        sum += a.powi(jj) * b.powi(i) * z.powi(k) * w;
    }
    sum
}

// (i, j, k, weight) with i + j + k = l, i - j = m.
fn solid_terms(l: i32, m: i32) -> Vec<(i32, i32, i32, f64)> {
    let mut out = Vec::new();
    if m.abs() > l {
        return out;
    }
    let ln_pre = 0.5 * (ln_factorial((l + m) as i64) + ln_factorial((l - m) as i64));
    for i in 0..=l {
        let jj = i - m;
        let k = l - i - jj;
        if jj < 0 || k < 0 {
            continue;
        }
        let ln_den = ln_factorial(i as i64) + ln_factorial(jj as i64) + ln_factorial(k as i64) + (i + jj) as f64 * std::f64::consts::LN_2;
        out.push((i, jj, k, (ln_pre - ln_den).exp()));
    }
    out
}

/// Monomial expansion of `R^j_m`, merged by exponent.
pub fn solid_harmonic_monomials(j: i32, m: i32) -> Vec<Monomial> {
    let mut acc: BTreeMap<(u32, u32, u32), Complex64> = BTreeMap::new();
    let binom = |n: i32, k: i32| -> f64 { (ln_factorial(n as i64) - ln_factorial(k as i64) - ln_factorial((n - k) as i64)).exp().round() };
    let i_unit = Complex64::new(0.0, 1.0);
    for (i, jj, k, w) in solid_terms(j, m) {
        // (x - iy)^jj = sum_a C(jj,a) x^a (-iy)^(jj-a)
        // (-x - iy)^i = sum_b C(i,b) (-x)^b (-iy)^(i-b)
        for a in 0..=jj {
            for b in 0..=i {
                let coeff = w * binom(jj, a) * binom(i, b) * if b % 2 == 0 { 1.0 } else { -1.0 } * (-i_unit).powi(jj - a + i - b);
                let key = ((a + b) as u32, (jj - a + i - b) as u32, k as u32);
                *acc.entry(key).or_default() += coeff;
            }
        }
    }
    acc.into_iter().filter(|(_, c)| c.norm() > 1e-15).map(|((px, py, pz), coeff)| Monomial { coeff, px, py, pz }).collect()
}
