use super::{ln_factorial, EulerZYZ};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Wigner small-d `d^j_{nm}(beta)` by the explicit alternating sum.
pub fn wigner_small_d(j: i32, n: i32, m: i32, beta: f64) -> f64 {
    assert!(n.abs() <= j && m.abs() <= j, "index out of range");
    let (j, n, m) = (j as i64, n as i64, m as i64);
    let (s2, c2) = (beta / 2.0).sin_cos();
    let ln_pre = 0.5 * (ln_factorial(j + n) + ln_factorial(j - n) + ln_factorial(j + m) + ln_factorial(j - m));
    let lo = 0.max(m - n);
    let hi = (j + m).min(j - n);
    let mut sum = 0.0;
    for s in lo..=hi {
        let ln_den = ln_factorial(j + m - s) + ln_factorial(s) + ln_factorial(n - m + s) + ln_factorial(j - n - s);
        let mag = (ln_pre - ln_den).exp() * c2.powi((2 * j + m - n - 2 * s) as i32) * s2.powi((n - m + 2 * s) as i32);
        sum += if (n - m + s).rem_euclid(2) == 0 { mag } else { -mag };
    }
    sum
}

/// `(2j+1) x (2j+1)` small-d matrix, rows `n`, columns `m`, both from `-j`.
pub fn wigner_small_d_matrix(j: i32, beta: f64) -> DMatrix<f64> {
    let d = (2 * j + 1) as usize;
    DMatrix::from_fn(d, d, |r, c| wigner_small_d(j, r as i32 - j, c as i32 - j, beta))
}

/// `D^j_{nm}(g) = exp(-i n gamma) d^j_{nm}(beta) exp(-i m alpha)`.
pub fn wigner_d_matrix(j: i32, g: &EulerZYZ) -> DMatrix<Complex64> {
    let small = wigner_small_d_matrix(j, g.beta);
    let d = (2 * j + 1) as usize;
    DMatrix::from_fn(d, d, |r, c| {
        let n = r as i32 - j;
        let m = c as i32 - j;
        Complex64::from_polar(1.0, -(n as f64) * g.gamma - (m as f64) * g.alpha) * small[(r, c)]
    })
}
