use crate::{Error, Result};

/// Legendre polynomial `P_l(t)` by the three-term recurrence.
pub fn legendre_eval(l: usize, t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("legendre argument {t} outside [-1, 1]")));
    }
    Ok(*legendre_all(l, t).last().unwrap())
}

/// `P_0(t) ..= P_l(t)`. No domain check.
pub fn legendre_all(l: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(l + 1);
    p.push(1.0);
    if l >= 1 {
        p.push(t);
    }
    for k in 2..=l {
        let kf = k as f64;
        let v = ((2.0 * kf - 1.0) * t * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
        p.push(v);
    }
    p
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = p_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = p_and_derivative(n, z);
                dp = d;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn p_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
