//! Brute-force oracles for the operators: pointwise evaluation on a sphere
//! sampling or on rotation-group quadrature, then re-projection. The
//! `*_error` functions return maximum relative errors.

use super::*;
use num_complex::Complex64;
use se3h::fields::{GridSpec, Parity, Projector, SampledField, SphericalField, WignerField};
use se3h::harmonics::{so3_quadrature, EulerZYZ};
use se3h::maxima::cached_directions;
use se3h::operators::*;

const H: f64 = 1e-3;

pub fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

/// Samples a field on 512 directions, applies `pointwise(dir, derivative slot
/// volumes)` and projects back.
pub fn sphere_oracle(
    f: &SphericalField,
    l_out: usize,
    pointwise: impl Fn(&nalgebra::Vector3<f64>, &dyn Fn(usize) -> Vec<Complex64>) -> Vec<Complex64>,
) -> SphericalField {
    let dirs = cached_directions(512, false).unwrap();
    let grid = f.grid;
    let nv = grid.nvox();
    let full = f.relayout(l_out, Parity::All);
    let proj = Projector::new(&dirs, l_out, Parity::All).unwrap();
    let samples = proj.evaluate(&full);
    let mut out = SampledField::zeros(grid, dirs.len());
    for (i, d) in dirs.directions.iter().enumerate() {
        let vol = &samples.data[i * nv..(i + 1) * nv];
        let derivs = channel_derivatives(vol, 1, &grid);
        let vals = pointwise(d, &|slot| derivs[0][slot].clone());
        out.data[i * nv..(i + 1) * nv].copy_from_slice(&vals);
    }
    proj.project(&out)
}

pub fn second_pointwise(d: &nalgebra::Vector3<f64>, s: &dyn Fn(usize) -> Vec<Complex64>, transverse: bool) -> Vec<Complex64> {
    let n = [d.x, d.y, d.z];
    let vols: Vec<Vec<Complex64>> = (4..10).map(s).collect();
    let nv = vols[0].len();
    let mut out = vec![Complex64::default(); nv];
    for a in 0..3 {
        for b in 0..3 {
            let mut w = n[a] * n[b];
            if transverse {
                w = if a == b { 1.0 } else { 0.0 } - w;
            }
            let vol = &vols[second_slot(a, b) - 4];
            for v in 0..nv {
                out[v] += vol[v] * w;
            }
        }
    }
    out
}

/// Projects a pointwise Wigner-domain function back onto coefficients with
/// exact rotation-group quadrature.
pub fn so3_oracle(f: &WignerField, value_at: impl Fn(&EulerZYZ, &[Vec<Vec<Complex64>>]) -> Vec<Complex64>) -> WignerField {
    let l = f.l();
    let grid = f.grid;
    let nv = grid.nvox();
    let derivs = channel_derivatives(&f.data, f.n_channels(), &grid);
    let mut out = WignerField::zeros(grid, l);
    for (g, w) in so3_quadrature(l + 1).unwrap() {
        let vals = value_at(&g, &derivs);
        for (c, d) in analysis_weights(l, &g).into_iter().enumerate() {
            let s = d * w;
            for (o, x) in out.data[c * nv..(c + 1) * nv].iter_mut().zip(&vals) {
                *o += s * x;
            }
        }
    }
    out
}

pub fn tk_value(g: &EulerZYZ, derivs: &[Vec<Vec<Complex64>>], l: usize, k: i32, nv: usize) -> Vec<Complex64> {
    let w = synthesis_weights(l, g);
    let m = t_matrix(g);
    let mut out = vec![Complex64::default(); nv];
    for b in 0..3 {
        let vol = synth_slot(derivs, &w, 1 + b, nv);
        let c = m[((k + 1) as usize, b)];
        for v in 0..nv {
            out[v] += c * vol[v];
        }
    }
    out
}

/// Fourth-order central derivative along Euler coordinate `axis`
/// (0 gamma, 1 beta, 2 alpha).
pub fn euler_partial(g: &EulerZYZ, axis: usize, eval: &dyn Fn(&EulerZYZ) -> Vec<Complex64>) -> Vec<Complex64> {
    let shift = |t: f64| {
        let mut x = [g.gamma, g.beta, g.alpha];
        x[axis] += t;
        eval(&EulerZYZ::new(x[0], x[1], x[2]))
    };
    let (p1, m1, p2, m2) = (shift(H), shift(-H), shift(2.0 * H), shift(-2.0 * H));
    (0..p1.len()).map(|v| (m2[v] - p2[v] + (p1[v] - m1[v]) * 8.0) / (12.0 * H)).collect()
}

/// Ladder operators as first-order differential operators in Euler angles.
pub fn ladder(g: &EulerZYZ, sign: i32, eval: &dyn Fn(&EulerZYZ) -> Vec<Complex64>) -> Vec<Complex64> {
    let dg = euler_partial(g, 0, eval);
    let db = euler_partial(g, 1, eval);
    let da = euler_partial(g, 2, eval);
    let (sa, ca) = g.alpha.sin_cos();
    let (sb, cb) = g.beta.sin_cos();
    let cot = cb / sb;
    let s = sign as f64;
    (0..dg.len())
        .map(|v| {
            let jx = da[v] * (ca * cot) + db[v] * sa - dg[v] * (ca / sb);
            let jy = da[v] * (-sa * cot) + db[v] * ca + dg[v] * (sa / sb);
            -(jx + Complex64::i() * jy * s) / 2f64.sqrt()
        })
        .collect()
}

pub fn t0_error(n: usize) -> f64 {
    let f = random_sph(GridSpec::cube(n), 4, 3, Parity::All, 1);
    let got = apply_t0_s2(&f).unwrap();
    let want = sphere_oracle(&f, 4, |d, s| {
        let (x, y, z) = (s(1), s(2), s(3));
        (0..x.len()).map(|v| x[v] * d.x + y[v] * d.y + z[v] * d.z).collect()
    });
    rel_err(&got.data, &want.relayout(got.l(), got.parity()).data)
}

pub fn tz2_error(n: usize) -> f64 {
    let f = random_sph(GridSpec::cube(n), 4, 2, Parity::All, 2);
    let got = apply_tz2_s2(&f).unwrap();
    let want = sphere_oracle(&f, 4, |d, s| second_pointwise(d, s, false));
    rel_err(&got.data, &want.data)
}

pub fn txy2_error(n: usize) -> f64 {
    let f = random_sph(GridSpec::cube(n), 4, 2, Parity::Even, 3);
    let got = apply_txy2_s2(&f).unwrap();
    let want = sphere_oracle(&f, 4, |d, s| second_pointwise(d, s, true)).relayout(4, Parity::Even);
    rel_err(&got.data, &want.data)
}

/// All three `T_k` against the rotated gradient.
pub fn tk_error(n: usize) -> f64 {
    let grid = GridSpec::cube(n);
    let f = random_wigner(grid, 3, 2, 11);
    (-1..=1)
        .map(|k| {
            let got = apply_tk(&f, k).unwrap();
            let want = so3_oracle(&f, |g, d| tk_value(g, d, 3, k, grid.nvox()));
            rel_err(&got.data, &want.data)
        })
        .fold(0.0, f64::max)
}

/// All nine `conj(T_k') T_k` products against the rotated Hessian.
pub fn tt_error(n: usize) -> f64 {
    let grid = GridSpec::cube(n);
    let nv = grid.nvox();
    let f = random_wigner(grid, 3, 1, 12);
    let mut err: f64 = 0.0;
    for k in -1..=1 {
        for kp in -1..=1 {
            let got = apply_tt(&f, k, kp).unwrap();
            let want = so3_oracle(&f, |g, d| {
                let w = synthesis_weights(3, g);
                let m = t_matrix(g);
                let mut out = vec![Complex64::default(); nv];
                for a in 0..3 {
                    for b in 0..3 {
                        let c = m[((kp + 1) as usize, a)].conj() * m[((k + 1) as usize, b)];
                        let vol = synth_slot(d, &w, second_slot(a, b), nv);
                        for v in 0..nv {
                            out[v] += c * vol[v];
                        }
                    }
                }
                out
            });
            err = err.max(rel_err(&got.data, &want.data));
        }
    }
    err
}

/// `J_(+-1)` and `J_z` against Euler-angle derivatives.
pub fn ladder_error() -> f64 {
    let grid = GridSpec::cube(3);
    let nv = grid.nvox();
    let f = random_wigner(grid, 3, 3, 13);
    let derivs = channel_derivatives(&f.data, f.n_channels(), &grid);
    let eval = |h: &EulerZYZ| synth_slot(&derivs, &synthesis_weights(3, h), 0, nv);
    let mut err: f64 = 0.0;
    for sign in [1, -1] {
        let want = so3_oracle(&f, |g, _| ladder(g, sign, &eval));
        err = err.max(rel_err(&apply_jpm(&f, sign).data, &want.data));
    }
    let want = so3_oracle(&f, |g, _| euler_partial(g, 2, &eval));
    err.max(rel_err(&apply_jz(&f).data, &want.data))
}

/// Both orderings of the mixed `T J` products.
pub fn mixed_error(n: usize) -> f64 {
    let grid = GridSpec::cube(n);
    let nv = grid.nvox();
    let f = random_wigner(grid, 3, 2, 14);
    let mut err: f64 = 0.0;
    for sign in [1, -1] {
        let k = -sign;
        // T after J: J acts on each Cartesian derivative separately.
        let want = so3_oracle(&f, |g, d| {
            let m = t_matrix(g);
            let mut out = vec![Complex64::default(); nv];
            for b in 0..3 {
                let eval = |h: &EulerZYZ| synth_slot(d, &synthesis_weights(3, h), 1 + b, nv);
                let jv = ladder(g, sign, &eval);
                for v in 0..nv {
                    out[v] += m[((k + 1) as usize, b)] * jv[v];
                }
            }
            out
        });
        let got = apply_mixed_tj(&f, MixedVariant::TJ, sign).unwrap();
        err = err.max(rel_err(&got.data, &want.data));

        // J after T: the rotated frame is differentiated too.
        let want = so3_oracle(&f, |g, d| {
            let eval = |h: &EulerZYZ| tk_value(h, d, 3, k, nv);
            ladder(g, sign, &eval)
        });
        let got = apply_mixed_tj(&f, MixedVariant::JT, sign).unwrap();
        err = err.max(rel_err(&got.data, &want.data));
    }
    err
}
