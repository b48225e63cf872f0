//! Maximum errors of the algebraic identities, shared by the harmonics tests
//! and the acceptance report.

use super::{random_sph, rng, sphere_dir};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use se3h::fields::{GridSpec, Parity};
use se3h::harmonics::*;
use se3h::operators::{apply_j_squared_s2, apply_txy2_s2, apply_tz2_s2, laplace_operator};
use std::f64::consts::PI;

const JMAX: i32 = 4;

fn c(j: i32, m: i32, j1: i32, m1: i32, j2: i32, m2: i32) -> f64 {
    cg_or_zero(j, m, j1, m1, j2, m2)
}

fn delta(a: i32, b: i32) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn binom(n: i32, k: i32) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    (1..=k).map(|i| (n - k + i) as f64 / i as f64).product()
}

fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_euler(seed: u64) -> EulerZYZ {
    let mut r = rng(seed);
    EulerZYZ::new(r.gen_range(-PI..PI), r.gen_range(0.0..PI), r.gen_range(-PI..PI))
}

/// Sum over `(j, m)` of products with different `(m1, m2)` pairs.
pub fn cg_orth1() -> f64 {
    let mut err: f64 = 0.0;
    for j1 in 0..=JMAX {
        for j2 in 0..=JMAX {
            for m1 in -j1..=j1 {
                for m2 in -j2..=j2 {
                    for m1p in -j1..=j1 {
                        for m2p in -j2..=j2 {
                            let mut s = 0.0;
                            for j in (j1 - j2).abs()..=j1 + j2 {
                                for m in -j..=j {
                                    s += c(j, m, j1, m1, j2, m2) * c(j, m, j1, m1p, j2, m2p);
                                }
                            }
                            err = err.max((s - delta(m1, m1p) * delta(m2, m2p)).abs());
                        }
                    }
                }
            }
        }
    }
    err
}

/// Sum over `m1` (with `m2 = m - m1`) for pairs of coupled states.
pub fn cg_orth2() -> f64 {
    let mut err: f64 = 0.0;
    for j1 in 0..=JMAX {
        for j2 in 0..=JMAX {
            for j in (j1 - j2).abs()..=j1 + j2 {
                for jp in (j1 - j2).abs()..=j1 + j2 {
                    for m in -j..=j {
                        for mp in -jp..=jp {
                            let mut s = 0.0;
                            for m1 in -j1..=j1 {
                                s += c(j, m, j1, m1, j2, m - m1) * c(jp, mp, j1, m1, j2, m - m1);
                            }
                            err = err.max((s - delta(j, jp) * delta(m, mp)).abs());
                        }
                    }
                }
            }
        }
    }
    err
}

/// The two weighted companion orthogonality relations.
pub fn cg_orth_weighted() -> f64 {
    let mut err: f64 = 0.0;
    for j1 in 0..=JMAX {
        for j2 in 0..=JMAX {
            for m1 in -j1..=j1 {
                for m2 in -j2..=j2 {
                    for m1p in -j1..=j1 {
                        for m2p in -j2..=j2 {
                            let mut s = 0.0;
                            for j in 0..=j1 + j2 {
                                for m in -j..=j {
                                    s += (2 * j + 1) as f64 / (2 * j1 + 1) as f64 * c(j1, m1, j, m, j2, m2) * c(j1, m1p, j, m, j2, m2p);
                                }
                            }
                            err = err.max((s - delta(m1, m1p) * delta(m2, m2p)).abs());
                        }
                    }
                }
            }
            for j2p in 0..=JMAX {
                for m2 in -j2..=j2 {
                    for m2p in -j2p..=j2p {
                        for j in 0..=2 * JMAX {
                            let mut s = 0.0;
                            for m1 in -j1..=j1 {
                                for m in -j..=j {
                                    s += c(j, m, j1, m1, j2, m2) * c(j, m, j1, m1, j2p, m2p);
                                }
                            }
                            // only couplings allowed by both triangles carry weight
                            let allowed = (j1 - j2).abs() <= j && j <= j1 + j2;
                            let want =
                                if allowed { (2 * j + 1) as f64 / (2 * j2 + 1) as f64 * delta(j2, j2p) * delta(m2, m2p) } else { 0.0 };
                            err = err.max((s - want).abs());
                        }
                    }
                }
            }
        }
    }
    err
}

/// Swap, sign-flip and index-exchange symmetries.
pub fn cg_symmetries() -> f64 {
    let mut err: f64 = 0.0;
    for j1 in 0..=JMAX {
        for j2 in 0..=JMAX {
            for j in 0..=JMAX {
                let sign = if (j + j1 + j2) % 2 == 0 { 1.0 } else { -1.0 };
                for m1 in -j1..=j1 {
                    for m2 in -j2..=j2 {
                        let m = m1 + m2;
                        if m.abs() > j {
                            continue;
                        }
                        let v = c(j, m, j1, m1, j2, m2);
                        err = err.max((v - sign * c(j, m, j2, m2, j1, m1)).abs());
                        err = err.max((v - sign * c(j, -m, j1, -m1, j2, -m2)).abs());
                        let s3 = if (j1 + m1) % 2 == 0 { 1.0 } else { -1.0 };
                        let w = ((2 * j + 1) as f64 / (2 * j2 + 1) as f64).sqrt() * s3 * c(j2, m2, j, m, j1, -m1);
                        err = err.max((v - w).abs());
                    }
                }
            }
        }
    }
    err
}

/// Closed forms for the stretched couplings `l - lambda` and `l + lambda`.
pub fn cg_closed_forms(lmax: i32) -> f64 {
    let mut err: f64 = 0.0;
    for l in 0..=lmax {
        for lam in 0..=l {
            for mu in -lam..=lam {
                for m in -l..=l {
                    if (m - mu).abs() <= l - lam {
                        let want = (binom(l + m, lam + mu) * binom(l - m, lam - mu) / binom(2 * l, 2 * lam)).sqrt();
                        err = err.max((c(l, m, l - lam, m - mu, lam, mu) - want).abs());
                    }
                }
            }
        }
        for lam in 0..=lmax {
            for mu in -lam..=lam {
                for m in -l..=l {
                    if (m - mu).abs() <= l + lam {
                        let sign = if (lam + mu) % 2 == 0 { 1.0 } else { -1.0 };
                        let want = sign
                            * (binom(l + lam - m + mu, lam + mu) * binom(l + lam + m - mu, lam - mu) / binom(2 * l + 2 * lam + 1, 2 * lam))
                                .sqrt();
                        err = err.max((c(l, m, l + lam, m - mu, lam, mu) - want).abs());
                    }
                }
            }
        }
    }
    err
}

/// `D(g) D(h) = D(gh)` and `D D^H = 1` for random pairs.
pub fn wigner_homomorphism(trials: u64) -> f64 {
    let mut err: f64 = 0.0;
    for t in 0..trials {
        let (g, h) = (random_euler(2 * t + 1), random_euler(2 * t + 2));
        let gh = g.compose(&h);
        for j in 0..=JMAX {
            let (dg, dh) = (wigner_d_matrix(j, &g), wigner_d_matrix(j, &h));
            err = err.max(max_norm(&(&dg * &dh - wigner_d_matrix(j, &gh))));
            let n = (2 * j + 1) as usize;
            err = err.max(max_norm(&(&dg * dg.adjoint() - DMatrix::<Complex64>::identity(n, n))));
        }
    }
    err
}

/// `D^1(g) = S R_g S^H` with the spherical basis matrix.
pub fn d1_basis_change(trials: u64) -> f64 {
    let s = spherical_basis();
    (0..trials)
        .map(|t| {
            let g = random_euler(100 + t);
            let r = g.rotation_matrix().map(Complex64::from);
            let d = wigner_d_matrix(1, &g);
            let want = s * r * s.adjoint();
            (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| (d[(a, b)] - want[(a, b)]).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn dm(j: i32, g: &EulerZYZ, m: i32, n: i32) -> Complex64 {
    wigner_d_matrix(j, g)[((m + j) as usize, (n + j) as usize)]
}

/// Coupling of two representations into one and its inverse.
pub fn wigner_decomposition(trials: u64) -> f64 {
    let mut err: f64 = 0.0;
    for t in 0..trials {
        let g = random_euler(200 + t);
        for l1 in 0..=3i32 {
            for l2 in 0..=3 {
                for m1 in -l1..=l1 {
                    for n1 in -l1..=l1 {
                        for m2 in -l2..=l2 {
                            for n2 in -l2..=l2 {
                                let lhs = dm(l1, &g, m1, n1) * dm(l2, &g, m2, n2);
                                let mut rhs = Complex64::default();
                                for l in (l1 - l2).abs()..=l1 + l2 {
                                    let (m, n) = (m1 + m2, n1 + n2);
                                    if m.abs() <= l && n.abs() <= l {
                                        rhs += dm(l, &g, m, n) * c(l, m, l1, m1, l2, m2) * c(l, n, l1, n1, l2, n2);
                                    }
                                }
                                err = err.max((lhs - rhs).norm());
                            }
                        }
                    }
                }
                for l in (l1 - l2).abs()..=l1 + l2 {
                    for m in -l..=l {
                        for n in -l..=l {
                            let mut s = Complex64::default();
                            for m1 in -l1..=l1 {
                                for n1 in -l1..=l1 {
                                    let (m2, n2) = (m - m1, n - n1);
                                    if m2.abs() <= l2 && n2.abs() <= l2 {
                                        s += dm(l1, &g, m1, n1) * dm(l2, &g, m2, n2) * c(l, m, l1, m1, l2, m2) * c(l, n, l1, n1, l2, n2);
                                    }
                                }
                            }
                            err = err.max((s - dm(l, &g, m, n)).norm());
                        }
                    }
                }
            }
        }
    }
    err
}

fn y(l: i32, m: i32, d: &nalgebra::Vector3<f64>) -> Complex64 {
    sh_eval(l, m, d).unwrap()
}

/// The four product rules of Racah-normalized spherical harmonics, one error
/// per rule.
pub fn sh_products(trials: u64) -> [f64; 4] {
    let mut err = [0.0f64; 4];
    let mut r = rng(300);
    for _ in 0..trials {
        let d = sphere_dir(r.gen_range(0.0..PI), r.gen_range(-PI..PI));
        for l1 in 0..=3i32 {
            for l2 in 0..=3 {
                for big in (l1 - l2).abs()..=l1 + l2 {
                    for mm in -big..=big {
                        let (mut s1, mut s2) = (Complex64::default(), Complex64::default());
                        for m1 in -l1..=l1 {
                            if (mm - m1).abs() <= l2 {
                                s1 += y(l1, m1, &d) * y(l2, mm - m1, &d) * c(big, mm, l1, m1, l2, mm - m1);
                            }
                        }
                        for m1 in -l1..=l1 {
                            let m2 = m1 + mm;
                            if m2.abs() <= l2 {
                                s2 += y(l1, m1, &d).conj() * y(l2, m2, &d) * c(l2, m2, l1, m1, big, mm);
                            }
                        }
                        err[0] = err[0].max((c(big, 0, l1, 0, l2, 0) * y(big, mm, &d) - s1).norm());
                        err[1] = err[1].max((c(l2, 0, l1, 0, big, 0) * y(big, mm, &d) - s2).norm());
                    }
                }
                for m1 in -l1..=l1 {
                    for m2 in -l2..=l2 {
                        let (mut s3, mut s4) = (Complex64::default(), Complex64::default());
                        for big in 0..=l1 + l2 {
                            if (m1 + m2).abs() <= big {
                                s3 += y(big, m1 + m2, &d) * c(big, m1 + m2, l1, m1, l2, m2) * c(big, 0, l1, 0, l2, 0);
                            }
                            let mm = m1 - m2;
                            if mm.abs() <= big {
                                s4 += y(big, mm, &d)
                                    * ((2 * big + 1) as f64 / (2 * l1 + 1) as f64)
                                    * c(l1, m1, l2, m2, big, mm)
                                    * c(l1, 0, l2, 0, big, 0);
                            }
                        }
                        err[2] = err[2].max((y(l1, m1, &d) * y(l2, m2, &d) - s3).norm());
                        // the conjugate sits on the second factor; with it on the first, the
                        // azimuthal orders of the two sides disagree
                        err[3] = err[3].max((y(l1, m1, &d) * y(l2, m2, &d).conj() - s4).norm());
                    }
                }
            }
        }
    }
    err
}

/// `D^j(g) conj(Y^j(R_g^T n)) = conj(Y^j(n))` together with
/// `D^j_{n0}(gamma, beta, 0) = conj(Y^j_n(R_g e_z))`.
pub fn sh_rotation(trials: u64) -> f64 {
    let mut err: f64 = 0.0;
    let mut r = rng(400);
    for t in 0..trials {
        let g = random_euler(500 + t);
        let n = sphere_dir(r.gen_range(0.0..PI), r.gen_range(-PI..PI));
        let back = g.rotation_matrix().transpose() * n;
        let column = EulerZYZ::new(g.gamma, g.beta, 0.0);
        let pole = g.rotation_matrix() * nalgebra::Vector3::z();
        for j in 0..=JMAX {
            let d = wigner_d_matrix(j, &g);
            let yr = nalgebra::DVector::from_iterator((2 * j + 1) as usize, sh_vector(j, &back).into_iter().map(|z| z.conj()));
            let lhs = &d * yr;
            for (a, b) in lhs.iter().zip(sh_vector(j, &n)) {
                err = err.max((a - b.conj()).norm());
            }
            let d0 = wigner_d_matrix(j, &column);
            for (k, yp) in sh_vector(j, &pole).iter().enumerate() {
                err = err.max((d0[(k, j as usize)] - yp.conj()).norm());
            }
        }
    }
    err
}

/// Closed-form triple integrals against the rotation-group quadrature.
pub fn triple_products() -> f64 {
    let q = so3_quadrature(6).unwrap();
    let mut err: f64 = 0.0;
    let ds: Vec<Vec<DMatrix<Complex64>>> = q.iter().map(|(g, _)| (0..=2).map(|j| wigner_d_matrix(j, g)).collect()).collect();
    for j in 0..=2i32 {
        for jp in 0..=2 {
            for l in 0..=2 {
                for n in -j..=j {
                    for m in -j..=j {
                        for np in -jp..=jp {
                            for mp in -jp..=jp {
                                let (kp, k) = (n - np, m - mp);
                                if kp.abs() > l || k.abs() > l {
                                    continue;
                                }
                                let mut s = Complex64::default();
                                for (qi, (_, w)) in q.iter().enumerate() {
                                    let d = &ds[qi];
                                    let e = |jj: i32, a: i32, b: i32| d[jj as usize][((a + jj) as usize, (b + jj) as usize)];
                                    s += e(j, n, m) * e(jp, np, mp).conj() * e(l, kp, k).conj() * *w;
                                }
                                err = err.max((s - triple_product_integral(j, n, m, jp, np, mp, l, kp, k)).norm());
                            }
                        }
                    }
                }
            }
        }
    }
    err
}

/// `(J^2 f)^j = -j(j+1) f^j` on a random field.
pub fn casimir_eigen() -> f64 {
    let f = random_sph(GridSpec::cube(3), 6, 6, Parity::All, 600);
    let g = apply_j_squared_s2(&f);
    let mut err: f64 = 0.0;
    for j in 0..=6 {
        for n in -j..=j {
            for v in 0..f.nvox() {
                err = err.max((g.get(j, n, v) + f.get(j, n, v) * (j * (j + 1)) as f64).norm());
            }
        }
    }
    err
}

/// `Tz^2 + (Tx^2 + Ty^2)` against the Laplacian stencil.
pub fn laplacian_split() -> f64 {
    let f = random_sph(GridSpec::cube(7), 4, 4, Parity::All, 700);
    let mut sum = apply_tz2_s2(&f).unwrap();
    sum.axpy(1.0, &apply_txy2_s2(&f).unwrap());
    sum.max_abs_diff(&laplace_operator(4, Parity::All).apply(&f).unwrap())
}
