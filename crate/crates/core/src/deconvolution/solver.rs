use super::response::{FiberResponse, ResponseModel};
use crate::fields::{DirectionSet, GridSpec, Parity, Projector, SampledField, SphericalField};
use crate::operators::{fd_apply, t0_operator, Kernel, SphOperator};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Krylov scheme for the normal equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Krylov {
    /// Plain conjugate gradients.
    #[default]
    Cg,
    /// Conjugate residuals: same Krylov space, monotone residual norm.
    Cr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub lambda: f64,
    pub lambda_mask: f64,
    pub cg_iterations: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub response: ResponseModel,
    pub method: Krylov,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { lambda: 0.005, lambda_mask: 1.0, cg_iterations: 100, l: 8, response: ResponseModel::default(), method: Krylov::Cg }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda_mask >= 0.0) {
            return Err(Error::Config("lambda and lambda_mask must be non-negative".into()));
        }
        if self.l % 2 == 1 {
            return Err(Error::Config(format!("even-order FOD needs even L, got {}", self.l)));
        }
        Ok(())
    }
}

/// `A f = H H f - lambda T0 T0 f + lambda_mask (1 - w) f` on real even-order
/// fields.
#[derive(Debug, Clone)]
pub struct NormalOperator {
    pub resp: FiberResponse,
    pub lambda: f64,
    pub lambda_mask: f64,
    /// `1 - w_m` per voxel.
    pub background: Vec<f64>,
    t_even: SphOperator,
    t_all: SphOperator,
}

impl NormalOperator {
    pub fn new(resp: FiberResponse, l: usize, lambda: f64, lambda_mask: f64, mask: &[bool]) -> Result<Self> {
        if resp.c.len() < l + 1 {
            return Err(Error::MissingCoefficient(resp.c.len()));
        }
        let background = mask.iter().map(|&m| if m { 0.0 } else { 1.0 }).collect();
        Ok(Self { resp, lambda, lambda_mask, background, t_even: t0_operator(l, Parity::Even), t_all: t0_operator(l, Parity::All) })
    }

    pub fn apply_h(&self, f: &SphericalField) -> SphericalField {
        let mut out = f.clone();
        let nv = f.nvox();
        for (c, (j, _)) in f.layout.channels().into_iter().enumerate() {
            let cj = self.resp.c[j as usize];
            out.data[c * nv..(c + 1) * nv].iter_mut().for_each(|x| *x *= cj);
        }
        out
    }

    /// `T0 (T0 f)` restricted back to even orders.
    pub fn t0_squared(&self, f: &SphericalField) -> Result<SphericalField> {
        let t = self.t_even.apply(f)?;
        let tt = self.t_all.apply(&t)?;
        Ok(tt.relayout(f.l(), f.parity()))
    }

    pub fn apply(&self, f: &SphericalField) -> Result<SphericalField> {
        let mut out = self.apply_h(&self.apply_h(f));
        if self.lambda != 0.0 {
            out.axpy(-self.lambda, &self.t0_squared(f)?);
        }
        if self.lambda_mask != 0.0 {
            let nv = f.nvox();
            for c in 0..f.n_channels() {
                let src = &f.data[c * nv..(c + 1) * nv];
                let dst = &mut out.data[c * nv..(c + 1) * nv];
                for ((d, s), b) in dst.iter_mut().zip(src).zip(&self.background) {
                    *d += s * (self.lambda_mask * b);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct FodSolution {
    pub fod: SphericalField,
    /// Residual norm before the first and after every iteration.
    pub residuals: Vec<f64>,
}

impl FodSolution {
    /// Largest relative increase between consecutive residuals.
    pub fn max_residual_increase(&self) -> f64 {
        self.residuals.windows(2).map(|w| (w[1] - w[0]) / w[0].max(f64::MIN_POSITIVE)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Generic Krylov loop on any self-adjoint positive semidefinite operator.
/// Stops early once the residual drops below `1e-14` of the right-hand side.
pub fn krylov_solve<V: Clone>(
    b: &V,
    iterations: usize,
    method: Krylov,
    apply: impl Fn(&V) -> Result<V>,
    dot: impl Fn(&V, &V) -> f64,
    axpy: impl Fn(&mut V, f64, &V),
    zero: V,
) -> Result<(V, Vec<f64>)> {
    let mut x = zero;
    let mut r = b.clone();
    let mut p = r.clone();
    let bnorm = dot(b, b).sqrt();
    let mut residuals = vec![bnorm];
    if bnorm == 0.0 {
        return Ok((x, residuals));
    }
    let mut rr = dot(&r, &r);
    let mut ar = apply(&r)?;
    let mut ap = ar.clone();
    let mut rar = dot(&r, &ar);
    let mut best = bnorm;
    for step in 1..=iterations {
        let alpha = match method {
            Krylov::Cg => {
                ap = apply(&p)?;
                rr / dot(&p, &ap)
            }
            Krylov::Cr => rar / dot(&ap, &ap),
        };
        if !alpha.is_finite() {
            break;
        }
        // negative curvature: the operator is not positive semidefinite
        if alpha < 0.0 {
            return Err(Error::Divergence { step });
        }
        axpy(&mut x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        let rr_new = dot(&r, &r);
        let norm = rr_new.sqrt();
        residuals.push(norm);
        // CG residuals may rise legitimately; only CR's are monotone
        let runaway = method == Krylov::Cr && norm > 10.0 * best;
        if !norm.is_finite() || runaway {
            return Err(Error::Divergence { step });
        }
        best = best.min(norm);
        if norm <= 1e-14 * bnorm {
            break;
        }
        let beta = match method {
            Krylov::Cg => rr_new / rr,
            Krylov::Cr => {
                ar = apply(&r)?;
                let rar_new = dot(&r, &ar);
                let beta = rar_new / rar;
                rar = rar_new;
                beta
            }
        };
        rr = rr_new;
        // p = r + beta p
        let mut np = r.clone();
        axpy(&mut np, beta, &p);
        p = np;
        if method == Krylov::Cr {
            let mut nap = ar.clone();
            axpy(&mut nap, beta, &ap);
            ap = nap;
        }
    }
    Ok((x, residuals))
}

/// Even-order least-squares coefficients of the measured signal.
pub fn project_signal(signal: &SampledField, gradients: &DirectionSet, l: usize) -> Result<SphericalField> {
    let proj = Projector::new(gradients, l, Parity::Even)?;
    let mut s = proj.project(signal);
    s.real = true;
    Ok(s)
}

pub fn solve_fod(signal: &SampledField, gradients: &DirectionSet, mask: &[bool], cfg: &SolverConfig) -> Result<FodSolution> {
    cfg.validate()?;
    if mask.len() != signal.grid.nvox() {
        return Err(Error::Contract("mask size does not match grid".into()));
    }
    let s = project_signal(signal, gradients, cfg.l)?;
    let op = NormalOperator::new(cfg.response.coeffs(cfg.l), cfg.l, cfg.lambda, cfg.lambda_mask, mask)?;
    let b = op.apply_h(&s);
    let zero = SphericalField { real: true, ..SphericalField::zeros(s.grid, cfg.l, Parity::Even) };
    let (fod, residuals) =
        krylov_solve(&b, cfg.cg_iterations, cfg.method, |f| op.apply(f), |a, b| a.inner(b).re, |x, a, p| x.axpy(a, p), zero)?;
    Ok(FodSolution { fod, residuals })
}

/// Angular-discrete reference: the FOD lives on `fod_dirs` per voxel and the
/// same normal equations are assembled with a direction-pair kernel matrix
/// and per-direction finite differences.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub grid: GridSpec,
    pub n_dirs: usize,
    /// `values[dir * nvox + voxel]`
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// `K[i][k] = h(g_i . n_k) / (2 pi) * 4 pi / N`, matching the diagonal
/// response normalization.
pub fn kernel_matrix(model: &ResponseModel, rows: &DirectionSet, cols: &DirectionSet) -> Vec<Vec<f64>> {
    let w = 2.0 / cols.len() as f64;
    rows.directions.iter().map(|g| cols.directions.iter().map(|n| model.eval(g.dot(n)) * w).collect()).collect()
}

pub fn solve_fod_discrete(
    signal: &SampledField,
    gradients: &DirectionSet,
    mask: &[bool],
    cfg: &SolverConfig,
    fod_dirs: &DirectionSet,
) -> Result<DiscreteSolution> {
    cfg.validate()?;
    let grid = signal.grid;
    let nv = grid.nvox();
    let nd = fod_dirs.len();
    let ng = gradients.len();
    let k = kernel_matrix(&cfg.response, gradients, fod_dirs);
    let forward = |f: &[f64]| -> Vec<f64> {
        let mut s = vec![0.0; ng * nv];
        s.par_chunks_mut(nv).enumerate().for_each(|(i, out)| {
            for (d, kid) in k[i].iter().enumerate() {
                for (o, x) in out.iter_mut().zip(&f[d * nv..(d + 1) * nv]) {
                    *o += kid * x;
                }
            }
        });
        s
    };
    let adjoint = |s: &[f64]| -> Vec<f64> {
        let mut f = vec![0.0; nd * nv];
        f.par_chunks_mut(nv).enumerate().for_each(|(d, out)| {
            for (i, row) in k.iter().enumerate() {
                for (o, x) in out.iter_mut().zip(&s[i * nv..(i + 1) * nv]) {
                    *o += row[d] * x;
                }
            }
        });
        f
    };
    let t0 = |f: &[f64]| -> Result<Vec<f64>> {
        let mut out = vec![0.0; nd * nv];
        for (d, n) in fod_dirs.directions.iter().enumerate() {
            let src = &f[d * nv..(d + 1) * nv];
            let dst = &mut out[d * nv..(d + 1) * nv];
            for (kern, axis, w) in [(Kernel::CentralX, 0, n.x), (Kernel::CentralY, 1, n.y), (Kernel::CentralZ, 2, n.z)] {
                if w == 0.0 || grid.dims[axis] == 1 {
                    continue;
                }
                for (o, x) in dst.iter_mut().zip(fd_apply(kern, src, &grid)?) {
                    *o += w * x;
                }
            }
        }
        Ok(out)
    };
    let s: Vec<f64> = signal.data.iter().map(|z| z.re).collect();
    let b = adjoint(&s);
    let apply = |f: &Vec<f64>| -> Result<Vec<f64>> {
        let mut out = adjoint(&forward(f));
        if cfg.lambda != 0.0 {
            let tt = t0(&t0(f)?)?;
            out.iter_mut().zip(tt).for_each(|(o, t)| *o -= cfg.lambda * t);
        }
        if cfg.lambda_mask != 0.0 {
            for d in 0..nd {
                for v in 0..nv {
                    if !mask[v] {
                        out[d * nv + v] += cfg.lambda_mask * f[d * nv + v];
                    }
                }
            }
        }
        Ok(out)
    };
    let (values, residuals) = krylov_solve(
        &b,
        cfg.cg_iterations,
        cfg.method,
        apply,
        |a, b| a.iter().zip(b).map(|(x, y)| x * y).sum(),
        |x, a, p| x.iter_mut().zip(p).for_each(|(x, p)| *x += a * p),
        vec![0.0; nd * nv],
    )?;
    Ok(DiscreteSolution { grid, n_dirs: nd, values, residuals })
}
