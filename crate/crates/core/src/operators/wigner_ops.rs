use super::channel_op::{Basis, ChannelOp};
use crate::fields::{WignerField, WignerLayout};
use crate::harmonics::cg_or_zero;
use crate::{Error, Result};
use num_complex::Complex64;

/// Linear operator on Wigner coefficient fields of one band limit.
#[derive(Debug, Clone)]
pub struct WignerOperator {
    pub layout: WignerLayout,
    pub op: ChannelOp,
}

impl WignerOperator {
    pub fn zero(l: usize) -> Self {
        let layout = WignerLayout { l };
        Self { layout, op: ChannelOp::new(layout.len(), layout.len()) }
    }

    pub fn apply(&self, f: &WignerField) -> Result<WignerField> {
        if f.layout != self.layout {
            return Err(Error::Contract("field band limit does not match operator".into()));
        }
        let data = self.op.apply(&f.data, &f.grid)?;
        Ok(WignerField { grid: f.grid, layout: self.layout, data })
    }

    /// `self o other`.
    pub fn compose(&self, other: &WignerOperator) -> WignerOperator {
        WignerOperator { layout: self.layout, op: self.op.compose(&other.op) }
    }

    pub fn add_scaled(&mut self, other: &WignerOperator, s: Complex64) {
        self.op.add_scaled(&other.op, s);
    }

    fn add(&mut self, out: (i32, i32, i32), inp: (i32, i32, i32), b: Basis, w: Complex64) {
        if let (Some(o), Some(i)) = (self.layout.index(out.0, out.1, out.2), self.layout.index(inp.0, inp.1, inp.2)) {
            self.op.add(o, i, b, w);
        }
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(J_z f)^j_{nm} = i m f^j_{nm}`.
pub fn jz_operator(l: usize) -> WignerOperator {
    let mut op = WignerOperator::zero(l);
    for (j, n, m) in op.layout.channels() {
        op.add((j, n, m), (j, n, m), Basis::Id, Complex64::new(0.0, m as f64));
    }
    op
}

/// `(J_{+-1} f)^j_{nm} = -i sqrt(j(j+1)/2 - m(m+-1)/2) f^j_{n,m+-1}`.
pub fn jpm_operator(l: usize, sign: i32) -> WignerOperator {
    assert!(sign == 1 || sign == -1, "sign must be +-1");
    let mut op = WignerOperator::zero(l);
    for (j, n, m) in op.layout.channels() {
        let src = m + sign;
        if src.abs() > j {
            continue;
        }
        let f = ((j * (j + 1)) as f64 / 2.0 - (m * src) as f64 / 2.0).sqrt();
        op.add((j, n, m), (j, n, src), Basis::Id, Complex64::new(0.0, -f));
    }
    op
}

pub fn jsq_wigner_operator(l: usize) -> WignerOperator {
    let mut op = WignerOperator::zero(l);
    for (j, n, m) in op.layout.channels() {
        op.add((j, n, m), (j, n, m), Basis::Id, re(-(j * (j + 1)) as f64));
    }
    op
}

/// `(T_k f)^j_{nm} = sum (2j'+1)/(2j+1) <jn|j'n',1q> <jm|j'm',1k> d^1_q f^{j'}_{n'm'}`.
pub fn tk_operator(l: usize, k: i32) -> WignerOperator {
    assert!(k.abs() <= 1, "k must be in -1..=1");
    let mut op = WignerOperator::zero(l);
    for (j, n, m) in op.layout.channels() {
        for jp in (j - 1).max(0)..=j + 1 {
            for q in -1..=1 {
                let (np, mp) = (n - q, m - k);
                if np.abs() > jp || mp.abs() > jp {
                    continue;
                }
                let w = (2 * jp + 1) as f64 / (2 * j + 1) as f64 * cg_or_zero(j, n, jp, np, 1, q) * cg_or_zero(j, m, jp, mp, 1, k);
                if w != 0.0 {
                    op.add((j, n, m), (jp, np, mp), Basis::D1(q as i8), re(w));
                }
            }
        }
    }
    op
}

/// `conj(T_{k'}) T_k = (Delta/3) delta_{kk'} + (-1)^{k'} sqrt(2/3) <2K|1(-k'),1k>
///  sum (2j'+1)/(2j+1) <jn|j'n',2q> <jm|j'm',2K> d^2_q f^{j'}_{n',m-K}`, `K = k - k'`.
pub fn tt_operator(l: usize, k: i32, kp: i32) -> WignerOperator {
    assert!(k.abs() <= 1 && kp.abs() <= 1, "k, k' must be in -1..=1");
    let mut op = WignerOperator::zero(l);
    let big_k = k - kp;
    let sign = if kp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let pre = sign * (2.0f64 / 3.0).sqrt() * cg_or_zero(2, big_k, 1, -kp, 1, k);
    for (j, n, m) in op.layout.channels() {
        if k == kp {
            op.add((j, n, m), (j, n, m), Basis::Lap, re(1.0 / 3.0));
        }
        if pre == 0.0 {
            continue;
        }
        for jp in (j - 2).max(0)..=j + 2 {
            for q in -2..=2 {
                let (np, mp) = (n - q, m - big_k);
                if np.abs() > jp || mp.abs() > jp {
                    continue;
                }
                let w =
                    pre * (2 * jp + 1) as f64 / (2 * j + 1) as f64 * cg_or_zero(j, n, jp, np, 2, q) * cg_or_zero(j, m, jp, mp, 2, big_k);
                if w != 0.0 {
                    op.add((j, n, m), (jp, np, mp), Basis::D2(q as i8), re(w));
                }
            }
        }
    }
    op.op.prune();
    op
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedVariant {
    /// `T_{-s} J_{s}`: ladder first, then translation.
    TJ,
    /// `J_{s} T_{-s}`: translation first, then ladder.
    JT,
}

/// Mixed products `T_{-+1} J_{+-1}` and `J_{+-1} T_{-+1}`.
pub fn mixed_operator(l: usize, variant: MixedVariant, sign: i32) -> WignerOperator {
    let t = tk_operator(l, -sign);
    let j = jpm_operator(l, sign);
    match variant {
        MixedVariant::TJ => t.compose(&j),
        MixedVariant::JT => j.compose(&t),
    }
}

pub fn apply_jz(f: &WignerField) -> WignerField {
    jz_operator(f.l()).apply(f).expect("algebraic operator")
}

pub fn apply_jpm(f: &WignerField, sign: i32) -> WignerField {
    jpm_operator(f.l(), sign).apply(f).expect("algebraic operator")
}

pub fn apply_j_squared(f: &WignerField) -> WignerField {
    jsq_wigner_operator(f.l()).apply(f).expect("algebraic operator")
}

pub fn apply_tk(f: &WignerField, k: i32) -> Result<WignerField> {
    tk_operator(f.l(), k).apply(f)
}

pub fn apply_tt(f: &WignerField, k: i32, kp: i32) -> Result<WignerField> {
    tt_operator(f.l(), k, kp).apply(f)
}

pub fn apply_mixed_tj(f: &WignerField, variant: MixedVariant, sign: i32) -> Result<WignerField> {
    mixed_operator(f.l(), variant, sign).apply(f)
}
