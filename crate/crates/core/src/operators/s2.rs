use super::channel_op::{Basis, ChannelOp};
use crate::fields::{Parity, SphLayout, SphericalField};
use crate::harmonics::cg_or_zero;
use crate::{Error, Result};
use num_complex::Complex64;

/// Linear operator on spherical coefficient fields.
#[derive(Debug, Clone)]
pub struct SphOperator {
    pub in_layout: SphLayout,
    pub out_layout: SphLayout,
    pub op: ChannelOp,
}

impl SphOperator {
    pub fn zero(in_layout: SphLayout, out_layout: SphLayout) -> Self {
        Self { in_layout, out_layout, op: ChannelOp::new(in_layout.len(), out_layout.len()) }
    }

    pub fn apply(&self, f: &SphericalField) -> Result<SphericalField> {
        let owned;
        let f = if f.layout == self.in_layout {
            f
        } else {
            if f.l() > self.in_layout.l || (self.in_layout.parity == Parity::Even && f.parity() == Parity::All) {
                return Err(Error::Contract("field layout not covered by operator".into()));
            }
            owned = f.relayout(self.in_layout.l, self.in_layout.parity);
            &owned
        };
        let data = self.op.apply(&f.data, &f.grid)?;
        Ok(SphericalField { grid: f.grid, layout: self.out_layout, real: f.real, data })
    }

    pub fn add_scaled(&mut self, other: &SphOperator, s: f64) {
        assert_eq!((self.in_layout, self.out_layout), (other.in_layout, other.out_layout));
        self.op.add_scaled(&other.op, Complex64::new(s, 0.0));
    }

    fn add(&mut self, out: (i32, i32), inp: (i32, i32), b: Basis, w: f64) {
        if let (Some(o), Some(i)) = (self.out_layout.index(out.0, out.1), self.in_layout.index(inp.0, inp.1)) {
            self.op.add(o, i, b, Complex64::new(w, 0.0));
        }
    }
}

/// Weight `(2j'+1)/(2j+1) <j n | j' n', J q> <j 0 | j' 0, J 0>`, `q = n - n'`.
pub fn z_weight(big_j: i32, j: i32, jp: i32, n: i32, np: i32) -> f64 {
    (2 * jp + 1) as f64 / (2 * j + 1) as f64 * cg_or_zero(j, n, jp, np, big_j, n - np) * cg_or_zero(j, 0, jp, 0, big_j, 0)
}

/// Nonzero entries of the block `Z^J_{j j'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZBlock {
    pub big_j: i32,
    pub j: i32,
    pub jp: i32,
    /// `(n, n', q, weight)` with `n = n' + q`.
    pub entries: Vec<(i32, i32, i32, f64)>,
}

pub fn z_block(big_j: i32, j: i32, jp: i32) -> Result<ZBlock> {
    if !(1..=2).contains(&big_j) || j < 0 || jp < 0 || (j - jp).abs() > big_j {
        return Err(Error::Triangle { big_j, j, jp });
    }
    let mut entries = Vec::new();
    for n in -j..=j {
        for q in -big_j..=big_j {
            let np = n - q;
            if np.abs() > jp {
                continue;
            }
            let w = z_weight(big_j, j, jp, n, np);
            if w != 0.0 {
                entries.push((n, np, q, w));
            }
        }
    }
    Ok(ZBlock { big_j, j, jp, entries })
}

fn add_block(op: &mut SphOperator, big_j: i32, j: i32, jp: i32, scale: f64) {
    if jp < 0 || scale == 0.0 {
        return;
    }
    if !op.out_layout.has_order(j) || !op.in_layout.has_order(jp) {
        return;
    }
    let blk = z_block(big_j, j, jp).expect("valid block");
    for (n, np, q, w) in blk.entries {
        let b = if big_j == 1 { Basis::D1(q as i8) } else { Basis::D2(q as i8) };
        op.add((j, n), (jp, np), b, w * scale);
    }
}

fn add_diag(op: &mut SphOperator, j: i32, b: Basis, w: f64) {
    if w == 0.0 || !op.out_layout.has_order(j) || !op.in_layout.has_order(j) {
        return;
    }
    for n in -j..=j {
        op.add((j, n), (j, n), b, w);
    }
}

/// Output layout: odd orders appear unless the input is even-only and the
/// operator preserves parity.
fn layouts(l: usize, input: Parity, couples_parity: bool) -> (SphLayout, SphLayout) {
    let out = if couples_parity { Parity::All } else { input };
    (SphLayout::new(l, input), SphLayout::new(l, out))
}

/// `(T_0 f)^j = Z^1_{j,j+1} f^{j+1} + Z^1_{j,j-1} f^{j-1}`.
pub fn t0_operator(l: usize, input: Parity) -> SphOperator {
    let (i, o) = layouts(l, input, true);
    let mut op = SphOperator::zero(i, o);
    for j in o.orders() {
        add_block(&mut op, 1, j, j + 1, 1.0);
        add_block(&mut op, 1, j, j - 1, 1.0);
    }
    op
}

/// Convolution-weighted second-order operator:
/// `a_diag * Delta f^j + zs * sum_{j'} a(j, j') Z^2_{jj'} f^{j'}`.
fn quadratic(l: usize, input: Parity, lap: impl Fn(i32) -> f64, zs: f64, a: impl Fn(i32, i32) -> f64) -> SphOperator {
    let (i, o) = layouts(l, input, false);
    let mut op = SphOperator::zero(i, o);
    for j in o.orders() {
        add_diag(&mut op, j, Basis::Lap, lap(j));
        for jp in [j - 2, j, j + 2] {
            if jp >= 0 {
                add_block(&mut op, 2, j, jp, zs * a(j, jp));
            }
        }
    }
    op.op.prune();
    op
}

/// `T_z^2 = Delta/3 + (2/3) (Z^2_{j,j+2} + Z^2_{jj} + Z^2_{j,j-2})`.
pub fn tz2_operator(l: usize, input: Parity) -> SphOperator {
    quadratic(l, input, |_| 1.0 / 3.0, 2.0 / 3.0, |_, _| 1.0)
}

/// `T_x^2 + T_y^2 = 2 Delta/3 - (2/3) (same three blocks)`.
pub fn txy2_operator(l: usize, input: Parity) -> SphOperator {
    quadratic(l, input, |_| 2.0 / 3.0, -2.0 / 3.0, |_, _| 1.0)
}

pub fn laplace_operator(l: usize, input: Parity) -> SphOperator {
    quadratic(l, input, |_| 1.0, 0.0, |_, _| 0.0)
}

/// `-j(j+1)` on each order.
pub fn jsq_operator(l: usize, input: Parity) -> SphOperator {
    let (i, o) = layouts(l, input, false);
    let mut op = SphOperator::zero(i, o);
    for j in o.orders() {
        add_diag(&mut op, j, Basis::Id, -(j * (j + 1)) as f64);
    }
    op
}

/// Diagonal convolution `c_j f^j`.
pub fn diagonal_operator(l: usize, input: Parity, c: &[f64]) -> Result<SphOperator> {
    let (i, o) = layouts(l, input, false);
    let mut op = SphOperator::zero(i, o);
    for j in o.orders() {
        let cj = *c.get(j as usize).ok_or(Error::MissingCoefficient(j as usize))?;
        add_diag(&mut op, j, Basis::Id, cj);
    }
    Ok(op)
}

fn coeff(c: &[f64], j: i32) -> Result<f64> {
    if j < 0 {
        return Ok(0.0);
    }
    c.get(j as usize).copied().ok_or(Error::MissingCoefficient(j as usize))
}

fn check_coeffs(c: &[f64], need: usize) -> Result<()> {
    if c.len() < need + 1 {
        return Err(Error::MissingCoefficient(c.len()));
    }
    Ok(())
}

/// `C^T T_z^2 C` (`xy = false`) or `C^T (T_x^2 + T_y^2) C` (`xy = true`).
pub fn conv_outer_operator(l: usize, input: Parity, c: &[f64], xy: bool) -> Result<SphOperator> {
    check_coeffs(c, l)?;
    let (lap, zs) = if xy { (2.0 / 3.0, -2.0 / 3.0) } else { (1.0 / 3.0, 2.0 / 3.0) };
    Ok(quadratic(l, input, |j| lap * coeff(c, j).unwrap().powi(2), zs, |j, jp| coeff(c, j).unwrap() * coeff(c, jp).unwrap_or(0.0)))
}

/// Split of the two-step path `Z^1_{j,k} Z^1_{k,j}` (`k = j +- 1`) into
/// `alpha Delta + beta Z^2_{jj}`.
pub fn path_split(j: i32, up: bool) -> (f64, f64) {
    let d = 3.0 * (2 * j + 1) as f64;
    let jf = j as f64;
    if up {
        ((jf + 1.0) / d, (2.0 * jf - 1.0) / d)
    } else {
        (jf / d, (2.0 * jf + 3.0) / d)
    }
}

/// `T_z C^T C T_z`, written in three-block form with the path splits.
pub fn conv_inner_operator(l: usize, input: Parity, c: &[f64]) -> Result<SphOperator> {
    check_coeffs(c, l + 1)?;
    let (i, o) = layouts(l, input, false);
    let mut op = SphOperator::zero(i, o);
    for j in o.orders() {
        let up = coeff(c, j + 1)?.powi(2);
        let dn = coeff(c, j - 1)?.powi(2);
        let (au, bu) = path_split(j, true);
        let (ad, bd) = path_split(j, false);
        add_diag(&mut op, j, Basis::Lap, up * au + dn * ad);
        add_block(&mut op, 2, j, j, up * bu + dn * bd);
        add_block(&mut op, 2, j, j + 2, (2.0 / 3.0) * up);
        add_block(&mut op, 2, j, j - 2, (2.0 / 3.0) * dn);
    }
    op.op.prune();
    Ok(op)
}

pub fn apply_t0_s2(f: &SphericalField) -> Result<SphericalField> {
    t0_operator(f.l(), f.parity()).apply(f)
}

pub fn apply_tz2_s2(f: &SphericalField) -> Result<SphericalField> {
    tz2_operator(f.l(), f.parity()).apply(f)
}

pub fn apply_txy2_s2(f: &SphericalField) -> Result<SphericalField> {
    txy2_operator(f.l(), f.parity()).apply(f)
}

pub fn apply_j_squared_s2(f: &SphericalField) -> SphericalField {
    jsq_operator(f.l(), f.parity()).apply(f).expect("algebraic operator")
}

pub fn apply_h(f: &SphericalField, c: &[f64]) -> Result<SphericalField> {
    diagonal_operator(f.l(), f.parity(), c)?.apply(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolvedVariant {
    /// `C^T T_z^2 C`
    OuterZ,
    /// `C^T (T_x^2 + T_y^2) C`
    OuterXY,
    /// `T_z C^T C T_z`
    InnerZ,
}

pub fn apply_convolved_quadratic(f: &SphericalField, c: &[f64], variant: ConvolvedVariant) -> Result<SphericalField> {
    let op = match variant {
        ConvolvedVariant::OuterZ => conv_outer_operator(f.l(), f.parity(), c, false)?,
        ConvolvedVariant::OuterXY => conv_outer_operator(f.l(), f.parity(), c, true)?,
        ConvolvedVariant::InnerZ => conv_inner_operator(f.l(), f.parity(), c)?,
    };
    op.apply(f)
}
