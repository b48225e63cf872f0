use super::stencil::{central, second};
use crate::fields::GridSpec;
use crate::harmonics::{solid_harmonic_monomials, spherical_basis};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Spatial part of a term: identity, spherical derivative components
/// `d^1_q`, `d^2_q`, or the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Id,
    D1(i8),
    D2(i8),
    Lap,
}

impl Basis {
    fn first_order(self) -> bool {
        matches!(self, Basis::D1(_))
    }

    fn second_order(self) -> bool {
        matches!(self, Basis::D2(_) | Basis::Lap)
    }
}

/// Cartesian derivative volumes, in the order
/// `gx, gy, gz, dxx, dyy, dzz, dxy, dxz, dyz`.
const NCART: usize = 9;

/// Weights of a basis over the Cartesian derivative volumes.
pub fn cartesian_weights(b: Basis) -> [Complex64; NCART] {
    static TABLE: OnceLock<BTreeMap<Basis, [Complex64; NCART]>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut m = BTreeMap::new();
        let s = spherical_basis();
        for q in -1..=1i8 {
            let mut w = [Complex64::default(); NCART];
            for a in 0..3 {
                w[a] = s[((q + 1) as usize, a)];
            }
            m.insert(Basis::D1(q), w);
        }
        // d^2_q = conj(R^2_q)(grad)
        for q in -2..=2i8 {
            let mut w = [Complex64::default(); NCART];
            for t in solid_harmonic_monomials(2, q as i32) {
                let slot = match (t.px, t.py, t.pz) {
                    (2, 0, 0) => 3,
                    (0, 2, 0) => 4,
                    (0, 0, 2) => 5,
                    (1, 1, 0) => 6,
                    (1, 0, 1) => 7,
                    (0, 1, 1) => 8,
                    _ => unreachable!("degree-2 monomial"),
                };
                w[slot] += t.coeff.conj();
            }
            m.insert(Basis::D2(q), w);
        }
        let mut lap = [Complex64::default(); NCART];
        lap[3..6].fill(Complex64::new(1.0, 0.0));
        m.insert(Basis::Lap, lap);
        m
    });
    t[&b]
}

/// Sparse linear map between channel-planar coefficient volumes:
/// `out[c] += w * B(in[c'])` for every stored `(c', B) -> (c, w)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelOp {
    pub n_in: usize,
    pub n_out: usize,
    terms: BTreeMap<(usize, Basis), BTreeMap<usize, Complex64>>,
}

impl ChannelOp {
    pub fn new(n_in: usize, n_out: usize) -> Self {
        Self { n_in, n_out, terms: BTreeMap::new() }
    }

    pub fn add(&mut self, out: usize, inp: usize, basis: Basis, w: Complex64) {
        assert!(out < self.n_out && inp < self.n_in, "channel out of range");
        if w == Complex64::default() {
            return;
        }
        *self.terms.entry((inp, basis)).or_default().entry(out).or_default() += w;
    }

    pub fn add_scaled(&mut self, other: &ChannelOp, s: Complex64) {
        assert_eq!((self.n_in, self.n_out), (other.n_in, other.n_out));
        for (&(inp, b), outs) in &other.terms {
            for (&o, &w) in outs {
                self.add(o, inp, b, w * s);
            }
        }
    }

    /// Drops exactly cancelled terms.
    pub fn prune(&mut self) {
        for outs in self.terms.values_mut() {
            outs.retain(|_, w| *w != Complex64::default());
        }
        self.terms.retain(|_, outs| !outs.is_empty());
    }

    pub fn n_terms(&self) -> usize {
        self.terms.values().map(|m| m.len()).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Basis, Complex64)> + '_ {
        self.terms.iter().flat_map(|(&(inp, b), outs)| outs.iter().map(move |(&o, &w)| (o, inp, b, w)))
    }

    pub fn needs_stencil(&self) -> bool {
        self.terms.keys().any(|(_, b)| *b != Basis::Id)
    }

    /// `self o other` (apply `other` first). At least one factor must be
    /// purely algebraic (identity basis only).
    pub fn compose(&self, other: &ChannelOp) -> ChannelOp {
        assert_eq!(other.n_out, self.n_in, "composition size mismatch");
        assert!(!self.needs_stencil() || !other.needs_stencil(), "composition of two differential operators is not representable");
        let mut by_in: BTreeMap<usize, Vec<(usize, Basis, Complex64)>> = BTreeMap::new();
        for (o, i, b, w) in self.terms() {
            by_in.entry(i).or_default().push((o, b, w));
        }
        let mut out = ChannelOp::new(other.n_in, self.n_out);
        for (mid, i, b1, w1) in other.terms() {
            if let Some(list) = by_in.get(&mid) {
                for &(o, b2, w2) in list {
                    let b = if b1 == Basis::Id { b2 } else { b1 };
                    out.add(o, i, b, w1 * w2);
                }
            }
        }
        out.prune();
        out
    }

    pub fn apply(&self, input: &[Complex64], grid: &GridSpec) -> Result<Vec<Complex64>> {
        let nv = grid.nvox();
        if input.len() != self.n_in * nv {
            return Err(Error::Contract("input size does not match operator".into()));
        }
        if self.needs_stencil() {
            grid.check_stencil()?;
        }
        let mut out = vec![Complex64::default(); self.n_out * nv];
        let mut cart: Vec<Vec<Complex64>> = Vec::new();
        let mut basis_vol = vec![Complex64::default(); nv];
        let mut current = usize::MAX;
        let mut have_first = false;
        let mut have_second = false;
        // terms are sorted by input channel, then basis
        for (&(inp, b), outs) in &self.terms {
            let src = &input[inp * nv..(inp + 1) * nv];
            if inp != current {
                current = inp;
                have_first = false;
                have_second = false;
            }
            let need_first = b.first_order() || b.second_order();
            if need_first && !have_first {
                if cart.is_empty() {
                    cart = vec![vec![Complex64::default(); nv]; NCART];
                }
                for (a, out) in cart.iter_mut().take(3).enumerate() {
                    central(src, out, grid, a);
                }
                have_first = true;
            }
            if b.second_order() && !have_second {
                for a in 0..3 {
                    second(src, &mut cart[3 + a], grid, a);
                }
                let (first, rest) = cart.split_at_mut(3);
                // dxy = Cx(gy), dxz = Cx(gz), dyz = Cy(gz)
                central(&first[1], &mut rest[3], grid, 0);
                central(&first[2], &mut rest[4], grid, 0);
                central(&first[2], &mut rest[5], grid, 1);
                have_second = true;
            }
            let vol: &[Complex64] = if b == Basis::Id {
                src
            } else {
                let w = cartesian_weights(b);
                let nz: Vec<(Complex64, &[Complex64])> =
                    w.iter().enumerate().filter(|(_, wk)| **wk != Complex64::default()).map(|(k, wk)| (*wk, cart[k].as_slice())).collect();
                basis_vol.par_chunks_mut(4096).enumerate().for_each(|(c, chunk)| {
                    let (o, len) = (c * 4096, chunk.len());
                    chunk.fill(Complex64::default());
                    for (wk, vol) in &nz {
                        for (x, s) in chunk.iter_mut().zip(&vol[o..o + len]) {
                            *x += wk * s;
                        }
                    }
                });
                &basis_vol
            };
            for (&o, &w) in outs {
                out[o * nv..(o + 1) * nv]
                    .par_chunks_mut(4096)
                    .zip(vol.par_chunks(4096))
                    .for_each(|(y, x)| y.iter_mut().zip(x).for_each(|(y, x)| *y += w * x));
            }
        }
        Ok(out)
    }
}
