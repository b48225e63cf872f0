use super::{GridSpec, Parity, SphericalField};
use crate::{Error, Result};
use num_complex::Complex64;

/// Real even-order field stored with `n >= 0` only: `(L+2)^2/4` complex
/// values per voxel for even `L`. Channel-planar, `j` then `n` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedField {
    pub grid: GridSpec,
    pub l: usize,
    pub data: Vec<Complex64>,
}

pub fn packed_len(l: usize) -> usize {
    (0..=l).step_by(2).map(|j| j + 1).sum()
}

fn residual_tol(field: &SphericalField) -> f64 {
    let scale = field.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    1e-9 * scale.max(1.0)
}

pub fn pack_real_even(field: &SphericalField) -> Result<PackedField> {
    if field.parity() != Parity::Even {
        return Err(Error::Flag("packing requires an even-only field".into()));
    }
    if !field.real {
        return Err(Error::Flag("packing requires a field flagged real".into()));
    }
    let res = field.real_symmetry_residual();
    if res > residual_tol(field) {
        return Err(Error::Flag(format!("field is not real-valued (residual {res:e})")));
    }
    let nv = field.nvox();
    let mut data = Vec::with_capacity(packed_len(field.l()) * nv);
    for j in field.layout.orders() {
        for n in 0..=j {
            let c = field.layout.index(j, n).unwrap();
            data.extend_from_slice(&field.data[c * nv..(c + 1) * nv]);
        }
    }
    Ok(PackedField { grid: field.grid, l: field.l(), data })
}

pub fn unpack_real_even(packed: &PackedField) -> SphericalField {
    let mut out = SphericalField::zeros(packed.grid, packed.l, Parity::Even);
    out.real = true;
    let nv = packed.grid.nvox();
    let mut k = 0;
    for j in (0..=packed.l as i32).step_by(2) {
        for n in 0..=j {
            let src = &packed.data[k * nv..(k + 1) * nv];
            let pos = out.layout.index(j, n).unwrap();
            out.data[pos * nv..(pos + 1) * nv].copy_from_slice(src);
            if n > 0 {
                let neg = out.layout.index(j, -n).unwrap();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                for (v, s) in out.data[neg * nv..(neg + 1) * nv].iter_mut().zip(src) {
                    *v = s.conj() * sign;
                }
            }
            k += 1;
        }
    }
    out
}
