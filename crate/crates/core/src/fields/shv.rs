//! SHV container: little-endian header (`"SHV1"`, u32 nx, ny, nz, f64 voxel
//! size, u32 L, u32 flags) followed by channels of `(re, im)` f64 pairs, x
//! fastest. Flags: bit0 even-only, bit1 real-packed, bit2 Wigner-full.
//! Several records may be concatenated into a stack.

use super::{GridSpec, PackedField, Parity, SphLayout, SphericalField, WignerField, WignerLayout};
use crate::{Error, Result};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

pub const FLAG_EVEN: u32 = 1;
pub const FLAG_PACKED: u32 = 2;
pub const FLAG_WIGNER: u32 = 4;
const MAGIC: &[u8; 4] = b"SHV1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShvHeader {
    pub grid: GridSpec,
    pub l: u32,
    pub flags: u32,
}

impl ShvHeader {
    pub fn channel_count(&self) -> usize {
        let l = self.l as usize;
        if self.flags & FLAG_WIGNER != 0 {
            WignerLayout { l }.len()
        } else if self.flags & FLAG_PACKED != 0 {
            super::packed_len(l)
        } else if self.flags & FLAG_EVEN != 0 {
            SphLayout::new(l, Parity::Even).len()
        } else {
            SphLayout::new(l, Parity::All).len()
        }
    }

    pub fn payload_bytes(&self) -> usize {
        self.channel_count() * self.grid.nvox() * 16
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShvRecord {
    Spherical(SphericalField),
    Packed(PackedField),
    Wigner(WignerField),
}

impl ShvRecord {
    pub fn header(&self) -> ShvHeader {
        match self {
            ShvRecord::Spherical(f) => {
                ShvHeader { grid: f.grid, l: f.l() as u32, flags: if f.parity() == Parity::Even { FLAG_EVEN } else { 0 } }
            }
            ShvRecord::Packed(p) => ShvHeader { grid: p.grid, l: p.l as u32, flags: FLAG_EVEN | FLAG_PACKED },
            ShvRecord::Wigner(w) => ShvHeader { grid: w.grid, l: w.l() as u32, flags: FLAG_WIGNER },
        }
    }

    fn data(&self) -> &[Complex64] {
        match self {
            ShvRecord::Spherical(f) => &f.data,
            ShvRecord::Packed(p) => &p.data,
            ShvRecord::Wigner(w) => &w.data,
        }
    }
}

/// Scalar volume stored as an `L = 0` field.
pub fn scalar_record(grid: GridSpec, values: &[f64]) -> ShvRecord {
    let mut f = SphericalField::zeros(grid, 0, Parity::All);
    for (d, v) in f.data.iter_mut().zip(values) {
        *d = Complex64::new(*v, 0.0);
    }
    f.real = true;
    ShvRecord::Spherical(f)
}

pub fn write_record<W: Write>(w: &mut W, rec: &ShvRecord) -> Result<()> {
    let h = rec.header();
    let mut buf = Vec::with_capacity(32 + rec.data().len() * 16);
    buf.extend_from_slice(MAGIC);
    for d in h.grid.dims {
        buf.extend_from_slice(&(d as u32).to_le_bytes());
    }
    buf.extend_from_slice(&h.grid.voxel_size.to_le_bytes());
    buf.extend_from_slice(&h.l.to_le_bytes());
    buf.extend_from_slice(&h.flags.to_le_bytes());
    for v in rec.data() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_exact_or_eof<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<bool> {
    let mut got = 0;
    while got < buf.len() {
        let k = r.read(&mut buf[got..])?;
        if k == 0 {
            if got == 0 {
                return Ok(false);
            }
            return Err(Error::Format("truncated SHV record".into()));
        }
        got += k;
    }
    Ok(true)
}

pub fn read_header<R: Read>(r: &mut R) -> Result<Option<ShvHeader>> {
    let mut h = [0u8; 32];
    if !read_exact_or_eof(r, &mut h)? {
        return Ok(None);
    }
    if &h[0..4] != MAGIC {
        return Err(Error::Format("bad SHV magic".into()));
    }
    let u = |o: usize| u32::from_le_bytes(h[o..o + 4].try_into().unwrap());
    let dims = [u(4) as usize, u(8) as usize, u(12) as usize];
    let voxel_size = f64::from_le_bytes(h[16..24].try_into().unwrap());
    let grid = GridSpec::new(dims, voxel_size).map_err(|e| Error::Format(e.to_string()))?;
    Ok(Some(ShvHeader { grid, l: u(24), flags: u(28) }))
}

pub fn read_record<R: Read>(r: &mut R) -> Result<Option<ShvRecord>> {
    let Some(h) = read_header(r)? else { return Ok(None) };
    let mut raw = vec![0u8; h.payload_bytes()];
    if !read_exact_or_eof(r, &mut raw)? && !raw.is_empty() {
        return Err(Error::Format("missing SHV payload".into()));
    }
    let data: Vec<Complex64> = raw
        .chunks_exact(16)
        .map(|c| Complex64::new(f64::from_le_bytes(c[0..8].try_into().unwrap()), f64::from_le_bytes(c[8..16].try_into().unwrap())))
        .collect();
    let l = h.l as usize;
    Ok(Some(if h.flags & FLAG_WIGNER != 0 {
        ShvRecord::Wigner(WignerField { grid: h.grid, layout: WignerLayout { l }, data })
    } else if h.flags & FLAG_PACKED != 0 {
        ShvRecord::Packed(PackedField { grid: h.grid, l, data })
    } else {
        let parity = if h.flags & FLAG_EVEN != 0 { Parity::Even } else { Parity::All };
        ShvRecord::Spherical(SphericalField { grid: h.grid, layout: SphLayout::new(l, parity), real: false, data })
    }))
}

pub fn write_stack(path: &Path, recs: &[ShvRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in recs {
        write_record(&mut f, r)?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_stack(path: &Path) -> Result<Vec<ShvRecord>> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    while let Some(r) = read_record(&mut f)? {
        out.push(r);
    }
    Ok(out)
}

pub fn read_headers(path: &Path) -> Result<Vec<ShvHeader>> {
    Ok(read_stack(path)?.iter().map(|r| r.header()).collect())
}

/// Real parts of the single channel of a scalar record.
pub fn scalar_values(rec: &ShvRecord) -> Result<(GridSpec, Vec<f64>)> {
    match rec {
        ShvRecord::Spherical(f) if f.l() == 0 => Ok((f.grid, f.data.iter().map(|v| v.re).collect())),
        _ => Err(Error::Format("expected a scalar (L = 0) volume".into())),
    }
}
