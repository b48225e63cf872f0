use super::{DirectionSet, GridSpec, Parity, SphLayout, SphericalField};
use crate::harmonics::{lm_index, sh_all};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Per-voxel function values on a direction set, `data[dir * nvox + voxel]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: GridSpec,
    pub n_dirs: usize,
    pub data: Vec<Complex64>,
}

impl SampledField {
    pub fn zeros(grid: GridSpec, n_dirs: usize) -> Self {
        Self { grid, n_dirs, data: vec![Complex64::default(); n_dirs * grid.nvox()] }
    }

    pub fn from_real(grid: GridSpec, n_dirs: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n_dirs * grid.nvox());
        Self { grid, n_dirs, data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn get(&self, dir: usize, voxel: usize) -> Complex64 {
        self.data[dir * self.grid.nvox() + voxel]
    }

    pub fn voxel(&self, voxel: usize) -> Vec<Complex64> {
        let nv = self.grid.nvox();
        (0..self.n_dirs).map(|d| self.data[d * nv + voxel]).collect()
    }
}

/// Synthesis matrix `(2j+1)/(8 pi^2) Y^j_n(d_i)` and its pseudo-inverse.
#[derive(Debug, Clone)]
pub struct Projector {
    pub layout: SphLayout,
    pub synthesis: DMatrix<Complex64>,
    pub pinv: DMatrix<Complex64>,
}

impl Projector {
    pub fn new(dirs: &DirectionSet, l: usize, parity: Parity) -> Result<Self> {
        let layout = SphLayout::new(l, parity);
        let nb = layout.len();
        if dirs.len() < nb {
            return Err(Error::Underdetermined { directions: dirs.len(), basis: nb });
        }
        let synthesis = synthesis_matrix(dirs, layout);
        let pinv = synthesis.clone().pseudo_inverse(1e-12).map_err(|e| Error::Domain(format!("pseudo-inverse failed: {e}")))?;
        Ok(Self { layout, synthesis, pinv })
    }

    /// Coefficients of one voxel from its samples.
    pub fn project_voxel(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(samples);
        (&self.pinv * v).iter().copied().collect()
    }

    pub fn evaluate_voxel(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(coeffs);
        (&self.synthesis * v).iter().copied().collect()
    }

    pub fn project(&self, samples: &SampledField) -> SphericalField {
        let nv = samples.grid.nvox();
        // samples as an (nvox x ndirs) column-major matrix
        let s = DMatrix::from_column_slice(nv, samples.n_dirs, &samples.data);
        let c = s * self.pinv.transpose();
        SphericalField { grid: samples.grid, layout: self.layout, real: false, data: c.as_slice().to_vec() }
    }

    pub fn evaluate(&self, field: &SphericalField) -> SampledField {
        let field = if field.layout == self.layout {
            std::borrow::Cow::Borrowed(field)
        } else {
            std::borrow::Cow::Owned(field.relayout(self.layout.l, self.layout.parity))
        };
        let nv = field.nvox();
        let c = DMatrix::from_column_slice(nv, self.layout.len(), &field.data);
        let s = c * self.synthesis.transpose();
        SampledField { grid: field.grid, n_dirs: self.synthesis.nrows(), data: s.as_slice().to_vec() }
    }
}

pub fn synthesis_matrix(dirs: &DirectionSet, layout: SphLayout) -> DMatrix<Complex64> {
    let chans = layout.channels();
    let mut m = DMatrix::zeros(dirs.len(), chans.len());
    for (i, d) in dirs.directions.iter().enumerate() {
        let y = sh_all(layout.l as i32, d);
        for (c, &(j, n)) in chans.iter().enumerate() {
            m[(i, c)] = y[lm_index(j, n)] * ((2 * j + 1) as f64 / (8.0 * PI * PI));
        }
    }
    m
}

/// Coefficients `2 pi conj(Y^j_n(v))` of the delta at `v` truncated to the
/// layout; synthesis gives `sum (2j+1)/(4 pi) P_j(n . v)`.
pub fn band_limited_delta(layout: SphLayout, v: &nalgebra::Vector3<f64>) -> Vec<Complex64> {
    let y = sh_all(layout.l as i32, &v.normalize());
    layout.channels().into_iter().map(|(j, n)| y[lm_index(j, n)].conj() * (2.0 * PI)).collect()
}

/// Least-squares spherical harmonic coefficients of sampled data.
pub fn project_to_sh(samples: &SampledField, dirs: &DirectionSet, l: usize, parity: Parity) -> Result<SphericalField> {
    if samples.n_dirs != dirs.len() {
        return Err(Error::Contract("sample count does not match direction set".into()));
    }
    Ok(Projector::new(dirs, l, parity)?.project(samples))
}

/// Pointwise synthesis `(1/8 pi^2) sum (2j+1) Y^j_n f^j_n`.
pub fn evaluate_on_directions(field: &SphericalField, dirs: &DirectionSet) -> SampledField {
    let p = SphLayout::new(field.l(), field.parity());
    let synthesis = synthesis_matrix(dirs, p);
    let nv = field.nvox();
    let c = DMatrix::from_column_slice(nv, p.len(), &field.data);
    let s = c * synthesis.transpose();
    SampledField { grid: field.grid, n_dirs: dirs.len(), data: s.as_slice().to_vec() }
}
