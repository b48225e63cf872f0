use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Regular isotropic voxel grid, x fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: [usize; 3],
    pub voxel_size: f64,
}

impl GridSpec {
    pub fn new(dims: [usize; 3], voxel_size: f64) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Contract(format!("grid dims {dims:?} must be positive")));
        }
        if !(voxel_size > 0.0 && voxel_size.is_finite()) {
            return Err(Error::Contract(format!("voxel size {voxel_size} must be positive")));
        }
        Ok(Self { dims, voxel_size })
    }

    pub fn cube(n: usize) -> Self {
        Self { dims: [n, n, n], voxel_size: 1.0 }
    }

    pub fn nvox(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn coords(&self, i: usize) -> [usize; 3] {
        let x = i % self.dims[0];
        let y = (i / self.dims[0]) % self.dims[1];
        [x, y, i / (self.dims[0] * self.dims[1])]
    }

    /// Stride of an axis in the flat index.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.dims[0],
            _ => self.dims[0] * self.dims[1],
        }
    }

    /// Axes of size 1 are treated as flat (derivative zero); size 2 cannot
    /// host a centered stencil.
    pub fn check_stencil(&self) -> Result<()> {
        for (axis, &size) in self.dims.iter().enumerate() {
            if size == 2 {
                return Err(Error::GridTooSmall { axis, size });
            }
        }
        Ok(())
    }

    /// Voxels at least `margin` away from every non-flat face.
    pub fn is_interior(&self, i: usize, margin: usize) -> bool {
        let c = self.coords(i);
        (0..3).all(|a| self.dims[a] == 1 || (c[a] >= margin && c[a] + margin < self.dims[a]))
    }
}
