use crate::fields::GridSpec;
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// Finite-difference kernels with zero padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kernel {
    CentralX,
    CentralY,
    CentralZ,
    Dxx,
    Dyy,
    Dzz,
    Dxy,
    Dxz,
    Dyz,
}

pub trait Sample: Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T> Sample for T where T: Copy + Default + Send + Sync + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

pub fn fd_apply<T: Sample>(kernel: Kernel, volume: &[T], grid: &GridSpec) -> Result<Vec<T>> {
    grid.check_stencil()?;
    assert_eq!(volume.len(), grid.nvox(), "volume size does not match grid");
    let mut out = vec![T::default(); volume.len()];
    match kernel {
        Kernel::CentralX => central(volume, &mut out, grid, 0),
        Kernel::CentralY => central(volume, &mut out, grid, 1),
        Kernel::CentralZ => central(volume, &mut out, grid, 2),
        Kernel::Dxx => second(volume, &mut out, grid, 0),
        Kernel::Dyy => second(volume, &mut out, grid, 1),
        Kernel::Dzz => second(volume, &mut out, grid, 2),
        Kernel::Dxy => cross(volume, &mut out, grid, 0, 1),
        Kernel::Dxz => cross(volume, &mut out, grid, 0, 2),
        Kernel::Dyz => cross(volume, &mut out, grid, 1, 2),
    }
    Ok(out)
}

/// Row of `src` at `(y, z)`, or `None` outside the grid.
#[inline]
fn row<'a, T>(src: &'a [T], grid: &GridSpec, y: isize, z: isize) -> Option<&'a [T]> {
    let [nx, ny, nz] = grid.dims;
    if y < 0 || z < 0 || y as usize >= ny || z as usize >= nz {
        return None;
    }
    let o = nx * (y as usize + ny * z as usize);
    Some(&src[o..o + nx])
}

/// Shared driver: `out = (up*a + centre*b + down*a') * f` along an axis,
/// where `up`/`down` are the neighbours at `+-1` (zero outside).
fn three_point<T: Sample>(src: &[T], dst: &mut [T], grid: &GridSpec, axis: usize, wu: f64, wc: f64, wd: f64) {
    let [nx, ny, _] = grid.dims;
    let plane = nx * ny;
    dst.par_chunks_mut(plane).enumerate().for_each(|(z, out)| {
        let z = z as isize;
        for y in 0..ny as isize {
            let o = &mut out[nx * y as usize..nx * (y as usize + 1)];
            let c = row(src, grid, y, z).unwrap();
            match axis {
                0 => {
                    for x in 0..nx {
                        let up = if x + 1 < nx { c[x + 1] } else { T::default() };
                        let dn = if x > 0 { c[x - 1] } else { T::default() };
                        o[x] = up * wu + c[x] * wc + dn * wd;
                    }
                }
                _ => {
                    let (u, d) = if axis == 1 {
                        (row(src, grid, y + 1, z), row(src, grid, y - 1, z))
                    } else {
                        (row(src, grid, y, z + 1), row(src, grid, y, z - 1))
                    };
                    for x in 0..nx {
                        let mut v = c[x] * wc;
                        if let Some(u) = u {
                            v = v + u[x] * wu;
                        }
                        if let Some(d) = d {
                            v = v + d[x] * wd;
                        }
                        o[x] = v;
                    }
                }
            }
        }
    });
}

/// `(u[i+1] - u[i-1]) / 2h` along `axis`.
pub(crate) fn central<T: Sample>(src: &[T], dst: &mut [T], grid: &GridSpec, axis: usize) {
    if grid.dims[axis] == 1 {
        dst.iter_mut().for_each(|v| *v = T::default());
        return;
    }
    let f = 0.5 / grid.voxel_size;
    three_point(src, dst, grid, axis, f, 0.0, -f);
}

/// `(u[i+1] - 2u[i] + u[i-1]) / h^2` along `axis`.
pub(crate) fn second<T: Sample>(src: &[T], dst: &mut [T], grid: &GridSpec, axis: usize) {
    if grid.dims[axis] == 1 {
        dst.iter_mut().for_each(|v| *v = T::default());
        return;
    }
    let f = 1.0 / (grid.voxel_size * grid.voxel_size);
    three_point(src, dst, grid, axis, f, -2.0 * f, f);
}

/// Mixed derivative with corner weights `+-1/4`; equal to the composition
/// of the two central differences under zero padding.
pub(crate) fn cross<T: Sample>(src: &[T], dst: &mut [T], grid: &GridSpec, a: usize, b: usize) {
    let mut tmp = vec![T::default(); src.len()];
    central(src, &mut tmp, grid, b);
    central(&tmp, dst, grid, a);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(grid: &GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        (0..grid.nvox())
            .map(|i| {
                let [x, y, z] = grid.coords(i);
                f(x as f64, y as f64, z as f64)
            })
            .collect()
    }

    #[test]
    fn exact_on_polynomials() {
        let g = GridSpec::new([5, 6, 7], 1.0).unwrap();
        let z = ramp(&g, |_, _, z| z);
        let x2 = ramp(&g, |x, _, _| x * x);
        let xy = ramp(&g, |x, y, _| x * y);
        let dz = fd_apply(Kernel::CentralZ, &z, &g).unwrap();
        let dxx = fd_apply(Kernel::Dxx, &x2, &g).unwrap();
        let dxy = fd_apply(Kernel::Dxy, &xy, &g).unwrap();
        for i in 0..g.nvox() {
            if g.is_interior(i, 1) {
                assert!((dz[i] - 1.0).abs() < 1e-14);
                assert!((dxx[i] - 2.0).abs() < 1e-14);
                assert!((dxy[i] - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cross_kernel_corners() {
        let g = GridSpec::cube(3);
        let mut imp = vec![0.0; 27];
        imp[g.index(1, 1, 1)] = 1.0;
        let k = fd_apply(Kernel::Dxy, &imp, &g).unwrap();
        // response to an impulse is the mirrored kernel
        assert_eq!(k[g.index(0, 0, 1)], 0.25);
        assert_eq!(k[g.index(2, 2, 1)], 0.25);
        assert_eq!(k[g.index(0, 2, 1)], -0.25);
        assert_eq!(k[g.index(2, 0, 1)], -0.25);
        assert_eq!(k.iter().filter(|v| **v != 0.0).count(), 4);
    }

    #[test]
    fn voxel_size_scaling_and_flat_axes() {
        let g = GridSpec::new([5, 5, 1], 2.0).unwrap();
        let x = ramp(&g, |x, _, _| 2.0 * x);
        let dx = fd_apply(Kernel::CentralX, &x, &g).unwrap();
        assert!((dx[g.index(2, 2, 0)] - 1.0).abs() < 1e-15);
        let dz = fd_apply(Kernel::CentralZ, &x, &g).unwrap();
        assert!(dz.iter().all(|v| *v == 0.0));
        assert!(fd_apply(Kernel::CentralX, &[0.0; 8], &GridSpec::new([2, 2, 2], 1.0).unwrap()).is_err());
    }
}
