use super::GridSpec;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Channel enumeration `(j, n, m)`, all `|n|, |m| <= j <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WignerLayout {
    pub l: usize,
}

impl WignerLayout {
    pub fn len(&self) -> usize {
        let l = self.l as i64;
        ((l + 1) * (2 * l + 1) * (2 * l + 3) / 3) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offset(j: i32) -> usize {
        let j = j as i64;
        (j * (2 * j - 1) * (2 * j + 1) / 3) as usize
    }

    pub fn index(&self, j: i32, n: i32, m: i32) -> Option<usize> {
        if j < 0 || j as usize > self.l || n.abs() > j || m.abs() > j {
            return None;
        }
        Some(Self::offset(j) + ((n + j) * (2 * j + 1) + (m + j)) as usize)
    }

    pub fn channels(&self) -> Vec<(i32, i32, i32)> {
        let mut v = Vec::with_capacity(self.len());
        for j in 0..=self.l as i32 {
            for n in -j..=j {
                for m in -j..=j {
                    v.push((j, n, m));
                }
            }
        }
        v
    }
}

/// Grid of Wigner coefficients `f^j_{nm}(r)`, channel-planar.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: GridSpec,
    pub layout: WignerLayout,
    pub data: Vec<Complex64>,
}

impl WignerField {
    pub fn zeros(grid: GridSpec, l: usize) -> Self {
        let layout = WignerLayout { l };
        Self { grid, layout, data: vec![Complex64::default(); layout.len() * grid.nvox()] }
    }

    pub fn l(&self) -> usize {
        self.layout.l
    }

    pub fn nvox(&self) -> usize {
        self.grid.nvox()
    }

    pub fn n_channels(&self) -> usize {
        self.layout.len()
    }

    pub fn get(&self, j: i32, n: i32, m: i32, voxel: usize) -> Complex64 {
        match self.layout.index(j, n, m) {
            Some(c) => self.data[c * self.nvox() + voxel],
            None => Complex64::default(),
        }
    }

    pub fn set(&mut self, j: i32, n: i32, m: i32, voxel: usize, v: Complex64) {
        let c = self.layout.index(j, n, m).expect("channel outside layout");
        let nv = self.nvox();
        self.data[c * nv + voxel] = v;
    }

    pub fn channel(&self, c: usize) -> &[Complex64] {
        let n = self.nvox();
        &self.data[c * n..(c + 1) * n]
    }

    /// `L^2(SE(3))` inner product per unit voxel volume:
    /// `sum (2j+1)/(8 pi^2) f conj(g)`.
    pub fn inner(&self, other: &WignerField) -> Complex64 {
        let nv = self.nvox();
        let mut total = Complex64::default();
        for (c, (j, n, m)) in self.layout.channels().into_iter().enumerate() {
            if let Some(d) = other.layout.index(j, n, m) {
                let s: Complex64 =
                    self.data[c * nv..(c + 1) * nv].iter().zip(&other.data[d * nv..(d + 1) * nv]).map(|(x, y)| x * y.conj()).sum();
                total += s * ((2 * j + 1) as f64 / (8.0 * PI * PI));
            }
        }
        total
    }

    pub fn axpy(&mut self, a: Complex64, other: &WignerField) {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        self.data.iter_mut().zip(&other.data).for_each(|(x, y)| *x += y * a);
    }

    pub fn max_abs_diff(&self, other: &WignerField) -> f64 {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_dense() {
        let lay = WignerLayout { l: 4 };
        assert_eq!(lay.len(), 1 + 9 + 25 + 49 + 81);
        for (c, (j, n, m)) in lay.channels().into_iter().enumerate() {
            assert_eq!(lay.index(j, n, m), Some(c));
        }
    }
}
