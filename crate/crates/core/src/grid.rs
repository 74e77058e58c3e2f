//! Uniform periodic box discretization of R^d and real fields sampled on it.
//!
//! Axis `k` carries the coordinates `-L + j * dx`, `j = 0..N`, with `dx = 2L / N`.
//! Fields are stored row-major with axis 0 varying slowest.

use crate::error::{Error, Result};

/// Default threshold for the outer-shell mass fraction of a decayed field.
pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-8;

/// Relative thickness of the outer shell used by the decay invariant.
pub const DECAY_SHELL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    half_extent: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, half_extent: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis {n} must be a power of two >= 16"
            )));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidGrid(format!("half extent {half_extent} must be positive")));
        }
        Ok(Self { dim, n, half_extent })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.dx()
    }

    /// Axis stride in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Multi-index of a flat index; unused axes are zero.
    pub fn unflatten(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn flatten(&self, ijk: [usize; 3]) -> usize {
        (0..self.dim).fold(0, |acc, axis| acc * self.n + ijk[axis])
    }

    /// Physical position of a flat index; unused axes are zero.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unflatten(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coord(ijk[axis]);
        }
        x
    }

    /// Same grid with twice the resolution.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }

    pub fn sample<F: Fn([f64; 3]) -> f64>(&self, f: F) -> Field {
        let data = (0..self.len()).map(|i| f(self.point(i))).collect();
        Field { grid: *self, data }
    }

    pub fn zeros(&self) -> Field {
        Field { grid: *self, data: vec![0.0; self.len()] }
    }

    /// True when the axis-aligned box `[lo, hi]` fits inside the grid box shrunk by `margin`.
    pub fn contains_with_margin(&self, lo: [f64; 3], hi: [f64; 3], margin: f64) -> bool {
        (0..self.dim).all(|a| {
            lo[a] >= -self.half_extent + margin && hi[a] <= self.half_extent - margin
        })
    }
}

/// A real field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub(crate) grid: GridSpec,
    pub(crate) data: Vec<f64>,
}

impl Field {
    pub fn from_vec(grid: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} samples, grid needs {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Trapezoidal (equivalently, periodic rectangle) rule over the box.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_squared(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn dot(&self, other: &Field) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum::<f64>()
            * self.grid.cell_volume()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Field {
        Field { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Field, f: F) -> Field {
        Field {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Field {
        self.map(|v| alpha * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of squares of the samples lying in the outer shell `max |x_a| > (1 - DECAY_SHELL) L`.
    pub fn shell_mass(&self) -> f64 {
        let cut = (1.0 - DECAY_SHELL) * self.grid.half_extent;
        let mut acc = 0.0;
        for (i, v) in self.data.iter().enumerate() {
            let x = self.grid.point(i);
            if x[..self.grid.dim].iter().any(|c| c.abs() > cut) {
                acc += v * v;
            }
        }
        acc
    }

    pub fn sum_squares(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Field value at an arbitrary point by local tensor-product cubic
    /// Lagrange interpolation with periodic wrap.
    pub fn interpolate(&self, x: [f64; 3]) -> f64 {
        let g = &self.grid;
        let dx = g.dx();
        let n = g.n as isize;
        let mut base = [0isize; 3];
        let mut w = [[0.0f64; 4]; 3];
        for axis in 0..3 {
            if axis >= g.dim {
                w[axis] = [0.0, 1.0, 0.0, 0.0];
                continue;
            }
            let s = (x[axis] + g.half_extent) / dx;
            let j = s.floor();
            let t = s - j;
            base[axis] = j as isize - 1;
            w[axis] = cubic_weights(t);
        }
        let wrap = |j: isize| -> usize { j.rem_euclid(n) as usize };
        let mut acc = 0.0;
        let range = |axis: usize| if axis < g.dim { 0..4 } else { 1..2 };
        for a in range(0) {
            let ia = wrap(base[0] + a as isize);
            for b in range(1) {
                let ib = if g.dim > 1 { wrap(base[1] + b as isize) } else { 0 };
                for c in range(2) {
                    let ic = if g.dim > 2 { wrap(base[2] + c as isize) } else { 0 };
                    let weight = w[0][a] * w[1][b] * w[2][c];
                    if weight != 0.0 {
                        acc += weight * self.data[g.flatten([ia, ib, ic])];
                    }
                }
            }
        }
        acc
    }
}

/// Lagrange weights for nodes at -1, 0, 1, 2 evaluated at `t` in [0, 1).
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Outer-shell fraction of the combined discrete L² mass of several fields.
pub fn shell_fraction(fields: &[&Field]) -> f64 {
    let total: f64 = fields.iter().map(|f| f.sum_squares()).sum();
    if total == 0.0 {
        return 0.0;
    }
    fields.iter().map(|f| f.shell_mass()).sum::<f64>() / total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(2, 8, 1.0).is_err());
        assert!(GridSpec::new(2, 48, 1.0).is_err());
        assert!(GridSpec::new(4, 16, 1.0).is_err());
        assert!(GridSpec::new(1, 16, 0.0).is_err());
    }

    #[test]
    fn coordinates_and_spacing() {
        let g = GridSpec::new(2, 64, 3.0).unwrap();
        assert_eq!(g.dx() * g.n() as f64, 6.0);
        assert_eq!(g.coord(0), -3.0);
        assert!((g.coord(17) - (-3.0 + 17.0 * g.dx())).abs() < 1e-15);
        let idx = g.flatten([5, 9, 0]);
        assert_eq!(g.unflatten(idx), [5, 9, 0]);
        assert_eq!(g.point(idx)[1], g.coord(9));
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics_and_hits_nodes() {
        let g = GridSpec::new(2, 32, 4.0).unwrap();
        let f = g.sample(|x| 0.3 * x[0].powi(3) - x[0] * x[1] + 2.0 * x[1].powi(2));
        let p: [f64; 3] = [0.123, -0.77, 0.0];
        let exact: f64 = 0.3 * p[0].powi(3) - p[0] * p[1] + 2.0 * p[1].powi(2);
        assert!((f.interpolate(p) - exact).abs() < 1e-12);
        let node = g.point(g.flatten([10, 20, 0]));
        assert!((f.interpolate(node) - f.values()[g.flatten([10, 20, 0])]).abs() < 1e-12);
    }

    #[test]
    fn shell_fraction_detects_boundary_mass() {
        let g = GridSpec::new(1, 64, 1.0).unwrap();
        let inner = g.sample(|x| (-(x[0] * x[0]) * 50.0).exp());
        assert!(shell_fraction(&[&inner]) < 1e-12);
        let flat = g.sample(|_| 1.0);
        assert!(shell_fraction(&[&flat]) > 0.05);
    }
}
