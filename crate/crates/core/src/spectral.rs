//! Spectral transforms on the periodic box.
//!
//! The forward transform approximates the unitary continuous transform
//!
//! ```text
//! f^(p) = (2π)^{-d/2} ∫ f(x) e^{-i p·x} dx
//! ```
//!
//! on the wavenumber lattice `p = π k / L`, `k` signed with the Nyquist index
//! mapped to `-N/2`. With this normalization `∫ |f^|² dp = ∫ |f|² dx` holds
//! exactly for the discrete sums (Parseval), and every spectral integral is
//! evaluated as `Σ_k w(p_k) |f^_k|² Δp^d` with `Δp = π / L`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::{Field, GridSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

/// Signed integer wavenumber of FFT index `k` on `n` points.
pub fn signed_index(k: usize, n: usize) -> isize {
    if k < n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

fn fft_nd(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = stride * n;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}

impl SpectralField {
    pub fn forward(field: &Field) -> Self {
        let grid = *field.grid();
        let mut coeffs: Vec<Complex64> =
            field.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_nd(&grid, &mut coeffs, false);
        let d = grid.dim() as i32;
        let scale = grid.cell_volume() / (2.0 * PI).powf(d as f64 / 2.0);
        for (idx, c) in coeffs.iter_mut().enumerate() {
            // e^{i p L} = (-1)^k accounts for the grid origin at x = -L.
            let ijk = grid.unflatten(idx);
            let parity: usize = ijk[..grid.dim()].iter().sum();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            *c *= scale * sign;
        }
        Self { grid, coeffs }
    }

    /// Inverse transform; the imaginary part is discarded.
    pub fn inverse(&self) -> Field {
        let grid = self.grid;
        let mut data = self.coeffs.clone();
        let d = grid.dim() as i32;
        let scale = (2.0 * PI).powf(d as f64 / 2.0) / grid.cell_volume() / grid.len() as f64;
        for (idx, c) in data.iter_mut().enumerate() {
            let ijk = grid.unflatten(idx);
            let parity: usize = ijk[..grid.dim()].iter().sum();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            *c *= scale * sign;
        }
        fft_nd(&grid, &mut data, true);
        Field::from_vec(grid, data.into_iter().map(|c| c.re).collect())
            .expect("length preserved by transform")
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Lattice spacing in momentum space.
    pub fn dp(&self) -> f64 {
        PI / self.grid.half_extent()
    }

    /// Momentum measure of one lattice cell, `Δp^d`.
    pub fn dp_volume(&self) -> f64 {
        self.dp().powi(self.grid.dim() as i32)
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let ijk = self.grid.unflatten(idx);
        let n = self.grid.n();
        let dp = self.dp();
        let mut p = [0.0; 3];
        for axis in 0..self.grid.dim() {
            p[axis] = dp * signed_index(ijk[axis], n) as f64;
        }
        p
    }

    pub fn p_squared(&self, idx: usize) -> f64 {
        self.wavevector(idx).iter().map(|c| c * c).sum()
    }

    /// True when any axis of `idx` sits on the Nyquist index.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let n = self.grid.n();
        self.grid.unflatten(idx)[..self.grid.dim()].iter().any(|&k| k == n / 2)
    }

    /// `Σ w(|p|²) |f^|² Δp^d`.
    pub fn weighted_mass<W: Fn(f64) -> f64>(&self, weight: W) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| weight(self.p_squared(i)) * c.norm_sqr())
            .sum::<f64>()
            * self.dp_volume()
    }

    /// `Re Σ w(|p|²) conj(a^) b^ Δp^d`.
    pub fn weighted_pairing<W: Fn(f64) -> f64>(&self, other: &SpectralField, weight: W) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(i, (a, b))| weight(self.p_squared(i)) * (a.conj() * b).re)
            .sum::<f64>()
            * self.dp_volume()
    }

    /// Spectral mass fraction carried by the zero mode.
    pub fn zero_mode_fraction(&self) -> f64 {
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            0.0
        } else {
            self.coeffs[0].norm_sqr() / total
        }
    }

    /// Multiply every coefficient by a real symbol of the wavevector.
    pub fn multiply<F: Fn([f64; 3]) -> f64>(&self, symbol: F) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * symbol(self.wavevector(i)))
            .collect();
        Self { grid: self.grid, coeffs }
    }

    /// Multiply every coefficient by a complex symbol of the flat index.
    pub fn multiply_complex<F: Fn(usize) -> Complex64>(&self, symbol: F) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * symbol(i)).collect();
        Self { grid: self.grid, coeffs }
    }

    pub fn add(&self, other: &SpectralField) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { grid: self.grid, coeffs }
    }

    /// Partial derivative along `axis`, symbol `i p_axis`; the Nyquist plane is zeroed.
    pub fn derivative(&self, axis: usize) -> Self {
        let n = self.grid.n();
        self.multiply_complex(|i| {
            let k = self.grid.unflatten(i)[axis];
            if k == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, self.wavevector(i)[axis])
            }
        })
    }
}

/// Trigonometric interpolant of `field` sampled on the twice-refined grid.
/// Nyquist coefficients are split evenly between `±N/2`.
pub fn refine(field: &Field) -> Field {
    let coarse = SpectralField::forward(field);
    let grid = *field.grid();
    let fine_grid = grid.refined();
    let (n, dim) = (grid.n(), grid.dim());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); fine_grid.len()];
    for (idx, c) in coarse.coeffs.iter().enumerate() {
        let ijk = grid.unflatten(idx);
        // Each Nyquist axis maps to two fine indices.
        let mut targets: Vec<([usize; 3], f64)> = vec![([0; 3], 1.0)];
        for a in 0..dim {
            let k = signed_index(ijk[a], n);
            let wrap = |s: isize| s.rem_euclid(2 * n as isize) as usize;
            let choices: Vec<(usize, f64)> = if ijk[a] == n / 2 {
                vec![(wrap(k), 0.5), (wrap(-k), 0.5)]
            } else {
                vec![(wrap(k), 1.0)]
            };
            targets = targets
                .iter()
                .flat_map(|(t, w)| {
                    choices.iter().map(move |&(i, cw)| {
                        let mut t = *t;
                        t[a] = i;
                        (t, w * cw)
                    })
                })
                .collect();
        }
        for (t, w) in targets {
            coeffs[fine_grid.flatten(t)] += c * w;
        }
    }
    SpectralField { grid: fine_grid, coeffs }.inverse()
}

/// Spectral gradient of a real field, one component per axis.
pub fn gradient(field: &Field) -> Vec<Field> {
    let spec = SpectralField::forward(field);
    (0..field.grid().dim()).map(|a| spec.derivative(a).inverse()).collect()
}

/// Spectral Laplacian of a real field.
pub fn laplacian(field: &Field) -> Field {
    SpectralField::forward(field).multiply(|p| -(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &GridSpec, x0: f64) -> Field {
        grid.sample(|x| (-(x[0] - x0).powi(2) - 0.5 * x[1] * x[1] - x[2] * x[2]).exp())
    }

    #[test]
    fn refinement_interpolates_band_limited_data() {
        let g = GridSpec::new(2, 32, 3.0).unwrap();
        let k = PI / 3.0;
        let f = g.sample(|x| (3.0 * k * x[0]).cos() + (5.0 * k * x[1] + 0.2).sin());
        let fine = refine(&f);
        let exact = fine.grid().sample(|x| (3.0 * k * x[0]).cos() + (5.0 * k * x[1] + 0.2).sin());
        assert!(fine.zip_map(&exact, |a, b| a - b).max_abs() < 1e-12);
        for (j, v) in f.values().iter().enumerate() {
            let ijk = g.unflatten(j);
            let fj = fine.grid().flatten([2 * ijk[0], 2 * ijk[1], 0]);
            assert!((fine.values()[fj] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_reproduces_input() {
        for dim in 1..=3 {
            let g = GridSpec::new(dim, 32, 6.0).unwrap();
            let f = gaussian(&g, 0.3);
            let back = SpectralField::forward(&f).inverse();
            let err = f.zip_map(&back, |a, b| a - b).sum_squares().sqrt();
            assert!(err <= 1e-12 * f.sum_squares().sqrt(), "dim {dim}: {err}");
        }
    }

    #[test]
    fn parseval_holds() {
        let g = GridSpec::new(2, 64, 5.0).unwrap();
        let f = gaussian(&g, -0.4);
        let spec = SpectralField::forward(&f);
        let lhs = f.l2_squared();
        let rhs = spec.weighted_mass(|_| 1.0);
        assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn continuous_normalization_matches_analytic_gaussian() {
        // (2π)^{-1/2} ∫ e^{-x²} e^{-ipx} dx = e^{-p²/4} / √2
        let g = GridSpec::new(1, 128, 10.0).unwrap();
        let f = g.sample(|x| (-x[0] * x[0]).exp());
        let spec = SpectralField::forward(&f);
        for idx in [0usize, 1, 5, 17, 127] {
            let p = spec.wavevector(idx)[0];
            let exact = (-p * p / 4.0).exp() / 2f64.sqrt();
            assert!((spec.coeffs()[idx].re - exact).abs() < 1e-13, "p = {p}");
            assert!(spec.coeffs()[idx].im.abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = GridSpec::new(1, 128, 8.0).unwrap();
        let f = g.sample(|x| (-x[0] * x[0]).exp());
        let df = &gradient(&f)[0];
        for (i, v) in df.values().iter().enumerate() {
            let x = g.coord(i);
            assert!((v - (-2.0 * x * (-x * x).exp())).abs() < 1e-11);
        }
    }
}
