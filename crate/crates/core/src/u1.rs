//! Chiral U(1)-current profiles on a periodic line.
//!
//! A profile is a class of real functions modulo constants; only `f'` enters
//! any functional. The stored representative vanishes at `x = -L`.
//! Weighted integrals of `f'²` are evaluated on the trigonometric interpolant of
//! `f'²` sampled on the doubled grid, which keeps them accurate for cuts between
//! nodes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::profile::AxisProfile;
use crate::region::Side;
use crate::spectral::{refine, SpectralField};

/// Largest compression `e^{|s|}` tolerated when pulling a profile back along a dilation.
pub const MAX_COMPRESSION: f64 = 7.5;

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentProfile {
    grid: GridSpec,
    values: Vec<f64>,
    derivative: Vec<f64>,
}

impl CurrentProfile {
    /// From samples of `f`; the derivative is spectral, so `f` must be
    /// periodic up to decay (equal constants at both ends).
    pub fn from_values(field: &Field) -> Result<Self> {
        let grid = *field.grid();
        if grid.dim() != 1 {
            return Err(Error::InvalidInput("current profiles live on a line".into()));
        }
        if !field.is_finite() {
            return Err(Error::NonFinite);
        }
        let derivative = SpectralField::forward(field).derivative(0).inverse().into_values();
        let base = field.values()[0];
        let values = field.values().iter().map(|v| v - base).collect();
        Ok(Self { grid, values, derivative })
    }

    /// From samples of `f'`; `f` is recovered by the trapezoidal primitive.
    pub fn from_derivative(field: &Field) -> Result<Self> {
        let grid = *field.grid();
        if grid.dim() != 1 {
            return Err(Error::InvalidInput("current profiles live on a line".into()));
        }
        if !field.is_finite() {
            return Err(Error::NonFinite);
        }
        let d = field.values().to_vec();
        let h = grid.dx();
        let mut values = vec![0.0; d.len()];
        for j in 1..d.len() {
            values[j] = values[j - 1] + 0.5 * h * (d[j - 1] + d[j]);
        }
        Ok(Self { grid, values, derivative: d })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// The representative with `f(-L) = 0`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    fn derivative_field(&self) -> Field {
        Field::from_vec(self.grid, self.derivative.clone()).expect("length matches grid")
    }

    /// Interpolant of `f'²`.
    fn density(&self) -> AxisProfile {
        let fine = refine(&self.derivative_field());
        let squares: Vec<f64> = fine.values().iter().map(|v| v * v).collect();
        AxisProfile::from_samples(&squares, self.grid.half_extent())
    }

    /// Interpolant of `f'`.
    fn slope(&self) -> AxisProfile {
        AxisProfile::from_samples(&self.derivative, self.grid.half_extent())
    }

    /// `f'` at an arbitrary point (trigonometric interpolation).
    pub fn derivative_at(&self, x: f64) -> f64 {
        self.slope().value(x)
    }

    /// Profile with derivative `f'(y(x)) y'(x)`, where `map(x) = (y, y')`.
    pub fn pull_back<F: Fn(f64) -> (f64, f64)>(&self, map: F) -> Result<Self> {
        let slope = self.slope();
        let samples: Vec<f64> = (0..self.grid.n())
            .map(|j| {
                let (y, dy) = map(self.grid.coord(j));
                slope.value(y) * dy
            })
            .collect();
        Self::from_derivative(&Field::from_vec(self.grid, samples)?)
    }

    /// `∫ f'²`.
    pub fn gradient_energy(&self) -> f64 {
        self.density().total()
    }
}

/// `∫₀^∞ p |f^(p)|² dp = ∫₀^∞ |(f')^(p)|² / p dp`, zero mode excluded.
pub fn u1_norm(f: &CurrentProfile) -> f64 {
    let spec = SpectralField::forward(&f.derivative_field());
    let n = f.grid.n();
    let dp = spec.dp();
    spec.coeffs()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k > 0 && k < n / 2)
        .map(|(k, c)| c.norm_sqr() / (dp * k as f64))
        .sum::<f64>()
        * dp
}

/// `½ ∫ (ιf) f' dx`, the position-space pairing that equals [`u1_norm`].
pub fn u1_norm_dual(f: &CurrentProfile) -> Result<f64> {
    let jf = u1_complex_structure(f)?;
    let h = f.grid.dx();
    Ok(0.5 * h * jf.values.iter().zip(&f.derivative).map(|(a, b)| a * b).sum::<f64>())
}

/// Multiplies `f^` by `i sign(p)`; the zero and Nyquist modes are dropped.
pub fn u1_complex_structure(f: &CurrentProfile) -> Result<CurrentProfile> {
    let field = Field::from_vec(f.grid, f.values.clone())?;
    let spec = SpectralField::forward(&field);
    let n = f.grid.n();
    let rotated = spec.multiply_complex(|k| {
        if k == 0 || k == n / 2 {
            Complex64::new(0.0, 0.0)
        } else if k < n / 2 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, -1.0)
        }
    });
    let derivative = rotated.derivative(0).inverse().into_values();
    let values = rotated.inverse().into_values();
    let base = values[0];
    Ok(CurrentProfile { grid: f.grid, values: values.iter().map(|v| v - base).collect(), derivative })
}

/// The spectral `ιf` itself with zero mean (not rebased); this is `-H f` for
/// the periodic Hilbert transform `H`.
pub fn complex_structure_values(f: &CurrentProfile) -> Result<Vec<f64>> {
    let j = u1_complex_structure(f)?;
    let mean = j.values.iter().sum::<f64>() / j.values.len() as f64;
    Ok(j.values.iter().map(|v| v - mean).collect())
}

/// `π ∫ (x - a)₊ f'²` for `Side::Right`, `π ∫ (a - x)₊ f'²` for `Side::Left`.
pub fn halfline_entropy(f: &CurrentProfile, a: f64, side: Side) -> f64 {
    let d = f.density();
    match side {
        Side::Right => PI * d.right_moment(a),
        Side::Left => PI * d.left_moment(a),
    }
}

/// `2π ∫_a^b (x - a)(b - x)/(b - a) f'²`.
pub fn interval_entropy(f: &CurrentProfile, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidInput("interval needs a < b".into()));
    }
    let d = f.density();
    let s = 2.0 * PI / (b - a);
    Ok(d.integrate_poly(a, b, [-a * b * s, (a + b) * s, -s]))
}

/// `(f, P₊ f) = ∫₀^∞ p² |f^(p)|² dp` computed spectrally.
pub fn null_energy(f: &CurrentProfile) -> f64 {
    let spec = SpectralField::forward(&f.derivative_field());
    let n = f.grid.n();
    spec.coeffs().iter().take(n / 2).skip(1).map(|c| c.norm_sqr()).sum::<f64>() * spec.dp()
}

/// The cut derivative of the half-line entropy and its variational characterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntReport {
    pub cut: f64,
    pub step: f64,
    /// `(S(a + h) - S(a - h)) / 2h`.
    pub derivative_fd: f64,
    /// `-π ∫_a^∞ f'²`.
    pub derivative_exact: f64,
    /// `(h*, P₊ h*) = ½ ∫ h*'²` for the constant continuation `h*`.
    pub minimizer_energy: f64,
    /// `2π (h*, P₊ h*)`, to be compared with `-∂_a S`.
    pub infimum: f64,
}

impl AntReport {
    pub fn derivative_error(&self) -> f64 {
        (self.derivative_fd - self.derivative_exact).abs()
    }

    pub fn infimum_error(&self) -> f64 {
        (self.infimum + self.derivative_exact).abs()
    }
}

pub fn ant_check(f: &CurrentProfile, a: f64, step: f64) -> Result<AntReport> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let d = f.density();
    let s = |c: f64| PI * d.right_moment(c);
    let derivative_fd = (s(a + step) - s(a - step)) / (2.0 * step);
    let tail = d.right_mass(a);
    let minimizer_energy = 0.5 * tail;
    Ok(AntReport {
        cut: a,
        step,
        derivative_fd,
        derivative_exact: -PI * tail,
        minimizer_energy,
        infimum: 2.0 * PI * minimizer_energy,
    })
}

/// `½ ∫ h'²` for the competitor `h = h* + p`, with `p'` supported left of the cut.
pub fn ant_competitor_energy(f: &CurrentProfile, a: f64, perturbation: &CurrentProfile) -> Result<f64> {
    if f.grid != perturbation.grid {
        return Err(Error::GridMismatch);
    }
    let fine_f = refine(&f.derivative_field());
    let fine_p = refine(&perturbation.derivative_field());
    let l = f.grid.half_extent();
    let cross: Vec<f64> = fine_f.values().iter().zip(fine_p.values()).map(|(x, y)| x * y).collect();
    let cross = AxisProfile::from_samples(&cross, l).right_mass(a);
    Ok(0.5 * (f.density().right_mass(a) + perturbation.gradient_energy()) + cross)
}

/// Terms of `[S(a) - S(b)] - [S̄(a) - S̄(b)] - 2π(b - a)(f, P₊f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceReport {
    pub right: [f64; 2],
    pub left: [f64; 2],
    /// Spectral `(f, P₊ f)`.
    pub null_energy: f64,
    /// `½ ∫ f'²`.
    pub half_gradient_energy: f64,
    pub residual: f64,
}

pub fn balance_check(f: &CurrentProfile, a: f64, b: f64) -> Result<BalanceReport> {
    if !(a <= b) {
        return Err(Error::InvalidInput("balance needs a ≤ b".into()));
    }
    let right = [halfline_entropy(f, a, Side::Right), halfline_entropy(f, b, Side::Right)];
    let left = [halfline_entropy(f, a, Side::Left), halfline_entropy(f, b, Side::Left)];
    let energy = null_energy(f);
    let residual = (right[0] - right[1]) - (left[0] - left[1]) - 2.0 * PI * (b - a) * energy;
    Ok(BalanceReport { right, left, null_energy: energy, half_gradient_energy: 0.5 * f.gradient_energy(), residual })
}

/// `δ_B(s)(x) = (1 + x - e^{-s}(1 - x)) / (1 + x + e^{-s}(1 - x))` on `B = (-1, 1)`.
pub fn dilation(s: f64, x: f64) -> f64 {
    let e = (-s).exp();
    (1.0 + x - e * (1.0 - x)) / (1.0 + x + e * (1.0 - x))
}

fn dilation_derivative(s: f64, x: f64) -> f64 {
    let e = (-s).exp();
    let den = 1.0 + x + e * (1.0 - x);
    4.0 * e / (den * den)
}

/// `f_s = f ∘ δ_B(s)⁻¹` inside `B`; outside `B` the derivative is left at zero,
/// so the profile must have `f'` supported in `B`.
pub fn dilate_profile(f: &CurrentProfile, s: f64) -> Result<CurrentProfile> {
    let compression = s.abs().exp();
    if compression > MAX_COMPRESSION {
        return Err(Error::ResampleUnderResolved(compression));
    }
    f.pull_back(|x| {
        if x <= -1.0 || x >= 1.0 {
            (x, 0.0)
        } else {
            (dilation(-s, x), dilation_derivative(-s, x))
        }
    })
}

/// `interval_entropy(f_s, B) - interval_entropy(f, B)` for `B = (-1, 1)`.
pub fn dilation_flow_check(f: &CurrentProfile, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let moved = dilate_profile(f, s)?;
    Ok(interval_entropy(&moved, -1.0, 1.0)? - interval_entropy(f, -1.0, 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_is_a_one_parameter_group_fixing_the_ends() {
        for x in [-0.9, -0.2, 0.0, 0.5, 0.95] {
            assert!((dilation(0.0, x) - x).abs() < 1e-15);
            let composed = dilation(0.3, dilation(0.4, x));
            assert!((composed - dilation(0.7, x)).abs() < 1e-14);
        }
        assert!((dilation(1.3, 1.0) - 1.0).abs() < 1e-15);
        assert!((dilation(1.3, -1.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dilation_derivative_matches_difference_quotient() {
        let h = 1e-6;
        for x in [-0.7, 0.1, 0.8] {
            let fd = (dilation(0.6, x + h) - dilation(0.6, x - h)) / (2.0 * h);
            assert!((fd - dilation_derivative(0.6, x)).abs() < 1e-8);
        }
    }

    #[test]
    fn primitive_of_derivative_is_rebased() {
        let grid = GridSpec::new(1, 64, 4.0).unwrap();
        let d = grid.sample(|x| (-x[0] * x[0]).exp());
        let p = CurrentProfile::from_derivative(&d).unwrap();
        assert_eq!(p.values()[0], 0.0);
        assert!((p.values()[63] - PI.sqrt()).abs() < 1e-3);
    }
}
