//! One-dimensional trigonometric interpolants on the periodic interval `[-L, L)`.
//!
//! Weighted integrals with a kink or a jump at an arbitrary cut (half-space and
//! interval weights) are evaluated in closed form on the interpolant, which keeps
//! them spectrally accurate for every cut position rather than only on nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone)]
pub struct AxisProfile {
    half_extent: f64,
    /// (angular wavenumber, coefficient) in the representation
    /// `τ(x) = Σ a_k e^{i p_k (x + L)}`.
    modes: Vec<(f64, Complex64)>,
}

impl AxisProfile {
    /// Build from samples at `x_j = -L + j dx`.
    pub fn from_samples(samples: &[f64], half_extent: f64) -> Self {
        let n = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
        let dp = PI / half_extent;
        let mut modes = Vec::with_capacity(n + 1);
        for (k, c) in buf.iter().enumerate() {
            let a = c / n as f64;
            if n % 2 == 0 && k == n / 2 {
                let p = dp * (n / 2) as f64;
                modes.push((p, a * 0.5));
                modes.push((-p, a * 0.5));
            } else {
                let kk = crate::spectral::signed_index(k, n);
                modes.push((dp * kk as f64, a));
            }
        }
        Self { half_extent, modes }
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn value(&self, x: f64) -> f64 {
        let u = x + self.half_extent;
        self.modes.iter().map(|(p, a)| (a * Complex64::new(0.0, p * u).exp()).re).sum()
    }

    /// Derivative of the interpolant.
    pub fn derivative(&self, x: f64) -> f64 {
        let u = x + self.half_extent;
        self.modes
            .iter()
            .map(|(p, a)| (a * Complex64::new(0.0, *p) * Complex64::new(0.0, p * u).exp()).re)
            .sum()
    }

    /// `∫_lo^hi (c0 + c1 x + c2 x²) τ(x) dx`, exact on the interpolant.
    pub fn integrate_poly(&self, lo: f64, hi: f64, c: [f64; 3]) -> f64 {
        let l = self.half_extent;
        // Rewrite the polynomial in u = x + L.
        let q = [c[0] - c[1] * l + c[2] * l * l, c[1] - 2.0 * c[2] * l, c[2]];
        let (ua, ub) = (lo + l, hi + l);
        let mut acc = 0.0;
        for (p, a) in &self.modes {
            let m = monomial_integrals(*p, ua, ub);
            let s = m[0] * q[0] + m[1] * q[1] + m[2] * q[2];
            acc += (a * s).re;
        }
        acc
    }

    /// `∫ τ` over the full period.
    pub fn total(&self) -> f64 {
        self.integrate_poly(-self.half_extent, self.half_extent, [1.0, 0.0, 0.0])
    }

    /// `∫_{x > a} (x - a) τ(x) dx`.
    pub fn right_moment(&self, a: f64) -> f64 {
        self.integrate_poly(a, self.half_extent, [-a, 1.0, 0.0])
    }

    /// `∫_{x < a} (a - x) τ(x) dx`.
    pub fn left_moment(&self, a: f64) -> f64 {
        self.integrate_poly(-self.half_extent, a, [a, -1.0, 0.0])
    }

    /// `∫_{x > a} τ(x) dx`.
    pub fn right_mass(&self, a: f64) -> f64 {
        self.integrate_poly(a, self.half_extent, [1.0, 0.0, 0.0])
    }
}

/// `∫_α^β u^m e^{ipu} du` for `m = 0, 1, 2`.
fn monomial_integrals(p: f64, alpha: f64, beta: f64) -> [Complex64; 3] {
    if p == 0.0 {
        return [
            Complex64::new(beta - alpha, 0.0),
            Complex64::new((beta * beta - alpha * alpha) / 2.0, 0.0),
            Complex64::new((beta.powi(3) - alpha.powi(3)) / 3.0, 0.0),
        ];
    }
    let i = Complex64::new(0.0, 1.0);
    let anti = |u: f64| -> [Complex64; 3] {
        let e = (i * p * u).exp();
        let ip = i * p;
        [
            e / ip,
            e * (u / ip + 1.0 / (p * p)),
            e * (u * u / ip + 2.0 * u / (p * p) + 2.0 * i / p.powi(3)),
        ]
    };
    let (a, b) = (anti(alpha), anti(beta));
    [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_profile(n: usize, l: f64) -> AxisProfile {
        let dx = 2.0 * l / n as f64;
        let s: Vec<f64> = (0..n).map(|j| (-(-l + j as f64 * dx).powi(2)).exp()).collect();
        AxisProfile::from_samples(&s, l)
    }

    #[test]
    fn interpolates_nodes_and_between() {
        let prof = gaussian_profile(128, 8.0);
        for x in [-1.3, 0.0, 0.0625, 0.77] {
            assert!((prof.value(x) - (-(x * x) as f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_match_closed_forms() {
        let prof = gaussian_profile(256, 8.0);
        let sqrt_pi = PI.sqrt();
        assert!((prof.total() - sqrt_pi).abs() < 1e-12);
        // ∫_0^∞ x e^{-x²} dx = 1/2
        assert!((prof.right_moment(0.0) - 0.5).abs() < 1e-12);
        assert!((prof.left_moment(0.0) - 0.5).abs() < 1e-12);
        // ∫_{-1}^{1} x² e^{-x²} dx = √π/2 erf(1) - 1/e
        let erf1 = 0.842_700_792_949_714_9;
        let exact = sqrt_pi / 2.0 * erf1 - (-1.0f64).exp();
        assert!((prof.integrate_poly(-1.0, 1.0, [0.0, 0.0, 1.0]) - exact).abs() < 1e-12);
    }

    #[test]
    fn moment_identity_right_minus_left_is_linear() {
        let prof = gaussian_profile(128, 8.0);
        let total = prof.total();
        let first = prof.integrate_poly(-8.0, 8.0, [0.0, 1.0, 0.0]);
        for a in [-0.9, 0.1, 2.3] {
            let diff = prof.right_moment(a) - prof.left_moment(a);
            assert!((diff - (first - a * total)).abs() < 1e-12);
        }
    }
}
