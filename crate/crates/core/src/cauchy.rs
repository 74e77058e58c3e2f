//! Cauchy data of Klein-Gordon wave packets and the one-particle structure
//! on them: the `H_{m,+} ⊕ H_{m,-}` pairing, the symplectic form, the complex
//! structure, free evolution and the time-zero energy densities.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{shell_fraction, Field, GridSpec, DEFAULT_DECAY_THRESHOLD};
use crate::spectral::{self, SpectralField};

/// Zero-mode fraction above which division by the dispersion is refused at `m = 0`.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Time-zero Cauchy data `Φ = ⟨f, g⟩` of a wave of mass `m`.
#[derive(Debug, Clone)]
pub struct CauchyData {
    f: Field,
    g: Field,
    mass: f64,
    grad: OnceLock<Vec<Field>>,
}

/// Time-zero energy density and its improved counterpart.
#[derive(Debug, Clone)]
pub struct EnergyDensity {
    pub t00: Field,
    pub t00i: Field,
}

impl EnergyDensity {
    pub fn grid(&self) -> &GridSpec {
        self.t00.grid()
    }
}

impl CauchyData {
    /// Validated constructor using the default decay threshold.
    pub fn new(f: Field, g: Field, mass: f64) -> Result<Self> {
        Self::with_decay_threshold(f, g, mass, DEFAULT_DECAY_THRESHOLD)
    }

    pub fn with_decay_threshold(f: Field, g: Field, mass: f64, threshold: f64) -> Result<Self> {
        let data = Self::unchecked(f, g, mass)?;
        data.check_decay(threshold)?;
        Ok(data)
    }

    /// Constructor that skips the boundary-decay check (still checks shape and finiteness).
    pub fn unchecked(f: Field, g: Field, mass: f64) -> Result<Self> {
        if f.grid() != g.grid() {
            return Err(Error::GridMismatch);
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidInput(format!("mass {mass} must be >= 0")));
        }
        if mass == 0.0 && f.grid().dim() < 2 {
            return Err(Error::InvalidInput("massless data requires d >= 2".into()));
        }
        if !f.is_finite() || !g.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { f, g, mass, grad: OnceLock::new() })
    }

    pub fn zeros(grid: &GridSpec, mass: f64) -> Result<Self> {
        Self::unchecked(grid.zeros(), grid.zeros(), mass)
    }

    pub fn f(&self) -> &Field {
        &self.f
    }

    pub fn g(&self) -> &Field {
        &self.g
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn grid(&self) -> &GridSpec {
        self.f.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    /// Spectral gradient of `f`, computed once.
    pub fn grad_f(&self) -> &[Field] {
        self.grad.get_or_init(|| spectral::gradient(&self.f))
    }

    /// Outer-shell fraction of the combined L² mass of `f`, `g` and `|∇f|`.
    pub fn decay_fraction(&self) -> f64 {
        let mut fields: Vec<&Field> = vec![&self.f, &self.g];
        fields.extend(self.grad_f().iter());
        shell_fraction(&fields)
    }

    pub fn check_decay(&self, threshold: f64) -> Result<()> {
        let fraction = self.decay_fraction();
        if fraction > threshold {
            return Err(Error::DecayViolated { fraction, threshold });
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::unchecked(self.f.scaled(alpha), self.g.scaled(alpha), self.mass)
            .expect("scaling preserves validity")
    }

    /// `T_00 = ½(|∇f|² + m² f² + g²)`.
    pub fn t00(&self) -> Field {
        let m2 = self.mass * self.mass;
        let grad = self.grad_f();
        let mut out = self.f.zip_map(&self.g, |f, g| 0.5 * (m2 * f * f + g * g));
        for comp in grad {
            for (o, d) in out.data.iter_mut().zip(comp.values()) {
                *o += 0.5 * d * d;
            }
        }
        out
    }

    fn same_space(&self, other: &CauchyData) -> Result<()> {
        if self.grid() != other.grid() || self.mass != other.mass {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn check_zero_mode(&self, spec: &SpectralField) -> Result<()> {
        if self.mass == 0.0 {
            let fraction = spec.zero_mode_fraction();
            if fraction > ZERO_MODE_TOLERANCE {
                return Err(Error::SingularMode { fraction });
            }
        }
        Ok(())
    }

    fn dispersion(&self) -> impl Fn([f64; 3]) -> f64 {
        let m2 = self.mass * self.mass;
        move |p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m2).sqrt()
    }

    /// `⟨μ⁻¹ g, -μ f⟩`.
    pub fn apply_complex_structure(&self) -> Result<Self> {
        let gs = SpectralField::forward(&self.g);
        self.check_zero_mode(&gs)?;
        let mu = self.dispersion();
        let inv = gs.multiply(|p| {
            let m = mu(p);
            if m == 0.0 {
                0.0
            } else {
                1.0 / m
            }
        });
        let fs = SpectralField::forward(&self.f).multiply(|p| -mu(p));
        Self::unchecked(inv.inverse(), fs.inverse(), self.mass)
    }

    /// Spectrally exact free evolution to time `t`.
    pub fn evolve(&self, t: f64) -> Result<Self> {
        self.evolve_with_threshold(t, DEFAULT_DECAY_THRESHOLD)
    }

    pub fn evolve_with_threshold(&self, t: f64, threshold: f64) -> Result<Self> {
        if t == 0.0 {
            return Ok(self.clone());
        }
        let fs = SpectralField::forward(&self.f);
        let gs = SpectralField::forward(&self.g);
        self.check_zero_mode(&gs)?;
        let mu = self.dispersion();
        let grid = *self.grid();
        let cos_t = |i: usize| Complex64::new((mu(fs.wavevector(i)) * t).cos(), 0.0);
        // μ⁻¹ sin(μ t), with the μ → 0 limit t on an (already vanishing) zero mode.
        let sinc_t = |i: usize| {
            let m = mu(fs.wavevector(i));
            Complex64::new(if m == 0.0 { t } else { (m * t).sin() / m }, 0.0)
        };
        let msin_t = |i: usize| {
            let m = mu(fs.wavevector(i));
            Complex64::new(-m * (m * t).sin(), 0.0)
        };
        let f_t = fs.multiply_complex(cos_t).add(&gs.multiply_complex(sinc_t)).inverse();
        let g_t = fs.multiply_complex(msin_t).add(&gs.multiply_complex(cos_t)).inverse();
        debug_assert_eq!(f_t.grid(), &grid);
        let out = Self::unchecked(f_t, g_t, self.mass)?;
        out.check_decay(threshold)?;
        Ok(out)
    }

    /// `∫ T_00`, the total energy.
    pub fn total_energy(&self) -> f64 {
        self.t00().integral()
    }

    /// Energy and improved energy densities.
    pub fn stress_energy(&self) -> EnergyDensity {
        let t00 = self.t00();
        let d = self.dim() as f64;
        let coef = (d - 1.0) / (4.0 * d);
        let lap = spectral::laplacian(&self.f.map(|v| v * v));
        let t00i = t00.zip_map(&lap, |t, l| t - coef * l);
        EnergyDensity { t00, t00i }
    }

    /// `(Φ, PΦ)` with `P` acting as `μ` on both components, normalized so that
    /// it coincides with the total energy: `½ Re(Φ, μΦ)` under [`inner_product`].
    pub fn energy_expectation(&self) -> f64 {
        let m2 = self.mass * self.mass;
        let fs = SpectralField::forward(&self.f);
        let gs = SpectralField::forward(&self.g);
        0.5 * (fs.weighted_mass(|p2| p2 + m2) + gs.weighted_mass(|_| 1.0))
    }

    /// `(Φ, P₁Φ) = ∫ g ∂₁f`, the x₁-momentum in the convention where the wedge
    /// entropy at vertex `(t, a)` is the half-space entropy of the data evolved to `t`.
    /// With this sign `P ± P₁` are both non-negative.
    pub fn momentum_expectation(&self, axis: usize) -> f64 {
        let fs = SpectralField::forward(&self.f).derivative(axis);
        let gs = SpectralField::forward(&self.g);
        gs.weighted_pairing(&fs, |_| 1.0)
    }
}

/// `∫ (|p|² + m²)^{±1/2} |f^(p)|² dp`.
///
/// At `m = 0` with the minus sign the zero mode is excluded, after checking that
/// it carries no more than [`ZERO_MODE_TOLERANCE`] of the spectral mass.
pub fn norm_pm(f: &Field, mass: f64, sign: Sign) -> Result<f64> {
    let spec = SpectralField::forward(f);
    let m2 = mass * mass;
    match sign {
        Sign::Plus => Ok(spec.weighted_mass(|p2| (p2 + m2).sqrt())),
        Sign::Minus => {
            if mass == 0.0 {
                let fraction = spec.zero_mode_fraction();
                if fraction > ZERO_MODE_TOLERANCE {
                    return Err(Error::SingularMode { fraction });
                }
            }
            Ok(spec.weighted_mass(|p2| {
                let mu = (p2 + m2).sqrt();
                if mu == 0.0 {
                    0.0
                } else {
                    1.0 / mu
                }
            }))
        }
    }
}

fn pairing_pm(a: &SpectralField, b: &SpectralField, mass: f64, sign: Sign) -> f64 {
    let m2 = mass * mass;
    match sign {
        Sign::Plus => a.weighted_pairing(b, |p2| (p2 + m2).sqrt()),
        Sign::Minus => a.weighted_pairing(b, |p2| {
            let mu = (p2 + m2).sqrt();
            if mu == 0.0 {
                0.0
            } else {
                1.0 / mu
            }
        }),
    }
}

/// Complex scalar product of two waves.
///
/// Real part: `⟨f₁, f₂⟩₊ + ⟨g₁, g₂⟩₋`. Imaginary part: `(g₁, f₂) - (f₁, g₂)` in L².
pub fn inner_product(a: &CauchyData, b: &CauchyData) -> Result<Complex64> {
    a.same_space(b)?;
    let (fa, fb) = (SpectralField::forward(&a.f), SpectralField::forward(&b.f));
    let (ga, gb) = (SpectralField::forward(&a.g), SpectralField::forward(&b.g));
    if a.mass == 0.0 {
        a.check_zero_mode(&ga)?;
        b.check_zero_mode(&gb)?;
    }
    let re = pairing_pm(&fa, &fb, a.mass, Sign::Plus) + pairing_pm(&ga, &gb, a.mass, Sign::Minus);
    let im = a.g.dot(&b.f) - a.f.dot(&b.g);
    Ok(Complex64::new(re, im))
}
