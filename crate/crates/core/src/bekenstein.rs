//! Entropy bounds for wave packets in a region of half-width `R`:
//! `S(Φ|B) ≤ 2πR E(Φ|B)` for data supported in `B`, and its boundary-corrected
//! form for data that are not.
//!
//! The exact local entropy is only available for massless data in a ball. In
//! every other case the reports use the half-space chain: `B` lies between the
//! cuts `c - R` and `c + R` along its narrow axis, and by monotonicity the
//! entropy of either half-space bounds `S(Φ|B)` from above.

use std::f64::consts::PI;

use crate::cauchy::CauchyData;
use crate::entropy::{ball_entropy_with, HalfSpaceEntropy};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::region::{exterior_fraction, Region, RegionQuadrature, Side, LOCALIZED_FRACTION};
use crate::spectral::gradient;

/// Relative tolerance applied to margins.
pub const MARGIN_TOLERANCE: f64 = 1e-8;

/// Which computable entropy a report compares against the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surrogate {
    /// The exact massless ball entropy.
    ExactBall,
    /// A half-space entropy (an upper bound for `S(Φ|B)`).
    HalfSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The surrogate exceeds the bound, but it is only an upper bound on the entropy.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub surrogate: Surrogate,
    /// Entropy value compared against the bound.
    pub entropy: f64,
    /// `S(Φ | x > c - R)` along the narrow axis.
    pub halfspace_right: f64,
    /// `S(Φ | x < c + R)` along the narrow axis.
    pub halfspace_left: f64,
    pub halfspace_mean: f64,
    /// Exact massless ball entropy, when defined.
    pub exact_ball: Option<f64>,
    /// `E(Φ|B)`.
    pub energy: f64,
    pub half_width: f64,
    /// Boundary correction added to the bound (zero for localized data).
    pub correction: f64,
    /// Extra separation `δ` between `B` and the cuts used by the correction.
    pub placement_offset: f64,
    /// `2π(R + δ)E + correction`.
    pub bound: f64,
    pub margin: f64,
    /// `2πR E - entropy`, the margin of the uncorrected bound.
    pub uncorrected_margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Boundary correction for data that do not vanish outside `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correction {
    /// `Γ_Φ`, already including the factor `π` and the average over both cut orientations.
    pub value: f64,
    /// Gap `δ ≥ 0` between `B` and each cut.
    pub placement_offset: f64,
}

impl Correction {
    pub const NONE: Correction = Correction { value: 0.0, placement_offset: 0.0 };
}

/// `E(Φ|B) = ∫_B T₀₀`.
pub fn local_energy(data: &CauchyData, region: &Region) -> Result<f64> {
    region.validate(data.grid())?;
    let q = RegionQuadrature::for_data(data.grid(), region, &[data.f(), data.g()]);
    Ok(q.integrate(&data.t00()))
}

fn localization(f: &Field, g: &Field, region: &Region) -> Result<()> {
    let fraction = exterior_fraction(&[f, g], region);
    if fraction > LOCALIZED_FRACTION {
        return Err(Error::NotLocalized(fraction));
    }
    Ok(())
}

/// Coefficients `(a, b)` of a quantity equal to `a + m² b`.
type Split = [f64; 2];

fn at(s: Split, m2: f64) -> f64 {
    s[0] + m2 * s[1]
}

/// Everything the localized bound needs, split by its (affine) dependence on `m²`
/// so one pass over the data serves every mass.
#[derive(Debug, Clone)]
pub struct LocalizedAnalysis {
    half_width: f64,
    energy: Split,
    right: Split,
    left: Split,
    /// Massless ball entropy; `None` unless the region is a ball and `d ≥ 2`.
    ball: Option<f64>,
}

impl LocalizedAnalysis {
    /// Fails with `NotLocalized` unless `f` and `g` vanish outside `region`.
    pub fn new(f: &Field, g: &Field, region: &Region) -> Result<Self> {
        Self::with_gradient(f, g, &gradient(f), region)
    }

    pub fn from_data(data: &CauchyData, region: &Region) -> Result<Self> {
        Self::with_gradient(data.f(), data.g(), data.grad_f(), region)
    }

    fn with_gradient(f: &Field, g: &Field, grad: &[Field], region: &Region) -> Result<Self> {
        let grid = f.grid();
        if g.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if matches!(region, Region::HalfSpace { .. }) {
            return Err(Error::InvalidInput("bounded region required".into()));
        }
        region.validate(grid)?;
        localization(f, g, region)?;
        let dim = grid.dim();
        let r = region.half_width(dim);
        let axis = region.narrow_axis(dim);
        let c = region.center()[axis];

        let massless = grad.iter().fold(g.map(|v| 0.5 * v * v), |acc, d| acc.zip_map(d, |a, b| a + 0.5 * b * b));
        let half_f2 = f.map(|v| 0.5 * v * v);
        let q = RegionQuadrature::nodal(grid, region);
        let energy = [q.integrate(&massless), q.integrate(&half_f2)];

        // On localized data every weight below is affine on the support, so the
        // nodal sums are as accurate as the energy itself.
        let right_w = |x: [f64; 3]| 2.0 * PI * (x[axis] - (c - r));
        let left_w = |x: [f64; 3]| 2.0 * PI * (c + r - x[axis]);
        let right = [q.integrate_weighted(&massless, right_w), q.integrate_weighted(&half_f2, right_w)];
        let left = [q.integrate_weighted(&massless, left_w), q.integrate_weighted(&half_f2, left_w)];

        let ball = (matches!(region, Region::Ball { .. }) && dim >= 2)
            .then(|| ball_entropy_with(f, region, &q, &massless));
        Ok(Self { half_width: r, energy, right, left, ball })
    }

    /// Report for mass `m`. The exact ball entropy is used when `m = 0`.
    pub fn report(&self, mass: f64) -> BoundReport {
        let m2 = mass * mass;
        let right = at(self.right, m2);
        let left = at(self.left, m2);
        let exact_ball = if mass == 0.0 { self.ball } else { None };
        let energy = at(self.energy, m2);
        let r = self.half_width;
        let mean = 0.5 * (right + left);
        let (surrogate, entropy) = match exact_ball {
            Some(s) => (Surrogate::ExactBall, s),
            None => (Surrogate::HalfSpace, mean),
        };
        let bound = 2.0 * PI * r * energy;
        let margin = bound - entropy;
        let tolerance = MARGIN_TOLERANCE * bound.abs().max(entropy.abs()).max(right.abs()).max(left.abs());
        let ok = margin >= -tolerance && right >= -tolerance && left >= -tolerance;
        BoundReport {
            surrogate,
            entropy,
            halfspace_right: right,
            halfspace_left: left,
            halfspace_mean: mean,
            exact_ball,
            energy,
            half_width: r,
            correction: 0.0,
            placement_offset: 0.0,
            bound,
            margin,
            uncorrected_margin: margin,
            tolerance,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

/// The localized bound. The half-space mean equals `2πR E(Φ|B)` identically, so
/// the massive verdict is decided by that identity; for massless data in a ball
/// the exact entropy is compared instead.
pub fn check_localized(data: &CauchyData, region: &Region) -> Result<BoundReport> {
    Ok(LocalizedAnalysis::from_data(data, region)?.report(data.mass()))
}

/// The bound `S(Φ|B) ≤ 2π(R + δ) E(Φ|B) + Γ_Φ` for data that need not vanish
/// outside `B`. With the half-space surrogate a negative margin is reported as
/// inconclusive rather than as a failure.
pub fn check_nonlocalized(data: &CauchyData, region: &Region, correction: Correction) -> Result<BoundReport> {
    if matches!(region, Region::HalfSpace { .. }) {
        return Err(Error::InvalidInput("bounded region required".into()));
    }
    if !(correction.placement_offset >= 0.0) || !correction.value.is_finite() {
        return Err(Error::InvalidInput("correction must be finite with a non-negative offset".into()));
    }
    let grid = data.grid();
    region.validate(grid)?;
    let dim = data.dim();
    let r = region.half_width(dim);
    let axis = region.narrow_axis(dim);
    let c = region.center()[axis];
    let q = RegionQuadrature::for_data(grid, region, &[data.f(), data.g()]);
    let t00 = data.t00();
    let energy = q.integrate(&t00);
    let hs = HalfSpaceEntropy::new(data, axis);
    let right = hs.entropy(c - r, Side::Right);
    let left = hs.entropy(c + r, Side::Left);
    let exact_ball = (data.mass() == 0.0 && matches!(region, Region::Ball { .. }))
        .then(|| ball_entropy_with(data.f(), region, &q, &t00));
    let (surrogate, entropy) = match exact_ball {
        Some(s) => (Surrogate::ExactBall, s),
        None => (Surrogate::HalfSpace, right.min(left)),
    };
    let bound = 2.0 * PI * (r + correction.placement_offset) * energy + correction.value;
    let margin = bound - entropy;
    let tolerance = MARGIN_TOLERANCE * bound.abs().max(entropy.abs()).max(correction.value.abs());
    let verdict = if margin >= -tolerance {
        Verdict::Pass
    } else if surrogate == Surrogate::ExactBall {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(BoundReport {
        surrogate,
        entropy,
        halfspace_right: right,
        halfspace_left: left,
        halfspace_mean: 0.5 * (right + left),
        exact_ball,
        energy,
        half_width: r,
        correction: correction.value,
        placement_offset: correction.placement_offset,
        bound,
        margin,
        uncorrected_margin: 2.0 * PI * r * energy - entropy,
        tolerance,
        verdict,
    })
}

/// Radial profile of the massless modular multiplier `M(r) = (R² - r²) / (2R)`
/// on the ball of radius `R`; `½(1 - r²)` for the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularProfile {
    pub radius: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// `M(r)` for the ball of radius `radius`.
pub fn modular_m(radius: f64, r: f64) -> f64 {
    (radius * radius - r * r) / (2.0 * radius)
}

/// `M` on `points` equispaced radii from 0 to `radius` inclusive.
/// Checks `0 ≤ M ≤ R` at every node.
pub fn massless_modular_m(radius: f64, points: usize) -> Result<ModularProfile> {
    if !(radius > 0.0) || points < 2 {
        return Err(Error::InvalidInput("need a positive radius and at least two points".into()));
    }
    let radii: Vec<f64> = (0..points).map(|j| radius * j as f64 / (points - 1) as f64).collect();
    let values: Vec<f64> = radii.iter().map(|&r| modular_m(radius, r)).collect();
    if values.iter().any(|&m| !(0.0..=radius).contains(&m)) {
        return Err(Error::InvalidInput("modular profile left [0, R]".into()));
    }
    Ok(ModularProfile { radius, radii, values })
}

/// `π ∫_B g M g` over a ball, which is the massless entropy of `⟨0, g⟩`.
pub fn modular_g_entropy(g: &Field, ball: &Region) -> Result<f64> {
    let Region::Ball { center, radius } = *ball else {
        return Err(Error::InvalidInput("region must be a ball".into()));
    };
    ball.validate(g.grid())?;
    let q = RegionQuadrature::for_data(g.grid(), ball, &[g]);
    let weight = |x: [f64; 3]| modular_m(radius, (0..3).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>().sqrt());
    Ok(PI * q.integrate_weighted(&g.map(|v| v * v), weight))
}

/// `(πR∫_B g² - S(⟨0,g⟩), πR∫_B (|∇f|² + m²f²) - S(⟨f,0⟩))` for localized data.
pub fn modular_bound_margins(data: &CauchyData, region: &Region) -> Result<(f64, f64)> {
    localization(data.f(), data.g(), region)?;
    let zero = data.grid().zeros();
    let none: Vec<Field> = (0..data.dim()).map(|_| zero.clone()).collect();
    let g_only = LocalizedAnalysis::with_gradient(&zero, data.g(), &none, region)?.report(data.mass());
    let f_only = LocalizedAnalysis::with_gradient(data.f(), &zero, data.grad_f(), region)?.report(data.mass());
    // With T₀₀ of one component, πR ∫_B (component)² = 2πR E.
    Ok((g_only.margin, f_only.margin))
}
