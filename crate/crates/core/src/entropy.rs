//! Local entropies of wave packets: half-spaces, wedges in 1+1 dimensions and
//! balls in the massless case, with the derived QDEC, balance and convexity
//! diagnostics.
//!
//! Half-space entropies reduce to one-dimensional moments of the marginal
//! energy density along the cut normal; those are evaluated on the exact
//! trigonometric interpolant of the marginal (see [`crate::profile`]).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::cauchy::CauchyData;
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::profile::AxisProfile;
use crate::region::{surface_integral, Region, RegionQuadrature, Side};

/// `D = (d - 1) / 2`.
pub fn conformal_weight(dim: usize) -> f64 {
    (dim as f64 - 1.0) / 2.0
}

/// Integral of `field` over all axes except `axis`, sampled along `axis`.
pub fn axis_marginal(field: &Field, axis: usize) -> Vec<f64> {
    let grid = field.grid();
    let n = grid.n();
    let transverse = grid.dx().powi(grid.dim() as i32 - 1);
    let mut out = vec![0.0; n];
    for (i, v) in field.values().iter().enumerate() {
        out[grid.unflatten(i)[axis]] += v;
    }
    out.iter_mut().for_each(|v| *v *= transverse);
    out
}

/// Marginal along `axis` of the quadratic density `Σ c · A·B` over the listed
/// `(A, B, c)` products, sampled on the twice-refined axis grid.
///
/// Each factor is band-limited on the grid, so its product has up to twice the
/// bandwidth; upsampling every line by spectral zero-padding before multiplying
/// makes the returned samples an exact representation of the continuous
/// product, and the transverse sums are exact for the same reason.
pub fn product_marginal(fields: &[&Field], terms: &[(usize, usize, f64)], axis: usize) -> Vec<f64> {
    let grid = fields[0].grid();
    let n = grid.n();
    let stride = grid.stride(axis);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(2 * n);
    let mut out = vec![0.0; 2 * n];
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let mut wide = vec![Complex64::new(0.0, 0.0); 2 * n];
    let mut lines: Vec<Vec<f64>> = vec![vec![0.0; 2 * n]; fields.len()];
    let block = stride * n;
    for outer in (0..grid.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            for (field, line) in fields.iter().zip(lines.iter_mut()) {
                let vals = field.values();
                for (j, s) in spec.iter_mut().enumerate() {
                    *s = Complex64::new(vals[base + j * stride], 0.0);
                }
                fwd.process(&mut spec);
                wide.iter_mut().for_each(|w| *w = Complex64::new(0.0, 0.0));
                for (k, s) in spec.iter().enumerate() {
                    if k < n / 2 {
                        wide[k] = *s;
                    } else if k > n / 2 {
                        wide[k + n] = *s;
                    } else {
                        wide[k] = 0.5 * s;
                        wide[k + n] = 0.5 * s;
                    }
                }
                inv.process(&mut wide);
                for (l, w) in line.iter_mut().zip(&wide) {
                    *l = w.re / n as f64;
                }
            }
            for &(a, b, c) in terms {
                for (o, (x, y)) in out.iter_mut().zip(lines[a].iter().zip(&lines[b])) {
                    *o += c * x * y;
                }
            }
        }
    }
    let transverse = grid.dx().powi(grid.dim() as i32 - 1);
    out.iter_mut().for_each(|v| *v *= transverse);
    out
}

/// Marginal of `T₀₀` along `axis` on the twice-refined axis grid.
pub(crate) fn energy_marginal(data: &CauchyData, axis: usize) -> Vec<f64> {
    let m2 = data.mass() * data.mass();
    let mut fields: Vec<&Field> = vec![data.f(), data.g()];
    fields.extend(data.grad_f().iter());
    let mut terms = vec![(0, 0, 0.5 * m2), (1, 1, 0.5)];
    terms.extend((0..data.dim()).map(|a| (2 + a, 2 + a, 0.5)));
    product_marginal(&fields, &terms, axis)
}

/// Marginal of the improved density `T₀₀ - c ∇²(f²)`, with
/// `∇²(f²) = 2|∇f|² + 2 f ∇²f` and `c = (d-1)/(4d)`.
fn improved_energy_marginal(data: &CauchyData, axis: usize) -> Vec<f64> {
    let dim = data.dim();
    let c = (dim as f64 - 1.0) / (4.0 * dim as f64);
    let m2 = data.mass() * data.mass();
    let lap = crate::spectral::laplacian(data.f());
    let mut fields: Vec<&Field> = vec![data.f(), data.g(), &lap];
    fields.extend(data.grad_f().iter());
    let mut terms = vec![(0, 0, 0.5 * m2), (1, 1, 0.5), (0, 2, -2.0 * c)];
    terms.extend((0..dim).map(|a| (3 + a, 3 + a, 0.5 - 2.0 * c)));
    product_marginal(&fields, &terms, axis)
}

/// Half-space entropies of one Cauchy datum for every cut along a fixed axis.
#[derive(Debug, Clone)]
pub struct HalfSpaceEntropy {
    profile: AxisProfile,
}

impl HalfSpaceEntropy {
    pub fn new(data: &CauchyData, axis: usize) -> Self {
        let l = data.grid().half_extent();
        Self { profile: AxisProfile::from_samples(&energy_marginal(data, axis), l) }
    }

    /// From samples of a marginal density on any uniform grid of `[-L, L)`.
    pub fn from_marginal(samples: &[f64], half_extent: f64) -> Self {
        Self { profile: AxisProfile::from_samples(samples, half_extent) }
    }

    /// `2π ∫ (x - cut)₊ T₀₀` (or the mirrored weight).
    pub fn entropy(&self, cut: f64, side: Side) -> f64 {
        2.0 * PI
            * match side {
                Side::Right => self.profile.right_moment(cut),
                Side::Left => self.profile.left_moment(cut),
            }
    }

    /// `∫_{x = cut} T₀₀ dσ`.
    pub fn slice(&self, cut: f64) -> f64 {
        self.profile.value(cut)
    }

    /// `∫_{x > cut} T₀₀` (or `x < cut`).
    pub fn mass(&self, cut: f64, side: Side) -> f64 {
        match side {
            Side::Right => self.profile.right_mass(cut),
            Side::Left => self.profile.total() - self.profile.right_mass(cut),
        }
    }
}

/// `S(Φ | x_axis ≷ cut) = 2π ∫ (x_axis - cut)₊ T₀₀ dx`.
pub fn halfspace_entropy(data: &CauchyData, axis: usize, cut: f64, side: Side) -> f64 {
    HalfSpaceEntropy::new(data, axis).entropy(cut, side)
}

/// The same entropy written with the improved density plus a cut-surface term,
/// `2π ∫ (x - cut)₊ T₀₀ⁱ + π (D/d) ∫_{x = cut} f² dσ`.
pub fn halfspace_entropy_improved(data: &CauchyData, axis: usize, cut: f64, side: Side) -> f64 {
    let dim = data.dim();
    let l = data.grid().half_extent();
    let bulk = HalfSpaceEntropy::from_marginal(&improved_energy_marginal(data, axis), l).entropy(cut, side);
    let f2 = product_marginal(&[data.f()], &[(0, 0, 1.0)], axis);
    let surface = HalfSpaceEntropy::from_marginal(&f2, l).slice(cut);
    bulk + PI * conformal_weight(dim) / dim as f64 * surface
}

fn ball_of(region: &Region) -> Result<([f64; 3], f64)> {
    match *region {
        Region::Ball { center, radius } => Ok((center, radius)),
        _ => Err(Error::InvalidInput("region must be a ball".into())),
    }
}

/// Entropy of massless data in a ball of radius `R` about `c`:
/// `π R ∫_B (1 - r̃²) T₀₀ + (π D / R) ∫_B f²` with `r̃ = |x - c| / R`.
/// For the unit ball this is `π ∫_B (1 - r²) T₀₀ + π D ∫_B f²`.
pub fn ball_entropy_massless(data: &CauchyData, ball: &Region) -> Result<f64> {
    let q = massless_ball_setup(data, ball)?;
    Ok(ball_entropy_with(data.f(), ball, &q, &data.t00()))
}

fn massless_ball_setup(data: &CauchyData, ball: &Region) -> Result<RegionQuadrature> {
    if data.mass() != 0.0 {
        return Err(Error::MassNotZero(data.mass()));
    }
    ball_of(ball)?;
    ball.validate(data.grid())?;
    Ok(RegionQuadrature::for_data(data.grid(), ball, &[data.f(), data.g()]))
}

pub(crate) fn ball_entropy_with(f: &Field, ball: &Region, q: &RegionQuadrature, t00: &Field) -> f64 {
    let (c, r) = ball_of(ball).expect("checked by caller");
    let d = conformal_weight(f.grid().dim());
    let weight = |x: [f64; 3]| 1.0 - (0..3).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>() / (r * r);
    let bulk = q.integrate_weighted(t00, weight);
    let f2 = q.integrate(&f.map(|v| v * v));
    PI * r * bulk + PI * d / r * f2
}

/// Right-hand side of the improved-tensor form of the ball entropy,
/// `π R ∫_B (1 - r̃²) T₀₀ⁱ + π (D/d) ∮_{∂B} f² dσ`.
pub fn ball_entropy_massless_improved(data: &CauchyData, ball: &Region) -> Result<f64> {
    let q = massless_ball_setup(data, ball)?;
    let (c, r) = ball_of(ball)?;
    let dim = data.dim();
    let density = data.stress_energy();
    let weight = |x: [f64; 3]| 1.0 - (0..3).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>() / (r * r);
    let bulk = q.integrate_weighted(&density.t00i, weight);
    let surface = surface_integral(&data.f().map(|v| v * v), c, r);
    Ok(PI * r * bulk + PI * conformal_weight(dim) / dim as f64 * surface)
}

/// Vertex `x = (x₀, x₁)` of the right wedge `W(x)` in 1+1 dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeVertex {
    pub t: f64,
    pub x: f64,
}

impl WedgeVertex {
    pub fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    pub fn shifted(self, r: [f64; 2]) -> Self {
        Self { t: self.t + r[0], x: self.x + r[1] }
    }
}

fn require_two_dim_massive(data: &CauchyData) -> Result<()> {
    if data.dim() != 1 || data.mass() <= 0.0 {
        return Err(Error::InvalidInput("wedge entropies need d = 1 and m > 0".into()));
    }
    Ok(())
}

fn wedge_pair(data: &CauchyData, v: WedgeVertex) -> Result<(f64, f64)> {
    let evolved = data.evolve(v.t)?;
    let s = HalfSpaceEntropy::new(&evolved, 0);
    Ok((s.entropy(v.x, Side::Right), s.entropy(v.x, Side::Left)))
}

/// Entropy of the right wedge with vertex `v`: the data are evolved to `v.t`
/// and the half-line entropy is taken at the cut `v.x`.
pub fn wedge_entropy(data: &CauchyData, v: WedgeVertex) -> Result<f64> {
    require_two_dim_massive(data)?;
    Ok(wedge_pair(data, v)?.0)
}

/// Entropy of the left (opposite) wedge with vertex `v`.
pub fn opposite_wedge_entropy(data: &CauchyData, v: WedgeVertex) -> Result<f64> {
    require_two_dim_massive(data)?;
    Ok(wedge_pair(data, v)?.1)
}

/// One row of a QDEC profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdecRow {
    pub cut: f64,
    pub entropy: f64,
    /// `2π ∫_{x = cut} T₀₀ dσ`.
    pub slice_integral: f64,
    /// Central second difference of the entropy with the profile's step.
    pub second_difference: f64,
}

/// QDEC profile with finite-difference step `2Δx`.
pub fn qdec_profile(data: &CauchyData, axis: usize, cuts: &[f64]) -> Vec<QdecRow> {
    qdec_profile_with_step(data, axis, cuts, 2.0 * data.grid().dx())
}

pub fn qdec_profile_with_step(data: &CauchyData, axis: usize, cuts: &[f64], step: f64) -> Vec<QdecRow> {
    let s = HalfSpaceEntropy::new(data, axis);
    cuts.iter()
        .map(|&cut| {
            let e = |c: f64| s.entropy(c, Side::Right);
            let mid = e(cut);
            QdecRow {
                cut,
                entropy: mid,
                slice_integral: 2.0 * PI * s.slice(cut),
                second_difference: (e(cut + step) - 2.0 * mid + e(cut - step)) / (step * step),
            }
        })
        .collect()
}

/// Residual of the entropy-balance identity between two wedge vertices:
///
/// ```text
/// [S(x) - S(y)] - [S̄(x) - S̄(y)] - 2π (y₁ - x₁)(Φ, PΦ) - 2π (y₀ - x₀)(Φ, P₁Φ)
/// ```
pub fn entropy_balance_residual(data: &CauchyData, x: WedgeVertex, y: WedgeVertex) -> Result<f64> {
    require_two_dim_massive(data)?;
    if x == y {
        return Ok(0.0);
    }
    let (sx, sbx) = wedge_pair(data, x)?;
    let (sy, sby) = wedge_pair(data, y)?;
    let energy = data.energy_expectation();
    let momentum = data.momentum_expectation(0);
    Ok((sx - sy) - (sbx - sby) - 2.0 * PI * (y.x - x.x) * energy - 2.0 * PI * (y.t - x.t) * momentum)
}

/// `S(x + r + s) + S(x) - S(x + r) - S(x + s)` for spacelike right-pointing `r, s`.
pub fn wedge_convexity_check(data: &CauchyData, x: WedgeVertex, r: [f64; 2], s: [f64; 2]) -> Result<f64> {
    require_two_dim_massive(data)?;
    let spacelike_right = |v: [f64; 2]| v == [0.0, 0.0] || v[1] > v[0].abs();
    if !spacelike_right(r) || !spacelike_right(s) {
        return Err(Error::NotSpacelikeRight);
    }
    let e = |v: WedgeVertex| wedge_entropy(data, v);
    let rs = [r[0] + s[0], r[1] + s[1]];
    Ok(e(x.shifted(rs))? + e(x)? - e(x.shifted(r))? - e(x.shifted(s))?)
}
