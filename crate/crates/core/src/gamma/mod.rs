//! The exterior weighted Dirichlet problem
//!
//! ```text
//! Γ_h = inf { ∫_{x ∉ B, x₁ > 0} x₁ (|∇u|² + m² u²) dx : u|_{∂B} = h }
//! ```
//!
//! for an interval (`d = 1`) or a disk (`d = 2`) placed at distance `δ` from
//! the hyperplane `x₁ = 0`.
//!
//! The weight vanishes on `x₁ = 0`, where no boundary condition is imposed by
//! default: the natural condition is the one the infimum selects, and a
//! Dirichlet condition there only changes the value through a term that decays
//! like `1 / |log ε|`. The `d = 1` problem can still impose it at `x₁ = ε`.

mod line;
mod polar;

use std::f64::consts::PI;
use std::sync::Arc;

use crate::cauchy::CauchyData;
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::linalg::{conjugate_gradient, BandCholesky, SparseSym};
use crate::region::{Region, Side};
use crate::spectral::refine;
use crate::{cauchy, bekenstein::Correction};

use line::LineMesh;
use polar::PolarMesh;

/// Unknown count above which the solver switches from banded Cholesky to CG.
pub const DIRECT_LIMIT: usize = 100_000;
/// Relative residual at which conjugate gradients stop.
const CG_TOLERANCE: f64 = 1e-13;

/// Condition at the inner end of the `d = 1` domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerBoundary {
    /// Free end at `x₁ = 0`.
    Natural,
    /// `u(ε) = 0`.
    Dirichlet { eps: f64 },
}

/// Boundary trace `h` on `∂B`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData {
    /// `d = 1`: values at the endpoint nearer to `x₁ = 0` and at the farther one.
    Endpoints { near: f64, far: f64 },
    /// `d = 2`: samples at angles `2πk/n` about the disk centre, measured from the `x₁` axis.
    Circle { values: Vec<f64> },
}

impl BoundaryData {
    pub fn circle(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("circle trace needs at least three finite samples".into()));
        }
        Ok(BoundaryData::Circle { values })
    }

    pub fn circle_from_fn<F: Fn(f64) -> f64>(n: usize, h: F) -> Result<Self> {
        Self::circle((0..n).map(|k| h(2.0 * PI * k as f64 / n as f64)).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            BoundaryData::Endpoints { .. } => 1,
            BoundaryData::Circle { .. } => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            BoundaryData::Endpoints { near, far } if near.is_finite() && far.is_finite() => Ok(()),
            BoundaryData::Endpoints { .. } => Err(Error::InvalidInput("non-finite endpoint value".into())),
            BoundaryData::Circle { values } => Self::circle(values.clone()).map(|_| ()),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.combine(self, |a, _| alpha * a)
    }

    /// Pointwise `½(h₁ + h₂)`; circle traces must have equal length.
    pub fn midpoint(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (BoundaryData::Endpoints { .. }, BoundaryData::Endpoints { .. }) => {}
            (BoundaryData::Circle { values: a }, BoundaryData::Circle { values: b }) if a.len() == b.len() => {}
            _ => return Err(Error::InvalidInput("boundary traces are not compatible".into())),
        }
        Ok(self.combine(other, |a, b| 0.5 * (a + b)))
    }

    fn combine<F: Fn(f64, f64) -> f64>(&self, other: &Self, op: F) -> Self {
        match (self, other) {
            (BoundaryData::Endpoints { near, far }, BoundaryData::Endpoints { near: n2, far: f2 }) => {
                BoundaryData::Endpoints { near: op(*near, *n2), far: op(*far, *f2) }
            }
            (BoundaryData::Circle { values: a }, BoundaryData::Circle { values: b }) => {
                BoundaryData::Circle { values: a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect() }
            }
            _ => unreachable!("checked by callers"),
        }
    }

    /// The trace seen after reflecting `x₁ ↦ 2c₁ - x₁` about the centre of `B`.
    pub fn mirrored(&self) -> Self {
        match self {
            BoundaryData::Endpoints { near, far } => BoundaryData::Endpoints { near: *far, far: *near },
            BoundaryData::Circle { values } => {
                let n = values.len();
                // θ ↦ π - θ; exact on the sample lattice when n is even.
                if n % 2 == 0 {
                    BoundaryData::Circle { values: (0..n).map(|k| values[(n / 2 + n - k) % n]).collect() }
                } else {
                    let src = self.clone();
                    BoundaryData::Circle {
                        values: (0..n).map(|k| src.circle_value(PI - 2.0 * PI * k as f64 / n as f64)).collect(),
                    }
                }
            }
        }
    }

    /// Trigonometric interpolant of a circle trace.
    pub fn circle_value(&self, theta: f64) -> f64 {
        let BoundaryData::Circle { values } = self else {
            panic!("circle_value on an endpoint trace");
        };
        let n = values.len();
        let nf = n as f64;
        let mut out = 0.0;
        for k in 0..=n / 2 {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let ph = 2.0 * PI * (k * j) as f64 / nf;
                a += v * ph.cos();
                b += v * ph.sin();
            }
            let w = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
            out += w / nf * (a * (k as f64 * theta).cos() + b * (k as f64 * theta).sin());
        }
        out
    }

    /// Samples at `m` equispaced angles (the samples themselves when `m` matches).
    fn on_circle(&self, m: usize) -> Vec<f64> {
        match self {
            BoundaryData::Circle { values } if values.len() == m => values.clone(),
            BoundaryData::Circle { .. } => (0..m).map(|k| self.circle_value(2.0 * PI * k as f64 / m as f64)).collect(),
            BoundaryData::Endpoints { .. } => unreachable!("checked by the caller"),
        }
    }

    /// Trace of a grid field on `∂B`, in the coordinates of the exterior problem
    /// whose cut lies on `side` of `B` (left cut for [`Side::Right`]).
    pub fn from_field(f: &Field, ball: &Region, side: Side, samples: usize) -> Result<Self> {
        let dim = f.grid().dim();
        let c = ball.center();
        let r = ball.half_width(dim);
        let axis = ball.narrow_axis(dim);
        let sgn = if side == Side::Right { 1.0 } else { -1.0 };
        match dim {
            1 => {
                let at = |s: f64| {
                    let mut x = [0.0; 3];
                    x[0] = c[0] + s * r;
                    f.interpolate(x)
                };
                Ok(BoundaryData::Endpoints { near: at(-sgn), far: at(sgn) })
            }
            2 => {
                if !matches!(ball, Region::Ball { .. }) || axis != 0 {
                    return Err(Error::InvalidInput("d = 2 traces need a ball".into()));
                }
                Self::circle_from_fn(samples, |th| {
                    f.interpolate([c[0] + sgn * r * th.cos(), c[1] + r * th.sin(), 0.0])
                })
            }
            _ => Err(Error::InvalidInput("exterior problems exist for d = 1 and d = 2 only".into())),
        }
    }
}

/// Placement and discretization of the exterior problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorProblem {
    pub dim: usize,
    /// Half-width `R` of `B`.
    pub radius: f64,
    /// Gap `δ` between `B` and `x₁ = 0`.
    pub offset: f64,
    pub mass: f64,
    /// Outer truncation: `x₁ ≤ L_out` (`d = 1`) or `|x - c| ≤ L_out` (`d = 2`).
    pub lout: f64,
    /// Nodes per segment (`d = 1`) or angular nodes (`d = 2`).
    pub resolution: usize,
    pub inner: InnerBoundary,
    /// Largest relative change of `Γ` tolerated when `L_out` doubles.
    pub truncation_tolerance: f64,
}

impl ExteriorProblem {
    /// Defaults: `L_out = 200R` and 256 angles for `d = 2`; `L_out = δ + 42R`
    /// and 4000 nodes per segment for `d = 1`.
    pub fn new(dim: usize, radius: f64, offset: f64, mass: f64) -> Result<Self> {
        let (lout, resolution) = match dim {
            1 => (offset + 42.0 * radius, 4000),
            2 => (200.0 * radius, 256),
            _ => return Err(Error::InvalidInput("exterior problems exist for d = 1 and d = 2 only".into())),
        };
        let p = Self {
            dim,
            radius,
            offset,
            mass,
            lout,
            resolution,
            inner: InnerBoundary::Natural,
            truncation_tolerance: 1e-2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lout(self, lout: f64) -> Result<Self> {
        let p = Self { lout, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_resolution(self, resolution: usize) -> Result<Self> {
        let p = Self { resolution, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_inner(self, inner: InnerBoundary) -> Result<Self> {
        let p = Self { inner, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mass(self, mass: f64) -> Result<Self> {
        let p = Self { mass, ..self };
        p.validate()?;
        Ok(p)
    }

    /// The problem for `λB` (placement and truncation scaled too) with mass `mass`.
    pub fn dilated(self, lambda: f64, mass: f64) -> Result<Self> {
        let inner = match self.inner {
            InnerBoundary::Dirichlet { eps } => InnerBoundary::Dirichlet { eps: lambda * eps },
            other => other,
        };
        let p = Self {
            radius: lambda * self.radius,
            offset: lambda * self.offset,
            lout: lambda * self.lout,
            mass,
            inner,
            ..self
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.into()));
        if !(self.radius > 0.0) || !(self.offset > 0.0) || !(self.mass >= 0.0) || !self.mass.is_finite() {
            return bad("need R > 0, δ > 0 and a finite m ≥ 0");
        }
        if !(self.truncation_tolerance > 0.0) {
            return bad("truncation tolerance must be positive");
        }
        match self.dim {
            1 => {
                if self.resolution < 8 {
                    return bad("need at least 8 nodes per segment");
                }
                if !(self.lout > self.offset + 2.0 * self.radius) {
                    return bad("L_out must lie beyond B");
                }
                if let InnerBoundary::Dirichlet { eps } = self.inner {
                    if !(eps > 0.0 && eps < self.offset) {
                        return bad("need 0 < ε < δ");
                    }
                }
            }
            2 => {
                if self.resolution < 8 {
                    return bad("need at least 8 angular nodes");
                }
                let spacing = 2.0 * PI * self.radius / self.resolution as f64;
                if self.offset < spacing {
                    return bad("B must clear x₁ = 0 by at least one mesh spacing");
                }
                if !(self.lout > 2.0 * self.radius + self.offset) {
                    return bad("L_out must exceed 2R + δ");
                }
                if self.inner != InnerBoundary::Natural {
                    return bad("an inner Dirichlet condition is only available for d = 1");
                }
            }
            _ => return bad("exterior problems exist for d = 1 and d = 2 only"),
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Mesh {
    Line(LineMesh),
    Polar(PolarMesh),
}

impl Mesh {
    fn len(&self) -> usize {
        match self {
            Mesh::Line(m) => m.len(),
            Mesh::Polar(m) => m.len(),
        }
    }
}

#[derive(Debug)]
struct Discretization {
    problem: ExteriorProblem,
    mesh: Mesh,
    /// `K + m² M` over all nodes.
    system: SparseSym,
    /// Nodes whose incident elements carry no weight; pinned to zero.
    degenerate: Vec<bool>,
}

enum Factor {
    Direct(BandCholesky),
    Iterative,
}

/// Factorized exterior problem, reusable across boundary traces.
pub struct ExteriorSolver {
    disc: Arc<Discretization>,
    /// Free nodes (everything not fixed by a boundary condition).
    free: Vec<usize>,
    free_mask: Vec<bool>,
    reduced: SparseSym,
    factor: Factor,
}

impl ExteriorSolver {
    pub fn new(problem: &ExteriorProblem) -> Result<Self> {
        problem.validate()?;
        let mesh = match problem.dim {
            1 => Mesh::Line(LineMesh::new(problem)),
            _ => Mesh::Polar(PolarMesh::new(problem)),
        };
        let (stiff, mass) = match &mesh {
            Mesh::Line(m) => m.assemble(),
            Mesh::Polar(m) => m.assemble(),
        };
        let m2 = problem.mass * problem.mass;
        let n = mesh.len();
        let mut asm = crate::linalg::Assembler::new(n);
        for i in 0..n {
            for (j, v) in stiff.row(i) {
                if j >= i {
                    asm.add(i, j, v);
                }
            }
            if m2 > 0.0 {
                for (j, v) in mass.row(i) {
                    if j >= i {
                        asm.add(i, j, m2 * v);
                    }
                }
            }
        }
        let system = asm.finish();
        let kdiag = stiff.diagonal();
        let kmax = kdiag.iter().fold(0.0f64, |a, &b| a.max(b));
        let degenerate: Vec<bool> = kdiag.iter().map(|&d| d <= 1e-14 * kmax).collect();

        let probe = match problem.dim {
            1 => BoundaryData::Endpoints { near: 0.0, far: 0.0 },
            _ => BoundaryData::Circle { values: vec![0.0; problem.resolution] },
        };
        let fixed = match &mesh {
            Mesh::Line(m) => m.fixed(&probe),
            Mesh::Polar(m) => m.fixed(&probe),
        };
        let mut free_mask: Vec<bool> = degenerate.iter().map(|d| !d).collect();
        for (i, _) in fixed {
            free_mask[i] = false;
        }
        let free: Vec<usize> = (0..n).filter(|&i| free_mask[i]).collect();
        let reduced = system.submatrix(&free);
        let factor = if free.len() <= DIRECT_LIMIT {
            Factor::Direct(BandCholesky::factor(&reduced)?)
        } else {
            Factor::Iterative
        };
        let disc = Discretization { problem: *problem, mesh, system, degenerate };
        Ok(Self { disc: Arc::new(disc), free, free_mask, reduced, factor })
    }

    pub fn problem(&self) -> &ExteriorProblem {
        &self.disc.problem
    }

    pub fn unknowns(&self) -> usize {
        self.free.len()
    }

    /// Largest relative asymmetry of the assembled system.
    pub fn asymmetry(&self) -> f64 {
        self.disc.system.asymmetry()
    }

    fn check_trace(&self, h: &BoundaryData) -> Result<()> {
        h.validate()?;
        if h.dim() != self.disc.problem.dim {
            return Err(Error::InvalidInput("boundary trace does not match the problem dimension".into()));
        }
        Ok(())
    }

    /// Full nodal vector with the boundary values set and the right-hand side of the free block.
    fn boundary_setup(&self, h: &BoundaryData) -> (Vec<f64>, Vec<f64>) {
        let n = self.disc.mesh.len();
        let mut u = vec![0.0; n];
        let fixed = match &self.disc.mesh {
            Mesh::Line(m) => m.fixed(h),
            Mesh::Polar(m) => m.fixed(h),
        };
        for (i, v) in fixed {
            u[i] = v;
        }
        let au = self.disc.system.matvec(&u);
        let rhs = self.free.iter().map(|&i| -au[i]).collect();
        (u, rhs)
    }

    fn assemble_solution(&self, mut u: Vec<f64>, free_values: &[f64]) -> Minimizer {
        for (&i, &v) in self.free.iter().zip(free_values) {
            u[i] = v;
        }
        Minimizer { disc: Arc::clone(&self.disc), values: u, free_mask: self.free_mask.clone() }
    }

    pub fn solve(&self, h: &BoundaryData) -> Result<Minimizer> {
        self.check_trace(h)?;
        let (u, rhs) = self.boundary_setup(h);
        let x = match &self.factor {
            Factor::Direct(f) => f.solve(&rhs),
            Factor::Iterative => {
                conjugate_gradient(&self.reduced, &rhs, &vec![0.0; rhs.len()], CG_TOLERANCE, 20 * rhs.len())?
            }
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolveFailure("non-finite solution".into()));
        }
        Ok(self.assemble_solution(u, &x))
    }

    /// Conjugate gradients from the given free-node start vector.
    pub fn solve_iterative(&self, h: &BoundaryData, start: &[f64]) -> Result<Minimizer> {
        self.check_trace(h)?;
        if start.len() != self.free.len() {
            return Err(Error::InvalidInput("start vector length differs from the unknown count".into()));
        }
        let (u, rhs) = self.boundary_setup(h);
        let x = conjugate_gradient(&self.reduced, &rhs, start, CG_TOLERANCE, 20 * rhs.len().max(100))?;
        Ok(self.assemble_solution(u, &x))
    }

    /// `Γ` on this truncation with its flux cross-check.
    pub fn evaluate(&self, h: &BoundaryData) -> Result<GammaEstimate> {
        let u = self.solve(h)?;
        Ok(GammaEstimate { volume: u.energy(), flux: u.flux() })
    }
}

/// Discrete minimizer on the exterior mesh.
#[derive(Debug, Clone)]
pub struct Minimizer {
    disc: Arc<Discretization>,
    values: Vec<f64>,
    free_mask: Vec<bool>,
}

impl Minimizer {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mesh node coordinates (`x₁`, `x₂`); `x₂ = 0` in one dimension.
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        match &self.disc.mesh {
            Mesh::Line(m) => m.x.iter().map(|&x| [x, 0.0]).collect(),
            Mesh::Polar(m) => m.nodes.clone(),
        }
    }

    /// Whether each node is a free unknown (not fixed by a boundary condition).
    pub fn free_nodes(&self) -> &[bool] {
        &self.free_mask
    }

    /// `𝔍(u) = ∫ x₁ (|∇u|² + m² u²)` of the piecewise-linear field.
    pub fn energy(&self) -> f64 {
        self.disc.system.quadratic_form(&self.values)
    }

    /// `𝔍` of another nodal vector on the same mesh.
    pub fn energy_of(&self, values: &[f64]) -> f64 {
        self.disc.system.quadratic_form(values)
    }

    /// Boundary-flux form of `Γ`.
    pub fn flux(&self) -> f64 {
        match &self.disc.mesh {
            Mesh::Line(m) => m.flux(&self.values),
            Mesh::Polar(m) => m.flux(&self.values),
        }
    }

    /// Relative strong-form residual `∂₁u - x₁(m²u - ∇²u)` at interior nodes.
    pub fn strong_residual(&self) -> f64 {
        let mass = self.disc.problem.mass;
        match &self.disc.mesh {
            Mesh::Line(m) => m.strong_residual(&self.values, mass),
            Mesh::Polar(m) => m.strong_residual(&self.values, mass, &self.free_mask),
        }
    }

    /// `max |a(u, w)|` over free-node hat functions `w`, relative to `max |A| |u|`.
    pub fn galerkin_residual(&self) -> f64 {
        let au = self.disc.system.matvec(&self.values);
        let scale = self.disc.system.diagonal().iter().fold(0.0f64, |a, &b| a.max(b.abs()))
            * self.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let worst = au.iter().zip(&self.free_mask).filter(|(_, f)| **f).fold(0.0f64, |a, (v, _)| a.max(v.abs()));
        worst / scale
    }

    /// Value at a point of the exterior coordinates; `None` inside `B`. Points
    /// with `x₁ < 0` are not part of the domain and also give `None`.
    pub fn value_at(&self, x: [f64; 2]) -> Option<f64> {
        if x[0] < 0.0 {
            return None;
        }
        match &self.disc.mesh {
            Mesh::Line(m) => m.value_at(&self.values, x[0]),
            Mesh::Polar(m) => m.value_at(&self.values, x),
        }
    }

    pub fn problem(&self) -> &ExteriorProblem {
        &self.disc.problem
    }

    /// Nodes pinned to zero because no element around them carries weight.
    pub fn degenerate_count(&self) -> usize {
        self.disc.degenerate.iter().filter(|d| **d).count()
    }

    /// Largest mesh spacing at `∂B`.
    pub fn boundary_spacing(&self) -> f64 {
        match &self.disc.mesh {
            Mesh::Line(m) => m.spacing_at_boundary(),
            Mesh::Polar(m) => m.spacing_at_boundary(),
        }
    }
}

/// Weights of the first derivative at `x0` from values at `xs` (Lagrange).
pub(crate) fn fd_first_derivative(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let mut total = 0.0;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let mut term = 1.0 / (xs[i] - xs[k]);
                for l in 0..n {
                    if l != i && l != k {
                        term *= (x0 - xs[l]) / (xs[i] - xs[l]);
                    }
                }
                total += term;
            }
            total
        })
        .collect()
}

/// `Γ` by volume quadrature and by boundary flux on one truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub volume: f64,
    pub flux: f64,
}

impl GammaEstimate {
    pub fn flux_mismatch(&self) -> f64 {
        relative(self.volume, self.flux)
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `Γ_h` with its truncation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    /// `𝔍(u_h)` at the requested `L_out`.
    pub value: f64,
    /// Boundary-flux form at the requested `L_out`.
    pub flux: f64,
    /// `𝔍(u_h)` with `L_out` doubled.
    pub doubled: f64,
    /// `|value - doubled| / |doubled|`.
    pub shift: f64,
    pub lout: f64,
}

impl GammaValue {
    pub fn flux_mismatch(&self) -> f64 {
        relative(self.value, self.flux)
    }
}

/// `Γ_h` at `p.lout`, checked against the run at `2 p.lout`.
pub fn gamma(p: &ExteriorProblem, h: &BoundaryData) -> Result<GammaValue> {
    let near = ExteriorSolver::new(p)?.evaluate(h)?;
    let far = ExteriorSolver::new(&p.with_lout(2.0 * p.lout)?)?.evaluate(h)?;
    let shift = relative(near.volume, far.volume);
    if shift > p.truncation_tolerance {
        return Err(Error::TruncationNotConverged { shift, tolerance: p.truncation_tolerance });
    }
    Ok(GammaValue { value: near.volume, flux: near.flux, doubled: far.volume, shift, lout: p.lout })
}

/// Every quantitative claim about `Γ(h, m, B)` evaluated on one discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProperties {
    pub gamma_h1: f64,
    pub gamma_h2: f64,
    pub gamma_mid: f64,
    /// `½Γ(h₁) + ½Γ(h₂) - Γ(½(h₁ + h₂))`.
    pub convexity_gap_h: f64,
    pub masses: Vec<f64>,
    /// `Γ(h₁, mᵢ)`.
    pub gamma_by_mass: Vec<f64>,
    /// `Γ(h₁, mᵢ₊₁) - Γ(h₁, mᵢ)`.
    pub mass_increments: Vec<f64>,
    /// `½Γ(mᵢ) + ½Γ(mᵢ₊₁) - Γ(½(mᵢ + mᵢ₊₁))` for consecutive masses.
    pub convexity_gaps_m: Vec<f64>,
    /// `Γ(2h₁) / (4Γ(h₁)) - 1`.
    pub homogeneity_error: f64,
    pub lambda: f64,
    /// `Γ(h_λ, λm, λB) / (λ² Γ(h, m, B)) - 1`.
    pub scaling_error: f64,
    /// `Γ(h_λ, m/λ, λB) / (λ^{d-1} Γ(h, m, B)) - 1`, the law the functional obeys
    /// under `x ↦ λx`.
    pub dimensional_scaling_error: f64,
    /// Absolute tolerance for sign conditions, `10⁻⁸ · max Γ`.
    pub tolerance: f64,
}

impl GammaProperties {
    pub fn convex_in_h(&self) -> bool {
        self.convexity_gap_h >= -self.tolerance
    }

    pub fn nondecreasing_in_m(&self) -> bool {
        self.mass_increments.iter().all(|&d| d >= -self.tolerance)
    }

    pub fn convex_in_m(&self) -> bool {
        self.convexity_gaps_m.iter().all(|&d| d >= -self.tolerance)
    }
}

/// Convexity in `h` and `m`, monotonicity in `m`, homogeneity and scaling at `λ = 1.5`.
pub fn gamma_properties_report(
    p: &ExteriorProblem,
    h1: &BoundaryData,
    h2: &BoundaryData,
    masses: &[f64],
) -> Result<GammaProperties> {
    let solver = ExteriorSolver::new(p)?;
    let g = |s: &ExteriorSolver, h: &BoundaryData| s.solve(h).map(|u| u.energy());
    let gamma_h1 = g(&solver, h1)?;
    let gamma_h2 = g(&solver, h2)?;
    let gamma_mid = g(&solver, &h1.midpoint(h2)?)?;
    let convexity_gap_h = 0.5 * (gamma_h1 + gamma_h2) - gamma_mid;

    let at_mass = |m: f64| -> Result<f64> {
        let s = ExteriorSolver::new(&p.with_mass(m)?)?;
        g(&s, h1)
    };
    let gamma_by_mass = masses.iter().map(|&m| at_mass(m)).collect::<Result<Vec<_>>>()?;
    let mass_increments = gamma_by_mass.windows(2).map(|w| w[1] - w[0]).collect();
    let mut convexity_gaps_m = Vec::new();
    for (w, gw) in masses.windows(2).zip(gamma_by_mass.windows(2)) {
        let mid = at_mass(0.5 * (w[0] + w[1]))?;
        convexity_gaps_m.push(0.5 * (gw[0] + gw[1]) - mid);
    }

    let homogeneity_error = g(&solver, &h1.scaled(2.0))? / (4.0 * gamma_h1) - 1.0;
    let lambda = 1.5;
    let literal = g(&ExteriorSolver::new(&p.dilated(lambda, lambda * p.mass)?)?, h1)?;
    let scaling_error = literal / (lambda * lambda * gamma_h1) - 1.0;
    let natural = g(&ExteriorSolver::new(&p.dilated(lambda, p.mass / lambda)?)?, h1)?;
    let dimensional_scaling_error = natural / (lambda.powi(p.dim as i32 - 1) * gamma_h1) - 1.0;

    let scale = [gamma_h1, gamma_h2, gamma_mid].iter().chain(&gamma_by_mass).fold(0.0f64, |a, b| a.max(b.abs()));
    Ok(GammaProperties {
        gamma_h1,
        gamma_h2,
        gamma_mid,
        convexity_gap_h,
        masses: masses.to_vec(),
        gamma_by_mass,
        mass_increments,
        convexity_gaps_m,
        homogeneity_error,
        lambda,
        scaling_error,
        dimensional_scaling_error,
        tolerance: 1e-8 * scale,
    })
}

/// Map from field coordinates to the exterior coordinates of the problem whose
/// cut lies on `side` of `B` (`x₁` measured from the cut, pointing into `B`).
fn to_exterior(x: [f64; 3], ball: &Region, side: Side, offset: f64, dim: usize) -> [f64; 2] {
    let c = ball.center();
    let r = ball.half_width(dim);
    let sgn = if side == Side::Right { 1.0 } else { -1.0 };
    let x1 = sgn * (x[0] - c[0]) + r + offset;
    [x1, if dim > 1 { x[1] - c[1] } else { 0.0 }]
}

/// Inverse of [`to_exterior`].
fn from_exterior(y: [f64; 2], ball: &Region, side: Side, offset: f64, dim: usize) -> [f64; 3] {
    let c = ball.center();
    let r = ball.half_width(dim);
    let sgn = if side == Side::Right { 1.0 } else { -1.0 };
    let mut x = [0.0; 3];
    x[0] = c[0] + sgn * (y[0] - r - offset);
    if dim > 1 {
        x[1] = c[1] + y[1];
    }
    x
}

/// `f̃`: `f` on `B̄`, the exterior field `u` outside, evenly reflected across `x₁ = 0`.
#[derive(Debug, Clone)]
pub struct GluedExtension {
    pub field: Field,
    /// `∫ √(|p|² + m²) |f̃^|²` on the field grid.
    pub norm_plus: f64,
    /// The same with the grid refined once.
    pub refined_norm_plus: f64,
}

impl GluedExtension {
    pub fn norm_change(&self) -> f64 {
        relative(self.norm_plus, self.refined_norm_plus)
    }

    /// Membership test for `H_{m,+}`: the spectral norm is stable under refinement.
    pub fn converged(&self, tolerance: f64) -> bool {
        self.norm_change() <= tolerance
    }
}

/// Glue `f` (inside `B`) to the exterior minimizer `u` and resample on `f`'s grid.
/// `side` names the half-space whose cut the exterior problem was posed for.
pub fn glue_extension(f: &Field, u: &Minimizer, ball: &Region, side: Side) -> Result<GluedExtension> {
    let grid = *f.grid();
    let dim = grid.dim();
    let p = *u.problem();
    if p.dim != dim {
        return Err(Error::InvalidInput("exterior problem and field differ in dimension".into()));
    }
    if !matches!(ball, Region::Ball { .. }) || (ball.half_width(dim) - p.radius).abs() > 1e-12 * p.radius {
        return Err(Error::InvalidInput("ball does not match the exterior problem".into()));
    }
    ball.validate(&grid)?;
    // Trace agreement on ∂B.
    let fmax = f.max_abs();
    let mut worst = 0.0f64;
    let samples = if dim == 1 { 2 } else { 4 * p.resolution };
    for k in 0..samples {
        let y = if dim == 1 {
            [p.offset + if k == 0 { 0.0 } else { 2.0 * p.radius }, 0.0]
        } else {
            let th = 2.0 * PI * k as f64 / samples as f64;
            [p.offset + p.radius * (1.0 + th.cos()), p.radius * th.sin()]
        };
        // Evaluate the exterior field just outside the boundary.
        let c = [p.offset + p.radius, 0.0];
        let out = [c[0] + (y[0] - c[0]) * (1.0 + 1e-12), c[1] + (y[1] - c[1]) * (1.0 + 1e-12)];
        let uv = u.value_at(out).unwrap_or(0.0);
        let fv = f.interpolate(from_exterior(y, ball, side, p.offset, dim));
        worst = worst.max((uv - fv).abs());
    }
    let trace_tol = 1e-4 * fmax.max(f64::MIN_POSITIVE) + 1e-12;
    if worst > trace_tol {
        return Err(Error::TraceMismatch(worst));
    }

    let fine_f = refine(f);
    let glue = |field: &Field, coarse_f: &Field| -> Result<Field> {
        let g = *field.grid();
        let mut out = g.zeros();
        for (i, slot) in out.values_mut().iter_mut().enumerate() {
            let x = g.point(i);
            *slot = if ball.contains(x, dim) {
                coarse_f.values()[i]
            } else {
                let y = to_exterior(x, ball, side, p.offset, dim);
                let y = [y[0].abs(), y[1]];
                match u.value_at(y) {
                    Some(v) => v,
                    // The reflection landed inside B.
                    None => coarse_f.interpolate(from_exterior(y, ball, side, p.offset, dim)),
                }
            };
        }
        Ok(out)
    };
    let field = glue(f, f)?;
    let fine = glue(&fine_f, &fine_f)?;
    let mass = p.mass;
    let norm = |g: &Field| cauchy::norm_pm(g, mass, cauchy::Sign::Plus);
    Ok(GluedExtension { norm_plus: norm(&field)?, refined_norm_plus: norm(&fine)?, field })
}

/// Placement and discretization template for [`gamma_correction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionSettings {
    /// `δ / R`.
    pub relative_offset: f64,
    /// `L_out / R`.
    pub relative_lout: f64,
    pub resolution: usize,
    pub truncation_tolerance: f64,
}

impl Default for CorrectionSettings {
    fn default() -> Self {
        Self { relative_offset: 0.1, relative_lout: 200.0, resolution: 128, truncation_tolerance: 1e-2 }
    }
}

/// `Γ` for the two cut orientations and the combined correction
/// `Γ_Φ = (π/2)(Γ_h + Γ_h̄)` entering `S ≤ 2π(R + δ)E + Γ_Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionReport {
    pub right: GammaValue,
    pub left: GammaValue,
    pub correction: Correction,
}

pub fn gamma_correction(data: &CauchyData, ball: &Region, settings: CorrectionSettings) -> Result<CorrectionReport> {
    let dim = data.dim();
    let r = ball.half_width(dim);
    if !matches!(ball, Region::Ball { .. }) {
        return Err(Error::InvalidInput("the boundary correction is computed for balls".into()));
    }
    let mut p = ExteriorProblem::new(dim, r, settings.relative_offset * r, data.mass())?;
    if dim == 2 {
        p = p.with_lout(settings.relative_lout * r)?.with_resolution(settings.resolution)?;
    } else {
        p = p.with_lout(p.offset + settings.relative_lout * r)?;
    }
    p.truncation_tolerance = settings.truncation_tolerance;
    let trace = |side| BoundaryData::from_field(data.f(), ball, side, p.resolution);
    let right = gamma(&p, &trace(Side::Right)?)?;
    let left = gamma(&p, &trace(Side::Left)?)?;
    let value = 0.5 * PI * (right.value + left.value);
    Ok(CorrectionReport { right, left, correction: Correction { value, placement_offset: p.offset } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_weights_are_exact_for_cubics() {
        let xs = [1.0, 1.1, 1.25, 1.45];
        let w = fd_first_derivative(1.0, &xs);
        let d: f64 = xs.iter().zip(&w).map(|(x, w)| w * x.powi(3)).sum();
        assert!((d - 3.0).abs() < 1e-10);
    }

    #[test]
    fn mirrored_trace_reflects_angles() {
        let h = BoundaryData::circle_from_fn(16, |t| t.cos() + 0.3 * t.sin()).unwrap();
        let m = h.mirrored();
        let BoundaryData::Circle { values } = &m else { unreachable!() };
        for (k, v) in values.iter().enumerate() {
            let t = 2.0 * PI * k as f64 / 16.0;
            assert!((v - (-t.cos() + 0.3 * t.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn trig_interpolation_reproduces_samples() {
        let h = BoundaryData::circle_from_fn(12, |t| (2.0 * t).sin() + 0.5).unwrap();
        assert!((h.circle_value(0.3) - ((0.6f64).sin() + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn zero_trace_has_zero_gamma() {
        for p in [
            ExteriorProblem::new(1, 1.0, 0.5, 1.0).unwrap().with_resolution(200).unwrap(),
            ExteriorProblem::new(2, 1.0, 0.2, 0.5).unwrap().with_resolution(32).unwrap(),
        ] {
            let h = if p.dim == 1 {
                BoundaryData::Endpoints { near: 0.0, far: 0.0 }
            } else {
                BoundaryData::Circle { values: vec![0.0; 32] }
            };
            let u = ExteriorSolver::new(&p).unwrap().solve(&h).unwrap();
            assert!(u.values().iter().all(|&v| v == 0.0));
            assert_eq!(u.energy(), 0.0);
        }
    }
}
