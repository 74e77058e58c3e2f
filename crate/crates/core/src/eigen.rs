//! Lowest eigenvalue of `T = -(1 + r²)∇² - r∂_r` on the unit ball, through the
//! symmetric form `∫ (1 + r²)|∇f|²` against `∫ f²`, restricted to radial fields.
//!
//! Radial fields are discretized by finite volumes: cell centres
//! `r_i = (i + ½)Δr`, `Δr = 1/n`, with the Dirichlet value at `r = 1` imposed
//! across the half cell next to the boundary.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMesh {
    dim: usize,
    n: usize,
}

impl RadialMesh {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("dimension {dim} not in 1..=3")));
        }
        if n < 4 {
            return Err(Error::InvalidInput("need at least 4 radial cells".into()));
        }
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    /// `∫ r^{d-1} dr` over cell `i`.
    fn cell_measure(&self, i: usize) -> f64 {
        let d = self.dim as i32;
        let (a, b) = (i as f64 * self.dr(), (i + 1) as f64 * self.dr());
        (b.powi(d) - a.powi(d)) / d as f64
    }

    /// Coupling across the face at `r = (i + 1)Δr`; for the last cell this is
    /// the face at `r = 1` with the boundary half a cell away.
    fn face_coupling(&self, i: usize) -> f64 {
        let r = (i + 1) as f64 * self.dr();
        let gap = if i + 1 == self.n { 0.5 * self.dr() } else { self.dr() };
        (1.0 + r * r) * r.powi(self.dim as i32 - 1) / gap
    }
}

/// Cell-centre samples of a radial function vanishing at `r = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub mesh: RadialMesh,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn from_fn<F: Fn(f64) -> f64>(mesh: RadialMesh, f: F) -> Self {
        let values = (0..mesh.len()).map(|i| f(mesh.node(i))).collect();
        Self { mesh, values }
    }

    /// `∫ (1 + r²) f'² r^{d-1} dr` on the mesh.
    pub fn stiffness(&self) -> f64 {
        let m = &self.mesh;
        let u = &self.values;
        let mut total = 0.0;
        for i in 0..m.len() {
            let next = if i + 1 < m.len() { u[i + 1] } else { 0.0 };
            total += m.face_coupling(i) * (next - u[i]).powi(2);
        }
        total
    }

    /// `∫ f² r^{d-1} dr` on the mesh.
    pub fn mass(&self) -> f64 {
        self.values.iter().enumerate().map(|(i, v)| self.mesh.cell_measure(i) * v * v).sum()
    }

    /// Whether the samples change sign (zeros excluded).
    pub fn changes_sign(&self) -> bool {
        let pos = self.values.iter().any(|&v| v > 0.0);
        let neg = self.values.iter().any(|&v| v < 0.0);
        pos && neg
    }
}

/// `∫(1 + r²) f'² r^{d-1} dr / ∫ f² r^{d-1} dr`.
pub fn rayleigh_quotient(f: &RadialField) -> Result<f64> {
    let den = f.mass();
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(f.stiffness() / den)
}

/// Ground state of the discrete generalized problem `A u = λ W u`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub lambda: f64,
    /// Positive, normalized to `∫ u² r^{d-1} dr = 1`.
    pub state: RadialField,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 10_000;
const ITERATION_TOLERANCE: f64 = 1e-15;

/// Inverse iteration with zero shift.
pub fn ground_state(mesh: RadialMesh) -> Result<GroundState> {
    let n = mesh.len();
    let w: Vec<f64> = (0..n).map(|i| mesh.cell_measure(i)).collect();
    let c: Vec<f64> = (0..n).map(|i| mesh.face_coupling(i)).collect();
    // Tridiagonal A: diag_i = c_{i-1} + c_i, off_i = -c_i between i and i + 1.
    let diag: Vec<f64> = (0..n).map(|i| c[i] + if i > 0 { c[i - 1] } else { 0.0 }).collect();
    let off: Vec<f64> = c[..n - 1].iter().map(|v| -v).collect();

    let mut u = RadialField::from_fn(mesh, |r| 1.0 - r * r);
    let mut lambda = rayleigh_quotient(&u)?;
    for it in 1..=MAX_ITERATIONS {
        let rhs: Vec<f64> = u.values.iter().zip(&w).map(|(a, b)| a * b).collect();
        let mut next = solve_tridiagonal(&diag, &off, &rhs)?;
        let norm = next.iter().zip(&w).map(|(v, m)| m * v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::EigSolveFailure("inverse iteration collapsed".into()));
        }
        let sign = if next.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        for v in &mut next {
            *v *= sign / norm;
        }
        u = RadialField { mesh, values: next };
        let updated = rayleigh_quotient(&u)?;
        let done = (updated - lambda).abs() <= ITERATION_TOLERANCE * updated.abs();
        lambda = updated;
        if done {
            return Ok(GroundState { lambda, state: u, iterations: it });
        }
    }
    Err(Error::EigSolveFailure(format!("inverse iteration did not settle in {MAX_ITERATIONS} steps")))
}

fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::EigSolveFailure("singular tridiagonal system".into()));
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        c[i - 1] = off[i - 1] / pivot;
        pivot = diag[i] - off[i - 1] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::EigSolveFailure("singular tridiagonal system".into()));
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// `λ₁` at `n` and `2n` cells with the second-order Richardson extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda1 {
    pub dim: usize,
    pub coarse: GroundState,
    pub fine: GroundState,
    pub extrapolated: f64,
}

impl Lambda1 {
    /// `|fine - extrapolated| / extrapolated`.
    pub fn resolution_shift(&self) -> f64 {
        (self.fine.lambda - self.extrapolated).abs() / self.extrapolated.abs()
    }
}

pub fn lambda1(dim: usize, n: usize) -> Result<Lambda1> {
    let coarse = ground_state(RadialMesh::new(dim, n)?)?;
    let fine = ground_state(RadialMesh::new(dim, 2 * n)?)?;
    let extrapolated = (4.0 * fine.lambda - coarse.lambda) / 3.0;
    Ok(Lambda1 { dim, coarse, fine, extrapolated })
}
