//! Integration-by-parts identities on a ball, evaluated with spectral
//! derivatives, the smooth region rule for volume terms and interpolated
//! surface rules for boundary terms.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::region::{sphere_rule, surface_integral, Region, RegionQuadrature};
use crate::spectral::{gradient, laplacian, SpectralField};

/// Terms of `∫_B f div(u∇g) + ∫_B ∇f·(u∇g) - ∮_{∂B} f u ∂_n g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceCheck {
    pub divergence_term: f64,
    pub gradient_term: f64,
    pub surface_term: f64,
}

impl DivergenceCheck {
    pub fn residual(&self) -> f64 {
        self.divergence_term + self.gradient_term - self.surface_term
    }

    /// Residual relative to the largest of the three terms.
    pub fn relative(&self) -> f64 {
        relative_to(self.residual(), &[self.divergence_term, self.gradient_term, self.surface_term])
    }
}

/// Terms of `∫_B (R² - r²) ∇²(f²) = 2R ∮_{∂B} f² - 2d ∫_B f²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianIdentity {
    pub weighted_laplacian: f64,
    /// `2R ∮ f²`.
    pub surface_term: f64,
    /// `2d ∫_B f²`.
    pub volume_term: f64,
}

impl LaplacianIdentity {
    pub fn residual(&self) -> f64 {
        self.weighted_laplacian - (self.surface_term - self.volume_term)
    }

    pub fn relative(&self) -> f64 {
        relative_to(self.residual(), &[self.weighted_laplacian, self.surface_term, self.volume_term])
    }
}

fn relative_to(residual: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if scale == 0.0 {
        residual.abs()
    } else {
        residual.abs() / scale
    }
}

fn ball_params(ball: &Region) -> Result<([f64; 3], f64)> {
    match *ball {
        Region::Ball { center, radius } => Ok((center, radius)),
        _ => Err(Error::InvalidInput("region must be a ball".into())),
    }
}

fn same_grid(fields: &[&Field]) -> Result<()> {
    let grid = fields[0].grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

pub fn divergence_identity_residual(f: &Field, g: &Field, u: &Field, ball: &Region) -> Result<DivergenceCheck> {
    same_grid(&[f, g, u])?;
    let (center, radius) = ball_params(ball)?;
    let grid = f.grid();
    let dim = grid.dim();
    ball.validate(grid)?;
    let q = RegionQuadrature::for_data(grid, ball, &[f]);

    let grad_g = gradient(g);
    let grad_f = gradient(f);
    let flux: Vec<Field> = grad_g.iter().map(|c| c.zip_map(u, |a, b| a * b)).collect();
    let mut div = grid.zeros();
    for (axis, component) in flux.iter().enumerate() {
        let d = SpectralField::forward(component).derivative(axis).inverse();
        div = div.zip_map(&d, |a, b| a + b);
    }
    let divergence_term = q.integrate(&f.zip_map(&div, |a, b| a * b));
    let mut dot = grid.zeros();
    for (gf, fl) in grad_f.iter().zip(&flux) {
        dot = dot.zip_map(&gf.zip_map(fl, |a, b| a * b), |a, b| a + b);
    }
    let gradient_term = q.integrate(&dot);

    let surface_term = sphere_rule(center, radius, dim, grid.dx())
        .iter()
        .map(|p| {
            let dn: f64 = (0..dim).map(|a| p.normal[a] * grad_g[a].interpolate(p.x)).sum();
            p.weight * f.interpolate(p.x) * u.interpolate(p.x) * dn
        })
        .sum();
    Ok(DivergenceCheck { divergence_term, gradient_term, surface_term })
}

pub fn laplacian_identity(f: &Field, ball: &Region) -> Result<LaplacianIdentity> {
    let (center, radius) = ball_params(ball)?;
    let grid = f.grid();
    let dim = grid.dim();
    ball.validate(grid)?;
    let q = RegionQuadrature::new(grid, ball);
    let f2 = f.map(|v| v * v);
    let lap = laplacian(&f2);
    let weight = |x: [f64; 3]| radius * radius - (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>();
    let weighted_laplacian = q.integrate_weighted(&lap, weight);
    let surface_term = 2.0 * radius * surface_integral(&f2, center, radius);
    let volume_term = 2.0 * dim as f64 * q.integrate(&f2);
    Ok(LaplacianIdentity { weighted_laplacian, surface_term, volume_term })
}
