//! Two-dimensional exterior problem: the disk of radius `R` centred at
//! `c = (R + δ, 0)`, complemented in the half-plane `x₁ > 0` and truncated at
//! `|x - c| = L_out`.
//!
//! The mesh is uniform in `(s, θ)` with `ρ = |x - c| = R eˢ`. The map is
//! conformal, so the form becomes
//!
//! ```text
//! ∫∫ x₁ (u_s² + u_θ²) ds dθ + m² ∫∫ x₁ ρ² u² ds dθ,   x₁ = R + δ + ρ cos θ,
//! ```
//!
//! discretized with bilinear elements on square cells (`Δs ≈ Δθ = 2π/M`).
//! Cells reaching into `x₁ < 0` are integrated with the clipped weight `max(x₁, 0)`
//! on a sub-cell Gauss rule.

use std::f64::consts::PI;

use super::{fd_first_derivative, BoundaryData, ExteriorProblem};
use crate::linalg::{Assembler, SparseSym};
use crate::quadrature::gauss_legendre;

/// Sub-cells per direction for cells cut by `x₁ = 0`.
const CLIP_SUBCELLS: usize = 8;

#[derive(Debug, Clone)]
pub(crate) struct PolarMesh {
    pub center: [f64; 2],
    pub radius: f64,
    pub ds: f64,
    pub rings: usize,
    pub angles: usize,
    pub nodes: Vec<[f64; 2]>,
}

impl PolarMesh {
    pub fn new(p: &ExteriorProblem) -> Self {
        let m = p.resolution;
        let dth = 2.0 * PI / m as f64;
        let smax = (p.lout / p.radius).ln();
        let intervals = ((smax / dth).round() as usize).max(2);
        let ds = smax / intervals as f64;
        let center = [p.radius + p.offset, 0.0];
        let mut mesh = Self { center, radius: p.radius, ds, rings: intervals + 1, angles: m, nodes: vec![[0.0; 2]; (intervals + 1) * m] };
        for j in 0..=intervals {
            let rho = if j == intervals { p.lout } else { p.radius * (j as f64 * ds).exp() };
            for k in 0..m {
                let th = dth * k as f64;
                let i = mesh.index(j, k);
                mesh.nodes[i] = [center[0] + rho * th.cos(), center[1] + rho * th.sin()];
            }
        }
        mesh
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    fn dth(&self) -> f64 {
        2.0 * PI / self.angles as f64
    }

    /// Angles are stored folded (`0, M-1, 1, M-2, ...`) so that the periodic
    /// seam does not widen the band.
    pub fn index(&self, ring: usize, k: usize) -> usize {
        let m = self.angles;
        let k = k % m;
        let slot = if k < m - k { 2 * k } else { 2 * (m - k) - 1 };
        ring * m + slot
    }

    fn rho(&self, s: f64) -> f64 {
        self.radius * s.exp()
    }

    fn x1(&self, s: f64, th: f64) -> f64 {
        self.center[0] + self.rho(s) * th.cos()
    }

    /// Range of `x₁` over the cell `[s0, s0 + Δs] × [t0, t0 + Δθ]`.
    fn weight_range(&self, s0: f64, t0: f64) -> (f64, f64) {
        let (s1, t1) = (s0 + self.ds, t0 + self.dth());
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut probe = |s: f64, t: f64| {
            let v = self.x1(s, t);
            lo = lo.min(v);
            hi = hi.max(v);
        };
        for s in [s0, s1] {
            for t in [t0, t1] {
                probe(s, t);
            }
            for extreme in [0.0, PI, 2.0 * PI] {
                if extreme > t0 && extreme < t1 {
                    probe(s, extreme);
                }
            }
        }
        (lo, hi)
    }

    pub fn assemble(&self) -> (SparseSym, SparseSym) {
        let n = self.len();
        let mut stiff = Assembler::new(n);
        let mut mass = Assembler::new(n);
        let gauss = gauss_legendre(3);
        let (ds, dth) = (self.ds, self.dth());
        for j in 0..self.rings - 1 {
            for k in 0..self.angles {
                let (s0, t0) = (j as f64 * ds, k as f64 * dth);
                let (lo, hi) = self.weight_range(s0, t0);
                if hi <= 0.0 {
                    continue;
                }
                let sub = if lo < 0.0 { CLIP_SUBCELLS } else { 1 };
                let idx = [self.index(j, k), self.index(j, k + 1), self.index(j + 1, k), self.index(j + 1, k + 1)];
                let mut kl = [[0.0; 4]; 4];
                let mut ml = [[0.0; 4]; 4];
                let h = 1.0 / sub as f64;
                for a in 0..sub {
                    for b in 0..sub {
                        for &(gx, wx) in &gauss {
                            for &(gy, wy) in &gauss {
                                // (ξ, η) ∈ [0, 1]² along (s, θ).
                                let xi = (a as f64 + 0.5 * (gx + 1.0)) * h;
                                let eta = (b as f64 + 0.5 * (gy + 1.0)) * h;
                                let w = 0.25 * wx * wy * h * h * ds * dth;
                                let (s, t) = (s0 + xi * ds, t0 + eta * dth);
                                let weight = self.x1(s, t).max(0.0);
                                if weight == 0.0 {
                                    continue;
                                }
                                let rho = self.rho(s);
                                let phi = [(1.0 - xi) * (1.0 - eta), (1.0 - xi) * eta, xi * (1.0 - eta), xi * eta];
                                let dxi = [-(1.0 - eta), -eta, 1.0 - eta, eta];
                                let deta = [-(1.0 - xi), 1.0 - xi, -xi, xi];
                                for p in 0..4 {
                                    for q in 0..4 {
                                        let g = dxi[p] * dxi[q] / (ds * ds) + deta[p] * deta[q] / (dth * dth);
                                        kl[p][q] += w * weight * g;
                                        ml[p][q] += w * weight * rho * rho * phi[p] * phi[q];
                                    }
                                }
                            }
                        }
                    }
                }
                for p in 0..4 {
                    for q in p..4 {
                        stiff.add(idx[p], idx[q], kl[p][q]);
                        mass.add(idx[p], idx[q], ml[p][q]);
                    }
                }
            }
        }
        (stiff.finish(), mass.finish())
    }

    /// `h` on the inner ring and zero on the outer ring.
    pub fn fixed(&self, h: &BoundaryData) -> Vec<(usize, f64)> {
        let m = self.angles;
        let last = self.rings - 1;
        let mut out: Vec<(usize, f64)> =
            h.on_circle(m).into_iter().enumerate().map(|(k, v)| (self.index(0, k), v)).collect();
        out.extend((0..m).map(|k| (self.index(last, k), 0.0)));
        out
    }

    /// `-∮ x₁ u ∂_ρ u ρ dθ = -∫ x₁ u u_s dθ` at `s = 0`, with a one-sided
    /// four-point `u_s`.
    pub fn flux(&self, u: &[f64]) -> f64 {
        let dth = self.dth();
        let xs: Vec<f64> = (0..4).map(|j| j as f64 * self.ds).collect();
        let w = fd_first_derivative(0.0, &xs);
        let mut total = 0.0;
        for k in 0..self.angles {
            let x1 = self.x1(0.0, k as f64 * dth);
            let us: f64 = (0..4).map(|j| w[j] * u[self.index(j, k)]).sum();
            total -= x1 * u[self.index(0, k)] * us * dth;
        }
        total
    }

    /// `max |∂₁u - x₁(m²u - ∇²u)| / max |∂₁u|` over free nodes with `ρ ≤ 4R`
    /// and `x₁ ≥ R/2`, by central differences in `(s, θ)`.
    pub fn strong_residual(&self, u: &[f64], mass: f64, free: &[bool]) -> f64 {
        let m2 = mass * mass;
        let (ds, dth) = (self.ds, self.dth());
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        for j in 1..self.rings - 1 {
            let s = j as f64 * ds;
            let rho = self.rho(s);
            if rho > 4.0 * self.radius {
                break;
            }
            for k in 0..self.angles {
                let i = self.index(j, k);
                let th = k as f64 * dth;
                let x1 = self.x1(s, th);
                if x1 < 0.5 * self.radius || !free[i] {
                    continue;
                }
                let (um, up) = (u[self.index(j - 1, k)], u[self.index(j + 1, k)]);
                let (ul, ur) = (u[self.index(j, k + self.angles - 1)], u[self.index(j, k + 1)]);
                let us = (up - um) / (2.0 * ds);
                let uss = (up - 2.0 * u[i] + um) / (ds * ds);
                let ut = (ur - ul) / (2.0 * dth);
                let utt = (ur - 2.0 * u[i] + ul) / (dth * dth);
                let lap = (uss + utt) / (rho * rho);
                let d1 = (th.cos() * us - th.sin() * ut) / rho;
                worst = worst.max((d1 - x1 * (m2 * u[i] - lap)).abs());
                scale = scale.max(d1.abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Bilinear value at `x`; `None` inside the disk, zero outside the outer circle.
    pub fn value_at(&self, u: &[f64], x: [f64; 2]) -> Option<f64> {
        let dx = [x[0] - self.center[0], x[1] - self.center[1]];
        let rho = dx[0].hypot(dx[1]);
        if rho < self.radius {
            return None;
        }
        let s = (rho / self.radius).ln();
        let smax = (self.rings - 1) as f64 * self.ds;
        if s >= smax {
            return Some(0.0);
        }
        let th = dx[1].atan2(dx[0]).rem_euclid(2.0 * PI);
        let fs = s / self.ds;
        let ft = th / self.dth();
        let j = (fs.floor() as usize).min(self.rings - 2);
        let k = (ft.floor() as usize).min(self.angles - 1);
        let (a, b) = (fs - j as f64, ft - k as f64);
        let v = (1.0 - a) * (1.0 - b) * u[self.index(j, k)]
            + (1.0 - a) * b * u[self.index(j, k + 1)]
            + a * (1.0 - b) * u[self.index(j + 1, k)]
            + a * b * u[self.index(j + 1, k + 1)];
        Some(v)
    }

    pub fn spacing_at_boundary(&self) -> f64 {
        self.radius * (self.ds.exp() - 1.0)
    }
}
