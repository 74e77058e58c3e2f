//! One-dimensional exterior problem: `B = (a, b)` with `0 < a < b`, solved on
//! `(0, a) ∪ (b, L_out)` (or `(ε, a) ∪ (b, L_out)`) by piecewise-linear elements.

use super::{fd_first_derivative, BoundaryData, ExteriorProblem, InnerBoundary};
use crate::linalg::{Assembler, SparseSym};
use crate::quadrature::gauss_legendre_on;

#[derive(Debug, Clone)]
pub(crate) struct LineMesh {
    pub x: Vec<f64>,
    /// Nodes `0..inner` cover the segment next to the origin; node `inner - 1` sits at `a`.
    pub inner: usize,
    pub a: f64,
    pub b: f64,
    pub dirichlet_start: bool,
}

impl LineMesh {
    pub fn new(p: &ExteriorProblem) -> Self {
        let a = p.offset;
        let b = p.offset + 2.0 * p.radius;
        let n = p.resolution;
        let mut x = Vec::with_capacity(2 * n + 2);
        let dirichlet_start = match p.inner {
            InnerBoundary::Natural => {
                x.extend((0..=n).map(|i| a * i as f64 / n as f64));
                false
            }
            InnerBoundary::Dirichlet { eps } => {
                x.extend((0..=n).map(|i| eps * (a / eps).powf(i as f64 / n as f64)));
                true
            }
        };
        let inner = x.len();
        x[inner - 1] = a;
        let ratio = p.lout / b;
        x.extend((0..=n).map(|i| b * ratio.powf(i as f64 / n as f64)));
        *x.last_mut().unwrap() = p.lout;
        Self { x, inner, a, b, dirichlet_start }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    fn elements(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.x.len();
        (0..self.inner - 1).map(|i| (i, i + 1)).chain((self.inner..n - 1).map(|i| (i, i + 1)))
    }

    /// Weighted stiffness `∫ x φ'ᵢ φ'ⱼ` and mass `∫ x φᵢ φⱼ`.
    pub fn assemble(&self) -> (SparseSym, SparseSym) {
        let n = self.len();
        let mut k = Assembler::new(n);
        let mut m = Assembler::new(n);
        for (i, j) in self.elements() {
            let (x0, x1) = (self.x[i], self.x[j]);
            let h = x1 - x0;
            let s = 0.5 * (x0 + x1) / h;
            k.add(i, i, s);
            k.add(j, j, s);
            k.add(i, j, -s);
            let (mut mii, mut mjj, mut mij) = (0.0, 0.0, 0.0);
            for (t, w) in gauss_legendre_on(3, x0, x1) {
                let pj = (t - x0) / h;
                let pi = 1.0 - pj;
                mii += w * t * pi * pi;
                mjj += w * t * pj * pj;
                mij += w * t * pi * pj;
            }
            m.add(i, i, mii);
            m.add(j, j, mjj);
            m.add(i, j, mij);
        }
        (k.finish(), m.finish())
    }

    /// Nodes with prescribed values.
    pub fn fixed(&self, h: &BoundaryData) -> Vec<(usize, f64)> {
        let (near, far) = match *h {
            BoundaryData::Endpoints { near, far } => (near, far),
            BoundaryData::Circle { .. } => unreachable!("checked by the caller"),
        };
        let mut out = vec![(self.inner - 1, near), (self.inner, far), (self.len() - 1, 0.0)];
        if self.dirichlet_start {
            out.push((0, 0.0));
        }
        out
    }

    /// `a h_a u'(a⁻) - b h_b u'(b⁺)` with one-sided differences.
    pub fn flux(&self, u: &[f64]) -> f64 {
        let ia = self.inner - 1;
        let ib = self.inner;
        let left: Vec<usize> = (0..4).map(|k| ia - k).collect();
        let right: Vec<usize> = (0..4).map(|k| ib + k).collect();
        let du = |idx: &[usize]| {
            let xs: Vec<f64> = idx.iter().map(|&i| self.x[i]).collect();
            let w = fd_first_derivative(xs[0], &xs);
            idx.iter().zip(&w).map(|(&i, w)| w * u[i]).sum::<f64>()
        };
        self.a * u[ia] * du(&left) - self.b * u[ib] * du(&right)
    }

    /// `max |u' - x (m² u - u'')| / max |u'|` over interior nodes.
    pub fn strong_residual(&self, u: &[f64], mass: f64) -> f64 {
        let m2 = mass * mass;
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        let interior = (1..self.inner - 1).chain(self.inner + 1..self.len() - 1);
        for i in interior {
            let (x0, x1, x2) = (self.x[i - 1], self.x[i], self.x[i + 1]);
            let (h0, h1) = (x1 - x0, x2 - x1);
            let d1 = (u[i + 1] - u[i]) * h0 / (h1 * (h0 + h1)) + (u[i] - u[i - 1]) * h1 / (h0 * (h0 + h1));
            let d2 = 2.0 * ((u[i + 1] - u[i]) / h1 - (u[i] - u[i - 1]) / h0) / (h0 + h1);
            worst = worst.max((d1 - x1 * (m2 * u[i] - d2)).abs());
            scale = scale.max(d1.abs());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Piecewise-linear value at `x ≥ 0`; `None` inside `B`, zero past `L_out`.
    pub fn value_at(&self, u: &[f64], x: f64) -> Option<f64> {
        if x > self.a && x < self.b {
            return None;
        }
        let last = *self.x.last().unwrap();
        if x >= last {
            return Some(0.0);
        }
        if x <= self.x[0] {
            return Some(if self.dirichlet_start { 0.0 } else { u[0] });
        }
        let (lo, hi) = if x <= self.a { (0, self.inner) } else { (self.inner, self.len()) };
        let k = lo + self.x[lo..hi].partition_point(|&t| t <= x).clamp(1, hi - lo - 1) - 1;
        let t = (x - self.x[k]) / (self.x[k + 1] - self.x[k]);
        Some((1.0 - t) * u[k] + t * u[k + 1])
    }

    pub fn spacing_at_boundary(&self) -> f64 {
        (self.x[self.inner - 1] - self.x[self.inner - 2]).max(self.x[self.inner + 1] - self.x[self.inner])
    }
}
