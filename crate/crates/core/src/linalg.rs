//! Sparse symmetric matrices with a banded Cholesky factorization and a
//! preconditioned conjugate-gradient fallback.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Symmetric matrix in compressed-row form (both triangles stored).
#[derive(Debug, Clone)]
pub struct SparseSym {
    n: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Accumulates entries of a symmetric matrix.
#[derive(Debug, Clone, Default)]
pub struct Assembler {
    n: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl Assembler {
    pub fn new(n: usize) -> Self {
        Self { n, entries: BTreeMap::new() }
    }

    /// Adds `v` at `(i, j)` and `(j, i)` (once on the diagonal).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        *self.entries.entry((i, j)).or_insert(0.0) += v;
        if i != j {
            *self.entries.entry((j, i)).or_insert(0.0) += v;
        }
    }

    pub fn finish(self) -> SparseSym {
        let mut row_start = vec![0; self.n + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals = Vec::with_capacity(self.entries.len());
        for (&(i, j), &v) in &self.entries {
            row_start[i + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..self.n {
            row_start[i + 1] += row_start[i];
        }
        SparseSym { n: self.n, row_start, cols, vals }
    }
}

impl SparseSym {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n).flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j))).max().unwrap_or(0)
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn submatrix(&self, keep: &[usize]) -> SparseSym {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_start = vec![0; keep.len() + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for (new, &old) in keep.iter().enumerate() {
            for (j, v) in self.row(old) {
                if map[j] != usize::MAX {
                    cols.push(map[j]);
                    vals.push(v);
                }
            }
            row_start[new + 1] = cols.len();
        }
        SparseSym { n: keep.len(), row_start, cols, vals }
    }
}

/// Lower-triangular band factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    /// Row `i` holds `L[i][i - bw ..= i]`.
    data: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &SparseSym) -> Result<Self> {
        let n = a.dim();
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut data = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    data[i * w + j + bw - i] = v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let k0 = lo.max(j.saturating_sub(bw));
                let mut s = data[i * w + j + bw - i];
                for k in k0..j {
                    s -= data[i * w + k + bw - i] * data[j * w + k + bw - j];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::SolveFailure(format!("matrix not positive definite at row {i}")));
                    }
                    data[i * w + bw] = s.sqrt();
                } else {
                    data[i * w + j + bw - i] = s / data[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, data })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.data[i * w + k + bw - i] * y[k];
            }
            y[i] = s / self.data[i * w + bw];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = y[i];
            for k in i + 1..=hi {
                s -= self.data[k * w + i + bw - k] * y[k];
            }
            y[i] = s / self.data[i * w + bw];
        }
        y
    }
}

/// Jacobi-preconditioned conjugate gradients from the starting vector `x0`.
pub fn conjugate_gradient(a: &SparseSym, b: &[f64], x0: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::SolveFailure("non-positive diagonal".into()));
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let bnorm = norm(b);
    let mut x = x0.to_vec();
    if bnorm == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let ax = a.matvec(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for _ in 0..max_iter {
        if norm(&r) <= rel_tol * bnorm {
            return Ok(x);
        }
        let ap = a.matvec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::SolveFailure("conjugate gradients lost positivity".into()));
        }
        let alpha = rz / pap;
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..z.len() {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    if norm(&r) <= rel_tol * bnorm {
        Ok(x)
    } else {
        Err(Error::SolveFailure(format!("conjugate gradients did not converge in {max_iter} iterations")))
    }
}
