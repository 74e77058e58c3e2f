//! Spatial regions, their half-widths, and quadrature over them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::quadrature::{gauss_legendre, gauss_legendre_on};

/// Which side of a cut a half-space (or half-line) lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x_axis > cut`
    Right,
    /// `x_axis < cut`
    Left,
}

impl Side {
    pub fn flipped(self) -> Self {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    HalfSpace { axis: usize, cut: f64, side: Side },
    Box { lo: [f64; 3], hi: [f64; 3] },
    Ball { center: [f64; 3], radius: f64 },
}

/// Largest exterior fraction of `Σ(f² + g²)` for which data count as supported in a region.
pub const LOCALIZED_FRACTION: f64 = 1e-10;

/// Gauss points per axis inside a cell cut by the region boundary.
const CELL_ORDER: usize = 3;

impl Region {
    pub fn ball(center: [f64; 3], radius: f64) -> Self {
        Region::Ball { center, radius }
    }

    pub fn cube(center: [f64; 3], half_side: f64) -> Self {
        let lo = [center[0] - half_side, center[1] - half_side, center[2] - half_side];
        let hi = [center[0] + half_side, center[1] + half_side, center[2] + half_side];
        Region::Box { lo, hi }
    }

    /// Half the distance between the closest pair of parallel supporting hyperplanes.
    pub fn half_width(&self, dim: usize) -> f64 {
        match *self {
            Region::HalfSpace { .. } => f64::INFINITY,
            Region::Ball { radius, .. } => radius,
            Region::Box { lo, hi } => (0..dim).map(|a| 0.5 * (hi[a] - lo[a])).fold(f64::INFINITY, f64::min),
        }
    }

    /// Axis along which the half-width is attained.
    pub fn narrow_axis(&self, dim: usize) -> usize {
        match *self {
            Region::HalfSpace { axis, .. } => axis,
            Region::Ball { .. } => 0,
            Region::Box { lo, hi } => {
                (0..dim).min_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0)
            }
        }
    }

    /// Geometric centre (the cut point on the normal axis for a half-space).
    pub fn center(&self) -> [f64; 3] {
        match *self {
            Region::HalfSpace { axis, cut, .. } => {
                let mut c = [0.0; 3];
                c[axis] = cut;
                c
            }
            Region::Ball { center, .. } => center,
            Region::Box { lo, hi } => [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])],
        }
    }

    pub fn contains(&self, x: [f64; 3], dim: usize) -> bool {
        match *self {
            Region::HalfSpace { axis, cut, side } => match side {
                Side::Right => x[axis] >= cut,
                Side::Left => x[axis] <= cut,
            },
            Region::Ball { center, radius } => {
                (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>() <= radius * radius
            }
            Region::Box { lo, hi } => (0..dim).all(|a| x[a] >= lo[a] && x[a] <= hi[a]),
        }
    }

    /// Extent of the region along `axis`.
    fn bounds(&self, axis: usize) -> (f64, f64) {
        match *self {
            Region::HalfSpace { axis: ax, cut, side } => {
                if ax != axis {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if side == Side::Right {
                    (cut, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, cut)
                }
            }
            Region::Ball { center, radius } => (center[axis] - radius, center[axis] + radius),
            Region::Box { lo, hi } => (lo[axis], hi[axis]),
        }
    }

    /// Intersection of the region with the line through `x` along the last axis.
    fn chord(&self, x: [f64; 3], dim: usize) -> Option<(f64, f64)> {
        let last = dim - 1;
        match *self {
            Region::Ball { center, radius } => {
                let r2: f64 = (0..last).map(|a| (x[a] - center[a]).powi(2)).sum();
                let h2 = radius * radius - r2;
                (h2 >= 0.0).then(|| (center[last] - h2.sqrt(), center[last] + h2.sqrt()))
            }
            _ => {
                for a in 0..last {
                    let (lo, hi) = self.bounds(a);
                    if x[a] < lo || x[a] > hi {
                        return None;
                    }
                }
                Some(self.bounds(last))
            }
        }
    }

    /// Whether the axis-aligned cell `[lo, hi]` lies entirely inside or outside.
    fn classify_cell(&self, lo: [f64; 3], hi: [f64; 3], dim: usize) -> CellKind {
        match *self {
            Region::Ball { center, radius } => {
                let (mut near, mut far) = (0.0, 0.0);
                for a in 0..dim {
                    let c = center[a];
                    let d_near = if c < lo[a] { lo[a] - c } else if c > hi[a] { c - hi[a] } else { 0.0 };
                    let d_far = (c - lo[a]).abs().max((c - hi[a]).abs());
                    near += d_near * d_near;
                    far += d_far * d_far;
                }
                if far <= radius * radius {
                    CellKind::Inside
                } else if near >= radius * radius {
                    CellKind::Outside
                } else {
                    CellKind::Cut
                }
            }
            _ => {
                let mut inside = true;
                for a in 0..dim {
                    let (blo, bhi) = self.bounds(a);
                    if hi[a] <= blo || lo[a] >= bhi {
                        return CellKind::Outside;
                    }
                    if lo[a] < blo || hi[a] > bhi {
                        inside = false;
                    }
                }
                if inside {
                    CellKind::Inside
                } else {
                    CellKind::Cut
                }
            }
        }
    }

    /// Check that the region fits in the grid box with a margin of `2Δx`.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.covers_grid(grid) {
            return Ok(());
        }
        let margin = 2.0 * grid.dx();
        let l = grid.half_extent();
        let ok = match *self {
            Region::HalfSpace { axis, cut, .. } => {
                axis < grid.dim() && cut >= -l + margin && cut <= l - margin
            }
            Region::Ball { center, radius } => {
                radius > 0.0 && {
                    let lo = center.map(|c| c - radius);
                    let hi = center.map(|c| c + radius);
                    grid.contains_with_margin(lo, hi, margin)
                }
            }
            Region::Box { lo, hi } => {
                (0..grid.dim()).all(|a| hi[a] > lo[a]) && grid.contains_with_margin(lo, hi, margin)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::RegionOutsideGrid)
        }
    }

    /// True when the region covers the whole periodic box.
    pub fn covers_grid(&self, grid: &GridSpec) -> bool {
        let l = grid.half_extent();
        match *self {
            Region::Box { lo, hi } => (0..grid.dim()).all(|a| lo[a] <= -l && hi[a] >= l),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CellKind {
    Inside,
    Outside,
    Cut,
}

/// Quadrature for `∫_B F(x) w(x) dx` on a grid field `F`.
///
/// Boxes and half-spaces: cells `x ± Δx/2` lying inside the region use the
/// midpoint rule with its leading Euler-Maclaurin correction `(Δx²/24) ∇²(wF)`
/// from second differences. Cells cut by a face are integrated with a tensor
/// Gauss rule on the exact intersection, using interpolated field values.
///
/// Balls: the indicator is split as `ψ + (χ_B - ψ)` with `ψ` a radial degree-9
/// smoothstep whose transition shell has a width proportional to the radius
/// (never below `BALL_SHELL_MIN` spacings). `Fψ` is smooth on the whole box
/// and summed on the nodes. `F(χ_B - ψ)` lives in the shell and is integrated in
/// polar coordinates (Gauss in `r`, [`sphere_rule`] in angle) with interpolated
/// values.
///
/// For integrands that vanish with all derivatives near the boundary (data
/// supported inside the region) [`RegionQuadrature::nodal`] is exact to
/// spectral accuracy and avoids interpolation altogether.
#[derive(Debug, Clone)]
pub struct RegionQuadrature {
    grid: GridSpec,
    /// (flat index, coefficient in units of the cell volume)
    nodes: Vec<(usize, f64)>,
    boundary: Vec<([f64; 3], f64)>,
}

/// Shell width of the ball rule relative to the radius.
const BALL_SHELL: f64 = 0.25;
/// Minimum shell width in grid spacings.
const BALL_SHELL_MIN: f64 = 12.0;
/// Radial Gauss points across the shell.
const BALL_SHELL_POINTS: usize = 16;

/// `C⁴` step equal to 1 for `t ≤ 0` and 0 for `t ≥ 1`.
fn smooth_step_down(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let up = t.powi(5) * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))));
        1.0 - up
    }
}

fn ball_rule(grid: &GridSpec, center: [f64; 3], radius: f64) -> RegionQuadrature {
    let dim = grid.dim();
    let h = grid.dx();
    let width = (BALL_SHELL * radius).max(BALL_SHELL_MIN * h).min(radius);
    let inner = radius - width;
    let psi = |r: f64| smooth_step_down((r - inner) / width);
    let mut nodes = Vec::new();
    for i in 0..grid.len() {
        let x = grid.point(i);
        let r = (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>().sqrt();
        if r < radius {
            let c = psi(r);
            if c > 0.0 {
                nodes.push((i, c));
            }
        }
    }
    let mut boundary = Vec::new();
    for (r, wr) in gauss_legendre_on(BALL_SHELL_POINTS, inner, radius) {
        let outer = 1.0 - psi(r);
        for p in sphere_rule(center, r, dim, h) {
            boundary.push((p.x, wr * outer * p.weight));
        }
    }
    RegionQuadrature { grid: *grid, nodes, boundary }
}

impl RegionQuadrature {
    pub fn new(grid: &GridSpec, region: &Region) -> Self {
        let dim = grid.dim();
        let h = grid.dx();
        if region.covers_grid(grid) {
            let nodes = (0..grid.len()).map(|i| (i, 1.0)).collect();
            return Self { grid: *grid, nodes, boundary: Vec::new() };
        }
        if let Region::Ball { center, radius } = *region {
            return ball_rule(grid, center, radius);
        }
        let gl = gauss_legendre(CELL_ORDER);
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        // Only nodes inside the region's bounding box (plus one cell) can contribute.
        let mut range = [(0usize, 0usize); 3];
        for (a, r) in range.iter_mut().enumerate().take(dim) {
            let (blo, bhi) = region.bounds(a);
            let l = grid.half_extent();
            let jlo = ((blo.max(-l - h) + l) / h - 1.0).floor().max(0.0) as usize;
            let jhi = (((bhi.min(l + h) + l) / h + 1.0).ceil() as usize).min(grid.n() - 1);
            *r = (jlo, jhi);
        }
        let span = |a: usize| if a < dim { range[a].0..=range[a].1 } else { 0..=0 };
        for i in span(0) {
            for j in span(1) {
                for k in span(2) {
                    let ijk = [i, j, k];
                    let mut lo = [0.0; 3];
                    let mut hi = [0.0; 3];
                    for a in 0..dim {
                        let x = grid.coord(ijk[a]);
                        lo[a] = x - 0.5 * h;
                        hi[a] = x + 0.5 * h;
                    }
                    match region.classify_cell(lo, hi, dim) {
                        CellKind::Inside => interior.push(grid.flatten(ijk)),
                        CellKind::Outside => {}
                        CellKind::Cut => cut_cell_points(region, dim, lo, hi, &gl, &mut boundary),
                    }
                }
            }
        }
        let mut coef = std::collections::BTreeMap::<usize, f64>::new();
        let n = grid.n();
        let side = 1.0 / 24.0;
        for &i in &interior {
            *coef.entry(i).or_default() += 1.0 - 2.0 * dim as f64 * side;
            let ijk = grid.unflatten(i);
            for a in 0..dim {
                for step in [1, n - 1] {
                    let mut nb = ijk;
                    nb[a] = (nb[a] + step) % n;
                    *coef.entry(grid.flatten(nb)).or_default() += side;
                }
            }
        }
        let nodes = coef.into_iter().collect();
        Self { grid: *grid, nodes, boundary }
    }

    /// Plain nodal sum over the nodes lying in the closed region.
    pub fn nodal(grid: &GridSpec, region: &Region) -> Self {
        let dim = grid.dim();
        let nodes = (0..grid.len()).filter(|&i| region.contains(grid.point(i), dim)).map(|i| (i, 1.0)).collect();
        Self { grid: *grid, nodes, boundary: Vec::new() }
    }

    /// [`RegionQuadrature::nodal`] when `fields` are localized in the region
    /// (exterior fraction at most [`LOCALIZED_FRACTION`]), the general rule otherwise.
    pub fn for_data(grid: &GridSpec, region: &Region, fields: &[&Field]) -> Self {
        if exterior_fraction(fields, region) <= LOCALIZED_FRACTION {
            Self::nodal(grid, region)
        } else {
            Self::new(grid, region)
        }
    }

    pub fn integrate(&self, field: &Field) -> f64 {
        self.integrate_weighted(field, |_| 1.0)
    }

    pub fn integrate_weighted<W: Fn([f64; 3]) -> f64>(&self, field: &Field, weight: W) -> f64 {
        debug_assert_eq!(field.grid(), &self.grid);
        let vol = self.grid.cell_volume();
        let vals = field.values();
        let inner: f64 =
            self.nodes.iter().map(|&(i, c)| c * vals[i] * weight(self.grid.point(i))).sum::<f64>() * vol;
        let edge: f64 = self.boundary.iter().map(|&(x, w)| w * weight(x) * field.interpolate(x)).sum();
        inner + edge
    }

    /// Total measure (volume) of the region as seen by the rule.
    pub fn measure(&self) -> f64 {
        self.nodes.iter().map(|n| n.1).sum::<f64>() * self.grid.cell_volume()
            + self.boundary.iter().map(|b| b.1).sum::<f64>()
    }
}

fn cut_cell_points(
    region: &Region,
    dim: usize,
    lo: [f64; 3],
    hi: [f64; 3],
    gl: &[(f64, f64)],
    out: &mut Vec<([f64; 3], f64)>,
) {
    let last = dim - 1;
    // Transverse Gauss points on the cell clipped to the region's extent.
    let mut axes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(last);
    for a in 0..last {
        let (blo, bhi) = region.bounds(a);
        let (a0, a1) = (lo[a].max(blo), hi[a].min(bhi));
        if a1 <= a0 {
            return;
        }
        let (mid, half) = (0.5 * (a0 + a1), 0.5 * (a1 - a0));
        axes.push(gl.iter().map(|(x, w)| (mid + half * x, half * w)).collect());
    }
    let count: usize = axes.iter().map(|v| v.len()).product();
    for flat in 0..count {
        let mut x = [0.0; 3];
        let mut w = 1.0;
        let mut rem = flat;
        for a in 0..last {
            let (xa, wa) = axes[a][rem % axes[a].len()];
            rem /= axes[a].len();
            x[a] = xa;
            w *= wa;
        }
        let Some((c0, c1)) = region.chord(x, dim) else { continue };
        let (s0, s1) = (lo[last].max(c0), hi[last].min(c1));
        if s1 <= s0 {
            continue;
        }
        for (xs, ws) in gauss_legendre_on(gl.len(), s0, s1) {
            let mut p = x;
            p[last] = xs;
            out.push((p, w * ws));
        }
    }
}

/// A point on a sphere with its outward normal and surface weight.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub x: [f64; 3],
    pub normal: [f64; 3],
    pub weight: f64,
}

/// Surface rule on `∂B` for a ball in `dim` dimensions with resolution tied to `spacing`.
///
/// `d = 1`: the two endpoints with unit weight. `d = 2`: midpoint rule in the
/// angle. `d = 3`: Gauss-Legendre in `cos θ` times the midpoint rule in `φ`.
pub fn sphere_rule(center: [f64; 3], radius: f64, dim: usize, spacing: f64) -> Vec<SurfacePoint> {
    let at = |n: [f64; 3], w: f64| SurfacePoint {
        x: [center[0] + radius * n[0], center[1] + radius * n[1], center[2] + radius * n[2]],
        normal: n,
        weight: w,
    };
    match dim {
        1 => vec![at([-1.0, 0.0, 0.0], 1.0), at([1.0, 0.0, 0.0], 1.0)],
        2 => {
            let m = ((4.0 * PI * radius / spacing).ceil() as usize).max(64);
            let dth = 2.0 * PI / m as f64;
            (0..m)
                .map(|j| {
                    let th = (j as f64 + 0.5) * dth;
                    at([th.cos(), th.sin(), 0.0], radius * dth)
                })
                .collect()
        }
        _ => {
            let nt = ((2.0 * PI * radius / spacing).ceil() as usize).max(24);
            let np = 2 * nt;
            let dph = 2.0 * PI / np as f64;
            let mut out = Vec::with_capacity(nt * np);
            for (ct, wt) in gauss_legendre(nt) {
                let st = (1.0 - ct * ct).sqrt();
                for k in 0..np {
                    let ph = (k as f64 + 0.5) * dph;
                    out.push(at([st * ph.cos(), st * ph.sin(), ct], radius * radius * wt * dph));
                }
            }
            out
        }
    }
}

/// `∮_{∂B} F dσ` with interpolated field values.
pub fn surface_integral(field: &Field, center: [f64; 3], radius: f64) -> f64 {
    let grid = field.grid();
    sphere_rule(center, radius, grid.dim(), grid.dx())
        .iter()
        .map(|p| p.weight * field.interpolate(p.x))
        .sum()
}

/// Fraction of `Σ (f² + g²)` carried by nodes outside the region.
pub fn exterior_fraction(fields: &[&Field], region: &Region) -> f64 {
    let Some(first) = fields.first() else { return 0.0 };
    let grid = first.grid();
    let dim = grid.dim();
    let (mut outside, mut total) = (0.0, 0.0);
    for i in 0..grid.len() {
        let s: f64 = fields.iter().map(|f| f.values()[i].powi(2)).sum();
        total += s;
        if s != 0.0 && !region.contains(grid.point(i), dim) {
            outside += s;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_widths() {
        let b = Region::Box { lo: [-1.0, -0.5, -2.0], hi: [1.0, 0.5, 2.0] };
        assert_eq!(b.half_width(3), 0.5);
        assert_eq!(b.narrow_axis(3), 1);
        assert_eq!(b.half_width(1), 1.0);
        assert_eq!(Region::ball([0.0; 3], 0.7).half_width(2), 0.7);
        let h = Region::HalfSpace { axis: 0, cut: 0.0, side: Side::Right };
        assert!(h.half_width(2).is_infinite());
    }

    #[test]
    fn margin_is_enforced() {
        let g = GridSpec::new(2, 64, 2.0).unwrap();
        assert!(Region::ball([0.0; 3], 1.8).validate(&g).is_ok());
        assert_eq!(Region::ball([0.0; 3], 1.95).validate(&g), Err(Error::RegionOutsideGrid));
    }

    #[test]
    fn volumes_and_polynomial_moments() {
        for dim in 1..=3 {
            let g = GridSpec::new(dim, 64, 2.0).unwrap();
            let ball = Region::ball([0.1, -0.05, 0.02], 1.1);
            let q = RegionQuadrature::new(&g, &ball);
            let exact = [2.2, PI * 1.21, 4.0 / 3.0 * PI * 1.331][dim - 1];
            assert!((q.measure() - exact).abs() < 1e-6 * exact, "dim {dim}: {}", q.measure());
            let bx = Region::Box { lo: [-0.77, -1.03, -0.5], hi: [0.9, 0.61, 1.2] };
            let qb = RegionQuadrature::new(&g, &bx);
            let vol: f64 = (0..dim).map(|a| [1.67, 1.64, 1.7][a]).product();
            assert!((qb.measure() - vol).abs() < 1e-12, "box dim {dim}");
        }
    }

    #[test]
    fn ball_integral_of_smooth_function_converges() {
        // ∫_{|x|<1} e^{-|x|²} dx = π (1 - e^{-1}) in 2D.
        let exact = PI * (1.0 - (-1.0f64).exp());
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let g = GridSpec::new(2, n, 2.0).unwrap();
            let f = g.sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp());
            let q = RegionQuadrature::new(&g, &Region::ball([0.0; 3], 1.0));
            errs.push((q.integrate(&f) - exact).abs());
        }
        assert!(errs[2] < 1e-7 && errs[1] / errs[2] > 8.0, "{errs:?}");
    }

    #[test]
    fn compact_data_integrate_to_the_nodal_sum() {
        let g = GridSpec::new(2, 64, 2.0).unwrap();
        let f = g.sample(|x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 < 0.64 { (-1.0 / (0.64 - r2)).exp() } else { 0.0 }
        });
        let q = RegionQuadrature::nodal(&g, &Region::ball([0.0; 3], 0.8));
        assert_eq!(q.integrate(&f), f.integral());
        let smooth = RegionQuadrature::new(&g, &Region::ball([0.0; 3], 0.8));
        assert!((smooth.integrate(&f) - f.integral()).abs() < 1e-4 * f.integral());
    }

    #[test]
    fn circle_and_sphere_areas() {
        let g2 = GridSpec::new(2, 64, 2.0).unwrap();
        let one = g2.sample(|_| 1.0);
        assert!((surface_integral(&one, [0.0; 3], 1.2) - 2.0 * PI * 1.2).abs() < 1e-12);
        let g3 = GridSpec::new(3, 32, 2.0).unwrap();
        let one = g3.sample(|_| 1.0);
        assert!((surface_integral(&one, [0.0; 3], 1.0) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn exterior_fraction_of_compact_data() {
        let g = GridSpec::new(1, 64, 2.0).unwrap();
        let f = g.sample(|x| if x[0].abs() < 0.5 { 1.0 } else { 0.0 });
        assert_eq!(exterior_fraction(&[&f], &Region::ball([0.0; 3], 1.0)), 0.0);
        assert!(exterior_fraction(&[&f], &Region::ball([1.0, 0.0, 0.0], 0.5)) > 0.4);
    }
}
