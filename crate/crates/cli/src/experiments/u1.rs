//! Half-line and interval entropies of a current profile and the identities
//! they satisfy.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use wavebound::bumps::{Bump, BumpSum};
use wavebound::io::read_csv_columns;
use wavebound::u1::{
    ant_check, ant_competitor_energy, balance_check, dilation_flow_check, halfline_entropy, interval_entropy,
    u1_norm, u1_norm_dual, CurrentProfile,
};
use wavebound::{Field, GridSpec, Side};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::report::{Cell, Table, Verdict};

/// Profile from `x,f` rows on the grid `-L + jΔx`.
pub fn read_profile(path: &Path) -> Result<CurrentProfile> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let (xs, cols) = read_csv_columns(BufReader::new(file))?;
    let bad = |msg: String| CliError::config(format!("{}: {msg}", path.display()));
    if cols.len() != 1 || xs.len() < 2 {
        return Err(bad("expected x,f rows".into()));
    }
    let grid = GridSpec::new(1, xs.len(), -xs[0])?;
    for (j, x) in xs.iter().enumerate() {
        if (x - grid.coord(j)).abs() > 1e-9 * grid.half_extent() {
            return Err(bad(format!("row {j}: x = {x} is off the uniform grid")));
        }
    }
    Ok(CurrentProfile::from_values(&Field::from_vec(grid, cols[0].clone())?)?)
}

/// `e^{-x²}` on the configured grid.
pub fn gaussian_profile(n: usize, l: f64) -> Result<CurrentProfile> {
    let grid = GridSpec::new(1, n, l)?;
    Ok(CurrentProfile::from_values(&grid.sample(|x| (-x[0] * x[0]).exp()))?)
}

struct Rows(Table);

impl Rows {
    fn push(&mut self, quantity: &str, parameter: String, value: f64, reference: Option<f64>, error: Option<f64>, ok: bool) {
        self.0.push(vec![
            quantity.into(),
            parameter.into(),
            value.into(),
            Cell::from(reference),
            Cell::from(error),
            Verdict::from_check(ok).into(),
        ]);
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let opts = &cfg.u1;
    let tol = cfg.tolerance();
    let (f, gaussian) = match &opts.profile_file {
        Some(path) => (read_profile(path)?, false),
        None => (gaussian_profile(cfg.grid_sizes()[0], cfg.half_extent())?, true),
    };
    let l = f.grid().half_extent();
    let a = opts.cut.unwrap_or(0.0);
    let mut rows = Rows(Table::new("u1", &["quantity", "parameter", "value", "reference", "error", "verdict"]));

    let norm = u1_norm(&f);
    let dual = u1_norm_dual(&f)?;
    let err = relative(norm, dual);
    rows.push("norm", "lattice".into(), norm, Some(dual), Some(err), err <= tol);

    let right = halfline_entropy(&f, a, Side::Right);
    // Closed form for e^{-x²} at the origin.
    let reference = (gaussian && a == 0.0).then_some(PI / 2.0);
    let err = reference.map(|r| relative(right, r));
    rows.push("halfline_right", format!("a={a}"), right, reference, err, right >= 0.0 && err.is_none_or(|e| e <= tol));
    let left = halfline_entropy(&f, a, Side::Left);
    let err = reference.map(|r| relative(left, r));
    rows.push("halfline_left", format!("a={a}"), left, reference, err, left >= 0.0 && err.is_none_or(|e| e <= tol));

    let [ia, ib] = opts.interval.unwrap_or([-1.0, 1.0]);
    let s = interval_entropy(&f, ia, ib)?;
    rows.push("interval", format!("[{ia};{ib}]"), s, None, None, s >= 0.0);

    let step = opts.ant.unwrap_or(1e-2);
    let ant = ant_check(&f, a, step)?;
    let scale = ant.derivative_exact.abs();
    let err = if scale > 0.0 { ant.derivative_error() / scale } else { ant.derivative_error() };
    rows.push("ant_derivative", format!("h={step}"), ant.derivative_fd, Some(ant.derivative_exact), Some(err), err <= tol);
    let err = if scale > 0.0 { ant.infimum_error() / scale } else { ant.infimum_error() };
    rows.push("ant_infimum", format!("a={a}"), ant.infimum, Some(-ant.derivative_exact), Some(err), err <= tol);
    // A competitor that changes the profile left of the cut must cost more.
    let (c, w) = (a - 2.0, 1.0);
    if c - w > -0.9 * l {
        let bump = Bump { center: [c, 0.0, 0.0], width: w, steepness: 1.0, amplitude: 0.3 };
        let p = CurrentProfile::from_values(&BumpSum::from(vec![bump]).sample(f.grid()))?;
        let e = ant_competitor_energy(&f, a, &p)?;
        rows.push("ant_competitor", format!("bump@{c}"), e, Some(ant.minimizer_energy), None, e > ant.minimizer_energy);
    }

    let [ba, bb] = opts.balance.unwrap_or([0.0, 1.0]);
    let b = balance_check(&f, ba, bb)?;
    let scale = b.right.iter().chain(&b.left).fold(0.0f64, |m, v| m.max(v.abs()));
    let btol = opts.balance_tolerance.unwrap_or(1e-8);
    let err = if scale > 0.0 { b.residual.abs() / scale } else { b.residual.abs() };
    rows.push("balance", format!("[{ba};{bb}]"), b.residual, Some(0.0), Some(err), err <= btol);
    let err = relative(b.null_energy, b.half_gradient_energy);
    rows.push("null_energy", "spectral".into(), b.null_energy, Some(b.half_gradient_energy), Some(err), err <= tol);

    if let Some(sd) = opts.dilation {
        let base = interval_entropy(&f, -1.0, 1.0)?;
        let r = dilation_flow_check(&f, sd)?;
        let err = if base > 0.0 { r.abs() / base } else { r.abs() };
        rows.push("dilation_flow", format!("s={sd}"), r, Some(0.0), Some(err), err <= tol);
    }
    Ok(vec![rows.0])
}
