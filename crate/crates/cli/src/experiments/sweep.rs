//! Convergence studies at doubling resolutions.
//!
//! Errors are measured against the finest level and orders between
//! consecutive levels. Expectations: spectral quantities beat `N⁻⁴`, the
//! finite-element `Γ` is second order, and the energy integral is
//! refinement-stable to the configured tolerance.

use wavebound::entropy::halfspace_entropy;
use wavebound::gamma::ExteriorSolver;
use wavebound::Side;

use super::gamma::seeded_trace;
use super::{for_samples, seeded_packet};
use crate::config::{ExperimentConfig, SweepQuantity};
use crate::error::{AtSample, CliError, Result};
use crate::report::{Cell, Table, Verdict};

/// Smallest acceptable order for spectral quantities.
pub const SPECTRAL_ORDER: f64 = 4.0;
/// Smallest acceptable order for the second-order discretization.
pub const FE_ORDER: f64 = 1.8;

fn quantity_name(q: SweepQuantity) -> &'static str {
    match q {
        SweepQuantity::Halfspace => "halfspace_entropy",
        SweepQuantity::Gamma => "gamma",
        SweepQuantity::T00 => "t00_integral",
    }
}

pub fn convergence_sweep(cfg: &ExperimentConfig, levels: usize) -> Result<Table> {
    if levels < 2 {
        return Err(CliError::config("a sweep needs at least two levels"));
    }
    let q = cfg.sweep_quantity();
    let dim = cfg.dim();
    let mass = cfg.masses()[0];
    let l = cfg.half_extent();
    let n0 = cfg.grid_sizes()[0];

    let values: Vec<(usize, f64)> = for_samples(levels, |k| match q {
        SweepQuantity::Halfspace => {
            let data = seeded_packet(dim, n0 << k, l, mass, cfg.seed, 0)?;
            Ok((n0 << k, halfspace_entropy(&data, 0, 0.0, Side::Right)))
        }
        SweepQuantity::T00 => {
            let data = seeded_packet(dim, n0 << k, l, mass, cfg.seed, 0)?;
            Ok((n0 << k, data.total_energy()))
        }
        SweepQuantity::Gamma => {
            let p = cfg.exterior_problem(mass, k).at_sample(k)?;
            let h = seeded_trace(dim, cfg.gamma.trace_samples.unwrap_or(64), cfg.seed, 0)?;
            let v = ExteriorSolver::new(&p).and_then(|s| s.evaluate(&h)).at_sample(k)?.volume;
            Ok((p.resolution, v))
        }
    })?;

    let finest = values[levels - 1].1;
    let scale = finest.abs().max(f64::MIN_POSITIVE);
    let errors: Vec<f64> = values.iter().map(|(_, v)| (v - finest).abs()).collect();
    let (expected, min_order) = match q {
        SweepQuantity::Halfspace => ("super-algebraic", Some(SPECTRAL_ORDER)),
        SweepQuantity::Gamma => ("2", Some(FE_ORDER)),
        SweepQuantity::T00 => ("stable", None),
    };

    let mut table = Table::new("sweep", &["quantity", "level", "n", "value", "error", "order", "expected", "verdict"]);
    for (k, &(n, v)) in values.iter().enumerate() {
        let order = (k + 1 < levels - 1).then(|| (errors[k] / errors[k + 1]).log2());
        let verdict = match (min_order, order) {
            // Differences at round-off carry no order information.
            (Some(p), Some(o)) => Some(Verdict::from_check(errors[k + 1] <= 1e-12 * scale || o >= p)),
            (None, _) if k + 2 == levels => Some(Verdict::from_check(errors[k] <= cfg.tolerance() * scale)),
            _ => None,
        };
        table.push(vec![
            quantity_name(q).into(),
            k.into(),
            n.into(),
            v.into(),
            errors[k].into(),
            Cell::from(order),
            expected.into(),
            Cell::from(verdict),
        ]);
    }
    Ok(table)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    Ok(vec![convergence_sweep(cfg, cfg.sweep_levels())?])
}
