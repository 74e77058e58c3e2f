//! Second cut derivative of the half-space entropy against the slice energy.

use wavebound::entropy::qdec_profile_with_step;

use super::{for_samples, seeded_packet};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{Cell, Table, Verdict};

/// Lowest acceptable observed order of the finite-difference error.
pub const MIN_ORDER: f64 = 1.75;

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let dim = cfg.dim();
    let n = cfg.grid_sizes()[0];
    let l = cfg.half_extent();
    let mass = cfg.masses()[0];
    let tol = cfg.tolerance();
    let cuts = cfg
        .qdec
        .cuts
        .clone()
        .unwrap_or_else(|| (0..=20).map(|k| -0.5 * l + 0.05 * l * k as f64).collect());
    let halvings = cfg.qdec.halvings.unwrap_or(3);
    let base_step = 0.05 * l;

    let results = for_samples(cfg.samples(), |i| {
        let data = seeded_packet(dim, n, l, mass, cfg.seed, i)?;
        let step = cfg.qdec.step.unwrap_or(2.0 * data.grid().dx());
        let rows = qdec_profile_with_step(&data, 0, &cuts, step);
        let study: Vec<(f64, f64)> = if halvings > 0 {
            (0..=halvings)
                .map(|k| {
                    let h = base_step / (1 << k) as f64;
                    let worst = qdec_profile_with_step(&data, 0, &cuts, h)
                        .iter()
                        .map(|r| (r.second_difference - r.slice_integral).abs())
                        .fold(0.0, f64::max);
                    (h, worst)
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok((rows, study))
    })?;

    let mut profile = Table::new(
        "qdec",
        &["sample", "cut", "S", "slice_integral", "second_difference", "difference_error", "verdict"],
    );
    let mut orders = Table::new("orders", &["sample", "step", "max_error", "order", "verdict"]);
    for (i, (rows, study)) in results.into_iter().enumerate() {
        let scale = rows.iter().fold(0.0f64, |a, r| a.max(r.entropy.abs()).max(r.slice_integral.abs()));
        for r in rows {
            let ok = r.slice_integral >= -tol * scale && r.second_difference >= -tol * scale;
            profile.push(vec![
                i.into(),
                r.cut.into(),
                r.entropy.into(),
                r.slice_integral.into(),
                r.second_difference.into(),
                (r.second_difference - r.slice_integral).into(),
                Verdict::from_check(ok).into(),
            ]);
        }
        for (k, &(h, err)) in study.iter().enumerate() {
            let order = k.checked_sub(1).map(|p| (study[p].1 / err).log2());
            // Errors at round-off carry no order information.
            let resolved = err > 1e-12 * scale;
            // Only the finest pair is expected to be in the asymptotic regime.
            let verdict = order
                .filter(|_| k + 1 == study.len())
                .map(|o| Verdict::from_check(!resolved || o >= MIN_ORDER));
            orders.push(vec![i.into(), h.into(), err.into(), Cell::from(order), Cell::from(verdict)]);
        }
    }
    let mut tables = vec![profile];
    if halvings > 0 {
        tables.push(orders);
    }
    Ok(tables)
}
