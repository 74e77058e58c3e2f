//! Entropy balance between wedge vertices and wedge convexity on seeded
//! packets in one space dimension.

use rand::Rng;
use wavebound::entropy::{entropy_balance_residual, wedge_convexity_check, wedge_entropy};
use wavebound::WedgeVertex;

use super::{for_samples, sample_rng, seeded_packet};
use crate::config::ExperimentConfig;
use crate::error::{AtSample, Result};
use crate::report::{Table, Verdict};

/// Relative slack allowed below zero for the convexity gap.
pub const CONVEXITY_TOLERANCE: f64 = 1e-8;

/// Stream offset keeping vertex draws independent of the packet draws.
const VERTEX_STREAM: usize = 1 << 32;

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let n = cfg.grid_sizes()[0];
    let l = cfg.half_extent();
    let masses = cfg.masses();
    let pairs = cfg.balance.pairs.unwrap_or(3);
    let tol = cfg.tolerance();

    let results = for_samples(cfg.samples(), |i| {
        let mass = masses[i % masses.len()];
        let data = seeded_packet(1, n, l, mass, cfg.seed, i)?;
        let scale = data.energy_expectation();
        let mut rng = sample_rng(cfg.seed, VERTEX_STREAM + i);
        let mut vertex = || WedgeVertex::new(rng.random_range(-0.5..0.5), rng.random_range(-1.0..1.0));
        let mut balance = Vec::with_capacity(pairs);
        for _ in 0..pairs {
            let (x, y) = (vertex(), vertex());
            balance.push((x, y, entropy_balance_residual(&data, x, y).at_sample(i)?));
        }
        let x = WedgeVertex::new(0.0, -0.5);
        let wedge = wedge_entropy(&data, x).at_sample(i)?;
        let gap = wedge_convexity_check(&data, x, [0.1, 0.3], [-0.05, 0.2]).at_sample(i)?;
        Ok((mass, scale, balance, wedge, gap))
    })?;

    let mut table = Table::new(
        "balance",
        &["sample", "mass", "pair", "x_t", "x_x", "y_t", "y_x", "residual", "energy", "relative", "verdict"],
    );
    let mut convexity = Table::new("convexity", &["sample", "mass", "wedge_entropy", "gap", "verdict"]);
    for (i, (mass, scale, balance, wedge, gap)) in results.into_iter().enumerate() {
        for (k, (x, y, r)) in balance.into_iter().enumerate() {
            let rel = r.abs() / scale;
            table.push(vec![
                i.into(),
                mass.into(),
                k.into(),
                x.t.into(),
                x.x.into(),
                y.t.into(),
                y.x.into(),
                r.into(),
                scale.into(),
                rel.into(),
                Verdict::from_check(rel <= tol).into(),
            ]);
        }
        let ok = gap >= -CONVEXITY_TOLERANCE * wedge.abs();
        convexity.push(vec![i.into(), mass.into(), wedge.into(), gap.into(), Verdict::from_check(ok).into()]);
    }
    Ok(vec![table, convexity])
}
