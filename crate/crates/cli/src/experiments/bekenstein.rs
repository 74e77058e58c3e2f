//! Localized entropy bound on seeded data supported in the region.

use wavebound::bekenstein::{LocalizedAnalysis, Surrogate};
use wavebound::bumps::{BumpSampler, Container};
use wavebound::{Field, GridSpec};

use super::{for_samples, sample_rng};
use crate::config::{ExperimentConfig, RegionSpec, Shape};
use crate::error::{AtSample, Result};
use crate::report::{Cell, Table, Verdict};

/// Seeded `(f, g)` whose bumps lie inside the region, with widths between 0.4
/// and 0.7 of its half-width.
pub fn localized_fields(
    dim: usize,
    n: usize,
    l: f64,
    region: &RegionSpec,
    seed: u64,
    index: usize,
) -> Result<(Field, Field)> {
    let grid = GridSpec::new(dim, n, l).at_sample(index)?;
    let (c, s) = (region.center, region.size);
    let container = match region.shape {
        Shape::Ball => Container::Ball { center: c, radius: s },
        Shape::Cube => Container::Box { lo: [c[0] - s, c[1] - s, c[2] - s], hi: [c[0] + s, c[1] + s, c[2] + s] },
    };
    let sampler = BumpSampler::new(dim, container, (0.4 * s, 0.7 * s));
    let mut rng = sample_rng(seed, index);
    let f = sampler.draw(&mut rng).sample(&grid);
    let g = sampler.draw(&mut rng).sample(&grid);
    Ok((f, g))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let dim = cfg.dim();
    let l = cfg.half_extent();
    let spec = cfg.region();
    let region = spec.region();
    let tol = cfg.tolerance();
    let masses = cfg.masses();

    let mut table = Table::new(
        "margins",
        &[
            "sample", "n", "mass", "surrogate", "entropy", "halfspace_right", "halfspace_left", "energy", "half_width",
            "bound", "margin", "scale", "verdict",
        ],
    );
    for &n in cfg.grid_sizes() {
        let rows = for_samples(cfg.samples(), |i| {
            let (f, g) = localized_fields(dim, n, l, &spec, cfg.seed, i)?;
            let analysis = LocalizedAnalysis::new(&f, &g, &region).at_sample(i)?;
            Ok(masses.iter().map(|&m| (i, m, analysis.report(m))).collect::<Vec<_>>())
        })?;
        for (i, m, r) in rows.into_iter().flatten() {
            let scale = [r.bound, r.entropy, r.halfspace_right, r.halfspace_left]
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()));
            let ok = r.margin >= -tol * scale
                && r.halfspace_right >= -tol * scale
                && r.halfspace_left >= -tol * scale;
            let surrogate = match r.surrogate {
                Surrogate::ExactBall => "exact_ball",
                Surrogate::HalfSpace => "halfspace",
            };
            table.push(vec![
                i.into(),
                n.into(),
                m.into(),
                surrogate.into(),
                r.entropy.into(),
                r.halfspace_right.into(),
                r.halfspace_left.into(),
                r.energy.into(),
                r.half_width.into(),
                r.bound.into(),
                r.margin.into(),
                scale.into(),
                Cell::Verdict(Verdict::from_check(ok)),
            ]);
        }
    }
    Ok(vec![table])
}
