//! Lowest eigenvalue of the radial problem against the bound `d - 1`.

use wavebound::eigen::{ground_state, lambda1, rayleigh_quotient, RadialMesh};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{Cell, Table, Verdict};

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let dim = cfg.dim();
    let tol = cfg.tolerance();
    let bound = dim as f64 - 1.0;
    let mut table = Table::new(
        "lambda1",
        &["dim", "n", "lambda", "lambda_fine", "lambda_extrapolated", "rayleigh_quotient", "bound", "margin", "verdict"],
    );
    for &n in cfg.grid_sizes() {
        let (coarse, fine, best) = if cfg.eigen.extrapolate.unwrap_or(true) {
            let l = lambda1(dim, n)?;
            let best = l.extrapolated;
            (l.coarse, Some(l.fine.lambda), best)
        } else {
            let g = ground_state(RadialMesh::new(dim, n)?)?;
            let best = g.lambda;
            (g, None, best)
        };
        let rq = rayleigh_quotient(&coarse.state)?;
        let extrapolated = fine.map(|_| best);
        table.push(vec![
            dim.into(),
            n.into(),
            coarse.lambda.into(),
            Cell::from(fine),
            Cell::from(extrapolated),
            rq.into(),
            bound.into(),
            (best - bound).into(),
            Verdict::from_check(best >= bound - tol).into(),
        ]);
    }
    Ok(vec![table])
}
