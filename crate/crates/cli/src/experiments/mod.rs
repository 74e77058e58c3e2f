//! One module per experiment. Each returns its tables; the primary table
//! comes first and every table with a `verdict` column contributes to the
//! run verdict.

pub mod balance;
pub mod bekenstein;
pub mod eigen;
pub mod gamma;
pub mod qdec;
pub mod sweep;
pub mod u1;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use wavebound::bumps::{rng_from_seed, BumpSampler, Container};
use wavebound::{CauchyData, GridSpec};

use crate::error::{AtSample, Result};

/// Independent generator for sample `index`: the seed selects the key and the
/// index the stream, so samples can be drawn in any order.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(index as u64);
    rng
}

/// Evaluate `f` for every sample in parallel. Results and the first error are
/// reported in sample order whatever the scheduling.
pub fn for_samples<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = (0..count).into_par_iter().map(f).collect();
    results.into_iter().collect()
}

/// Seeded packet with bump supports inside the ball of radius `0.6 L`.
pub fn seeded_packet(dim: usize, n: usize, l: f64, mass: f64, seed: u64, index: usize) -> Result<CauchyData> {
    let grid = GridSpec::new(dim, n, l).at_sample(index)?;
    let sampler = BumpSampler::new(dim, Container::Ball { center: [0.0; 3], radius: 0.6 * l }, (0.2 * l, 0.3 * l));
    let mut rng = sample_rng(seed, index);
    let f = sampler.draw(&mut rng).sample(&grid);
    let g = sampler.draw(&mut rng).sample(&grid);
    CauchyData::new(f, g, mass).at_sample(index)
}
