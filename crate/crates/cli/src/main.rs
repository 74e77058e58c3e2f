use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use wavebound_cli::config::{Experiment, ExperimentConfig, RegionSpec, SweepQuantity};
use wavebound_cli::run;

/// Local entropy and energy experiments for free wave packets and U(1) currents.
///
/// Exit status: 0 when no verdict failed, 1 when any did, 2 on errors.
#[derive(Parser, Debug)]
#[command(name = "wavebound", version)]
struct Cli {
    /// TOML configuration; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Primary CSV path; the JSON summary and extra tables are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (all cores by default).
    #[arg(long, global = true, env = "WAVEBOUND_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    dim: Option<usize>,

    /// Masses, comma separated or repeated.
    #[arg(long = "mass", value_delimiter = ',')]
    masses: Vec<f64>,

    /// Grid sizes, comma separated or repeated.
    #[arg(long = "n", value_delimiter = ',')]
    grid_sizes: Vec<usize>,

    #[arg(long)]
    half_extent: Option<f64>,

    #[arg(long)]
    samples: Option<usize>,

    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Localized entropy bound on seeded data.
    Bekenstein {
        #[command(flatten)]
        common: Common,
        /// `ball:R` or `cube:H`, optionally `@x,y,z`.
        #[arg(long)]
        region: Option<RegionSpec>,
    },
    /// Boundary correction values, flux check and convergence table.
    Gamma {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        region: Option<RegionSpec>,
        /// CSV `angle,value` (d = 2) or one `near,far` row (d = 1).
        #[arg(long)]
        boundary_file: Option<PathBuf>,
        #[arg(long)]
        lout: Option<f64>,
        /// Resolution doublings beyond the base level.
        #[arg(long)]
        refine: Option<usize>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        offset: Option<f64>,
    },
    /// Lowest radial eigenvalue table.
    Eigen {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        extrapolate: Option<bool>,
    },
    /// Current-profile entropies and identities.
    U1 {
        #[command(flatten)]
        common: Common,
        /// CSV `x,f` on a uniform grid.
        #[arg(long)]
        profile_file: Option<PathBuf>,
        #[arg(long)]
        cut: Option<f64>,
        /// Interval `a,b`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        interval: Option<Vec<f64>>,
        /// Finite-difference step of the cut-derivative check.
        #[arg(long)]
        ant: Option<f64>,
        /// Cuts `a,b` of the balance identity.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        balance: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        dilation: Option<f64>,
    },
    /// Wedge entropy balance and convexity.
    Balance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Second cut derivative against the slice energy.
    Qdec {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        cuts: Option<Vec<f64>>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        halvings: Option<usize>,
    },
    /// Convergence study at doubling resolutions.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        quantity: Option<SweepQuantity>,
        #[arg(long)]
        levels: Option<usize>,
    },
}

fn pair(v: Option<Vec<f64>>) -> Option<[f64; 2]> {
    v.map(|v| [v[0], v[1]])
}

impl Command {
    fn experiment(&self) -> Experiment {
        match self {
            Command::Bekenstein { .. } => Experiment::Bekenstein,
            Command::Gamma { .. } => Experiment::Gamma,
            Command::Eigen { .. } => Experiment::Eigen,
            Command::U1 { .. } => Experiment::U1,
            Command::Balance { .. } => Experiment::Balance,
            Command::Qdec { .. } => Experiment::Qdec,
            Command::Sweep { .. } => Experiment::Sweep,
        }
    }

    fn apply(self, cfg: &mut ExperimentConfig) {
        let common = match self {
            Command::Bekenstein { common, region } => {
                cfg.region = region.or(cfg.region);
                common
            }
            Command::Gamma { common, region, boundary_file, lout, refine, resolution, offset } => {
                cfg.region = region.or(cfg.region);
                let g = &mut cfg.gamma;
                g.boundary_file = boundary_file.or(g.boundary_file.take());
                g.lout = lout.or(g.lout);
                g.refine = refine.or(g.refine);
                g.resolution = resolution.or(g.resolution);
                g.offset = offset.or(g.offset);
                common
            }
            Command::Eigen { common, extrapolate } => {
                cfg.eigen.extrapolate = extrapolate.or(cfg.eigen.extrapolate);
                common
            }
            Command::U1 { common, profile_file, cut, interval, ant, balance, dilation } => {
                let u = &mut cfg.u1;
                u.profile_file = profile_file.or(u.profile_file.take());
                u.cut = cut.or(u.cut);
                u.interval = pair(interval).or(u.interval);
                u.ant = ant.or(u.ant);
                u.balance = pair(balance).or(u.balance);
                u.dilation = dilation.or(u.dilation);
                common
            }
            Command::Balance { common, pairs } => {
                cfg.balance.pairs = pairs.or(cfg.balance.pairs);
                common
            }
            Command::Qdec { common, cuts, step, halvings } => {
                let q = &mut cfg.qdec;
                q.cuts = cuts.or(q.cuts.take());
                q.step = step.or(q.step);
                q.halvings = halvings.or(q.halvings);
                common
            }
            Command::Sweep { common, quantity, levels } => {
                cfg.sweep.quantity = quantity.or(cfg.sweep.quantity);
                cfg.sweep.levels = levels.or(cfg.sweep.levels);
                common
            }
        };
        cfg.dim = common.dim.or(cfg.dim);
        if !common.masses.is_empty() {
            cfg.masses = Some(common.masses);
        }
        if !common.grid_sizes.is_empty() {
            cfg.grid_sizes = Some(common.grid_sizes);
        }
        cfg.half_extent = common.half_extent.or(cfg.half_extent);
        cfg.samples = common.samples.or(cfg.samples);
        cfg.tolerance = common.tolerance.or(cfg.tolerance);
    }
}

fn configure(cli: Cli) -> anyhow::Result<ExperimentConfig> {
    let experiment = cli.command.experiment();
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path, Some(experiment))?,
        None => ExperimentConfig::new(experiment),
    };
    cli.command.apply(&mut cfg);
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.out = cli.out.or(cfg.out);
    Ok(cfg.resolved()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = configure(cli).and_then(|cfg| run(cfg).context("run failed"));
    match result {
        Ok(report) => {
            let counts = report.counts();
            println!(
                "{}: {} ({} pass, {} fail, {} inconclusive)",
                report.experiment(),
                report.verdict(),
                counts.pass,
                counts.fail,
                counts.inconclusive
            );
            if let Ok(files) = report.files() {
                for (path, _) in files {
                    println!("wrote {}", path.display());
                }
            }
            eprintln!("wall clock: {:.3} s", report.wall_clock.as_secs_f64());
            if report.any_fail() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
