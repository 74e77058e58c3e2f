//! Experiment configuration.
//!
//! A configuration is a TOML document. Every key is optional except
//! `experiment`; missing values take per-experiment defaults when the
//! configuration is resolved. Example:
//!
//! ```toml
//! experiment = "bekenstein"
//! dim = 2
//! masses = [0.0, 1.0]
//! grid_sizes = [256]
//! half_extent = 1.5
//! region = "ball:1.0"          # or "cube:0.8", optionally "@x,y,z" for the centre
//! seed = 7
//! samples = 100
//! tolerance = 1e-6
//! out = "runs/bekenstein.csv"
//!
//! [gamma]
//! offset = 0.1
//! refine = 2
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wavebound::gamma::ExteriorProblem;
use wavebound::Region;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Bekenstein,
    Gamma,
    Eigen,
    U1,
    Balance,
    Qdec,
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Bekenstein => "bekenstein",
            Experiment::Gamma => "gamma",
            Experiment::Eigen => "eigen",
            Experiment::U1 => "u1",
            Experiment::Balance => "balance",
            Experiment::Qdec => "qdec",
            Experiment::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Ball,
    Cube,
}

/// `ball:R`, `cube:H` (half side), optionally followed by `@x,y,z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RegionSpec {
    pub shape: Shape,
    pub size: f64,
    pub center: [f64; 3],
}

impl RegionSpec {
    pub fn region(&self) -> Region {
        match self.shape {
            Shape::Ball => Region::ball(self.center, self.size),
            Shape::Cube => Region::cube(self.center, self.size),
        }
    }

    /// Largest coordinate reached by the region along any axis.
    fn reach(&self, dim: usize) -> f64 {
        let c = self.center[..dim].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        c + self.size
    }
}

impl Default for RegionSpec {
    fn default() -> Self {
        Self { shape: Shape::Ball, size: 1.0, center: [0.0; 3] }
    }
}

impl FromStr for RegionSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (body, center) = match s.split_once('@') {
            Some((b, c)) => (b, Some(c)),
            None => (s, None),
        };
        let (kind, size) = body.split_once(':').ok_or_else(|| format!("region `{s}` is not of the form kind:size"))?;
        let shape = match kind.trim() {
            "ball" => Shape::Ball,
            "cube" | "box" => Shape::Cube,
            other => return Err(format!("unknown region kind `{other}`")),
        };
        let size: f64 = size.trim().parse().map_err(|_| format!("bad region size `{size}`"))?;
        let mut c = [0.0; 3];
        if let Some(center) = center {
            let parts: Vec<&str> = center.split(',').collect();
            if parts.is_empty() || parts.len() > 3 {
                return Err(format!("region centre `{center}` needs one to three coordinates"));
            }
            for (slot, p) in c.iter_mut().zip(parts) {
                *slot = p.trim().parse().map_err(|_| format!("bad centre coordinate `{p}`"))?;
            }
        }
        Ok(Self { shape, size, center: c })
    }
}

impl TryFrom<String> for RegionSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<RegionSpec> for String {
    fn from(r: RegionSpec) -> String {
        let kind = match r.shape {
            Shape::Ball => "ball",
            Shape::Cube => "cube",
        };
        if r.center == [0.0; 3] {
            format!("{kind}:{}", r.size)
        } else {
            format!("{kind}:{}@{},{},{}", r.size, r.center[0], r.center[1], r.center[2])
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaOptions {
    /// Gap `δ` between the region and the cut.
    pub offset: Option<f64>,
    pub lout: Option<f64>,
    /// Finite-element resolution at the coarsest level.
    pub resolution: Option<usize>,
    /// Number of extra resolution doublings for the convergence table.
    pub refine: Option<usize>,
    /// CSV `angle,value` (d = 2) or `near,far` (d = 1).
    pub boundary_file: Option<PathBuf>,
    /// Samples per seeded circle trace.
    pub trace_samples: Option<usize>,
    /// Emit the convexity, monotonicity and scaling table.
    pub properties: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenOptions {
    pub extrapolate: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct U1Options {
    /// CSV `x,f` on a uniform power-of-two grid; a Gaussian `e^{-x²}` otherwise.
    pub profile_file: Option<PathBuf>,
    pub cut: Option<f64>,
    pub interval: Option<[f64; 2]>,
    /// Finite-difference step of the cut-derivative check.
    pub ant: Option<f64>,
    pub balance: Option<[f64; 2]>,
    pub balance_tolerance: Option<f64>,
    /// Dilation parameter of the flow check; needs `f'` supported in (-1, 1).
    pub dilation: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceOptions {
    /// Random vertex pairs per packet.
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QdecOptions {
    pub cuts: Option<Vec<f64>>,
    /// Finite-difference step; twice the grid spacing by default.
    pub step: Option<f64>,
    /// Step halvings in the order study (0 disables it).
    pub halvings: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepQuantity {
    Halfspace,
    Gamma,
    T00,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    pub quantity: Option<SweepQuantity>,
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dim: Option<usize>,
    pub masses: Option<Vec<f64>>,
    pub grid_sizes: Option<Vec<usize>>,
    pub half_extent: Option<f64>,
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub seed: u64,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub gamma: GammaOptions,
    #[serde(default)]
    pub eigen: EigenOptions,
    #[serde(default)]
    pub u1: U1Options,
    #[serde(default)]
    pub balance: BalanceOptions,
    #[serde(default)]
    pub qdec: QdecOptions,
    #[serde(default)]
    pub sweep: SweepOptions,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            dim: None,
            masses: None,
            grid_sizes: None,
            half_extent: None,
            region: None,
            seed: 0,
            samples: None,
            tolerance: None,
            out: None,
            gamma: GammaOptions::default(),
            eigen: EigenOptions::default(),
            u1: U1Options::default(),
            balance: BalanceOptions::default(),
            qdec: QdecOptions::default(),
            sweep: SweepOptions::default(),
        }
    }

    /// Parse a TOML document. When `expected` is given the document may omit
    /// `experiment`, but must not name a different one.
    pub fn from_toml(text: &str, expected: Option<Experiment>) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(e.to_string()))?;
        if let Some(exp) = expected {
            match table.get("experiment") {
                None => {
                    table.insert("experiment".into(), toml::Value::String(exp.name().into()));
                }
                Some(toml::Value::String(s)) if s == exp.name() => {}
                Some(other) => {
                    return Err(CliError::config(format!("config names experiment {other}, but `{exp}` was requested")))
                }
            }
        }
        table.try_into().map_err(|e: toml::de::Error| CliError::config(e.to_string()))
    }

    pub fn from_file(path: &Path, expected: Option<Experiment>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, expected)
    }

    /// Fill in the per-experiment defaults and validate. Nothing is computed
    /// before this succeeds.
    pub fn resolved(mut self) -> Result<Self> {
        use Experiment::*;
        let exp = self.experiment;
        let dim = *self.dim.get_or_insert(match exp {
            Balance | Sweep | U1 => 1,
            _ => 2,
        });
        self.masses.get_or_insert_with(|| match (exp, dim) {
            (Bekenstein, 1) | (Balance, _) | (Qdec, _) | (Sweep, _) => vec![1.0],
            _ => vec![0.0],
        });
        self.grid_sizes.get_or_insert_with(|| match exp {
            Bekenstein | Qdec if dim == 3 => vec![128],
            Bekenstein | Qdec | Eigen => vec![256],
            Balance => vec![512],
            U1 => vec![2048],
            Sweep => vec![256],
            Gamma => vec![],
        });
        self.half_extent.get_or_insert(match exp {
            Bekenstein => 1.5,
            Qdec => 4.0,
            Balance => 8.0,
            U1 => 10.0,
            _ => 6.0,
        });
        self.region.get_or_insert_with(RegionSpec::default);
        self.samples.get_or_insert(match exp {
            Bekenstein => 100,
            Gamma => 4,
            Balance => 10,
            _ => 1,
        });
        self.tolerance.get_or_insert(match exp {
            Bekenstein | Balance => 1e-6,
            Gamma | Eigen => 1e-3,
            U1 => 1e-4,
            Qdec => 1e-8,
            Sweep => 1e-10,
        });
        self.out.get_or_insert_with(|| PathBuf::from(format!("{exp}.csv")));

        let g = &mut self.gamma;
        g.offset.get_or_insert(0.1);
        g.refine.get_or_insert(0);
        g.trace_samples.get_or_insert(64);
        g.properties.get_or_insert(true);
        self.eigen.extrapolate.get_or_insert(true);
        let u = &mut self.u1;
        u.cut.get_or_insert(0.0);
        u.interval.get_or_insert([-1.0, 1.0]);
        u.ant.get_or_insert(1e-2);
        u.balance.get_or_insert([0.0, 1.0]);
        u.balance_tolerance.get_or_insert(1e-8);
        self.balance.pairs.get_or_insert(3);
        self.qdec.halvings.get_or_insert(3);
        self.sweep.quantity.get_or_insert(SweepQuantity::Halfspace);
        self.sweep.levels.get_or_insert(if dim == 1 { 4 } else { 3 });

        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        use Experiment::*;
        let exp = self.experiment;
        let bad = |msg: String| Err(CliError::ConfigInvalid(msg));
        let dim = self.dim();
        if !(1..=3).contains(&dim) {
            return bad(format!("dim must be 1, 2 or 3, got {dim}"));
        }
        match exp {
            Gamma if dim > 2 => return bad("gamma needs dim 1 or 2".into()),
            Balance | U1 if dim != 1 => return bad(format!("{exp} is one-dimensional")),
            Sweep if self.sweep_quantity() == SweepQuantity::Gamma && dim > 2 => {
                return bad("gamma sweeps need dim 1 or 2".into())
            }
            _ => {}
        }
        let tol = self.tolerance();
        if !(tol > 0.0 && tol.is_finite()) {
            return bad(format!("tolerance must be positive, got {tol}"));
        }
        let masses = self.masses();
        if masses.is_empty() || masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return bad("masses must be a non-empty list of finite non-negative numbers".into());
        }
        let needs_mass = matches!(exp, Balance) || (matches!(exp, Bekenstein) && dim == 1);
        if needs_mass && masses.iter().any(|&m| m == 0.0) {
            return bad(format!("{exp} with dim {dim} needs positive masses"));
        }
        if exp != Gamma {
            let sizes = self.grid_sizes();
            if sizes.is_empty() {
                return bad("grid_sizes must not be empty".into());
            }
            if let Some(n) = sizes.iter().find(|n| !n.is_power_of_two() || **n < 8) {
                return bad(format!("grid size {n} is not a power of two of at least 8"));
            }
        }
        let l = self.half_extent();
        if !(l > 0.0 && l.is_finite()) {
            return bad(format!("half_extent must be positive, got {l}"));
        }
        if self.samples() == 0 {
            return bad("samples must be at least 1".into());
        }
        let region = self.region();
        if !(region.size > 0.0 && region.size.is_finite()) || region.center.iter().any(|c| !c.is_finite()) {
            return bad("region size must be positive and its centre finite".into());
        }
        if exp == Bekenstein && region.reach(dim) > 0.9 * l {
            return bad(format!("region reaches {} but the grid box ends at {l}", region.reach(dim)));
        }
        if exp == Gamma && region.shape != Shape::Ball {
            return bad("gamma needs a ball region".into());
        }
        if self.out().as_os_str().is_empty() {
            return bad("out must be a path".into());
        }

        match exp {
            Gamma => {
                let g = &self.gamma;
                if let Some(path) = &g.boundary_file {
                    if !path.is_file() {
                        return bad(format!("boundary file {} does not exist", path.display()));
                    }
                }
                if g.trace_samples.unwrap_or(64) < 3 {
                    return bad("trace_samples must be at least 3".into());
                }
                for &m in masses {
                    self.exterior_problem(m, 0).map_err(|e| CliError::config(e.to_string()))?;
                }
            }
            U1 => {
                let u = &self.u1;
                if let Some(path) = &u.profile_file {
                    if !path.is_file() {
                        return bad(format!("profile file {} does not exist", path.display()));
                    }
                }
                let [a, b] = self.u1.interval.unwrap();
                if !(a < b) {
                    return bad(format!("interval needs a < b, got [{a}, {b}]"));
                }
                let [a, b] = self.u1.balance.unwrap();
                if !(a <= b) {
                    return bad(format!("balance needs a ≤ b, got [{a}, {b}]"));
                }
                let step = u.ant.unwrap();
                let btol = u.balance_tolerance.unwrap();
                if !(step > 0.0 && btol > 0.0) {
                    return bad("ant step and balance tolerance must be positive".into());
                }
                if u.cut.is_some_and(|c| !c.is_finite()) || u.dilation.is_some_and(|s| !s.is_finite()) {
                    return bad("cut and dilation must be finite".into());
                }
            }
            Qdec => {
                if self.qdec.step.is_some_and(|h| !(h > 0.0)) {
                    return bad("qdec step must be positive".into());
                }
                if self.qdec.cuts.as_ref().is_some_and(|c| c.is_empty() || c.iter().any(|v| !v.is_finite())) {
                    return bad("qdec cuts must be a non-empty list of finite numbers".into());
                }
            }
            Balance => {
                if self.balance.pairs == Some(0) {
                    return bad("balance needs at least one vertex pair".into());
                }
            }
            Sweep => {
                if self.sweep_levels() < 2 {
                    return bad("a sweep needs at least two levels".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim.unwrap_or(2)
    }

    pub fn masses(&self) -> &[f64] {
        self.masses.as_deref().unwrap_or(&[])
    }

    pub fn grid_sizes(&self) -> &[usize] {
        self.grid_sizes.as_deref().unwrap_or(&[])
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent.unwrap_or(1.0)
    }

    pub fn region(&self) -> RegionSpec {
        self.region.unwrap_or_default()
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(1)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(1e-6)
    }

    pub fn out(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.experiment)))
    }

    pub fn sweep_quantity(&self) -> SweepQuantity {
        self.sweep.quantity.unwrap_or(SweepQuantity::Halfspace)
    }

    pub fn sweep_levels(&self) -> usize {
        self.sweep.levels.unwrap_or(4)
    }

    /// Exterior problem at refinement `level` (resolution doubled `level` times).
    pub fn exterior_problem(&self, mass: f64, level: usize) -> wavebound::Result<ExteriorProblem> {
        let r = self.region().size;
        let mut p = ExteriorProblem::new(self.dim(), r, self.gamma.offset.unwrap_or(0.1), mass)?;
        if let Some(lout) = self.gamma.lout {
            p = p.with_lout(lout)?;
        }
        let base = self.gamma.resolution.unwrap_or(p.resolution);
        p.with_resolution(base << level)
    }
}
