//! Run options shared by flags, TOML config files and sweep grids. Every
//! field is optional so that sources can be layered; flags win over files.

use std::path::{Path, PathBuf};

use clap::Args;
use glauberk_core::analysis::Thresholds;
use glauberk_core::dynamics::{InitialSource, InteractionSource, SimConfig, Verbosity};
use glauberk_core::graph::{origin_extent, BoundaryMode, Extent, PeriodicGraph, WindowGraph};
use glauberk_core::model::{parse_couplings, parse_spins, TemperatureProfile};
use glauberk_core::presets::{example_m_interactions, gamma_preset, preset};
use serde::{Deserialize, Serialize};

use crate::error::{read, CliError, CliResult};

/// Selects a periodic graph.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct GraphArgs {
    /// cubic1 | cubic2 | cubic3 | hex | gamma | example-m
    #[arg(long)]
    pub preset: Option<String>,
    /// Cell-spec file, instead of a preset
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// Base preset of the gamma construction
    #[arg(long)]
    pub base: Option<String>,
    /// Path length of the gamma construction
    #[arg(long)]
    pub ell: Option<usize>,
    /// Number of parallel paths of the gamma construction
    #[arg(long)]
    pub m: Option<usize>,
}

impl GraphArgs {
    pub fn is_example_m(&self) -> bool {
        self.spec.is_none() && self.preset.as_deref() == Some("example-m")
    }

    pub fn build(&self) -> CliResult<PeriodicGraph> {
        if let Some(path) = &self.spec {
            return Ok(glauberk_core::graph::load_cell_spec(&read(path)?)?);
        }
        let name = self
            .preset
            .as_deref()
            .ok_or_else(|| CliError::usage("select a graph with --preset or --spec"))?;
        if name == "gamma" {
            let base = self.base.as_deref().unwrap_or("cubic2");
            Ok(gamma_preset(base, self.ell.unwrap_or(2), self.m.unwrap_or(1))?)
        } else {
            if self.base.is_some() || self.ell.is_some() || self.m.is_some() {
                return Err(CliError::usage("--base, --ell and --m only apply to --preset gamma"));
            }
            Ok(preset(name)?)
        }
    }
}

/// Selects a finite window of the graph.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct WindowArgs {
    /// Cells per axis, starting at the origin
    #[arg(long, conflicts_with = "extent")]
    pub size: Option<i64>,
    /// Half-open cell ranges per axis, e.g. `0:8,0:8` or `-2:4`
    #[arg(long, allow_hyphen_values = true)]
    pub extent: Option<String>,
    /// free | toroidal
    #[arg(long)]
    pub boundary: Option<String>,
}

pub fn default_size(dim: usize) -> i64 {
    match dim {
        1 => 64,
        2 => 16,
        _ => 6,
    }
}

pub fn parse_extent(s: &str) -> CliResult<Extent> {
    s.split(',')
        .map(|r| {
            let (lo, hi) = r
                .split_once(':')
                .ok_or_else(|| CliError::usage(format!("extent range `{r}` is not of the form lo:hi")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| CliError::usage(format!("bad extent bound `{x}`")))
            };
            Ok((num(lo)?, num(hi)?))
        })
        .collect()
}

impl WindowArgs {
    pub fn resolve(&self, dim: usize) -> CliResult<(Extent, BoundaryMode)> {
        let extent = match (&self.extent, self.size) {
            (Some(e), _) => parse_extent(e)?,
            (None, Some(n)) => origin_extent(dim, n),
            (None, None) => origin_extent(dim, default_size(dim)),
        };
        let boundary = match &self.boundary {
            Some(b) => b.parse()?,
            None => BoundaryMode::Toroidal,
        };
        Ok((extent, boundary))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunOptions {
    /// cubic1 | cubic2 | cubic3 | hex | gamma | example-m
    #[arg(long)]
    pub preset: Option<String>,
    /// Cell-spec file, instead of a preset
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// Base preset of the gamma construction
    #[arg(long)]
    pub base: Option<String>,
    /// Path length of the gamma construction
    #[arg(long)]
    pub ell: Option<usize>,
    /// Number of parallel paths of the gamma construction
    #[arg(long)]
    pub m: Option<usize>,
    /// Cells per axis, starting at the origin
    #[arg(long, conflicts_with = "extent")]
    pub size: Option<i64>,
    /// Half-open cell ranges per axis, e.g. `0:8,0:8` or `-2:4`
    #[arg(long, allow_hyphen_values = true)]
    pub extent: Option<String>,
    /// free | toroidal
    #[arg(long)]
    pub boundary: Option<String>,
    /// Largest flip-set size
    #[arg(long)]
    pub k: Option<usize>,
    /// Probability of a +1 coupling
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Probability of a +1 initial spin
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Coupling file, or `figure` for the bundled hexagon-chain couplings
    #[arg(long)]
    pub couplings: Option<String>,
    /// Initial spin file
    #[arg(long)]
    pub spins: Option<PathBuf>,
    /// zero | const:T | log:c[:t0]
    #[arg(long)]
    pub temp: Option<String>,
    /// Time horizon
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Master seed; replica i uses a seed derived from it
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent replicas
    #[arg(long)]
    pub replicas: Option<usize>,
    /// none | accepted | all
    #[arg(long)]
    pub verbosity: Option<String>,
    /// Record H after every n-th accepted flip (0: initial value only)
    #[arg(long)]
    pub energy_stride: Option<u64>,
    /// Largest allowed flip-set catalog
    #[arg(long)]
    pub catalog_cap: Option<usize>,
    /// Stop once no flip set can lower or keep the energy (zero temperature)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub stop_when_absorbed: Option<bool>,
}

macro_rules! take_or {
    ($self:ident, $other:ident; $($f:ident),*) => {
        $( $self.$f = $self.$f.take().or($other.$f); )*
    };
}

impl RunOptions {
    /// Fills every unset field from `other`.
    pub fn merge(&mut self, other: RunOptions) {
        if self.extent.is_none() && self.size.is_none() {
            self.extent = other.extent;
            self.size = other.size;
        }
        take_or!(self, other; preset, spec, base, ell, m, boundary, k, alpha, gamma, couplings, spins, temp,
            tmax, seed, replicas, verbosity, energy_stride, catalog_cap, stop_when_absorbed);
    }

    pub fn from_toml(path: &Path) -> CliResult<RunOptions> {
        let text = read(path)?;
        let mut opts: RunOptions =
            toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        opts.rebase(path.parent().unwrap_or(Path::new(".")));
        Ok(opts)
    }

    /// Makes file references relative to `dir`.
    pub fn rebase(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let Some(p) = self.spec.as_mut() {
            fix(p);
        }
        if let Some(p) = self.spins.as_mut() {
            fix(p);
        }
        if let Some(c) = self.couplings.as_mut() {
            if c != "figure" && Path::new(c.as_str()).is_relative() {
                *c = dir.join(&*c).to_string_lossy().into_owned();
            }
        }
    }

    pub fn graph_args(&self) -> GraphArgs {
        GraphArgs {
            preset: self.preset.clone(),
            spec: self.spec.clone(),
            base: self.base.clone(),
            ell: self.ell,
            m: self.m,
        }
    }

    pub fn window_args(&self) -> WindowArgs {
        WindowArgs {
            size: self.size,
            extent: self.extent.clone(),
            boundary: self.boundary.clone(),
        }
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let graph = self.graph_args().build()?;
        let (extent, boundary) = self.window_args().resolve(graph.dim())?;
        let mut cfg = SimConfig::new(graph, extent, boundary);
        if let Some(k) = self.k {
            cfg.k = k;
        }
        let couplings = match (&self.couplings, self.alpha) {
            (Some(_), Some(_)) => return Err(CliError::usage("--couplings and --alpha are exclusive")),
            (None, None) if self.graph_args().is_example_m() => Some("figure"),
            (c, _) => c.as_deref(),
        };
        let needs_window = couplings.is_some() || self.spins.is_some();
        let window = if needs_window {
            Some(WindowGraph::new(&cfg.graph, cfg.extent.clone(), cfg.boundary)?)
        } else {
            None
        };
        cfg.interactions = match couplings {
            Some("figure") => InteractionSource::Fixed {
                values: example_m_interactions(window.as_ref().unwrap())?,
            },
            Some(path) => InteractionSource::Fixed {
                values: parse_couplings(window.as_ref().unwrap(), &read(Path::new(path))?)?,
            },
            None => InteractionSource::Bernoulli {
                alpha: self.alpha.unwrap_or(0.5),
            },
        };
        cfg.initial = match (&self.spins, self.gamma) {
            (Some(_), Some(_)) => return Err(CliError::usage("--spins and --gamma are exclusive")),
            (Some(path), None) => InitialSource::Fixed {
                values: parse_spins(window.as_ref().unwrap(), &read(path)?)?,
            },
            (None, g) => InitialSource::Bernoulli {
                gamma: g.unwrap_or(0.5),
            },
        };
        if let Some(t) = &self.temp {
            cfg.temperature = t.parse::<TemperatureProfile>()?;
        }
        if let Some(t) = self.tmax {
            cfg.t_max = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(v) = &self.verbosity {
            cfg.verbosity = v.parse::<Verbosity>()?;
        }
        if let Some(s) = self.energy_stride {
            cfg.energy_stride = s;
        }
        if let Some(c) = self.catalog_cap {
            cfg.catalog_cap = c;
        }
        cfg.stop_when_absorbed = self.stop_when_absorbed.unwrap_or(false);
        cfg.validate()?;
        let replicas = self.replicas.unwrap_or(1);
        if replicas == 0 {
            return Err(CliError::usage("--replicas must be at least 1"));
        }
        Ok(Resolved { config: cfg, replicas })
    }
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: SimConfig,
    pub replicas: usize,
}

/// Parameters of the activity estimate.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ClassifyOptions {
    /// Start of the activity window (default: half the horizon)
    #[arg(long)]
    pub t_cut: Option<f64>,
    /// Ball center as `cell:local` (default: local 0 of the middle cell)
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    /// Ball radius (default: as large as the window allows)
    #[arg(long)]
    pub radius: Option<usize>,
    /// Active fraction at or below which the verdict is F
    #[arg(long)]
    pub low: Option<f64>,
    /// Active fraction at or above which the verdict is I
    #[arg(long)]
    pub high: Option<f64>,
    /// Replica spread at or above which the verdict is inconclusive
    #[arg(long)]
    pub max_std: Option<f64>,
    /// Also report the opposition-flip tail (needs accepted-flip logs)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub tail: Option<bool>,
}

impl ClassifyOptions {
    pub fn merge(&mut self, other: ClassifyOptions) {
        take_or!(self, other; t_cut, center, radius, low, high, max_std, tail);
    }

    pub fn thresholds(&self) -> Thresholds {
        let d = Thresholds::default();
        Thresholds {
            low: self.low.unwrap_or(d.low),
            high: self.high.unwrap_or(d.high),
            max_std: self.max_std.unwrap_or(d.max_std),
        }
    }
}
