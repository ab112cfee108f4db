//! Continuous-time simulation through the graphical representation.
//!
//! Every flip set carries a rate-1 Poisson clock. By superposition the
//! arrivals form one Poisson process of rate `|catalog|`, each arrival
//! picking a set uniformly. An arrival at time `t` on `A` draws a uniform
//! mark `u` and flips `A` iff `u < c(Δ_A H, T(t))`, with `Δ` computed from
//! the current state.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{
    enumerate_flip_sets, format_cell, BoundaryMode, Extent, FlipSetCatalog, PeriodicGraph, WindowGraph,
    DEFAULT_CATALOG_CAP,
};
use crate::model::{
    delta_raw, rate_at_temperature, sample_initial, sample_interactions, window_h, EnergyDelta, Interactions,
    SpinState, TemperatureProfile,
};
use crate::rng::{replica_seed, stream, RNG_ALGORITHM, STREAM_DYNAMICS, STREAM_INITIAL, STREAM_INTERACTIONS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteractionSource {
    Bernoulli { alpha: f64 },
    Fixed { values: Interactions },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSource {
    Bernoulli { gamma: f64 },
    Fixed { values: SpinState },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    #[default]
    None,
    Accepted,
    All,
}

impl std::str::FromStr for Verbosity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Verbosity::None),
            "accepted" => Ok(Verbosity::Accepted),
            "all" => Ok(Verbosity::All),
            _ => Err(Error::InvalidArgument(format!("unknown verbosity `{s}` (none | accepted | all)"))),
        }
    }
}

fn default_cap() -> usize {
    DEFAULT_CATALOG_CAP
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub graph: PeriodicGraph,
    pub extent: Extent,
    pub boundary: BoundaryMode,
    pub k: usize,
    pub interactions: InteractionSource,
    pub initial: InitialSource,
    pub temperature: TemperatureProfile,
    pub t_max: f64,
    pub seed: u64,
    #[serde(default)]
    pub verbosity: Verbosity,
    /// Record `H` after every `energy_stride`-th accepted flip; 0 keeps only
    /// the initial value.
    #[serde(default)]
    pub energy_stride: u64,
    #[serde(default = "default_cap")]
    pub catalog_cap: usize,
    /// Zero temperature only: stop once no set has `Δ <= 0`. Checked every
    /// `|catalog|` arrivals.
    #[serde(default)]
    pub stop_when_absorbed: bool,
}

impl SimConfig {
    /// Defaults: k=1, α=γ=½, zero temperature, horizon 100, seed 0.
    pub fn new(graph: PeriodicGraph, extent: Extent, boundary: BoundaryMode) -> Self {
        SimConfig {
            graph,
            extent,
            boundary,
            k: 1,
            interactions: InteractionSource::Bernoulli { alpha: 0.5 },
            initial: InitialSource::Bernoulli { gamma: 0.5 },
            temperature: TemperatureProfile::Zero,
            t_max: 100.0,
            seed: 0,
            verbosity: Verbosity::None,
            energy_stride: 0,
            catalog_cap: DEFAULT_CATALOG_CAP,
            stop_when_absorbed: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.stop_when_absorbed && !self.temperature.is_zero() {
            return Err(Error::InvalidArgument("stop_when_absorbed requires the zero profile".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// Window and catalog shared by all replicas of a configuration.
#[derive(Debug)]
pub struct Context {
    config: SimConfig,
    window: WindowGraph,
    catalog: FlipSetCatalog,
    hash: String,
}

impl Context {
    pub fn new(config: &SimConfig) -> Result<Arc<Self>> {
        config.validate()?;
        let window = WindowGraph::new(&config.graph, config.extent.clone(), config.boundary)?;
        let catalog = enumerate_flip_sets(&window, config.k, config.catalog_cap)?;
        if let InteractionSource::Fixed { values } = &config.interactions {
            if values.len() != window.num_edges() {
                return Err(Error::IncompleteAssignment(format!(
                    "{} couplings for {} edges",
                    values.len(),
                    window.num_edges()
                )));
            }
        }
        if let InitialSource::Fixed { values } = &config.initial {
            if values.len() != window.num_vertices() {
                return Err(Error::IncompleteAssignment(format!(
                    "{} spins for {} vertices",
                    values.len(),
                    window.num_vertices()
                )));
            }
        }
        Ok(Arc::new(Context {
            hash: config.hash(),
            config: config.clone(),
            window,
            catalog,
        }))
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn window(&self) -> &WindowGraph {
        &self.window
    }

    pub fn catalog(&self) -> &FlipSetCatalog {
        &self.catalog
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }
}

/// One arrival of the global clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub t: f64,
    /// Catalog index of the flip set.
    pub set: u32,
    pub delta: i32,
    pub u: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub replica: u64,
    pub config_hash: String,
    pub rng: String,
}

/// Generator state needed to extend a run.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    rng: ChaCha8Rng,
    next_arrival: f64,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    context: Arc<Context>,
    pub meta: RunMeta,
    pub interactions: Interactions,
    pub initial: SpinState,
    pub state: SpinState,
    /// Accepted flips through each vertex with `Δ > 0`, `Δ = 0`, `Δ < 0`.
    pub n_minus: Vec<u64>,
    pub n_zero: Vec<u64>,
    pub n_plus: Vec<u64>,
    /// Arrivals on sets containing each vertex.
    pub arrivals: Vec<u64>,
    pub last_flip: Vec<Option<f64>>,
    pub total_arrivals: u64,
    pub total_accepted: u64,
    pub initial_h: i64,
    pub h: i64,
    pub h_min: i64,
    pub h_max: i64,
    /// Largest `Δ` among accepted flips.
    pub max_accepted_delta: Option<i32>,
    pub energy_trace: Vec<(f64, i64)>,
    pub events: Vec<Event>,
    pub t_end: f64,
    pub absorbed_at: Option<f64>,
    checkpoint: Option<Checkpoint>,
}

impl SimResult {
    pub fn context(&self) -> &Arc<Context> {
        &self.context
    }

    pub fn window(&self) -> &WindowGraph {
        &self.context.window
    }

    pub fn catalog(&self) -> &FlipSetCatalog {
        &self.context.catalog
    }

    pub fn config(&self) -> &SimConfig {
        &self.context.config
    }

    pub fn verbosity(&self) -> Verbosity {
        self.context.config.verbosity
    }

    pub fn has_checkpoint(&self) -> bool {
        self.checkpoint.is_some()
    }

    pub fn drop_checkpoint(&mut self) {
        self.checkpoint = None;
    }

    /// Total accepted flips per vertex.
    pub fn flips(&self, v: u32) -> u64 {
        let v = v as usize;
        self.n_minus[v] + self.n_zero[v] + self.n_plus[v]
    }

    /// True if no flip set has `Δ <= 0` in the current state.
    pub fn no_downhill_move(&self) -> bool {
        no_downhill(self.window(), self.catalog(), &self.interactions, &self.state)
    }

    fn advance(&mut self, horizon: f64) {
        let ctx = Arc::clone(&self.context);
        let (w, cat, cfg) = (&ctx.window, &ctx.catalog, &ctx.config);
        let m = cat.len() as u64;
        let rate_total = m as f64;
        let verbosity = cfg.verbosity;
        let zero = cfg.temperature.is_zero();
        let Some(cp) = self.checkpoint.as_mut() else {
            return;
        };
        while cp.next_arrival <= horizon {
            let t = cp.next_arrival;
            let id = cp.rng.random_range(0..m) as usize;
            let u: f64 = cp.rng.random();
            let set = cat.set(id);
            let delta = delta_raw(w, &self.interactions, &self.state, set);
            let temp = if zero { 0.0 } else { cfg.temperature.at(t) };
            let accepted = u < rate_at_temperature(EnergyDelta(delta), temp);
            for &v in set {
                self.arrivals[v as usize] += 1;
            }
            if accepted {
                self.state.flip(set);
                self.h += delta as i64;
                self.h_min = self.h_min.min(self.h);
                self.h_max = self.h_max.max(self.h);
                self.max_accepted_delta = Some(self.max_accepted_delta.map_or(delta, |d| d.max(delta)));
                let counter = match delta.signum() {
                    1 => &mut self.n_minus,
                    0 => &mut self.n_zero,
                    _ => &mut self.n_plus,
                };
                for &v in set {
                    counter[v as usize] += 1;
                    self.last_flip[v as usize] = Some(t);
                }
                self.total_accepted += 1;
                if cfg.energy_stride > 0 && self.total_accepted.is_multiple_of(cfg.energy_stride) {
                    self.energy_trace.push((t, self.h));
                }
            }
            if verbosity == Verbosity::All || (accepted && verbosity == Verbosity::Accepted) {
                self.events.push(Event {
                    seq: self.total_arrivals,
                    t,
                    set: id as u32,
                    delta,
                    u,
                    accepted,
                });
            }
            self.total_arrivals += 1;
            let e: f64 = cp.rng.random();
            cp.next_arrival = t - (1.0 - e).ln() / rate_total;

            if cfg.stop_when_absorbed
                && self.total_arrivals.is_multiple_of(m)
                && no_downhill(w, cat, &self.interactions, &self.state)
            {
                self.absorbed_at = Some(t);
                cp.next_arrival = f64::INFINITY;
            }
        }
        self.t_end = horizon;
    }
}

fn no_downhill(w: &WindowGraph, cat: &FlipSetCatalog, j: &Interactions, s: &SpinState) -> bool {
    (0..cat.len()).all(|i| delta_raw(w, j, s, cat.set(i)) > 0)
}

/// Runs the configuration once with its own seed.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    let ctx = Context::new(config)?;
    run_in(&ctx, 0)
}

/// Runs replica `replica` of a prepared context.
pub fn run_in(ctx: &Arc<Context>, replica: u64) -> Result<SimResult> {
    let cfg = &ctx.config;
    let w = &ctx.window;
    let seed = replica_seed(cfg.seed, replica);
    let interactions = match &cfg.interactions {
        InteractionSource::Bernoulli { alpha } => {
            sample_interactions(w, *alpha, &mut stream(seed, STREAM_INTERACTIONS))?
        }
        InteractionSource::Fixed { values } => values.clone(),
    };
    let initial = match &cfg.initial {
        InitialSource::Bernoulli { gamma } => sample_initial(w, *gamma, &mut stream(seed, STREAM_INITIAL))?,
        InitialSource::Fixed { values } => values.clone(),
    };
    let mut rng = stream(seed, STREAM_DYNAMICS);
    let first: f64 = rng.random();
    let next_arrival = if ctx.catalog.is_empty() {
        f64::INFINITY
    } else {
        -(1.0 - first).ln() / ctx.catalog.len() as f64
    };
    let n = w.num_vertices();
    let h = window_h(w, &interactions, &initial);
    let mut result = SimResult {
        context: Arc::clone(ctx),
        meta: RunMeta {
            seed,
            replica,
            config_hash: ctx.hash.clone(),
            rng: RNG_ALGORITHM.to_string(),
        },
        interactions,
        state: initial.clone(),
        initial,
        n_minus: vec![0; n],
        n_zero: vec![0; n],
        n_plus: vec![0; n],
        arrivals: vec![0; n],
        last_flip: vec![None; n],
        total_arrivals: 0,
        total_accepted: 0,
        initial_h: h,
        h,
        h_min: h,
        h_max: h,
        max_accepted_delta: None,
        energy_trace: vec![(0.0, h)],
        events: Vec::new(),
        t_end: 0.0,
        absorbed_at: None,
        checkpoint: Some(Checkpoint { rng, next_arrival }),
    };
    result.advance(cfg.t_max);
    Ok(result)
}

/// Independent replicas in parallel; replica `i` uses the derived seed
/// [`replica_seed`]`(seed, i)`. Results come back in replica order.
pub fn run_replicas(config: &SimConfig, n_replicas: usize) -> Result<Vec<SimResult>> {
    if n_replicas == 0 {
        return Err(Error::InvalidArgument("need at least one replica".into()));
    }
    let ctx = Context::new(config)?;
    (0..n_replicas as u64)
        .into_par_iter()
        .map(|i| run_in(&ctx, i))
        .collect()
}

/// Extends a run by `additional` time units. The result is identical to a
/// single run over the combined horizon.
pub fn resume(result: &SimResult, additional: f64) -> Result<SimResult> {
    if result.checkpoint.is_none() {
        return Err(Error::MissingCheckpoint);
    }
    if !(additional >= 0.0 && additional.is_finite()) {
        return Err(Error::InvalidArgument(format!("additional horizon must be >= 0, got {additional}")));
    }
    let mut next = result.clone();
    next.advance(result.t_end + additional);
    Ok(next)
}

/// Per-vertex counter sums over replicas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterTotals {
    pub n_minus: Vec<u64>,
    pub n_zero: Vec<u64>,
    pub n_plus: Vec<u64>,
    pub arrivals: Vec<u64>,
}

pub fn aggregate_counters(results: &[SimResult]) -> Option<CounterTotals> {
    let n = results.first()?.state.len();
    let mut out = CounterTotals {
        n_minus: vec![0; n],
        n_zero: vec![0; n],
        n_plus: vec![0; n],
        arrivals: vec![0; n],
    };
    for r in results {
        for v in 0..n {
            out.n_minus[v] += r.n_minus[v];
            out.n_zero[v] += r.n_zero[v];
            out.n_plus[v] += r.n_plus[v];
            out.arrivals[v] += r.arrivals[v];
        }
    }
    Some(out)
}

#[derive(Serialize)]
struct EventLine {
    seq: u64,
    t: f64,
    set: Vec<String>,
    delta: i32,
    u: f64,
    accepted: bool,
}

/// JSON-lines event log with flip sets spelled as vertex ids.
pub fn events_jsonl(result: &SimResult) -> String {
    let mut out = String::new();
    for e in &result.events {
        let line = EventLine {
            seq: e.seq,
            t: e.t,
            set: result
                .catalog()
                .set(e.set as usize)
                .iter()
                .map(|&v| result.window().vertex_id(v).to_string())
                .collect(),
            delta: e.delta,
            u: e.u,
            accepted: e.accepted,
        };
        out.push_str(&serde_json::to_string(&line).expect("event serializes"));
        out.push('\n');
    }
    out
}

/// `t,H,D` rows of the recorded energy trace.
pub fn energy_csv(result: &SimResult) -> String {
    let n = result.window().num_vertices() as f64;
    let mut out = String::from("t,H,D\n");
    for &(t, h) in &result.energy_trace {
        writeln!(out, "{t},{h},{}", h as f64 / n).unwrap();
    }
    out
}

/// Per-vertex summary: `cell,local,n_minus,n_zero,n_plus,arrivals,last_flip_t,final_spin`.
pub fn summary_csv(result: &SimResult) -> String {
    let w = result.window();
    let mut out = String::from("cell,local,n_minus,n_zero,n_plus,arrivals,last_flip_t,final_spin\n");
    for v in 0..w.num_vertices() {
        let id = w.vertex_id(v as u32);
        let last = result.last_flip[v].map(|t| t.to_string()).unwrap_or_default();
        writeln!(
            out,
            "\"{}\",{},{},{},{},{},{},{}",
            format_cell(&id.cell),
            id.local,
            result.n_minus[v],
            result.n_zero[v],
            result.n_plus[v],
            result.arrivals[v],
            last,
            result.state.get(v as u32)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cubic, build_hexagonal, centered_extent};

    fn square(half: i64) -> SimConfig {
        SimConfig::new(build_cubic(2).unwrap(), centered_extent(2, half), BoundaryMode::Toroidal)
    }

    #[test]
    fn ferromagnet_ground_state_is_absorbing() {
        let mut c = square(4);
        c.interactions = InteractionSource::Bernoulli { alpha: 1.0 };
        c.initial = InitialSource::Bernoulli { gamma: 1.0 };
        c.t_max = 20.0;
        c.verbosity = Verbosity::All;
        let r = run(&c).unwrap();
        assert_eq!(r.total_accepted, 0);
        assert!(r.total_arrivals > 1000);
        assert!(r.events.iter().all(|e| e.delta == 8 && !e.accepted));
    }

    #[test]
    fn odd_degree_never_sees_zero_delta() {
        let mut c = SimConfig::new(build_hexagonal(), centered_extent(2, 4), BoundaryMode::Toroidal);
        c.verbosity = Verbosity::Accepted;
        c.t_max = 30.0;
        for seed in 0..4 {
            c.seed = seed;
            let r = run(&c).unwrap();
            assert!(r.total_accepted > 0);
            assert!(r.events.iter().all(|e| e.delta < 0));
            assert!(r.n_minus.iter().chain(&r.n_zero).all(|&x| x == 0));
        }
    }

    #[test]
    fn acceptance_matches_marks() {
        let mut c = square(3);
        c.temperature = TemperatureProfile::constant(1.5).unwrap();
        c.k = 2;
        c.verbosity = Verbosity::All;
        c.t_max = 5.0;
        let r = run(&c).unwrap();
        let mut prev = -1.0;
        for e in &r.events {
            let p = rate_at_temperature(EnergyDelta(e.delta), 1.5);
            assert_eq!(e.accepted, e.u < p);
            assert!(e.t >= prev);
            prev = e.t;
        }
        assert_eq!(r.events.len() as u64, r.total_arrivals);
    }

    #[test]
    fn running_energy_matches_recomputation() {
        let mut c = square(3);
        c.temperature = TemperatureProfile::constant(2.0).unwrap();
        c.k = 3;
        c.t_max = 10.0;
        let r = run(&c).unwrap();
        assert_eq!(r.h, window_h(r.window(), &r.interactions, &r.state));
    }

    #[test]
    fn deterministic_logs() {
        let mut c = square(3);
        c.temperature = TemperatureProfile::log_decay(2.0, 3.0).unwrap();
        c.verbosity = Verbosity::All;
        c.t_max = 10.0;
        c.seed = 11;
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(events_jsonl(&a), events_jsonl(&b));
        assert_eq!(summary_csv(&a), summary_csv(&b));
    }

    #[test]
    fn resume_continues_the_same_trajectory() {
        let mut c = square(3);
        c.temperature = TemperatureProfile::constant(1.0).unwrap();
        c.verbosity = Verbosity::All;
        c.energy_stride = 1;
        c.t_max = 10.0;
        let short = run(&c).unwrap();
        let same = resume(&short, 0.0).unwrap();
        assert_eq!(events_jsonl(&same), events_jsonl(&short));
        let extended = resume(&short, 5.0).unwrap();
        c.t_max = 15.0;
        let long = run(&c).unwrap();
        assert_eq!(events_jsonl(&extended), events_jsonl(&long));
        assert_eq!(energy_csv(&extended), energy_csv(&long));
        assert_eq!(summary_csv(&extended), summary_csv(&long));
        for v in 0..short.arrivals.len() {
            assert!(extended.arrivals[v] >= short.arrivals[v]);
            assert!(extended.flips(v as u32) >= short.flips(v as u32));
        }
        let mut bare = short.clone();
        bare.drop_checkpoint();
        assert!(matches!(resume(&bare, 1.0), Err(Error::MissingCheckpoint)));
    }

    #[test]
    fn replicas() {
        let mut c = square(3);
        c.verbosity = Verbosity::Accepted;
        c.t_max = 5.0;
        c.seed = 5;
        let one = run_replicas(&c, 1).unwrap();
        assert_eq!(events_jsonl(&one[0]), events_jsonl(&run(&c).unwrap()));
        let two = run_replicas(&c, 2).unwrap();
        assert_ne!(events_jsonl(&two[0]), events_jsonl(&two[1]));
        let mut rev = two.clone();
        rev.reverse();
        assert_eq!(aggregate_counters(&two), aggregate_counters(&rev));
        assert!(run_replicas(&c, 0).is_err());
    }

    #[test]
    fn absorption_stop() {
        let mut c = SimConfig::new(build_hexagonal(), centered_extent(2, 4), BoundaryMode::Toroidal);
        c.stop_when_absorbed = true;
        c.t_max = 1e6;
        let r = run(&c).unwrap();
        assert!(r.absorbed_at.is_some());
        assert!(r.no_downhill_move());
        c.temperature = TemperatureProfile::constant(1.0).unwrap();
        assert!(run(&c).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = square(2);
        c.temperature = TemperatureProfile::table(vec![(0.0, 1.0), (3.0, 0.0)]).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: SimConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn fixed_sources_are_checked() {
        let mut c = square(2);
        c.interactions = InteractionSource::Fixed {
            values: Interactions::uniform(3, 1),
        };
        assert!(matches!(run(&c), Err(Error::IncompleteAssignment(_))));
    }
}
