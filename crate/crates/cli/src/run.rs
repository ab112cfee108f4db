//! Simulation and classification runs, their `--out` layout and manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use glauberk_core::analysis::{
    classify, default_radius, estimate_rho, opposition_tail, ClassificationVerdict, FixationReport,
};
use glauberk_core::dynamics::{
    energy_csv, events_jsonl, run_replicas, sha256_hex, summary_csv, SimConfig, SimResult, Verbosity,
};
use glauberk_core::graph::{VertexId, WindowGraph};
use serde::{Deserialize, Serialize};

use crate::error::{read, write, CliError, CliResult};
use crate::options::{ClassifyOptions, Resolved};

pub const MANIFEST: &str = "manifest.json";

/// Everything needed to re-execute a run, plus what it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: SimConfig,
    pub replicas: usize,
    pub seeds: Vec<u64>,
    pub config_hash: String,
    pub catalog_size: usize,
    pub window_vertices: usize,
    pub window_edges: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyOptions>,
    pub artifacts: Vec<String>,
    /// SHA-256 of every artifact except the manifest itself.
    pub digests: BTreeMap<String, String>,
    pub wall_clock_secs: f64,
}

impl RunManifest {
    /// Loads `path`, or `path/manifest.json` when `path` is a directory.
    pub fn load(path: &Path) -> CliResult<RunManifest> {
        let file = if path.is_dir() { path.join(MANIFEST) } else { path.to_path_buf() };
        serde_json::from_str(&read(&file)?)
            .map_err(|e| CliError::usage(format!("{}: not a run manifest: {e}", file.display())))
    }

    pub fn resolved(&self) -> Resolved {
        Resolved {
            config: self.config.clone(),
            replicas: self.replicas,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub fixation: FixationReport,
    pub verdict: ClassificationVerdict,
}

#[derive(Debug, Clone, Serialize)]
struct ReplicaStats {
    replica: u64,
    seed: u64,
    total_arrivals: u64,
    total_accepted: u64,
    initial_h: i64,
    h: i64,
    h_min: i64,
    h_max: i64,
    opposition_flips: u64,
    t_end: f64,
    absorbed_at: Option<f64>,
    /// Zero temperature only: no flip set can lower or keep the energy.
    absorbing: Option<bool>,
}

fn stats(r: &SimResult) -> ReplicaStats {
    ReplicaStats {
        replica: r.meta.replica,
        seed: r.meta.seed,
        total_arrivals: r.total_arrivals,
        total_accepted: r.total_accepted,
        initial_h: r.initial_h,
        h: r.h,
        h_min: r.h_min,
        h_max: r.h_max,
        opposition_flips: r.n_minus.iter().sum(),
        t_end: r.t_end,
        absorbed_at: r.absorbed_at,
        absorbing: r.config().temperature.is_zero().then(|| r.no_downhill_move()),
    }
}

pub struct Execution {
    pub resolved: Resolved,
    pub results: Vec<SimResult>,
    pub classified: Option<ClassifyReport>,
    pub classify_options: Option<ClassifyOptions>,
    pub wall_clock_secs: f64,
}

pub fn execute(resolved: Resolved, classify_opts: Option<ClassifyOptions>) -> CliResult<Execution> {
    let start = Instant::now();
    let results = run_replicas(&resolved.config, resolved.replicas)?;
    let classified = match &classify_opts {
        Some(o) => Some(classify_results(&results, o)?),
        None => None,
    };
    Ok(Execution {
        resolved,
        results,
        classified,
        classify_options: classify_opts,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Local 0 of the middle cell of the window.
fn default_center(w: &WindowGraph) -> VertexId {
    VertexId::new(w.extent().iter().map(|&(lo, hi)| lo + (hi - lo) / 2).collect(), 0)
}

pub fn classify_results(results: &[SimResult], o: &ClassifyOptions) -> CliResult<ClassifyReport> {
    let first = &results[0];
    let w = first.window();
    if o.tail == Some(true) {
        // fails with the verbosity error before any other work
        opposition_tail(results, &[0.0])?;
    }
    let center = match &o.center {
        Some(s) => s.parse::<VertexId>()?,
        None => default_center(w),
    };
    let center = w.index_of(&center)?;
    let radius = match o.radius {
        Some(r) => r,
        None => default_radius(first, center)?,
    };
    let t_cut = o.t_cut.unwrap_or(first.config().t_max / 2.0);
    let fixation = estimate_rho(results, t_cut, center, radius)?;
    let verdict = classify(&fixation, &o.thresholds());
    Ok(ClassifyReport { fixation, verdict })
}

/// Concatenates per-replica CSV tables under one header with a leading
/// `replica` column.
fn stack_csv(results: &[SimResult], f: fn(&SimResult) -> String) -> String {
    let mut out = String::new();
    for (i, r) in results.iter().enumerate() {
        let table = f(r);
        let mut lines = table.lines();
        let header = lines.next().unwrap_or("");
        if i == 0 {
            writeln!(out, "replica,{header}").unwrap();
        }
        for line in lines {
            writeln!(out, "{},{line}", r.meta.replica).unwrap();
        }
    }
    out
}

fn stack_events(results: &[SimResult]) -> String {
    let mut out = String::new();
    for r in results {
        for line in events_jsonl(r).lines() {
            // every line is a JSON object; prefix the replica field
            writeln!(out, "{{\"replica\":{},{}", r.meta.replica, &line[1..]).unwrap();
        }
    }
    out
}

/// File name and contents of every artifact except the manifest.
pub fn artifacts(exec: &Execution) -> Vec<(&'static str, String)> {
    let results = &exec.results;
    let mut files = vec![
        ("summary.csv", stack_csv(results, summary_csv)),
        ("energy.csv", stack_csv(results, energy_csv)),
    ];
    if exec.resolved.config.verbosity >= Verbosity::Accepted {
        files.push(("events.jsonl", stack_events(results)));
    }
    let runs: Vec<ReplicaStats> = results.iter().map(stats).collect();
    let report = match &exec.classified {
        Some(c) => serde_json::json!({ "runs": runs, "fixation": c.fixation, "verdict": c.verdict }),
        None => serde_json::json!({ "runs": runs }),
    };
    files.push(("report.json", serde_json::to_string_pretty(&report).unwrap() + "\n"));
    files
}

pub fn manifest(exec: &Execution, command: &str, files: &[(&str, String)]) -> RunManifest {
    let first = &exec.results[0];
    let mut artifacts: Vec<String> = files.iter().map(|f| f.0.to_string()).collect();
    artifacts.push(MANIFEST.into());
    RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config: exec.resolved.config.clone(),
        replicas: exec.resolved.replicas,
        seeds: exec.results.iter().map(|r| r.meta.seed).collect(),
        config_hash: first.meta.config_hash.clone(),
        catalog_size: first.catalog().len(),
        window_vertices: first.window().num_vertices(),
        window_edges: first.window().num_edges(),
        classify: exec.classify_options.clone(),
        artifacts,
        digests: files
            .iter()
            .map(|(name, body)| (name.to_string(), sha256_hex(body.as_bytes())))
            .collect(),
        wall_clock_secs: exec.wall_clock_secs,
    }
}

/// Writes all artifacts and the manifest into `dir`.
pub fn write_out(dir: &Path, exec: &Execution, command: &str) -> CliResult<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let files = artifacts(exec);
    for (name, body) in &files {
        write(&dir.join(name), body)?;
    }
    let m = manifest(exec, command, &files);
    write(&dir.join(MANIFEST), &(serde_json::to_string_pretty(&m).unwrap() + "\n"))?;
    Ok(m)
}

/// Human-readable run summary for stdout.
pub fn describe(exec: &Execution) -> String {
    let mut s = String::new();
    let first = &exec.results[0];
    let w = first.window();
    writeln!(
        s,
        "window: {} vertices, {} edges, {} flip sets (k={})",
        w.num_vertices(),
        w.num_edges(),
        first.catalog().len(),
        first.config().k
    )
    .unwrap();
    for r in &exec.results {
        let st = stats(r);
        write!(
            s,
            "replica {}: seed {}, {} arrivals, {} accepted flips, H {} -> {}, {} opposition flips",
            st.replica, st.seed, st.total_arrivals, st.total_accepted, st.initial_h, st.h, st.opposition_flips
        )
        .unwrap();
        if let Some(t) = st.absorbed_at {
            write!(s, ", absorbed at t={t:.3}").unwrap();
        }
        if let Some(a) = st.absorbing {
            write!(s, ", {}", if a { "absorbing" } else { "not absorbing" }).unwrap();
        }
        s.push('\n');
    }
    let summary = stack_csv(&exec.results, summary_csv);
    writeln!(s, "summary sha256 {}", sha256_hex(summary.as_bytes())).unwrap();
    if let Some(c) = &exec.classified {
        s.push_str(&describe_verdict(c));
    }
    s
}

pub fn describe_verdict(c: &ClassifyReport) -> String {
    let v = &c.verdict;
    let mut s = format!(
        "verdict {}: rho_I = {:.4} ± {:.4}, rho_F = {:.4} over {} replica(s), {} sites, t_cut = {}\n",
        v.verdict,
        v.rho_i,
        v.rho_i_std,
        v.rho_f,
        v.replicas,
        c.fixation.ball.len(),
        v.t_cut
    );
    for n in &v.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}
