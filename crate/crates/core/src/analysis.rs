//! Finite-time observables: activity fractions, opposition-flip tails,
//! type classification and scaling tables.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{run_replicas, SimConfig, SimResult, Verbosity};
use crate::error::{Error, Result};
use crate::graph::{Extent, VertexId};

/// Activity over a ball. A vertex counts as active in a replica iff it has
/// an accepted flip in `[t_cut, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationReport {
    pub t_cut: f64,
    pub center: VertexId,
    pub radius: usize,
    pub ball: Vec<VertexId>,
    pub rho_i: f64,
    pub rho_f: f64,
    pub per_replica_rho_i: Vec<f64>,
    pub rho_i_std: f64,
    /// `verdicts[r][i]`: ball vertex `i` active in replica `r`.
    pub verdicts: Vec<Vec<bool>>,
    /// `(t, mean accepted Δ>0 flips per vertex in [t, t_end])`, when logged.
    pub tail: Option<Vec<(f64, f64)>>,
}

/// Activity fractions over the ball `B_radius(center)`, averaged over
/// replicas. `t_cut` must lie below every run's end time.
pub fn estimate_rho(results: &[SimResult], t_cut: f64, center: u32, radius: usize) -> Result<FixationReport> {
    let first = results
        .first()
        .ok_or_else(|| Error::InvalidArgument("no results to analyse".into()))?;
    let w = first.window();
    let ball = w.ball(center, radius)?;
    if ball.is_empty() {
        return Err(Error::InvalidArgument("empty ball".into()));
    }
    if let Some(r) = results.iter().find(|r| t_cut >= r.t_end) {
        return Err(Error::InvalidArgument(format!("t_cut {t_cut} is not below t_max {}", r.t_end)));
    }
    let verdicts: Vec<Vec<bool>> = results
        .iter()
        .map(|r| ball.iter().map(|&v| r.last_flip[v as usize].is_some_and(|t| t >= t_cut)).collect())
        .collect();
    let per_replica: Vec<f64> = verdicts
        .iter()
        .map(|row| row.iter().filter(|&&a| a).count() as f64 / ball.len() as f64)
        .collect();
    let (mean, std) = mean_std(&per_replica);
    let tail = if results.iter().all(|r| r.verbosity() >= Verbosity::Accepted) {
        let grid: Vec<f64> = (0..=10).map(|i| first.t_end * i as f64 / 10.0).collect();
        Some(opposition_tail(results, &grid)?)
    } else {
        None
    };
    Ok(FixationReport {
        t_cut,
        center: w.vertex_id(center),
        radius,
        ball: ball.iter().map(|&v| w.vertex_id(v)).collect(),
        rho_i: mean,
        rho_f: 1.0 - mean,
        per_replica_rho_i: per_replica,
        rho_i_std: std,
        verdicts,
        tail,
    })
}

/// Ball radius leaving out a boundary shell of width `k + 1` on free windows;
/// the whole window (up to its diameter) on tori.
pub fn default_radius(result: &SimResult, center: u32) -> Result<usize> {
    let w = result.window();
    let dist = w.distances_from(center)?;
    let ecc = dist.iter().flatten().copied().max().unwrap_or(0);
    match w.boundary() {
        crate::graph::BoundaryMode::Toroidal => Ok(ecc),
        crate::graph::BoundaryMode::Free => {
            // distance from the centre to the nearest vertex of reduced degree
            let parent = w.parent();
            let rim = (0..w.num_vertices() as u32)
                .filter(|&v| w.degree(v) < parent.degree(w.local_of(v)))
                .filter_map(|v| dist[v as usize])
                .min()
                .unwrap_or(ecc + 1);
            let shell = result.config().k + 1;
            Ok(rim.saturating_sub(shell))
        }
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// For each grid time `t`, the number of accepted `Δ > 0` flips through a
/// vertex in `[t, t_end]`, averaged over window vertices and replicas.
pub fn opposition_tail(results: &[SimResult], grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if results.is_empty() {
        return Err(Error::InvalidArgument("no results to analyse".into()));
    }
    if let Some(r) = results.iter().find(|r| r.verbosity() < Verbosity::Accepted) {
        return Err(Error::InsufficientVerbosity(format!(
            "replica {} was logged at {:?}; the tail needs accepted flips",
            r.meta.replica,
            r.verbosity()
        )));
    }
    // (time, vertex-flips) of every opposition flip, over all replicas
    let mut hits: Vec<(f64, u64)> = results
        .par_iter()
        .flat_map_iter(|r| {
            r.events
                .iter()
                .filter(|e| e.accepted && e.delta > 0)
                .map(|e| (e.t, r.catalog().set(e.set as usize).len() as u64))
        })
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut suffix = vec![0u64; hits.len() + 1];
    for i in (0..hits.len()).rev() {
        suffix[i] = suffix[i + 1] + hits[i].1;
    }
    let denom: f64 = results.iter().map(|r| r.window().num_vertices() as f64).sum();
    Ok(grid
        .iter()
        .map(|&t| {
            let i = hits.partition_point(|h| h.0 < t);
            (t, suffix[i] as f64 / denom)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Fractions at or below `low` read as zero, at or above `high` as one.
    pub low: f64,
    pub high: f64,
    /// Largest replica standard deviation accepted for a verdict.
    pub max_std: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            low: 0.02,
            high: 0.98,
            max_std: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixationType {
    F,
    I,
    M,
    Inconclusive,
}

impl std::fmt::Display for FixationType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FixationType::F => "F",
            FixationType::I => "I",
            FixationType::M => "M",
            FixationType::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub verdict: FixationType,
    pub thresholds: Thresholds,
    pub replicas: usize,
    pub rho_i: f64,
    pub rho_f: f64,
    pub rho_i_std: f64,
    pub t_cut: f64,
    pub notes: Vec<String>,
}

pub fn classify(report: &FixationReport, thresholds: &Thresholds) -> ClassificationVerdict {
    let mut notes = Vec::new();
    let replicas = report.per_replica_rho_i.len();
    if replicas < 3 {
        notes.push(format!("only {replicas} replica(s); at least 3 recommended"));
    }
    // recompute from the per-replica values so that order cannot matter
    let mut sorted = report.per_replica_rho_i.clone();
    sorted.sort_by(f64::total_cmp);
    let (rho_i, std) = mean_std(&sorted);
    let verdict = if std >= thresholds.max_std {
        notes.push(format!("replica spread {std:.3} exceeds {}", thresholds.max_std));
        FixationType::Inconclusive
    } else if rho_i <= thresholds.low {
        FixationType::F
    } else if rho_i >= thresholds.high {
        FixationType::I
    } else {
        FixationType::M
    };
    ClassificationVerdict {
        verdict,
        thresholds: *thresholds,
        replicas,
        rho_i,
        rho_f: 1.0 - rho_i,
        rho_i_std: std,
        t_cut: report.t_cut,
        notes,
    }
}

/// One window size of a scaling study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSize {
    pub extent: Extent,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub size: String,
    pub sites: usize,
    /// Median over replicas of the mean accepted flips per site.
    pub median_flips_per_site: f64,
    /// Median over replicas of the latest flip time (0 without flips).
    pub median_last_flip: f64,
    /// Whole-window activity fraction with `t_cut = t_max / 2`.
    pub rho_i: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
    SingleSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub flips_trend: Trend,
    pub last_flip_trend: Trend,
}

impl ScalingTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,sites,median_flips_per_site,median_last_flip,rho_i\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.size, r.sites, r.median_flips_per_site, r.median_last_flip, r.rho_i
            )
            .unwrap();
        }
        out
    }
}

pub fn trend(values: &[f64]) -> Trend {
    if values.len() < 2 {
        return Trend::SingleSize;
    }
    let pairs = || values.windows(2);
    if pairs().all(|p| p[1] > p[0]) {
        Trend::Increasing
    } else if pairs().all(|p| p[1] < p[0]) {
        Trend::Decreasing
    } else if pairs().all(|p| p[1] == p[0]) {
        Trend::Constant
    } else {
        Trend::Mixed
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Summary row of one size from finished replicas.
pub fn scaling_row(results: &[SimResult]) -> ScalingRow {
    let w = results[0].window();
    let n = w.num_vertices();
    let mut flips: Vec<f64> = results
        .iter()
        .map(|r| (0..n as u32).map(|v| r.flips(v)).sum::<u64>() as f64 / n as f64)
        .collect();
    let mut last: Vec<f64> = results
        .iter()
        .map(|r| r.last_flip.iter().flatten().copied().fold(0.0, f64::max))
        .collect();
    let t_cut = results[0].config().t_max / 2.0;
    let active: f64 = results
        .iter()
        .map(|r| r.last_flip.iter().filter(|t| t.is_some_and(|t| t >= t_cut)).count() as f64 / n as f64)
        .sum::<f64>()
        / results.len() as f64;
    ScalingRow {
        size: w.shape().iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x"),
        sites: n,
        median_flips_per_site: median(&mut flips),
        median_last_flip: median(&mut last),
        rho_i: active,
    }
}

/// Runs `n_replicas` of `base` for every size and tabulates the results.
pub fn scaling_study(base: &SimConfig, sizes: &[ScalingSize], n_replicas: usize) -> Result<ScalingTable> {
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("scaling study needs at least one size".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for size in sizes {
        let mut cfg = base.clone();
        cfg.extent = size.extent.clone();
        cfg.t_max = size.t_max;
        let results = run_replicas(&cfg, n_replicas)?;
        rows.push(scaling_row(&results));
    }
    let flips: Vec<f64> = rows.iter().map(|r| r.median_flips_per_site).collect();
    let last: Vec<f64> = rows.iter().map(|r| r.median_last_flip).collect();
    Ok(ScalingTable {
        flips_trend: trend(&flips),
        last_flip_trend: trend(&last),
        rows,
    })
}

/// FixationReport as CSV: one row per ball vertex with its active fraction
/// over replicas.
pub fn report_csv(report: &FixationReport) -> String {
    let mut out = String::from("vertex,active_fraction\n");
    let r = report.verdicts.len() as f64;
    for (i, v) in report.ball.iter().enumerate() {
        let active = report.verdicts.iter().filter(|row| row[i]).count() as f64;
        writeln!(out, "{v},{}", active / r).unwrap();
    }
    out
}
