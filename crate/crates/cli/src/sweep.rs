//! Parameter grids: every cell is a simulate + classify run with its own
//! output directory, aggregated into one CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{code, read, write, CliError, CliResult};
use crate::options::{ClassifyOptions, RunOptions};
use crate::run::{execute, write_out};

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML grid file with `[base]`, `[classify]` and `[grid]` tables
    #[arg(long)]
    grid: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    #[serde(default)]
    base: RunOptions,
    #[serde(default)]
    classify: ClassifyOptions,
    #[serde(default)]
    grid: Grid,
}

/// Axes of the grid; an absent axis keeps the base value.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid {
    k: Option<Vec<usize>>,
    alpha: Option<Vec<f64>>,
    gamma: Option<Vec<f64>>,
    temp: Option<Vec<String>>,
    size: Option<Vec<i64>>,
    seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Default)]
struct Cell {
    k: Option<usize>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    temp: Option<String>,
    size: Option<i64>,
    seed: Option<u64>,
}

fn axis<T: Clone>(values: &Option<Vec<T>>) -> Vec<Option<T>> {
    match values {
        Some(v) => v.iter().cloned().map(Some).collect(),
        None => vec![None],
    }
}

impl Grid {
    fn is_unset(&self) -> bool {
        self.k.is_none()
            && self.alpha.is_none()
            && self.gamma.is_none()
            && self.temp.is_none()
            && self.size.is_none()
            && self.seeds.is_none()
    }

    fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for k in axis(&self.k) {
            for alpha in axis(&self.alpha) {
                for gamma in axis(&self.gamma) {
                    for temp in axis(&self.temp) {
                        for size in axis(&self.size) {
                            for seed in axis(&self.seeds) {
                                out.push(Cell {
                                    k,
                                    alpha,
                                    gamma,
                                    temp: temp.clone(),
                                    size,
                                    seed,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl Cell {
    fn apply(&self, base: &RunOptions) -> RunOptions {
        let mut o = base.clone();
        o.k = self.k.or(o.k);
        if self.alpha.is_some() {
            o.alpha = self.alpha;
            o.couplings = None;
        }
        if self.gamma.is_some() {
            o.gamma = self.gamma;
            o.spins = None;
        }
        o.temp = self.temp.clone().or(o.temp);
        if self.size.is_some() {
            o.size = self.size;
            o.extent = None;
        }
        o.seed = self.seed.or(o.seed);
        o
    }
}

struct Row {
    opts: RunOptions,
    outcome: CliResult<Measured>,
}

struct Measured {
    replicas: usize,
    sites: usize,
    flip_sets: usize,
    accepted_per_site: f64,
    opposition_per_site: f64,
    rho_i: f64,
    rho_i_std: f64,
    verdict: String,
    tail: Option<Vec<(f64, f64)>>,
}

fn run_cell(opts: RunOptions, classify: ClassifyOptions, dir: &Path) -> CliResult<Measured> {
    let resolved = opts.resolve()?;
    let exec = execute(resolved, Some(classify))?;
    write_out(dir, &exec, "classify")?;
    let results = &exec.results;
    let c = exec.classified.as_ref().expect("classified");
    let sites = results[0].window().num_vertices();
    let denom = (sites * results.len()) as f64;
    Ok(Measured {
        replicas: results.len(),
        sites,
        flip_sets: results[0].catalog().len(),
        accepted_per_site: results
            .iter()
            .map(|r| (0..sites as u32).map(|v| r.flips(v)).sum::<u64>() as f64)
            .sum::<f64>()
            / denom,
        opposition_per_site: results.iter().map(|r| r.n_minus.iter().sum::<u64>() as f64).sum::<f64>() / denom,
        rho_i: c.verdict.rho_i,
        rho_i_std: c.verdict.rho_i_std,
        verdict: c.verdict.verdict.to_string(),
        tail: c.fixation.tail.clone(),
    })
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn run(args: SweepArgs) -> CliResult<()> {
    let text = read(&args.grid)?;
    let mut file: SweepFile =
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", args.grid.display())))?;
    file.base.rebase(args.grid.parent().unwrap_or(Path::new(".")));
    let cells = if file.grid.is_unset() { Vec::new() } else { file.grid.cells() };
    if cells.is_empty() {
        return Err(CliError::usage("the grid has no cells"));
    }
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    println!("sweep: {} cells", cells.len());

    let rows: Vec<Row> = cells
        .into_par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let dir = args.out.join("cells").join(format!("{i:04}"));
            let opts = cell.apply(&file.base);
            let outcome = run_cell(opts.clone(), file.classify.clone(), &dir);
            Row { opts, outcome }
        })
        .collect();

    let mut csv = String::from(
        "cell,k,alpha,gamma,temp,size,seed,replicas,sites,flip_sets,accepted_per_site,opposition_per_site,\
         rho_i,rho_i_std,verdict,tail_start,tail_mid,exit_code,error\n",
    );
    let mut tails = String::from("cell,t,opposition_tail\n");
    let mut failed = 0;
    for (i, row) in rows.iter().enumerate() {
        // axis values as run; blank means the built-in default
        let o = &row.opts;
        let keys = format!(
            "{i},{},{},{},{},{},{}",
            opt(&o.k),
            opt(&o.alpha),
            opt(&o.gamma),
            opt(&o.temp),
            opt(&o.size),
            opt(&o.seed)
        );
        match &row.outcome {
            Ok(m) => {
                let (start, mid) = match &m.tail {
                    Some(t) => (t[0].1.to_string(), t[t.len() / 2].1.to_string()),
                    None => (String::new(), String::new()),
                };
                writeln!(
                    csv,
                    "{keys},{},{},{},{},{},{},{},{},{start},{mid},0,",
                    m.replicas,
                    m.sites,
                    m.flip_sets,
                    m.accepted_per_site,
                    m.opposition_per_site,
                    m.rho_i,
                    m.rho_i_std,
                    m.verdict
                )
                .unwrap();
                for (t, y) in m.tail.iter().flatten() {
                    writeln!(tails, "{i},{t},{y}").unwrap();
                }
                println!("cell {i}: verdict {}, rho_I = {:.4}", m.verdict, m.rho_i);
            }
            Err(e) => {
                failed += 1;
                writeln!(csv, "{keys},,,,,,,,,,,{},{}", e.code, quote(&e.msg)).unwrap();
                println!("cell {i}: failed with exit code {}: {}", e.code, e.msg);
            }
        }
    }
    write(&args.out.join("sweep.csv"), &csv)?;
    write(&args.out.join("tails.csv"), &tails)?;
    println!("wrote sweep.csv and tails.csv to {}", args.out.display());
    if failed > 0 {
        return Err(CliError {
            code: code::SWEEP_PARTIAL,
            msg: format!("{failed} of {} cells failed", rows.len()),
        });
    }
    Ok(())
}
