use std::path::PathBuf;

use clap::Args;
use glauberk_core::absence::{
    all_absent, parse_region, witness_json, AbsenceProblem, AbsenceResult, Constraint, ExteriorMode, RegionFile,
    DEFAULT_REGION_CAP,
};
use glauberk_core::graph::WindowGraph;
use glauberk_core::model::{parse_couplings, Interactions};
use glauberk_core::presets::{example_m_interactions, EXAMPLE_M_REGION};

use crate::error::{code, read, write, CliError, CliResult};
use crate::options::{GraphArgs, WindowArgs};

#[derive(Debug, Args)]
pub struct AbsenceArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// Region file (default for example-m: the bundled two-hexagon region)
    #[arg(long)]
    region: Option<PathBuf>,
    /// Coupling file, `figure` (example-m) or `ferro` (all +1)
    #[arg(long)]
    couplings: Option<String>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Largest region size
    #[arg(long, default_value_t = DEFAULT_REGION_CAP)]
    cap: usize,
    /// Check every configuration allowed by the constraints, even when the
    /// region file gives a single one
    #[arg(long)]
    all: bool,
    /// Also check that k-absence implies k'-absence
    #[arg(long, value_name = "K'")]
    monotone: Option<usize>,
    /// Write the result and its witness as JSON
    #[arg(long)]
    witness: Option<PathBuf>,
}

fn satisfies(problem: &AbsenceProblem, constraints: &[Constraint], mask: u32) -> bool {
    let spin = |v: u32| {
        let i = problem.vertices().iter().position(|&x| x == v).unwrap();
        if mask >> i & 1 == 1 {
            1
        } else {
            -1
        }
    };
    constraints.iter().all(|c| match *c {
        Constraint::Fix(v, s) => spin(v) == s,
        Constraint::Equal(u, v) => spin(u) == spin(v),
        Constraint::Opposite(u, v) => spin(u) != spin(v),
    })
}

fn couplings(args: &AbsenceArgs, w: &WindowGraph) -> CliResult<Interactions> {
    let choice = match (&args.couplings, args.graph.is_example_m()) {
        (Some(c), _) => c.as_str(),
        (None, true) => "figure",
        (None, false) => return Err(CliError::usage("--couplings is required (file, figure or ferro)")),
    };
    Ok(match choice {
        "figure" => example_m_interactions(w)?,
        "ferro" => Interactions::uniform(w.num_edges(), 1),
        path => parse_couplings(w, &read(path.as_ref())?)?,
    })
}

fn describe_witness(k: usize, r: &AbsenceResult) -> String {
    match &r.witness {
        None => format!("not {k}-absent: no lowering flip is reachable through Δ = 0 moves"),
        Some(steps) => format!(
            "{k}-absent: witness of length {} ending with Δ = {}",
            steps.len(),
            steps.last().map_or(0, |s| s.delta)
        ),
    }
}

pub fn run(args: AbsenceArgs) -> CliResult<()> {
    let g = args.graph.build()?;
    let mut window = args.window.clone();
    if args.graph.is_example_m() && window.extent.is_none() && window.size.is_none() {
        window.extent = Some("-2:4".into());
    }
    let (extent, boundary) = window.resolve(g.dim())?;
    let w = WindowGraph::new(&g, extent, boundary)?;
    let j = couplings(&args, &w)?;
    let text = match (&args.region, args.graph.is_example_m()) {
        (Some(p), _) => read(p)?,
        (None, true) => EXAMPLE_M_REGION.to_string(),
        (None, false) => return Err(CliError::usage("--region is required")),
    };
    let RegionFile {
        region,
        constraints,
        sigma,
    } = parse_region(&w, &text)?;
    let k = args.k;
    let problem = AbsenceProblem::new(&w, &j, &region, k, args.cap)?;
    let higher = match args.monotone {
        Some(kp) if kp <= k => return Err(CliError::usage(format!("--monotone needs k' > k = {k}"))),
        Some(kp) => Some(AbsenceProblem::new(&w, &j, &region, kp, args.cap)?),
        None => None,
    };
    println!(
        "region: {} vertices, {} flip sets of size <= {k}, {}",
        problem.vertices().len(),
        problem.num_sets(),
        match problem.mode() {
            ExteriorMode::InteriorOnly => "interior-only",
            ExteriorMode::GivenExterior => "given exterior",
        }
    );

    let single = !sigma.is_empty() && !args.all;
    let mut witness = None;
    if single {
        let mask = problem.mask_from(&sigma)?;
        let res = problem.check(mask);
        println!("{}", describe_witness(k, &res));
        witness = Some(witness_json(&w, &res));
    } else {
        let report = all_absent(&problem, &constraints)?;
        if report.vacuous {
            println!("no configuration satisfies the constraints");
        } else if report.all {
            println!("all {k}-absent ({} configurations checked)", report.checked);
        } else {
            let bad = report.counterexample.as_ref().unwrap();
            let res = problem.check(problem.mask_from(bad)?);
            let spins: Vec<String> = bad.iter().map(|&(v, s)| format!("{}={s:+}", w.vertex_id(v))).collect();
            println!("not all {k}-absent; counterexample {}", spins.join(" "));
            println!("{}", describe_witness(k, &res));
            witness = Some(witness_json(&w, &res));
        }
    }

    if let (Some(hi), Some(kp)) = (&higher, args.monotone) {
        let masks: Vec<u32> = if single {
            vec![problem.mask_from(&sigma)?]
        } else {
            (0..1u32 << problem.vertices().len())
                .filter(|&m| satisfies(&problem, &constraints, m))
                .collect()
        };
        let violations = masks
            .iter()
            .filter(|&&m| problem.check(m).absent && !hi.check(m).absent)
            .count();
        if violations == 0 {
            println!("monotonicity k={k} -> k'={kp}: pass ({} configurations)", masks.len());
        } else {
            println!("monotonicity k={k} -> k'={kp}: FAIL ({violations} of {} configurations)", masks.len());
        }
        if violations > 0 {
            write_witness(&args, witness)?;
            return Err(CliError {
                code: code::CHECK_FAILED,
                msg: "absence is not monotone in k on this instance".into(),
            });
        }
    }
    write_witness(&args, witness)
}

fn write_witness(args: &AbsenceArgs, witness: Option<String>) -> CliResult<()> {
    if let Some(path) = &args.witness {
        let body = witness.unwrap_or_else(|| "{\"absent\":true,\"witness\":null}".into());
        write(path, &(body + "\n"))?;
    }
    Ok(())
}
