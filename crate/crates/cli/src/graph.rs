use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Subcommand;
use glauberk_core::graph::{check_k_stable, WindowGraph};

use crate::error::{write, CliResult};
use crate::options::{GraphArgs, WindowArgs};

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Write the cell spec of a preset or construction
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print dimension, degrees and cell census
    Info {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Write the edge list of a finite window
    Export {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide k-stability and print the witness or the reason
    Stability {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

pub fn run(cmd: GraphCommand) -> CliResult<()> {
    match cmd {
        GraphCommand::Build { graph, out } => {
            let g = graph.build()?;
            let text = g.to_spec_text();
            match out {
                Some(path) => {
                    write(&path, &text)?;
                    println!(
                        "wrote {}: dim {}, {} vertices/cell, {} edge templates",
                        path.display(),
                        g.dim(),
                        g.cell_size(),
                        g.edges().len()
                    );
                }
                None => print!("{text}"),
            }
        }
        GraphCommand::Info { graph } => {
            let g = graph.build()?;
            let mut s = String::new();
            writeln!(s, "dimension: {}", g.dim()).unwrap();
            writeln!(s, "max degree d_G: {}", g.max_degree()).unwrap();
            writeln!(s, "vertices/cell: {}", g.cell_size()).unwrap();
            writeln!(s, "edge templates: {}", g.edges().len()).unwrap();
            writeln!(s, "edges meeting a cell: {}", g.edges_meeting_cell()).unwrap();
            writeln!(s, "bipartite: {}", if g.is_bipartite() { "yes" } else { "no" }).unwrap();
            for (local, d) in g.degrees().iter().enumerate() {
                writeln!(s, "degree local={local}: {d}").unwrap();
            }
            print!("{s}");
        }
        GraphCommand::Export { graph, window, out } => {
            let g = graph.build()?;
            let (extent, boundary) = window.resolve(g.dim())?;
            let w = WindowGraph::new(&g, extent, boundary)?;
            let text = w.to_edge_list();
            match out {
                Some(path) => {
                    write(&path, &text)?;
                    println!(
                        "wrote {}: {} vertices, {} edges",
                        path.display(),
                        w.num_vertices(),
                        w.num_edges()
                    );
                }
                None => print!("{text}"),
            }
        }
        GraphCommand::Stability { graph, k } => {
            let g = graph.build()?;
            println!("{}", check_k_stable(&g, k)?);
        }
    }
    Ok(())
}
