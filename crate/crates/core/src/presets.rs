//! Named graphs and the bundled hexagon-chain example.

use crate::error::{Error, Result};
use crate::graph::{
    build_cubic, build_gamma, build_hexagonal, load_cell_spec, EdgeTemplate, PeriodicGraph, VertexId, WindowGraph,
};
use crate::model::Interactions;

pub const EXAMPLE_M_CELL: &str = include_str!("../data/example_m.cell");
pub const EXAMPLE_M_REGION: &str = include_str!("../data/example_m.region");

pub const PRESET_NAMES: &[&str] = &["cubic1", "cubic2", "cubic3", "hex", "gamma", "example-m"];

/// Resolves a preset name. `gamma` needs [`gamma_preset`] instead.
pub fn preset(name: &str) -> Result<PeriodicGraph> {
    match name {
        "cubic1" => build_cubic(1),
        "cubic2" => build_cubic(2),
        "cubic3" => build_cubic(3),
        "hex" => Ok(build_hexagonal()),
        "example-m" => example_m(),
        "gamma" => Err(Error::InvalidArgument("preset `gamma` needs a base graph, ell and m".into())),
        other => Err(Error::InvalidArgument(format!(
            "unknown preset `{other}` (expected one of {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

pub fn gamma_preset(base: &str, ell: usize, m: usize) -> Result<PeriodicGraph> {
    build_gamma(&preset(base)?, ell, m)
}

/// The hexagon chain: local 0 has degree 4, locals 1..4 degree 2.
pub fn example_m() -> Result<PeriodicGraph> {
    load_cell_spec(EXAMPLE_M_CELL)
}

/// Couplings of the hexagon chain: `-1` on the `1–3` edge of every cell with
/// even first coordinate, `+1` elsewhere. Frustrated and unfrustrated
/// hexagons alternate.
pub fn example_m_interactions(w: &WindowGraph) -> Result<Interactions> {
    let g = w.parent();
    let t = g
        .template_index(&EdgeTemplate::new(1, 3, vec![0]))
        .filter(|_| g.cell_size() == 5 && g.dim() == 1)
        .ok_or_else(|| Error::InvalidArgument("window is not over the example-m graph".into()))?;
    let values = w
        .edges()
        .iter()
        .map(|e| {
            let cell = w.cell_coords(e.cell as usize)[0];
            if e.template as usize == t && cell.rem_euclid(2) == 0 {
                -1
            } else {
                1
            }
        })
        .collect();
    Interactions::new(values)
}

/// Window vertices of the bundled two-hexagon region, in file order.
pub fn example_m_region_vertices(w: &WindowGraph) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for cell in 0..2 {
        for local in 0..5 {
            out.push(w.index_of(&VertexId::new(vec![cell], local))?);
        }
    }
    out.push(w.index_of(&VertexId::new(vec![2], 0))?);
    Ok(out)
}
