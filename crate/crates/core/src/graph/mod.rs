//! Periodic d-graphs, finite windows, flip sets and k-stability.

mod cell;
mod flipsets;
mod stability;
mod window;

pub use cell::{
    build_cubic, build_gamma, build_gamma_with_roles, build_hexagonal, load_cell_spec, CellSpec, EdgeTemplate,
    GammaGraph, PeriodicGraph,
};
pub use flipsets::{
    count_flip_sets, enumerate_flip_sets, for_each_connected_set, FlipSetCatalog, DEFAULT_CATALOG_CAP,
};
pub use stability::{check_k_stable, StabilityReason, StabilityVerdict};
pub use window::{
    centered_extent, format_cell, origin_extent, parse_cell, BoundaryMode, Extent, VertexId, WindowEdge, WindowGraph,
};

/// Realizes a finite window of `g`; see [`WindowGraph::new`].
pub fn realize_window(g: &PeriodicGraph, extent: Extent, boundary: BoundaryMode) -> crate::Result<WindowGraph> {
    WindowGraph::new(g, extent, boundary)
}
