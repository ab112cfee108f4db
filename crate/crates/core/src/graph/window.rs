//! Finite realizations of periodic graphs over a block of cells.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cell::{EdgeTemplate, PeriodicGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Free,
    Toroidal,
}

impl FromStr for BoundaryMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(BoundaryMode::Free),
            "toroidal" | "torus" | "periodic" => Ok(BoundaryMode::Toroidal),
            _ => Err(Error::InvalidArgument(format!("unknown boundary mode `{s}`"))),
        }
    }
}

/// A vertex of the infinite graph: cell coordinate plus local index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub cell: Vec<i64>,
    pub local: usize,
}

impl VertexId {
    pub fn new(cell: Vec<i64>, local: usize) -> Self {
        VertexId { cell, local }
    }
}

/// `c_1,...,c_d:local`
impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", format_cell(&self.cell), self.local)
    }
}

impl FromStr for VertexId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (cell, local) = s
            .rsplit_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("vertex `{s}` is not of the form cell:local")))?;
        let local = local
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad local index in `{s}`")))?;
        Ok(VertexId {
            cell: parse_cell(cell)?,
            local,
        })
    }
}

pub fn format_cell(cell: &[i64]) -> String {
    cell.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_cell(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidArgument(format!("bad cell coordinate in `{s}`")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowEdge {
    pub a: u32,
    pub b: u32,
    /// Canonical template index in the parent graph.
    pub template: u32,
    /// Linear index of the cell holding the template's first endpoint.
    pub cell: u32,
}

/// Per-axis half-open cell range `[lo, hi)`.
pub type Extent = Vec<(i64, i64)>;

#[derive(Debug, Clone)]
pub struct WindowGraph {
    parent: PeriodicGraph,
    extent: Extent,
    boundary: BoundaryMode,
    shape: Vec<i64>,
    n_cells: usize,
    edges: Vec<WindowEdge>,
    // CSR adjacency: neighbour and edge id per slot.
    adj_start: Vec<u32>,
    adj_nbr: Vec<u32>,
    adj_edge: Vec<u32>,
    template_lookup: HashMap<(u32, u32), u32>,
}

impl WindowGraph {
    /// Builds the window and checks that it is connected.
    pub fn new(parent: &PeriodicGraph, extent: Extent, boundary: BoundaryMode) -> Result<Self> {
        let w = Self::new_unchecked(parent, extent, boundary)?;
        w.check_connected()?;
        Ok(w)
    }

    /// Builds the window without the connectivity check.
    pub fn new_unchecked(parent: &PeriodicGraph, extent: Extent, boundary: BoundaryMode) -> Result<Self> {
        let d = parent.dim();
        if extent.len() != d {
            return Err(Error::InvalidWindow(format!(
                "extent has {} axes, graph has dimension {d}",
                extent.len()
            )));
        }
        if let Some((lo, hi)) = extent.iter().find(|(lo, hi)| hi <= lo) {
            return Err(Error::InvalidWindow(format!("empty extent [{lo}, {hi})")));
        }
        let shape: Vec<i64> = extent.iter().map(|(lo, hi)| hi - lo).collect();
        let n_cells = shape.iter().product::<i64>() as usize;
        let n_local = parent.cell_size();
        let n_vertices = n_cells * n_local;
        if n_vertices > u32::MAX as usize {
            return Err(Error::InvalidWindow("window too large".into()));
        }

        let mut w = WindowGraph {
            parent: parent.clone(),
            extent,
            boundary,
            shape,
            n_cells,
            edges: Vec::new(),
            adj_start: Vec::new(),
            adj_nbr: Vec::new(),
            adj_edge: Vec::new(),
            template_lookup: HashMap::new(),
        };

        let mut pair_to_edge: HashMap<(u32, u32), u32> = HashMap::new();
        let mut rel = vec![0i64; d];
        let mut target = vec![0i64; d];
        for cell in 0..n_cells {
            w.cell_rel_into(cell, &mut rel);
            for (t, e) in parent.edges().iter().enumerate() {
                let mut inside = true;
                for a in 0..d {
                    let mut x = rel[a] + e.offset[a];
                    if x < 0 || x >= w.shape[a] {
                        match boundary {
                            BoundaryMode::Free => {
                                inside = false;
                                break;
                            }
                            BoundaryMode::Toroidal => x = x.rem_euclid(w.shape[a]),
                        }
                    }
                    target[a] = x;
                }
                if !inside {
                    continue;
                }
                let u = (cell * n_local + e.from) as u32;
                let v = (w.linear_from_rel(&target) * n_local + e.to) as u32;
                if u == v {
                    return Err(Error::InvalidWindow(format!(
                        "toroidal extent {:?} wraps edge template {t} onto a self-loop",
                        w.shape
                    )));
                }
                let key = (u.min(v), u.max(v));
                let id = *pair_to_edge.entry(key).or_insert_with(|| {
                    w.edges.push(WindowEdge {
                        a: u,
                        b: v,
                        template: t as u32,
                        cell: cell as u32,
                    });
                    (w.edges.len() - 1) as u32
                });
                w.template_lookup.insert((t as u32, cell as u32), id);
            }
        }

        let mut deg = vec![0u32; n_vertices];
        for e in &w.edges {
            deg[e.a as usize] += 1;
            deg[e.b as usize] += 1;
        }
        let mut start = vec![0u32; n_vertices + 1];
        for v in 0..n_vertices {
            start[v + 1] = start[v] + deg[v];
        }
        let mut fill = start.clone();
        let mut nbr = vec![0u32; start[n_vertices] as usize];
        let mut eid = vec![0u32; start[n_vertices] as usize];
        for (i, e) in w.edges.iter().enumerate() {
            for (x, y) in [(e.a, e.b), (e.b, e.a)] {
                let slot = fill[x as usize] as usize;
                nbr[slot] = y;
                eid[slot] = i as u32;
                fill[x as usize] += 1;
            }
        }
        w.adj_start = start;
        w.adj_nbr = nbr;
        w.adj_edge = eid;
        Ok(w)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.num_vertices();
        let reached = self.bfs_distances(0, None).iter().filter(|d| d.is_some()).count();
        if reached != n {
            return Err(Error::Disconnected { reached, total: n });
        }
        Ok(())
    }

    pub fn parent(&self) -> &PeriodicGraph {
        &self.parent
    }

    pub fn extent(&self) -> &Extent {
        &self.extent
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    pub fn shape(&self) -> &[i64] {
        &self.shape
    }

    pub fn num_cells(&self) -> usize {
        self.n_cells
    }

    pub fn num_vertices(&self) -> usize {
        self.n_cells * self.parent.cell_size()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[WindowEdge] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let (s, e) = (self.adj_start[v as usize], self.adj_start[v as usize + 1]);
        &self.adj_nbr[s as usize..e as usize]
    }

    /// Neighbour indices paired with the connecting edge id.
    #[inline]
    pub fn incident(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let (s, e) = (self.adj_start[v as usize] as usize, self.adj_start[v as usize + 1] as usize);
        self.adj_nbr[s..e].iter().copied().zip(self.adj_edge[s..e].iter().copied())
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.adj_start[v as usize + 1] - self.adj_start[v as usize]) as usize
    }

    fn cell_rel_into(&self, mut linear: usize, out: &mut [i64]) {
        for a in (0..self.shape.len()).rev() {
            let s = self.shape[a] as usize;
            out[a] = (linear % s) as i64;
            linear /= s;
        }
    }

    fn linear_from_rel(&self, rel: &[i64]) -> usize {
        rel.iter()
            .zip(&self.shape)
            .fold(0usize, |acc, (&r, &s)| acc * s as usize + r as usize)
    }

    /// Absolute cell coordinate of a linear cell index.
    pub fn cell_coords(&self, linear: usize) -> Vec<i64> {
        let mut rel = vec![0; self.shape.len()];
        self.cell_rel_into(linear, &mut rel);
        rel.iter().zip(&self.extent).map(|(r, (lo, _))| r + lo).collect()
    }

    /// Linear cell index of an absolute cell coordinate; toroidal windows wrap.
    pub fn cell_index(&self, cell: &[i64]) -> Option<usize> {
        if cell.len() != self.shape.len() {
            return None;
        }
        let mut rel = Vec::with_capacity(cell.len());
        for (a, &c) in cell.iter().enumerate() {
            let (lo, hi) = self.extent[a];
            let r = match self.boundary {
                BoundaryMode::Free if c < lo || c >= hi => return None,
                BoundaryMode::Free => c - lo,
                BoundaryMode::Toroidal => (c - lo).rem_euclid(self.shape[a]),
            };
            rel.push(r);
        }
        Some(self.linear_from_rel(&rel))
    }

    pub fn index_of(&self, v: &VertexId) -> Result<u32> {
        if v.local >= self.parent.cell_size() {
            return Err(Error::VertexNotInWindow(v.to_string()));
        }
        // Toroidal windows only accept canonical coordinates for lookups.
        let inside = v
            .cell
            .iter()
            .zip(&self.extent)
            .all(|(&c, &(lo, hi))| c >= lo && c < hi);
        if v.cell.len() != self.shape.len() || !inside {
            return Err(Error::VertexNotInWindow(v.to_string()));
        }
        let cell = self.cell_index(&v.cell).unwrap();
        Ok((cell * self.parent.cell_size() + v.local) as u32)
    }

    pub fn vertex_id(&self, index: u32) -> VertexId {
        let n = self.parent.cell_size();
        let i = index as usize;
        VertexId {
            cell: self.cell_coords(i / n),
            local: i % n,
        }
    }

    pub fn local_of(&self, index: u32) -> usize {
        index as usize % self.parent.cell_size()
    }

    /// Window edge realizing `template` anchored at cell `cell`, if present.
    pub fn edge_for_template(&self, template: &EdgeTemplate, cell: &[i64]) -> Option<u32> {
        let t = self.parent.template_index(template)?;
        // A reversed template is anchored at the other endpoint's cell.
        let anchor: Vec<i64> = if template.canonical() == *template {
            cell.to_vec()
        } else {
            cell.iter().zip(&template.offset).map(|(x, o)| x + o).collect()
        };
        let c = self.cell_index(&anchor)?;
        self.template_lookup.get(&(t as u32, c as u32)).copied()
    }

    /// Edge ids of every in-window translate of `template`.
    pub fn edges_for_template(&self, template: &EdgeTemplate) -> Vec<u32> {
        let Some(t) = self.parent.template_index(template) else {
            return Vec::new();
        };
        let mut out: Vec<u32> = (0..self.n_cells as u32)
            .filter_map(|c| self.template_lookup.get(&(t as u32, c)).copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn bfs_distances(&self, source: u32, limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[source as usize] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize].unwrap();
            if limit.is_some_and(|l| dv >= l) {
                continue;
            }
            for &u in self.neighbors(v) {
                if dist[u as usize].is_none() {
                    dist[u as usize] = Some(dv + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Shortest-path length between two window vertices.
    pub fn distance(&self, u: u32, v: u32) -> Result<usize> {
        self.check_index(u)?;
        self.check_index(v)?;
        self.bfs_distances(u, None)[v as usize]
            .ok_or_else(|| Error::InvalidWindow(format!("vertices {u} and {v} are not connected")))
    }

    /// All distances from `u`; unreachable vertices map to `None`.
    pub fn distances_from(&self, u: u32) -> Result<Vec<Option<usize>>> {
        self.check_index(u)?;
        Ok(self.bfs_distances(u, None))
    }

    /// `B_L(u)`, sorted.
    pub fn ball(&self, u: u32, radius: usize) -> Result<Vec<u32>> {
        self.check_index(u)?;
        let dist = self.bfs_distances(u, Some(radius));
        Ok((0..self.num_vertices() as u32)
            .filter(|&v| dist[v as usize].is_some_and(|d| d <= radius))
            .collect())
    }

    fn check_index(&self, v: u32) -> Result<()> {
        if (v as usize) < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::VertexNotInWindow(format!("#{v}")))
        }
    }

    /// `∂A`: vertices of `A` with a neighbour outside `A`.
    pub fn boundary_of(&self, set: &[u32]) -> Vec<u32> {
        let inside: HashSet<u32> = set.iter().copied().collect();
        let mut out: Vec<u32> = inside
            .iter()
            .copied()
            .filter(|&v| self.neighbors(v).iter().any(|u| !inside.contains(u)))
            .collect();
        out.sort_unstable();
        out
    }

    /// `∂^ext A`: vertices outside `A` with a neighbour in `A`.
    pub fn ext_boundary_of(&self, set: &[u32]) -> Vec<u32> {
        let inside: HashSet<u32> = set.iter().copied().collect();
        let mut out: HashSet<u32> = HashSet::new();
        for &v in &inside {
            out.extend(self.neighbors(v).iter().filter(|u| !inside.contains(u)));
        }
        let mut out: Vec<u32> = out.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Number of edges joining `∂A` to `∂^ext A`.
    pub fn crossing_edges(&self, set: &[u32]) -> usize {
        set.iter()
            .map(|&v| self.neighbors(v).iter().filter(|u| !set.contains(u)).count())
            .sum()
    }

    pub fn is_connected_set(&self, set: &[u32]) -> bool {
        if set.is_empty() {
            return false;
        }
        let mut seen = vec![set[0]];
        let mut stack = vec![set[0]];
        while let Some(v) = stack.pop() {
            for &u in self.neighbors(v) {
                if set.contains(&u) && !seen.contains(&u) {
                    seen.push(u);
                    stack.push(u);
                }
            }
        }
        seen.len() == set.len()
    }

    /// Flat edge list `u.cell u.local v.cell v.local`, one edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for e in &self.edges {
            let (u, v) = (self.vertex_id(e.a), self.vertex_id(e.b));
            s.push_str(&format!(
                "{} {} {} {}\n",
                format_cell(&u.cell),
                u.local,
                format_cell(&v.cell),
                v.local
            ));
        }
        s
    }
}

/// Symmetric extent `[-half, half)` on every axis.
pub fn centered_extent(dim: usize, half: i64) -> Extent {
    vec![(-half, half); dim]
}

/// Extent `[0, n)` on every axis.
pub fn origin_extent(dim: usize, n: i64) -> Extent {
    vec![(0, n); dim]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cell::{build_cubic, build_hexagonal};

    fn l2_window(mode: BoundaryMode) -> WindowGraph {
        WindowGraph::new(&build_cubic(2).unwrap(), centered_extent(2, 4), mode).unwrap()
    }

    #[test]
    fn torus_census() {
        let w = l2_window(BoundaryMode::Toroidal);
        assert_eq!(w.num_vertices(), 64);
        assert_eq!(w.num_edges(), 128);
        assert!((0..64).all(|v| w.degree(v) == 4));
    }

    #[test]
    fn free_census() {
        let w = l2_window(BoundaryMode::Free);
        assert_eq!(w.num_vertices(), 64);
        assert_eq!(w.num_edges(), 2 * 8 * 7);
        assert!((0..64).all(|v| w.degree(v) <= 4));
    }

    #[test]
    fn hexagonal_torus_census() {
        let w = WindowGraph::new(&build_hexagonal(), centered_extent(2, 2), BoundaryMode::Toroidal).unwrap();
        assert_eq!(w.num_vertices(), 32);
        assert_eq!(w.num_edges(), 48);
        assert!((0..32).all(|v| w.degree(v) == 3));
    }

    #[test]
    fn small_torus_merges_parallel_translates() {
        let w = WindowGraph::new(&build_cubic(2).unwrap(), origin_extent(2, 2), BoundaryMode::Toroidal).unwrap();
        assert_eq!(w.num_vertices(), 4);
        assert_eq!(w.num_edges(), 4);
        let err = WindowGraph::new(&build_cubic(1).unwrap(), origin_extent(1, 1), BoundaryMode::Toroidal);
        assert!(err.is_err());
    }

    #[test]
    fn zero_extent_rejected() {
        let g = build_cubic(2).unwrap();
        assert!(WindowGraph::new(&g, vec![(0, 0), (0, 3)], BoundaryMode::Free).is_err());
        assert!(WindowGraph::new(&g, vec![(0, 3)], BoundaryMode::Free).is_err());
    }

    #[test]
    fn disconnected_window_rejected() {
        // Only diagonal edges: the free 2x2 window splits into two pieces.
        use crate::graph::cell::{CellSpec, EdgeTemplate, PeriodicGraph};
        let g = PeriodicGraph::new(CellSpec {
            dim: 2,
            positions: vec![vec![0.0, 0.0]],
            edges: vec![EdgeTemplate::new(0, 0, vec![1, 1]), EdgeTemplate::new(0, 0, vec![1, -1])],
        })
        .unwrap();
        let r = WindowGraph::new(&g, origin_extent(2, 2), BoundaryMode::Free);
        assert!(matches!(r, Err(Error::Disconnected { .. })));
    }

    #[test]
    fn distances_and_balls() {
        let w = WindowGraph::new(&build_cubic(2).unwrap(), centered_extent(2, 6), BoundaryMode::Toroidal).unwrap();
        let o = w.index_of(&VertexId::new(vec![0, 0], 0)).unwrap();
        let e = w.index_of(&VertexId::new(vec![1, 0], 0)).unwrap();
        assert_eq!(w.distance(o, o).unwrap(), 0);
        assert_eq!(w.distance(o, e).unwrap(), 1);
        assert_eq!(w.ball(o, 0).unwrap(), vec![o]);
        assert_eq!(w.ball(o, 1).unwrap().len(), 5);
        assert_eq!(w.ball(o, 2).unwrap().len(), 13);
        assert!(w.distance(o, 10_000).is_err());
    }

    #[test]
    fn boundaries() {
        let w = l2_window(BoundaryMode::Toroidal);
        let all: Vec<u32> = (0..64).collect();
        assert!(w.boundary_of(&all).is_empty());
        assert!(w.ext_boundary_of(&all).is_empty());

        let v = w.index_of(&VertexId::new(vec![0, 0], 0)).unwrap();
        assert_eq!(w.boundary_of(&[v]), vec![v]);
        let mut nb = w.neighbors(v).to_vec();
        nb.sort_unstable();
        assert_eq!(w.ext_boundary_of(&[v]), nb);

        let sq: Vec<u32> = [[0, 0], [1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|c| w.index_of(&VertexId::new(c.to_vec(), 0)).unwrap())
            .collect();
        let mut sorted = sq.clone();
        sorted.sort_unstable();
        assert_eq!(w.boundary_of(&sq), sorted);
        assert_eq!(w.ext_boundary_of(&sq).len(), 8);
        assert_eq!(w.crossing_edges(&sq), 8);
    }

    #[test]
    fn vertex_id_text() {
        let v: VertexId = "-1,2:3".parse().unwrap();
        assert_eq!(v, VertexId::new(vec![-1, 2], 3));
        assert_eq!(v.to_string(), "-1,2:3");
        assert!("1,2".parse::<VertexId>().is_err());
    }

    #[test]
    fn index_round_trip() {
        let w = WindowGraph::new(&build_hexagonal(), vec![(-2, 1), (0, 3)], BoundaryMode::Free).unwrap();
        for v in 0..w.num_vertices() as u32 {
            assert_eq!(w.index_of(&w.vertex_id(v)).unwrap(), v);
        }
        assert!(w.index_of(&VertexId::new(vec![5, 0], 0)).is_err());
    }

    #[test]
    fn edge_lookup_by_template() {
        let w = l2_window(BoundaryMode::Free);
        let t = EdgeTemplate::new(0, 0, vec![1, 0]);
        let e = w.edge_for_template(&t, &[0, 0]).unwrap();
        let edge = w.edges()[e as usize];
        let ends = [w.vertex_id(edge.a), w.vertex_id(edge.b)];
        assert!(ends.contains(&VertexId::new(vec![0, 0], 0)));
        assert!(ends.contains(&VertexId::new(vec![1, 0], 0)));
        // reversed template anchored at the other end
        let r = EdgeTemplate::new(0, 0, vec![-1, 0]);
        assert_eq!(w.edge_for_template(&r, &[1, 0]), Some(e));
        // leaving the free window
        assert_eq!(w.edge_for_template(&t, &[3, 0]), None);
        assert_eq!(w.edges_for_template(&t).len(), 7 * 8);
    }
}
