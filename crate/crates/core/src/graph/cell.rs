//! Periodic graphs described by a unit cell.
//!
//! A cell lists its vertices (with a position inside `[0,1)^d`) and a set of
//! edge templates `(i, j, offset)`: vertex `i` of cell `z` is adjacent to
//! vertex `j` of cell `z + offset`. Translating the cell over `Z^d` generates
//! the infinite graph.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeTemplate {
    pub from: usize,
    pub to: usize,
    pub offset: Vec<i64>,
}

impl EdgeTemplate {
    pub fn new(from: usize, to: usize, offset: Vec<i64>) -> Self {
        EdgeTemplate { from, to, offset }
    }

    /// An edge and its reverse with negated offset describe the same edge.
    /// The canonical form has `from <= to`; when `from == to` the offset is
    /// lexicographically positive.
    pub fn canonical(&self) -> EdgeTemplate {
        let reversed = || EdgeTemplate {
            from: self.to,
            to: self.from,
            offset: self.offset.iter().map(|o| -o).collect(),
        };
        if self.from > self.to {
            return reversed();
        }
        if self.from == self.to && !lex_positive(&self.offset) {
            return reversed();
        }
        self.clone()
    }
}

fn lex_positive(offset: &[i64]) -> bool {
    offset.iter().find(|&&o| o != 0).is_some_and(|&o| o > 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub dim: usize,
    /// Position of each local vertex, indexed by local index.
    pub positions: Vec<Vec<f64>>,
    pub edges: Vec<EdgeTemplate>,
}

/// A validated d-graph. Edge templates are stored in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CellSpec", into = "CellSpec")]
pub struct PeriodicGraph {
    spec: CellSpec,
    degrees: Vec<usize>,
}

impl TryFrom<CellSpec> for PeriodicGraph {
    type Error = Error;
    fn try_from(spec: CellSpec) -> Result<Self> {
        PeriodicGraph::new(spec)
    }
}

impl From<PeriodicGraph> for CellSpec {
    fn from(g: PeriodicGraph) -> Self {
        g.spec
    }
}

impl PeriodicGraph {
    pub fn new(mut spec: CellSpec) -> Result<Self> {
        if spec.dim == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if spec.positions.is_empty() {
            return Err(Error::InvalidSpec("cell has no vertices".into()));
        }
        let n = spec.positions.len();
        for (i, p) in spec.positions.iter().enumerate() {
            if p.len() != spec.dim {
                return Err(Error::InvalidSpec(format!(
                    "vertex {i} has {} coordinates, expected {}",
                    p.len(),
                    spec.dim
                )));
            }
            if p.iter().any(|&c| !(0.0..1.0).contains(&c)) {
                return Err(Error::InvalidSpec(format!(
                    "vertex {i} position {p:?} lies outside [0,1)^{}",
                    spec.dim
                )));
            }
        }
        let mut seen = HashSet::new();
        let mut canonical = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            if e.from >= n || e.to >= n {
                return Err(Error::InvalidSpec(format!(
                    "edge ({}, {}) references a missing vertex",
                    e.from, e.to
                )));
            }
            if e.offset.len() != spec.dim {
                return Err(Error::InvalidSpec(format!(
                    "edge ({}, {}) offset has {} components, expected {}",
                    e.from,
                    e.to,
                    e.offset.len(),
                    spec.dim
                )));
            }
            if e.from == e.to && e.offset.iter().all(|&o| o == 0) {
                return Err(Error::InvalidSpec(format!("self-loop at vertex {}", e.from)));
            }
            let c = e.canonical();
            if !seen.insert(c.clone()) {
                return Err(Error::InvalidSpec(format!(
                    "duplicate edge ({}, {}, {:?})",
                    c.from, c.to, c.offset
                )));
            }
            canonical.push(c);
        }
        spec.edges = canonical;

        let mut degrees = vec![0usize; n];
        for e in &spec.edges {
            degrees[e.from] += 1;
            degrees[e.to] += 1;
        }
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::InvalidSpec(format!("vertex {i} has no incident edge")));
        }
        Ok(PeriodicGraph { spec, degrees })
    }

    pub fn spec(&self) -> &CellSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn cell_size(&self) -> usize {
        self.spec.positions.len()
    }

    pub fn edges(&self) -> &[EdgeTemplate] {
        &self.spec.edges
    }

    /// Degree `d_v` of the local vertex in the infinite graph.
    pub fn degree(&self, local: usize) -> usize {
        self.degrees[local]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Maximal degree `d_G`.
    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Largest `|offset|_inf` over edge templates.
    pub fn max_offset(&self) -> i64 {
        self.spec
            .edges
            .iter()
            .flat_map(|e| e.offset.iter().map(|o| o.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Index of the canonical template matching `(i, j, offset)` in either orientation.
    pub fn template_index(&self, template: &EdgeTemplate) -> Option<usize> {
        let c = template.canonical();
        self.spec.edges.iter().position(|e| *e == c)
    }

    /// Neighbours of local vertex `v` of cell 0 as `(cell offset, local index)`.
    pub fn neighbors(&self, v: usize) -> Vec<(Vec<i64>, usize)> {
        let mut out = Vec::new();
        for e in &self.spec.edges {
            if e.from == v {
                out.push((e.offset.clone(), e.to));
            }
            if e.to == v {
                out.push((e.offset.iter().map(|o| -o).collect(), e.from));
            }
        }
        out
    }

    /// Number of edges of the infinite graph meeting the cell's vertex set.
    pub fn edges_meeting_cell(&self) -> usize {
        self.spec
            .edges
            .iter()
            .map(|e| {
                let internal = e.offset.iter().all(|&o| o == 0);
                if internal {
                    1
                } else {
                    2
                }
            })
            .sum()
    }

    /// Two-colourability of the infinite graph: a parity labelling of the
    /// local vertices plus a parity per unit offset must make every edge
    /// join opposite colours.
    pub fn is_bipartite(&self) -> bool {
        // colour(z, i) = c_i + <w, z> mod 2, with w in {0,1}^d. Try all w.
        let d = self.dim();
        if d > 20 {
            return false;
        }
        let n = self.cell_size();
        'outer: for mask in 0u32..(1 << d) {
            let axis_parity = |offset: &[i64]| -> usize {
                offset
                    .iter()
                    .enumerate()
                    .filter(|(a, _)| mask >> a & 1 == 1)
                    .map(|(_, &o)| o.rem_euclid(2) as usize)
                    .sum::<usize>()
                    % 2
            };
            // Propagate local colours through a BFS over the cell quotient.
            let mut colour: Vec<Option<usize>> = vec![None; n];
            for start in 0..n {
                if colour[start].is_some() {
                    continue;
                }
                colour[start] = Some(0);
                let mut stack = vec![start];
                while let Some(v) = stack.pop() {
                    let cv = colour[v].unwrap();
                    for (off, u) in self.neighbors(v) {
                        let want = (cv + 1 + axis_parity(&off)) % 2;
                        match colour[u] {
                            None => {
                                colour[u] = Some(want);
                                stack.push(u);
                            }
                            Some(c) if c != want => continue 'outer,
                            Some(_) => {}
                        }
                    }
                }
            }
            return true;
        }
        false
    }

    /// Serializes to the line-oriented cell-spec format.
    pub fn to_spec_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dim {}", self.dim()).unwrap();
        for (i, p) in self.spec.positions.iter().enumerate() {
            write!(s, "vertex {i}").unwrap();
            for c in p {
                write!(s, " {c}").unwrap();
            }
            s.push('\n');
        }
        for e in &self.spec.edges {
            write!(s, "edge {} {}", e.from, e.to).unwrap();
            for o in &e.offset {
                write!(s, " {o}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// The cubic lattice `L_d`: one vertex per cell, unit offsets along each axis.
pub fn build_cubic(d: usize) -> Result<PeriodicGraph> {
    if d == 0 {
        return Err(Error::InvalidArgument("cubic lattice needs d >= 1".into()));
    }
    let edges = (0..d)
        .map(|axis| {
            let mut offset = vec![0; d];
            offset[axis] = 1;
            EdgeTemplate::new(0, 0, offset)
        })
        .collect();
    PeriodicGraph::new(CellSpec {
        dim: d,
        positions: vec![vec![0.0; d]],
        edges,
    })
}

/// The honeycomb lattice in lattice coordinates: two vertices per cell and
/// three edge templates, all vertices of degree 3.
pub fn build_hexagonal() -> PeriodicGraph {
    PeriodicGraph::new(CellSpec {
        dim: 2,
        positions: vec![vec![0.0, 0.0], vec![1.0 / 3.0, 1.0 / 3.0]],
        edges: vec![
            EdgeTemplate::new(0, 1, vec![0, 0]),
            EdgeTemplate::new(0, 1, vec![-1, 0]),
            EdgeTemplate::new(0, 1, vec![0, -1]),
        ],
    })
    .expect("honeycomb cell is valid")
}

/// Output of [`build_gamma_with_roles`]: the graph plus the local indices of
/// original and common vertices.
#[derive(Debug, Clone)]
pub struct GammaGraph {
    pub graph: PeriodicGraph,
    pub original: Vec<usize>,
    pub common: Vec<usize>,
}

/// `Γ_{ℓ,m}(G)`: every edge of `g` becomes a chain of `m` cycles of `2ℓ`
/// vertices, consecutive cycles sharing one vertex.
pub fn build_gamma(g: &PeriodicGraph, ell: usize, m: usize) -> Result<PeriodicGraph> {
    build_gamma_with_roles(g, ell, m).map(|gg| gg.graph)
}

pub fn build_gamma_with_roles(g: &PeriodicGraph, ell: usize, m: usize) -> Result<GammaGraph> {
    if ell < 2 {
        return Err(Error::InvalidArgument(format!("Γ needs ell >= 2, got {ell}")));
    }
    if m < 1 {
        return Err(Error::InvalidArgument(format!("Γ needs m >= 1, got {m}")));
    }
    let d = g.dim();
    // Every vertex is tracked by its absolute position; its cell is the floor.
    struct Placed {
        cell: Vec<i64>,
        local: usize,
    }
    let mut positions: Vec<Vec<f64>> = g.spec.positions.clone();
    let original: Vec<usize> = (0..g.cell_size()).collect();
    let mut common = original.clone();
    let mut edges = Vec::new();

    let place = |abs: Vec<f64>, positions: &mut Vec<Vec<f64>>| -> Placed {
        let mut cell = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for &x in &abs {
            let mut c = x.floor();
            let mut f = x - c;
            if f >= 1.0 {
                c += 1.0;
                f = 0.0;
            }
            cell.push(c as i64);
            frac.push(f);
        }
        positions.push(frac);
        Placed {
            cell,
            local: positions.len() - 1,
        }
    };
    let link = |a: &Placed, b: &Placed, edges: &mut Vec<EdgeTemplate>| {
        let offset = b.cell.iter().zip(&a.cell).map(|(x, y)| x - y).collect();
        edges.push(EdgeTemplate::new(a.local, b.local, offset));
    };

    for e in g.edges() {
        let start = g.spec.positions[e.from].clone();
        let end: Vec<f64> = g.spec.positions[e.to]
            .iter()
            .zip(&e.offset)
            .map(|(p, &o)| p + o as f64)
            .collect();
        let dir: Vec<f64> = end.iter().zip(&start).map(|(a, b)| a - b).collect();
        let point = |t: f64, lift: f64| -> Vec<f64> {
            let mut p: Vec<f64> = start.iter().zip(&dir).map(|(s, v)| s + t * v).collect();
            // Displace the second path of each cycle off the segment.
            if d >= 2 {
                let axis = dir.iter().position(|v| v.abs() > 1e-12).unwrap_or(0);
                p[(axis + 1) % d] += lift;
            } else {
                p[0] += lift;
            }
            p
        };
        let lift = 0.25 / (m * ell) as f64;
        let steps = (m * ell) as f64;

        let mut joint = Placed {
            cell: vec![0; d],
            local: e.from,
        };
        for c in 0..m {
            let next = if c + 1 == m {
                Placed {
                    cell: e.offset.clone(),
                    local: e.to,
                }
            } else {
                let t = ((c + 1) * ell) as f64 / steps;
                let p = place(point(t, 0.0), &mut positions);
                common.push(p.local);
                p
            };
            for path in 0..2 {
                let mut prev = Placed {
                    cell: joint.cell.clone(),
                    local: joint.local,
                };
                for s in 1..ell {
                    let t = (c * ell + s) as f64 / steps;
                    let lift = if path == 0 { 0.0 } else { lift };
                    let v = place(point(t, lift), &mut positions);
                    link(&prev, &v, &mut edges);
                    prev = v;
                }
                link(&prev, &next, &mut edges);
            }
            joint = next;
        }
    }
    let graph = PeriodicGraph::new(CellSpec {
        dim: d,
        positions,
        edges,
    })?;
    Ok(GammaGraph {
        graph,
        original,
        common,
    })
}

/// Parses the cell-spec text format:
///
/// ```text
/// dim <d>
/// vertex <local-index> <x_1> ... <x_d>
/// edge <i> <j> <o_1> ... <o_d>
/// ```
///
/// `#` starts a comment. Local indices must cover `0..n` exactly.
pub fn load_cell_spec(text: &str) -> Result<PeriodicGraph> {
    let mut dim: Option<usize> = None;
    let mut vertices: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let perr = |msg: String| Error::Parse { line, msg };
        match tokens[0] {
            "dim" => {
                if dim.is_some() {
                    return Err(perr("repeated dim header".into()));
                }
                if tokens.len() != 2 {
                    return Err(perr("expected `dim <d>`".into()));
                }
                let d: usize = tokens[1]
                    .parse()
                    .map_err(|_| perr(format!("bad dimension `{}`", tokens[1])))?;
                if d == 0 {
                    return Err(perr("dimension must be at least 1".into()));
                }
                dim = Some(d);
            }
            "vertex" => {
                let d = dim.ok_or_else(|| perr("`vertex` before `dim`".into()))?;
                if tokens.len() != 2 + d {
                    return Err(perr(format!("expected `vertex <index>` and {d} coordinates")));
                }
                let idx: usize = tokens[1]
                    .parse()
                    .map_err(|_| perr(format!("bad vertex index `{}`", tokens[1])))?;
                let pos = tokens[2..]
                    .iter()
                    .map(|t| t.parse::<f64>().map_err(|_| perr(format!("bad coordinate `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                vertices.push((idx, pos, line));
            }
            "edge" => {
                let d = dim.ok_or_else(|| perr("`edge` before `dim`".into()))?;
                if tokens.len() != 3 + d {
                    return Err(perr(format!("expected `edge <i> <j>` and {d} offsets")));
                }
                let parse_idx = |t: &str| t.parse::<usize>().map_err(|_| perr(format!("bad index `{t}`")));
                let from = parse_idx(tokens[1])?;
                let to = parse_idx(tokens[2])?;
                let offset = tokens[3..]
                    .iter()
                    .map(|t| t.parse::<i64>().map_err(|_| perr(format!("bad offset `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                edges.push(EdgeTemplate::new(from, to, offset));
                edge_lines.push(line);
            }
            other => return Err(perr(format!("unknown directive `{other}`"))),
        }
    }
    let dim = dim.ok_or(Error::Parse {
        line: 0,
        msg: "missing `dim` header".into(),
    })?;
    if vertices.is_empty() {
        return Err(Error::InvalidSpec("cell has no vertices".into()));
    }
    let n = vertices.len();
    let mut positions: Vec<Option<Vec<f64>>> = vec![None; n];
    for (idx, pos, line) in vertices {
        if idx >= n {
            return Err(Error::Parse {
                line,
                msg: format!("vertex index {idx} out of range: indices must be 0..{n}"),
            });
        }
        if positions[idx].is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate vertex index {idx}"),
            });
        }
        positions[idx] = Some(pos);
    }
    // Check edges line-by-line for errors that carry a useful line number.
    let mut seen = HashSet::new();
    for (e, &line) in edges.iter().zip(&edge_lines) {
        if e.from >= n || e.to >= n {
            return Err(Error::Parse {
                line,
                msg: format!("edge references missing vertex ({}, {})", e.from, e.to),
            });
        }
        if !seen.insert(e.canonical()) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate edge ({}, {}, {:?})", e.from, e.to, e.offset),
            });
        }
    }
    PeriodicGraph::new(CellSpec {
        dim,
        positions: positions.into_iter().map(|p| p.unwrap()).collect(),
        edges,
    })
}
