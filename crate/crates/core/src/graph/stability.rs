//! The k-stability predicate for graphs with an even-degree vertex.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::cell::PeriodicGraph;
use super::flipsets::for_each_connected_set;
use super::window::{BoundaryMode, VertexId, WindowGraph};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityReason {
    /// A representative vertex satisfies both conditions.
    Witness,
    NoEvenDegreeVertex,
    /// Every even-degree vertex has a neighbour of degree below 3.
    LowDegreeNeighbor { local: usize, neighbor: VertexId, degree: usize },
    /// Every even-degree vertex sees a flip set whose boundary is too thin.
    ThinBoundary { local: usize, set: Vec<VertexId>, crossing: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub witness: Option<usize>,
    pub reason: StabilityReason,
}

impl std::fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (&self.reason, self.witness) {
            (StabilityReason::Witness, Some(v)) => write!(f, "stable, witness local={v}"),
            (StabilityReason::NoEvenDegreeVertex, _) => write!(f, "not stable: no even-degree vertex"),
            (StabilityReason::LowDegreeNeighbor { local, neighbor, degree }, _) => write!(
                f,
                "not stable: vertex local={local} has neighbour {neighbor} of degree {degree} < 3"
            ),
            (StabilityReason::ThinBoundary { local, set, crossing }, _) => {
                let names: Vec<String> = set.iter().map(|v| v.to_string()).collect();
                write!(
                    f,
                    "not stable: at local={local}, set {{{}}} has only {crossing} boundary edges",
                    names.join(" ")
                )
            }
            (StabilityReason::Witness, None) => write!(f, "stable"),
        }
    }
}

/// Decides k-stability by examining one representative vertex per local
/// index. For each even-degree representative `v` it checks that every
/// neighbour has degree at least 3 and that every connected `A` with
/// `2 <= |A| <= k` and `v ∈ ∂A ∪ ∂^ext A` has more than `d_v` edges between
/// `∂A` and `∂^ext A`. The search runs on a free window wide enough to hold
/// the radius-(k+1) ball around `v` with full degrees.
pub fn check_k_stable(g: &PeriodicGraph, k: usize) -> Result<StabilityVerdict> {
    let evens: Vec<usize> = (0..g.cell_size()).filter(|&v| g.degree(v).is_multiple_of(2)).collect();
    if evens.is_empty() {
        return Ok(StabilityVerdict {
            stable: false,
            witness: None,
            reason: StabilityReason::NoEvenDegreeVertex,
        });
    }
    let reach = (k as i64 + 2) * g.max_offset().max(1) + 1;
    let extent = vec![(-reach, reach + 1); g.dim()];
    let w = WindowGraph::new_unchecked(g, extent, BoundaryMode::Free)?;

    let mut last_failure = None;
    'candidates: for &local in &evens {
        let v = w.index_of(&VertexId::new(vec![0; g.dim()], local))?;
        let d_v = g.degree(local);
        for &x in w.neighbors(v) {
            let dx = g.degree(w.local_of(x));
            if dx < 3 {
                last_failure = Some(StabilityReason::LowDegreeNeighbor {
                    local,
                    neighbor: w.vertex_id(x),
                    degree: dx,
                });
                continue 'candidates;
            }
        }
        if k < 2 {
            return Ok(stable(local));
        }
        // Sets touching B_1(v) lie inside B_k(v).
        let ball = w.ball(v, k)?;
        let pos: HashMap<u32, u32> = ball.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let local_adj: Vec<Vec<u32>> = ball
            .iter()
            .map(|&x| w.neighbors(x).iter().filter_map(|u| pos.get(u).copied()).collect())
            .collect();
        let mut failure = None;
        for_each_connected_set(ball.len(), k, |i| &local_adj[i as usize], |s| {
            if failure.is_some() || s.len() < 2 {
                return;
            }
            let set: Vec<u32> = s.iter().map(|&i| ball[i as usize]).collect();
            let touches = set.contains(&v) || w.neighbors(v).iter().any(|u| set.contains(u));
            if !touches {
                return;
            }
            // v ∈ A needs a neighbour outside A to be on ∂A.
            if set.contains(&v) && w.neighbors(v).iter().all(|u| set.contains(u)) {
                return;
            }
            let crossing = w.crossing_edges(&set);
            if crossing <= d_v {
                let mut ids: Vec<VertexId> = set.iter().map(|&x| w.vertex_id(x)).collect();
                ids.sort();
                failure = Some(StabilityReason::ThinBoundary { local, set: ids, crossing });
            }
        });
        match failure {
            None => return Ok(stable(local)),
            Some(f) => last_failure = Some(f),
        }
    }
    Ok(StabilityVerdict {
        stable: false,
        witness: None,
        reason: last_failure.expect("at least one candidate was examined"),
    })
}

fn stable(local: usize) -> StabilityVerdict {
    StabilityVerdict {
        stable: true,
        witness: Some(local),
        reason: StabilityReason::Witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cell::{build_cubic, build_hexagonal, CellSpec, EdgeTemplate};

    #[test]
    fn cubic_lattices_are_stable() {
        for d in 2..=3 {
            let g = build_cubic(d).unwrap();
            for k in 1..=3 {
                let v = check_k_stable(&g, k).unwrap();
                assert!(v.stable, "L_{d} k={k}: {v}");
                assert_eq!(v.witness, Some(0));
            }
        }
    }

    #[test]
    fn chain_is_not_stable() {
        let v = check_k_stable(&build_cubic(1).unwrap(), 1).unwrap();
        assert!(!v.stable);
        assert!(matches!(v.reason, StabilityReason::LowDegreeNeighbor { degree: 2, .. }));
    }

    #[test]
    fn honeycomb_has_no_even_vertex() {
        for k in 1..=3 {
            let v = check_k_stable(&build_hexagonal(), k).unwrap();
            assert_eq!(v.reason, StabilityReason::NoEvenDegreeVertex);
            assert_eq!(v.to_string(), "not stable: no even-degree vertex");
        }
    }

    #[test]
    fn thin_boundary_detected() {
        // A degree-4 vertex between two triangles-worth of degree-3 vertices:
        // the pair {a, b} has only 3 + 3 - 2 = 4 boundary edges.
        let g = PeriodicGraph::new(CellSpec {
            dim: 1,
            positions: vec![vec![0.0], vec![0.3], vec![0.6]],
            edges: vec![
                EdgeTemplate::new(0, 1, vec![0]),
                EdgeTemplate::new(0, 2, vec![0]),
                EdgeTemplate::new(1, 0, vec![1]),
                EdgeTemplate::new(2, 0, vec![1]),
                EdgeTemplate::new(1, 2, vec![0]),
            ],
        })
        .unwrap();
        assert_eq!(g.degrees(), &[4, 3, 3]);
        assert!(check_k_stable(&g, 1).unwrap().stable);
        let v = check_k_stable(&g, 2).unwrap();
        assert!(!v.stable, "{v}");
        assert!(matches!(v.reason, StabilityReason::ThinBoundary { crossing: 4, .. }));
    }
}
