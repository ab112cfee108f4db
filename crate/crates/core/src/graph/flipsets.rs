//! Connected vertex sets of bounded size (the flip-set family).
//!
//! Enumeration uses rooted growth: each connected set is produced exactly
//! once, from its smallest vertex, by extending only with vertices larger
//! than the root that are not already adjacent to the growing set
//! (Wernicke's ESU scheme, emitting every node of the search tree).

use super::window::WindowGraph;
use crate::error::{Error, Result};

/// Default bound on catalog size.
pub const DEFAULT_CATALOG_CAP: usize = 50_000_000;

/// Calls `visit` once for every connected set of size `1..=k` of the graph
/// given by `neighbors` over vertices `0..n`. The slice handed to `visit` is
/// in insertion order, not sorted.
pub fn for_each_connected_set<'a, N, F>(n: usize, k: usize, neighbors: N, mut visit: F)
where
    N: Fn(u32) -> &'a [u32],
    F: FnMut(&[u32]),
{
    if k == 0 {
        return;
    }
    let mut sub = Vec::with_capacity(k);
    for root in 0..n as u32 {
        sub.clear();
        sub.push(root);
        let mut ext: Vec<u32> = neighbors(root).iter().copied().filter(|&u| u > root).collect();
        ext.sort_unstable();
        ext.dedup();
        extend(&mut sub, ext, root, k, &neighbors, &mut visit);
    }
}

fn extend<'a, N, F>(sub: &mut Vec<u32>, mut ext: Vec<u32>, root: u32, k: usize, neighbors: &N, visit: &mut F)
where
    N: Fn(u32) -> &'a [u32],
    F: FnMut(&[u32]),
{
    visit(sub);
    if sub.len() == k {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in neighbors(w) {
            if u <= root || sub.contains(&u) || next.contains(&u) || u == w {
                continue;
            }
            // exclusive neighbourhood: skip vertices already adjacent to sub
            if sub.iter().any(|&s| neighbors(s).contains(&u)) {
                continue;
            }
            next.push(u);
        }
        sub.push(w);
        extend(sub, next, root, k, neighbors, visit);
        sub.pop();
    }
}

/// The family of connected window subsets of size at most `k`, with a
/// per-vertex index of the sets containing each vertex.
#[derive(Debug, Clone)]
pub struct FlipSetCatalog {
    k: usize,
    members: Vec<u32>,
    offsets: Vec<u32>,
    by_vertex_start: Vec<u32>,
    by_vertex: Vec<u32>,
}

impl FlipSetCatalog {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted members of set `i`.
    #[inline]
    pub fn set(&self, i: usize) -> &[u32] {
        &self.members[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(move |i| self.set(i))
    }

    /// Ids of the sets containing `v`.
    pub fn sets_containing(&self, v: u32) -> &[u32] {
        let (s, e) = (self.by_vertex_start[v as usize], self.by_vertex_start[v as usize + 1]);
        &self.by_vertex[s as usize..e as usize]
    }

    /// `K_x`: number of sets containing `x`.
    pub fn count_containing(&self, v: u32) -> usize {
        self.sets_containing(v).len()
    }

    /// `K = max_x K_x`.
    pub fn max_count(&self) -> usize {
        (0..self.by_vertex_start.len() as u32 - 1)
            .map(|v| self.count_containing(v))
            .max()
            .unwrap_or(0)
    }

    /// Position of a set given by its members, if it is in the catalog.
    pub fn find(&self, set: &[u32]) -> Option<usize> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        let first = *sorted.first()?;
        self.sets_containing(first)
            .iter()
            .map(|&i| i as usize)
            .find(|&i| self.set(i) == sorted.as_slice())
    }
}

/// Number of connected sets of size at most `k`, without storing them.
pub fn count_flip_sets(w: &WindowGraph, k: usize) -> usize {
    let mut count = 0usize;
    for_each_connected_set(w.num_vertices(), k, |v| w.neighbors(v), |_| count += 1);
    count
}

/// Enumerates `A_k` on the window. Sets larger than `cap` abort before
/// allocation.
pub fn enumerate_flip_sets(w: &WindowGraph, k: usize, cap: usize) -> Result<FlipSetCatalog> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let size = count_flip_sets(w, k);
    if size > cap {
        return Err(Error::CatalogCap { size, cap });
    }
    let n = w.num_vertices();
    let mut members = Vec::with_capacity(size * k.min(4));
    let mut offsets = Vec::with_capacity(size + 1);
    offsets.push(0u32);
    let mut buf = Vec::with_capacity(k);
    for_each_connected_set(n, k, |v| w.neighbors(v), |s| {
        buf.clear();
        buf.extend_from_slice(s);
        buf.sort_unstable();
        members.extend_from_slice(&buf);
        offsets.push(members.len() as u32);
    });

    let mut counts = vec![0u32; n + 1];
    for &v in &members {
        counts[v as usize + 1] += 1;
    }
    for v in 0..n {
        counts[v + 1] += counts[v];
    }
    let by_vertex_start = counts.clone();
    let mut fill = counts;
    let mut by_vertex = vec![0u32; members.len()];
    for i in 0..offsets.len() - 1 {
        for &v in &members[offsets[i] as usize..offsets[i + 1] as usize] {
            by_vertex[fill[v as usize] as usize] = i as u32;
            fill[v as usize] += 1;
        }
    }
    Ok(FlipSetCatalog {
        k,
        members,
        offsets,
        by_vertex_start,
        by_vertex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cell::{build_cubic, build_hexagonal};
    use crate::graph::window::{centered_extent, BoundaryMode, VertexId};

    fn brute_force(w: &WindowGraph, k: usize) -> Vec<Vec<u32>> {
        let n = w.num_vertices();
        assert!(n <= 16);
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            if mask.count_ones() as usize > k {
                continue;
            }
            let set: Vec<u32> = (0..n as u32).filter(|v| mask >> v & 1 == 1).collect();
            if w.is_connected_set(&set) {
                out.push(set);
            }
        }
        out.sort();
        out
    }

    fn catalog_sets(c: &FlipSetCatalog) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = c.iter().map(|s| s.to_vec()).collect();
        v.sort();
        v
    }

    #[test]
    fn matches_brute_force_on_small_windows() {
        let cases = [
            (build_cubic(2).unwrap(), vec![(0, 3), (0, 4)], BoundaryMode::Free),
            (build_cubic(2).unwrap(), vec![(0, 3), (0, 3)], BoundaryMode::Toroidal),
            (build_hexagonal(), vec![(0, 2), (0, 3)], BoundaryMode::Toroidal),
            (build_cubic(1).unwrap(), vec![(0, 12)], BoundaryMode::Toroidal),
        ];
        for (g, ext, mode) in cases {
            let w = WindowGraph::new(&g, ext, mode).unwrap();
            for k in 1..=4 {
                let c = enumerate_flip_sets(&w, k, usize::MAX).unwrap();
                assert_eq!(catalog_sets(&c), brute_force(&w, k), "k={k}");
            }
        }
    }

    #[test]
    fn per_vertex_counts_on_lattices() {
        let l1 = WindowGraph::new(&build_cubic(1).unwrap(), centered_extent(1, 8), BoundaryMode::Toroidal).unwrap();
        let c = enumerate_flip_sets(&l1, 1, usize::MAX).unwrap();
        assert!((0..16).all(|v| c.count_containing(v) == 1));

        let l2 = WindowGraph::new(&build_cubic(2).unwrap(), centered_extent(2, 5), BoundaryMode::Toroidal).unwrap();
        let c2 = enumerate_flip_sets(&l2, 2, usize::MAX).unwrap();
        let c3 = enumerate_flip_sets(&l2, 3, usize::MAX).unwrap();
        for v in 0..l2.num_vertices() as u32 {
            assert_eq!(c2.count_containing(v), 5);
            assert_eq!(c3.count_containing(v), 23);
        }
        assert_eq!(c3.max_count(), 23);
    }

    #[test]
    fn interior_counts_are_translation_invariant() {
        let g = build_hexagonal();
        let w = WindowGraph::new(&g, centered_extent(2, 5), BoundaryMode::Free).unwrap();
        let c = enumerate_flip_sets(&w, 3, usize::MAX).unwrap();
        for local in 0..2 {
            let counts: Vec<usize> = [[-1, -1], [0, 0], [1, 0], [0, 1]]
                .iter()
                .map(|cell| {
                    let v = w.index_of(&VertexId::new(cell.to_vec(), local)).unwrap();
                    c.count_containing(v)
                })
                .collect();
            assert!(counts.windows(2).all(|p| p[0] == p[1]), "{counts:?}");
        }
    }

    #[test]
    fn cap_aborts() {
        let w = WindowGraph::new(&build_cubic(2).unwrap(), centered_extent(2, 4), BoundaryMode::Toroidal).unwrap();
        let r = enumerate_flip_sets(&w, 2, 100);
        assert!(matches!(r, Err(Error::CatalogCap { size: 192, cap: 100 })));
        assert!(enumerate_flip_sets(&w, 0, 100).is_err());
    }

    #[test]
    fn find_locates_sets() {
        let w = WindowGraph::new(&build_cubic(2).unwrap(), centered_extent(2, 3), BoundaryMode::Toroidal).unwrap();
        let c = enumerate_flip_sets(&w, 2, usize::MAX).unwrap();
        for i in 0..c.len() {
            let mut s = c.set(i).to_vec();
            s.reverse();
            assert_eq!(c.find(&s), Some(i));
        }
        assert_eq!(c.find(&[0, 35]), None);
    }
}
