//! Exhaustive k-absence checks on finite regions.
//!
//! A configuration `σ_C` on a region `C` is k-absent when some sequence of
//! flips `A(1), …, A(m)` of connected sets `A ⊆ C`, `|A| <= k`, has
//! `Δ = 0` at every step but the last and `Δ < 0` at the last. The search is
//! a breadth-first walk over `|C|`-bit masks along `Δ = 0` moves, so the
//! witness it returns is a shortest one.

use std::collections::{HashMap, HashSet, VecDeque};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{for_each_connected_set, VertexId, WindowGraph};
use crate::model::Interactions;

pub const DEFAULT_REGION_CAP: usize = 24;

/// How flips near the edge of the region see the outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExteriorMode {
    /// Only sets with `A ∪ ∂^ext A ⊆ C` may flip; exterior spins never matter.
    #[default]
    InteriorOnly,
    /// Every connected `A ⊆ C` may flip; `∂^ext C` carries fixed spins.
    GivenExterior,
}

impl FromStr for ExteriorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior-only" => Ok(ExteriorMode::InteriorOnly),
            "given-exterior" => Ok(ExteriorMode::GivenExterior),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mode `{s}` (interior-only | given-exterior)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Region {
    /// Window vertices of `C`.
    pub vertices: Vec<u32>,
    pub mode: ExteriorMode,
    /// Spins on `∂^ext C`, used in given-exterior mode.
    pub exterior: Vec<(u32, i8)>,
}

impl Region {
    pub fn interior(vertices: Vec<u32>) -> Self {
        Region {
            vertices,
            mode: ExteriorMode::InteriorOnly,
            exterior: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    Fix(u32, i8),
    Equal(u32, u32),
    Opposite(u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub set: Vec<u32>,
    pub delta: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsenceResult {
    pub absent: bool,
    pub witness: Option<Vec<WitnessStep>>,
}

#[derive(Debug, Clone, Copy)]
enum Other {
    Inner(u8),
    Outer(i8),
}

/// A region with its flip sets and their boundary edges, ready for
/// repeated queries.
#[derive(Debug, Clone)]
pub struct AbsenceProblem {
    vertices: Vec<u32>,
    k: usize,
    mode: ExteriorMode,
    sets: Vec<Vec<u8>>,
    // per set: (member, other endpoint, coupling)
    crossing: Vec<Vec<(u8, Other, i8)>>,
}

impl AbsenceProblem {
    pub fn new(w: &WindowGraph, j: &Interactions, region: &Region, k: usize, cap: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if j.len() != w.num_edges() {
            return Err(Error::IncompleteAssignment(format!(
                "{} couplings for {} edges",
                j.len(),
                w.num_edges()
            )));
        }
        let mut vertices = region.vertices.clone();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("region is empty".into()));
        }
        if vertices.len() > cap.min(32) {
            return Err(Error::RegionCap {
                size: vertices.len(),
                cap: cap.min(32),
            });
        }
        if let Some(&v) = vertices.iter().find(|&&v| v as usize >= w.num_vertices()) {
            return Err(Error::VertexNotInWindow(format!("#{v}")));
        }
        let pos: HashMap<u32, u8> = vertices.iter().enumerate().map(|(i, &v)| (v, i as u8)).collect();
        let exterior: HashMap<u32, i8> = region.exterior.iter().copied().collect();
        if region.mode == ExteriorMode::GivenExterior {
            for v in w.ext_boundary_of(&vertices) {
                if !exterior.contains_key(&v) {
                    return Err(Error::IncompleteAssignment(format!("exterior vertex {}", w.vertex_id(v))));
                }
            }
        }
        if exterior.values().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("exterior spins must be ±1".into()));
        }

        let adj: Vec<Vec<u32>> = vertices
            .iter()
            .map(|&v| w.neighbors(v).iter().filter_map(|u| pos.get(u).map(|&i| i as u32)).collect())
            .collect();
        let mut sets: Vec<Vec<u8>> = Vec::new();
        for_each_connected_set(vertices.len(), k, |i| &adj[i as usize], |s| {
            let mut set: Vec<u8> = s.iter().map(|&i| i as u8).collect();
            set.sort_unstable();
            sets.push(set);
        });
        if region.mode == ExteriorMode::InteriorOnly {
            sets.retain(|s| {
                s.iter()
                    .all(|&i| w.neighbors(vertices[i as usize]).iter().all(|u| pos.contains_key(u)))
            });
        }
        sets.sort();
        let crossing = sets
            .iter()
            .map(|s| {
                let mut out = Vec::new();
                for &i in s {
                    for (y, e) in w.incident(vertices[i as usize]) {
                        let other = match pos.get(&y) {
                            Some(p) if s.contains(p) => continue,
                            Some(&p) => Other::Inner(p),
                            None => Other::Outer(exterior[&y]),
                        };
                        out.push((i, other, j.get(e)));
                    }
                }
                out
            })
            .collect();
        Ok(AbsenceProblem {
            vertices,
            k,
            mode: region.mode,
            sets,
            crossing,
        })
    }

    /// Region vertices in bit order (ascending window index).
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> ExteriorMode {
        self.mode
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Bit `i` set means vertex `vertices()[i]` has spin `+1`.
    pub fn mask_from(&self, spins: &[(u32, i8)]) -> Result<u32> {
        let given: HashMap<u32, i8> = spins.iter().copied().collect();
        let mut mask = 0u32;
        for (i, v) in self.vertices.iter().enumerate() {
            match given.get(v) {
                Some(1) => mask |= 1 << i,
                Some(-1) => {}
                Some(s) => return Err(Error::InvalidArgument(format!("spin {s} is not ±1"))),
                None => return Err(Error::IncompleteAssignment(format!("region vertex #{v}"))),
            }
        }
        Ok(mask)
    }

    pub fn spins_of(&self, mask: u32) -> Vec<(u32, i8)> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, if mask >> i & 1 == 1 { 1 } else { -1 }))
            .collect()
    }

    #[inline]
    fn delta(&self, mask: u32, set: usize) -> i32 {
        let spin = |i: u8| if mask >> i & 1 == 1 { 1i32 } else { -1 };
        let mut sum = 0i32;
        for &(x, y, j) in &self.crossing[set] {
            let sy = match y {
                Other::Inner(p) => spin(p),
                Other::Outer(s) => s as i32,
            };
            sum += j as i32 * spin(x) * sy;
        }
        2 * sum
    }

    #[inline]
    fn flip_mask(&self, set: usize) -> u32 {
        self.sets[set].iter().fold(0u32, |m, &i| m | 1 << i)
    }

    /// Breadth-first search from `mask`; the witness is shortest, ties going
    /// to the lexicographically smallest sets.
    pub fn check(&self, mask: u32) -> AbsenceResult {
        let mut parent: HashMap<u32, (u32, u32)> = HashMap::new();
        let mut queue = VecDeque::from([mask]);
        let mut seen = HashSet::from([mask]);
        while let Some(m) = queue.pop_front() {
            for s in 0..self.sets.len() {
                let d = self.delta(m, s);
                if d < 0 {
                    return AbsenceResult {
                        absent: true,
                        witness: Some(self.rebuild(&parent, mask, m, s, d)),
                    };
                }
                if d == 0 {
                    let next = m ^ self.flip_mask(s);
                    if seen.insert(next) {
                        parent.insert(next, (m, s as u32));
                        queue.push_back(next);
                    }
                }
            }
        }
        AbsenceResult {
            absent: false,
            witness: None,
        }
    }

    fn rebuild(&self, parent: &HashMap<u32, (u32, u32)>, start: u32, end: u32, last: usize, d: i32) -> Vec<WitnessStep> {
        let to_step = |s: usize, delta: i32| WitnessStep {
            set: self.sets[s].iter().map(|&i| self.vertices[i as usize]).collect(),
            delta,
        };
        let mut steps = vec![to_step(last, d)];
        let mut m = end;
        while m != start {
            let (p, s) = parent[&m];
            steps.push(to_step(s as usize, 0));
            m = p;
        }
        steps.reverse();
        steps
    }
}

/// Single query; `sigma` must assign every region vertex.
pub fn is_k_absent(
    w: &WindowGraph,
    j: &Interactions,
    region: &Region,
    sigma: &[(u32, i8)],
    k: usize,
) -> Result<AbsenceResult> {
    let p = AbsenceProblem::new(w, j, region, k, DEFAULT_REGION_CAP)?;
    Ok(p.check(p.mask_from(sigma)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllAbsentReport {
    pub all: bool,
    /// Number of constrained configurations covered, symmetric partners
    /// included.
    pub checked: u64,
    pub vacuous: bool,
    pub used_symmetry: bool,
    pub counterexample: Option<Vec<(u32, i8)>>,
}

/// Checks every configuration satisfying `constraints`. In interior-only
/// mode without fixed spins, `σ` and `-σ` behave identically, so only the
/// half with the last region vertex at `-1` is searched.
pub fn all_absent(problem: &AbsenceProblem, constraints: &[Constraint]) -> Result<AllAbsentReport> {
    let bit = |v: u32| -> Result<u32> {
        problem
            .vertices
            .iter()
            .position(|&x| x == v)
            .map(|i| i as u32)
            .ok_or_else(|| Error::VertexNotInWindow(format!("#{v} (not in region)")))
    };
    let mut fixed: Vec<(u32, bool)> = Vec::new();
    let mut pairs: Vec<(u32, u32, bool)> = Vec::new();
    for c in constraints {
        match *c {
            Constraint::Fix(v, s) => fixed.push((bit(v)?, s > 0)),
            Constraint::Equal(u, v) => pairs.push((bit(u)?, bit(v)?, true)),
            Constraint::Opposite(u, v) => pairs.push((bit(u)?, bit(v)?, false)),
        }
    }
    let sat = |m: u32| {
        fixed.iter().all(|&(i, up)| (m >> i & 1 == 1) == up)
            && pairs.iter().all(|&(a, b, eq)| ((m >> a & 1) == (m >> b & 1)) == eq)
    };
    let n = problem.vertices.len() as u32;
    let symmetric = problem.mode == ExteriorMode::InteriorOnly && fixed.is_empty();
    let limit: u64 = if symmetric { 1 << (n - 1) } else { 1 << n };
    let count = (0..limit).into_par_iter().filter(|&m| sat(m as u32)).count() as u64;
    let checked = if symmetric { 2 * count } else { count };
    let bad = (0..limit)
        .into_par_iter()
        .filter(|&m| sat(m as u32))
        .find_first(|&m| !problem.check(m as u32).absent);
    Ok(AllAbsentReport {
        all: bad.is_none(),
        checked,
        vacuous: count == 0,
        used_symmetry: symmetric,
        counterexample: bad.map(|m| problem.spins_of(m as u32)),
    })
}

/// `k`-absent implies `k'`-absent for `k < k'`. Returns whether the
/// implication holds on this instance.
pub fn absence_monotone_check(
    w: &WindowGraph,
    j: &Interactions,
    region: &Region,
    sigma: &[(u32, i8)],
    k: usize,
    k_prime: usize,
) -> Result<bool> {
    if k >= k_prime {
        return Err(Error::InvalidArgument(format!("need k < k', got {k} and {k_prime}")));
    }
    let low = is_k_absent(w, j, region, sigma, k)?.absent;
    let high = is_k_absent(w, j, region, sigma, k_prime)?.absent;
    Ok(!low || high)
}

/// Contents of a region file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegionFile {
    pub region: Region,
    pub constraints: Vec<Constraint>,
    /// A single configuration, when every region vertex has a `sigma` line.
    pub sigma: Vec<(u32, i8)>,
}

/// Parses `region`, `fix`, `require-equal`, `require-opposite`, `mode`,
/// `exterior` and `sigma` lines. Vertices are written `cell:local`.
pub fn parse_region(w: &WindowGraph, text: &str) -> Result<RegionFile> {
    let mut out = RegionFile::default();
    let mut saw_region = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let perr = |msg: String| Error::Parse { line, msg };
        let vertex = |t: &str| -> Result<u32> {
            let id: VertexId = t.parse().map_err(|e: Error| perr(e.to_string()))?;
            w.index_of(&id).map_err(|e| perr(e.to_string()))
        };
        let sign = |t: &str| -> Result<i8> {
            match t {
                "+1" | "1" | "+" => Ok(1),
                "-1" | "-" => Ok(-1),
                _ => Err(perr(format!("expected ±1, got `{t}`"))),
            }
        };
        let arity = |n: usize| -> Result<()> {
            if toks.len() == n + 1 {
                Ok(())
            } else {
                Err(perr(format!("`{}` takes {n} arguments", toks[0])))
            }
        };
        match toks[0] {
            "region" => {
                if toks.len() < 2 {
                    return Err(perr("`region` needs at least one vertex".into()));
                }
                for t in &toks[1..] {
                    out.region.vertices.push(vertex(t)?);
                }
                saw_region = true;
            }
            "fix" => {
                arity(2)?;
                out.constraints.push(Constraint::Fix(vertex(toks[1])?, sign(toks[2])?));
            }
            "require-equal" => {
                arity(2)?;
                out.constraints.push(Constraint::Equal(vertex(toks[1])?, vertex(toks[2])?));
            }
            "require-opposite" => {
                arity(2)?;
                out.constraints.push(Constraint::Opposite(vertex(toks[1])?, vertex(toks[2])?));
            }
            "mode" => {
                arity(1)?;
                out.region.mode = toks[1].parse().map_err(|e: Error| perr(e.to_string()))?;
            }
            "exterior" => {
                arity(2)?;
                out.region.exterior.push((vertex(toks[1])?, sign(toks[2])?));
            }
            "sigma" => {
                arity(2)?;
                out.sigma.push((vertex(toks[1])?, sign(toks[2])?));
            }
            other => return Err(perr(format!("unknown directive `{other}`"))),
        }
    }
    if !saw_region {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "missing `region` line".into(),
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonStep {
    set: Vec<String>,
    delta: i32,
}

/// `{"absent": bool, "witness": [{"set": [...], "delta": d}, ...] | null}`
pub fn witness_json(w: &WindowGraph, result: &AbsenceResult) -> String {
    let steps: Option<Vec<JsonStep>> = result.witness.as_ref().map(|ws| {
        ws.iter()
            .map(|s| JsonStep {
                set: s.set.iter().map(|&v| w.vertex_id(v).to_string()).collect(),
                delta: s.delta,
            })
            .collect()
    });
    serde_json::json!({ "absent": result.absent, "witness": steps }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cubic, centered_extent, BoundaryMode};
    use crate::model::{delta_h, EnergyDelta, SpinState};
    use crate::presets::{example_m, example_m_interactions, EXAMPLE_M_REGION};
    use crate::rng::stream;
    use rand::Rng;

    /// Fixpoint over the full transition graph.
    fn naive(p: &AbsenceProblem) -> Vec<bool> {
        let n = p.vertices.len();
        let states = 1usize << n;
        let mut absent: Vec<bool> = (0..states)
            .map(|m| (0..p.sets.len()).any(|s| p.delta(m as u32, s) < 0))
            .collect();
        loop {
            let mut changed = false;
            for m in 0..states {
                if absent[m] {
                    continue;
                }
                let reach = (0..p.sets.len())
                    .any(|s| p.delta(m as u32, s) == 0 && absent[m ^ p.flip_mask(s) as usize]);
                if reach {
                    absent[m] = true;
                    changed = true;
                }
            }
            if !changed {
                return absent;
            }
        }
    }

    fn square() -> WindowGraph {
        WindowGraph::new(&build_cubic(2).unwrap(), centered_extent(2, 4), BoundaryMode::Toroidal).unwrap()
    }

    #[test]
    fn singleton_cases() {
        let w = square();
        let v = w.index_of(&VertexId::new(vec![0, 0], 0)).unwrap();
        let j = Interactions::uniform(w.num_edges(), 1);
        let region = Region {
            vertices: vec![v],
            mode: ExteriorMode::GivenExterior,
            exterior: w.neighbors(v).iter().map(|&u| (u, 1)).collect(),
        };
        let r = is_k_absent(&w, &j, &region, &[(v, -1)], 1).unwrap();
        assert!(r.absent);
        let steps = r.witness.unwrap();
        assert_eq!(steps, vec![WitnessStep { set: vec![v], delta: -8 }]);
        assert!(!is_k_absent(&w, &j, &region, &[(v, 1)], 1).unwrap().absent);
        assert!(absence_monotone_check(&w, &j, &region, &[(v, -1)], 1, 3).unwrap());
        // interior-only: a lone vertex has no admissible flip at all
        let lone = Region::interior(vec![v]);
        assert!(!is_k_absent(&w, &j, &lone, &[(v, -1)], 1).unwrap().absent);
    }

    #[test]
    fn missing_exterior_and_cap() {
        let w = square();
        let j = Interactions::uniform(w.num_edges(), 1);
        let region = Region {
            vertices: vec![0],
            mode: ExteriorMode::GivenExterior,
            exterior: vec![],
        };
        assert!(matches!(
            AbsenceProblem::new(&w, &j, &region, 1, 24),
            Err(Error::IncompleteAssignment(_))
        ));
        let big = Region::interior((0..30).collect());
        assert!(matches!(
            AbsenceProblem::new(&w, &j, &big, 1, 24),
            Err(Error::RegionCap { size: 30, cap: 24 })
        ));
        let p = AbsenceProblem::new(&w, &j, &Region::interior(vec![0, 1]), 1, 24).unwrap();
        assert!(matches!(p.mask_from(&[(0, 1)]), Err(Error::IncompleteAssignment(_))));
    }

    fn random_region<R: Rng>(w: &WindowGraph, size: usize, rng: &mut R) -> Vec<u32> {
        // grow a connected blob
        let mut set = vec![rng.random_range(0..w.num_vertices() as u32)];
        while set.len() < size {
            let x = set[rng.random_range(0..set.len())];
            let nb = w.neighbors(x);
            let y = nb[rng.random_range(0..nb.len())];
            if !set.contains(&y) {
                set.push(y);
            }
        }
        set
    }

    #[test]
    fn agrees_with_naive_oracle() {
        let w = square();
        let mut rng = stream(17, 0);
        for trial in 0..40 {
            let j = Interactions::new(
                (0..w.num_edges()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
            )
            .unwrap();
            let size = 3 + trial % 10;
            let vertices = random_region(&w, size, &mut rng);
            let mode = if trial % 2 == 0 {
                ExteriorMode::InteriorOnly
            } else {
                ExteriorMode::GivenExterior
            };
            let exterior = w
                .ext_boundary_of(&vertices)
                .into_iter()
                .map(|v| (v, if rng.random::<bool>() { 1 } else { -1 }))
                .collect();
            let region = Region { vertices, mode, exterior };
            for k in 1..=3 {
                let p = AbsenceProblem::new(&w, &j, &region, k, 24).unwrap();
                let oracle = naive(&p);
                for (m, &expected) in oracle.iter().enumerate() {
                    let got = p.check(m as u32);
                    assert_eq!(got.absent, expected, "trial {trial} k {k} mask {m}");
                    if let Some(steps) = got.witness {
                        check_replay(&w, &j, &region, &p, m as u32, &steps);
                    }
                }
            }
        }
    }

    fn check_replay(w: &WindowGraph, j: &Interactions, region: &Region, p: &AbsenceProblem, mask: u32, steps: &[WitnessStep]) {
        let mut s = SpinState::uniform(w.num_vertices(), 1);
        for &(v, x) in &region.exterior {
            s.set(v, x);
        }
        for (v, x) in p.spins_of(mask) {
            s.set(v, x);
        }
        for (i, step) in steps.iter().enumerate() {
            assert!(step.set.iter().all(|v| p.vertices().contains(v)));
            let d = delta_h(w, j, &s, &step.set).unwrap();
            assert_eq!(d, EnergyDelta(step.delta));
            if i + 1 < steps.len() {
                assert_eq!(step.delta, 0);
            } else {
                assert!(step.delta < 0);
            }
            s.flip(&step.set);
        }
    }

    #[test]
    fn interior_mode_ignores_exterior() {
        let w = square();
        let mut rng = stream(23, 0);
        for _ in 0..20 {
            let j = Interactions::new(
                (0..w.num_edges()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
            )
            .unwrap();
            let vertices = random_region(&w, 9, &mut rng);
            let mut region = Region::interior(vertices.clone());
            let a = AbsenceProblem::new(&w, &j, &region, 2, 24).unwrap();
            region.exterior = w.ext_boundary_of(&vertices).into_iter().map(|v| (v, -1)).collect();
            let b = AbsenceProblem::new(&w, &j, &region, 2, 24).unwrap();
            for m in 0..1u32 << 9 {
                assert_eq!(a.check(m), b.check(m));
            }
        }
    }

    #[test]
    fn closure_under_downhill_moves() {
        // if some Δ <= 0 move leads to an absent state, the start is absent
        let w = square();
        let mut rng = stream(29, 0);
        let j = Interactions::new((0..w.num_edges()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
            .unwrap();
        let region = Region::interior(random_region(&w, 10, &mut rng));
        let p = AbsenceProblem::new(&w, &j, &region, 2, 24).unwrap();
        for m in 0..1u32 << 10 {
            let here = p.check(m).absent;
            for s in 0..p.num_sets() {
                if p.delta(m, s) <= 0 && p.check(m ^ p.flip_mask(s)).absent {
                    assert!(here);
                }
            }
        }
    }

    #[test]
    fn hexagon_chain_region() {
        let g = example_m().unwrap();
        let w = WindowGraph::new(&g, vec![(-2, 4)], BoundaryMode::Toroidal).unwrap();
        let j = example_m_interactions(&w).unwrap();
        let file = parse_region(&w, EXAMPLE_M_REGION).unwrap();
        assert_eq!(file.region.vertices.len(), 11);
        let p = AbsenceProblem::new(&w, &j, &file.region, 1, DEFAULT_REGION_CAP).unwrap();
        let report = all_absent(&p, &file.constraints).unwrap();
        assert!(report.all, "{report:?}");
        assert_eq!(report.checked, 1024);
        assert!(report.used_symmetry);
    }

    #[test]
    fn vacuous_constraints() {
        let w = square();
        let j = Interactions::uniform(w.num_edges(), 1);
        let p = AbsenceProblem::new(&w, &j, &Region::interior(vec![0, 1, 2]), 1, 24).unwrap();
        let r = all_absent(&p, &[Constraint::Equal(0, 1), Constraint::Opposite(0, 1)]).unwrap();
        assert!(r.all && r.vacuous);
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn region_file_errors() {
        let w = square();
        assert!(parse_region(&w, "fix 0,0:0 +1\n").is_err());
        assert!(matches!(parse_region(&w, "region 0,0:0\nmode sideways\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_region(&w, "region 9,9:0\n").is_err());
        let f = parse_region(&w, "region 0,0:0 1,0:0\nsigma 0,0:0 -1\nsigma 1,0:0 +1\n").unwrap();
        assert_eq!(f.sigma.len(), 2);
    }

    #[test]
    fn witness_json_shape() {
        let w = square();
        let r = AbsenceResult {
            absent: true,
            witness: Some(vec![WitnessStep { set: vec![0], delta: -8 }]),
        };
        let v: serde_json::Value = serde_json::from_str(&witness_json(&w, &r)).unwrap();
        assert_eq!(v["witness"][0]["delta"], -8);
        assert_eq!(v["witness"][0]["set"][0], "-4,-4:0");
    }
}
