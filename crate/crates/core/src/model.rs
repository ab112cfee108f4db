//! Energies, flip rates, temperature profiles and the sampling of quenched
//! couplings and initial spins.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{format_cell, parse_cell, EdgeTemplate, VertexId, WindowGraph};

/// Spin per window vertex, each `-1` or `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinState(Vec<i8>);

impl SpinState {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        check_signs(&values, "spin")?;
        Ok(SpinState(values))
    }

    pub fn uniform(n: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        SpinState(vec![value; n])
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, v: u32) -> i8 {
        self.0[v as usize]
    }

    pub fn set(&mut self, v: u32, value: i8) {
        assert!(value == 1 || value == -1);
        self.0[v as usize] = value;
    }

    /// `σ → σ^{(A)}`.
    #[inline]
    pub fn flip(&mut self, set: &[u32]) {
        for &v in set {
            self.0[v as usize] = -self.0[v as usize];
        }
    }

    pub fn flipped(&self, set: &[u32]) -> SpinState {
        let mut s = self.clone();
        s.flip(set);
        s
    }

    /// Global flip `σ → -σ`.
    pub fn negated(&self) -> SpinState {
        SpinState(self.0.iter().map(|s| -s).collect())
    }

    pub fn magnetization(&self) -> i64 {
        self.0.iter().map(|&s| s as i64).sum()
    }
}

/// Coupling per window edge, each `-1` or `+1`. Fixed for a whole run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interactions(Vec<i8>);

impl Interactions {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        check_signs(&values, "coupling")?;
        Ok(Interactions(values))
    }

    pub fn uniform(n: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        Interactions(vec![value; n])
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, e: u32) -> i8 {
        self.0[e as usize]
    }

    pub fn set(&mut self, e: u32, value: i8) {
        assert!(value == 1 || value == -1);
        self.0[e as usize] = value;
    }
}

fn check_signs(values: &[i8], what: &str) -> Result<()> {
    match values.iter().position(|&v| v != 1 && v != -1) {
        Some(i) => Err(Error::InvalidArgument(format!("{what} {i} is {} (expected ±1)", values[i]))),
        None => Ok(()),
    }
}

/// Energy change of a flip. Always even; `|Δ| >= 2` when nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EnergyDelta(pub i32);

impl EnergyDelta {
    pub fn value(self) -> i32 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemperatureProfile {
    Zero,
    Constant { t0: f64 },
    /// `T(t) = c / ln(t0 + t)`.
    LogDecay { c: f64, t0: f64 },
    /// Step profile: `T(t)` is the value of the last knot with time `<= t`
    /// (the first value before the first knot).
    Table { knots: Vec<(f64, f64)> },
}

impl TemperatureProfile {
    pub fn constant(t0: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::InvalidArgument(format!("constant temperature must be > 0, got {t0}")));
        }
        Ok(TemperatureProfile::Constant { t0 })
    }

    pub fn log_decay(c: f64, t0: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("log-decay constant must be > 0, got {c}")));
        }
        if !(t0 >= std::f64::consts::E && t0.is_finite()) {
            return Err(Error::InvalidArgument(format!("log-decay offset must be >= e, got {t0}")));
        }
        Ok(TemperatureProfile::LogDecay { c, t0 })
    }

    pub fn table(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidArgument("temperature table is empty".into()));
        }
        if knots.iter().any(|&(t, temp)| !t.is_finite() || !temp.is_finite() || temp < 0.0) {
            return Err(Error::InvalidArgument("temperature table has invalid entries".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(TemperatureProfile::Table { knots })
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            TemperatureProfile::Zero => 0.0,
            TemperatureProfile::Constant { t0 } => *t0,
            TemperatureProfile::LogDecay { c, t0 } => c / (t0 + t).ln(),
            TemperatureProfile::Table { knots } => {
                let i = knots.partition_point(|&(kt, _)| kt <= t);
                knots[i.saturating_sub(1)].1
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TemperatureProfile::Zero)
    }
}

/// `zero`, `const:<T>`, `log:<c>` or `log:<c>:<t0>`.
impl FromStr for TemperatureProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number `{x}` in temperature `{s}`")))
        };
        match parts.as_slice() {
            ["zero"] => Ok(TemperatureProfile::Zero),
            ["const", t] => TemperatureProfile::constant(num(t)?),
            ["log", c] => TemperatureProfile::log_decay(num(c)?, std::f64::consts::E),
            ["log", c, t0] => TemperatureProfile::log_decay(num(c)?, num(t0)?),
            _ => Err(Error::InvalidArgument(format!(
                "unknown temperature profile `{s}` (zero | const:T | log:c[:t0])"
            ))),
        }
    }
}

/// `Δ_A H` without input checks. `set` must be sorted or tiny; membership
/// is a linear scan.
#[inline]
pub(crate) fn delta_raw(w: &WindowGraph, j: &Interactions, s: &SpinState, set: &[u32]) -> i32 {
    let mut sum = 0i32;
    for &x in set {
        let sx = s.get(x) as i32;
        for (y, e) in w.incident(x) {
            if !set.contains(&y) {
                sum += j.get(e) as i32 * sx * s.get(y) as i32;
            }
        }
    }
    2 * sum
}

/// Energy increment of flipping `set`: twice the sum of `J_e σ_x σ_y` over
/// edges joining `∂A` to `∂^ext A`.
pub fn delta_h(w: &WindowGraph, j: &Interactions, s: &SpinState, set: &[u32]) -> Result<EnergyDelta> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("flip set is empty".into()));
    }
    check_sizes(w, j, s)?;
    if let Some(&v) = set.iter().find(|&&v| v as usize >= w.num_vertices()) {
        return Err(Error::VertexNotInWindow(format!("#{v}")));
    }
    Ok(EnergyDelta(delta_raw(w, j, s, set)))
}

fn check_sizes(w: &WindowGraph, j: &Interactions, s: &SpinState) -> Result<()> {
    if j.len() != w.num_edges() {
        return Err(Error::IncompleteAssignment(format!(
            "{} couplings for {} edges",
            j.len(),
            w.num_edges()
        )));
    }
    if s.len() != w.num_vertices() {
        return Err(Error::IncompleteAssignment(format!(
            "{} spins for {} vertices",
            s.len(),
            w.num_vertices()
        )));
    }
    Ok(())
}

/// `H = -Σ_e J_e σ_x σ_y` over the realized window edges.
pub fn window_h(w: &WindowGraph, j: &Interactions, s: &SpinState) -> i64 {
    -w.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| j.get(i as u32) as i64 * s.get(e.a) as i64 * s.get(e.b) as i64)
        .sum::<i64>()
}

/// Energy density `H / |Λ|`.
pub fn density(w: &WindowGraph, j: &Interactions, s: &SpinState) -> f64 {
    window_h(w, j, s) as f64 / w.num_vertices() as f64
}

/// Flip probability for an arrival with increment `delta` at temperature
/// `temperature`: `1 / (1 + exp(2Δ/T))`, or the exact `{0, ½, 1}` limit at
/// `T = 0`.
pub fn rate_at_temperature(delta: EnergyDelta, temperature: f64) -> f64 {
    let d = delta.0;
    if temperature <= 0.0 {
        return match d.signum() {
            1 => 0.0,
            0 => 0.5,
            _ => 1.0,
        };
    }
    let x = (2.0 * d as f64 / temperature).clamp(-700.0, 700.0);
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

pub fn rate(delta: EnergyDelta, profile: &TemperatureProfile, t: f64) -> f64 {
    rate_at_temperature(delta, profile.at(t))
}

fn check_probability(p: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in [0,1], got {p}")))
    }
}

/// Independent couplings per edge: `+1` with probability `alpha`.
pub fn sample_interactions<R: Rng + ?Sized>(w: &WindowGraph, alpha: f64, rng: &mut R) -> Result<Interactions> {
    check_probability(alpha, "alpha")?;
    Ok(Interactions(
        (0..w.num_edges())
            .map(|_| if rng.random::<f64>() < alpha { 1 } else { -1 })
            .collect(),
    ))
}

/// Independent spins per vertex: `+1` with probability `gamma`.
pub fn sample_initial<R: Rng + ?Sized>(w: &WindowGraph, gamma: f64, rng: &mut R) -> Result<SpinState> {
    check_probability(gamma, "gamma")?;
    Ok(SpinState(
        (0..w.num_vertices())
            .map(|_| if rng.random::<f64>() < gamma { 1 } else { -1 })
            .collect(),
    ))
}

fn parse_sign(tok: &str, line: usize) -> Result<i8> {
    match tok {
        "+1" | "1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(Error::Parse {
            line,
            msg: format!("expected ±1, got `{tok}`"),
        }),
    }
}

fn sign_str(v: i8) -> &'static str {
    if v > 0 {
        "+1"
    } else {
        "-1"
    }
}

/// `spin <cell> <local> <±1>` lines, one per window vertex.
pub fn spins_to_text(w: &WindowGraph, s: &SpinState) -> String {
    let mut out = String::new();
    for v in 0..w.num_vertices() as u32 {
        let id = w.vertex_id(v);
        writeln!(out, "spin {} {} {}", format_cell(&id.cell), id.local, sign_str(s.get(v))).unwrap();
    }
    out
}

/// Reads a spin assignment; every window vertex must be assigned.
pub fn parse_spins(w: &WindowGraph, text: &str) -> Result<SpinState> {
    let mut values: Vec<Option<i8>> = vec![None; w.num_vertices()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks[0] != "spin" || toks.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: "expected `spin <cell> <local> <±1>`".into(),
            });
        }
        let cell = parse_cell(toks[1]).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let local: usize = toks[2].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad local index `{}`", toks[2]),
        })?;
        let v = w
            .index_of(&VertexId::new(cell, local))
            .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        values[v as usize] = Some(parse_sign(toks[3], line)?);
    }
    if let Some(v) = values.iter().position(|x| x.is_none()) {
        return Err(Error::IncompleteAssignment(format!("vertex {}", w.vertex_id(v as u32))));
    }
    Ok(SpinState(values.into_iter().map(|x| x.unwrap()).collect()))
}

/// `coupling <i> <j> <o...> <±1> <cell>` lines, one per window edge.
pub fn couplings_to_text(w: &WindowGraph, j: &Interactions) -> String {
    let mut out = String::new();
    for (i, e) in w.edges().iter().enumerate() {
        let t = &w.parent().edges()[e.template as usize];
        write!(out, "coupling {} {}", t.from, t.to).unwrap();
        for o in &t.offset {
            write!(out, " {o}").unwrap();
        }
        writeln!(
            out,
            " {} {}",
            sign_str(j.get(i as u32)),
            format_cell(&w.cell_coords(e.cell as usize))
        )
        .unwrap();
    }
    out
}

/// Reads couplings. `coupling <i> <j> <o_1..o_d> <±1>` sets every in-window
/// translate of the template; a trailing `<cell>` token restricts the line to
/// the translate anchored at that cell. Later lines override earlier ones.
/// Every window edge must end up assigned.
pub fn parse_couplings(w: &WindowGraph, text: &str) -> Result<Interactions> {
    let d = w.parent().dim();
    let mut values: Vec<Option<i8>> = vec![None; w.num_edges()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let perr = |msg: String| Error::Parse { line, msg };
        if toks[0] != "coupling" || (toks.len() != 4 + d && toks.len() != 5 + d) {
            return Err(perr(format!("expected `coupling <i> <j> <{d} offsets> <±1> [<cell>]`")));
        }
        let idx = |t: &str| t.parse::<usize>().map_err(|_| perr(format!("bad index `{t}`")));
        let offset = toks[3..3 + d]
            .iter()
            .map(|t| t.parse::<i64>().map_err(|_| perr(format!("bad offset `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        let template = EdgeTemplate::new(idx(toks[1])?, idx(toks[2])?, offset);
        if w.parent().template_index(&template).is_none() {
            return Err(perr(format!("no edge template ({} {} {:?})", template.from, template.to, template.offset)));
        }
        let sign = parse_sign(toks[3 + d], line)?;
        if toks.len() == 5 + d {
            let cell = parse_cell(toks[4 + d]).map_err(|e| perr(e.to_string()))?;
            let e = w
                .edge_for_template(&template, &cell)
                .ok_or_else(|| perr(format!("edge not in window at cell {}", toks[4 + d])))?;
            values[e as usize] = Some(sign);
        } else {
            for e in w.edges_for_template(&template) {
                values[e as usize] = Some(sign);
            }
        }
    }
    if let Some(e) = values.iter().position(|x| x.is_none()) {
        let edge = w.edges()[e];
        return Err(Error::IncompleteAssignment(format!(
            "edge {} -- {}",
            w.vertex_id(edge.a),
            w.vertex_id(edge.b)
        )));
    }
    Ok(Interactions(values.into_iter().map(|x| x.unwrap()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cubic, build_hexagonal, centered_extent, BoundaryMode};
    use crate::rng::stream;

    fn torus(half: i64) -> WindowGraph {
        WindowGraph::new(&build_cubic(2).unwrap(), centered_extent(2, half), BoundaryMode::Toroidal).unwrap()
    }

    #[test]
    fn aligned_singleton_costs_eight() {
        let w = torus(4);
        let j = Interactions::uniform(w.num_edges(), 1);
        let s = SpinState::uniform(w.num_vertices(), 1);
        assert_eq!(delta_h(&w, &j, &s, &[0]).unwrap(), EnergyDelta(8));
        assert!(delta_h(&w, &j, &s, &[]).is_err());
    }

    #[test]
    fn hexagonal_minority_spin() {
        let w = WindowGraph::new(&build_hexagonal(), centered_extent(2, 3), BoundaryMode::Toroidal).unwrap();
        let j = Interactions::uniform(w.num_edges(), 1);
        let mut s = SpinState::uniform(w.num_vertices(), 1);
        s.set(7, -1);
        assert_eq!(delta_h(&w, &j, &s, &[7]).unwrap(), EnergyDelta(-6));
    }

    #[test]
    fn special_neighbor_increment() {
        // J = -1 on one edge at v, σ = +1 everywhere: flipping the neighbour x costs
        // 2·J_xv σ_x σ_v + 2(d_x - 1) = -2 + 6 = 4.
        let w = torus(4);
        let v = w.index_of(&VertexId::new(vec![0, 0], 0)).unwrap();
        let x = w.index_of(&VertexId::new(vec![1, 0], 0)).unwrap();
        let mut j = Interactions::uniform(w.num_edges(), 1);
        let e = w.incident(x).find(|&(y, _)| y == v).unwrap().1;
        j.set(e, -1);
        let s = SpinState::uniform(w.num_vertices(), 1);
        assert_eq!(delta_h(&w, &j, &s, &[x]).unwrap(), EnergyDelta(4));
    }

    #[test]
    fn ferromagnet_ground_energy() {
        let w = torus(4);
        let j = Interactions::uniform(w.num_edges(), 1);
        let s = SpinState::uniform(w.num_vertices(), 1);
        assert_eq!(window_h(&w, &j, &s), -128);
        assert_eq!(density(&w, &j, &s), -2.0);
    }

    #[test]
    fn single_vertex_window_has_zero_energy() {
        use crate::graph::{CellSpec, PeriodicGraph};
        let g = PeriodicGraph::new(CellSpec {
            dim: 1,
            positions: vec![vec![0.0]],
            edges: vec![EdgeTemplate::new(0, 0, vec![1])],
        })
        .unwrap();
        let w = WindowGraph::new(&g, vec![(0, 1)], BoundaryMode::Free).unwrap();
        assert_eq!(w.num_edges(), 0);
        let j = Interactions::uniform(0, 1);
        assert_eq!(window_h(&w, &j, &SpinState::uniform(1, -1)), 0);
    }

    #[test]
    fn zero_temperature_rates() {
        let z = TemperatureProfile::Zero;
        assert_eq!(rate(EnergyDelta(2), &z, 3.0), 0.0);
        assert_eq!(rate(EnergyDelta(0), &z, 3.0), 0.5);
        assert_eq!(rate(EnergyDelta(-4), &z, 3.0), 1.0);
    }

    #[test]
    fn positive_temperature_rates() {
        for t in [0.01, 1.0, 50.0] {
            assert_eq!(rate_at_temperature(EnergyDelta(0), t), 0.5);
        }
        let c = rate(EnergyDelta(2), &TemperatureProfile::constant(1.0).unwrap(), 0.0);
        assert!((c - 0.017_986_209_962_091_56).abs() < 1e-15);
        // saturation far beyond the exponent clamp
        assert_eq!(rate_at_temperature(EnergyDelta(-10_000), 1e-3), 1.0);
        assert!(rate_at_temperature(EnergyDelta(10_000), 1e-3) < 1e-300);
    }

    #[test]
    fn profiles() {
        let log = TemperatureProfile::log_decay(2.0, std::f64::consts::E).unwrap();
        assert!((log.at(0.0) - 2.0).abs() < 1e-12);
        let t = 1e12;
        assert!((log.at(t) * t.ln() - 2.0).abs() < 1e-3);
        assert!(TemperatureProfile::log_decay(2.0, 1.0).is_err());
        assert!(TemperatureProfile::constant(0.0).is_err());

        let table = TemperatureProfile::table(vec![(10.0, 0.5), (0.0, 2.0), (20.0, 0.0)]).unwrap();
        assert_eq!(table.at(0.0), 2.0);
        assert_eq!(table.at(9.999), 2.0);
        assert_eq!(table.at(10.0), 0.5);
        assert_eq!(table.at(25.0), 0.0);

        assert_eq!("zero".parse::<TemperatureProfile>().unwrap(), TemperatureProfile::Zero);
        assert_eq!(
            "log:40".parse::<TemperatureProfile>().unwrap(),
            TemperatureProfile::LogDecay { c: 40.0, t0: std::f64::consts::E }
        );
        assert!("warm".parse::<TemperatureProfile>().is_err());
    }

    #[test]
    fn degenerate_sampling() {
        let w = torus(3);
        let mut rng = stream(1, 0);
        assert!(sample_interactions(&w, 1.0, &mut rng).unwrap().values().iter().all(|&x| x == 1));
        assert!(sample_interactions(&w, 0.0, &mut rng).unwrap().values().iter().all(|&x| x == -1));
        assert!(sample_initial(&w, 1.0, &mut rng).unwrap().values().iter().all(|&x| x == 1));
        assert!(sample_initial(&w, 0.0, &mut rng).unwrap().values().iter().all(|&x| x == -1));
        assert!(sample_interactions(&w, 1.5, &mut rng).is_err());
    }

    #[test]
    fn balanced_couplings_concentrate() {
        // 2·160·160 = 51200 edges per window, two windows' worth of draws.
        let w = torus(80);
        let mut rng = stream(9, 0);
        let mut sum = 0i64;
        let mut n = 0usize;
        for _ in 0..2 {
            let j = sample_interactions(&w, 0.5, &mut rng).unwrap();
            sum += j.values().iter().map(|&x| x as i64).sum::<i64>();
            n += j.len();
        }
        assert!(n >= 100_000);
        let sd = (n as f64).sqrt();
        assert!((sum as f64).abs() < 3.0 * sd, "sum {sum} over {n}");
    }

    #[test]
    fn assignment_files_round_trip() {
        let w = WindowGraph::new(&build_hexagonal(), centered_extent(2, 2), BoundaryMode::Free).unwrap();
        let mut rng = stream(3, 0);
        let s = sample_initial(&w, 0.5, &mut rng).unwrap();
        let j = sample_interactions(&w, 0.5, &mut rng).unwrap();
        assert_eq!(parse_spins(&w, &spins_to_text(&w, &s)).unwrap(), s);
        assert_eq!(parse_couplings(&w, &couplings_to_text(&w, &j)).unwrap(), j);
    }

    #[test]
    fn assignment_files_reject_gaps() {
        let w = torus(2);
        let text = spins_to_text(&w, &SpinState::uniform(w.num_vertices(), 1));
        let partial: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_spins(&w, &partial), Err(Error::IncompleteAssignment(_))));
        assert!(parse_couplings(&w, "coupling 0 0 1 0 +1\n").is_err());
        let all = parse_couplings(&w, "coupling 0 0 1 0 +1\ncoupling 0 0 0 1 -1\ncoupling 0 0 0 -1 +1 0,0\n").unwrap();
        assert_eq!(all.values().iter().filter(|&&x| x == -1).count(), 15);
    }
}
