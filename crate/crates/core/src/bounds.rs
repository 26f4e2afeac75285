//! Inequality validator: evaluates every energy inequality the game relies
//! on for one graph and reports signed slacks with worst-case witnesses.
//!
//! Slacks are oriented so that a bound holds iff `slack >= -tol.core`.

use alloc::vec::Vec;
use core::fmt;

use crate::enumerate;
use crate::game::{self, CoalitionTable};
use crate::graph::{BitIter, Graph, VertexSet};
use crate::spectral::{self, abs, EigConfig, EnergyProfile, Spectrum};
use crate::tol::Tolerances;
use crate::{Error, Result};

pub const MAX_BOUNDS_N: usize = 16;
pub const MAX_EDGE_CUT_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BoundId {
    /// `Σ_{i∈S} E_p(v_i) ≥ w_p(S)` for every coalition.
    SubgraphInequality,
    /// `w_p(H) + w_p(K) ≤ w_p(V)` for complementary `H`, `K`.
    EdgeCut,
    /// `E_p^{1/p} ≥ E_q^{1/q}` for `p < q`.
    SchattenMonotonicity,
    /// `(E_p/n)^{1/p} ≤ (E_q/n)^{1/q}` for `p < q`.
    NormalizedReversal,
    /// `(2m)^{p/2} ≤ E_p` for `p ≤ 2`, reversed for `p > 2`.
    EdgeCountBound,
    /// `2 m^{p/2} ≤ E_p` for `p ≤ 2`, reversed for `p > 2`, bipartite only.
    BipartiteBound,
    /// Both sides of a bipartition carry the same p-energy.
    BipartiteSplitting,
    /// `E_r(v) ≤ E_s(v)^{r/s}` for `r < s`.
    VertexHolder,
    /// `E(v) ≥ deg(v) / Δ`.
    DegreeLowerBound,
    /// `E(v) + E(w) ≥ 2` for every edge.
    AdjacentPair,
    /// The vertex-energy ordering along a path.
    PathOrdering,
}

impl BoundId {
    pub const ALL: [BoundId; 11] = [
        BoundId::SubgraphInequality,
        BoundId::EdgeCut,
        BoundId::SchattenMonotonicity,
        BoundId::NormalizedReversal,
        BoundId::EdgeCountBound,
        BoundId::BipartiteBound,
        BoundId::BipartiteSplitting,
        BoundId::VertexHolder,
        BoundId::DegreeLowerBound,
        BoundId::AdjacentPair,
        BoundId::PathOrdering,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::SubgraphInequality => "subgraph-inequality",
            BoundId::EdgeCut => "edge-cut",
            BoundId::SchattenMonotonicity => "schatten-monotonicity",
            BoundId::NormalizedReversal => "normalized-reversal",
            BoundId::EdgeCountBound => "edge-count-bound",
            BoundId::BipartiteBound => "bipartite-bound",
            BoundId::BipartiteSplitting => "bipartite-splitting",
            BoundId::VertexHolder => "vertex-holder",
            BoundId::DegreeLowerBound => "degree-lower-bound",
            BoundId::AdjacentPair => "adjacent-pair",
            BoundId::PathOrdering => "path-ordering",
        }
    }

    pub fn parse(s: &str) -> Option<BoundId> {
        BoundId::ALL.into_iter().find(|b| b.as_str() == s)
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a bound is tightest.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Witness {
    Coalition(VertexSet),
    /// One side `H` of the bipartition `(H, V \ H)`.
    Partition(VertexSet),
    Vertex(usize),
    Pair(usize, usize),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Coalition(s) => write!(f, "S={s}"),
            Witness::Partition(h) => write!(f, "H={h}"),
            Witness::Vertex(v) => write!(f, "v={v}"),
            Witness::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    Holds,
    Fails,
    Skipped(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub bound: BoundId,
    pub p: Option<f64>,
    /// Second exponent for two-exponent bounds.
    pub q: Option<f64>,
    pub verdict: Verdict,
    /// `None` when skipped.
    pub slack: Option<f64>,
    pub witness: Option<Witness>,
    /// For strict orderings: whether every gap exceeds `10 * tol.core`.
    pub strict: Option<bool>,
}

impl BoundReport {
    fn evaluated(bound: BoundId, p: Option<f64>, q: Option<f64>, slack: f64, witness: Option<Witness>, tol: &Tolerances) -> Self {
        let verdict = if slack >= -tol.core { Verdict::Holds } else { Verdict::Fails };
        BoundReport { bound, p, q, verdict, slack: Some(slack), witness, strict: None }
    }

    fn skipped(bound: BoundId, p: Option<f64>, q: Option<f64>, why: &'static str) -> Self {
        BoundReport { bound, p, q, verdict: Verdict::Skipped(why), slack: None, witness: None, strict: None }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.verdict, Verdict::Skipped(_))
    }
}

/// BFS 2-colouring per component. The lowest vertex of each component goes
/// to the first part.
pub fn is_bipartite(g: &Graph) -> Option<(u64, u64)> {
    let mut first = 0u64;
    let mut second = 0u64;
    for comp in g.components() {
        let start = comp.trailing_zeros() as usize;
        let mut side = [1u64 << start, 0];
        let mut frontier = 1u64 << start;
        let mut level = 0;
        while frontier != 0 {
            let mut next = 0;
            for v in BitIter(frontier) {
                next |= g.neighbors(v);
            }
            level ^= 1;
            if next & side[1 - level] != 0 {
                return None;
            }
            next &= !side[level];
            side[level] |= next;
            frontier = next;
        }
        first |= side[0];
        second |= side[1];
    }
    Some((first, second))
}

/// Spectrum, energy profiles and coalition tables of one graph, shared by
/// the individual bound evaluations.
#[derive(Debug, Clone)]
pub struct GraphAnalysis<'g> {
    pub graph: &'g Graph,
    pub spectrum: Spectrum,
    pub p_grid: Vec<f64>,
    /// One profile per entry of `p_grid`.
    pub profiles: Vec<EnergyProfile>,
    /// p = 1 profile, used by the degree and adjacent-pair bounds.
    pub vertex_energy: EnergyProfile,
    /// One table per entry of `p_grid`.
    pub tables: Vec<CoalitionTable>,
    pub tol: Tolerances,
}

impl<'g> GraphAnalysis<'g> {
    pub fn new(g: &'g Graph, p_grid: &[f64], tol: &Tolerances) -> Result<Self> {
        Self::with_config(g, p_grid, tol, EigConfig::DEFAULT)
    }

    /// As [`GraphAnalysis::new`], with every eigendecomposition (the graph's
    /// and each coalition's) run under `cfg`.
    pub fn with_config(g: &'g Graph, p_grid: &[f64], tol: &Tolerances, cfg: EigConfig) -> Result<Self> {
        if g.n() > MAX_BOUNDS_N {
            return Err(Error::TooLarge { what: "bound validation", n: g.n(), max: MAX_BOUNDS_N });
        }
        let spectrum = spectral::eig_symmetric_with(g, cfg)?;
        let profiles = p_grid
            .iter()
            .map(|&p| EnergyProfile::from_spectrum(&spectrum, p, tol))
            .collect::<Result<Vec<_>>>()?;
        let vertex_energy = EnergyProfile::from_spectrum(&spectrum, 1.0, tol)?;
        let tables = game::build_tables_with(g, p_grid, cfg)?;
        Ok(GraphAnalysis { graph: g, spectrum, p_grid: p_grid.to_vec(), profiles, vertex_energy, tables, tol: *tol })
    }

    fn p_energy(&self, k: usize) -> f64 {
        spectral::schatten_sum(self.spectrum.eigenvalues(), self.p_grid[k])
    }

    fn ordered_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.p_grid.len() {
            for b in 0..self.p_grid.len() {
                if self.p_grid[a] < self.p_grid[b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// (a)
    pub fn subgraph_inequality(&self) -> Vec<BoundReport> {
        self.tables
            .iter()
            .zip(&self.profiles)
            .map(|(t, prof)| {
                let mut worst = f64::INFINITY;
                let mut witness = None;
                for mask in 1..=t.full() {
                    let slack = prof.sum_over(mask as u64) - t.value(mask);
                    if slack < worst {
                        worst = slack;
                        witness = Some(Witness::Coalition(VertexSet::new(mask, t.n()).expect("mask in range")));
                    }
                }
                if witness.is_none() {
                    return BoundReport::skipped(BoundId::SubgraphInequality, Some(t.p()), None, "empty graph");
                }
                BoundReport::evaluated(BoundId::SubgraphInequality, Some(t.p()), None, worst, witness, &self.tol)
            })
            .collect()
    }

    /// (b), over all bipartitions with vertex 0 on the `H` side.
    pub fn edge_cut(&self) -> Vec<BoundReport> {
        let n = self.graph.n();
        self.tables
            .iter()
            .map(|t| {
                let p = Some(t.p());
                if n > MAX_EDGE_CUT_N {
                    return BoundReport::skipped(BoundId::EdgeCut, p, None, "n above edge-cut cap (12)");
                }
                if n < 2 {
                    return BoundReport::skipped(BoundId::EdgeCut, p, None, "fewer than two vertices");
                }
                let full = t.full();
                let mut worst = f64::INFINITY;
                let mut witness = None;
                for h in (1..full).filter(|h| h & 1 == 1) {
                    let slack = t.grand_value() - t.value(h) - t.value(full & !h);
                    if slack < worst {
                        worst = slack;
                        witness = Some(Witness::Partition(VertexSet::new(h, n).expect("mask in range")));
                    }
                }
                BoundReport::evaluated(BoundId::EdgeCut, p, None, worst, witness, &self.tol)
            })
            .collect()
    }

    /// (c)
    pub fn schatten_monotonicity(&self) -> Vec<BoundReport> {
        self.ordered_pairs()
            .into_iter()
            .map(|(a, b)| {
                let (p, q) = (self.p_grid[a], self.p_grid[b]);
                let lhs = libm::pow(self.p_energy(a), 1.0 / p);
                let rhs = libm::pow(self.p_energy(b), 1.0 / q);
                BoundReport::evaluated(BoundId::SchattenMonotonicity, Some(p), Some(q), lhs - rhs, None, &self.tol)
            })
            .collect()
    }

    /// (d)
    pub fn normalized_reversal(&self) -> Vec<BoundReport> {
        let n = self.graph.n() as f64;
        self.ordered_pairs()
            .into_iter()
            .map(|(a, b)| {
                let (p, q) = (self.p_grid[a], self.p_grid[b]);
                if n == 0.0 {
                    return BoundReport::skipped(BoundId::NormalizedReversal, Some(p), Some(q), "empty graph");
                }
                let lhs = libm::pow(self.p_energy(a) / n, 1.0 / p);
                let rhs = libm::pow(self.p_energy(b) / n, 1.0 / q);
                BoundReport::evaluated(BoundId::NormalizedReversal, Some(p), Some(q), rhs - lhs, None, &self.tol)
            })
            .collect()
    }

    /// (e)
    pub fn edge_count_bound(&self) -> Vec<BoundReport> {
        let two_m = 2.0 * self.graph.m() as f64;
        (0..self.p_grid.len())
            .map(|k| {
                let p = self.p_grid[k];
                let reference = libm::pow(two_m, p / 2.0);
                let e = self.p_energy(k);
                let slack = if p <= 2.0 { e - reference } else { reference - e };
                BoundReport::evaluated(BoundId::EdgeCountBound, Some(p), None, slack, None, &self.tol)
            })
            .collect()
    }

    /// (f) and (g).
    pub fn bipartite(&self) -> (Vec<BoundReport>, Vec<BoundReport>) {
        let parts = is_bipartite(self.graph);
        let m = self.graph.m() as f64;
        let mut bound = Vec::new();
        let mut split = Vec::new();
        for (k, prof) in self.profiles.iter().enumerate() {
            let p = self.p_grid[k];
            let Some((v, w)) = parts else {
                bound.push(BoundReport::skipped(BoundId::BipartiteBound, Some(p), None, "not bipartite"));
                split.push(BoundReport::skipped(BoundId::BipartiteSplitting, Some(p), None, "not bipartite"));
                continue;
            };
            let reference = 2.0 * libm::pow(m, p / 2.0);
            let e = self.p_energy(k);
            let slack = if p <= 2.0 { e - reference } else { reference - e };
            bound.push(BoundReport::evaluated(BoundId::BipartiteBound, Some(p), None, slack, None, &self.tol));
            let gap = abs(prof.sum_over(v) - prof.sum_over(w));
            split.push(BoundReport::evaluated(BoundId::BipartiteSplitting, Some(p), None, -gap, None, &self.tol));
        }
        (bound, split)
    }

    /// (h), over the grid plus `s = 2` so the degree form always appears.
    pub fn vertex_holder(&self) -> Result<Vec<BoundReport>> {
        let mut exps = self.p_grid.clone();
        exps.push(2.0);
        exps.sort_by(f64::total_cmp);
        exps.dedup();
        let profs = exps
            .iter()
            .map(|&p| EnergyProfile::from_spectrum(&self.spectrum, p, &self.tol))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for a in 0..exps.len() {
            for b in a + 1..exps.len() {
                let (r, s) = (exps[a], exps[b]);
                let mut worst = f64::INFINITY;
                let mut witness = None;
                for v in 0..self.graph.n() {
                    let slack = libm::pow(profs[b].per_vertex[v], r / s) - profs[a].per_vertex[v];
                    if slack < worst {
                        worst = slack;
                        witness = Some(Witness::Vertex(v));
                    }
                }
                out.push(if witness.is_none() {
                    BoundReport::skipped(BoundId::VertexHolder, Some(r), Some(s), "empty graph")
                } else {
                    BoundReport::evaluated(BoundId::VertexHolder, Some(r), Some(s), worst, witness, &self.tol)
                });
            }
        }
        Ok(out)
    }

    /// (i), for p = 1.
    pub fn degree_lower_bound(&self) -> BoundReport {
        let delta = self.graph.max_degree();
        if delta == 0 {
            return BoundReport::skipped(BoundId::DegreeLowerBound, Some(1.0), None, "no edges");
        }
        let mut worst = f64::INFINITY;
        let mut witness = None;
        for v in 0..self.graph.n() {
            let slack = self.vertex_energy.per_vertex[v] - self.graph.degree(v) as f64 / delta as f64;
            if slack < worst {
                worst = slack;
                witness = Some(Witness::Vertex(v));
            }
        }
        BoundReport::evaluated(BoundId::DegreeLowerBound, Some(1.0), None, worst, witness, &self.tol)
    }

    /// (j), for p = 1.
    pub fn adjacent_pair(&self) -> BoundReport {
        let e = &self.vertex_energy.per_vertex;
        let mut worst = f64::INFINITY;
        let mut witness = None;
        for (v, w) in self.graph.edges() {
            let slack = e[v] + e[w] - 2.0;
            if slack < worst {
                worst = slack;
                witness = Some(Witness::Pair(v, w));
            }
        }
        if witness.is_none() {
            return BoundReport::skipped(BoundId::AdjacentPair, Some(1.0), None, "no edges");
        }
        BoundReport::evaluated(BoundId::AdjacentPair, Some(1.0), None, worst, witness, &self.tol)
    }

    /// Every bound, in the order (a) to (j).
    pub fn run_all(&self) -> Result<Vec<BoundReport>> {
        let mut out = self.subgraph_inequality();
        out.extend(self.edge_cut());
        out.extend(self.schatten_monotonicity());
        out.extend(self.normalized_reversal());
        out.extend(self.edge_count_bound());
        let (bound, split) = self.bipartite();
        out.extend(bound);
        out.extend(split);
        out.extend(self.vertex_holder()?);
        out.push(self.degree_lower_bound());
        out.push(self.adjacent_pair());
        Ok(out)
    }
}

/// Rejects exponents below 1 and non-finite ones.
pub fn validate_p_grid(p_grid: &[f64]) -> Result<()> {
    match p_grid.iter().find(|&&p| !(p >= 1.0 && p.is_finite())) {
        Some(&p) => Err(Error::InvalidExponent { p, min: 1.0 }),
        None => Ok(()),
    }
}

/// Evaluates every applicable bound on `g` for each exponent in `p_grid`.
pub fn run_all_bounds(g: &Graph, p_grid: &[f64], tol: &Tolerances) -> Result<Vec<BoundReport>> {
    validate_p_grid(p_grid)?;
    GraphAnalysis::new(g, p_grid, tol)?.run_all()
}

/// The vertex-energy ordering on the path `v_1 - v_2 - ... - v_n`
/// (0-based here: `v_1` is vertex 0).
///
/// With `K = ⌊n/4⌋`, the chain
/// `E(v_1) < E(v_3) < … < E(v_{2K-1}) < E(v_{2K}) < E(v_{2K-2}) < … < E(v_2)`
/// must hold, the minimum sits at the two ends and the maximum at the
/// second and second-to-last vertices. Checked non-strictly at `tol.core`;
/// `strict` records whether every gap exceeds `10 * tol.core`.
pub fn path_ordering(n: usize, tol: &Tolerances) -> Result<BoundReport> {
    if n < 3 {
        return Ok(BoundReport::skipped(BoundId::PathOrdering, Some(1.0), None, "path needs at least 3 vertices"));
    }
    let g = crate::graph::path(n)?;
    let e = spectral::vertex_energies(&g, 1.0)?.per_vertex;

    // (smaller, larger) pairs that must be strictly ordered
    let mut gaps: Vec<(usize, usize)> = Vec::new();
    let k_top = n / 4;
    if k_top >= 1 {
        let mut chain: Vec<usize> = (0..k_top).map(|k| 2 * k).collect();
        chain.extend((0..k_top).rev().map(|k| 2 * k + 1));
        gaps.extend(chain.windows(2).map(|w| (w[0], w[1])));
    }
    let (first, last) = (0, n - 1);
    let (second, penultimate) = (1, n - 2);
    for v in 0..n {
        if v != first && v != last {
            gaps.push((first, v));
        }
        if v != second && v != penultimate {
            gaps.push((v, second));
        }
    }

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (lo, hi) in gaps {
        let gap = e[hi] - e[lo];
        if gap < worst {
            worst = gap;
            witness = Some(Witness::Pair(lo, hi));
        }
    }
    let mut report = BoundReport::evaluated(BoundId::PathOrdering, Some(1.0), None, worst, witness, tol);
    report.strict = Some(worst > 10.0 * tol.core);
    Ok(report)
}

/// Extremes of `E_p` over all labeled trees on `n` vertices, against the
/// star and the path.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TreeExtremes {
    pub n: usize,
    pub p: f64,
    pub trees: u64,
    pub star: f64,
    pub path: f64,
    pub min: f64,
    pub max: f64,
    /// Prüfer index of a minimising / maximising tree.
    pub argmin: u64,
    pub argmax: u64,
    /// `min - expected_min`; nonnegative up to tolerance when the lower
    /// extreme is the expected one (star for p ≤ 2, path for p > 2).
    pub lower_margin: f64,
    /// `expected_max - max`.
    pub upper_margin: f64,
    pub holds: bool,
}

pub fn tree_extremes(n: usize, p: f64, tol: &Tolerances) -> Result<TreeExtremes> {
    validate_p_grid(&[p])?;
    let star = spectral::p_energy(&crate::graph::star(n)?, p)?;
    let path = spectral::p_energy(&crate::graph::path(n)?, p)?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let (mut argmin, mut argmax) = (0, 0);
    let mut trees = 0;
    for (idx, t) in enumerate::labeled_trees(n)? {
        let e = spectral::p_energy(&t, p)?;
        trees += 1;
        if e < min {
            min = e;
            argmin = idx;
        }
        if e > max {
            max = e;
            argmax = idx;
        }
    }
    let (low, high) = if p <= 2.0 { (star, path) } else { (path, star) };
    let lower_margin = min - low;
    let upper_margin = high - max;
    Ok(TreeExtremes {
        n,
        p,
        trees,
        star,
        path,
        min,
        max,
        argmin,
        argmax,
        lower_margin,
        upper_margin,
        holds: lower_margin >= -tol.core && upper_margin >= -tol.core,
    })
}
