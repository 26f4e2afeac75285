//! The energy game: coalition tables, Shapley values, core certificates and
//! superadditivity/convexity audits.
//!
//! A coalition is a bitmask over the players `0..n`; `values[mask]` is the
//! p-energy of the subgraph induced by `mask`.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::graph::{BitIter, Graph, VertexSet, MAX_PLAYERS};
use crate::rng::{next_permutation, PermutationSampler};
use crate::spectral::{self, abs, EigConfig, EnergyProfile};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Hard ceiling for building a full coalition table.
pub const MAX_TABLE_N: usize = 20;
/// Above this a table build is slow enough that callers should warn.
pub const WARN_TABLE_N: usize = 16;
pub const MAX_SUPERADDITIVITY_N: usize = 16;
pub const MAX_CONVEXITY_N: usize = 13;
/// Largest game for which every permutation is enumerated in exhaustive mode.
pub const MAX_EXHAUSTIVE_N: usize = 8;

fn cap(what: &'static str, n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::TooLarge { what, n, max })
    } else {
        Ok(())
    }
}

/// Characteristic function `w_p(S) = E_p(I(S))` for every coalition `S`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoalitionTable {
    n: usize,
    p: f64,
    values: Vec<f64>,
}

impl CoalitionTable {
    /// Wraps raw values, e.g. for hand-built games. Only the length is
    /// checked; use [`CoalitionTable::invariant_violation`] for the rest.
    pub fn from_values(n: usize, p: f64, values: Vec<f64>) -> Result<Self> {
        cap("coalition table", n, MAX_TABLE_N)?;
        if values.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: values.len() });
        }
        Ok(CoalitionTable { n, p, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn full(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    #[inline]
    pub fn value(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `w(N)`.
    pub fn grand_value(&self) -> f64 {
        self.value(self.full())
    }

    /// First mask breaking `w(∅) = 0`, `w({i}) = 0` or `w ≥ 0`.
    pub fn invariant_violation(&self) -> Option<u32> {
        (0..self.values.len() as u32).find(|&mask| {
            let v = self.value(mask);
            if mask.count_ones() <= 1 {
                v != 0.0
            } else {
                !(v >= 0.0)
            }
        })
    }
}

/// `w_p(S)` for one coalition, computed from scratch.
pub fn coalition_value(g: &Graph, mask: u64, p: f64, cfg: EigConfig) -> Result<f64> {
    let sub = g.induced_by_mask(mask);
    if sub.m() == 0 {
        return Ok(0.0);
    }
    Ok(spectral::schatten_sum(&spectral::eigenvalues(&sub, cfg)?, p))
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent { p, min: 1.0 })
    }
}

/// Builds the p-energy game on `g`.
pub fn build_table(g: &Graph, p: f64) -> Result<CoalitionTable> {
    Ok(build_tables_with(g, &[p], EigConfig::DEFAULT)?.pop().expect("one table"))
}

/// One table per exponent in `ps`, sharing one eigenvalue computation per
/// coalition.
pub fn build_tables(g: &Graph, ps: &[f64]) -> Result<Vec<CoalitionTable>> {
    build_tables_with(g, ps, EigConfig::DEFAULT)
}

pub fn build_tables_with(g: &Graph, ps: &[f64], cfg: EigConfig) -> Result<Vec<CoalitionTable>> {
    let n = g.n();
    cap("coalition table", n, MAX_TABLE_N)?;
    for &p in ps {
        check_p(p)?;
    }
    let size = 1usize << n;
    let mut tables: Vec<Vec<f64>> = ps.iter().map(|_| alloc::vec![0.0; size]).collect();
    for mask in 0..size {
        if (mask as u32).count_ones() < 2 {
            continue;
        }
        let sub = g.induced_by_mask(mask as u64);
        if sub.m() == 0 {
            continue;
        }
        let ev = spectral::eigenvalues(&sub, cfg)?;
        for (t, &p) in tables.iter_mut().zip(ps) {
            t[mask] = spectral::schatten_sum(&ev, p);
        }
    }
    Ok(tables
        .into_iter()
        .zip(ps)
        .map(|(values, &p)| CoalitionTable { n, p, values })
        .collect())
}

/// A payoff vector `x`, with `x(S) = Σ_{i∈S} x_i`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct PayoffVector(pub Vec<f64>);

impl PayoffVector {
    pub fn sum_over(&self, mask: u32) -> f64 {
        BitIter(mask as u64).map(|i| self.0[i]).sum()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `x(S)` for every mask, by one pass over the lattice.
    fn coalition_sums(&self) -> Vec<f64> {
        let n = self.0.len();
        let mut sums = alloc::vec![0.0; 1 << n];
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + self.0[low];
        }
        sums
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &PayoffVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| abs(a - b))
            .fold(0.0, f64::max)
    }
}

impl Deref for PayoffVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for PayoffVector {
    fn from(v: Vec<f64>) -> Self {
        PayoffVector(v)
    }
}

impl From<&EnergyProfile> for PayoffVector {
    fn from(e: &EnergyProfile) -> Self {
        PayoffVector(e.per_vertex.clone())
    }
}

/// `|S|! (n-|S|-1)! / n!` for `|S| = 0..n`.
fn shapley_weights(n: usize) -> Vec<f64> {
    // w(s) = 1 / (n * C(n-1, s)), built without large factorials.
    let mut binom = 1.0f64;
    let mut out = Vec::with_capacity(n);
    for s in 0..n {
        out.push(1.0 / (n as f64 * binom));
        binom = binom * (n - 1 - s) as f64 / (s + 1) as f64;
    }
    out
}

/// Exact Shapley value from the subset formula.
pub fn shapley_exact(t: &CoalitionTable) -> PayoffVector {
    let n = t.n;
    let weights = shapley_weights(n);
    let mut phi = alloc::vec![0.0; n];
    for (i, phi_i) in phi.iter_mut().enumerate() {
        let bit = 1u32 << i;
        let mut acc = 0.0;
        for s in 0..1u32 << n {
            if s & bit != 0 {
                continue;
            }
            acc += weights[s.count_ones() as usize] * (t.value(s | bit) - t.value(s));
        }
        *phi_i = acc;
    }
    PayoffVector(phi)
}

/// Permutation-sampling estimate of the Shapley value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MonteCarloShapley {
    pub estimate: PayoffVector,
    /// Per-player standard error of the mean; 0 in exhaustive mode, NaN
    /// with a single sample.
    pub std_err: Vec<f64>,
    /// Number of permutations averaged.
    pub samples: u64,
    pub seed: u64,
    pub exhaustive: bool,
}

/// Averages marginal contributions over `samples` seeded random orderings.
/// `samples = 0` enumerates all `n!` orderings instead (n ≤ 8).
pub fn shapley_monte_carlo(t: &CoalitionTable, samples: u64, seed: u64) -> Result<MonteCarloShapley> {
    let n = t.n;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut mean = alloc::vec![0.0; n];
    let mut m2 = alloc::vec![0.0; n];
    let mut count = 0u64;

    let mut accumulate = |perm: &[usize], count: &mut u64| {
        *count += 1;
        let k = *count as f64;
        let mut mask = 0u32;
        for &i in perm {
            let next = mask | 1 << i;
            let x = t.value(next) - t.value(mask);
            mask = next;
            let delta = x - mean[i];
            mean[i] += delta / k;
            m2[i] += delta * (x - mean[i]);
        }
    };

    let exhaustive = samples == 0;
    if exhaustive {
        cap("exhaustive permutation mode", n, MAX_EXHAUSTIVE_N)?;
        loop {
            accumulate(&perm, &mut count);
            if !next_permutation(&mut perm) {
                break;
            }
        }
    } else {
        let mut sampler = PermutationSampler::new(seed);
        for _ in 0..samples {
            sampler.shuffle_into(&mut perm);
            accumulate(&perm, &mut count);
        }
    }

    let std_err = if exhaustive {
        alloc::vec![0.0; n]
    } else if count < 2 {
        alloc::vec![f64::NAN; n]
    } else {
        let c = count as f64;
        m2.iter().map(|v| libm::sqrt(v / (c - 1.0) / c)).collect()
    };
    Ok(MonteCarloShapley { estimate: PayoffVector(mean), std_err, samples: count, seed, exhaustive })
}

/// Result of an exhaustive core-membership scan.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoreCertificate {
    pub is_member: bool,
    /// `min x(S) - w(S)` over nonempty proper coalitions; `+∞` when there
    /// are none (n ≤ 1).
    pub worst_slack: f64,
    pub worst_coalition: Option<VertexSet>,
    /// `|x(N) - w(N)|`
    pub efficiency_gap: f64,
}

fn check_len(t: &CoalitionTable, x: &PayoffVector) -> Result<()> {
    if x.len() != t.n {
        Err(Error::LengthMismatch { expected: t.n, got: x.len() })
    } else {
        Ok(())
    }
}

/// Scans every coalition for `x(S) ≥ w(S)` and checks `x(N) = w(N)`.
pub fn check_core(t: &CoalitionTable, x: &PayoffVector, tol: &Tolerances) -> Result<CoreCertificate> {
    check_len(t, x)?;
    let sums = x.coalition_sums();
    let full = t.full();
    let mut worst_slack = f64::INFINITY;
    let mut worst_coalition = None;
    for mask in 1..full {
        let slack = sums[mask as usize] - t.value(mask);
        if slack < worst_slack {
            worst_slack = slack;
            worst_coalition = Some(VertexSet::from_bits_unchecked(mask));
        }
    }
    let efficiency_gap = abs(sums[full as usize] - t.grand_value());
    Ok(CoreCertificate {
        is_member: worst_slack >= -tol.core && efficiency_gap <= tol.core,
        worst_slack,
        worst_coalition,
        efficiency_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ImputationCheck {
    pub is_imputation: bool,
    pub efficiency_gap: f64,
    /// `min_i x_i - w({i})`
    pub worst_individual_slack: f64,
    pub worst_player: Option<usize>,
}

/// Individual rationality plus efficiency.
pub fn check_imputation(t: &CoalitionTable, x: &PayoffVector, tol: &Tolerances) -> Result<ImputationCheck> {
    check_len(t, x)?;
    let mut worst = f64::INFINITY;
    let mut worst_player = None;
    for (i, xi) in x.iter().enumerate() {
        let slack = xi - t.value(1 << i);
        if slack < worst {
            worst = slack;
            worst_player = Some(i);
        }
    }
    let efficiency_gap = abs(x.total() - t.grand_value());
    Ok(ImputationCheck {
        is_imputation: worst >= -tol.core && efficiency_gap <= tol.core,
        efficiency_gap,
        worst_individual_slack: worst,
        worst_player,
    })
}

/// Outcome of a pairwise audit. `witness` is the pair with the smallest
/// slack, reported with the smaller mask first.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuditOutcome {
    pub passed: bool,
    pub pairs_checked: u64,
    pub violations: u64,
    pub worst_slack: f64,
    pub witness: Option<(VertexSet, VertexSet)>,
}

struct Tracker {
    tol: f64,
    pairs: u64,
    violations: u64,
    worst: f64,
    witness: Option<(u32, u32)>,
}

impl Tracker {
    fn new(tol: f64) -> Self {
        Tracker { tol, pairs: 0, violations: 0, worst: f64::INFINITY, witness: None }
    }

    #[inline]
    fn record(&mut self, s: u32, t: u32, slack: f64) {
        self.pairs += 1;
        if slack < -self.tol {
            self.violations += 1;
        }
        if slack < self.worst {
            self.worst = slack;
            self.witness = Some((s.min(t), s.max(t)));
        }
    }

    fn finish(self) -> AuditOutcome {
        AuditOutcome {
            passed: self.violations == 0,
            pairs_checked: self.pairs,
            violations: self.violations,
            worst_slack: self.worst,
            witness: self
                .witness
                .map(|(s, t)| (VertexSet::from_bits_unchecked(s), VertexSet::from_bits_unchecked(t))),
        }
    }
}

/// Checks `w(S ∪ T) ≥ w(S) + w(T)` for every pair of disjoint nonempty
/// coalitions, iterating `T` over submasks of the complement of `S`.
pub fn audit_superadditivity(t: &CoalitionTable, tol: &Tolerances) -> Result<AuditOutcome> {
    cap("superadditivity audit", t.n, MAX_SUPERADDITIVITY_N)?;
    let full = t.full();
    let mut tr = Tracker::new(tol.core);
    for s in 1..=full {
        let ws = t.value(s);
        let rest = full & !s;
        let mut u = rest;
        while u != 0 {
            tr.record(s, u, t.value(s | u) - ws - t.value(u));
            u = (u - 1) & rest;
        }
    }
    Ok(tr.finish())
}

/// Checks `w(S ∪ T) + w(S ∩ T) ≥ w(S) + w(T)` for every ordered pair,
/// enumerated as: union `U`, then `S ⊆ U`, then `T = (U \ S) ∪ R` with
/// `R ⊆ S`.
pub fn audit_convexity(t: &CoalitionTable, tol: &Tolerances) -> Result<AuditOutcome> {
    cap("convexity audit", t.n, MAX_CONVEXITY_N)?;
    let full = t.full();
    let mut tr = Tracker::new(tol.core);
    for u in 0..=full {
        let wu = t.value(u);
        let mut s = u;
        loop {
            let ws = t.value(s);
            let base = u & !s;
            let mut r = s;
            loop {
                let tt = base | r;
                tr.record(s, tt, wu + t.value(s & tt) - ws - t.value(tt));
                if r == 0 {
                    break;
                }
                r = (r - 1) & s;
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & u;
        }
    }
    Ok(tr.finish())
}

/// Both sides of the marginal-contribution inequality
/// `w(S) - w(S \ {i}) ≥ E_{I(S)}(i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MarginalCheck {
    pub marginal: f64,
    /// p-energy of `i` inside the subgraph induced by `S`.
    pub vertex_energy: f64,
    pub holds: bool,
}

pub fn marginal_contribution_check(
    g: &Graph,
    p: f64,
    s: VertexSet,
    i: usize,
    tol: &Tolerances,
) -> Result<MarginalCheck> {
    check_p(p)?;
    let sub = g.induced(s)?;
    let local = sub.labels.iter().position(|&v| v == i).ok_or(Error::NotInCoalition(i))?;
    let mask = s.bits() as u64;
    let with = coalition_value(g, mask, p, EigConfig::DEFAULT)?;
    let without = coalition_value(g, mask & !(1 << i), p, EigConfig::DEFAULT)?;
    let profile = EnergyProfile::from_spectrum(&spectral::eig_symmetric(&sub.graph)?, p, tol)?;
    let marginal = with - without;
    let vertex_energy = profile.per_vertex[local];
    Ok(MarginalCheck { marginal, vertex_energy, holds: marginal - vertex_energy >= -tol.core })
}

/// Null players and symmetry classes of the energy game on a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PlayerClasses {
    /// `null[v]` iff `v` is isolated.
    pub null: Vec<bool>,
    /// Vertices grouped by equal open neighbourhood, each class ascending,
    /// classes ordered by smallest member.
    pub symmetry_classes: Vec<Vec<usize>>,
}

pub fn classify_players(g: &Graph) -> PlayerClasses {
    let n = g.n();
    let null = (0..n).map(|v| g.is_isolated(v)).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        match classes.iter_mut().find(|c| g.neighbors(c[0]) == g.neighbors(v)) {
            Some(c) => c.push(v),
            None => classes.push(alloc::vec![v]),
        }
    }
    PlayerClasses { null, symmetry_classes: classes }
}

/// Everything computed for one game.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GameSolution {
    pub p: f64,
    pub shapley: PayoffVector,
    pub vertex_energy_payoff: PayoffVector,
    pub superadditivity: Option<AuditOutcome>,
    pub convexity: Option<AuditOutcome>,
    pub shapley_core: CoreCertificate,
    pub vertex_energy_core: CoreCertificate,
}

/// Builds the table and runs every game-level computation that fits the
/// size caps; audits above their cap come back as `None`.
pub fn solve(g: &Graph, p: f64, tol: &Tolerances) -> Result<(CoalitionTable, GameSolution)> {
    let table = build_table(g, p)?;
    let profile = EnergyProfile::from_spectrum(&spectral::eig_symmetric(g)?, p, tol)?;
    let shapley = shapley_exact(&table);
    let vertex_energy_payoff = PayoffVector::from(&profile);
    let solution = GameSolution {
        p,
        superadditivity: audit_superadditivity(&table, tol).ok(),
        convexity: audit_convexity(&table, tol).ok(),
        shapley_core: check_core(&table, &shapley, tol)?,
        vertex_energy_core: check_core(&table, &vertex_energy_payoff, tol)?,
        shapley,
        vertex_energy_payoff,
    };
    Ok((table, solution))
}

const _: () = assert!(MAX_TABLE_N <= MAX_PLAYERS);
