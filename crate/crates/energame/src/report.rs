//! `report`: spectral and game-theoretic summary of one graph.

use std::fmt::Write as _;

use energame_core::game::{
    build_tables, check_core, classify_players, shapley_exact, shapley_monte_carlo, CoalitionTable, CoreCertificate,
    PayoffVector, PlayerClasses, MAX_EXHAUSTIVE_N, MAX_TABLE_N, WARN_TABLE_N,
};
use energame_core::graph::{BitIter, Graph};
use energame_core::spectral::{eig_symmetric, schatten_sum, EnergyProfile};
use energame_core::Tolerances;
use serde::Serialize;

use crate::error::CliError;
use crate::format::encode_graph6;
use crate::shapley::{Mode, ShapleyVector};

/// Above this size the Shapley value is estimated rather than computed.
pub const EXACT_SHAPLEY_MAX_N: usize = 12;
/// Core inequalities are listed in full up to this size.
pub const CORE_LISTING_MAX_N: usize = 6;

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub p_grid: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PEnergy {
    pub p: f64,
    pub total: f64,
    pub per_vertex: Vec<f64>,
    /// Vertices whose diagonal entry came out slightly negative and was
    /// clamped to zero.
    pub clamped: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameReport {
    pub p: f64,
    pub grand_value: f64,
    pub shapley: ShapleyVector,
    pub shapley_core: CoreCertificate,
    pub vertex_energy_core: CoreCertificate,
    /// The inequalities defining the core, one per coalition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core_inequalities: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub n: usize,
    pub m: usize,
    pub graph6: String,
    pub degrees: Vec<usize>,
    /// Adjacency eigenvalues, descending.
    pub spectrum: Vec<f64>,
    pub energy: f64,
    /// Diagonal of `|A|`.
    pub vertex_energy: Vec<f64>,
    pub p_energies: Vec<PEnergy>,
    pub players: PlayerClasses,
    pub games: Vec<GameReport>,
    pub notices: Vec<String>,
}

fn coalition_sum(mask: u32) -> String {
    BitIter(mask as u64).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" + ")
}

/// `x(S) >= w(S)` for every nonempty proper coalition, then efficiency.
pub fn core_inequalities(t: &CoalitionTable) -> Vec<String> {
    let mut out: Vec<String> = (1..t.full()).map(|s| format!("{} >= {:.10}", coalition_sum(s), t.value(s))).collect();
    out.push(format!("{} = {:.10}", coalition_sum(t.full()), t.grand_value()));
    out
}

pub fn run(g: &Graph, opts: &ReportOptions, tol: &Tolerances) -> Result<Report, CliError> {
    energame_core::bounds::validate_p_grid(&opts.p_grid)?;
    let n = g.n();
    let spectrum = eig_symmetric(g)?;
    let mut p_energies = Vec::new();
    for &p in &opts.p_grid {
        let prof = EnergyProfile::from_spectrum(&spectrum, p, tol)?;
        p_energies.push(PEnergy { p, total: prof.total, per_vertex: prof.per_vertex, clamped: prof.flagged });
    }
    let vertex_energy = EnergyProfile::from_spectrum(&spectrum, 1.0, tol)?.per_vertex;

    let mut notices = Vec::new();
    let mut games = Vec::new();
    if n > MAX_TABLE_N {
        notices.push(format!(
            "n = {n} exceeds the coalition-table cap of {MAX_TABLE_N}; game quantities omitted (spectral-only report)"
        ));
    } else {
        if n > WARN_TABLE_N {
            notices.push(format!("n = {n}: building 2^{n} coalition values, this may take a while"));
        }
        if n > EXACT_SHAPLEY_MAX_N {
            if opts.samples == 0 && n > MAX_EXHAUSTIVE_N {
                return Err(CliError::Usage(format!(
                    "n = {n} needs a Monte Carlo Shapley estimate; --samples must be positive"
                )));
            }
            notices.push(format!(
                "n = {n} > {EXACT_SHAPLEY_MAX_N}: Shapley value estimated from {} sampled orderings, seed {}",
                opts.samples, opts.seed
            ));
        }
        let tables = build_tables(g, &opts.p_grid)?;
        for (t, pe) in tables.iter().zip(&p_energies) {
            let shapley = if n <= EXACT_SHAPLEY_MAX_N {
                ShapleyVector {
                    n,
                    p: t.p(),
                    mode: Mode::Exact,
                    values: shapley_exact(t).0,
                    std_err: None,
                    samples: None,
                    seed: None,
                    exhaustive: None,
                }
            } else {
                let mc = shapley_monte_carlo(t, opts.samples, opts.seed)?;
                ShapleyVector {
                    n,
                    p: t.p(),
                    mode: Mode::MonteCarlo,
                    values: mc.estimate.0,
                    std_err: Some(mc.std_err),
                    samples: Some(mc.samples),
                    seed: Some(mc.seed),
                    exhaustive: Some(mc.exhaustive),
                }
            };
            let phi = PayoffVector(shapley.values.clone());
            let ve = PayoffVector(pe.per_vertex.clone());
            games.push(GameReport {
                p: t.p(),
                grand_value: t.grand_value(),
                shapley_core: check_core(t, &phi, tol)?,
                vertex_energy_core: check_core(t, &ve, tol)?,
                shapley,
                core_inequalities: (1..=CORE_LISTING_MAX_N).contains(&n).then(|| core_inequalities(t)),
            });
        }
    }

    Ok(Report {
        n,
        m: g.m(),
        graph6: encode_graph6(g),
        degrees: g.degrees(),
        energy: schatten_sum(spectrum.eigenvalues(), 1.0),
        spectrum: spectrum.eigenvalues().to_vec(),
        vertex_energy,
        p_energies,
        players: classify_players(g),
        games,
        notices,
    })
}

#[derive(Serialize)]
struct Row {
    p: f64,
    vertex: usize,
    degree: usize,
    vertex_energy: f64,
    shapley: String,
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(", ")
}

fn fmt_core(c: &CoreCertificate) -> String {
    let verdict = if c.is_member { "in core" } else { "NOT in core" };
    match c.worst_coalition {
        Some(s) => format!("{verdict}; tightest coalition {s} with slack {:.3e}", c.worst_slack),
        None => verdict.to_string(),
    }
}

impl Report {
    pub fn csv_rows(&self) -> Vec<impl Serialize> {
        let mut rows = Vec::new();
        for (k, pe) in self.p_energies.iter().enumerate() {
            for v in 0..self.n {
                rows.push(Row {
                    p: pe.p,
                    vertex: v,
                    degree: self.degrees[v],
                    vertex_energy: pe.per_vertex[v],
                    shapley: crate::doc::opt_num(self.games.get(k).map(|g| g.shapley.values[v])),
                });
            }
        }
        rows
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        writeln!(o, "graph {} (n = {}, m = {})", self.graph6, self.n, self.m).unwrap();
        writeln!(o, "degrees: {:?}", self.degrees).unwrap();
        writeln!(o, "spectrum: {}", fmt_list(&self.spectrum)).unwrap();
        writeln!(o, "energy: {:.10}", self.energy).unwrap();
        writeln!(o, "vertex energies: {}", fmt_list(&self.vertex_energy)).unwrap();
        for pe in &self.p_energies {
            writeln!(o, "p = {}: E_p = {:.10}; per vertex {}", pe.p, pe.total, fmt_list(&pe.per_vertex)).unwrap();
        }
        let nulls: Vec<usize> = (0..self.n).filter(|&v| self.players.null[v]).collect();
        if !nulls.is_empty() {
            writeln!(o, "null players: {nulls:?}").unwrap();
        }
        let sym: Vec<_> = self.players.symmetry_classes.iter().filter(|c| c.len() > 1).collect();
        if !sym.is_empty() {
            writeln!(o, "symmetric players: {sym:?}").unwrap();
        }
        for g in &self.games {
            writeln!(o, "\ngame p = {} (w(N) = {:.10})", g.p, g.grand_value).unwrap();
            let how = match g.shapley.mode {
                Mode::Exact => String::new(),
                Mode::MonteCarlo => format!(" (estimated, seed {})", g.shapley.seed.unwrap_or(0)),
            };
            writeln!(o, "  shapley{how}: {}", fmt_list(&g.shapley.values)).unwrap();
            writeln!(o, "  shapley value: {}", fmt_core(&g.shapley_core)).unwrap();
            writeln!(o, "  vertex energies: {}", fmt_core(&g.vertex_energy_core)).unwrap();
            if let Some(ineqs) = &g.core_inequalities {
                writeln!(o, "  core:").unwrap();
                for line in ineqs {
                    writeln!(o, "    {line}").unwrap();
                }
            }
        }
        for n in &self.notices {
            writeln!(o, "note: {n}").unwrap();
        }
        o
    }
}
