//! `audit`: every bound and game-level check on one graph.

use std::fmt::Write as _;

use energame_core::bounds::{BoundId, Verdict};
use energame_core::game::classify_players;
use energame_core::graph::Graph;
use energame_core::spectral::{vertex_energies, EigConfig};
use energame_core::Tolerances;
use serde::Serialize;

use crate::checks::{evaluate, reverify, Check, CheckClass, Outcome};
use crate::error::{CliError, ExitCode};
use crate::format::encode_graph6;

#[derive(Debug, Clone, Serialize)]
pub struct AuditResult {
    pub n: usize,
    pub m: usize,
    pub graph6: String,
    pub p_grid: Vec<f64>,
    pub outcomes: Vec<Outcome>,
    /// `check (p): reason` for every skipped outcome.
    pub skipped: Vec<String>,
    pub null_players: Vec<usize>,
    pub symmetry_classes: Vec<Vec<usize>>,
    /// p = 1 vertex energies.
    pub vertex_energy: Vec<f64>,
    pub guaranteed_failures: usize,
    pub conjecture_counterexamples: usize,
    pub exit_code: i32,
}

pub fn audit_checks() -> Vec<Check> {
    let mut out = vec![Check::Superadditivity, Check::Convexity, Check::VertexCore, Check::ShapleyCore];
    out.extend(BoundId::ALL.map(Check::Bound));
    out
}

fn label(o: &Outcome) -> String {
    match (o.p, o.q) {
        (Some(p), Some(q)) => format!("{} (p={p}, q={q})", o.check),
        (Some(p), None) => format!("{} (p={p})", o.check),
        _ => o.check.to_string(),
    }
}

pub fn run(g: &Graph, p_grid: &[f64], tol: &Tolerances) -> Result<AuditResult, CliError> {
    energame_core::bounds::validate_p_grid(p_grid)?;
    let mut outcomes = evaluate(g, p_grid, &audit_checks(), tol, EigConfig::DEFAULT)?;
    reverify(g, p_grid, &mut outcomes, tol)?;

    let confirmed = |class| outcomes.iter().filter(|o| o.class == class && o.confirmed_failure()).count();
    let guaranteed_failures = confirmed(CheckClass::Guaranteed);
    let conjecture_counterexamples = confirmed(CheckClass::Evidence);
    let exit = if guaranteed_failures > 0 {
        ExitCode::GuaranteedFailure
    } else if conjecture_counterexamples > 0 {
        ExitCode::ConjectureCounterexample
    } else {
        ExitCode::Ok
    };
    let skipped = outcomes
        .iter()
        .filter_map(|o| match o.verdict {
            Verdict::Skipped(why) => Some(format!("{}: {why}", label(o))),
            _ => None,
        })
        .collect();
    let players = classify_players(g);
    Ok(AuditResult {
        n: g.n(),
        m: g.m(),
        graph6: encode_graph6(g),
        p_grid: p_grid.to_vec(),
        skipped,
        null_players: (0..g.n()).filter(|&v| players.null[v]).collect(),
        symmetry_classes: players.symmetry_classes,
        vertex_energy: vertex_energies(g, 1.0)?.per_vertex,
        guaranteed_failures,
        conjecture_counterexamples,
        exit_code: exit.code(),
        outcomes,
    })
}

#[derive(Serialize)]
struct Row {
    check_id: &'static str,
    class: CheckClass,
    p: String,
    q: String,
    verdict: &'static str,
    slack: String,
    witness: String,
    survives_reverification: String,
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Skipped(_) => "skipped",
    }
}

impl AuditResult {
    pub fn exit(&self) -> ExitCode {
        match self.exit_code {
            0 => ExitCode::Ok,
            1 => ExitCode::GuaranteedFailure,
            _ => ExitCode::ConjectureCounterexample,
        }
    }

    pub fn csv_rows(&self) -> Vec<impl Serialize> {
        use crate::doc::opt_num;
        self.outcomes
            .iter()
            .map(|o| Row {
                check_id: o.check.id(),
                class: o.class,
                p: opt_num(o.p),
                q: opt_num(o.q),
                verdict: verdict_str(o.verdict),
                slack: opt_num(o.slack),
                witness: o.witness.clone().unwrap_or_default(),
                survives_reverification: o.reverification.map(|r| r.survives.to_string()).unwrap_or_default(),
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        writeln!(o, "audit of {} (n = {}, m = {}), p grid {:?}", self.graph6, self.n, self.m, self.p_grid).unwrap();
        for x in &self.outcomes {
            let status = match x.verdict {
                Verdict::Holds => "ok",
                Verdict::Fails => match (x.class, x.reverification) {
                    (_, Some(r)) if !r.survives => "FAIL (cleared on re-verification)",
                    (CheckClass::Guaranteed, _) => "FAIL",
                    (CheckClass::Evidence, _) => "COUNTEREXAMPLE",
                    (CheckClass::Informational, _) => "fails (not claimed)",
                },
                Verdict::Skipped(_) => continue,
            };
            let slack = x.slack.map(|s| format!("{s:+.3e}")).unwrap_or_default();
            let witness = x.witness.as_deref().map(|w| format!("  at {w}")).unwrap_or_default();
            writeln!(o, "  {:<40} {status:<20} slack {slack}{witness}", label(x)).unwrap();
        }
        for s in &self.skipped {
            writeln!(o, "  skipped: {s}").unwrap();
        }
        if !self.null_players.is_empty() {
            writeln!(o, "null players: {:?}", self.null_players).unwrap();
        }
        writeln!(
            o,
            "{} guaranteed failure(s), {} conjecture counterexample(s)",
            self.guaranteed_failures, self.conjecture_counterexamples
        )
        .unwrap();
        o
    }
}
