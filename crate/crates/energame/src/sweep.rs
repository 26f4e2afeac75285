//! `sweep`: exhaustive scans over labeled graphs or labeled trees.
//!
//! The index space of each vertex count is cut into fixed-size chunks that
//! worker threads claim in order; results are merged strictly by chunk
//! index, so the output does not depend on the number of workers. An
//! interrupt stops the claiming of new chunks and keeps the longest fully
//! merged prefix, marked `partial`.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use energame_core::bounds::{tree_extremes, validate_p_grid, TreeExtremes, Verdict};
use energame_core::enumerate::{
    labeled_graph_count, labeled_graphs_in, labeled_tree, labeled_tree_count, MAX_LABELED_TREE_N,
};
use energame_core::graph::{self, Graph};
use energame_core::spectral::{eigenvalues, schatten_sum, EigConfig};
use energame_core::Tolerances;
use serde::Serialize;

use crate::checks::{evaluate, reverify, Check, CheckClass, Outcome, Reverification};
use crate::error::{CliError, ExitCode};
use crate::format::encode_graph6;

/// Largest vertex count for graph sweeps without, and with, the Shapley
/// core check.
pub const MAX_GRAPH_SWEEP_N: usize = 7;
pub const MAX_SHAPLEY_SWEEP_N: usize = 6;
pub const MAX_TREE_SWEEP_N: usize = MAX_LABELED_TREE_N;
/// Violations kept in full; further ones are only counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 1000;
const CHUNK: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphClass {
    Graphs,
    Trees,
}

impl FromStr for GraphClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graphs" => Ok(GraphClass::Graphs),
            "trees" => Ok(GraphClass::Trees),
            _ => Err(format!("unknown class {s:?} (expected graphs or trees)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub class: GraphClass,
    pub min_n: usize,
    pub max_n: usize,
    pub checks: Vec<Check>,
    pub p_grid: Vec<f64>,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub tol: Tolerances,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        validate_p_grid(&self.p_grid)?;
        if self.p_grid.is_empty() {
            return usage("empty p grid".into());
        }
        if self.checks.is_empty() {
            return usage("no checks selected".into());
        }
        if self.min_n == 0 || self.min_n > self.max_n {
            return usage(format!("empty vertex range {}..={}", self.min_n, self.max_n));
        }
        if let Some(c) = self.checks.iter().find(|c| matches!(c, Check::Convexity)) {
            return usage(format!("{c} is not a sweep check"));
        }
        match self.class {
            GraphClass::Graphs => {
                if self.checks.contains(&Check::TreeExtremal) {
                    return usage("tree-extremal needs --class trees".into());
                }
                let cap = if self.checks.contains(&Check::ShapleyCore) { MAX_SHAPLEY_SWEEP_N } else { MAX_GRAPH_SWEEP_N };
                if self.max_n > cap {
                    return usage(format!("graph sweeps with these checks are limited to --max-n {cap}"));
                }
            }
            GraphClass::Trees => {
                if self.max_n > MAX_TREE_SWEEP_N {
                    return usage(format!("tree sweeps are limited to --max-n {MAX_TREE_SWEEP_N}"));
                }
            }
        }
        Ok(())
    }

    /// Canonical text of the scope, used as the digest input.
    pub fn canonical(&self) -> String {
        let checks: Vec<&str> = self.checks.iter().map(|c| c.id()).collect();
        format!(
            "sweep class={} n={}..={} checks={} p_grid={:?}",
            match self.class {
                GraphClass::Graphs => "graphs",
                GraphClass::Trees => "trees",
            },
            self.min_n,
            self.max_n,
            checks.join(","),
            self.p_grid
        )
    }

    fn graph_checks(&self) -> Vec<Check> {
        self.checks.iter().copied().filter(|c| *c != Check::TreeExtremal).collect()
    }
}

/// One line of the per-graph CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub graph6: String,
    pub n: usize,
    pub m: usize,
    pub check_id: &'static str,
    pub worst_slack: f64,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub graph6: String,
    pub n: usize,
    pub m: usize,
    pub check: Check,
    pub class: CheckClass,
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub slack: f64,
    pub witness: Option<String>,
    pub reverification: Reverification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Worst {
    pub slack: f64,
    pub graph6: String,
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Counts {
    pub graphs_scanned: u64,
    /// `(n, graphs scanned with n vertices)`.
    pub per_n: Vec<(usize, u64)>,
    pub checks_run: u64,
    pub checks_skipped: u64,
    pub violations_raw: u64,
    pub violations_surviving: u64,
    pub guaranteed_surviving: u64,
    pub evidence_surviving: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub partial: bool,
    pub scope: SweepConfig,
    pub counts: Counts,
    /// Per check id, the smallest slack seen and where.
    pub worst_slack: BTreeMap<&'static str, Worst>,
    /// Every violation before re-verification, in enumeration order, each
    /// with its re-verification record.
    pub violations: Vec<Violation>,
    pub violations_truncated: bool,
    pub tree_extremes: Vec<TreeExtremes>,
    pub exit_code: i32,
}

impl SweepResult {
    pub fn exit(&self) -> ExitCode {
        if self.counts.guaranteed_surviving > 0 {
            ExitCode::GuaranteedFailure
        } else if self.counts.evidence_surviving > 0 {
            ExitCode::ConjectureCounterexample
        } else {
            ExitCode::Ok
        }
    }

    /// Violations that survived re-verification.
    pub fn counterexamples(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.reverification.survives)
    }
}

#[derive(Debug, Clone)]
enum Task {
    Items { n: usize, start: u64, end: u64 },
    TreeExtremal { n: usize, p: f64 },
}

#[derive(Debug, Default)]
struct TaskResult {
    n: usize,
    graphs: u64,
    checks_run: u64,
    checks_skipped: u64,
    rows: Vec<CsvRow>,
    violations: Vec<Violation>,
    worst: Vec<(&'static str, Worst)>,
    extremes: Option<TreeExtremes>,
}

fn tasks(cfg: &SweepConfig) -> Result<Vec<Task>, CliError> {
    let mut out = Vec::new();
    for n in cfg.min_n..=cfg.max_n {
        let count = match cfg.class {
            GraphClass::Graphs => labeled_graph_count(n)?,
            GraphClass::Trees => labeled_tree_count(n)?,
        };
        let mut start = 0;
        while start < count {
            let end = (start + CHUNK).min(count);
            out.push(Task::Items { n, start, end });
            start = end;
        }
        if cfg.checks.contains(&Check::TreeExtremal) {
            out.extend(cfg.p_grid.iter().map(|&p| Task::TreeExtremal { n, p }));
        }
    }
    Ok(out)
}

fn describe(o: &Outcome) -> String {
    let at = match (o.p, o.q) {
        (Some(p), Some(q)) => format!("p={p},q={q}"),
        (Some(p), None) => format!("p={p}"),
        _ => String::new(),
    };
    match &o.witness {
        Some(w) if at.is_empty() => w.clone(),
        Some(w) => format!("{at}: {w}"),
        None => at,
    }
}

fn scan_graph(g: &Graph, cfg: &SweepConfig, checks: &[Check], r: &mut TaskResult) -> energame_core::Result<()> {
    r.graphs += 1;
    if checks.is_empty() {
        return Ok(());
    }
    let mut outcomes = evaluate(g, &cfg.p_grid, checks, &cfg.tol, EigConfig::DEFAULT)?;
    reverify(g, &cfg.p_grid, &mut outcomes, &cfg.tol)?;
    let g6 = encode_graph6(g);
    let mut per_check: Vec<(Check, &Outcome)> = Vec::new();
    for o in &outcomes {
        let Some(slack) = o.slack else {
            r.checks_skipped += 1;
            continue;
        };
        r.checks_run += 1;
        match per_check.iter_mut().find(|(c, _)| *c == o.check) {
            Some((_, best)) if best.slack.is_some_and(|b| b <= slack) => {}
            Some(entry) => entry.1 = o,
            None => per_check.push((o.check, o)),
        }
        if let (Verdict::Fails, Some(rev)) = (o.verdict, o.reverification) {
            r.violations.push(Violation {
                graph6: g6.clone(),
                n: g.n(),
                m: g.m(),
                check: o.check,
                class: o.class,
                p: o.p,
                q: o.q,
                slack,
                witness: o.witness.clone(),
                reverification: rev,
            });
        }
    }
    for (check, o) in per_check {
        let slack = o.slack.expect("evaluated");
        r.rows.push(CsvRow { graph6: g6.clone(), n: g.n(), m: g.m(), check_id: check.id(), worst_slack: slack, witness: describe(o) });
        r.worst.push((
            check.id(),
            Worst { slack, graph6: g6.clone(), p: o.p, q: o.q, witness: o.witness.clone() },
        ));
    }
    Ok(())
}

fn tight_p_energy(g: &Graph, p: f64) -> energame_core::Result<f64> {
    Ok(schatten_sum(&eigenvalues(g, EigConfig::TIGHT)?, p))
}

fn tree_task(n: usize, p: f64, tol: &Tolerances) -> energame_core::Result<TaskResult> {
    let t = tree_extremes(n, p, tol)?;
    let lower_is_worse = t.lower_margin <= t.upper_margin;
    let (slack, idx, side) =
        if lower_is_worse { (t.lower_margin, t.argmin, "min") } else { (t.upper_margin, t.argmax, "max") };
    let tree = labeled_tree(n, idx)?;
    let g6 = encode_graph6(&tree);
    let expected = match (side, p <= 2.0) {
        ("min", true) | ("max", false) => "star",
        _ => "path",
    };
    let witness = format!("p={p}: {side} over {} trees at Prüfer index {idx}, expected at the {expected}", t.trees);
    let mut r = TaskResult { n, checks_run: 1, extremes: Some(t), ..TaskResult::default() };
    if !t.holds {
        let reference = if expected == "star" { graph::star(n)? } else { graph::path(n)? };
        let (e_tree, e_ref) = (tight_p_energy(&tree, p)?, tight_p_energy(&reference, p)?);
        let tight = if side == "min" { e_tree - e_ref } else { e_ref - e_tree };
        r.violations.push(Violation {
            graph6: g6.clone(),
            n,
            m: tree.m(),
            check: Check::TreeExtremal,
            class: CheckClass::Evidence,
            p: Some(p),
            q: None,
            slack,
            witness: Some(witness.clone()),
            reverification: Reverification {
                eig_rel_off_tol: EigConfig::TIGHT.rel_off_tol,
                tight_slack: Some(tight),
                threshold: tol.reverify,
                survives: tight < -tol.reverify,
            },
        });
    }
    r.rows.push(CsvRow { graph6: g6.clone(), n, m: tree.m(), check_id: Check::TreeExtremal.id(), worst_slack: slack, witness: witness.clone() });
    r.worst.push((Check::TreeExtremal.id(), Worst { slack, graph6: g6, p: Some(p), q: None, witness: Some(witness) }));
    Ok(r)
}

fn run_task(task: &Task, cfg: &SweepConfig, checks: &[Check], stop: &AtomicBool) -> energame_core::Result<Option<TaskResult>> {
    match *task {
        Task::TreeExtremal { n, p } => tree_task(n, p, &cfg.tol).map(Some),
        Task::Items { n, start, end } => {
            let mut r = TaskResult { n, ..TaskResult::default() };
            match cfg.class {
                GraphClass::Graphs => {
                    for (_, g) in labeled_graphs_in(n, start..end)? {
                        if stop.load(Ordering::Relaxed) {
                            return Ok(None);
                        }
                        scan_graph(&g, cfg, checks, &mut r)?;
                    }
                }
                GraphClass::Trees => {
                    for idx in start..end {
                        if stop.load(Ordering::Relaxed) {
                            return Ok(None);
                        }
                        scan_graph(&labeled_tree(n, idx)?, cfg, checks, &mut r)?;
                    }
                }
            }
            Ok(Some(r))
        }
    }
}

struct Merger<'w> {
    result: SweepResult,
    per_n: BTreeMap<usize, u64>,
    csv: Option<csv::Writer<&'w mut dyn Write>>,
}

impl Merger<'_> {
    fn absorb(&mut self, r: TaskResult) -> Result<(), CliError> {
        let res = &mut self.result;
        res.counts.graphs_scanned += r.graphs;
        *self.per_n.entry(r.n).or_default() += r.graphs;
        res.counts.checks_run += r.checks_run;
        res.counts.checks_skipped += r.checks_skipped;
        for v in r.violations {
            res.counts.violations_raw += 1;
            if v.reverification.survives {
                res.counts.violations_surviving += 1;
                match v.class {
                    CheckClass::Guaranteed => res.counts.guaranteed_surviving += 1,
                    CheckClass::Evidence => res.counts.evidence_surviving += 1,
                    CheckClass::Informational => {}
                }
            }
            if res.violations.len() < MAX_RECORDED_VIOLATIONS {
                res.violations.push(v);
            } else {
                res.violations_truncated = true;
            }
        }
        for (id, w) in r.worst {
            match res.worst_slack.get(id) {
                Some(cur) if cur.slack <= w.slack => {}
                _ => {
                    res.worst_slack.insert(id, w);
                }
            }
        }
        res.tree_extremes.extend(r.extremes);
        if let Some(w) = self.csv.as_mut() {
            for row in &r.rows {
                w.serialize(row)?;
            }
        }
        Ok(())
    }
}

/// Runs the sweep. Per-graph CSV rows are streamed to `csv_out` in
/// enumeration order when given; setting `stop` ends the run early with a
/// partial result.
pub fn run(cfg: &SweepConfig, csv_out: Option<&mut dyn Write>, stop: &AtomicBool) -> Result<SweepResult, CliError> {
    cfg.validate()?;
    let tasks = tasks(cfg)?;
    let checks = cfg.graph_checks();
    let jobs = cfg.jobs.max(1);

    let mut merger = Merger {
        result: SweepResult {
            partial: false,
            scope: cfg.clone(),
            counts: Counts::default(),
            worst_slack: BTreeMap::new(),
            violations: Vec::new(),
            violations_truncated: false,
            tree_extremes: Vec::new(),
            exit_code: 0,
        },
        per_n: BTreeMap::new(),
        csv: csv_out.map(csv::Writer::from_writer),
    };

    let next = AtomicUsize::new(0);
    let mut merged = 0usize;
    let mut failure: Option<CliError> = None;
    thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..jobs.min(tasks.len()) {
            let tx = tx.clone();
            let (next, tasks, checks) = (&next, &tasks, &checks);
            s.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(task) = tasks.get(i) else { break };
                let r = run_task(task, cfg, checks, stop);
                let done = r.is_err();
                if tx.send((i, r)).is_err() || done {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending: HashMap<usize, TaskResult> = HashMap::new();
        for (i, r) in rx {
            match r {
                Ok(Some(r)) => {
                    pending.insert(i, r);
                }
                Ok(None) => {}
                Err(e) => {
                    stop.store(true, Ordering::Relaxed);
                    failure.get_or_insert(e.into());
                }
            }
            while let Some(r) = pending.remove(&merged) {
                if failure.is_none() {
                    if let Err(e) = merger.absorb(r) {
                        stop.store(true, Ordering::Relaxed);
                        failure = Some(e);
                    }
                }
                merged += 1;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some(mut w) = merger.csv.take() {
        w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    }
    let mut result = merger.result;
    result.partial = merged < tasks.len();
    result.counts.per_n = merger.per_n.into_iter().collect();
    result.exit_code = result.exit().code();
    Ok(result)
}
