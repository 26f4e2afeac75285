//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails if any criterion fails, except a criterion listed as
//! unattainable as written, or a fixed-seed statistical check that lands in
//! its tail: those still print FAIL, and their own checks assert the exact
//! facts behind the verdict (the mathematics, or the estimator's
//! calibration over many seeds), so any other deviation still fails the run.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use energame::checks::Check;
use energame::format::edge_list::{parse_edge_list, EdgeListErrorKind};
use energame::format::graph6::{encode_graph6, parse_graph6};
use energame::sweep::{self, GraphClass, SweepConfig};
use energame_core::bounds::{is_bipartite, path_ordering, BoundId};
use energame_core::enumerate::labeled_graphs;
use energame_core::game::{
    audit_convexity, build_table, check_core, shapley_exact, shapley_monte_carlo, solve, PayoffVector,
};
use energame_core::graph::{complete, path, star, Graph, VertexSet};
use energame_core::rng::PermutationSampler;
use energame_core::spectral::{eig_symmetric, energy_by_trace, p_energy, schatten_sum, vertex_energies};
use energame_core::Tolerances;

const TOL: Tolerances = Tolerances::DEFAULT;

enum Verdict {
    Pass(String),
    Fail(String),
    /// The criterion cannot hold as written; the detail says why.
    Unattainable(String),
    /// A fixed-seed statistical check landed in its tail while the
    /// estimator's calibration checks passed.
    StatisticalTail(String),
}

type Criterion = (u32, &'static str, Duration, fn() -> Verdict);

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Verdict::Fail(format!($($fmt)+));
        }
    };
}

fn random_graph(rng: &mut PermutationSampler, n: usize) -> Graph {
    let mut edges = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if rng.below(2) == 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn c1_p3_golden() -> Verdict {
    let g = path(3).unwrap();
    let s2 = 2f64.sqrt();
    let (table, sol) = solve(&g, 1.0, &TOL).unwrap();
    let e = &sol.vertex_energy_payoff;
    for (got, want) in e.iter().zip([1.0 / s2, s2, 1.0 / s2]) {
        ensure!(close(*got, want, 1e-6), "vertex energies {:?}", e.0);
    }
    ensure!(close(e.total(), 2.0 * s2, 1e-6), "total {}", e.total());
    let want = [(2.0 * s2 - 1.0) / 3.0, (2.0 + 2.0 * s2) / 3.0, (2.0 * s2 - 1.0) / 3.0];
    for (got, want) in sol.shapley.iter().zip(want) {
        ensure!(close(*got, want, 1e-6), "shapley {:?}", sol.shapley.0);
    }
    ensure!(sol.shapley_core.is_member && sol.vertex_energy_core.is_member, "core certificates");
    let conv = audit_convexity(&table, &TOL).unwrap();
    let expected = (VertexSet::from_vertices([0, 1], 3).unwrap(), VertexSet::from_vertices([1, 2], 3).unwrap());
    ensure!(!conv.passed && conv.witness == Some(expected), "convexity witness {:?}", conv.witness);
    Verdict::Pass(format!(
        "shapley ({:.5}, {:.5}, {:.5}); convexity counterexample S={} T={} (0-based), slack {:.6}",
        sol.shapley[0], sol.shapley[1], sol.shapley[2], expected.0, expected.1, conv.worst_slack
    ))
}

fn c2_star_family() -> Verdict {
    for n in 4..=10 {
        let g = star(n).unwrap();
        let k = (n - 1) as f64;
        let (v, w) = is_bipartite(&g).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let prof = vertex_energies(&g, p).unwrap();
            let total = 2.0 * k.powf(p / 2.0);
            ensure!(close(prof.total, total, 1e-6), "star({n}) p={p}: total {}", prof.total);
            ensure!(close(prof.per_vertex[0], k.powf(p / 2.0), 1e-6), "star({n}) p={p}: center");
            for leaf in &prof.per_vertex[1..] {
                ensure!(close(*leaf, k.powf(p / 2.0 - 1.0), 1e-6), "star({n}) p={p}: leaf {leaf}");
            }
            ensure!(
                close(prof.sum_over(v), total / 2.0, 1e-6) && close(prof.sum_over(w), total / 2.0, 1e-6),
                "star({n}) p={p}: split"
            );
        }
    }
    Verdict::Pass("n = 4..10, p in {1, 1.5, 2, 3}".into())
}

fn c3_complete_graphs() -> Verdict {
    for n in 3..=8 {
        for p in [1.0, 2.0, 3.0, 4.0] {
            let want = ((n - 1) as f64).powf(p) + (n - 1) as f64;
            let got = p_energy(&complete(n).unwrap(), p).unwrap();
            ensure!(close(got, want, 1e-6), "E_{p}(K_{n}) = {got}, expected {want}");
        }
    }
    // p = 4: the bipartite-only bound E_p <= 2 m^{p/2} fails on K_n for
    // n >= 4 and is an equality at n = 3; the comparison with (2m)^{p/2}
    // goes the other way for every n.
    let mut bipartite_failures = Vec::new();
    for n in 3..=8 {
        let m = (n * (n - 1) / 2) as f64;
        let e4 = p_energy(&complete(n).unwrap(), 4.0).unwrap();
        ensure!(e4 < (2.0 * m).powi(2) - 1.0, "E_4(K_{n}) = {e4} vs (2m)^2 = {}", (2.0 * m).powi(2));
        let bip = 2.0 * m * m;
        if n == 3 {
            ensure!(close(e4, bip, 1e-9), "K_3: E_4 = {e4} vs 2m^2 = {bip}");
        } else {
            ensure!(e4 > bip + 1.0, "K_{n}: E_4 = {e4} vs 2m^2 = {bip}");
            bipartite_failures.push(n);
        }
    }
    let e5 = p_energy(&complete(3).unwrap(), 5.0).unwrap();
    ensure!(e5 > 2.0 * 3f64.powf(2.5), "K_3 at p = 5");
    Verdict::Unattainable(format!(
        "closed form holds for all 24 (n, p); 2m^(p/2) >= E_p fails at p = 4 for n = {bipartite_failures:?} \
         but K_3 gives equality 2*3^2 = 18 = E_4 (it fails at p = 5: 34 > 31.18); \
         the parenthetical E_p(K_n) > (2m)^(p/2) is false for every n since E_p <= (2m)^(p/2) for p > 2"
    ))
}

fn c4_theorem_sweep() -> Verdict {
    let checks = vec![
        Check::Superadditivity,
        Check::VertexCore,
        Check::Bound(BoundId::SubgraphInequality),
        Check::Bound(BoundId::DegreeLowerBound),
        Check::Bound(BoundId::AdjacentPair),
        Check::Bound(BoundId::VertexHolder),
        Check::Bound(BoundId::SchattenMonotonicity),
        Check::Bound(BoundId::PathOrdering),
    ];
    let n_checks = checks.len();
    let cfg = SweepConfig {
        class: GraphClass::Graphs,
        min_n: 1,
        max_n: 6,
        checks,
        p_grid: vec![1.0, 2.0, 3.0],
        jobs: jobs(),
        tol: TOL,
    };
    let r = sweep::run(&cfg, None, &AtomicBool::new(false)).unwrap();
    ensure!(!r.partial, "partial sweep");
    ensure!(r.counts.graphs_scanned == 1 + 2 + 8 + 64 + 1024 + 32768, "scanned {}", r.counts.graphs_scanned);
    ensure!(r.counts.violations_raw == 0, "{} violations, first {:?}", r.counts.violations_raw, r.violations.first());
    ensure!(r.worst_slack.len() == n_checks, "checks with results: {:?}", r.worst_slack.keys());
    let worst = r.worst_slack.values().map(|w| w.slack).fold(f64::INFINITY, f64::min);
    ensure!(worst >= -1e-8, "worst slack {worst}");
    for n in 3..=12 {
        let po = path_ordering(n, &TOL).unwrap();
        ensure!(po.holds() && po.strict == Some(true), "path ordering n = {n}: {po:?}");
    }
    Verdict::Pass(format!(
        "{} graphs, {} checks, worst slack {worst:.2e}; path ordering strict for n = 3..12",
        r.counts.graphs_scanned, r.counts.checks_run
    ))
}

fn c5_shapley_core_evidence() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let status = Command::new(env!("CARGO_BIN_EXE_energame"))
        .args(["sweep", "--max-n", "5", "--checks", "shapley-core", "--p-grid", "1", "--format", "text", "--out"])
        .arg(&out)
        .env_remove("ENERGAME_TOL")
        .output()
        .unwrap();
    ensure!(status.status.code() == Some(0), "exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(out.join("sweep.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    ensure!(v["partial"] == false, "partial");
    ensure!(v["counts"]["graphs_scanned"] == 1099, "scanned {}", v["counts"]["graphs_scanned"]);
    ensure!(v["counts"]["violations_surviving"] == 0, "surviving {}", v["counts"]["violations_surviving"]);
    Verdict::Pass(format!(
        "1099 graphs, {} raw violations, 0 surviving re-verification at 1e-10, worst slack {:.3e}; exit 0, sweep.json written",
        v["counts"]["violations_raw"],
        v["worst_slack"]["shapley-core"]["slack"].as_f64().unwrap()
    ))
}

fn c6_tree_extremality() -> Verdict {
    let cfg = SweepConfig {
        class: GraphClass::Trees,
        min_n: 1,
        max_n: 7,
        checks: vec![Check::TreeExtremal],
        p_grid: vec![1.5, 3.0],
        jobs: jobs(),
        tol: TOL,
    };
    let r = sweep::run(&cfg, None, &AtomicBool::new(false)).unwrap();
    ensure!(r.tree_extremes.len() == 14, "{} extremes", r.tree_extremes.len());
    let mut margins = Vec::new();
    for t in &r.tree_extremes {
        ensure!(t.holds, "n = {} p = {}: {t:?}", t.n, t.p);
        if t.n == 7 {
            margins.push(format!("p={}: lower {:.4}, upper {:.4}", t.p, t.lower_margin, t.upper_margin));
        }
    }
    ensure!(r.counts.violations_surviving == 0, "surviving violations");
    Verdict::Pass(format!("{} trees; n = 7 margins {}", r.counts.graphs_scanned, margins.join("; ")))
}

fn c7_p2_identities() -> Verdict {
    let mut rng = PermutationSampler::new(7);
    for k in 0..100 {
        let n = 1 + rng.below(10) as usize;
        let g = random_graph(&mut rng, n);
        let deg: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
        ensure!(close(p_energy(&g, 2.0).unwrap(), 2.0 * g.m() as f64, 1e-8), "graph {k}: E_2");
        let prof = vertex_energies(&g, 2.0).unwrap();
        ensure!(prof.per_vertex.iter().zip(&deg).all(|(a, b)| close(*a, *b, 1e-8)), "graph {k}: E_2(v)");
        let t = build_table(&g, 2.0).unwrap();
        ensure!(PayoffVector(deg.clone()).max_abs_diff(&shapley_exact(&t)) <= 1e-8, "graph {k}: shapley");
        ensure!(audit_convexity(&t, &TOL).unwrap().passed, "graph {k}: convexity");
    }
    Verdict::Pass("100 graphs, seed 7".into())
}

/// z-scores of `samples`-sample estimates against the exact value over
/// `seeds` independent seeds, players with zero standard error skipped.
fn z_scores(t: &energame_core::game::CoalitionTable, exact: &PayoffVector, samples: u64, seeds: u64) -> Vec<f64> {
    let mut out = Vec::new();
    for seed in 1000..1000 + seeds {
        let mc = shapley_monte_carlo(t, samples, seed).unwrap();
        for i in 0..t.n() {
            if mc.std_err[i] > 0.0 {
                out.push((mc.estimate[i] - exact[i]) / mc.std_err[i]);
            }
        }
    }
    out
}

fn c8_monte_carlo() -> Verdict {
    let mut rng = PermutationSampler::new(8);
    let graphs = [("P3", path(3).unwrap()), ("random n=8", random_graph(&mut rng, 8))];
    let mut outside = Vec::new();
    let mut worst_z: f64 = 0.0;
    let mut calibration = Vec::new();
    for (name, g) in &graphs {
        let t = build_table(g, 1.0).unwrap();
        let exact = shapley_exact(&t);
        let mc = shapley_monte_carlo(&t, 100_000, 1).unwrap();
        for i in 0..g.n() {
            let dev = (mc.estimate[i] - exact[i]).abs();
            // players whose marginal never varies have zero standard error
            if dev > 3.0 * mc.std_err[i] + 1e-12 {
                outside.push(format!("{name} player {i}: {:.2} standard errors", dev / mc.std_err[i]));
            }
            if mc.std_err[i] > 0.0 {
                worst_z = worst_z.max(dev / mc.std_err[i]);
            }
        }
        let all = shapley_monte_carlo(&t, 0, 0).unwrap();
        ensure!(all.estimate.max_abs_diff(&exact) <= 1e-12, "{name}: exhaustive mode");
        ensure!(check_core(&t, &exact, &TOL).unwrap().is_member, "{name}: core");

        // the estimator itself must be unbiased with honest standard errors
        let z = z_scores(&t, &exact, 10_000, 100);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / z.len() as f64;
        let tail = z.iter().filter(|x| x.abs() > 3.0).count() as f64 / z.len() as f64;
        ensure!(mean.abs() < 0.2 && (0.75..1.3).contains(&var) && tail < 0.01, "{name}: z mean {mean}, var {var}, tail {tail}");
        calibration.push(format!("{name} z mean {mean:+.3} var {var:.3}"));
    }
    let summary = format!("calibration over 100 seeds x 1e4 samples: {}", calibration.join(", "));
    if outside.is_empty() {
        Verdict::Pass(format!("1e5 samples, seed 1; largest deviation {worst_z:.2} standard errors; exhaustive mode exact; {summary}"))
    } else {
        Verdict::StatisticalTail(format!("1e5 samples, seed 1: {}; exhaustive mode exact; {summary}", outside.join(", ")))
    }
}

fn c9_formats() -> Verdict {
    let mut count = 0;
    for n in 0..=5 {
        for (_, g) in labeled_graphs(n).unwrap() {
            ensure!(parse_graph6(&encode_graph6(&g)).unwrap() == g, "round trip {g:?}");
            count += 1;
        }
    }
    let mut rng = PermutationSampler::new(9);
    let corpus: Vec<String> = (0..1000)
        .map(|_| {
            let n = rng.below(63) as usize;
            encode_graph6(&random_graph(&mut rng, n))
        })
        .collect();
    for line in corpus.join("\n").lines() {
        ensure!(encode_graph6(&parse_graph6(line).unwrap()) == line, "corpus line {line}");
    }
    let e = parse_edge_list("3\n0 1\n2 2\n").unwrap_err();
    ensure!(e.line == 3 && e.kind == EdgeListErrorKind::SelfLoop(2), "self-loop: {e}");
    let e = parse_edge_list("3\n0 1\n\n1 3\n").unwrap_err();
    ensure!(e.line == 4 && matches!(e.kind, EdgeListErrorKind::VertexOutOfRange { vertex: 3, n: 3 }), "range: {e}");
    Verdict::Pass(format!("{count} enumerated graphs and 1000 random lines round-trip; edge-list errors carry line numbers"))
}

fn c10_dual_path() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=5 {
        for (_, g) in labeled_graphs(n).unwrap() {
            let spec = eig_symmetric(&g).unwrap();
            let d = (schatten_sum(spec.eigenvalues(), 1.0) - energy_by_trace(&spec)).abs();
            ensure!(d <= 1e-9, "{g:?}: {d}");
            worst = worst.max(d);
            count += 1;
        }
    }
    Verdict::Pass(format!("{count} graphs, largest gap {worst:.1e}"))
}

fn main() {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 10] = [
        (1, "P3 golden numbers", secs(1), c1_p3_golden),
        (2, "star family", secs(1), c2_star_family),
        (3, "complete graphs", secs(1), c3_complete_graphs),
        (4, "exhaustive theorem sweep n <= 6", secs(600), c4_theorem_sweep),
        (5, "Shapley-in-core evidence n <= 5", secs(900), c5_shapley_core_evidence),
        (6, "tree extremality n <= 7", secs(120), c6_tree_extremality),
        (7, "p = 2 identities", secs(30), c7_p2_identities),
        (8, "Monte Carlo consistency", secs(30), c8_monte_carlo),
        (9, "format fidelity", secs(60), c9_formats),
        (10, "dual-path energy", secs(60), c10_dual_path),
    ];
    let mut unexpected = 0;
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Verdict::Fail(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let verdict = match verdict {
            Verdict::Pass(_) if elapsed > limit => Verdict::Fail(format!("took {elapsed:.2?}, limit {limit:?}")),
            v => v,
        };
        let (status, detail) = match &verdict {
            Verdict::Pass(d) => ("PASS", d.clone()),
            Verdict::Fail(d) => {
                unexpected += 1;
                ("FAIL", d.clone())
            }
            Verdict::Unattainable(d) => ("FAIL", format!("unattainable as written: {d}")),
            Verdict::StatisticalTail(d) => ("FAIL", format!("fixed-seed tail event: {d}")),
        };
        println!("criterion {id:>2} {status} [{title}] ({:.2}s) {detail}", elapsed.as_secs_f64());
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criterion/criteria failed");
        std::process::exit(1);
    }
}
