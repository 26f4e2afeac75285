//! Game-level invariants over random and exhaustive small graphs.

use energame_core::bounds::{run_all_bounds, BoundId};
use energame_core::enumerate::{labeled_graphs, labeled_trees};
use energame_core::game::{
    audit_convexity, audit_superadditivity, build_table, build_tables, check_core, classify_players,
    marginal_contribution_check, shapley_exact, shapley_monte_carlo, CoalitionTable, PayoffVector,
};
use energame_core::graph::{path, Graph, VertexSet};
use energame_core::spectral::vertex_energies;
use energame_core::Tolerances;
use proptest::prelude::*;

const TOL: Tolerances = Tolerances::DEFAULT;

fn random_graph(n: usize, bits: u64) -> Graph {
    let pairs = energame_core::enumerate::pair_order(n);
    Graph::from_edges(n, pairs.iter().enumerate().filter(|(k, _)| bits >> (k % 64) & 1 == 1).map(|(_, &e)| e)).unwrap()
}

/// Shapley value as the plain average of marginal contributions over every
/// ordering, generated recursively (Heap-free, independent of the crate).
fn shapley_by_all_orderings(t: &CoalitionTable) -> Vec<f64> {
    fn rec(t: &CoalitionTable, used: u32, acc: &mut Vec<f64>, count: &mut u64, order: &mut Vec<usize>) {
        let n = t.n();
        if order.len() == n {
            let mut mask = 0u32;
            for &i in order.iter() {
                acc[i] += t.value(mask | 1 << i) - t.value(mask);
                mask |= 1 << i;
            }
            *count += 1;
            return;
        }
        for i in 0..n {
            if used >> i & 1 == 0 {
                order.push(i);
                rec(t, used | 1 << i, acc, count, order);
                order.pop();
            }
        }
    }
    let mut acc = vec![0.0; t.n()];
    let mut count = 0;
    rec(t, 0, &mut acc, &mut count, &mut Vec::new());
    acc.iter().map(|a| a / count as f64).collect()
}

#[test]
fn exact_shapley_matches_ordering_oracle() {
    for bits in [0u64, 0b1, 0b1011, 0b110110, 0x3ff, 0x12345] {
        for n in [3usize, 4, 5, 6] {
            let g = random_graph(n, bits);
            for p in [1.0, 2.5] {
                let t = build_table(&g, p).unwrap();
                let exact = shapley_exact(&t);
                let oracle = shapley_by_all_orderings(&t);
                for (a, b) in exact.iter().zip(&oracle) {
                    assert!((a - b).abs() < 1e-12, "{g:?} p={p}");
                }
            }
        }
    }
}

#[test]
fn theorem_checks_over_all_graphs_up_to_five() {
    let grid = [1.0, 1.5, 2.0, 3.0];
    for n in 1..=5 {
        for (_, g) in labeled_graphs(n).unwrap() {
            let tables = build_tables(&g, &grid).unwrap();
            for t in &tables {
                assert!(audit_superadditivity(t, &TOL).unwrap().passed, "{g:?}");
                let e = PayoffVector(vertex_energies(&g, t.p()).unwrap().per_vertex);
                assert!(check_core(t, &e, &TOL).unwrap().is_member, "{g:?} p={}", t.p());
                assert!(check_core(t, &shapley_exact(t), &TOL).unwrap().is_member, "{g:?} p={}", t.p());
            }
            let p2 = &tables[2];
            assert!(audit_convexity(p2, &TOL).unwrap().passed);
            let reports = run_all_bounds(&g, &grid, &TOL).unwrap();
            assert!(!reports.iter().any(|r| r.failed()), "{g:?}: {reports:?}");
        }
    }
}

#[test]
fn marginal_contribution_exhaustive_small() {
    for (_, g) in labeled_graphs(5).unwrap().step_by(7) {
        for mask in 1u32..32 {
            let s = VertexSet::new(mask, 5).unwrap();
            for i in s.iter() {
                for p in [1.0, 3.0] {
                    let m = marginal_contribution_check(&g, p, s, i, &TOL).unwrap();
                    assert!(m.holds, "{g:?} S={s} i={i} {m:?}");
                }
            }
        }
    }
}

#[test]
fn p3_energy_and_shapley_differ() {
    let t = build_table(&path(3).unwrap(), 1.0).unwrap();
    let e = PayoffVector(vertex_energies(&path(3).unwrap(), 1.0).unwrap().per_vertex);
    assert!(shapley_exact(&t).max_abs_diff(&e) > 0.1);
}

#[test]
fn trees_are_connected_with_n_minus_one_edges() {
    for n in 1..=7 {
        for (_, t) in labeled_trees(n).unwrap() {
            assert!(t.is_connected());
            assert_eq!(t.m(), n - 1);
        }
    }
}

#[test]
fn path_orderings_up_to_twelve() {
    for n in 3..=12 {
        let r = energame_core::bounds::path_ordering(n, &TOL).unwrap();
        assert_eq!(r.bound, BoundId::PathOrdering);
        assert!(r.holds() && r.strict == Some(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shapley_axioms(n in 1usize..=8, bits in any::<u64>(), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let g = random_graph(n, bits);
        let t = build_table(&g, p).unwrap();
        let phi = shapley_exact(&t);
        let e = vertex_energies(&g, p).unwrap().per_vertex;
        prop_assert!((phi.total() - t.grand_value()).abs() <= TOL.core);
        prop_assert!((e.iter().sum::<f64>() - t.grand_value()).abs() <= TOL.core);
        let classes = classify_players(&g);
        for (v, &null) in classes.null.iter().enumerate() {
            if null {
                prop_assert!(phi[v].abs() <= TOL.core);
                prop_assert!(e[v].abs() <= TOL.core);
            }
        }
        for class in &classes.symmetry_classes {
            for &v in &class[1..] {
                prop_assert!((phi[v] - phi[class[0]]).abs() <= TOL.core);
                prop_assert!((e[v] - e[class[0]]).abs() <= TOL.core);
            }
        }
    }

    #[test]
    fn p2_game_is_degree_game(n in 1usize..=9, bits in any::<u64>()) {
        let g = random_graph(n, bits);
        let t = build_table(&g, 2.0).unwrap();
        let phi = shapley_exact(&t);
        for (v, d) in g.degrees().into_iter().enumerate() {
            prop_assert!((phi[v] - d as f64).abs() <= TOL.core);
        }
        prop_assert!(audit_convexity(&t, &TOL).unwrap().passed);
    }

    #[test]
    fn induced_subgraph_inequality(n in 2usize..=8, bits in any::<u64>(), p in prop::sample::select(vec![1.0, 1.5, 3.0])) {
        let g = random_graph(n, bits);
        let t = build_table(&g, p).unwrap();
        let e = vertex_energies(&g, p).unwrap();
        for mask in 1..=t.full() {
            prop_assert!(e.sum_over(mask as u64) - t.value(mask) >= -TOL.core);
        }
    }

    #[test]
    fn edge_cut_random_bipartitions(n in 2usize..=10, bits in any::<u64>(), side in any::<u32>()) {
        let g = random_graph(n, bits);
        let full = g.full_mask();
        let h = side as u64 & full;
        let e = energame_core::spectral::energy(&g).unwrap();
        let eh = energame_core::spectral::energy(&g.induced_by_mask(h)).unwrap();
        let ek = energame_core::spectral::energy(&g.induced_by_mask(full & !h)).unwrap();
        prop_assert!(eh + ek <= e + TOL.core);
    }

    #[test]
    fn induced_is_hereditary(n in 1usize..=10, bits in any::<u64>(), s in any::<u32>(), t in any::<u32>()) {
        let g = random_graph(n, bits);
        let full = g.full_mask() as u32;
        let small = s & t & full;
        let big = t & full;
        let gs = g.induced(VertexSet::new(small, n).unwrap()).unwrap();
        prop_assert_eq!(&gs.graph.induced_by_mask(gs.graph.full_mask()), &gs.graph);
        let gt = g.induced(VertexSet::new(big, n).unwrap()).unwrap();
        for (a, b) in gs.graph.edges() {
            let (oa, ob) = (gs.labels[a], gs.labels[b]);
            let ta = gt.labels.iter().position(|&x| x == oa).unwrap();
            let tb = gt.labels.iter().position(|&x| x == ob).unwrap();
            prop_assert!(gt.graph.has_edge(ta, tb));
        }
    }

    #[test]
    fn mc_exhaustive_equals_exact(n in 1usize..=7, bits in any::<u64>()) {
        let t = build_table(&random_graph(n, bits), 1.0).unwrap();
        let mc = shapley_monte_carlo(&t, 0, 0).unwrap();
        prop_assert!(mc.estimate.max_abs_diff(&shapley_exact(&t)) <= 1e-12);
    }
}
