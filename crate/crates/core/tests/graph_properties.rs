mod common;

use std::ops::ControlFlow;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use stc_core::generate::{random_connected_graph, with_random_doubles};
use stc_core::solver::{enumerate_spanning_trees, stc_naive};
use stc_core::congestion::tree_path;
use stc_core::{cross_edge_set, tree_congestion, tree_congestion_with_witnesses, EdgeId, EdgeWeight, Graph, SpanningTree, VertexId};

fn first_trees(g: &Graph, limit: usize) -> Vec<SpanningTree> {
    let mut trees = Vec::new();
    enumerate_spanning_trees(g, |edges| {
        trees.push(SpanningTree::new(g, edges.iter().copied()).unwrap());
        if trees.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .unwrap();
    trees
}

fn ids(tree: &SpanningTree) -> Vec<usize> {
    tree.edges().iter().map(|e| e.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cross_sets_partition_by_tree_cut(n in 2usize..8, seed in any::<u64>()) {
        let g = random_weighted(n, 12, 3, seed);
        for tree in first_trees(&g, 6) {
            let t = ids(&tree);
            let report = tree_congestion_with_witnesses(&g, &tree).unwrap();
            let witnesses = report.witnesses.as_ref().unwrap();
            for (e, load) in cut_congestions(&g, &t) {
                let side = component_without(&g, &t, e);
                let expected: Vec<EdgeId> = g.edges().iter().filter(|f| side[f.u.0] != side[f.v.0]).map(|f| f.id).collect();
                let crossing = cross_edge_set(&g, &tree, EdgeId(e)).unwrap();
                prop_assert_eq!(&crossing, &expected);
                prop_assert!(crossing.contains(&EdgeId(e)));
                // the tree edge is the only tree edge crossing its own cut
                prop_assert_eq!(crossing.iter().filter(|f| tree.contains(**f)).count(), 1);
                let mut w = witnesses[&EdgeId(e)].clone();
                w.sort();
                prop_assert_eq!(w, expected);
                prop_assert_eq!(report.per_edge[&EdgeId(e)], load);
            }
            // a non-tree edge crosses exactly the cuts of its tree path
            for f in g.edges().iter().filter(|f| !tree.contains(f.id)) {
                let mut path = tree_path(&g, &tree, f.u, f.v).unwrap();
                path.sort();
                let crossed: Vec<EdgeId> = tree
                    .edges()
                    .iter()
                    .copied()
                    .filter(|&e| cross_edge_set(&g, &tree, e).unwrap().contains(&f.id))
                    .collect();
                prop_assert!(!crossed.is_empty());
                prop_assert_eq!(crossed, path);
            }
        }
    }

    #[test]
    fn double_edges_match_their_expansion(n in 2usize..6, seed in any::<u64>(), k in 5u32..7) {
        let mut r = rng(seed);
        let base = random_connected_graph(n, 8, &mut r);
        let g = with_random_doubles(&base, k, 0.4, &mut r);
        prop_assert!(g.has_double_weights());
        let h = g.expand_double_weights();
        prop_assert!(!h.has_double_weights());
        let doubles = g.edges().iter().filter(|e| e.weight.is_double()).count();
        prop_assert_eq!(h.vertex_count(), g.vertex_count() + doubles);
        prop_assert_eq!(h.edge_count(), g.edge_count() + doubles);
        let before = stc_naive(&g, 1_000_000).unwrap();
        let after = stc_naive(&h, 1_000_000).unwrap();
        prop_assert_eq!(before <= k, after <= k, "stc {} vs expanded {} at K={}", before, after, k);
    }

    #[test]
    fn subdividing_unit_edges_keeps_stc(n in 2usize..7, seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = random_connected_graph(n, 10, &mut rng(seed));
        let e = EdgeId(pick.index(g.edge_count()));
        let h = g.subdivide_edge(e).unwrap();
        prop_assert_eq!(h.vertex_count(), g.vertex_count() + 1);
        prop_assert_eq!(stc_naive(&g, 1_000_000).unwrap(), stc_naive(&h, 1_000_000).unwrap());
    }

    #[test]
    fn simple_conversion_keeps_stc(n in 2usize..5, seed in any::<u64>()) {
        let g = random_weighted(n, 6, 3, seed);
        let h = g.to_simple_graph();
        prop_assert!(h.edges().iter().all(|e| e.weight == EdgeWeight::Single(1)));
        let extra: u32 = g.edges().iter().map(|e| e.weight.outside() - 1).sum();
        prop_assert_eq!(h.vertex_count(), g.vertex_count() + extra as usize);
        prop_assert_eq!(stc_naive(&g, 1_000_000).unwrap(), stc_naive(&h, 1_000_000).unwrap());
    }

    #[test]
    fn path_congestion_agrees_with_cut_congestion(n in 2usize..9, seed in any::<u64>()) {
        let mut r = rng(seed);
        let base = random_connected_graph(n, 14, &mut r);
        let g = with_random_doubles(&base, 8, 0.3, &mut r);
        for tree in first_trees(&g, 4) {
            let report = tree_congestion(&g, &tree).unwrap();
            let by_cut = cut_congestions(&g, &ids(&tree));
            prop_assert_eq!(report.max_congestion, by_cut.iter().map(|p| p.1).max().unwrap());
            for (e, c) in by_cut {
                prop_assert_eq!(report.per_edge[&EdgeId(e)], c);
            }
        }
    }
}

#[test]
fn naive_matches_brute_force_on_weighted_triangle() {
    let mut g = Graph::with_vertices(3);
    g.add_unit_edge(0, 1).unwrap();
    g.add_unit_edge(1, 2).unwrap();
    g.add_edge(VertexId(0), VertexId(2), EdgeWeight::double(1, 4).unwrap()).unwrap();
    assert_eq!(stc_naive(&g, 100).unwrap(), brute_force_stc(&g));
    let h = g.expand_double_weights();
    assert_eq!(stc_naive(&h, 100).unwrap(), brute_force_stc(&h));
}

#[test]
fn theta_graph_from_weighted_edge() {
    let mut g = Graph::with_vertices(2);
    g.add_edge(VertexId(0), VertexId(1), EdgeWeight::Single(3)).unwrap();
    let h = g.to_simple_graph();
    assert_eq!((h.vertex_count(), h.edge_count()), (4, 5));
    // three parallel u–v routes of lengths 1, 2, 2
    assert_eq!(matrix_tree_count(&h), 8.into());
    assert_eq!(enumerate_spanning_trees(&h, |_| ControlFlow::Continue(())).unwrap(), 8);
    assert_eq!(stc_naive(&h, 100).unwrap(), 3);
}

#[test]
fn random_doubles_respect_budget() {
    let mut r = rng(11);
    for _ in 0..50 {
        let n = r.gen_range(2..8);
        let base = random_connected_graph(n, 12, &mut r);
        let g = with_random_doubles(&base, 5, 0.5, &mut r);
        for e in g.edges() {
            if let EdgeWeight::Double { outside, inside } = e.weight {
                assert!(outside <= inside && outside + inside <= 5);
            }
        }
    }
}
