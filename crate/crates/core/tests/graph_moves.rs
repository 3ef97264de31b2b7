use std::collections::BTreeSet;

use proptest::prelude::*;
use scalemix::graph::{
    can_add_edge, can_delete_edge, clique_decomposition, graph_log_prior, is_decomposable,
    propose_edge_move, LegalMoves, MoveKind,
};
use scalemix::{DecomposableGraph, EdgePriorWeights};

/// Chordality by repeated removal of simplicial vertices.
fn chordal_by_elimination(q: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let has = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    let mut alive: Vec<usize> = (0..q).collect();
    while !alive.is_empty() {
        let simplicial = alive.iter().position(|&v| {
            let nb: Vec<usize> = alive.iter().copied().filter(|&w| w != v && has(v, w)).collect();
            nb.iter()
                .enumerate()
                .all(|(i, &a)| nb[i + 1..].iter().all(|&b| has(a, b)))
        });
        match simplicial {
            Some(i) => {
                alive.remove(i);
            }
            None => return false,
        }
    }
    true
}

fn maximal_cliques_brute_force(q: usize, edges: &BTreeSet<(usize, usize)>) -> BTreeSet<Vec<usize>> {
    let has = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    let complete: Vec<u32> = (1u32..(1 << q))
        .filter(|&m| {
            let vs: Vec<usize> = (0..q).filter(|&i| m >> i & 1 == 1).collect();
            vs.iter()
                .enumerate()
                .all(|(i, &a)| vs[i + 1..].iter().all(|&b| has(a, b)))
        })
        .collect();
    complete
        .iter()
        .filter(|&&m| !complete.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..q).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

fn edge_set(g: &DecomposableGraph) -> BTreeSet<(usize, usize)> {
    g.edges().into_iter().collect()
}

fn check_structure(g: &DecomposableGraph) {
    let q = g.num_vertices();
    let edges = edge_set(g);
    assert!(chordal_by_elimination(q, &edges));
    let cliques: BTreeSet<Vec<usize>> = g
        .cliques()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort();
            c
        })
        .collect();
    assert_eq!(cliques, maximal_cliques_brute_force(q, &edges));
    // Edges rebuilt from cliques.
    let mut rebuilt = BTreeSet::new();
    for c in g.cliques() {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                rebuilt.insert((a.min(b), a.max(b)));
            }
        }
    }
    assert_eq!(rebuilt, edges);
    // Running intersection.
    assert_eq!(g.separators().len() + 1, g.cliques().len().max(1));
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for (j, c) in g.cliques().iter().enumerate() {
        if j > 0 {
            let mut s: Vec<usize> = c.iter().copied().filter(|v| seen.contains(v)).collect();
            s.sort();
            let mut sep = g.separators()[j - 1].clone();
            sep.sort();
            assert_eq!(s, sep);
            assert!(g.cliques()[..j]
                .iter()
                .any(|earlier| sep.iter().all(|v| earlier.contains(v))));
        }
        seen.extend(c.iter().copied());
    }
}

#[test]
fn classic_cases() {
    let triangle = DecomposableGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    assert!(is_decomposable(triangle.adjacency()));
    let square = scalemix::graph::adjacency_from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    assert!(!is_decomposable(&square));
    assert!(clique_decomposition(&square).is_err());
}

#[test]
fn bandwidth_two_graph_on_fifty_vertices() {
    let edges: Vec<(usize, usize)> = (0..50)
        .flat_map(|u| ((u + 1)..(u + 3).min(50)).map(move |v| (u, v)))
        .collect();
    let adj = scalemix::graph::adjacency_from_edges(50, &edges).unwrap();
    assert!(is_decomposable(&adj));
    // Natural order is a perfect elimination order: later neighbours are complete.
    let set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    for v in 0..50 {
        let later: Vec<usize> = ((v + 1)..50).filter(|&w| set.contains(&(v, w))).collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                assert!(set.contains(&(a, b)));
            }
        }
    }
    let g = DecomposableGraph::from_adjacency(adj).unwrap();
    assert_eq!(g.cliques().len(), 48);
    assert!(g.cliques().iter().all(|c| c.len() == 3));
}

#[test]
fn path_cliques_match_brute_force() {
    let g = DecomposableGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let expect = maximal_cliques_brute_force(3, &edge_set(&g));
    assert_eq!(expect, BTreeSet::from([vec![0, 1], vec![1, 2]]));
    check_structure(&g);
    assert_eq!(g.separators(), &[vec![1]]);
}

#[test]
fn empty_and_complete_decompositions() {
    let e = DecomposableGraph::empty(5);
    assert_eq!(e.cliques().len(), 5);
    assert!(e.separators().iter().all(|s| s.is_empty()));
    let c = DecomposableGraph::complete(5);
    assert_eq!(c.cliques(), &[vec![0, 1, 2, 3, 4]]);
    let legal = LegalMoves::of(&c);
    assert!(legal.adds.is_empty());
    assert_eq!(legal.deletes.len(), 10);
    let legal = LegalMoves::of(&e);
    assert!(legal.deletes.is_empty());
    assert_eq!(legal.adds.len(), 10);
}

#[test]
fn long_walk_stays_decomposable() {
    let mut rng = scalemix::rng_from_seed(11);
    let mut g = DecomposableGraph::empty(8);
    for step in 0..10_000 {
        let (next, mv) = propose_edge_move(&g, &mut rng).unwrap();
        assert_eq!(next.has_edge(mv.u, mv.v), mv.kind == MoveKind::Add);
        assert!(chordal_by_elimination(8, &edge_set(&next)));
        if step % 97 == 0 {
            check_structure(&next);
        }
        g = next;
    }
}

#[test]
fn prior_examples() {
    let e = DecomposableGraph::empty(3);
    let half = EdgePriorWeights::uniform(3, 0.5).unwrap();
    assert!((graph_log_prior(&e, &half) - 3.0 * 0.5f64.ln()).abs() < 1e-15);
    let w = EdgePriorWeights::uniform(3, 0.1).unwrap();
    let g = DecomposableGraph::from_edges(3, &[(0, 1)]).unwrap();
    let expect = 0.1f64.ln() + 2.0 * 0.9f64.ln();
    assert!((graph_log_prior(&g, &w) - expect).abs() < 1e-15);
    let delta = graph_log_prior(&g, &w) - graph_log_prior(&e, &w);
    assert!((delta - (1.0f64 / 9.0).ln()).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_walks_keep_invariants(seed in any::<u64>(), q in 2usize..9, steps in 1usize..60) {
        let mut rng = scalemix::rng_from_seed(seed);
        let weights = EdgePriorWeights::uniform(q, 0.3).unwrap();
        let mut g = DecomposableGraph::empty(q);
        for _ in 0..steps {
            let (next, mv) = propose_edge_move(&g, &mut rng).unwrap();
            check_structure(&next);
            // The reverse move is available and reported consistently.
            let forward = LegalMoves::of(&g);
            let reverse = LegalMoves::of(&next);
            let back = if mv.kind == MoveKind::Add { MoveKind::Delete } else { MoveKind::Add };
            prop_assert_eq!(Some(mv.log_forward), forward.log_prob(mv.kind));
            prop_assert_eq!(Some(mv.log_reverse), reverse.log_prob(back));
            let list = if back == MoveKind::Add { &reverse.adds } else { &reverse.deletes };
            prop_assert!(list.contains(&(mv.u.min(mv.v), mv.u.max(mv.v))));
            // Prior difference is the edge log-odds.
            let d = graph_log_prior(&next, &weights) - graph_log_prior(&g, &weights);
            let lo = (0.3f64 / 0.7).ln();
            let expect = if mv.kind == MoveKind::Add { lo } else { -lo };
            prop_assert!((d - expect).abs() < 1e-12);
            g = next;
        }
    }

    #[test]
    fn legality_matches_elimination_oracle(seed in any::<u64>(), q in 2usize..9, steps in 0usize..40) {
        let mut rng = scalemix::rng_from_seed(seed);
        let mut g = DecomposableGraph::empty(q);
        for _ in 0..steps {
            g = propose_edge_move(&g, &mut rng).unwrap().0;
        }
        let edges: BTreeSet<(usize, usize)> = g.edges().into_iter().collect();
        for u in 0..q {
            for v in (u + 1)..q {
                let mut toggled = edges.clone();
                if !toggled.remove(&(u, v)) {
                    toggled.insert((u, v));
                }
                let chordal = chordal_by_elimination(q, &toggled);
                if g.has_edge(u, v) {
                    prop_assert!(!can_add_edge(&g, u, v));
                    prop_assert_eq!(can_delete_edge(&g, u, v), chordal);
                } else {
                    prop_assert!(!can_delete_edge(&g, u, v));
                    prop_assert_eq!(can_add_edge(&g, u, v), chordal);
                }
            }
        }
    }
}
