mod common;

use common::{brute_force_optimum, int, random_small_graph};
use corrsub::graph::{SubgraphMask, WeightedGraph};
use corrsub::is_valid;
use corrsub::scoring::score;
use corrsub::solvers::{
    solve_exact, solve_local, ExactConfig, LocalConfig, Optimality, SolveError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

#[test]
fn exact_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let g = random_small_graph(&mut rng, 9, 12);
        let m = g.vertex_count() as u64;
        let (mask, best, _) = brute_force_optimum(&g, m);
        let report = solve_exact(&g, &ExactConfig::default()).unwrap();
        assert_eq!(report.optimality, Optimality::Proven);
        assert_eq!(
            report.best_score.cmp_score(&best),
            Ordering::Equal,
            "graph {i}:\n{}",
            g.to_text()
        );
        assert_eq!(report.best_mask, mask, "graph {i}:\n{}", g.to_text());
    }
}

#[test]
fn local_never_beats_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let g = random_small_graph(&mut rng, 10, 12);
        let exact = solve_exact(&g, &ExactConfig::default()).unwrap();
        let local = solve_local(
            &g,
            &LocalConfig {
                restarts: 4,
                ..LocalConfig::default()
            },
        );
        assert!(is_valid(&g, &local.best_mask));
        assert_eq!(local.optimality, Optimality::Heuristic);
        assert_ne!(
            local.best_score.cmp_score(&exact.best_score),
            Ordering::Greater
        );
        assert!(local
            .best_score
            .bit_identical(&score(&g, &local.best_mask).unwrap()));
    }
}

#[test]
fn local_search_is_deterministic_across_thread_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let g = random_small_graph(&mut rng, 16, 40);
    let config = LocalConfig {
        restarts: 12,
        seed: 5,
        ..LocalConfig::default()
    };
    let runs: Vec<_> = [1, 2, 4]
        .iter()
        .map(|&threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| solve_local(&g, &config))
        })
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.best_mask, runs[0].best_mask);
        assert!(r.best_score.bit_identical(&runs[0].best_score));
    }
}

#[test]
fn exact_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_small_graph(&mut rng, 10, 14);
    let a = solve_exact(&g, &ExactConfig::default()).unwrap();
    let b = solve_exact(&g, &ExactConfig::default()).unwrap();
    assert_eq!(a.best_mask, b.best_mask);
    assert_eq!(a.nodes_explored, b.nodes_explored);
}

#[test]
fn ties_resolve_to_the_smallest_mask() {
    // A 4-cycle with equal weights: every valid mask has zero discrepancy,
    // so the higher degree sum wins and the full cycle is the optimum.
    let g = WeightedGraph::new(vec![int(1); 4], vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let r = solve_exact(&g, &ExactConfig::default()).unwrap();
    assert_eq!(r.best_mask.to_bitstring(), "1111");

    // Alternating weights on a 4-cycle: the two perfect matchings tie
    // exactly and beat the full cycle when m = 5.
    let g = WeightedGraph::new(
        vec![int(0), int(1), int(0), int(1)],
        vec![(0, 1), (1, 2), (2, 3), (0, 3)],
    )
    .unwrap();
    let r = solve_exact(
        &g,
        &ExactConfig {
            multiplier: Some(5),
            ..ExactConfig::default()
        },
    )
    .unwrap();
    assert_eq!(r.best_mask.to_bitstring(), "0110");
    assert_eq!(brute_force_optimum(&g, 5).0, r.best_mask);
}

#[test]
fn node_limit_downgrades_to_heuristic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_small_graph(&mut rng, 14, 40);
    let r = solve_exact(
        &g,
        &ExactConfig {
            node_limit: Some(3),
            ..ExactConfig::default()
        },
    )
    .unwrap();
    assert!(is_valid(&g, &r.best_mask));
    if g.free_edges().len() > 2 {
        assert_eq!(r.optimality, Optimality::Heuristic);
    }
}

#[test]
fn exact_refuses_oversized_inputs() {
    let n = 12;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    let g = WeightedGraph::new((0..n as i64).map(int).collect(), edges).unwrap();
    assert!(matches!(
        solve_exact(&g, &ExactConfig::default()),
        Err(SolveError::TooLarge { .. })
    ));
}

#[test]
fn single_edge_graph_is_trivial() {
    let g = WeightedGraph::new(vec![int(1), int(3)], vec![(0, 1)]).unwrap();
    let r = solve_exact(&g, &ExactConfig::default()).unwrap();
    assert_eq!(r.best_mask, SubgraphMask::full(&g));
}
