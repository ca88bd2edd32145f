#![allow(dead_code)]

use corrsub::graph::{SubgraphMask, WeightedGraph};
use corrsub::reduction::Formula;
use corrsub::scoring::{score_with_multiplier, ScoreValue};
use num_rational::BigRational;
use rand::Rng;
use std::cmp::Ordering;

pub const SAT3: &str = "3 3\n1 2 3\n1 2 3\n1 2 3\n";
pub const UNSAT4: &str = "4 4\n1 2 3\n1 2 4\n1 3 4\n2 3 4\n";

pub fn sat3() -> Formula {
    Formula::parse(SAT3).unwrap()
}

pub fn unsat4() -> Formula {
    Formula::parse(UNSAT4).unwrap()
}

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Random simple graph on `2..=max_vertices` vertices without isolated
/// vertices; weights are small integers or halves/thirds.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, density: f64) -> WeightedGraph {
    let n = rng.gen_range(2..=max_vertices);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    for v in 0..n {
        if !edges.iter().any(|&(a, b)| a == v || b == v) {
            let mut u = rng.gen_range(0..n - 1);
            if u >= v {
                u += 1;
            }
            edges.push((u.min(v), u.max(v)));
        }
    }
    let weights = (0..n)
        .map(|_| {
            BigRational::new(
                rng.gen_range(-6i64..=6).into(),
                rng.gen_range(1i64..=3).into(),
            )
        })
        .collect();
    WeightedGraph::new(weights, edges).unwrap()
}

/// Random graph with at most `max_free` free edges.
pub fn random_small_graph<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_free: usize,
) -> WeightedGraph {
    loop {
        let density = rng.gen_range(0.15..0.6);
        let g = random_graph(rng, max_vertices, density);
        if g.free_edges().len() <= max_free {
            return g;
        }
    }
}

/// Best valid mask by brute force over every subset of the free edges,
/// scored from scratch; equal scores resolve to the lexicographically
/// smallest kept-edge vector.
pub fn brute_force_optimum(
    g: &WeightedGraph,
    multiplier: u64,
) -> (SubgraphMask, ScoreValue, usize) {
    let free = g.free_edges();
    let mut best: Option<(SubgraphMask, ScoreValue)> = None;
    let mut valid = 0;
    for bits in 0u64..(1 << free.len()) {
        let mut kept = vec![true; g.edge_count()];
        for (i, &e) in free.iter().enumerate() {
            kept[e] = bits >> i & 1 == 1;
        }
        let h = SubgraphMask::from_kept(g, kept).unwrap();
        if (0..g.vertex_count()).any(|v| h.degree(v) == 0) {
            continue;
        }
        valid += 1;
        let s = score_with_multiplier(g, &h, multiplier).unwrap();
        let replace = match &best {
            None => true,
            Some((bm, bs)) => match s.cmp_score(bs) {
                Ordering::Greater => true,
                Ordering::Equal => h.kept() < bm.kept(),
                Ordering::Less => false,
            },
        };
        if replace {
            best = Some((h, s));
        }
    }
    let (m, s) = best.expect("the whole graph is always valid");
    (m, s, valid)
}
