//! Exact branch-and-bound and restart hill climbing over valid subgraphs.
//!
//! Both solvers rank candidates with [`ScoreValue::cmp_score`] and break
//! equal scores toward the lexicographically smallest kept-edge bitset, so
//! their answers are comparable and deterministic.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{SubgraphMask, WeightedGraph};
use crate::logdeg::LogProduct;
use crate::scoring::{weighted_term, Direction, IncrementalScore, ScoreValue};

pub const DEFAULT_FREE_EDGE_CAP: usize = 40;

/// Per-vertex lower bounds enumerate subsets of undecided edges up to this
/// many; beyond it the bound falls back to zero.
const LOWER_BOUND_ENUM_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("{free_edges} free edges exceed the exact-search cap of {cap}; pass a node limit to search anyway")]
    TooLarge { free_edges: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimality {
    Proven,
    Heuristic,
}

impl std::fmt::Display for Optimality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Optimality::Proven => "proven",
            Optimality::Heuristic => "heuristic",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub best_mask: SubgraphMask,
    pub best_score: ScoreValue,
    pub nodes_explored: u64,
    pub restarts_used: usize,
    pub wall_time: Duration,
    pub optimality: Optimality,
}

/// True if `(score, mask)` should replace `(best_score, best_mask)`.
pub fn improves(
    score: &ScoreValue,
    mask: &SubgraphMask,
    best_score: &ScoreValue,
    best_mask: &SubgraphMask,
) -> bool {
    match score.cmp_score(best_score) {
        Ordering::Greater => true,
        Ordering::Equal => mask.kept() < best_mask.kept(),
        Ordering::Less => false,
    }
}

fn multiplier_for(g: &WeightedGraph, multiplier: Option<u64>) -> u64 {
    multiplier.unwrap_or(g.vertex_count() as u64)
}

#[derive(Debug, Clone)]
pub struct ExactConfig {
    pub node_limit: Option<u64>,
    pub free_edge_cap: usize,
    /// Log multiplier of the objective; the vertex count when `None`.
    pub multiplier: Option<u64>,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            node_limit: None,
            free_edge_cap: DEFAULT_FREE_EDGE_CAP,
            multiplier: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeState {
    Undecided,
    Kept,
    Dropped,
}

struct Search<'g> {
    g: &'g WeightedGraph,
    multiplier: u64,
    order: Vec<usize>,
    state: Vec<EdgeState>,
    kept_degree: Vec<usize>,
    kept_sum: Vec<BigRational>,
    undecided: Vec<usize>,
    /// Lower bound on `d·ND` over completions; `None` if no completion keeps
    /// the vertex covered.
    lower: Vec<Option<BigRational>>,
    infeasible: usize,
    lower_total: BigRational,
    /// Product of the largest degrees still reachable.
    upper_log: LogProduct,
    best_mask: SubgraphMask,
    best_score: ScoreValue,
    nodes: u64,
    node_limit: Option<u64>,
    aborted: bool,
}

impl<'g> Search<'g> {
    fn new(
        g: &'g WeightedGraph,
        multiplier: u64,
        node_limit: Option<u64>,
        incumbent: (SubgraphMask, ScoreValue),
    ) -> Self {
        let n = g.vertex_count();
        let mut order = g.free_edges();
        // Largest endpoint weight gap first; ties by edge id.
        order.sort_by(|&a, &b| {
            let gap = |e: usize| {
                let (u, v) = g.edge(e);
                (g.weight(u) - g.weight(v)).abs()
            };
            gap(b).cmp(&gap(a)).then(a.cmp(&b))
        });
        let mut state = vec![EdgeState::Kept; g.edge_count()];
        for &e in &order {
            state[e] = EdgeState::Undecided;
        }
        let mut search = Self {
            g,
            multiplier,
            order,
            state,
            kept_degree: vec![0; n],
            kept_sum: vec![BigRational::zero(); n],
            undecided: vec![0; n],
            lower: vec![Some(BigRational::zero()); n],
            infeasible: 0,
            lower_total: BigRational::zero(),
            upper_log: LogProduct::from_degrees((0..n).map(|v| g.degree(v))),
            best_mask: incumbent.0,
            best_score: incumbent.1,
            nodes: 0,
            node_limit,
            aborted: false,
        };
        for v in 0..n {
            for &(u, e) in g.incident(v) {
                match search.state[e] {
                    EdgeState::Kept => {
                        search.kept_degree[v] += 1;
                        search.kept_sum[v] += g.weight(u);
                    }
                    EdgeState::Undecided => search.undecided[v] += 1,
                    EdgeState::Dropped => {}
                }
            }
        }
        for v in 0..n {
            search.refresh_lower(v);
        }
        search
    }

    fn compute_lower(&self, v: usize) -> Option<BigRational> {
        let kept = self.kept_degree[v];
        let open = self.undecided[v];
        if kept + open == 0 {
            return None;
        }
        let f = self.g.weight(v);
        if open == 0 {
            return Some(weighted_term(f, kept, &self.kept_sum[v]));
        }
        if open > LOWER_BOUND_ENUM_LIMIT {
            return Some(BigRational::zero());
        }
        let weights: Vec<&BigRational> = self
            .g
            .incident(v)
            .iter()
            .filter(|&&(_, e)| self.state[e] == EdgeState::Undecided)
            .map(|&(u, _)| self.g.weight(u))
            .collect();
        let mut best: Option<BigRational> = None;
        for subset in 0u32..(1 << open) {
            let d = kept + subset.count_ones() as usize;
            if d == 0 {
                continue;
            }
            let mut sum = self.kept_sum[v].clone();
            for (i, w) in weights.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    sum += *w;
                }
            }
            let term = weighted_term(f, d, &sum);
            if term.is_zero() {
                return Some(term);
            }
            if best.as_ref().is_none_or(|b| term < *b) {
                best = Some(term);
            }
        }
        best
    }

    fn refresh_lower(&mut self, v: usize) -> Option<BigRational> {
        let new = self.compute_lower(v);
        self.set_lower(v, new)
    }

    /// Installs a new bound for `v`, returning the previous one.
    fn set_lower(&mut self, v: usize, new: Option<BigRational>) -> Option<BigRational> {
        let old = std::mem::replace(&mut self.lower[v], new);
        match &old {
            Some(x) => self.lower_total -= x,
            None => self.infeasible -= 1,
        }
        match &self.lower[v] {
            Some(x) => self.lower_total += x,
            None => self.infeasible += 1,
        }
        old
    }

    fn decide(&mut self, e: usize, keep: bool) -> [Option<BigRational>; 2] {
        let (a, b) = self.g.edge(e);
        self.state[e] = if keep {
            EdgeState::Kept
        } else {
            EdgeState::Dropped
        };
        for (x, y) in [(a, b), (b, a)] {
            self.undecided[x] -= 1;
            if keep {
                self.kept_degree[x] += 1;
                self.kept_sum[x] += self.g.weight(y);
            } else {
                let reach = self.kept_degree[x] + self.undecided[x];
                self.upper_log.replace(reach + 1, reach.max(1));
            }
        }
        [self.refresh_lower(a), self.refresh_lower(b)]
    }

    fn undo(&mut self, e: usize, keep: bool, saved: [Option<BigRational>; 2]) {
        let (a, b) = self.g.edge(e);
        self.state[e] = EdgeState::Undecided;
        for (x, y) in [(a, b), (b, a)] {
            if keep {
                self.kept_degree[x] -= 1;
                self.kept_sum[x] -= self.g.weight(y);
            } else {
                let reach = self.kept_degree[x] + self.undecided[x];
                self.upper_log.replace(reach.max(1), reach + 1);
            }
            self.undecided[x] += 1;
        }
        let [la, lb] = saved;
        self.set_lower(a, la);
        self.set_lower(b, lb);
    }

    fn bound_is_worse(&self) -> bool {
        if self.infeasible > 0 {
            return true;
        }
        let bound = ScoreValue::from_parts(
            self.upper_log.clone(),
            self.lower_total.clone(),
            self.multiplier,
        );
        strictly_worse(&bound, &self.best_score)
    }

    fn current_mask(&self) -> SubgraphMask {
        let kept = self.state.iter().map(|&s| s == EdgeState::Kept).collect();
        SubgraphMask::from_kept(self.g, kept).expect("length matches")
    }

    fn run(&mut self, depth: usize) {
        if self.aborted {
            return;
        }
        if self.node_limit.is_some_and(|limit| self.nodes >= limit) {
            self.aborted = true;
            return;
        }
        self.nodes += 1;
        if self.bound_is_worse() {
            return;
        }
        if depth == self.order.len() {
            // All decided: the bounds are exact.
            let score = ScoreValue::from_parts(
                self.upper_log.clone(),
                self.lower_total.clone(),
                self.multiplier,
            );
            let mask = self.current_mask();
            if improves(&score, &mask, &self.best_score, &self.best_mask) {
                self.best_mask = mask;
                self.best_score = score;
            }
            return;
        }
        let e = self.order[depth];
        for keep in [false, true] {
            let saved = self.decide(e, keep);
            self.run(depth + 1);
            self.undo(e, keep, saved);
            if self.aborted {
                return;
            }
        }
    }
}

/// `bound < incumbent`, with a float margin whenever the comparison cannot
/// be decided exactly.
fn strictly_worse(bound: &ScoreValue, incumbent: &ScoreValue) -> bool {
    if bound.cmp_score(incumbent) != Ordering::Less {
        return false;
    }
    match (bound.finite_value(), incumbent.finite_value()) {
        (Some(b), Some(i))
            if bound.log_degree() != incumbent.log_degree()
                && bound.discrepancy_total() != incumbent.discrepancy_total() =>
        {
            i - b > 1e-9 * (1.0 + i.abs())
        }
        _ => true,
    }
}

/// Maximum-score valid subgraph by branch-and-bound over the free edges.
///
/// Forced edges are kept throughout. A branch is cut when the largest
/// reachable degree-log sum combined with the smallest reachable
/// discrepancy total cannot beat the incumbent.
pub fn solve_exact(g: &WeightedGraph, config: &ExactConfig) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let free = g.free_edges().len();
    if free > config.free_edge_cap && config.node_limit.is_none() {
        return Err(SolveError::TooLarge {
            free_edges: free,
            cap: config.free_edge_cap,
        });
    }
    let multiplier = multiplier_for(g, config.multiplier);
    // Seed the incumbent with a deterministic climb from the whole graph.
    let (seed_state, _, _) = climb(g, SubgraphMask::full(g), multiplier, usize::MAX);
    let incumbent = (seed_state.mask().clone(), seed_state.score());

    let mut search = Search::new(g, multiplier, config.node_limit, incumbent);
    search.run(0);
    Ok(SolveReport {
        best_mask: search.best_mask,
        best_score: search.best_score,
        nodes_explored: search.nodes,
        restarts_used: 0,
        wall_time: start.elapsed(),
        optimality: if search.aborted {
            Optimality::Heuristic
        } else {
            Optimality::Proven
        },
    })
}

#[derive(Debug, Clone)]
pub struct LocalConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_passes: usize,
    pub multiplier: Option<u64>,
}

impl Default for LocalConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
            max_passes: 10_000,
            multiplier: None,
        }
    }
}

/// Steepest-ascent hill climbing over validity-preserving single-edge
/// toggles. Returns the final state, the number of improving passes and the
/// number of toggles evaluated.
pub fn climb(
    g: &WeightedGraph,
    start: SubgraphMask,
    multiplier: u64,
    max_passes: usize,
) -> (IncrementalScore<'_>, usize, u64) {
    let mut state =
        IncrementalScore::with_multiplier(g, start, multiplier).expect("start mask must be valid");
    let mut passes = 0;
    let mut evaluated = 0u64;
    while passes < max_passes {
        let current = state.score();
        let mut best: Option<(usize, Direction, ScoreValue)> = None;
        for e in 0..g.edge_count() {
            if !state.can_toggle(e) {
                continue;
            }
            let dir = if state.mask().is_kept(e) {
                Direction::Remove
            } else {
                Direction::Add
            };
            let candidate = state.preview(e, dir).expect("toggle checked");
            evaluated += 1;
            let beats_best = best
                .as_ref()
                .is_none_or(|(_, _, b)| candidate.cmp_score(b) == Ordering::Greater);
            if candidate.cmp_score(&current) == Ordering::Greater && beats_best {
                best = Some((e, dir, candidate));
            }
        }
        match best {
            Some((e, dir, _)) => {
                state.apply(e, dir).expect("toggle checked");
                passes += 1;
            }
            None => break,
        }
    }
    (state, passes, evaluated)
}

/// Forced edges plus each free edge with probability 1/2; any vertex left
/// uncovered then gets one uniformly chosen incident edge.
pub fn random_valid_mask<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> SubgraphMask {
    let mut mask = SubgraphMask::empty(g);
    for e in 0..g.edge_count() {
        if g.is_forced(e) || rng.gen_bool(0.5) {
            mask.set(g, e, true);
        }
    }
    for v in 0..g.vertex_count() {
        if mask.degree(v) == 0 {
            let incident = g.incident(v);
            let (_, e) = incident[rng.gen_range(0..incident.len())];
            mask.set(g, e, true);
        }
    }
    mask
}

/// RNG for restart `index` under `seed`; independent of thread scheduling.
pub fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Hill climbing from the whole graph and from `restarts` random valid masks.
pub fn solve_local(g: &WeightedGraph, config: &LocalConfig) -> SolveReport {
    let start = Instant::now();
    let multiplier = multiplier_for(g, config.multiplier);
    let runs: Vec<(SubgraphMask, ScoreValue, u64)> = (0..=config.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let init = if r == 0 {
                SubgraphMask::full(g)
            } else {
                random_valid_mask(g, &mut restart_rng(config.seed, r))
            };
            let (state, _, evaluated) = climb(g, init, multiplier, config.max_passes);
            let score = state.score();
            (state.into_mask(), score, evaluated)
        })
        .collect();

    let nodes = runs.iter().map(|r| r.2).sum();
    let mut runs = runs.into_iter();
    let (mut best_mask, mut best_score, _) = runs.next().expect("at least one run");
    for (mask, score, _) in runs {
        if improves(&score, &mask, &best_score, &best_mask) {
            best_mask = mask;
            best_score = score;
        }
    }
    SolveReport {
        best_mask,
        best_score,
        nodes_explored: nodes,
        restarts_used: config.restarts,
        wall_time: start.elapsed(),
        optimality: Optimality::Heuristic,
    }
}

/// Calls `visit` on every valid mask, enumerating subsets of the free edges
/// in increasing binary order. Intended for small instances.
pub fn for_each_valid_mask(g: &WeightedGraph, mut visit: impl FnMut(&SubgraphMask)) {
    let free = g.free_edges();
    assert!(free.len() < 63, "too many free edges to enumerate");
    let mut mask = SubgraphMask::full(g);
    for bits in 0u64..(1u64 << free.len()) {
        for (i, &e) in free.iter().enumerate() {
            mask.set(g, e, bits >> i & 1 == 1);
        }
        if mask.degrees().iter().all(|&d| d > 0) {
            visit(&mask);
        }
    }
}
