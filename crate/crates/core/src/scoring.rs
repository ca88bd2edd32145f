//! Neighbourhood discrepancy and the subgraph score
//!
//! ```text
//! score(H) = Σ_v ln d_H(v) − n · ln S,   S = Σ_v d_H(v) · ND_H(v)
//! ND_H(v)  = (f(v) − mean_{u ∈ N_H(v)} f(u))²
//! ```
//!
//! `S` is kept as an exact rational; only the two logarithms are floats.
//! `n` is the vertex count unless a different multiplier is requested.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{format_rational_pq, SubgraphMask, WeightedGraph};
use crate::logdeg::LogProduct;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error("mask length {found} does not match edge count {expected}")]
    MaskLength { found: usize, expected: usize },
    #[error("subgraph is not valid: vertex {vertex} has no kept edge")]
    InvalidMask { vertex: usize },
    #[error("vertex {vertex} is isolated in the subgraph; its discrepancy is undefined")]
    DegenerateVertex { vertex: usize },
    #[error("removing edge {edge} would isolate vertex {vertex}")]
    WouldIsolate { edge: usize, vertex: usize },
    #[error("edge {edge} is {state}; cannot {action} it")]
    DirectionMismatch {
        edge: usize,
        state: &'static str,
        action: &'static str,
    },
}

/// Adding or removing one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Add,
    Remove,
}

/// `ln` of a positive rational without overflowing on large operands.
pub fn ln_rational(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_normal() && x > 0.0 {
            return x.ln();
        }
    }
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Score of a valid subgraph. `value` is `None` for the positive-infinity
/// sentinel, which occurs exactly when the discrepancy total is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreValue {
    log_degree: LogProduct,
    log_degree_sum: f64,
    discrepancy_total: BigRational,
    multiplier: u64,
    value: Option<f64>,
}

impl ScoreValue {
    pub fn from_parts(
        log_degree: LogProduct,
        discrepancy_total: BigRational,
        multiplier: u64,
    ) -> Self {
        let log_degree_sum = log_degree.ln();
        let value = if discrepancy_total.is_zero() {
            None
        } else {
            Some(log_degree_sum - multiplier as f64 * ln_rational(&discrepancy_total))
        };
        Self {
            log_degree,
            log_degree_sum,
            discrepancy_total,
            multiplier,
            value,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }

    /// The finite value, or `f64::INFINITY` for the sentinel.
    pub fn value(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }

    pub fn finite_value(&self) -> Option<f64> {
        self.value
    }

    /// `Σ_v ln d_H(v)`.
    pub fn log_degree_sum(&self) -> f64 {
        self.log_degree_sum
    }

    pub fn log_degree(&self) -> &LogProduct {
        &self.log_degree
    }

    /// `S = Σ_v d_H(v) · ND_H(v)`.
    pub fn discrepancy_total(&self) -> &BigRational {
        &self.discrepancy_total
    }

    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    /// Total order on scores; `Greater` means better.
    ///
    /// When the degree-log sums are exactly equal the discrepancy totals are
    /// compared exactly. Two infinite scores rank by the degree-log sum.
    pub fn cmp_score(&self, other: &Self) -> Ordering {
        match (self.value, other.value) {
            (None, None) => self.log_degree.cmp_exact(&other.log_degree),
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => {
                if self.multiplier == other.multiplier && self.log_degree == other.log_degree {
                    other.discrepancy_total.cmp(&self.discrepancy_total)
                } else if self.multiplier == other.multiplier
                    && self.discrepancy_total == other.discrepancy_total
                {
                    self.log_degree.cmp_exact(&other.log_degree)
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    /// `Σ ln d` is bit-identical and `S` is equal.
    pub fn bit_identical(&self, other: &Self) -> bool {
        self.log_degree == other.log_degree
            && self.log_degree_sum.to_bits() == other.log_degree_sum.to_bits()
            && self.discrepancy_total == other.discrepancy_total
            && self.multiplier == other.multiplier
            && self.value.map(f64::to_bits) == other.value.map(f64::to_bits)
    }
}

impl fmt::Display for ScoreValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{v:.12}"),
            None => f.write_str("+inf"),
        }
    }
}

/// Prints `S` as `p/q`.
pub fn format_total(score: &ScoreValue) -> String {
    format_rational_pq(score.discrepancy_total())
}

/// `d · ND` for a vertex with kept degree `d` and kept-neighbour weight sum
/// `sum`: `(d·f(v) − sum)² / d`.
pub(crate) fn weighted_term(weight: &BigRational, degree: usize, sum: &BigRational) -> BigRational {
    let d = BigRational::from_integer(degree.into());
    let diff = weight * &d - sum;
    &diff * &diff / d
}

fn neighbour_sum(g: &WeightedGraph, h: &SubgraphMask, v: usize) -> BigRational {
    h.neighbours(g, v)
        .fold(BigRational::zero(), |acc, u| acc + g.weight(u))
}

fn check_len(g: &WeightedGraph, h: &SubgraphMask) -> Result<(), ScoreError> {
    if h.len() != g.edge_count() {
        return Err(ScoreError::MaskLength {
            found: h.len(),
            expected: g.edge_count(),
        });
    }
    Ok(())
}

/// `ND_H(v, f)`, exactly.
pub fn neighbourhood_discrepancy(
    g: &WeightedGraph,
    h: &SubgraphMask,
    v: usize,
) -> Result<BigRational, ScoreError> {
    check_len(g, h)?;
    let d = h.degree(v);
    if d == 0 {
        return Err(ScoreError::DegenerateVertex { vertex: v });
    }
    let mean = neighbour_sum(g, h, v) / BigRational::from_integer(d.into());
    let diff = g.weight(v) - mean;
    Ok(&diff * &diff)
}

/// `S = Σ_v d_H(v) · ND_H(v, f)` for a valid subgraph.
pub fn discrepancy_total(g: &WeightedGraph, h: &SubgraphMask) -> Result<BigRational, ScoreError> {
    check_len(g, h)?;
    let mut total = BigRational::zero();
    for v in 0..g.vertex_count() {
        let d = h.degree(v);
        if d == 0 {
            return Err(ScoreError::InvalidMask { vertex: v });
        }
        total += weighted_term(g.weight(v), d, &neighbour_sum(g, h, v));
    }
    Ok(total)
}

/// Score with the vertex count as the log multiplier.
pub fn score(g: &WeightedGraph, h: &SubgraphMask) -> Result<ScoreValue, ScoreError> {
    score_with_multiplier(g, h, g.vertex_count() as u64)
}

pub fn score_with_multiplier(
    g: &WeightedGraph,
    h: &SubgraphMask,
    multiplier: u64,
) -> Result<ScoreValue, ScoreError> {
    let total = discrepancy_total(g, h)?;
    let log_degree = LogProduct::from_degrees(h.degrees().iter().copied());
    Ok(ScoreValue::from_parts(log_degree, total, multiplier))
}

/// A valid subgraph with per-vertex caches, supporting single-edge toggles
/// that touch only the two endpoints.
#[derive(Debug, Clone)]
pub struct IncrementalScore<'g> {
    graph: &'g WeightedGraph,
    mask: SubgraphMask,
    sums: Vec<BigRational>,
    terms: Vec<BigRational>,
    total: BigRational,
    log_degree: LogProduct,
    multiplier: u64,
}

impl<'g> IncrementalScore<'g> {
    pub fn new(graph: &'g WeightedGraph, mask: SubgraphMask) -> Result<Self, ScoreError> {
        Self::with_multiplier(graph, mask, graph.vertex_count() as u64)
    }

    pub fn with_multiplier(
        graph: &'g WeightedGraph,
        mask: SubgraphMask,
        multiplier: u64,
    ) -> Result<Self, ScoreError> {
        check_len(graph, &mask)?;
        if let Some(vertex) = mask.degrees().iter().position(|&d| d == 0) {
            return Err(ScoreError::InvalidMask { vertex });
        }
        let sums: Vec<_> = (0..graph.vertex_count())
            .map(|v| neighbour_sum(graph, &mask, v))
            .collect();
        let terms: Vec<_> = (0..graph.vertex_count())
            .map(|v| weighted_term(graph.weight(v), mask.degree(v), &sums[v]))
            .collect();
        let total = terms.iter().fold(BigRational::zero(), |acc, t| acc + t);
        let log_degree = LogProduct::from_degrees(mask.degrees().iter().copied());
        Ok(Self {
            graph,
            mask,
            sums,
            terms,
            total,
            log_degree,
            multiplier,
        })
    }

    pub fn mask(&self) -> &SubgraphMask {
        &self.mask
    }

    pub fn into_mask(self) -> SubgraphMask {
        self.mask
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn score(&self) -> ScoreValue {
        ScoreValue::from_parts(self.log_degree.clone(), self.total.clone(), self.multiplier)
    }

    /// Whether toggling `e` keeps the subgraph valid.
    pub fn can_toggle(&self, e: usize) -> bool {
        let (u, v) = self.graph.edge(e);
        !self.mask.is_kept(e) || (self.mask.degree(u) > 1 && self.mask.degree(v) > 1)
    }

    fn check(&self, e: usize, dir: Direction) -> Result<(), ScoreError> {
        let kept = self.mask.is_kept(e);
        match (dir, kept) {
            (Direction::Add, true) => Err(ScoreError::DirectionMismatch {
                edge: e,
                state: "already kept",
                action: "add",
            }),
            (Direction::Remove, false) => Err(ScoreError::DirectionMismatch {
                edge: e,
                state: "not kept",
                action: "remove",
            }),
            (Direction::Remove, true) => {
                let (u, v) = self.graph.edge(e);
                match [u, v].into_iter().find(|&x| self.mask.degree(x) == 1) {
                    Some(vertex) => Err(ScoreError::WouldIsolate { edge: e, vertex }),
                    None => Ok(()),
                }
            }
            (Direction::Add, false) => Ok(()),
        }
    }

    /// Endpoint caches after toggling `e`: `(vertex, degree, sum, term)`.
    fn toggled_endpoints(
        &self,
        e: usize,
        dir: Direction,
    ) -> [(usize, usize, BigRational, BigRational); 2] {
        let (a, b) = self.graph.edge(e);
        [(a, b), (b, a)].map(|(x, other)| {
            let (d, sum) = match dir {
                Direction::Add => (
                    self.mask.degree(x) + 1,
                    &self.sums[x] + self.graph.weight(other),
                ),
                Direction::Remove => (
                    self.mask.degree(x) - 1,
                    &self.sums[x] - self.graph.weight(other),
                ),
            };
            let term = weighted_term(self.graph.weight(x), d, &sum);
            (x, d, sum, term)
        })
    }

    /// Score after toggling `e`, without committing.
    pub fn preview(&self, e: usize, dir: Direction) -> Result<ScoreValue, ScoreError> {
        self.check(e, dir)?;
        let mut total = self.total.clone();
        let mut log_degree = self.log_degree.clone();
        for (x, d, _, term) in self.toggled_endpoints(e, dir) {
            total -= &self.terms[x];
            total += term;
            log_degree.replace(self.mask.degree(x), d);
        }
        Ok(ScoreValue::from_parts(log_degree, total, self.multiplier))
    }

    /// Toggles `e` and returns the new score.
    pub fn apply(&mut self, e: usize, dir: Direction) -> Result<ScoreValue, ScoreError> {
        self.check(e, dir)?;
        for (x, d, sum, term) in self.toggled_endpoints(e, dir) {
            self.total -= &self.terms[x];
            self.total += &term;
            self.log_degree.replace(self.mask.degree(x), d);
            self.sums[x] = sum;
            self.terms[x] = term;
        }
        self.mask.toggle(self.graph, e);
        Ok(self.score())
    }

    /// Flips `e` in whichever direction applies.
    pub fn toggle(&mut self, e: usize) -> Result<ScoreValue, ScoreError> {
        let dir = if self.mask.is_kept(e) {
            Direction::Remove
        } else {
            Direction::Add
        };
        self.apply(e, dir)
    }
}

/// `score_delta`: applies one toggle to `state` and returns the resulting score.
pub fn score_delta(
    state: &mut IncrementalScore<'_>,
    e: usize,
    dir: Direction,
) -> Result<ScoreValue, ScoreError> {
    state.apply(e, dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn path_middle_has_zero_discrepancy() {
        let g = p3();
        let h = SubgraphMask::full(&g);
        assert_eq!(neighbourhood_discrepancy(&g, &h, 1).unwrap(), q(0, 1));
        assert_eq!(neighbourhood_discrepancy(&g, &h, 0).unwrap(), q(1, 1));
    }

    #[test]
    fn isolated_vertex_is_degenerate() {
        let g = p3();
        let h = SubgraphMask::from_edge_ids(&g, [0]).unwrap();
        assert_eq!(
            neighbourhood_discrepancy(&g, &h, 2),
            Err(ScoreError::DegenerateVertex { vertex: 2 })
        );
        assert_eq!(score(&g, &h), Err(ScoreError::InvalidMask { vertex: 2 }));
    }

    #[test]
    fn path_score() {
        let g = p3();
        let s = score(&g, &SubgraphMask::full(&g)).unwrap();
        assert_eq!(s.discrepancy_total(), &q(2, 1));
        assert!((s.value() - (-2.0 * 2f64.ln())).abs() < 1e-12);
        assert_eq!(s.to_string(), "-1.386294361120");
        assert_eq!(format_total(&s), "2/1");
    }

    #[test]
    fn equal_pair_is_infinite() {
        let g = graph(&[5, 5], &[(0, 1)]);
        let s = score(&g, &SubgraphMask::full(&g)).unwrap();
        assert!(s.is_infinite());
        assert_eq!(s.to_string(), "+inf");
    }

    #[test]
    fn star_score() {
        let g = star3(0, 1);
        let s = score(&g, &SubgraphMask::full(&g)).unwrap();
        assert_eq!(s.discrepancy_total(), &q(6, 1));
        let expected = 3f64.ln() - 4.0 * 6f64.ln();
        assert!((s.value() - expected).abs() < 1e-12);
        assert!((s.value() + 6.068).abs() < 1e-3);
    }

    #[test]
    fn triangle_remove_gives_b_centred_path() {
        let g = triangle(&[0, 0, 10]);
        let mut state = IncrementalScore::new(&g, SubgraphMask::full(&g)).unwrap();
        let e = g.edge_id(0, 2).unwrap();
        let s = score_delta(&mut state, e, Direction::Remove).unwrap();
        assert_eq!(s.discrepancy_total(), &q(150, 1));
        let expected = 2f64.ln() - 3.0 * 150f64.ln();
        assert!((s.value() - expected).abs() < 1e-12);
        assert!(s.bit_identical(&score(&g, state.mask()).unwrap()));
        assert_eq!(state.mask().to_bitstring(), "101");
    }

    #[test]
    fn toggle_involution() {
        let g = triangle(&[0, 3, 10]);
        let mut state = IncrementalScore::new(&g, SubgraphMask::full(&g)).unwrap();
        let before = state.score();
        state.apply(1, Direction::Remove).unwrap();
        let after = state.apply(1, Direction::Add).unwrap();
        assert!(before.bit_identical(&after));
    }

    #[test]
    fn forced_edge_removal_is_rejected() {
        let g = p3();
        let mut state = IncrementalScore::new(&g, SubgraphMask::full(&g)).unwrap();
        for e in 0..2 {
            assert!(matches!(
                state.apply(e, Direction::Remove),
                Err(ScoreError::WouldIsolate { .. })
            ));
        }
        assert!(matches!(
            state.apply(0, Direction::Add),
            Err(ScoreError::DirectionMismatch { .. })
        ));
    }

    #[test]
    fn ordering() {
        let g = triangle(&[0, 0, 10]);
        let full = score(&g, &SubgraphMask::full(&g)).unwrap();
        let path = score(&g, &SubgraphMask::parse(&g, "101").unwrap()).unwrap();
        let other = score(&g, &SubgraphMask::parse(&g, "110").unwrap()).unwrap();
        assert_eq!(path.cmp_score(&full), Ordering::Greater);
        assert_eq!(path.cmp_score(&other), Ordering::Equal);

        let k2 = graph(&[1, 1], &[(0, 1)]);
        let inf = score(&k2, &SubgraphMask::full(&k2)).unwrap();
        assert_eq!(inf.cmp_score(&path), Ordering::Greater);
        assert_eq!(path.cmp_score(&inf), Ordering::Less);
    }

    #[test]
    fn ln_of_huge_rationals() {
        let big = BigRational::from_integer(num_bigint::BigInt::from(10u32).pow(400));
        assert!((ln_rational(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        let tiny = big.recip();
        assert!((ln_rational(&tiny) + 400.0 * 10f64.ln()).abs() < 1e-9);
    }
}
