//! Weighted simple graphs, spanning-subgraph masks and the plain-text
//! instance / mask formats.
//!
//! Edge ids are canonical: edges are stored with `u < v` and sorted
//! lexicographically, so the same graph always yields the same ids.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

/// Exact vertex weight.
pub type Weight = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed input: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: `{text}` is not an integer or p/q rational")]
    BadWeight { line: usize, text: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        count: usize,
    },
    #[error("line {line}: edge {u} {v} is not in canonical order (u < v, sorted)")]
    UnsortedEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex {vertex} declared twice")]
    DuplicateVertex { line: usize, vertex: usize },
    #[error("line {line}: vertex {vertex} has no incident edge")]
    IsolatedVertex { line: usize, vertex: usize },
    #[error("unexpected end of input: expected {expected}")]
    Truncated { expected: String },
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("weight count {weights} does not match vertex count {count}")]
    WeightCount { weights: usize, count: usize },
}

/// Immutable simple graph with an exact rational weight on every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    weights: Vec<Weight>,
    edges: Vec<(usize, usize)>,
    /// `(neighbour, edge id)` pairs per vertex, ascending by neighbour.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    /// Builds a graph from weights and an edge list in any order. Edges are
    /// normalised and sorted into canonical order.
    pub fn new(
        weights: Vec<Weight>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = weights.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange {
                        line: 0,
                        vertex: x,
                        count: n,
                    });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line: 0, vertex: a });
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge {
                line: 0,
                u: w[0].0,
                v: w[0].1,
            });
        }
        Self::from_canonical(weights, list, |_| 0)
    }

    fn from_canonical(
        weights: Vec<Weight>,
        edges: Vec<(usize, usize)>,
        vertex_line: impl Fn(usize) -> usize,
    ) -> Result<Self, GraphError> {
        let n = weights.len();
        let mut adjacency = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        if let Some(vertex) = adjacency.iter().position(Vec::is_empty) {
            return Err(GraphError::IsolatedVertex {
                line: vertex_line(vertex),
                vertex,
            });
        }
        Ok(Self {
            weights,
            edges,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn weight(&self, v: usize) -> &Weight {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Incident `(neighbour, edge id)` pairs of `v`.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Looks up the id of edge `{u, v}`.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// The other endpoint of edge `e` seen from `v`.
    pub fn opposite(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Edges incident to a degree-1 vertex. Every valid subgraph keeps them.
    pub fn forced_edges(&self) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| self.is_forced(e))
            .collect()
    }

    pub fn is_forced(&self, e: usize) -> bool {
        let (u, v) = self.edges[e];
        self.degree(u) == 1 || self.degree(v) == 1
    }

    /// Edges a valid subgraph may drop, ascending.
    pub fn free_edges(&self) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| !self.is_forced(e))
            .collect()
    }

    /// Parses the instance file format.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or(GraphError::Truncated {
            expected: "header `<vertex_count> <edge_count>`".into(),
        })?;
        let [n, m] = parse_uints::<2>(header, hline)?;
        if n == 0 {
            return Err(GraphError::Empty);
        }

        let mut weights: Vec<Option<Weight>> = vec![None; n];
        let mut declared_on = vec![0usize; n];
        for _ in 0..n {
            let (line, text) = lines.next().ok_or_else(|| GraphError::Truncated {
                expected: format!("{n} vertex lines"),
            })?;
            let mut parts = text.split_whitespace();
            let (Some(id), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(GraphError::Malformed {
                    line,
                    msg: "expected `<vertex_id> <weight>`".into(),
                });
            };
            let vertex = parse_uint(id, line)?;
            if vertex >= n {
                return Err(GraphError::VertexOutOfRange {
                    line,
                    vertex,
                    count: n,
                });
            }
            if weights[vertex].is_some() {
                return Err(GraphError::DuplicateVertex { line, vertex });
            }
            weights[vertex] = Some(parse_rational(w).ok_or_else(|| GraphError::BadWeight {
                line,
                text: w.to_string(),
            })?);
            declared_on[vertex] = line;
        }

        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or_else(|| GraphError::Truncated {
                expected: format!("{m} edge lines"),
            })?;
            let [u, v] = parse_uints::<2>(text, line)?;
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange {
                        line,
                        vertex: x,
                        count: n,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line, vertex: u });
            }
            // `edges` is sorted so far, so membership is a binary search.
            if edges.binary_search(&(u.min(v), u.max(v))).is_ok() {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            if u > v || edges.last().is_some_and(|&last| last > (u, v)) {
                return Err(GraphError::UnsortedEdge { line, u, v });
            }
            edges.push((u, v));
        }
        if let Some((line, _)) = lines.next() {
            return Err(GraphError::Malformed {
                line,
                msg: "trailing content after the declared edges".into(),
            });
        }
        // Every slot is filled: n distinct in-range ids were read.
        let weights = weights.into_iter().map(Option::unwrap).collect();
        Self::from_canonical(weights, edges, |v| declared_on[v])
    }

    /// Canonical instance text; `parse(g.to_text()) == g`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.vertex_count(), self.edge_count());
        for (v, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "{v} {}", format_rational(w));
        }
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

fn parse_uint(tok: &str, line: usize) -> Result<usize, GraphError> {
    tok.parse().map_err(|_| GraphError::Malformed {
        line,
        msg: format!("`{tok}` is not a non-negative integer"),
    })
}

fn parse_uints<const K: usize>(text: &str, line: usize) -> Result<[usize; K], GraphError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != K {
        return Err(GraphError::Malformed {
            line,
            msg: format!("expected {K} integers, found {}", toks.len()),
        });
    }
    let mut out = [0; K];
    for (slot, tok) in out.iter_mut().zip(toks) {
        *slot = parse_uint(tok, line)?;
    }
    Ok(out)
}

/// Parses `a` or `p/q` into an exact rational. Zero denominators are rejected.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p, q),
        None => (text, "1"),
    };
    let valid = |s: &str, signed: bool| {
        let digits = if signed {
            s.strip_prefix('-')
                .or_else(|| s.strip_prefix('+'))
                .unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return None;
    }
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_positive() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

/// Integer form for whole numbers, `p/q` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Always `p/q`, including whole numbers (`2/1`).
pub fn format_rational_pq(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaskError {
    #[error("mask length {found} does not match edge count {expected}")]
    Length { found: usize, expected: usize },
    #[error("edge id {id} out of range (edge count {count})")]
    EdgeOutOfRange { id: usize, count: usize },
    #[error("malformed mask: {0}")]
    Malformed(String),
}

/// A spanning subgraph, as a kept-edge set over the owning graph's edge ids,
/// with cached degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgraphMask {
    kept: Vec<bool>,
    degrees: Vec<usize>,
}

impl SubgraphMask {
    /// The whole graph.
    pub fn full(g: &WeightedGraph) -> Self {
        Self {
            kept: vec![true; g.edge_count()],
            degrees: (0..g.vertex_count()).map(|v| g.degree(v)).collect(),
        }
    }

    pub fn empty(g: &WeightedGraph) -> Self {
        Self {
            kept: vec![false; g.edge_count()],
            degrees: vec![0; g.vertex_count()],
        }
    }

    pub fn from_kept(g: &WeightedGraph, kept: Vec<bool>) -> Result<Self, MaskError> {
        if kept.len() != g.edge_count() {
            return Err(MaskError::Length {
                found: kept.len(),
                expected: g.edge_count(),
            });
        }
        let mut degrees = vec![0; g.vertex_count()];
        for (e, _) in kept.iter().enumerate().filter(|(_, &k)| k) {
            let (u, v) = g.edge(e);
            degrees[u] += 1;
            degrees[v] += 1;
        }
        Ok(Self { kept, degrees })
    }

    pub fn from_edge_ids(
        g: &WeightedGraph,
        ids: impl IntoIterator<Item = usize>,
    ) -> Result<Self, MaskError> {
        let mut kept = vec![false; g.edge_count()];
        for id in ids {
            if id >= kept.len() {
                return Err(MaskError::EdgeOutOfRange {
                    id,
                    count: kept.len(),
                });
            }
            kept[id] = true;
        }
        Self::from_kept(g, kept)
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn is_kept(&self, e: usize) -> bool {
        self.kept[e]
    }

    pub fn kept(&self) -> &[bool] {
        &self.kept
    }

    pub fn kept_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.kept
            .iter()
            .enumerate()
            .filter(|(_, &k)| k)
            .map(|(e, _)| e)
    }

    pub fn kept_count(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }

    /// `d_H(v)`.
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn set(&mut self, g: &WeightedGraph, e: usize, keep: bool) {
        if self.kept[e] != keep {
            self.toggle(g, e);
        }
    }

    pub fn toggle(&mut self, g: &WeightedGraph, e: usize) {
        let (u, v) = g.edge(e);
        if self.kept[e] {
            self.degrees[u] -= 1;
            self.degrees[v] -= 1;
        } else {
            self.degrees[u] += 1;
            self.degrees[v] += 1;
        }
        self.kept[e] = !self.kept[e];
    }

    /// Kept neighbours of `v` in `g`.
    pub fn neighbours<'a>(
        &'a self,
        g: &'a WeightedGraph,
        v: usize,
    ) -> impl Iterator<Item = usize> + 'a {
        g.incident(v)
            .iter()
            .filter(|&&(_, e)| self.kept[e])
            .map(|&(u, _)| u)
    }

    /// `0`/`1` string indexed by edge id.
    pub fn to_bitstring(&self) -> String {
        self.kept
            .iter()
            .map(|&k| if k { '1' } else { '0' })
            .collect()
    }

    /// Reads a mask file: either one `0`/`1` line of length `edge_count`, or a
    /// whitespace-separated list of kept edge ids.
    pub fn parse(g: &WeightedGraph, text: &str) -> Result<Self, MaskError> {
        let body: String = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join(" ");
        let body = body.trim();
        let is_bits = !body.is_empty()
            && body.len() == g.edge_count()
            && body.bytes().all(|b| b == b'0' || b == b'1');
        if is_bits {
            return Self::from_kept(g, body.bytes().map(|b| b == b'1').collect());
        }
        let ids = body
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| MaskError::Malformed(format!("`{tok}` is not an edge id")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_edge_ids(g, ids)
    }
}

/// True iff every vertex keeps at least one incident edge.
pub fn is_valid(g: &WeightedGraph, h: &SubgraphMask) -> bool {
    h.len() == g.edge_count() && h.degrees.iter().all(|&d| d >= 1)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn int_weights(values: &[i64]) -> Vec<Weight> {
        values
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect()
    }

    pub fn graph(values: &[i64], edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::new(int_weights(values), edges.iter().copied()).unwrap()
    }

    pub fn p3() -> WeightedGraph {
        graph(&[0, 1, 2], &[(0, 1), (1, 2)])
    }

    pub fn triangle(values: &[i64]) -> WeightedGraph {
        graph(values, &[(0, 1), (0, 2), (1, 2)])
    }

    pub fn star3(center: i64, leaf: i64) -> WeightedGraph {
        graph(&[center, leaf, leaf, leaf], &[(0, 1), (0, 2), (0, 3)])
    }
}
