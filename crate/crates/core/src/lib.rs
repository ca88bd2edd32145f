//! Correlation subgraph optimisation: choose a spanning subgraph in which
//! every vertex keeps a neighbour, maximising
//! `Σ ln d_H(v) − n · ln Σ d_H(v)·ND_H(v)`.
//!
//! The crate provides exact scoring over rationals, an exact branch-and-bound
//! solver and a hill-climbing heuristic, the gadget reduction from monotone
//! cubic 1-in-3 SAT, and checks of the reduction's structural bounds.

pub mod cli;
pub mod graph;
pub mod logdeg;
pub mod reduction;
pub mod scoring;
pub mod solvers;
pub mod verification;

pub use graph::{is_valid, GraphError, SubgraphMask, WeightedGraph};
pub use scoring::{score, Direction, IncrementalScore, ScoreError, ScoreValue};
