//! Gadget reduction from Cubic Planar Monotone 1-in-3 SAT to correlation
//! subgraph optimisation.
//!
//! Vertex numbering is fixed. Variable gadgets come first, in variable
//! order, each laid out as
//!
//! ```text
//! u, v, z, z', w1, w2, w3, leaves(u) x3t, leaves(z) x3t, leaves(z') x3t², leaf(w1), leaf(w2), leaf(w3)
//! ```
//!
//! followed by clause gadgets in clause order, each `a, a', leaves(a') x t²`.
//! Weights (multiples of `t`):
//!
//! | vertex | f | leaves |
//! |---|---|---|
//! | u | 7t | 3t at 7t+1 |
//! | v | 4t | |
//! | z | t | 3t at t−1 |
//! | z' | 4t | 3t² at 4t |
//! | w_j | 3t | one at 3t |
//! | a | 2t | |
//! | a' | t | t² at t |
//!
//! `v` is adjacent to `u`, `z`, `w1..w3`; `z`–`z'`; `a`–`a'`; and
//! `w_ℓ`–`a_{r_ℓ}` where `r_1 < r_2 < r_3` are the clauses containing the
//! variable.

mod formula;

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

pub use formula::{Assignment, Formula, FormulaError};

use crate::graph::{SubgraphMask, WeightedGraph};
use crate::scoring::ScoreValue;
use crate::solvers::{self, ExactConfig, LocalConfig, Optimality, SolveError};

#[cfg(test)]
pub(crate) use formula::fixtures;

pub const MIN_T: u64 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("parameter t = {t} is below the minimum of {MIN_T}")]
    ParameterTooSmall { t: u64 },
    #[error("assignment {assignment} gives clause {clause} {true_count} true variables, not exactly one")]
    NotOneInThree {
        assignment: String,
        clause: usize,
        true_count: usize,
    },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// A non-leaf gadget vertex. Indices are 0-based; tags print 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    U(usize),
    V(usize),
    Z(usize),
    ZPrime(usize),
    /// `W(i, j)`: the `j`-th connector of variable `i`.
    W(usize, usize),
    A(usize),
    APrime(usize),
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Anchor::U(i) => write!(f, "u_{}", i + 1),
            Anchor::V(i) => write!(f, "v_{}", i + 1),
            Anchor::Z(i) => write!(f, "z_{}", i + 1),
            Anchor::ZPrime(i) => write!(f, "z'_{}", i + 1),
            Anchor::W(i, j) => write!(f, "w_{}_{}", i + 1, j + 1),
            Anchor::A(j) => write!(f, "a_{}", j + 1),
            Anchor::APrime(j) => write!(f, "a'_{}", j + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Vertex(Anchor),
    LeafOf(Anchor),
}

impl Role {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Role::LeafOf(_))
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Vertex(a) => a.fmt(f),
            Role::LeafOf(a) => write!(f, "leaf({a})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableGadget {
    pub u: usize,
    pub v: usize,
    pub z: usize,
    pub z_prime: usize,
    pub w: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseGadget {
    pub a: usize,
    pub a_prime: usize,
}

/// A compiled instance with its role annotation.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    graph: WeightedGraph,
    formula: Formula,
    t: u64,
    roles: Vec<Role>,
    variables: Vec<VariableGadget>,
    clauses: Vec<ClauseGadget>,
}

/// Vertices in one variable gadget.
pub fn variable_gadget_size(t: u64) -> u64 {
    3 * t * t + 6 * t + 10
}

/// Vertices in one clause gadget.
pub fn clause_gadget_size(t: u64) -> u64 {
    t * t + 2
}

struct Builder {
    weights: Vec<BigRational>,
    roles: Vec<Role>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn vertex(&mut self, role: Role, weight: i64) -> usize {
        self.weights.push(BigRational::from_integer(weight.into()));
        self.roles.push(role);
        self.weights.len() - 1
    }

    fn leaves(&mut self, anchor: Anchor, at: usize, count: u64, weight: i64) {
        for _ in 0..count {
            let leaf = self.vertex(Role::LeafOf(anchor), weight);
            self.edges.push((at, leaf));
        }
    }
}

/// Builds `(G_Φ, f)` for parameter `t ≥ 2`.
pub fn compile(formula: &Formula, t: u64) -> Result<ReductionInstance, ReductionError> {
    if t < MIN_T {
        return Err(ReductionError::ParameterTooSmall { t });
    }
    let n = formula.variable_count();
    let ti = t as i64;
    let mut b = Builder {
        weights: Vec::new(),
        roles: Vec::new(),
        edges: Vec::new(),
    };

    let mut variables = Vec::with_capacity(n);
    for i in 0..n {
        let u = b.vertex(Role::Vertex(Anchor::U(i)), 7 * ti);
        let v = b.vertex(Role::Vertex(Anchor::V(i)), 4 * ti);
        let z = b.vertex(Role::Vertex(Anchor::Z(i)), ti);
        let z_prime = b.vertex(Role::Vertex(Anchor::ZPrime(i)), 4 * ti);
        let w = [0, 1, 2].map(|j| b.vertex(Role::Vertex(Anchor::W(i, j)), 3 * ti));
        b.edges.extend([(v, u), (v, z), (z, z_prime)]);
        b.edges.extend(w.map(|wj| (v, wj)));
        b.leaves(Anchor::U(i), u, 3 * t, 7 * ti + 1);
        b.leaves(Anchor::Z(i), z, 3 * t, ti - 1);
        b.leaves(Anchor::ZPrime(i), z_prime, 3 * t * t, 4 * ti);
        for (j, &wj) in w.iter().enumerate() {
            b.leaves(Anchor::W(i, j), wj, 1, 3 * ti);
        }
        variables.push(VariableGadget {
            u,
            v,
            z,
            z_prime,
            w,
        });
    }

    let mut clauses = Vec::with_capacity(formula.clauses().len());
    for j in 0..formula.clauses().len() {
        let a = b.vertex(Role::Vertex(Anchor::A(j)), 2 * ti);
        let a_prime = b.vertex(Role::Vertex(Anchor::APrime(j)), ti);
        b.edges.push((a, a_prime));
        b.leaves(Anchor::APrime(j), a_prime, t * t, ti);
        clauses.push(ClauseGadget { a, a_prime });
    }

    for (i, gadget) in variables.iter().enumerate() {
        for (l, r) in formula.occurrences(i).into_iter().enumerate() {
            b.edges.push((gadget.w[l], clauses[r].a));
        }
    }

    let graph = WeightedGraph::new(b.weights, b.edges)
        .expect("gadget construction yields a simple graph without isolated vertices");
    Ok(ReductionInstance {
        graph,
        formula: formula.clone(),
        t,
        roles: b.roles,
        variables,
        clauses,
    })
}

impl ReductionInstance {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Number of variables (equal to the number of clauses).
    pub fn n(&self) -> usize {
        self.formula.variable_count()
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn role(&self, v: usize) -> Role {
        self.roles[v]
    }

    pub fn variable(&self, i: usize) -> &VariableGadget {
        &self.variables[i]
    }

    pub fn variables(&self) -> &[VariableGadget] {
        &self.variables
    }

    pub fn clause(&self, j: usize) -> &ClauseGadget {
        &self.clauses[j]
    }

    pub fn clause_gadgets(&self) -> &[ClauseGadget] {
        &self.clauses
    }

    /// Clause index joined to connector `w_{i,l}`.
    pub fn cross_clause(&self, i: usize, l: usize) -> usize {
        self.formula.occurrences(i)[l]
    }

    /// `<vertex_id> <role-tag>` per vertex, ascending.
    pub fn roles_text(&self) -> String {
        self.roles
            .iter()
            .enumerate()
            .map(|(v, r)| format!("{v} {r}\n"))
            .collect()
    }

    /// Vertices whose discrepancy the hardness argument controls: every
    /// non-leaf vertex except `z'_i` and `a'_j`.
    pub fn designated(&self) -> Vec<usize> {
        (0..self.graph.vertex_count())
            .filter(|&v| {
                matches!(
                    self.roles[v],
                    Role::Vertex(
                        Anchor::U(_) | Anchor::V(_) | Anchor::Z(_) | Anchor::W(..) | Anchor::A(_)
                    )
                )
            })
            .collect()
    }

    fn edge(&self, a: usize, b: usize) -> usize {
        self.graph.edge_id(a, b).expect("gadget edge exists")
    }

    /// The valid subgraph built from a 1-in-3 satisfying assignment: a true
    /// variable drops `v z`; a false one drops `v w_1..3` and `z z'`; a
    /// connector keeps its clause edge iff its variable is true.
    pub fn witness(&self, b: &Assignment) -> Result<SubgraphMask, ReductionError> {
        check_one_in_three(&self.formula, b)?;
        let g = &self.graph;
        let mut mask = SubgraphMask::full(g);
        for (i, gadget) in self.variables.iter().enumerate() {
            if b.value(i) {
                mask.set(g, self.edge(gadget.v, gadget.z), false);
            } else {
                for &w in &gadget.w {
                    mask.set(g, self.edge(gadget.v, w), false);
                }
                mask.set(g, self.edge(gadget.z, gadget.z_prime), false);
                for (l, &w) in gadget.w.iter().enumerate() {
                    let a = self.clauses[self.cross_clause(i, l)].a;
                    mask.set(g, self.edge(w, a), false);
                }
            }
        }
        Ok(mask)
    }
}

fn check_one_in_three(formula: &Formula, b: &Assignment) -> Result<(), ReductionError> {
    if b.len() != formula.variable_count() {
        return Err(FormulaError::AssignmentLength {
            found: b.len(),
            expected: formula.variable_count(),
        }
        .into());
    }
    for (j, clause) in formula.clauses().iter().enumerate() {
        let true_count = clause.iter().filter(|&&x| b.value(x)).count();
        if true_count != 1 {
            return Err(ReductionError::NotOneInThree {
                assignment: b.to_string(),
                clause: j + 1,
                true_count,
            });
        }
    }
    Ok(())
}

/// Compiles `formula` at `t` and builds the witness mask for `b`.
pub fn witness(
    formula: &Formula,
    t: u64,
    b: &Assignment,
) -> Result<(ReductionInstance, SubgraphMask), ReductionError> {
    let inst = compile(formula, t)?;
    let mask = inst.witness(b)?;
    Ok((inst, mask))
}

/// `(17/2) · n · ln n`.
pub fn decision_threshold(n: usize) -> f64 {
    8.5 * n as f64 * (n as f64).ln()
}

/// The decision rule is only argued for `n > e^47` variables.
pub fn threshold_is_asymptotic_only(n: usize) -> bool {
    (n as f64).ln() <= 47.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct DecideConfig {
    pub exact: ExactConfig,
    pub local: LocalConfig,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub answer: Answer,
    pub optimum: ScoreValue,
    pub optimum_mask: SubgraphMask,
    pub threshold: f64,
    pub t: u64,
    pub optimality: Optimality,
    pub used_exact: bool,
    pub asymptotic_only: bool,
}

/// Compiles with `t = n²`, maximises the score and answers YES iff the
/// optimum found reaches `(17/2) n ln n`.
///
/// The objective's log multiplier is the variable count `n`, matching the
/// scale on which the threshold is stated.
pub fn decide(formula: &Formula, config: &DecideConfig) -> Result<Decision, ReductionError> {
    let n = formula.variable_count();
    let t = (n * n) as u64;
    let inst = compile(formula, t)?;
    let g = inst.graph();
    let multiplier = Some(n as u64);
    let free = g.free_edges().len();

    let use_exact = free <= config.exact.free_edge_cap || config.exact.node_limit.is_some();
    let report = if use_exact {
        solvers::solve_exact(
            g,
            &ExactConfig {
                multiplier,
                ..config.exact.clone()
            },
        )?
    } else {
        solvers::solve_local(
            g,
            &LocalConfig {
                multiplier,
                ..config.local.clone()
            },
        )
    };
    let threshold = decision_threshold(n);
    let answer = if report.best_score.value() >= threshold {
        Answer::Yes
    } else {
        Answer::No
    };
    Ok(Decision {
        answer,
        optimum: report.best_score,
        optimum_mask: report.best_mask,
        threshold,
        t,
        optimality: report.optimality,
        used_exact: use_exact,
        asymptotic_only: threshold_is_asymptotic_only(n),
    })
}
