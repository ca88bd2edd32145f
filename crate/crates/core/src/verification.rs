//! Checks of the reduction's structural claims on compiled instances.
//!
//! Discrepancy checks are exact rational comparisons. Degree-log and score
//! bounds pass through logarithms and use an absolute slack of `1e-9`.

use std::fmt::{self, Write as _};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{format_rational, is_valid, SubgraphMask, WeightedGraph};
use crate::logdeg::LogProduct;
use crate::reduction::{
    compile, Anchor, Assignment, Formula, ReductionError, ReductionInstance, Role,
};
use crate::scoring::{neighbourhood_discrepancy, score_with_multiplier, ScoreValue};
use crate::solvers::{self, restart_rng, ExactConfig, Optimality};

pub const FLOAT_SLACK: f64 = 1e-9;
pub const DEFAULT_CLAIM6_BUDGET: u64 = 50_000_000;
pub const DEFAULT_LEMMA_SAMPLES: usize = 10_000;
/// Instances with at most this many free edges are enumerated completely.
pub const FULL_ENUMERATION_LIMIT: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("mask is not a valid subgraph: vertex {vertex} has no kept edge")]
    InvalidMask { vertex: usize },
    #[error("mask length {found} does not match edge count {expected}")]
    MaskLength { found: usize, expected: usize },
    #[error(
        "formula is 1-in-3 satisfiable ({witness}); the unsatisfiable-case check does not apply"
    )]
    Satisfiable { witness: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDescriptor {
    pub n: usize,
    pub t: u64,
    pub formula_digest: String,
}

impl InstanceDescriptor {
    pub fn of(formula: &Formula, t: u64) -> Self {
        Self {
            n: formula.variable_count(),
            t,
            formula_digest: formula.digest(),
        }
    }
}

impl fmt::Display for InstanceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} t={} formula={}",
            self.n, self.t, self.formula_digest
        )
    }
}

/// One check outcome with the exact quantities that were compared.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub id: &'static str,
    /// Which subgraph or input the check ran on, e.g. `full`, `witness:TFF`.
    pub subject: String,
    pub instance: InstanceDescriptor,
    pub status: Status,
    /// Short comparison such as `36 = 36`.
    pub summary: String,
    pub quantities: Vec<(String, String)>,
}

impl CheckRecord {
    fn new(id: &'static str, subject: impl Into<String>, instance: InstanceDescriptor) -> Self {
        Self {
            id,
            subject: subject.into(),
            instance,
            status: Status::Pass,
            summary: String::new(),
            quantities: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.quantities.push((key.to_string(), value.to_string()));
        self
    }

    pub fn quantity(&self, key: &str) -> Option<&str> {
        self.quantities
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Machine-readable single line.
    pub fn to_line(&self) -> String {
        let mut out = format!(
            "{} {} {} subject={}",
            self.id, self.status, self.instance, self.subject
        );
        for (k, v) in &self.quantities {
            let _ = write!(out, " {k}={v}");
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.records
            .iter()
            .all(|r| matches!(r.status, Status::Pass | Status::Skipped))
    }

    pub fn has_failure(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Fail)
    }

    pub fn table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .records
            .iter()
            .map(|r| {
                [
                    r.id.to_string(),
                    r.subject.clone(),
                    r.status.to_string(),
                    r.summary.clone(),
                ]
            })
            .collect();
        let header = ["check", "subject", "status", "result"].map(String::from);
        let mut widths = header.clone().map(|h| h.len());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&header).chain(&rows) {
            let line = row
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out
    }

    pub fn lines(&self) -> String {
        self.records.iter().map(|r| r.to_line() + "\n").collect()
    }
}

fn ensure_valid(g: &WeightedGraph, h: &SubgraphMask) -> Result<(), VerifyError> {
    if h.len() != g.edge_count() {
        return Err(VerifyError::MaskLength {
            found: h.len(),
            expected: g.edge_count(),
        });
    }
    match h.degrees().iter().position(|&d| d == 0) {
        Some(vertex) => Err(VerifyError::InvalidMask { vertex }),
        None => Ok(()),
    }
}

fn nd(g: &WeightedGraph, h: &SubgraphMask, v: usize) -> BigRational {
    neighbourhood_discrepancy(g, h, v).expect("mask validated")
}

fn int(x: u64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn descriptor(inst: &ReductionInstance) -> InstanceDescriptor {
    InstanceDescriptor::of(inst.formula(), inst.t())
}

/// Sum of leaf discrepancies equals `6nt`.
pub fn check_claim1(
    inst: &ReductionInstance,
    h: &SubgraphMask,
    subject: &str,
) -> Result<CheckRecord, VerifyError> {
    let g = inst.graph();
    ensure_valid(g, h)?;
    let sum = (0..g.vertex_count())
        .filter(|&v| g.degree(v) == 1)
        .fold(BigRational::zero(), |acc, v| acc + nd(g, h, v));
    let expected = int(6 * inst.n() as u64 * inst.t());
    let mut rec = CheckRecord::new("claim1", subject, descriptor(inst))
        .with("leaf_nd_sum", format_rational(&sum))
        .with("expected", format_rational(&expected));
    let eq = sum == expected;
    rec.status = if eq { Status::Pass } else { Status::Fail };
    rec.summary = format!(
        "{} {} {}",
        format_rational(&sum),
        if eq { "=" } else { "!=" },
        format_rational(&expected)
    );
    Ok(rec)
}

/// Every `z'_i` and `a'_j` has `0 ≤ ND < 1/t²`.
pub fn check_claim2(
    inst: &ReductionInstance,
    h: &SubgraphMask,
    subject: &str,
) -> Result<CheckRecord, VerifyError> {
    let g = inst.graph();
    ensure_valid(g, h)?;
    let t = inst.t();
    let bound = BigRational::new(1.into(), (t * t).into());
    let mut worst: Option<(usize, BigRational)> = None;
    let mut violations = 0;
    let mut max_z = BigRational::zero();
    let mut max_a = BigRational::zero();
    for v in 0..g.vertex_count() {
        let slot = match inst.role(v) {
            Role::Vertex(Anchor::ZPrime(_)) => &mut max_z,
            Role::Vertex(Anchor::APrime(_)) => &mut max_a,
            _ => continue,
        };
        let x = nd(g, h, v);
        if x.is_negative() || x >= bound {
            violations += 1;
        }
        if x > *slot {
            *slot = x.clone();
        }
        if worst.as_ref().is_none_or(|(_, w)| x > *w) {
            worst = Some((v, x));
        }
    }
    let mut rec = CheckRecord::new("claim2", subject, descriptor(inst))
        .with("max_nd_z_prime", format_rational(&max_z))
        .with("max_nd_a_prime", format_rational(&max_a))
        .with("bound", format_rational(&bound))
        .with("violations", violations);
    if let Some((v, _)) = worst {
        rec = rec.with("worst_vertex", v);
    }
    rec.status = if violations == 0 {
        Status::Pass
    } else {
        Status::Fail
    };
    rec.summary = format!(
        "max z' {} , max a' {} {} {}",
        format_rational(&max_z),
        format_rational(&max_a),
        if violations == 0 { "<" } else { "!<" },
        format_rational(&bound)
    );
    Ok(rec)
}

/// `6n ln t + 2n ≤ Σ ln d_H ≤ Σ ln d_G ≤ 6n ln t + 20n`.
pub fn check_claim3_claim4(
    inst: &ReductionInstance,
    h: &SubgraphMask,
    subject: &str,
) -> Result<CheckRecord, VerifyError> {
    let g = inst.graph();
    ensure_valid(g, h)?;
    let n = inst.n() as f64;
    let ln_t = (inst.t() as f64).ln();
    let lower = 6.0 * n * ln_t + 2.0 * n;
    let upper = 6.0 * n * ln_t + 20.0 * n;
    let sum_h = LogProduct::from_degrees(h.degrees().iter().copied()).ln();
    let sum_g = LogProduct::from_degrees((0..g.vertex_count()).map(|v| g.degree(v))).ln();
    let ok = lower <= sum_h + FLOAT_SLACK
        && sum_h <= sum_g + FLOAT_SLACK
        && sum_g <= upper + FLOAT_SLACK;
    let mut rec = CheckRecord::new("claim3_4", subject, descriptor(inst))
        .with("lower", format!("{lower:.12}"))
        .with("log_degree_sum_h", format!("{sum_h:.12}"))
        .with("log_degree_sum_g", format!("{sum_g:.12}"))
        .with("upper", format!("{upper:.12}"));
    rec.status = if ok { Status::Pass } else { Status::Fail };
    rec.summary = format!("{lower:.6} <= {sum_h:.6} <= {sum_g:.6} <= {upper:.6}");
    Ok(rec)
}

/// The witness for `b` is valid and every designated vertex has ND exactly 0.
pub fn check_claim5(formula: &Formula, t: u64, b: &Assignment) -> Result<CheckRecord, VerifyError> {
    let inst = compile(formula, t)?;
    let h = inst.witness(b)?;
    check_claim5_on(&inst, &h, b)
}

fn check_claim5_on(
    inst: &ReductionInstance,
    h: &SubgraphMask,
    b: &Assignment,
) -> Result<CheckRecord, VerifyError> {
    let g = inst.graph();
    let valid = is_valid(g, h);
    let designated = inst.designated();
    let nonzero: Vec<usize> = if valid {
        designated
            .iter()
            .copied()
            .filter(|&v| !nd(g, h, v).is_zero())
            .collect()
    } else {
        designated.clone()
    };
    let mut rec = CheckRecord::new("claim5", format!("witness:{b}"), descriptor(inst))
        .with("valid", valid)
        .with("designated", designated.len())
        .with("nonzero_nd", nonzero.len());
    if let Some(&v) = nonzero.first() {
        rec = rec.with("first_nonzero", format!("{}({})", v, inst.role(v)));
    }
    rec.status = if valid && nonzero.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    rec.summary = format!(
        "valid={valid}, {} of {} designated vertices have ND = 0",
        designated.len() - nonzero.len(),
        designated.len()
    );
    Ok(rec)
}

/// Result of the bounded-discrepancy subgraph search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim6Outcome {
    /// No valid subgraph keeps every designated vertex below `t²/9`.
    Refuted {
        nodes: u64,
    },
    /// A valid subgraph with every designated ND below `t²/9`.
    Counterexample {
        mask: SubgraphMask,
        nodes: u64,
    },
    BudgetExceeded {
        nodes: u64,
    },
}

/// Depth-first search over the free edges for a valid subgraph in which
/// every designated vertex has `ND < t²/9`.
///
/// A branch is cut only when some vertex can no longer be covered, or when a
/// designated vertex has no completion of its own undecided edges with
/// `ND < t²/9`; both are necessary conditions, so the search never misses a
/// counterexample.
pub fn claim6_search(inst: &ReductionInstance, node_budget: u64) -> Claim6Outcome {
    let t = inst.t();
    let threshold = BigRational::new((t * t).into(), 9.into());
    let mut search = BoundedSearch::new(inst, threshold, node_budget);
    match search.run(0) {
        Some(mask) => Claim6Outcome::Counterexample {
            mask,
            nodes: search.nodes,
        },
        None if search.exhausted => Claim6Outcome::BudgetExceeded {
            nodes: search.nodes,
        },
        None => Claim6Outcome::Refuted {
            nodes: search.nodes,
        },
    }
}

/// Per-vertex completions are enumerated up to this many undecided edges;
/// beyond it the vertex is assumed satisfiable.
const LOOKAHEAD_LIMIT: usize = 10;

struct BoundedSearch<'a> {
    g: &'a WeightedGraph,
    designated: Vec<bool>,
    threshold: BigRational,
    order: Vec<usize>,
    undecided_edge: Vec<bool>,
    kept: Vec<bool>,
    kept_degree: Vec<usize>,
    kept_sum: Vec<BigRational>,
    undecided: Vec<usize>,
    blocked: Vec<bool>,
    blocked_count: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> BoundedSearch<'a> {
    fn new(inst: &'a ReductionInstance, threshold: BigRational, budget: u64) -> Self {
        let g = inst.graph();
        let n = g.vertex_count();
        let mut designated = vec![false; n];
        for v in inst.designated() {
            designated[v] = true;
        }
        let order = g.free_edges();
        let mut undecided_edge = vec![false; g.edge_count()];
        for &e in &order {
            undecided_edge[e] = true;
        }
        let mut s = Self {
            g,
            designated,
            threshold,
            order,
            undecided_edge,
            kept: vec![true; g.edge_count()],
            kept_degree: vec![0; n],
            kept_sum: vec![BigRational::zero(); n],
            undecided: vec![0; n],
            blocked: vec![false; n],
            blocked_count: 0,
            nodes: 0,
            budget,
            exhausted: false,
        };
        for v in 0..n {
            for &(u, e) in g.incident(v) {
                if s.undecided_edge[e] {
                    s.undecided[v] += 1;
                } else {
                    s.kept_degree[v] += 1;
                    s.kept_sum[v] += g.weight(u);
                }
            }
        }
        for v in 0..n {
            s.refresh(v);
        }
        s
    }

    /// `(d·f − σ)² < τ·d²`, i.e. `ND < τ`.
    fn below(&self, v: usize, d: usize, sum: &BigRational) -> bool {
        let d = BigRational::from_integer(d.into());
        let diff = self.g.weight(v) * &d - sum;
        &diff * &diff < &self.threshold * &d * &d
    }

    fn satisfiable(&self, v: usize) -> bool {
        let kept = self.kept_degree[v];
        let open = self.undecided[v];
        if kept + open == 0 {
            return false;
        }
        if !self.designated[v] || open > LOOKAHEAD_LIMIT {
            return true;
        }
        let weights: Vec<&BigRational> = self
            .g
            .incident(v)
            .iter()
            .filter(|&&(_, e)| self.undecided_edge[e])
            .map(|&(u, _)| self.g.weight(u))
            .collect();
        (0u32..1 << open).any(|subset| {
            let d = kept + subset.count_ones() as usize;
            if d == 0 {
                return false;
            }
            let mut sum = self.kept_sum[v].clone();
            for (i, w) in weights.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    sum += *w;
                }
            }
            self.below(v, d, &sum)
        })
    }

    fn refresh(&mut self, v: usize) {
        let blocked = !self.satisfiable(v);
        if blocked != self.blocked[v] {
            self.blocked[v] = blocked;
            if blocked {
                self.blocked_count += 1;
            } else {
                self.blocked_count -= 1;
            }
        }
    }

    fn set(&mut self, e: usize, keep: bool, undo: bool) {
        let (a, b) = self.g.edge(e);
        self.undecided_edge[e] = undo;
        self.kept[e] = keep || undo;
        for (x, y) in [(a, b), (b, a)] {
            if undo {
                self.undecided[x] += 1;
                if keep {
                    self.kept_degree[x] -= 1;
                    self.kept_sum[x] -= self.g.weight(y);
                }
            } else {
                self.undecided[x] -= 1;
                if keep {
                    self.kept_degree[x] += 1;
                    self.kept_sum[x] += self.g.weight(y);
                }
            }
        }
        self.refresh(a);
        self.refresh(b);
    }

    fn run(&mut self, depth: usize) -> Option<SubgraphMask> {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return None;
        }
        self.nodes += 1;
        if self.blocked_count > 0 {
            return None;
        }
        if depth == self.order.len() {
            return Some(
                SubgraphMask::from_kept(self.g, self.kept.clone()).expect("length matches"),
            );
        }
        let e = self.order[depth];
        for keep in [true, false] {
            self.set(e, keep, false);
            let found = self.run(depth + 1);
            self.set(e, keep, true);
            if found.is_some() || self.exhausted {
                return found;
            }
        }
        None
    }
}

/// Confirms, for a 1-in-3 unsatisfiable formula, that every valid subgraph
/// has a designated vertex with `ND ≥ t²/9`.
pub fn check_claim6(
    formula: &Formula,
    t: u64,
    node_budget: u64,
) -> Result<CheckRecord, VerifyError> {
    if let Some(b) = formula.satisfying_assignments().first() {
        return Err(VerifyError::Satisfiable {
            witness: b.to_string(),
        });
    }
    let inst = compile(formula, t)?;
    Ok(claim6_record(&inst, node_budget))
}

fn claim6_record(inst: &ReductionInstance, node_budget: u64) -> CheckRecord {
    let t = inst.t();
    let threshold = BigRational::new((t * t).into(), 9.into());
    let mut rec = CheckRecord::new("claim6", "all-valid-subgraphs", descriptor(inst))
        .with("threshold", format_rational(&threshold))
        .with("free_edges", inst.graph().free_edges().len())
        .with("budget", node_budget);
    match claim6_search(inst, node_budget) {
        Claim6Outcome::Refuted { nodes } => {
            rec = rec.with("nodes", nodes);
            rec.status = Status::Pass;
            rec.summary = format!(
                "no valid subgraph keeps all designated ND < {}",
                format_rational(&threshold)
            );
        }
        Claim6Outcome::Counterexample { mask, nodes } => {
            rec = rec
                .with("nodes", nodes)
                .with("counterexample", mask.to_bitstring());
            rec.status = Status::Fail;
            rec.summary = "counterexample subgraph found".into();
        }
        Claim6Outcome::BudgetExceeded { nodes } => {
            rec = rec.with("nodes", nodes);
            rec.status = Status::Inconclusive;
            rec.summary = format!("search budget of {node_budget} nodes exhausted");
        }
    }
    rec
}

/// Independent confirmation that `h` is valid and keeps every designated
/// vertex strictly below `t²/9`.
pub fn is_bounded_counterexample(inst: &ReductionInstance, h: &SubgraphMask) -> bool {
    let g = inst.graph();
    let t = inst.t();
    let threshold = BigRational::new((t * t).into(), 9.into());
    is_valid(g, h) && inst.designated().iter().all(|&v| nd(g, h, v) < threshold)
}

/// Score with the variable count as log multiplier, the scale on which the
/// lemma bounds are stated.
pub fn reduction_score(
    inst: &ReductionInstance,
    h: &SubgraphMask,
) -> Result<ScoreValue, VerifyError> {
    score_with_multiplier(inst.graph(), h, inst.n() as u64).map_err(|e| match e {
        crate::scoring::ScoreError::InvalidMask { vertex } => VerifyError::InvalidMask { vertex },
        other => unreachable!("unexpected scoring error: {other}"),
    })
}

/// `6n ln t − n ln(10nt)`.
pub fn lemma1_bound(n: usize, t: u64) -> f64 {
    let n = n as f64;
    let t = t as f64;
    6.0 * n * t.ln() - n * (10.0 * n * t).ln()
}

/// `6n ln t + 20n − n ln(t²/9)`.
pub fn lemma2_bound(n: usize, t: u64) -> f64 {
    let n = n as f64;
    let t = t as f64;
    6.0 * n * t.ln() + 20.0 * n - n * (t * t / 9.0).ln()
}

#[derive(Debug, Clone)]
pub struct LemmaConfig {
    pub samples: usize,
    pub seed: u64,
    /// Also bound the proven optimum when the exact solver can run.
    pub use_exact: bool,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_LEMMA_SAMPLES,
            seed: 0,
            use_exact: true,
        }
    }
}

/// Lower bound on the witness score when `Φ` is satisfiable.
pub fn check_lemma1(formula: &Formula, t: u64, b: &Assignment) -> Result<CheckRecord, VerifyError> {
    let inst = compile(formula, t)?;
    let h = inst.witness(b)?;
    let s = reduction_score(&inst, &h)?;
    let full_scale = score_with_multiplier(inst.graph(), &h, inst.graph().vertex_count() as u64)
        .expect("witness is valid");
    let bound = lemma1_bound(inst.n(), t);
    let ok = s.value() >= bound - FLOAT_SLACK;
    let mut rec = CheckRecord::new("lemma1", format!("witness:{b}"), descriptor(&inst))
        .with("score", s.to_string())
        .with("bound", format!("{bound:.12}"))
        .with("discrepancy_total", format_rational(s.discrepancy_total()))
        .with("log_degree_sum", format!("{:.12}", s.log_degree_sum()))
        .with("score_vertex_count_scale", full_scale.to_string());
    rec.status = if ok { Status::Pass } else { Status::Fail };
    rec.summary = format!("{s} {} {bound:.6}", if ok { ">=" } else { "<" });
    Ok(rec)
}

/// Upper bound on every valid subgraph's score when `Φ` is unsatisfiable.
///
/// Instances with at most [`FULL_ENUMERATION_LIMIT`] free edges are
/// enumerated; larger ones are sampled, together with the whole graph and
/// (when `use_exact`) the proven optimum, which bounds every valid subgraph.
pub fn check_lemma2(
    formula: &Formula,
    t: u64,
    config: &LemmaConfig,
) -> Result<CheckRecord, VerifyError> {
    if let Some(b) = formula.satisfying_assignments().first() {
        return Err(VerifyError::Satisfiable {
            witness: b.to_string(),
        });
    }
    let inst = compile(formula, t)?;
    let g = inst.graph();
    let bound = lemma2_bound(inst.n(), t);
    let full_multiplier = g.vertex_count() as u64;

    let mut checked = 0usize;
    let mut max_score = f64::NEG_INFINITY;
    let mut max_full_scale = f64::NEG_INFINITY;
    let mut visit = |h: &SubgraphMask| {
        let s = reduction_score(&inst, h).expect("valid");
        let full = ScoreValue::from_parts(
            s.log_degree().clone(),
            s.discrepancy_total().clone(),
            full_multiplier,
        );
        max_score = max_score.max(s.value());
        max_full_scale = max_full_scale.max(full.value());
        checked += 1;
    };

    let free = g.free_edges().len();
    let method = if free <= FULL_ENUMERATION_LIMIT {
        solvers::for_each_valid_mask(g, &mut visit);
        "enumeration"
    } else {
        visit(&SubgraphMask::full(g));
        let mut rng = restart_rng(config.seed, 0);
        for _ in 0..config.samples {
            visit(&solvers::random_valid_mask(g, &mut rng));
        }
        "sample"
    };

    let mut optimum = None;
    if config.use_exact && free <= solvers::DEFAULT_FREE_EDGE_CAP {
        let report = solvers::solve_exact(
            g,
            &ExactConfig {
                multiplier: Some(inst.n() as u64),
                ..ExactConfig::default()
            },
        )
        .expect("within cap");
        if report.optimality == Optimality::Proven {
            max_score = max_score.max(report.best_score.value());
            optimum = Some(report.best_score);
        }
    }

    let ok = max_score <= bound + FLOAT_SLACK && max_full_scale <= bound + FLOAT_SLACK;
    let mut rec = CheckRecord::new("lemma2", method, descriptor(&inst))
        .with("masks", checked)
        .with("max_score", format!("{max_score:.12}"))
        .with(
            "max_score_vertex_count_scale",
            format!("{max_full_scale:.12}"),
        )
        .with("bound", format!("{bound:.12}"));
    if let Some(opt) = &optimum {
        rec = rec.with("proven_optimum", opt.to_string());
    }
    rec.status = if ok { Status::Pass } else { Status::Fail };
    rec.summary = format!(
        "max {max_score:.6} {} {bound:.6} over {checked} masks{}",
        if ok { "<=" } else { ">" },
        if optimum.is_some() {
            " + proven optimum"
        } else {
            ""
        }
    );
    Ok(rec)
}

/// Lemma 1 if a satisfying assignment is given or exists; Lemma 2 if the
/// formula is unsatisfiable.
pub fn check_lemmas(
    formula: &Formula,
    t: u64,
    b: Option<&Assignment>,
    config: &LemmaConfig,
) -> Result<Vec<CheckRecord>, VerifyError> {
    let found = formula.satisfying_assignments();
    let mut out = Vec::new();
    match b.or(found.first()) {
        Some(b) => out.push(check_lemma1(formula, t, b)?),
        None => out.push(check_lemma2(formula, t, config)?),
    }
    Ok(out)
}

/// Which checks [`run`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Claim1,
    Claim2,
    Claim34,
    Claim5,
    Claim6,
    Lemmas,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Claim1,
        CheckKind::Claim2,
        CheckKind::Claim34,
        CheckKind::Claim5,
        CheckKind::Claim6,
        CheckKind::Lemmas,
    ];

    /// `1`..`6` or `lemmas`; `3` and `4` both select the degree bounds.
    pub fn parse(token: &str) -> Option<Self> {
        Some(match token.trim() {
            "1" => CheckKind::Claim1,
            "2" => CheckKind::Claim2,
            "3" | "4" => CheckKind::Claim34,
            "5" => CheckKind::Claim5,
            "6" => CheckKind::Claim6,
            "lemmas" => CheckKind::Lemmas,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub checks: Vec<CheckKind>,
    pub assignment: Option<Assignment>,
    pub claim6_budget: u64,
    pub lemmas: LemmaConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            checks: CheckKind::ALL.to_vec(),
            assignment: None,
            claim6_budget: DEFAULT_CLAIM6_BUDGET,
            lemmas: LemmaConfig::default(),
        }
    }
}

fn skipped(id: &'static str, inst: &ReductionInstance, why: &str) -> CheckRecord {
    let mut rec = CheckRecord::new(id, "-", descriptor(inst));
    rec.status = Status::Skipped;
    rec.summary = why.to_string();
    rec
}

/// Runs the selected checks. Claims 1–4 run on the whole graph and, when a
/// satisfying assignment is known, on its witness.
pub fn run(
    formula: &Formula,
    t: u64,
    config: &RunConfig,
) -> Result<VerificationReport, VerifyError> {
    let inst = compile(formula, t)?;
    let assignment = match &config.assignment {
        Some(b) => Some(b.clone()),
        None if formula.variable_count() <= 20 => {
            formula.satisfying_assignments().into_iter().next()
        }
        None => None,
    };
    let mut subjects = vec![("full".to_string(), SubgraphMask::full(inst.graph()))];
    if let Some(b) = &assignment {
        subjects.push((format!("witness:{b}"), inst.witness(b)?));
    }

    let mut records = Vec::new();
    let mut seen = Vec::new();
    for &kind in &config.checks {
        if seen.contains(&kind) {
            continue;
        }
        seen.push(kind);
        match kind {
            CheckKind::Claim1 | CheckKind::Claim2 | CheckKind::Claim34 => {
                for (name, h) in &subjects {
                    records.push(match kind {
                        CheckKind::Claim1 => check_claim1(&inst, h, name)?,
                        CheckKind::Claim2 => check_claim2(&inst, h, name)?,
                        _ => check_claim3_claim4(&inst, h, name)?,
                    });
                }
            }
            CheckKind::Claim5 => match &assignment {
                Some(b) => {
                    let h = inst.witness(b)?;
                    records.push(check_claim5_on(&inst, &h, b)?);
                }
                None => records.push(skipped("claim5", &inst, "no 1-in-3 satisfying assignment")),
            },
            CheckKind::Claim6 => {
                if assignment.is_some() {
                    records.push(skipped("claim6", &inst, "formula is 1-in-3 satisfiable"));
                } else {
                    records.push(claim6_record(&inst, config.claim6_budget));
                }
            }
            CheckKind::Lemmas => {
                records.extend(check_lemmas(
                    formula,
                    t,
                    assignment.as_ref(),
                    &config.lemmas,
                )?);
            }
        }
    }
    Ok(VerificationReport { records })
}

/// Valid, with every designated discrepancy exactly zero.
pub fn all_designated_zero(inst: &ReductionInstance, h: &SubgraphMask) -> bool {
    let g = inst.graph();
    is_valid(g, h) && inst.designated().iter().all(|&v| nd(g, h, v).is_zero())
}
