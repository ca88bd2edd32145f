//! Command-line entry point.
//!
//! Exit status: 0 on success, 1 when a verification check fails or is
//! inconclusive, 2 on usage, parse or I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::graph::{SubgraphMask, WeightedGraph};
use crate::reduction::{self, Assignment, DecideConfig, Formula};
use crate::scoring::{format_total, score_with_multiplier};
use crate::solvers::{self, ExactConfig, LocalConfig};
use crate::verification::{self, CheckKind, LemmaConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "corrsub",
    version,
    about = "Correlation subgraph optimisation toolkit"
)]
pub struct Cli {
    /// Worker threads for parallel restarts (default: available cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a subgraph mask against a graph.
    Score {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        #[arg(short = 's', long = "mask")]
        mask: PathBuf,
        #[command(flatten)]
        objective: ObjectiveArgs,
    },
    /// Find a high-scoring valid subgraph.
    Solve(SolveArgs),
    /// Compile a formula into an instance file and a roles file.
    Reduce {
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        #[arg(short = 't', value_parser = clap::value_parser!(u64).range(1..))]
        t: u64,
        /// Writes `<prefix>.graph` and `<prefix>.roles`.
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Build the zero-discrepancy subgraph for a 1-in-3 satisfying assignment.
    Witness {
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        #[arg(short = 't', value_parser = clap::value_parser!(u64).range(1..))]
        t: u64,
        /// One T/F per variable, e.g. TFF.
        #[arg(short = 'a', long = "assignment")]
        assignment: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Check the reduction's claims and lemmas on a compiled formula.
    Verify {
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        #[arg(short = 't', value_parser = clap::value_parser!(u64).range(1..))]
        t: u64,
        /// Comma-separated subset of 1,2,3,4,5,6,lemmas.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,lemmas")]
        checks: Vec<String>,
        #[arg(short = 'a', long)]
        assignment: Option<String>,
        #[arg(long, default_value_t = verification::DEFAULT_CLAIM6_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
        claim6_budget: u64,
        #[arg(long, default_value_t = verification::DEFAULT_LEMMA_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the threshold decision procedure with t = n².
    Decide {
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        node_limit: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct ObjectiveArgs {
    /// Log multiplier of the objective (default: vertex count).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    multiplier: Option<u64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("method").args(["exact", "local"])))]
struct SolveArgs {
    #[arg(short = 'g', long = "graph")]
    graph: PathBuf,
    /// Branch-and-bound (default).
    #[arg(long)]
    exact: bool,
    /// Restart hill climbing.
    #[arg(long)]
    local: bool,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_passes: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    node_limit: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    objective: ObjectiveArgs,
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let pool = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, &pool, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_graph(path: &Path) -> Result<WeightedGraph> {
    WeightedGraph::parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_formula(path: &Path, err: &mut dyn Write) -> Result<Formula> {
    let formula = Formula::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if let Some(w) = formula.planarity_warning() {
        writeln!(err, "{w}")?;
    }
    Ok(formula)
}

/// Writes to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn execute(
    command: Command,
    pool: &rayon::ThreadPool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    match command {
        Command::Score {
            graph,
            mask,
            objective,
        } => {
            let g = load_graph(&graph)?;
            let h = SubgraphMask::parse(&g, &read(&mask)?)
                .with_context(|| format!("in {}", mask.display()))?;
            let m = objective.multiplier.unwrap_or(g.vertex_count() as u64);
            let s = score_with_multiplier(&g, &h, m)?;
            writeln!(out, "{s}")?;
            writeln!(out, "S = {}", format_total(&s))?;
        }
        Command::Solve(args) => {
            let g = load_graph(&args.graph)?;
            let report = if args.local {
                let config = LocalConfig {
                    restarts: args.restarts,
                    seed: args.seed,
                    max_passes: args.max_passes as usize,
                    multiplier: args.objective.multiplier,
                };
                pool.install(|| solvers::solve_local(&g, &config))
            } else {
                solvers::solve_exact(
                    &g,
                    &ExactConfig {
                        node_limit: args.node_limit,
                        multiplier: args.objective.multiplier,
                        ..ExactConfig::default()
                    },
                )?
            };
            let bits = report.best_mask.to_bitstring();
            writeln!(out, "mask {bits}")?;
            writeln!(out, "score {}", report.best_score)?;
            writeln!(out, "S = {}", format_total(&report.best_score))?;
            writeln!(out, "optimality {}", report.optimality)?;
            writeln!(out, "nodes {}", report.nodes_explored)?;
            writeln!(out, "restarts {}", report.restarts_used)?;
            writeln!(out, "time {:.3}s", report.wall_time.as_secs_f64())?;
            if let Some(path) = args.out {
                write_atomic(&path, &format!("{bits}\n"))?;
            }
        }
        Command::Reduce {
            formula,
            t,
            out: prefix,
        } => {
            let f = load_formula(&formula, err)?;
            let inst = reduction::compile(&f, t)?;
            let graph_path = with_suffix(&prefix, ".graph");
            let roles_path = with_suffix(&prefix, ".roles");
            write_atomic(&graph_path, &inst.graph().to_text())?;
            write_atomic(&roles_path, &inst.roles_text())?;
            let g = inst.graph();
            writeln!(
                out,
                "wrote {} ({} vertices, {} edges, {} free) and {}",
                graph_path.display(),
                g.vertex_count(),
                g.edge_count(),
                g.free_edges().len(),
                roles_path.display()
            )?;
        }
        Command::Witness {
            formula,
            t,
            assignment,
            out: path,
        } => {
            let f = load_formula(&formula, err)?;
            let b = Assignment::parse(&assignment, f.variable_count())?;
            let (_, h) = reduction::witness(&f, t, &b)?;
            write_atomic(&path, &format!("{}\n", h.to_bitstring()))?;
            writeln!(
                out,
                "wrote {} ({} of {} edges kept)",
                path.display(),
                h.kept_count(),
                h.len()
            )?;
        }
        Command::Verify {
            formula,
            t,
            checks,
            assignment,
            claim6_budget,
            samples,
            seed,
        } => {
            let f = load_formula(&formula, err)?;
            let checks = checks
                .iter()
                .map(|c| CheckKind::parse(c).with_context(|| format!("unknown check `{c}`")))
                .collect::<Result<Vec<_>>>()?;
            let assignment = assignment
                .map(|a| Assignment::parse(&a, f.variable_count()))
                .transpose()?;
            let config = RunConfig {
                checks,
                assignment,
                claim6_budget,
                lemmas: LemmaConfig {
                    samples,
                    seed,
                    ..LemmaConfig::default()
                },
            };
            let report = verification::run(&f, t, &config)?;
            write!(out, "{}", report.table())?;
            writeln!(out)?;
            write!(out, "{}", report.lines())?;
            if !report.all_passed() {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Decide {
            formula,
            node_limit,
        } => {
            let f = load_formula(&formula, err)?;
            let mut config = DecideConfig::default();
            config.exact.node_limit = node_limit;
            let d = pool.install(|| reduction::decide(&f, &config))?;
            let n = f.variable_count();
            writeln!(out, "answer {}", d.answer)?;
            writeln!(out, "optimum {}", d.optimum)?;
            writeln!(
                out,
                "threshold {:.12} (17/2 * n ln n, n = {n})",
                d.threshold
            )?;
            writeln!(out, "t {}", d.t)?;
            writeln!(
                out,
                "solver {} ({})",
                if d.used_exact { "exact" } else { "local" },
                d.optimality
            )?;
            if d.asymptotic_only {
                writeln!(
                    out,
                    "caveat: the threshold rule is only argued for n > e^47 variables; no correctness claim at n = {n}"
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}
