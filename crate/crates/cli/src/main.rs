//! `stc`: batch front end for the spanning tree congestion toolkit.
//!
//! Exit codes: 0 success, 1 inconsistency detected, 2 usage or parse error,
//! 3 timeout or inconclusive.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use stc_core::generate::random_2p1n;
use stc_core::io::{
    canonical_line, congestion_report_to_json, graph_from_json, graph_to_json, solve_result_to_json, to_dot, tree_from_json,
};
use stc_core::reduction::{reduce, roundtrip_check, verify_claims, ReductionMap, Verdict};
use stc_core::sat::{parse_dimacs, solve_sat, violations_json, write_dimacs, SatError};
use stc_core::solver::{is_stc_at_most, stc_exact};
use stc_core::{tree_congestion_with_witnesses, Decision, Graph, SolveConfig, SpanningTree};

const EXIT_INCONSISTENT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "stc", version, about = "Spanning tree congestion lab: (2P1N)-SAT reduction, exact solver, certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Debug, Args)]
struct SolveOpts {
    /// Wall-clock budget for the search.
    #[arg(long, value_name = "INT", default_value_t = 600_000)]
    timeout_ms: u64,
    /// Sequential canonical search and zeroed timings: identical inputs give identical bytes.
    #[arg(long)]
    deterministic: bool,
}

impl SolveOpts {
    fn config(&self) -> Result<SolveConfig, Failure> {
        if self.timeout_ms == 0 {
            return Err(Failure::usage("--timeout-ms must be positive"));
        }
        let timeout = Duration::from_millis(self.timeout_ms);
        Ok(if self.deterministic {
            SolveConfig { timeout, deterministic: true, threads: 1, ..SolveConfig::default() }
        } else {
            SolveConfig { timeout, deterministic: false, threads: 0, ..SolveConfig::default() }
        })
    }
}

#[derive(Debug, Args)]
struct Out {
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the K-STC instance of a (2P1N) formula: {"graph": ..., "map": ...}.
    Reduce {
        #[arg(long, value_name = "PATH")]
        cnf: PathBuf,
        #[arg(long, value_name = "INT")]
        k: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Decide whether a graph has a spanning tree of congestion at most K.
    StcDecide {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[arg(long, value_name = "INT")]
        k: u32,
        #[command(flatten)]
        solve: SolveOpts,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Compute the spanning tree congestion of a graph.
    StcExact {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[command(flatten)]
        solve: SolveOpts,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Solve a (2P1N) formula exhaustively.
    SatSolve {
        #[arg(long, value_name = "PATH")]
        cnf: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Check that a formula is satisfiable iff its reduced graph has stc <= K.
    Roundtrip {
        #[arg(long, value_name = "PATH")]
        cnf: PathBuf,
        #[arg(long, value_name = "INT")]
        k: u32,
        #[command(flatten)]
        solve: SolveOpts,
        #[command(flatten)]
        out: Out,
    },
    /// Congestion report of a spanning tree.
    VerifyTree {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[arg(long, value_name = "PATH")]
        tree: PathBuf,
        #[arg(long, value_name = "INT")]
        k: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Check the structural claims on a tree of a reduced graph.
    Claims {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[arg(long, value_name = "PATH")]
        map: PathBuf,
        #[arg(long, value_name = "PATH")]
        tree: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Graphviz rendering of a graph, optionally with a tree.
    ExportDot {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[arg(long, value_name = "PATH")]
        tree: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Write seeded random (2P1N) formulas as DIMACS files into a directory.
    GenCorpus {
        #[arg(long, value_name = "INT", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "INT", default_value_t = 20)]
        count: usize,
        #[arg(long, value_name = "INT", default_value_t = 3)]
        vars: usize,
        /// Target directory, created if missing.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// The value under `key` when `v` is a bundle holding it, else `v` itself.
fn unwrap_bundle(v: Value, key: &str) -> Value {
    match v {
        Value::Object(mut o) if o.contains_key(key) => o.remove(key).unwrap_or(Value::Null),
        other => other,
    }
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let v = unwrap_bundle(read_json(path)?, "graph");
    graph_from_json(&v).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Accepts a tree JSON or a solver record carrying a certificate.
fn load_tree(path: &Path, graph: &Graph) -> Result<SpanningTree, Failure> {
    let v = unwrap_bundle(read_json(path)?, "certificate");
    if v.is_null() {
        return Err(Failure::usage(format!("{}: no certificate in solver record", path.display())));
    }
    tree_from_json(&v, graph).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path, graph: &Graph) -> Result<ReductionMap, Failure> {
    let v = unwrap_bundle(read_json(path)?, "map");
    ReductionMap::from_json(&v, graph).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_cnf(path: &Path) -> Result<stc_core::sat::TwoPOneNFormula, Failure> {
    parse_dimacs(&read(path)?).map_err(|e| match e {
        SatError::NotTwoPOneN(v) => Failure::usage(format!("{}: {}", path.display(), canonical_line(&violations_json(&v)).trim_end())),
        other => Failure::usage(format!("{}: {other}", path.display())),
    })
}

fn emit(out: &Out, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn decision_code(d: Decision) -> u8 {
    if d == Decision::Timeout {
        EXIT_INCONCLUSIVE
    } else {
        0
    }
}

fn solve_output(graph: &Graph, result: &stc_core::SolveResult, format: Format, zero_elapsed: bool) -> String {
    match format {
        Format::Json => canonical_line(&solve_result_to_json(graph, result, zero_elapsed)),
        Format::Dot => to_dot(graph, result.certificate.as_ref()),
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Reduce { cnf, k, out } => {
            let f = load_cnf(&cnf)?;
            let (g, map) = reduce(&f, k).map_err(|e| Failure::usage(e.to_string()))?;
            emit(&out, &canonical_line(&json!({"graph": graph_to_json(&g), "map": map.to_json()})))?;
            Ok(0)
        }
        Command::StcDecide { graph, k, solve, format, out } => {
            let g = load_graph(&graph)?;
            let r = is_stc_at_most(&g, k, &solve.config()?).map_err(|e| Failure::usage(e.to_string()))?;
            emit(&out, &solve_output(&g, &r, format, solve.deterministic))?;
            Ok(decision_code(r.decision))
        }
        Command::StcExact { graph, solve, format, out } => {
            let g = load_graph(&graph)?;
            let r = stc_exact(&g, &solve.config()?).map_err(|e| Failure::usage(e.to_string()))?;
            emit(&out, &solve_output(&g, &r, format, solve.deterministic))?;
            Ok(decision_code(r.decision))
        }
        Command::SatSolve { cnf, out } => {
            let f = load_cnf(&cnf)?;
            let a = solve_sat(&f).map_err(|e| Failure::usage(e.to_string()))?;
            let v = json!({"sat": a.is_some(), "assignment": a.as_ref().map(|a| a.to_json())});
            emit(&out, &canonical_line(&v))?;
            Ok(0)
        }
        Command::Roundtrip { cnf, k, solve, out } => {
            let f = load_cnf(&cnf)?;
            let report = roundtrip_check(&f, k, &solve.config()?).map_err(|e| Failure::usage(e.to_string()))?;
            let mut v = report.to_json();
            v["K"] = json!(k);
            emit(&out, &canonical_line(&v))?;
            Ok(match report.verdict {
                Verdict::Consistent { .. } => 0,
                Verdict::Inconsistent(_) => EXIT_INCONSISTENT,
                Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
            })
        }
        Command::VerifyTree { graph, tree, k, format, out } => {
            let g = load_graph(&graph)?;
            let t = load_tree(&tree, &g)?;
            let text = match format {
                Format::Json => {
                    let report = tree_congestion_with_witnesses(&g, &t).map_err(|e| Failure::usage(e.to_string()))?;
                    canonical_line(&congestion_report_to_json(&report, k))
                }
                Format::Dot => to_dot(&g, Some(&t)),
            };
            emit(&out, &text)?;
            Ok(0)
        }
        Command::Claims { graph, map, tree, out } => {
            let g = load_graph(&graph)?;
            let m = load_map(&map, &g)?;
            let t = load_tree(&tree, &g)?;
            let report = verify_claims(&g, &m, &t).map_err(|e| Failure::usage(e.to_string()))?;
            emit(&out, &canonical_line(&report.to_json()))?;
            Ok(0)
        }
        Command::ExportDot { graph, tree, format, out } => {
            if format != Format::Dot {
                return Err(Failure::usage("export-dot only writes --format dot"));
            }
            let g = load_graph(&graph)?;
            let t = tree.map(|p| load_tree(&p, &g)).transpose()?;
            emit(&out, &to_dot(&g, t.as_ref()))?;
            Ok(0)
        }
        Command::GenCorpus { seed, count, vars, out } => {
            fs::create_dir_all(&out).map_err(|e| Failure::usage(format!("{}: {e}", out.display())))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut files = Vec::with_capacity(count);
            for i in 0..count {
                let f = random_2p1n(vars, &mut rng).map_err(|e| Failure::usage(e.to_string()))?;
                let comments = [format!("seed={seed}"), format!("index={i}"), format!("vars={vars}")];
                let name = format!("2p1n-n{vars}-{i:03}.cnf");
                let path = out.join(&name);
                fs::write(&path, write_dimacs(&f.to_raw(), &comments)).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                files.push(name);
            }
            print!("{}", canonical_line(&json!({"seed": seed, "vars": vars, "files": files})));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("stc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
