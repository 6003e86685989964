//! Exact spanning tree congestion: decision, optimization, and an unpruned
//! oracle for cross-checking.

mod enumerate;
mod search;

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use enumerate::{enumerate_spanning_trees, stc_naive};

use crate::congestion::{tree_congestion, SpanningTree};
use crate::graph::{EdgeId, GraphError, WeightedGraph};
use crate::weight::Weight;
use search::{Halt, Instance, Search};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("invalid graph: {0}")]
    InvalidGraph(#[from] GraphError),
    #[error("more than {cap} spanning trees; refusing naive enumeration")]
    TooManyTrees { cap: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub timeout: Duration,
    /// Forces a single canonical search order, so certificates are reproducible.
    pub deterministic: bool,
    /// Worker threads for non-deterministic runs. `0` means available parallelism.
    pub threads: usize,
    /// Cap for naive enumeration.
    pub max_trees: Option<u64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { timeout: Duration::from_secs(600), deterministic: true, threads: 1, max_trees: Some(1_000_000) }
    }
}

impl SolveConfig {
    pub fn with_timeout(timeout: Duration) -> Self {
        SolveConfig { timeout, ..Self::default() }
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.timeout.is_zero() {
            return Err(SolveError::InvalidConfig("timeout must be positive".into()));
        }
        Ok(())
    }

    fn worker_count(&self) -> usize {
        if self.deterministic {
            return 1;
        }
        match self.threads {
            0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
            t => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    Timeout,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Timeout => "timeout",
        })
    }
}

/// Outcome of a decision or optimization run.
///
/// For optimization, `decision` is `Yes` once the optimum is proven and
/// `Timeout` otherwise; a timed-out run still carries the best tree found.
/// `trees_explored` counts search nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult<W> {
    pub decision: Decision,
    pub optimum: Option<W>,
    pub certificate: Option<SpanningTree>,
    pub trees_explored: u64,
    pub elapsed: Duration,
}

fn prepare<W: Weight>(graph: &WeightedGraph<W>, cfg: &SolveConfig) -> Result<(), SolveError> {
    cfg.validate()?;
    if graph.vertex_count() == 0 {
        return Err(SolveError::InvalidGraph(GraphError::InvalidArgument("graph has no vertices".into())));
    }
    graph.ensure_connected()?;
    Ok(())
}

struct Decided {
    decision: Decision,
    tree: Option<Vec<usize>>,
    nodes: u64,
}

fn decide(inst: &Instance, k: u64, deadline: Instant, workers: usize) -> Decided {
    if workers <= 1 {
        return decide_sequential(inst, k, deadline);
    }
    let mut root = Search::new(inst, k, Some(deadline), None);
    if !root.root_feasible() {
        return Decided { decision: Decision::No, tree: None, nodes: 1 };
    }
    let mut jobs = Vec::new();
    let depth = (usize::BITS - (workers * 8).leading_zeros()) as usize;
    root.split(depth, &mut Vec::new(), &mut jobs);

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let found: Mutex<Option<(usize, Vec<usize>)>> = Mutex::new(None);
    let nodes = AtomicUsize::new(0);
    let timed_out = AtomicBool::new(false);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = next.fetch_add(1, Ordering::Relaxed);
                if job >= jobs.len() || stop.load(Ordering::Relaxed) {
                    break;
                }
                let mut s = Search::new(inst, k, Some(deadline), Some(&stop));
                for &step in &jobs[job] {
                    s.apply(step);
                }
                let mut hit = None;
                let outcome = s.run(&mut |edges| {
                    hit = Some(edges.to_vec());
                    false
                });
                nodes.fetch_add(s.nodes as usize, Ordering::Relaxed);
                match outcome {
                    Err(Halt::Visitor) => {
                        let mut slot = found.lock().expect("poisoned");
                        if slot.as_ref().is_none_or(|(j, _)| job < *j) {
                            *slot = Some((job, hit.expect("visitor saw a tree")));
                        }
                        stop.store(true, Ordering::Relaxed);
                    }
                    Err(Halt::Interrupted) => {
                        if !stop.load(Ordering::Relaxed) || Instant::now() >= deadline {
                            timed_out.store(true, Ordering::Relaxed);
                        }
                        stop.store(true, Ordering::Relaxed);
                    }
                    Ok(()) => {}
                }
            });
        }
    });
    let nodes = root.nodes + nodes.load(Ordering::Relaxed) as u64;
    match found.into_inner().expect("poisoned") {
        Some((_, tree)) => Decided { decision: Decision::Yes, tree: Some(tree), nodes },
        None if timed_out.load(Ordering::Relaxed) => Decided { decision: Decision::Timeout, tree: None, nodes },
        None => Decided { decision: Decision::No, tree: None, nodes },
    }
}

fn decide_sequential(inst: &Instance, k: u64, deadline: Instant) -> Decided {
    let mut s = Search::new(inst, k, Some(deadline), None);
    if !s.root_feasible() {
        return Decided { decision: Decision::No, tree: None, nodes: 1 };
    }
    let mut hit = None;
    let outcome = s.run(&mut |edges| {
        hit = Some(edges.to_vec());
        false
    });
    let decision = match outcome {
        Err(Halt::Visitor) => Decision::Yes,
        Err(Halt::Interrupted) => Decision::Timeout,
        Ok(()) => Decision::No,
    };
    Decided { decision, tree: hit, nodes: s.nodes }
}

fn to_tree<W: Weight>(graph: &WeightedGraph<W>, edges: &[usize]) -> SpanningTree {
    SpanningTree::new(graph, edges.iter().copied().map(EdgeId)).expect("search produces spanning trees")
}

/// Does `graph` have a spanning tree of congestion at most `k`?
pub fn is_stc_at_most<W: Weight>(graph: &WeightedGraph<W>, k: W, cfg: &SolveConfig) -> Result<SolveResult<W>, SolveError> {
    prepare(graph, cfg)?;
    if k < W::one() {
        return Err(SolveError::InvalidConfig("K must be at least 1".into()));
    }
    let start = Instant::now();
    let inst = Instance::new(graph);
    let d = decide(&inst, k.widen(), start + cfg.timeout, cfg.worker_count());
    let certificate = d.tree.map(|t| to_tree(graph, &t));
    Ok(SolveResult { decision: d.decision, optimum: None, certificate, trees_explored: d.nodes, elapsed: start.elapsed() })
}

/// Breadth-first tree from the search root; starting incumbent for optimization.
fn bfs_tree(inst: &Instance) -> Vec<usize> {
    let mut seen = vec![false; inst.n];
    let mut edges = Vec::new();
    let mut queue = std::collections::VecDeque::from([inst.root]);
    seen[inst.root] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, e) in &inst.adj[x] {
            if !seen[y] {
                seen[y] = true;
                edges.push(e);
                queue.push_back(y);
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// Minimum congestion over all spanning trees, with a tree attaining it.
pub fn stc_exact<W: Weight>(graph: &WeightedGraph<W>, cfg: &SolveConfig) -> Result<SolveResult<W>, SolveError> {
    prepare(graph, cfg)?;
    let start = Instant::now();
    let deadline = start + cfg.timeout;
    let inst = Instance::new(graph);
    let mut best = to_tree(graph, &bfs_tree(&inst));
    let mut best_value = tree_congestion(graph, &best)?.max_congestion;
    let mut nodes = 0;
    // no tree edge can do better than its own inside weight, nor than 1
    let floor = graph
        .edges()
        .iter()
        .filter(|e| graph.degree(e.u) == 1 || graph.degree(e.v) == 1)
        .map(|e| e.weight.inside())
        .max()
        .unwrap_or_else(W::one)
        .max(W::one());
    let decision = loop {
        if best_value <= floor {
            break Decision::Yes;
        }
        let d = decide(&inst, best_value.widen() - 1, deadline, cfg.worker_count());
        nodes += d.nodes;
        match d.decision {
            Decision::Yes => {
                best = to_tree(graph, &d.tree.expect("yes carries a tree"));
                best_value = tree_congestion(graph, &best)?.max_congestion;
            }
            Decision::No => break Decision::Yes,
            Decision::Timeout => break Decision::Timeout,
        }
    };
    Ok(SolveResult {
        decision,
        optimum: (decision == Decision::Yes).then_some(best_value),
        certificate: Some(best),
        trees_explored: nodes,
        elapsed: start.elapsed(),
    })
}

/// Visits every spanning tree of congestion at most `k`, in canonical search
/// order. Returns `Ok(false)` if the deadline interrupted the walk.
pub fn for_each_tree_at_most<W, F>(graph: &WeightedGraph<W>, k: W, cfg: &SolveConfig, mut visit: F) -> Result<bool, SolveError>
where
    W: Weight,
    F: FnMut(SpanningTree) -> bool,
{
    prepare(graph, cfg)?;
    let inst = Instance::new(graph);
    let mut s = Search::new(&inst, k.widen(), Some(Instant::now() + cfg.timeout), None);
    if !s.root_feasible() {
        return Ok(true);
    }
    match s.run(&mut |edges| visit(to_tree(graph, edges))) {
        Ok(()) | Err(Halt::Visitor) => Ok(true),
        Err(Halt::Interrupted) => Ok(false),
    }
}
