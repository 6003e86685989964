//! Unpruned spanning tree enumeration by contraction/deletion in edge-id order.
//!
//! Kept separate from the branch-and-bound search so that the naive optimum is
//! an independent check on the pruned one.

use std::ops::ControlFlow;

use crate::congestion::{tree_congestion, SpanningTree};
use crate::graph::{EdgeId, WeightedGraph};
use crate::weight::Weight;

use super::SolveError;

/// Union-find with rollback. Union by size, no path compression.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<(usize, usize)>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu { parent: (0..n).collect(), size: vec![1; n], history: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.history.push((a, b));
        true
    }

    fn rollback(&mut self) {
        let (a, b) = self.history.pop().expect("rollback without union");
        self.parent[b] = b;
        self.size[a] -= self.size[b];
    }
}

struct Enumerator<'a, F> {
    ends: Vec<(usize, usize)>,
    n: usize,
    dsu: RollbackDsu,
    chosen: Vec<EdgeId>,
    count: u64,
    visit: &'a mut F,
}

impl<F: FnMut(&[EdgeId]) -> ControlFlow<()>> Enumerator<'_, F> {
    /// Can the chosen forest plus edges `from..` still span the graph?
    fn completable(&self, from: usize) -> bool {
        let mut dsu = RollbackDsu::new(self.n);
        let mut comps = self.n;
        for &e in &self.chosen {
            let (u, v) = self.ends[e.0];
            if dsu.union(u, v) {
                comps -= 1;
            }
        }
        for &(u, v) in &self.ends[from..] {
            if dsu.union(u, v) {
                comps -= 1;
            }
        }
        comps == 1
    }

    fn run(&mut self, i: usize) -> ControlFlow<()> {
        if self.chosen.len() + 1 == self.n {
            self.count += 1;
            return (self.visit)(&self.chosen);
        }
        if i == self.ends.len() {
            return ControlFlow::Continue(());
        }
        let (u, v) = self.ends[i];
        if self.dsu.union(u, v) {
            self.chosen.push(EdgeId(i));
            let flow = self.run(i + 1);
            self.chosen.pop();
            self.dsu.rollback();
            flow?;
        }
        if self.completable(i + 1) {
            self.run(i + 1)?;
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` once for every spanning tree (edge ids ascending). Returns the
/// number of trees visited; the visitor may stop the enumeration early.
pub fn enumerate_spanning_trees<W, F>(graph: &WeightedGraph<W>, mut visit: F) -> Result<u64, SolveError>
where
    W: Weight,
    F: FnMut(&[EdgeId]) -> ControlFlow<()>,
{
    graph.ensure_connected()?;
    let n = graph.vertex_count();
    if n <= 1 {
        let _ = visit(&[]);
        return Ok(1);
    }
    let mut e = Enumerator {
        ends: graph.edges().iter().map(|e| (e.u.0, e.v.0)).collect(),
        n,
        dsu: RollbackDsu::new(n),
        chosen: Vec::new(),
        count: 0,
        visit: &mut visit,
    };
    let _ = e.run(0);
    Ok(e.count)
}

/// Spanning tree congestion by evaluating every spanning tree. Refuses graphs
/// with more than `max_trees` spanning trees.
pub fn stc_naive<W: Weight>(graph: &WeightedGraph<W>, max_trees: u64) -> Result<W, SolveError> {
    let mut best: Option<W> = None;
    let mut failure: Option<SolveError> = None;
    let mut seen = 0u64;
    enumerate_spanning_trees(graph, |edges| {
        seen += 1;
        if seen > max_trees {
            failure = Some(SolveError::TooManyTrees { cap: max_trees });
            return ControlFlow::Break(());
        }
        let tree = SpanningTree::new(graph, edges.iter().copied()).expect("enumerated tree is valid");
        match tree_congestion(graph, &tree) {
            Ok(report) => {
                best = Some(best.map_or(report.max_congestion, |b| b.min(report.max_congestion)));
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e.into());
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.expect("connected graph has a spanning tree"))
}
