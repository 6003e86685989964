//! Branch-and-bound over spanning trees grown from a root vertex.
//!
//! A node of the search is a subtree `S` containing the root together with a
//! set of excluded edges. Branching picks the lowest-id undecided edge leaving
//! `S` and either adds it to the tree or excludes it. Every spanning tree is
//! reached by exactly one include/exclude sequence.
//!
//! Pruning: for a committed tree edge `t` splitting `S` into `A` (root side)
//! and `B`, every completion places `A` and `B` on opposite sides of `t`, and
//! every other edge crossing that final cut is a non-tree edge. So
//! `inside(t) + mincut(A, B)` over `G − t` with capacities `outside(·)` is a
//! lower bound on the final congestion of `t`, and it is exact once `S = V`.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use crate::graph::WeightedGraph;
use crate::weight::Weight;

#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub n: usize,
    pub ends: Vec<(usize, usize)>,
    pub outside: Vec<u64>,
    pub inside: Vec<u64>,
    pub adj: Vec<Vec<(usize, usize)>>,
    pub root: usize,
}

impl Instance {
    pub fn new<W: Weight>(graph: &WeightedGraph<W>) -> Self {
        let n = graph.vertex_count();
        let mut adj = vec![Vec::new(); n];
        let mut ends = Vec::with_capacity(graph.edge_count());
        let mut outside = Vec::with_capacity(graph.edge_count());
        let mut inside = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            adj[e.u.0].push((e.v.0, e.id.0));
            adj[e.v.0].push((e.u.0, e.id.0));
            ends.push((e.u.0, e.v.0));
            outside.push(e.weight.outside().widen());
            inside.push(e.weight.inside().widen());
        }
        // highest degree vertex, lowest id on ties
        let root = (0..n).max_by_key(|&v| (adj[v].len(), std::cmp::Reverse(v))).unwrap_or(0);
        Instance { n, ends, outside, inside, adj, root }
    }

    pub fn m(&self) -> usize {
        self.ends.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    Free,
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    Include(usize),
    Exclude(usize),
}

/// Why a search stopped before exhausting its space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Halt {
    /// The visitor asked to stop.
    Visitor,
    /// Deadline passed or another worker raised the stop flag.
    Interrupted,
}

pub(crate) struct Search<'a> {
    inst: &'a Instance,
    k: u64,
    mark: Vec<Mark>,
    in_s: Vec<bool>,
    s_count: usize,
    parent: Vec<Option<(usize, usize)>>,
    order: Vec<usize>,
    pub nodes: u64,
    deadline: Option<Instant>,
    stop: Option<&'a AtomicBool>,
    // scratch
    flow: Vec<i64>,
    side: Vec<u8>,
    pred: Vec<Option<(usize, usize)>>,
    queue: VecDeque<usize>,
}

const SIDE_FREE: u8 = 0;
const SIDE_A: u8 = 1;
const SIDE_B: u8 = 2;

impl<'a> Search<'a> {
    pub fn new(inst: &'a Instance, k: u64, deadline: Option<Instant>, stop: Option<&'a AtomicBool>) -> Self {
        let n = inst.n;
        let mut s = Search {
            inst,
            k,
            mark: vec![Mark::Free; inst.m()],
            in_s: vec![false; n],
            s_count: 0,
            parent: vec![None; n],
            order: Vec::with_capacity(n),
            nodes: 0,
            deadline,
            stop,
            flow: vec![0; inst.m()],
            side: vec![SIDE_FREE; n],
            pred: vec![None; n],
            queue: VecDeque::with_capacity(n),
        };
        if n > 0 {
            s.in_s[inst.root] = true;
            s.s_count = 1;
            s.order.push(inst.root);
        }
        s
    }

    /// Current tree edges, ascending.
    pub fn tree_edges(&self) -> Vec<usize> {
        let mut edges: Vec<usize> = self.order.iter().filter_map(|&v| self.parent[v].map(|(_, e)| e)).collect();
        edges.sort_unstable();
        edges
    }

    fn interrupted(&self) -> bool {
        if self.stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
            return true;
        }
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn frontier_edge(&self) -> Option<usize> {
        (0..self.inst.m()).find(|&e| {
            let (u, v) = self.inst.ends[e];
            self.mark[e] == Mark::Free && self.in_s[u] != self.in_s[v]
        })
    }

    /// Adds `e` to the tree; returns the edges that became cycle-closing and
    /// were marked out.
    fn include(&mut self, e: usize) -> Vec<usize> {
        let (u, v) = self.inst.ends[e];
        let (p, q) = if self.in_s[u] { (u, v) } else { (v, u) };
        self.mark[e] = Mark::In;
        self.in_s[q] = true;
        self.s_count += 1;
        self.parent[q] = Some((p, e));
        self.order.push(q);
        let mut closed = Vec::new();
        for &(y, f) in &self.inst.adj[q] {
            if f != e && self.in_s[y] && self.mark[f] == Mark::Free {
                self.mark[f] = Mark::Out;
                closed.push(f);
            }
        }
        closed
    }

    fn undo_include(&mut self, e: usize, closed: Vec<usize>) {
        for f in closed {
            self.mark[f] = Mark::Free;
        }
        let q = self.order.pop().expect("included vertex");
        self.parent[q] = None;
        self.in_s[q] = false;
        self.s_count -= 1;
        self.mark[e] = Mark::Free;
    }

    pub fn apply(&mut self, step: Step) {
        match step {
            Step::Include(e) => {
                self.include(e);
            }
            Step::Exclude(e) => self.mark[e] = Mark::Out,
        }
    }

    /// Every vertex reachable from the root through non-excluded edges.
    fn spannable(&mut self) -> bool {
        let n = self.inst.n;
        let seen = &mut self.side;
        seen.iter_mut().for_each(|s| *s = 0);
        seen[self.inst.root] = 1;
        self.queue.clear();
        self.queue.push_back(self.inst.root);
        let mut count = 1;
        while let Some(x) = self.queue.pop_front() {
            for &(y, f) in &self.inst.adj[x] {
                if self.mark[f] != Mark::Out && seen[y] == 0 {
                    seen[y] = 1;
                    count += 1;
                    self.queue.push_back(y);
                }
            }
        }
        count == n
    }

    /// True when the minimum `A`–`B` cut of `G − t` exceeds `limit`.
    fn cut_exceeds(&mut self, t: usize, limit: u64) -> bool {
        let inst = self.inst;
        self.flow.iter_mut().for_each(|f| *f = 0);
        let mut total = 0u64;
        loop {
            self.pred.iter_mut().for_each(|p| *p = None);
            self.queue.clear();
            for &v in &self.order {
                if self.side[v] == SIDE_A {
                    self.queue.push_back(v);
                }
            }
            let mut sink = None;
            'bfs: while let Some(x) = self.queue.pop_front() {
                for &(y, f) in &inst.adj[x] {
                    if f == t || self.side[y] == SIDE_A || self.pred[y].is_some() {
                        continue;
                    }
                    let residual = self.residual(f, x);
                    if residual == 0 {
                        continue;
                    }
                    self.pred[y] = Some((x, f));
                    if self.side[y] == SIDE_B {
                        sink = Some(y);
                        break 'bfs;
                    }
                    self.queue.push_back(y);
                }
            }
            let Some(sink) = sink else {
                return false;
            };
            let mut bottleneck = u64::MAX;
            let mut y = sink;
            while let Some((x, f)) = self.pred[y] {
                bottleneck = bottleneck.min(self.residual(f, x));
                y = x;
                if self.side[y] == SIDE_A {
                    break;
                }
            }
            let mut y = sink;
            while let Some((x, f)) = self.pred[y] {
                let delta = bottleneck as i64;
                if inst.ends[f].0 == x {
                    self.flow[f] += delta;
                } else {
                    self.flow[f] -= delta;
                }
                y = x;
                if self.side[y] == SIDE_A {
                    break;
                }
            }
            total += bottleneck;
            if total > limit {
                return true;
            }
        }
    }

    fn residual(&self, f: usize, from: usize) -> u64 {
        let cap = self.inst.outside[f] as i64;
        let r = if self.inst.ends[f].0 == from { cap - self.flow[f] } else { cap + self.flow[f] };
        r.max(0) as u64
    }

    /// Lower bound check for the tree edge above `child`.
    fn edge_bound_ok(&mut self, child: usize) -> bool {
        let (_, t) = self.parent[child].expect("non-root tree vertex");
        let own = self.inst.inside[t];
        if own > self.k {
            return false;
        }
        // B = subtree of `child`; parents precede children in `order`
        for s in self.side.iter_mut() {
            *s = SIDE_FREE;
        }
        self.side[child] = SIDE_B;
        for &v in &self.order {
            if v == child {
                continue;
            }
            let in_b = self.parent[v].is_some_and(|(p, _)| self.side[p] == SIDE_B);
            self.side[v] = if in_b { SIDE_B } else { SIDE_A };
        }
        !self.cut_exceeds(t, self.k - own)
    }

    /// Lower bound check on every committed tree edge; newest edges first.
    fn bounds_ok(&mut self) -> bool {
        (1..self.order.len()).rev().all(|idx| self.edge_bound_ok(self.order[idx]))
    }

    /// Lower bound check on the tree path from `v` up to the root only.
    fn path_bounds_ok(&mut self, mut v: usize) -> bool {
        while let Some((p, _)) = self.parent[v] {
            if !self.edge_bound_ok(v) {
                return false;
            }
            v = p;
        }
        true
    }

    /// Excludes every frontier edge whose inclusion already violates a bound
    /// on its root path. Returns the excluded edges.
    fn probe(&mut self) -> Vec<usize> {
        let mut excluded = Vec::new();
        for f in 0..self.inst.m() {
            let (u, v) = self.inst.ends[f];
            if self.mark[f] != Mark::Free || self.in_s[u] == self.in_s[v] {
                continue;
            }
            let q = if self.in_s[u] { v } else { u };
            let closed = self.include(f);
            let ok = self.path_bounds_ok(q);
            self.undo_include(f, closed);
            if !ok {
                self.mark[f] = Mark::Out;
                excluded.push(f);
            }
        }
        excluded
    }

    fn checkpoint(&mut self) -> Result<(), Halt> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(256) && self.interrupted() {
            return Err(Halt::Interrupted);
        }
        Ok(())
    }

    /// Depth-first search below the current node. `visit` receives each
    /// feasible spanning tree (ascending edge ids) and returns `false` to stop.
    pub fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<(), Halt> {
        self.checkpoint()?;
        if self.s_count == self.inst.n {
            let edges = self.tree_edges();
            return if visit(&edges) { Ok(()) } else { Err(Halt::Visitor) };
        }
        let probed = self.probe();
        let result = if probed.is_empty() || self.spannable() { self.branch(visit) } else { Ok(()) };
        for f in probed {
            self.mark[f] = Mark::Free;
        }
        result
    }

    fn branch(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<(), Halt> {
        let Some(e) = self.frontier_edge() else {
            return Ok(());
        };
        let closed = self.include(e);
        let result = if self.bounds_ok() { self.run(visit) } else { Ok(()) };
        self.undo_include(e, closed);
        result?;

        self.mark[e] = Mark::Out;
        let result = if self.spannable() { self.run(visit) } else { Ok(()) };
        self.mark[e] = Mark::Free;
        result
    }

    /// Collects the open nodes at `depth` below the current node as step
    /// sequences, in search order.
    pub fn split(&mut self, depth: usize, prefix: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if depth == 0 || self.s_count == self.inst.n {
            out.push(prefix.clone());
            return;
        }
        let Some(e) = self.frontier_edge() else {
            return;
        };
        let closed = self.include(e);
        if self.bounds_ok() {
            prefix.push(Step::Include(e));
            self.split(depth - 1, prefix, out);
            prefix.pop();
        }
        self.undo_include(e, closed);

        self.mark[e] = Mark::Out;
        if self.spannable() {
            prefix.push(Step::Exclude(e));
            self.split(depth - 1, prefix, out);
            prefix.pop();
        }
        self.mark[e] = Mark::Free;
    }

    /// Checks the root node itself (single-vertex subtree is always fine).
    pub fn root_feasible(&mut self) -> bool {
        self.inst.n <= 1 || self.spannable()
    }
}
