//! Weighted undirected graphs with single and double edge weights.
//!
//! An edge `(u, v)` of weight `ω` stands for a bundle of `ω` parallel edges.
//! A double weight `⟨ω|ω′⟩` contributes `ω` to the congestion of every tree edge
//! whose cut it crosses while outside the tree, and `ω′` to its own congestion
//! while inside the tree.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertices {0} and {1} are already joined by edge {2}")]
    DuplicateEdge(VertexId, VertexId, EdgeId),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("congestion overflows the weight type")]
    Overflow,
}

/// Weight of one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeWeight<W> {
    Single(W),
    /// `outside` is contributed while the edge is a non-tree edge, `inside`
    /// while it is a tree edge (to its own congestion only).
    Double { outside: W, inside: W },
}

impl<W: Weight> EdgeWeight<W> {
    pub fn single(w: W) -> Result<Self, GraphError> {
        if w < W::one() {
            return Err(GraphError::InvalidWeight(format!("single weight {w} must be >= 1")));
        }
        Ok(EdgeWeight::Single(w))
    }

    pub fn double(outside: W, inside: W) -> Result<Self, GraphError> {
        if outside < W::one() || outside > inside {
            return Err(GraphError::InvalidWeight(format!(
                "double weight <{outside}|{inside}> must satisfy 1 <= w <= w'"
            )));
        }
        Ok(EdgeWeight::Double { outside, inside })
    }

    /// Contribution to the congestion of a tree edge this edge crosses, when
    /// this edge is not in the tree.
    pub fn outside(&self) -> W {
        match *self {
            EdgeWeight::Single(w) => w,
            EdgeWeight::Double { outside, .. } => outside,
        }
    }

    /// Contribution to its own congestion when this edge is in the tree.
    pub fn inside(&self) -> W {
        match *self {
            EdgeWeight::Single(w) => w,
            EdgeWeight::Double { inside, .. } => inside,
        }
    }

    pub fn is_double(&self) -> bool {
        matches!(self, EdgeWeight::Double { .. })
    }
}

impl<W: Weight> fmt::Display for EdgeWeight<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeWeight::Single(w) => write!(f, "{w}"),
            EdgeWeight::Double { outside, inside } => write!(f, "<{outside}|{inside}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<W> {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub weight: EdgeWeight<W>,
}

impl<W> Edge<W> {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

/// Undirected graph without self-loops and with at most one edge per vertex
/// pair. Edge ids follow insertion order.
#[derive(Debug, Clone)]
pub struct WeightedGraph<W> {
    labels: Vec<Option<String>>,
    edges: Vec<Edge<W>>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    pairs: HashMap<(usize, usize), EdgeId>,
}

impl<W: Weight> Default for WeightedGraph<W> {
    fn default() -> Self {
        Self::new()
    }
}

fn pair_key(a: VertexId, b: VertexId) -> (usize, usize) {
    if a.0 <= b.0 {
        (a.0, b.0)
    } else {
        (b.0, a.0)
    }
}

impl<W: Weight> WeightedGraph<W> {
    pub fn new() -> Self {
        WeightedGraph { labels: Vec::new(), edges: Vec::new(), adjacency: Vec::new(), pairs: HashMap::new() }
    }

    /// Graph on `n` unlabeled vertices and no edges.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex(None);
        }
        g
    }

    pub fn add_vertex(&mut self, label: Option<&str>) -> VertexId {
        self.labels.push(label.map(str::to_owned));
        self.adjacency.push(Vec::new());
        VertexId(self.labels.len() - 1)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: EdgeWeight<W>) -> Result<EdgeId, GraphError> {
        for x in [u, v] {
            if x.0 >= self.labels.len() {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        match weight {
            EdgeWeight::Single(w) => {
                EdgeWeight::single(w)?;
            }
            EdgeWeight::Double { outside, inside } => {
                EdgeWeight::double(outside, inside)?;
            }
        }
        let key = pair_key(u, v);
        if let Some(&existing) = self.pairs.get(&key) {
            return Err(GraphError::DuplicateEdge(u, v, existing));
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge { id, u, v, weight });
        self.adjacency[u.0].push((v, id));
        self.adjacency[v.0].push((u, id));
        self.pairs.insert(key, id);
        Ok(id)
    }

    /// Shorthand for a unit-weight edge.
    pub fn add_unit_edge(&mut self, u: usize, v: usize) -> Result<EdgeId, GraphError> {
        self.add_edge(VertexId(u), VertexId(v), EdgeWeight::Single(W::one()))
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge<W>, GraphError> {
        self.edges.get(id.0).ok_or(GraphError::UnknownEdge(id))
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(v.0).and_then(|l| l.as_deref())
    }

    /// Label if present, otherwise the decimal index.
    pub fn display_name(&self, v: VertexId) -> String {
        self.label(v).map(str::to_owned).unwrap_or_else(|| v.0.to_string())
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l.as_deref() == Some(label)).map(VertexId)
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.pairs.get(&pair_key(u, v)).copied()
    }

    pub fn has_double_weights(&self) -> bool {
        self.edges.iter().any(|e| e.weight.is_double())
    }

    /// The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adjacency[x] {
                if !seen[y.0] {
                    seen[y.0] = true;
                    count += 1;
                    stack.push(y.0);
                }
            }
        }
        count == n
    }

    pub fn ensure_connected(&self) -> Result<(), GraphError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(GraphError::Disconnected)
        }
    }

    fn fresh_label(&self, u: VertexId, v: VertexId, copy: Option<usize>) -> String {
        let base = format!("w@{}-{}", self.display_name(u), self.display_name(v));
        match copy {
            None => base,
            Some(k) => format!("{base}#{k}"),
        }
    }

    fn copy_vertices(&self) -> Self {
        let mut out = Self::new();
        for l in &self.labels {
            out.add_vertex(l.as_deref());
        }
        out
    }

    /// Replaces every double edge `(u,v)` of weight `⟨ω|ω′⟩` by a path
    /// `u – w – v` with single weights `ω` and `ω′`. Fresh vertices are appended
    /// in edge-id order.
    pub fn expand_double_weights(&self) -> Self {
        let mut out = self.copy_vertices();
        for e in &self.edges {
            match e.weight {
                EdgeWeight::Single(_) => {
                    out.add_edge(e.u, e.v, e.weight).expect("copied edge is valid");
                }
                EdgeWeight::Double { outside, inside } => {
                    let w = out.add_vertex(Some(&self.fresh_label(e.u, e.v, None)));
                    out.add_edge(e.u, w, EdgeWeight::Single(outside)).expect("fresh vertex");
                    out.add_edge(w, e.v, EdgeWeight::Single(inside)).expect("fresh vertex");
                }
            }
        }
        out
    }

    /// Replaces the single-weight edge `e = (u,v)` of weight `ω` by `u – w – v`
    /// with both halves of weight `ω`.
    pub fn subdivide_edge(&self, target: EdgeId) -> Result<Self, GraphError> {
        let t = self.edge(target)?;
        if t.weight.is_double() {
            return Err(GraphError::InvalidArgument(format!(
                "edge {target} has a double weight; expand double weights first"
            )));
        }
        let mut out = self.copy_vertices();
        for e in &self.edges {
            if e.id == target {
                let w = out.add_vertex(Some(&self.fresh_label(e.u, e.v, None)));
                out.add_edge(e.u, w, e.weight)?;
                out.add_edge(w, e.v, e.weight)?;
            } else {
                out.add_edge(e.u, e.v, e.weight)?;
            }
        }
        Ok(out)
    }

    /// Simple unweighted graph with the same spanning tree congestion: double
    /// weights are expanded, then a weight-`ω` edge keeps one direct edge and
    /// gains `ω − 1` subdivided two-edge paths.
    pub fn to_simple_graph(&self) -> Self {
        let expanded = self.expand_double_weights();
        let mut out = expanded.copy_vertices();
        let one = EdgeWeight::Single(W::one());
        for e in &expanded.edges {
            out.add_edge(e.u, e.v, one).expect("copied edge is valid");
            let extra = e.weight.outside().to_usize().expect("weight fits usize") - 1;
            for k in 1..=extra {
                let w = out.add_vertex(Some(&expanded.fresh_label(e.u, e.v, Some(k))));
                out.add_edge(e.u, w, one).expect("fresh vertex");
                out.add_edge(w, e.v, one).expect("fresh vertex");
            }
        }
        out
    }
}
