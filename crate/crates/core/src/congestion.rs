//! Spanning trees, cross-edge sets and congestion.

use std::collections::BTreeMap;

use crate::graph::{EdgeId, GraphError, VertexId, WeightedGraph};
use crate::weight::Weight;

/// An edge subset of a host graph that forms a spanning tree.
///
/// The tree does not borrow its graph; every operation takes the host graph
/// again and re-checks that the edge set spans it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanningTree {
    edges: Vec<EdgeId>,
}

impl SpanningTree {
    pub fn new<W: Weight>(graph: &WeightedGraph<W>, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self, GraphError> {
        let mut edges: Vec<EdgeId> = edges.into_iter().collect();
        edges.sort_unstable();
        let tree = SpanningTree { edges };
        tree.validate(graph)?;
        Ok(tree)
    }

    /// Sorted edge ids.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn validate<W: Weight>(&self, graph: &WeightedGraph<W>) -> Result<(), GraphError> {
        let n = graph.vertex_count();
        if n == 0 {
            return Err(GraphError::InvalidTree("graph has no vertices".into()));
        }
        if self.edges.len() != n - 1 {
            return Err(GraphError::InvalidTree(format!(
                "{} edges given, a spanning tree on {n} vertices has {}",
                self.edges.len(),
                n - 1
            )));
        }
        if self.edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::InvalidTree("repeated edge id".into()));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &id in &self.edges {
            let e = graph.edge(id).map_err(|_| GraphError::InvalidTree(format!("edge {id} not in graph")))?;
            let (a, b) = (find(&mut parent, e.u.0), find(&mut parent, e.v.0));
            if a == b {
                return Err(GraphError::InvalidTree(format!("edge {id} closes a cycle")));
            }
            parent[a] = b;
        }
        Ok(())
    }
}

/// The tree rooted at vertex 0, used for path queries.
pub(crate) struct RootedTree {
    pub parent: Vec<Option<(VertexId, EdgeId)>>,
    pub depth: Vec<usize>,
    pub in_tree: Vec<bool>,
}

impl RootedTree {
    pub fn build<W: Weight>(graph: &WeightedGraph<W>, tree: &SpanningTree) -> Result<Self, GraphError> {
        tree.validate(graph)?;
        let n = graph.vertex_count();
        let mut in_tree = vec![false; graph.edge_count()];
        for e in tree.edges() {
            in_tree[e.0] = true;
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![VertexId(0)];
        while let Some(x) = stack.pop() {
            for &(y, e) in graph.neighbors(x) {
                if in_tree[e.0] && !seen[y.0] {
                    seen[y.0] = true;
                    parent[y.0] = Some((x, e));
                    depth[y.0] = depth[x.0] + 1;
                    stack.push(y);
                }
            }
        }
        Ok(RootedTree { parent, depth, in_tree })
    }

    /// Tree edges on the path between `a` and `b`.
    pub fn path(&self, mut a: VertexId, mut b: VertexId) -> Vec<EdgeId> {
        let mut from_a = Vec::new();
        let mut from_b = Vec::new();
        while self.depth[a.0] > self.depth[b.0] {
            let (p, e) = self.parent[a.0].expect("non-root has a parent");
            from_a.push(e);
            a = p;
        }
        while self.depth[b.0] > self.depth[a.0] {
            let (p, e) = self.parent[b.0].expect("non-root has a parent");
            from_b.push(e);
            b = p;
        }
        while a != b {
            let (pa, ea) = self.parent[a.0].expect("non-root has a parent");
            let (pb, eb) = self.parent[b.0].expect("non-root has a parent");
            from_a.push(ea);
            from_b.push(eb);
            a = pa;
            b = pb;
        }
        from_b.reverse();
        from_a.extend(from_b);
        from_a
    }
}

/// Edges of the tree path from `a` to `b`, in walking order.
pub fn tree_path<W: Weight>(
    graph: &WeightedGraph<W>,
    tree: &SpanningTree,
    a: VertexId,
    b: VertexId,
) -> Result<Vec<EdgeId>, GraphError> {
    for x in [a, b] {
        if x.0 >= graph.vertex_count() {
            return Err(GraphError::UnknownVertex(x));
        }
    }
    Ok(RootedTree::build(graph, tree)?.path(a, b))
}

/// Vertices on the `e.u` side of `tree − e`, as a membership vector.
fn side_of<W: Weight>(graph: &WeightedGraph<W>, tree: &SpanningTree, e: EdgeId) -> Result<Vec<bool>, GraphError> {
    tree.validate(graph)?;
    if !tree.contains(e) {
        return Err(GraphError::InvalidArgument(format!("edge {e} is not a tree edge")));
    }
    let start = graph.edge(e)?.u;
    let mut side = vec![false; graph.vertex_count()];
    side[start.0] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &(y, f) in graph.neighbors(x) {
            if f != e && tree.contains(f) && !side[y.0] {
                side[y.0] = true;
                stack.push(y);
            }
        }
    }
    Ok(side)
}

/// Graph edges with one endpoint on each side of `tree − e`. Contains `e`.
pub fn cross_edge_set<W: Weight>(
    graph: &WeightedGraph<W>,
    tree: &SpanningTree,
    e: EdgeId,
) -> Result<Vec<EdgeId>, GraphError> {
    let side = side_of(graph, tree, e)?;
    Ok(graph.edges().iter().filter(|f| side[f.u.0] != side[f.v.0]).map(|f| f.id).collect())
}

/// Congestion of tree edge `e`: its own inside weight plus the outside weight
/// of every non-tree edge crossing its cut.
pub fn congestion_of_edge<W: Weight>(graph: &WeightedGraph<W>, tree: &SpanningTree, e: EdgeId) -> Result<W, GraphError> {
    let crossing = cross_edge_set(graph, tree, e)?;
    let mut total = W::zero();
    for f in crossing {
        let w = graph.edge(f)?.weight;
        let c = if f == e { w.inside() } else { w.outside() };
        total = total.checked_add(&c).ok_or(GraphError::Overflow)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongestionReport<W> {
    pub per_edge: BTreeMap<EdgeId, W>,
    pub max_congestion: W,
    pub witnesses: Option<BTreeMap<EdgeId, Vec<EdgeId>>>,
}

impl<W: Weight> CongestionReport<W> {
    /// Tree edge attaining the maximum, lowest id on ties.
    pub fn argmax(&self) -> Option<EdgeId> {
        self.per_edge.iter().find(|(_, &c)| c == self.max_congestion).map(|(&e, _)| e)
    }
}

fn congestion_report<W: Weight>(
    graph: &WeightedGraph<W>,
    tree: &SpanningTree,
    with_witnesses: bool,
) -> Result<CongestionReport<W>, GraphError> {
    graph.ensure_connected()?;
    let rooted = RootedTree::build(graph, tree)?;
    let mut load = vec![W::zero(); graph.edge_count()];
    let mut witnesses: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    if with_witnesses {
        for &e in tree.edges() {
            witnesses.insert(e, Vec::new());
        }
    }
    for f in graph.edges() {
        let (path, contribution) = if rooted.in_tree[f.id.0] {
            (vec![f.id], f.weight.inside())
        } else {
            (rooted.path(f.u, f.v), f.weight.outside())
        };
        for t in path {
            load[t.0] = load[t.0].checked_add(&contribution).ok_or(GraphError::Overflow)?;
            if with_witnesses {
                witnesses.get_mut(&t).expect("path edges are tree edges").push(f.id);
            }
        }
    }
    let per_edge: BTreeMap<EdgeId, W> = tree.edges().iter().map(|&e| (e, load[e.0])).collect();
    let max_congestion = per_edge.values().copied().max().unwrap_or_else(W::zero);
    Ok(CongestionReport { per_edge, max_congestion, witnesses: with_witnesses.then_some(witnesses) })
}

/// Congestion of every tree edge and their maximum.
pub fn tree_congestion<W: Weight>(graph: &WeightedGraph<W>, tree: &SpanningTree) -> Result<CongestionReport<W>, GraphError> {
    congestion_report(graph, tree, false)
}

/// As [`tree_congestion`], also listing the cross-edge set of each tree edge.
pub fn tree_congestion_with_witnesses<W: Weight>(
    graph: &WeightedGraph<W>,
    tree: &SpanningTree,
) -> Result<CongestionReport<W>, GraphError> {
    congestion_report(graph, tree, true)
}
