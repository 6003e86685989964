//! Seeded random instances: (2P1N) formulas and small connected graphs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{EdgeWeight, VertexId};
use crate::sat::{SatError, TwoPOneNFormula};
use crate::Graph;

const MAX_ATTEMPTS: usize = 100_000;

/// Random (2P1N) formula on `num_vars` variables: the `3n` literal occurrences
/// are shuffled and cut into clauses of two or three, rejecting cuts that put a
/// variable twice in one clause.
pub fn random_2p1n<R: Rng + ?Sized>(num_vars: usize, rng: &mut R) -> Result<TwoPOneNFormula, SatError> {
    if num_vars < 2 {
        return Err(SatError::InvalidArgument("a (2P1N) formula needs at least two variables".into()));
    }
    let mut literals: Vec<i64> = (1..=num_vars as i64).flat_map(|v| [v, v, -v]).collect();
    for _ in 0..MAX_ATTEMPTS {
        literals.shuffle(rng);
        let mut clauses = Vec::new();
        let mut rest = &literals[..];
        while !rest.is_empty() {
            let size = match rest.len() {
                2 | 4 => 2,
                3 => 3,
                _ => rng.gen_range(2..=3),
            };
            let (clause, tail) = rest.split_at(size);
            clauses.push(clause.to_vec());
            rest = tail;
        }
        let distinct = clauses.iter().all(|c| {
            let mut vars: Vec<u64> = c.iter().map(|l| l.unsigned_abs()).collect();
            vars.sort_unstable();
            vars.windows(2).all(|w| w[0] != w[1])
        });
        if distinct {
            return TwoPOneNFormula::from_clauses(num_vars, clauses);
        }
    }
    Err(SatError::InvalidArgument("rejection sampling did not find a valid formula".into()))
}

/// Random connected simple graph with unit weights on `n` vertices and
/// `min(max_edges, n(n−1)/2)` edges at least `n − 1`.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, max_edges: usize, rng: &mut R) -> Graph {
    let mut g = Graph::with_vertices(n);
    if n < 2 {
        return g;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        g.add_unit_edge(order[i], parent).expect("tree edge is new");
    }
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| g.find_edge(VertexId(a), VertexId(b)).is_none())
        .collect();
    candidates.shuffle(rng);
    let target = max_edges.max(n - 1).min(n * (n - 1) / 2);
    let extra = rng.gen_range(0..=target - (n - 1));
    for &(a, b) in candidates.iter().take(extra) {
        g.add_unit_edge(a, b).expect("candidate edge is new");
    }
    g
}

/// Copy of `graph` where about `fraction` of the edges (at least one) get a
/// random double weight `⟨ω|ω′⟩` with `ω + ω′ ≤ k`.
pub fn with_random_doubles<R: Rng + ?Sized>(graph: &Graph, k: u32, fraction: f64, rng: &mut R) -> Graph {
    assert!(k >= 2, "a double weight needs K >= 2");
    let m = graph.edge_count();
    let mut chosen: Vec<usize> = (0..m).collect();
    chosen.shuffle(rng);
    let count = ((m as f64 * fraction).round() as usize).clamp(1.min(m), m);
    chosen.truncate(count);
    let mut out = Graph::new();
    for v in graph.vertices() {
        out.add_vertex(graph.label(v));
    }
    for e in graph.edges() {
        let weight = if chosen.contains(&e.id.0) {
            let outside = rng.gen_range(1..=k / 2);
            let inside = rng.gen_range(outside..=k - outside);
            EdgeWeight::Double { outside, inside }
        } else {
            e.weight
        };
        out.add_edge(e.u, e.v, weight).expect("copied edge is valid");
    }
    out
}
