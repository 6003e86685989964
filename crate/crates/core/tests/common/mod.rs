//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stc_core::generate::random_connected_graph;
use stc_core::{EdgeWeight, Graph, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn path(n: usize) -> Graph {
    let mut g = Graph::with_vertices(n);
    for i in 1..n {
        g.add_unit_edge(i - 1, i).unwrap();
    }
    g
}

pub fn cycle(n: usize) -> Graph {
    let mut g = Graph::with_vertices(n);
    for i in 0..n {
        g.add_unit_edge(i, (i + 1) % n).unwrap();
    }
    g
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::with_vertices(n);
    for i in 0..n {
        for j in i + 1..n {
            g.add_unit_edge(i, j).unwrap();
        }
    }
    g
}

pub fn petersen() -> Graph {
    let mut g = Graph::with_vertices(10);
    for i in 0..5 {
        g.add_unit_edge(i, (i + 1) % 5).unwrap();
        g.add_unit_edge(i, i + 5).unwrap();
        g.add_unit_edge(5 + i, 5 + (i + 2) % 5).unwrap();
    }
    g
}

/// Random connected graph whose edges get single weights in `1..=max_weight`.
pub fn random_weighted(n: usize, max_edges: usize, max_weight: u32, seed: u64) -> Graph {
    let mut r = rng(seed);
    let g = random_connected_graph(n, max_edges, &mut r);
    let mut out = Graph::with_vertices(n);
    for e in g.edges() {
        let w = r.gen_range(1..=max_weight);
        out.add_edge(e.u, e.v, EdgeWeight::Single(w)).unwrap();
    }
    out
}

/// Spanning tree count by the matrix-tree theorem: determinant of the
/// Laplacian with the last row and column removed, in exact arithmetic.
pub fn matrix_tree_count(g: &Graph) -> BigInt {
    let n = g.vertex_count();
    if n <= 1 {
        return BigInt::one();
    }
    let size = n - 1;
    let mut m = vec![vec![BigRational::zero(); size]; size];
    for e in g.edges() {
        let (u, v) = (e.u.0, e.v.0);
        for (a, b) in [(u, v), (v, u)] {
            if a < size {
                m[a][a] += BigRational::one();
                if b < size {
                    m[a][b] -= BigRational::one();
                }
            }
        }
    }
    let mut det = BigRational::one();
    for col in 0..size {
        let Some(pivot) = (col..size).find(|&r| !m[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= p.clone();
        for r in col + 1..size {
            let factor = &m[r][col] / &p;
            if factor.is_zero() {
                continue;
            }
            let pivot_row = m[col].clone();
            for (cell, above) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                *cell -= &factor * above;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer().abs()
}

/// Congestion of every tree edge computed from cuts: the component of the
/// first endpoint in `tree − t` is found by a fresh traversal.
pub fn cut_congestions(g: &Graph, tree: &[usize]) -> Vec<(usize, u32)> {
    tree.iter()
        .map(|&t| {
            let side = component_without(g, tree, t);
            let load = g
                .edges()
                .iter()
                .filter(|f| side[f.u.0] != side[f.v.0])
                .map(|f| if f.id.0 == t { f.weight.inside() } else { f.weight.outside() })
                .sum();
            (t, load)
        })
        .collect()
}

/// Membership of the component of `t`'s first endpoint in `tree − t`.
pub fn component_without(g: &Graph, tree: &[usize], t: usize) -> Vec<bool> {
    let mut side = vec![false; g.vertex_count()];
    let start = g.edges()[t].u;
    side[start.0] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for e in g.edges() {
            if e.id.0 == t || !tree.contains(&e.id.0) || !e.touches(x) {
                continue;
            }
            let y: VertexId = e.other(x);
            if !side[y.0] {
                side[y.0] = true;
                stack.push(y);
            }
        }
    }
    side
}

/// Every spanning tree by brute force over `(n−1)`-subsets of the edges.
pub fn brute_force_trees(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    subsets(g, n.saturating_sub(1), 0, m, &mut pick, &mut out);
    out
}

fn subsets(g: &Graph, need: usize, from: usize, m: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pick.len() == need {
        let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &e in pick.iter() {
            let (a, b) = (find(&mut parent, g.edges()[e].u.0), find(&mut parent, g.edges()[e].v.0));
            if a == b {
                return;
            }
            parent[a] = b;
        }
        out.push(pick.clone());
        return;
    }
    for e in from..m {
        if m - e < need - pick.len() {
            break;
        }
        pick.push(e);
        subsets(g, need, e + 1, m, pick, out);
        pick.pop();
    }
}

/// Minimum over all trees of the maximum cut congestion, by brute force.
pub fn brute_force_stc(g: &Graph) -> u32 {
    brute_force_trees(g)
        .iter()
        .map(|t| cut_congestions(g, t).into_iter().map(|(_, c)| c).max().unwrap_or(0))
        .min()
        .expect("connected graph has a spanning tree")
}
