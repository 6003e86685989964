//! Interchange formats: graph JSON, tree JSON, solver result records and DOT.
//!
//! All JSON is emitted in canonical form: compact, keys sorted.

use std::fmt::Write as _;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::congestion::{CongestionReport, SpanningTree};
use crate::graph::{EdgeId, EdgeWeight, GraphError, VertexId, WeightedGraph};
use crate::solver::SolveResult;
use crate::weight::Weight;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("tree was made for graph {expected}, got graph {actual}")]
    HashMismatch { expected: String, actual: String },
}

fn schema(msg: impl Into<String>) -> FormatError {
    FormatError::Schema(msg.into())
}

/// Compact JSON with sorted keys.
pub fn canonical_json(value: &Value) -> String {
    // serde_json's default map is ordered by key
    serde_json::to_string(value).expect("Value serialization is infallible")
}

/// Canonical JSON plus a trailing newline, as written to files.
pub fn canonical_line(value: &Value) -> String {
    let mut s = canonical_json(value);
    s.push('\n');
    s
}

pub fn graph_to_json<W: Weight>(graph: &WeightedGraph<W>) -> Value {
    let vertices: Vec<Value> = graph
        .vertices()
        .map(|v| match graph.label(v) {
            Some(l) => json!({"id": v.0, "label": l}),
            None => json!({"id": v.0}),
        })
        .collect();
    let edges: Vec<Value> = graph
        .edges()
        .iter()
        .map(|e| {
            let w = match e.weight {
                EdgeWeight::Single(w) => json!([w.widen()]),
                EdgeWeight::Double { outside, inside } => json!([outside.widen(), inside.widen()]),
            };
            json!({"id": e.id.0, "u": e.u.0, "v": e.v.0, "w": w})
        })
        .collect();
    json!({"vertices": vertices, "edges": edges})
}

fn dense_ids<'a>(items: &'a [Value], what: &str) -> Result<Vec<&'a Value>, FormatError> {
    let mut slots: Vec<Option<&Value>> = vec![None; items.len()];
    for item in items {
        let id = item.get("id").and_then(Value::as_u64).ok_or_else(|| schema(format!("{what} without integer `id`")))? as usize;
        let slot = slots.get_mut(id).ok_or_else(|| schema(format!("{what} ids must be dense from 0; found {id}")))?;
        if slot.replace(item).is_some() {
            return Err(schema(format!("duplicate {what} id {id}")));
        }
    }
    Ok(slots.into_iter().map(|s| s.expect("dense ids fill every slot")).collect())
}

pub fn graph_from_json<W: Weight>(value: &Value) -> Result<WeightedGraph<W>, FormatError> {
    let vertices = value.get("vertices").and_then(Value::as_array).ok_or_else(|| schema("missing `vertices` array"))?;
    let edges = value.get("edges").and_then(Value::as_array).ok_or_else(|| schema("missing `edges` array"))?;
    let mut g = WeightedGraph::new();
    for v in dense_ids(vertices, "vertex")? {
        let label = match v.get("label") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.as_str()),
            Some(_) => return Err(schema("vertex label must be a string")),
        };
        g.add_vertex(label);
    }
    for e in dense_ids(edges, "edge")? {
        let end = |k: &str| -> Result<VertexId, FormatError> {
            Ok(VertexId(e.get(k).and_then(Value::as_u64).ok_or_else(|| schema(format!("edge without integer `{k}`")))? as usize))
        };
        let w: Vec<W> = e
            .get("w")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("edge without `w` array"))?
            .iter()
            .map(|x| x.as_u64().and_then(W::narrow).ok_or_else(|| schema("weights must be integers in range")))
            .collect::<Result<_, _>>()?;
        let weight = match w[..] {
            [w] => EdgeWeight::single(w)?,
            [a, b] => EdgeWeight::double(a, b)?,
            _ => return Err(schema("weight array must have length 1 or 2")),
        };
        g.add_edge(end("u")?, end("v")?, weight)?;
    }
    Ok(g)
}

pub fn parse_graph<W: Weight>(text: &str) -> Result<WeightedGraph<W>, FormatError> {
    graph_from_json(&serde_json::from_str(text)?)
}

/// SHA-256 of the canonical graph JSON, hex encoded.
pub fn graph_hash<W: Weight>(graph: &WeightedGraph<W>) -> String {
    hex::encode(Sha256::digest(canonical_json(&graph_to_json(graph)).as_bytes()))
}

pub fn tree_to_json<W: Weight>(graph: &WeightedGraph<W>, tree: &SpanningTree) -> Value {
    json!({
        "graph_hash": graph_hash(graph),
        "edges": tree.edges().iter().map(|e| e.0).collect::<Vec<_>>(),
    })
}

/// Reads a tree for `graph`, checking the recorded graph hash.
pub fn tree_from_json<W: Weight>(value: &Value, graph: &WeightedGraph<W>) -> Result<SpanningTree, FormatError> {
    let expected = value.get("graph_hash").and_then(Value::as_str).ok_or_else(|| schema("missing `graph_hash`"))?;
    let actual = graph_hash(graph);
    if expected != actual {
        return Err(FormatError::HashMismatch { expected: expected.to_owned(), actual });
    }
    let edges = value
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("missing `edges` array"))?
        .iter()
        .map(|e| e.as_u64().map(|i| EdgeId(i as usize)).ok_or_else(|| schema("edge ids must be integers")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpanningTree::new(graph, edges)?)
}

pub fn parse_tree<W: Weight>(text: &str, graph: &WeightedGraph<W>) -> Result<SpanningTree, FormatError> {
    tree_from_json(&serde_json::from_str(text)?, graph)
}

/// Solver record. `zero_elapsed` drops wall-clock time so deterministic runs
/// produce identical bytes.
pub fn solve_result_to_json<W: Weight>(graph: &WeightedGraph<W>, result: &SolveResult<W>, zero_elapsed: bool) -> Value {
    let mut v = json!({
        "decision": result.decision.to_string(),
        "trees_explored": result.trees_explored,
        "elapsed_ms": if zero_elapsed { 0 } else { result.elapsed.as_millis() as u64 },
    });
    if let Some(opt) = result.optimum {
        v["optimum"] = json!(opt.widen());
    }
    if let Some(cert) = &result.certificate {
        v["certificate"] = tree_to_json(graph, cert);
    }
    v
}

pub fn congestion_report_to_json<W: Weight>(report: &CongestionReport<W>, k: Option<W>) -> Value {
    let per_edge: serde_json::Map<String, Value> =
        report.per_edge.iter().map(|(e, c)| (e.0.to_string(), json!(c.widen()))).collect();
    let mut v = json!({
        "per_edge": per_edge,
        "max_congestion": report.max_congestion.widen(),
    });
    if let Some(w) = &report.witnesses {
        let w: serde_json::Map<String, Value> =
            w.iter().map(|(e, list)| (e.0.to_string(), json!(list.iter().map(|f| f.0).collect::<Vec<_>>()))).collect();
        v["witnesses"] = Value::Object(w);
    }
    if let Some(k) = k {
        v["K"] = json!(k.widen());
        v["within_k"] = json!(report.max_congestion <= k);
    }
    v
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; with a tree, tree edges are solid and the rest dashed.
pub fn to_dot<W: Weight>(graph: &WeightedGraph<W>, tree: Option<&SpanningTree>) -> String {
    let mut s = String::from("graph G {\n");
    for v in graph.vertices() {
        let _ = writeln!(s, "  {} [label=\"{}\"];", v.0, dot_escape(&graph.display_name(v)));
    }
    for e in graph.edges() {
        let style = match tree {
            Some(t) if !t.contains(e.id) => "dashed",
            _ => "solid",
        };
        let _ = writeln!(s, "  {} -- {} [label=\"{}\", style={style}];", e.u.0, e.v.0, e.weight);
    }
    s.push_str("}\n");
    s
}
