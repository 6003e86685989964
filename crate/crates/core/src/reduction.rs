//! The (2P1N)-SAT to K-STC construction, both directions of its correctness
//! argument, and executable checks of the structural claims behind the
//! backward direction.
//!
//! Per variable `i` the gadget has literal vertices `x_i`, `x_i′`, `x̄_i` and
//! auxiliary vertices `y_i`, `z_i`, with `k_j = K − j`:
//!
//! | edge        | weight     |
//! |-------------|------------|
//! | (x̄_i, z_i)  | ⟨1\|k3⟩    |
//! | (z_i, x_i)  | ⟨1\|k3⟩    |
//! | (x_i, x_i′) | ⟨1\|k2⟩    |
//! | (r, x_i′)   | k3         |
//! | (r, y_i)    | k4         |
//! | (y_i, z_i)  | k4         |
//! | (y_i, x̄_i)  | ⟨1\|k2⟩    |
//!
//! Each clause gets a vertex joined to the gadget vertex of each of its
//! literals by a ⟨1|k2⟩ edge; two-literal clauses also get a ⟨1|k1⟩ edge to
//! the root.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::congestion::{tree_congestion, tree_congestion_with_witnesses, tree_path, SpanningTree};
use crate::graph::{EdgeId, EdgeWeight, GraphError, VertexId};
use crate::sat::{evaluate, solve_sat, Assignment, Clause, SatError, Slot, TwoPOneNFormula};
use crate::solver::{is_stc_at_most, Decision, SolveConfig, SolveError};
use crate::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("K = {0} is unsupported; the construction needs K >= 5")]
    UnsupportedK(u32),
    #[error(transparent)]
    Formula(#[from] SatError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("malformed reduction map: {0}")]
    MalformedMap(String),
}

/// `K` and the derived weights `k_j = K − j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KParams {
    k: u32,
}

impl KParams {
    pub fn new(k: u32) -> Result<Self, ReductionError> {
        if k < 5 {
            return Err(ReductionError::UnsupportedK(k));
        }
        Ok(KParams { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `k_j` for `j` in `1..=4`.
    pub fn k_sub(&self, j: u32) -> u32 {
        assert!((1..=4).contains(&j), "k_j is defined for j = 1..4");
        self.k - j
    }
}

/// Vertex and edge ids of one variable gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gadget {
    pub x: VertexId,
    pub xp: VertexId,
    pub nx: VertexId,
    pub y: VertexId,
    pub z: VertexId,
    pub nx_z: EdgeId,
    pub z_x: EdgeId,
    pub x_xp: EdgeId,
    pub r_xp: EdgeId,
    pub r_y: EdgeId,
    pub y_z: EdgeId,
    pub y_nx: EdgeId,
}

impl Gadget {
    pub fn edges(&self) -> [EdgeId; 7] {
        [self.nx_z, self.z_x, self.x_xp, self.r_xp, self.r_y, self.y_z, self.y_nx]
    }

    pub fn literal_vertex(&self, slot: Slot) -> VertexId {
        match slot {
            Slot::FirstPositive => self.x,
            Slot::SecondPositive => self.xp,
            Slot::Negative => self.nx,
        }
    }

    pub fn literal_vertices(&self) -> [VertexId; 3] {
        [self.x, self.xp, self.nx]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseGadget {
    pub vertex: VertexId,
    /// Clause-to-literal edges, in the clause's literal order.
    pub lit_edges: Vec<EdgeId>,
    pub root_edge: Option<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    pub root: VertexId,
    pub vars: Vec<Gadget>,
    pub clauses: Vec<ClauseGadget>,
    pub params: KParams,
}

impl ReductionMap {
    /// Clause-to-literal edge at the literal vertex of `(var, slot)`.
    pub fn literal_edge(&self, graph: &Graph, var: usize, slot: Slot) -> Option<EdgeId> {
        let target = self.vars.get(var)?.literal_vertex(slot);
        self.clauses
            .iter()
            .flat_map(|c| c.lit_edges.iter().copied())
            .find(|&e| graph.edge(e).is_ok_and(|e| e.touches(target)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "root": self.root.0,
            "vars": self.vars.iter().map(|g| json!({
                "x": g.x.0, "xp": g.xp.0, "nx": g.nx.0, "y": g.y.0, "z": g.z.0,
            })).collect::<Vec<_>>(),
            "clauses": self.clauses.iter().map(|c| {
                let mut o = json!({
                    "vertex": c.vertex.0,
                    "lit_edges": c.lit_edges.iter().map(|e| e.0).collect::<Vec<_>>(),
                });
                if let Some(r) = c.root_edge {
                    o["root_edge"] = json!(r.0);
                }
                o
            }).collect::<Vec<_>>(),
            "K": self.params.k,
        })
    }

    /// Reads the map JSON; gadget edges are recovered from `graph`.
    pub fn from_json(value: &Value, graph: &Graph) -> Result<Self, ReductionError> {
        let bad = |m: &str| ReductionError::MalformedMap(m.to_owned());
        let vertex = |v: &Value, key: &str| -> Result<VertexId, ReductionError> {
            let id = v.get(key).and_then(Value::as_u64).ok_or_else(|| bad(&format!("missing `{key}`")))? as usize;
            if id >= graph.vertex_count() {
                return Err(bad(&format!("`{key}` = {id} is not a vertex")));
            }
            Ok(VertexId(id))
        };
        let edge_id = |v: &Value| -> Result<EdgeId, ReductionError> {
            let id = v.as_u64().ok_or_else(|| bad("edge id must be an integer"))? as usize;
            graph.edge(EdgeId(id)).map_err(|_| bad(&format!("{id} is not an edge")))?;
            Ok(EdgeId(id))
        };
        let root = vertex(value, "root")?;
        let k = value.get("K").and_then(Value::as_u64).ok_or_else(|| bad("missing `K`"))?;
        let params = KParams::new(u32::try_from(k).map_err(|_| bad("K out of range"))?)?;
        let find = |a: VertexId, b: VertexId| {
            graph.find_edge(a, b).ok_or_else(|| bad(&format!("no edge between {a} and {b}")))
        };
        let mut vars = Vec::new();
        for g in value.get("vars").and_then(Value::as_array).ok_or_else(|| bad("missing `vars`"))? {
            let (x, xp, nx, y, z) = (vertex(g, "x")?, vertex(g, "xp")?, vertex(g, "nx")?, vertex(g, "y")?, vertex(g, "z")?);
            vars.push(Gadget {
                x,
                xp,
                nx,
                y,
                z,
                nx_z: find(nx, z)?,
                z_x: find(z, x)?,
                x_xp: find(x, xp)?,
                r_xp: find(root, xp)?,
                r_y: find(root, y)?,
                y_z: find(y, z)?,
                y_nx: find(y, nx)?,
            });
        }
        let mut clauses = Vec::new();
        for c in value.get("clauses").and_then(Value::as_array).ok_or_else(|| bad("missing `clauses`"))? {
            let lit_edges = c
                .get("lit_edges")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing `lit_edges`"))?
                .iter()
                .map(edge_id)
                .collect::<Result<_, _>>()?;
            let root_edge = match c.get("root_edge") {
                None | Some(Value::Null) => None,
                Some(v) => Some(edge_id(v)?),
            };
            clauses.push(ClauseGadget { vertex: vertex(c, "vertex")?, lit_edges, root_edge });
        }
        Ok(ReductionMap { root, vars, clauses, params })
    }
}

/// Builds the K-STC instance of `formula`.
pub fn reduce(formula: &TwoPOneNFormula, k: u32) -> Result<(Graph, ReductionMap), ReductionError> {
    let params = KParams::new(k)?;
    let (k1, k2, k3, k4) = (params.k_sub(1), params.k_sub(2), params.k_sub(3), params.k_sub(4));
    let single = EdgeWeight::single;
    let double = EdgeWeight::double;

    let mut g = Graph::new();
    let root = g.add_vertex(Some("r"));
    let mut vars = Vec::with_capacity(formula.num_vars());
    for i in 1..=formula.num_vars() {
        let x = g.add_vertex(Some(&format!("x{i}")));
        let xp = g.add_vertex(Some(&format!("x{i}p")));
        let nx = g.add_vertex(Some(&format!("nx{i}")));
        let y = g.add_vertex(Some(&format!("y{i}")));
        let z = g.add_vertex(Some(&format!("z{i}")));
        let nx_z = g.add_edge(nx, z, double(1, k3)?)?;
        let z_x = g.add_edge(z, x, double(1, k3)?)?;
        let x_xp = g.add_edge(x, xp, double(1, k2)?)?;
        let r_xp = g.add_edge(root, xp, single(k3)?)?;
        let r_y = g.add_edge(root, y, single(k4)?)?;
        let y_z = g.add_edge(y, z, single(k4)?)?;
        let y_nx = g.add_edge(y, nx, double(1, k2)?)?;
        vars.push(Gadget { x, xp, nx, y, z, nx_z, z_x, x_xp, r_xp, r_y, y_z, y_nx });
    }
    let mut clauses = Vec::with_capacity(formula.clauses().len());
    for (ci, clause) in formula.clauses().iter().enumerate() {
        let vertex = g.add_vertex(Some(&format!("c{}", ci + 1)));
        let lit_edges = clause
            .literals
            .iter()
            .map(|l| g.add_edge(vertex, vars[l.var].literal_vertex(l.slot), double(1, k2)?))
            .collect::<Result<Vec<_>, _>>()?;
        let root_edge = if clause.len() == 2 { Some(g.add_edge(root, vertex, double(1, k1)?)?) } else { None };
        clauses.push(ClauseGadget { vertex, lit_edges, root_edge });
    }
    Ok((g, ReductionMap { root, vars, clauses, params }))
}

/// Structural audit of a reduced instance; returns every discrepancy found.
pub fn audit(formula: &TwoPOneNFormula, graph: &Graph, map: &ReductionMap) -> Vec<String> {
    let mut issues = Vec::new();
    let n = formula.num_vars();
    let m = formula.clauses().len();
    let twos = formula.clauses().iter().filter(|c| c.len() == 2).count();
    if graph.vertex_count() != 1 + 5 * n + m {
        issues.push(format!("{} vertices, expected {}", graph.vertex_count(), 1 + 5 * n + m));
    }
    if graph.edge_count() != 7 * n + 3 * n + twos {
        issues.push(format!("{} edges, expected {}", graph.edge_count(), 7 * n + 3 * n + twos));
    }
    let p = map.params;
    let (k1, k2, k3, k4) = (p.k_sub(1), p.k_sub(2), p.k_sub(3), p.k_sub(4));
    let d = |a, b| EdgeWeight::Double { outside: a, inside: b };
    for (i, gd) in map.vars.iter().enumerate() {
        let expected = [d(1, k3), d(1, k3), d(1, k2), EdgeWeight::Single(k3), EdgeWeight::Single(k4), EdgeWeight::Single(k4), d(1, k2)];
        for (e, w) in gd.edges().into_iter().zip(expected) {
            match graph.edge(e) {
                Ok(edge) if edge.weight == w => {}
                Ok(edge) => issues.push(format!("x{}: edge {e} has weight {}, expected {w}", i + 1, edge.weight)),
                Err(err) => issues.push(err.to_string()),
            }
        }
    }
    for (ci, (clause, cg)) in formula.clauses().iter().zip(&map.clauses).enumerate() {
        let degree = graph.degree(cg.vertex);
        let want = clause.len() + usize::from(clause.len() == 2);
        if degree != want {
            issues.push(format!("c{}: degree {degree}, expected {want}", ci + 1));
        }
        if cg.root_edge.is_some() != (clause.len() == 2) {
            issues.push(format!("c{}: root edge presence wrong", ci + 1));
        }
        let expected = cg.lit_edges.iter().map(|&e| (e, d(1, k2))).chain(cg.root_edge.map(|e| (e, d(1, k1))));
        for (e, w) in expected {
            if graph.edge(e).map(|edge| edge.weight) != Ok(w) {
                issues.push(format!("c{}: edge {e} should weigh {w}", ci + 1));
            }
        }
        for (lit, &e) in clause.literals.iter().zip(&cg.lit_edges) {
            let target = map.vars[lit.var].literal_vertex(lit.slot);
            if !graph.edge(e).is_ok_and(|edge| edge.touches(target) && edge.touches(cg.vertex)) {
                issues.push(format!("c{}: edge {e} does not join the clause to {lit}", ci + 1));
            }
        }
    }
    for e in graph.edges() {
        if let EdgeWeight::Double { outside, inside } = e.weight {
            if outside + inside > p.k() {
                issues.push(format!("edge {}: double weight {} exceeds K", e.id, e.weight));
            }
        }
    }
    issues
}

/// Picks, for each clause, the position of a literal that is true under the
/// assignment.
pub trait LiteralChooser {
    fn choose(&mut self, clause_index: usize, clause: &Clause, assignment: &Assignment) -> usize;
}

/// True literal of the lowest variable.
#[derive(Debug, Clone, Copy, Default)]
pub struct LowestVariable;

impl LiteralChooser for LowestVariable {
    fn choose(&mut self, _: usize, clause: &Clause, a: &Assignment) -> usize {
        clause
            .literals
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_true(a))
            .min_by_key(|(_, l)| (l.var, l.slot))
            .map(|(p, _)| p)
            .unwrap_or(0)
    }
}

impl<F: FnMut(usize, &Clause, &Assignment) -> usize> LiteralChooser for F {
    fn choose(&mut self, clause_index: usize, clause: &Clause, a: &Assignment) -> usize {
        self(clause_index, clause, a)
    }
}

/// Spanning tree of congestion at most K built from a satisfying assignment.
pub fn assignment_to_tree(
    graph: &Graph,
    map: &ReductionMap,
    formula: &TwoPOneNFormula,
    assignment: &Assignment,
    chooser: &mut dyn LiteralChooser,
) -> Result<SpanningTree, ReductionError> {
    if !evaluate(formula, assignment)? {
        return Err(ReductionError::InvalidArgument("assignment does not satisfy the formula".into()));
    }
    let mut edges = Vec::with_capacity(graph.vertex_count() - 1);
    for (gd, &value) in map.vars.iter().zip(&assignment.values) {
        edges.extend([gd.r_xp, gd.r_y, gd.y_z]);
        if value {
            edges.extend([gd.y_nx, gd.z_x]);
        } else {
            edges.extend([gd.nx_z, gd.x_xp]);
        }
    }
    for (ci, (clause, cg)) in formula.clauses().iter().zip(&map.clauses).enumerate() {
        let pick = chooser.choose(ci, clause, assignment);
        let lit = clause
            .literals
            .get(pick)
            .ok_or_else(|| ReductionError::InvalidArgument(format!("c{}: chooser picked position {pick}", ci + 1)))?;
        if !lit.is_true(assignment) {
            return Err(ReductionError::InvalidArgument(format!("c{}: chooser picked false literal {lit}", ci + 1)));
        }
        edges.push(cg.lit_edges[pick]);
    }
    Ok(SpanningTree::new(graph, edges)?)
}

/// Reads a truth assignment off a tree of congestion at most K: `x_i` is false
/// exactly when the clause edge at `x̄_i` is a tree edge.
pub fn tree_to_assignment(graph: &Graph, map: &ReductionMap, tree: &SpanningTree) -> Result<Assignment, ReductionError> {
    let report = tree_congestion(graph, tree)?;
    if report.max_congestion > map.params.k() {
        return Err(ReductionError::PreconditionViolated(format!(
            "tree congestion {} exceeds K = {}",
            report.max_congestion,
            map.params.k()
        )));
    }
    let values = (0..map.vars.len())
        .map(|i| {
            let e = map
                .literal_edge(graph, i, Slot::Negative)
                .ok_or_else(|| ReductionError::MalformedMap(format!("x{}: no clause edge at its negative literal", i + 1)))?;
            Ok(!tree.contains(e))
        })
        .collect::<Result<_, ReductionError>>()?;
    Ok(Assignment { values })
}

/// Offending item of a failed claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Edge(EdgeId),
    Vertex { vertex: VertexId, tree_degree: usize },
    Gadget { var: usize, detail: String },
    PathEdge { var: usize, literal: VertexId, edge: EdgeId, gadget_edges_crossing: usize },
}

impl Witness {
    fn to_json(&self) -> Value {
        match self {
            Witness::Edge(e) => json!({"edge": e.0}),
            Witness::Vertex { vertex, tree_degree } => json!({"vertex": vertex.0, "tree_degree": tree_degree}),
            Witness::Gadget { var, detail } => json!({"variable": var + 1, "detail": detail}),
            Witness::PathEdge { var, literal, edge, gadget_edges_crossing } => json!({
                "variable": var + 1,
                "literal_vertex": literal.0,
                "edge": edge.0,
                "gadget_edges_crossing": gadget_edges_crossing,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimResult {
    pub claim: u8,
    pub failures: Vec<Witness>,
}

impl ClaimResult {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    pub claims: Vec<ClaimResult>,
}

impl ClaimReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(ClaimResult::pass)
    }

    pub fn claim(&self, n: u8) -> &ClaimResult {
        &self.claims[usize::from(n) - 1]
    }

    /// `{"claims": {"1": {"pass": bool, "witness": [..] | null}, ...}}`
    pub fn to_json(&self) -> Value {
        let claims: serde_json::Map<String, Value> = self
            .claims
            .iter()
            .map(|c| {
                let witness = if c.pass() { Value::Null } else { c.failures.iter().map(Witness::to_json).collect() };
                (c.claim.to_string(), json!({"pass": c.pass(), "witness": witness}))
            })
            .collect();
        json!({ "claims": claims })
    }
}

/// Checks the eight structural claims that every tree of congestion at most K
/// on a reduced graph satisfies. Claim 1 is audited on every edge of every
/// root-to-literal tree path.
pub fn verify_claims(graph: &Graph, map: &ReductionMap, tree: &SpanningTree) -> Result<ClaimReport, ReductionError> {
    let report = tree_congestion_with_witnesses(graph, tree)?;
    let cross = report.witnesses.expect("requested witnesses");
    let tree_degree = |v: VertexId| graph.neighbors(v).iter().filter(|(_, e)| tree.contains(*e)).count();
    let mut claims: Vec<ClaimResult> = (1..=8).map(|claim| ClaimResult { claim, failures: Vec::new() }).collect();

    for (i, gd) in map.vars.iter().enumerate() {
        let gadget: Vec<EdgeId> = gd.edges().into_iter().filter(|&e| e != gd.y_z).collect();
        for lit in gd.literal_vertices() {
            for e in tree_path(graph, tree, map.root, lit)? {
                let crossing = cross[&e].iter().filter(|f| gadget.contains(f)).count();
                if crossing < 2 {
                    claims[0].failures.push(Witness::PathEdge { var: i, literal: lit, edge: e, gadget_edges_crossing: crossing });
                }
            }
        }
    }
    for cg in &map.clauses {
        if let Some(r) = cg.root_edge.filter(|&r| tree.contains(r)) {
            claims[1].failures.push(Witness::Edge(r));
        }
        let d = tree_degree(cg.vertex);
        if d != 1 {
            claims[2].failures.push(Witness::Vertex { vertex: cg.vertex, tree_degree: d });
        }
    }
    for (i, gd) in map.vars.iter().enumerate() {
        if !tree.contains(gd.r_xp) {
            claims[3].failures.push(Witness::Edge(gd.r_xp));
        }
        if !tree.contains(gd.r_y) {
            claims[4].failures.push(Witness::Edge(gd.r_y));
        }
        let (zx, xxp) = (tree.contains(gd.z_x), tree.contains(gd.x_xp));
        if zx == xxp {
            let detail = if zx { "both (z,x) and (x,x') in tree" } else { "neither (z,x) nor (x,x') in tree" };
            claims[5].failures.push(Witness::Gadget { var: i, detail: detail.into() });
        }
        if !tree.contains(gd.y_z) {
            claims[6].failures.push(Witness::Edge(gd.y_z));
        }
        let edge_at = |slot| map.literal_edge(graph, i, slot).filter(|&e| tree.contains(e));
        if edge_at(Slot::Negative).is_some() {
            for e in [edge_at(Slot::FirstPositive), edge_at(Slot::SecondPositive)].into_iter().flatten() {
                claims[7].failures.push(Witness::Edge(e));
            }
        }
    }
    Ok(ClaimReport { claims })
}

/// How a spanning tree traverses one gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GadgetCase {
    /// `x_i = 0`, clause edge at `x̄_i` in the tree.
    FalseChosen,
    /// `x_i = 0`, clause edge at `x̄_i` not in the tree.
    FalseNotChosen,
    /// `x_i = 1` with both, only `x_i′`, only `x_i`, or neither positive clause edge in the tree.
    TrueBoth,
    TrueSecondOnly,
    TrueFirstOnly,
    TrueNeither,
}

/// Classifies the gadget of `var` in a tree of the shape built by
/// [`assignment_to_tree`]; `None` for any other shape.
pub fn gadget_case(graph: &Graph, map: &ReductionMap, tree: &SpanningTree, var: usize) -> Option<GadgetCase> {
    let gd = map.vars.get(var)?;
    let has = |e: EdgeId| tree.contains(e);
    let lit = |slot| map.literal_edge(graph, var, slot).is_some_and(has);
    if !(has(gd.r_xp) && has(gd.r_y) && has(gd.y_z)) {
        return None;
    }
    match (has(gd.nx_z), has(gd.x_xp), has(gd.y_nx), has(gd.z_x)) {
        (true, true, false, false) => Some(if lit(Slot::Negative) { GadgetCase::FalseChosen } else { GadgetCase::FalseNotChosen }),
        (false, false, true, true) => Some(match (lit(Slot::FirstPositive), lit(Slot::SecondPositive)) {
            (true, true) => GadgetCase::TrueBoth,
            (false, true) => GadgetCase::TrueSecondOnly,
            (true, false) => GadgetCase::TrueFirstOnly,
            (false, false) => GadgetCase::TrueNeither,
        }),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Consistent { sat: bool, stc_at_most_k: bool },
    Inconsistent(String),
    Inconclusive(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Consistent { sat, stc_at_most_k } => write!(
                f,
                "consistent({},{})",
                if *sat { "sat" } else { "unsat" },
                if *stc_at_most_k { "yes" } else { "no" }
            ),
            Verdict::Inconsistent(why) => write!(f, "inconsistent: {why}"),
            Verdict::Inconclusive(why) => write!(f, "inconclusive: {why}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub verdict: Verdict,
    pub satisfying: Option<Assignment>,
    pub decision: Decision,
    /// Congestion of the tree built from the SAT solver's assignment.
    pub forward_congestion: Option<u32>,
    /// Assignment read back from the STC solver's certificate.
    pub extracted: Option<Assignment>,
    pub certificate: Option<SpanningTree>,
    pub claims: Option<ClaimReport>,
    pub trees_explored: u64,
}

impl RoundtripReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.to_string(),
            "consistent": matches!(self.verdict, Verdict::Consistent { .. }),
            "sat": self.satisfying.is_some(),
            "assignment": self.satisfying.as_ref().map(Assignment::to_json),
            "decision": self.decision.to_string(),
            "forward_congestion": self.forward_congestion,
            "extracted_assignment": self.extracted.as_ref().map(Assignment::to_json),
            "claims_pass": self.claims.as_ref().map(ClaimReport::all_pass),
            "trees_explored": self.trees_explored,
        })
    }
}

/// Checks that `formula` is satisfiable exactly when its reduced graph has
/// spanning tree congestion at most K, and validates both certificates.
pub fn roundtrip_check(formula: &TwoPOneNFormula, k: u32, cfg: &SolveConfig) -> Result<RoundtripReport, ReductionError> {
    let (graph, map) = reduce(formula, k)?;
    let satisfying = solve_sat(formula)?;
    let solved = is_stc_at_most(&graph, k, cfg)?;
    let mut report = RoundtripReport {
        verdict: Verdict::Inconclusive(String::new()),
        satisfying: satisfying.clone(),
        decision: solved.decision,
        forward_congestion: None,
        extracted: None,
        certificate: solved.certificate.clone(),
        claims: None,
        trees_explored: solved.trees_explored,
    };
    let stc_yes = match solved.decision {
        Decision::Timeout => {
            report.verdict = Verdict::Inconclusive(format!("STC search timed out after {:?}", cfg.timeout));
            return Ok(report);
        }
        d => d == Decision::Yes,
    };
    let mut problems = Vec::new();
    if satisfying.is_some() != stc_yes {
        problems.push(format!(
            "formula is {} but the STC decision at K = {k} is {}",
            if satisfying.is_some() { "satisfiable" } else { "unsatisfiable" },
            solved.decision
        ));
    }
    if let Some(a) = &satisfying {
        let tree = assignment_to_tree(&graph, &map, formula, a, &mut LowestVariable)?;
        let c = tree_congestion(&graph, &tree)?.max_congestion;
        report.forward_congestion = Some(c);
        if c > k {
            problems.push(format!("tree from satisfying assignment has congestion {c} > {k}"));
        }
    }
    if let Some(cert) = &solved.certificate {
        let extracted = tree_to_assignment(&graph, &map, cert)?;
        if !evaluate(formula, &extracted)? {
            problems.push("assignment extracted from the certificate does not satisfy the formula".into());
        }
        let claims = verify_claims(&graph, &map, cert)?;
        if !claims.all_pass() {
            let failed: Vec<String> = claims.claims.iter().filter(|c| !c.pass()).map(|c| c.claim.to_string()).collect();
            problems.push(format!("certificate fails claims {}", failed.join(",")));
        }
        report.extracted = Some(extracted);
        report.claims = Some(claims);
    }
    report.verdict = if problems.is_empty() {
        Verdict::Consistent { sat: satisfying.is_some(), stc_at_most_k: stc_yes }
    } else {
        Verdict::Inconsistent(problems.join("; "))
    };
    Ok(report)
}
