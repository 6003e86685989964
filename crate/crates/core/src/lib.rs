//! Spanning tree congestion toolkit.
//!
//! * [`graph`], [`congestion`]: weighted graphs with single and double edge
//!   weights, cross-edge sets and congestion of spanning trees.
//! * [`solver`]: exact K-STC decision and STC optimization by branch and
//!   bound, plus an unpruned enumeration oracle.
//! * [`sat`]: (2P1N)-SAT formulas, DIMACS I/O and an exhaustive SAT oracle.
//! * [`reduction`]: the (2P1N)-SAT to K-STC construction with certificates in
//!   both directions.
//! * [`io`]: JSON and DOT interchange formats.
//!
//! The graph layer is generic over an unsigned integer weight type; the
//! aliases below fix it to `u32`, which is what the reduction and the CLI use.

pub mod congestion;
pub mod generate;
pub mod graph;
pub mod io;
pub mod reduction;
pub mod sat;
pub mod solver;
pub mod weight;

pub use congestion::{congestion_of_edge, cross_edge_set, tree_congestion, tree_congestion_with_witnesses, SpanningTree};
pub use graph::{Edge, EdgeId, EdgeWeight, GraphError, VertexId, WeightedGraph};
pub use solver::{Decision, SolveConfig, SolveError};
pub use weight::Weight;

/// Weight type used across the reduction and the command-line tool.
pub type Scalar = u32;
pub type Graph = WeightedGraph<Scalar>;
pub type Report = congestion::CongestionReport<Scalar>;
pub type SolveResult = solver::SolveResult<Scalar>;
