//! Graph, relational-structure and hypergraph isomorphism on top of the string solver.

pub mod bounded;
pub mod graph;
pub mod relational;

pub use bounded::graph_iso_bounded_degree;
pub use graph::Graph;
pub use relational::{hypergraph_iso, relational_structure_iso, Hypergraph, RelationalStructure};
