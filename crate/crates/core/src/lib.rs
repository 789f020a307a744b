//! Edge-weight anonymization that preserves shortest paths.
//!
//! The decisions a shortest-path computation makes are linear comparisons
//! between path costs. Recording them as inequalities over fresh edge-weight
//! variables and solving the resulting LP under a random objective yields
//! new weights under which the same paths are still the shortest, while the
//! weight values and their ordering move far from the originals.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! * [`graph`]: validated edge-weighted graphs.
//! * [`shortest_paths`]: canonical Dijkstra with decision traces.
//! * [`constraints`]: inequality generation, composition and pruning.
//! * [`lp`] and [`simplex`]: box-bounded LPs and their solver.
//! * [`metrics`]: preservation rate, Kendall tau-b, k-anonymity.
//! * [`anonymize`]: the full pipeline.

#![no_std]

extern crate alloc;

pub mod anonymize;
pub mod constraints;
pub mod graph;
pub mod lp;
pub mod metrics;
pub mod shortest_paths;
pub mod simplex;

pub use anonymize::{
    anonymize, AnonymizeError, AnonymizeOptions, AnonymizeOutcome, ConstraintMode, SourceSelection,
};
pub use constraints::{Bounds, ConstraintRow, ConstraintSet, CostTolerance, Margin, RowKind};
pub use graph::{Directedness, Edge, EdgeIndex, VertexId, WeightedGraph};
pub use lp::{check_feasible, solve, LpModel, LpRow, LpSolution, LpStatus};
pub use metrics::AnonymityReport;
pub use shortest_paths::{apsp_canonical, sssp_canonical, trees_equal, ShortestPathTree};
