//! Edge-weighted simple graphs with dense vertex ids.
//!
//! Every edge carries a stable index `0..m` which doubles as the id of its
//! weight variable in the anonymization LP. Undirected edges are stored once;
//! algorithms expand them to both directions through the adjacency lists.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

pub type VertexId = usize;
pub type EdgeIndex = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Directedness {
    Directed,
    Undirected,
}

impl Directedness {
    pub fn is_directed(self) -> bool {
        matches!(self, Directedness::Directed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: f64,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, weight: f64) -> Self {
        Edge { u, v, weight }
    }

    /// The endpoint opposite to `from`, or `None` if `from` is not an endpoint.
    pub fn other(&self, from: VertexId) -> Option<VertexId> {
        if from == self.u {
            Some(self.v)
        } else if from == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

/// A single broken graph invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveWeight { edge: EdgeIndex, weight: f64 },
    NonFiniteWeight { edge: EdgeIndex },
    SelfLoop { edge: EdgeIndex, vertex: VertexId },
    ParallelEdge { edge: EdgeIndex, first: EdgeIndex },
    EndpointOutOfRange { edge: EdgeIndex, vertex: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveWeight { edge, weight } => {
                write!(f, "non-positive weight, edge {edge} (weight {weight})")
            }
            Violation::NonFiniteWeight { edge } => write!(f, "non-finite weight, edge {edge}"),
            Violation::SelfLoop { edge, vertex } => {
                write!(f, "self-loop, edge {edge} at vertex {vertex}")
            }
            Violation::ParallelEdge { edge, first } => {
                write!(f, "parallel edge, edge {edge} duplicates edge {first}")
            }
            Violation::EndpointOutOfRange { edge, vertex } => {
                write!(
                    f,
                    "endpoint out of range, edge {edge} references vertex {vertex}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    Invalid(Vec<Violation>),
    WeightCountMismatch { expected: usize, got: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Invalid(violations) => {
                write!(f, "invalid graph: ")?;
                for (i, v) in violations.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            GraphError::WeightCountMismatch { expected, got } => {
                write!(f, "expected {expected} weights, got {got}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

/// Checks every graph invariant and returns all violations in edge order.
pub fn validate_edges(
    vertex_count: usize,
    directedness: Directedness,
    edges: &[Edge],
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen: BTreeMap<(VertexId, VertexId), EdgeIndex> = BTreeMap::new();
    for (idx, e) in edges.iter().enumerate() {
        if !e.weight.is_finite() {
            violations.push(Violation::NonFiniteWeight { edge: idx });
        } else if e.weight <= 0.0 {
            violations.push(Violation::NonPositiveWeight {
                edge: idx,
                weight: e.weight,
            });
        }
        for vertex in [e.u, e.v] {
            if vertex >= vertex_count {
                violations.push(Violation::EndpointOutOfRange { edge: idx, vertex });
            }
        }
        if e.u == e.v {
            violations.push(Violation::SelfLoop {
                edge: idx,
                vertex: e.u,
            });
            continue;
        }
        let key = match directedness {
            Directedness::Directed => (e.u, e.v),
            Directedness::Undirected => (e.u.min(e.v), e.u.max(e.v)),
        };
        match seen.get(&key) {
            Some(&first) => violations.push(Violation::ParallelEdge { edge: idx, first }),
            None => {
                seen.insert(key, idx);
            }
        }
    }
    violations
}

/// Immutable weighted graph. Construction validates every invariant, so a
/// `WeightedGraph` value is always a legal Dijkstra input.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertex_count: usize,
    directedness: Directedness,
    edges: Vec<Edge>,
    // Outgoing (neighbor, edge) pairs in edge-index order.
    adjacency: Vec<Vec<(VertexId, EdgeIndex)>>,
}

impl WeightedGraph {
    pub fn new(
        vertex_count: usize,
        directedness: Directedness,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let violations = validate_edges(vertex_count, directedness, &edges);
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        let mut adjacency = alloc::vec![Vec::new(); vertex_count];
        for (idx, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, idx));
            if directedness == Directedness::Undirected {
                adjacency[e.v].push((e.u, idx));
            }
        }
        Ok(WeightedGraph {
            vertex_count,
            directedness,
            edges,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: EdgeIndex) -> &Edge {
        &self.edges[idx]
    }

    pub fn weight(&self, idx: EdgeIndex) -> f64 {
        self.edges[idx].weight
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    /// Outgoing `(neighbor, edge index)` pairs of `v`, in edge-index order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeIndex)] {
        &self.adjacency[v]
    }

    /// Every traversable direction `(tail, head, edge)`: one per directed
    /// edge, two per undirected edge.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId, EdgeIndex)> + '_ {
        let undirected = self.directedness == Directedness::Undirected;
        self.edges.iter().enumerate().flat_map(move |(idx, e)| {
            let forward = core::iter::once((e.u, e.v, idx));
            let backward = undirected.then_some((e.v, e.u, idx));
            forward.chain(backward)
        })
    }

    /// Re-checks the invariants. Always empty for a constructed graph.
    pub fn validate(&self) -> Vec<Violation> {
        validate_edges(self.vertex_count, self.directedness, &self.edges)
    }

    /// Same topology, new weights (one per edge, in edge-index order).
    pub fn with_weights(&self, weights: &[f64]) -> Result<WeightedGraph, GraphError> {
        if weights.len() != self.edges.len() {
            return Err(GraphError::WeightCountMismatch {
                expected: self.edges.len(),
                got: weights.len(),
            });
        }
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &w)| Edge::new(e.u, e.v, w))
            .collect();
        WeightedGraph::new(self.vertex_count, self.directedness, edges)
    }

    /// True when both graphs have the same vertex count, directedness and
    /// edge endpoint list; weights are ignored.
    pub fn same_topology(&self, other: &WeightedGraph) -> bool {
        self.vertex_count == other.vertex_count
            && self.directedness == other.directedness
            && self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(a, b)| a.u == b.u && a.v == b.v)
    }
}
