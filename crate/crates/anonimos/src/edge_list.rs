//! Plain-text edge lists: one `u v w` line per edge, `#` comments.

use std::fmt::Write as _;

use anonimos_core::graph::{GraphError, Violation};
use anonimos_core::{Directedness, Edge, WeightedGraph};

use crate::numfmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EdgeListError {
    #[error("line {line}: expected `u v w`, got {found:?}")]
    Malformed { line: usize, found: String },
    #[error("line {line}: invalid vertex id {token:?}")]
    BadVertex { line: usize, token: String },
    #[error("line {line}: invalid weight {token:?} (must be a positive finite number)")]
    BadWeight { line: usize, token: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v} (first seen at line {first_line})")]
    Duplicate {
        line: usize,
        first_line: usize,
        u: usize,
        v: usize,
    },
    #[error("empty input: no edges")]
    Empty,
    #[error("{0}")]
    Graph(GraphError),
}

impl EdgeListError {
    /// 1-based line of the offending input, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            EdgeListError::Malformed { line, .. }
            | EdgeListError::BadVertex { line, .. }
            | EdgeListError::BadWeight { line, .. }
            | EdgeListError::SelfLoop { line, .. }
            | EdgeListError::Duplicate { line, .. } => Some(*line),
            EdgeListError::Empty | EdgeListError::Graph(_) => None,
        }
    }
}

/// Parses an edge list. Edge indices follow file order and the vertex
/// count is one more than the largest id seen.
pub fn parse_edge_list(
    text: &str,
    directedness: Directedness,
) -> Result<WeightedGraph, EdgeListError> {
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let data = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = data.split_ascii_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let [u, v, w] = tokens[..] else {
            return Err(EdgeListError::Malformed {
                line,
                found: raw.trim().to_string(),
            });
        };
        let vertex = |t: &str| {
            t.parse::<usize>().map_err(|_| EdgeListError::BadVertex {
                line,
                token: t.to_string(),
            })
        };
        let (u, v) = (vertex(u)?, vertex(v)?);
        let weight = w
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x > 0.0)
            .ok_or_else(|| EdgeListError::BadWeight {
                line,
                token: w.to_string(),
            })?;
        edges.push(Edge::new(u, v, weight));
        lines.push(line);
    }
    if edges.is_empty() {
        return Err(EdgeListError::Empty);
    }
    let n = edges.iter().map(|e| e.u.max(e.v)).max().unwrap_or(0) + 1;
    WeightedGraph::new(n, directedness, edges.clone()).map_err(|err| match &err {
        GraphError::Invalid(violations) => match violations.first() {
            Some(&Violation::SelfLoop { edge, vertex }) => EdgeListError::SelfLoop {
                line: lines[edge],
                vertex,
            },
            Some(&Violation::ParallelEdge { edge, first }) => EdgeListError::Duplicate {
                line: lines[edge],
                first_line: lines[first],
                u: edges[edge].u,
                v: edges[edge].v,
            },
            _ => EdgeListError::Graph(err),
        },
        _ => EdgeListError::Graph(err),
    })
}

/// One `u v w` line per edge in index order, weights at `precision`
/// significant digits (clamped to 1..=17).
pub fn write_edge_list(graph: &WeightedGraph, precision: usize) -> String {
    let mut out = String::new();
    for e in graph.edges() {
        let _ = writeln!(
            out,
            "{} {} {}",
            e.u,
            e.v,
            numfmt::significant(e.weight, precision)
        );
    }
    out
}
