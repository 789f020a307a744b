//! Canonical Dijkstra.
//!
//! Extraction order is the lexicographic `(distance, vertex id)` minimum and
//! a tentative distance is replaced only on strict improvement, so the
//! parent of every vertex is a deterministic function of the weights. With
//! `capture_trace` set, every comparison the algorithm makes is recorded so
//! it can later be replayed as a linear inequality over the edge weights.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use crate::graph::{EdgeIndex, VertexId, WeightedGraph};

/// A frontier vertex together with its best-known path at the time of a
/// decision.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPath {
    pub vertex: VertexId,
    pub path: Vec<EdgeIndex>,
}

/// Outcome of relaxing one edge into an unsettled, already-discovered
/// vertex: `kept` is at most as long as `rejected` under the weights the
/// tree was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub target: VertexId,
    pub kept: Vec<EdgeIndex>,
    pub rejected: Vec<EdgeIndex>,
    /// Whether the new candidate replaced the previous tentative path.
    pub updated: bool,
}

/// One extract-min step: the winner, everything it beat on the frontier,
/// and the relaxations performed from it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceDecision {
    pub winner: VertexId,
    pub winner_path: Vec<EdgeIndex>,
    pub losers: Vec<FrontierPath>,
    pub relaxations: Vec<Relaxation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTree {
    pub source: VertexId,
    /// `None` for unreachable vertices.
    pub dist: Vec<Option<f64>>,
    pub parent_edge: Vec<Option<EdgeIndex>>,
    pub parent_vertex: Vec<Option<VertexId>>,
    pub settle_order: Vec<VertexId>,
    /// Present iff the tree was built with `capture_trace`.
    pub trace: Option<Vec<TraceDecision>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathError {
    SourceOutOfRange {
        source: VertexId,
        vertex_count: usize,
    },
    TargetOutOfRange {
        target: VertexId,
        vertex_count: usize,
    },
    SourceMismatch {
        left: VertexId,
        right: VertexId,
    },
    VertexCountMismatch {
        left: usize,
        right: usize,
    },
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::SourceOutOfRange {
                source,
                vertex_count,
            } => write!(
                f,
                "source {source} out of range (vertex count {vertex_count})"
            ),
            PathError::TargetOutOfRange {
                target,
                vertex_count,
            } => write!(
                f,
                "target {target} out of range (vertex count {vertex_count})"
            ),
            PathError::SourceMismatch { left, right } => {
                write!(f, "trees have different sources ({left} vs {right})")
            }
            PathError::VertexCountMismatch { left, right } => {
                write!(f, "trees have different vertex counts ({left} vs {right})")
            }
        }
    }
}

impl core::error::Error for PathError {}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    dist: f64,
    vertex: VertexId,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn sssp_canonical(
    graph: &WeightedGraph,
    source: VertexId,
    capture_trace: bool,
) -> Result<ShortestPathTree, PathError> {
    let n = graph.vertex_count();
    if source >= n {
        return Err(PathError::SourceOutOfRange {
            source,
            vertex_count: n,
        });
    }

    let mut dist: Vec<Option<f64>> = alloc::vec![None; n];
    let mut parent_edge: Vec<Option<EdgeIndex>> = alloc::vec![None; n];
    let mut parent_vertex: Vec<Option<VertexId>> = alloc::vec![None; n];
    let mut settled = alloc::vec![false; n];
    let mut settle_order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();

    // Trace bookkeeping: final paths of settled vertices and the set of
    // discovered-but-unsettled vertices.
    let mut trace = capture_trace.then(Vec::new);
    let mut tree_paths: Vec<Vec<EdgeIndex>> = if capture_trace {
        alloc::vec![Vec::new(); n]
    } else {
        Vec::new()
    };
    let mut frontier = BTreeSet::new();

    dist[source] = Some(0.0);
    heap.push(Reverse(Key {
        dist: 0.0,
        vertex: source,
    }));
    frontier.insert(source);

    while let Some(Reverse(Key { dist: d, vertex: w })) = heap.pop() {
        if settled[w] || dist[w] != Some(d) {
            continue;
        }
        settled[w] = true;
        settle_order.push(w);
        frontier.remove(&w);

        let mut decision = None;
        if trace.is_some() {
            let winner_path = match (parent_vertex[w], parent_edge[w]) {
                (Some(p), Some(e)) => extend(&tree_paths[p], e),
                _ => Vec::new(),
            };
            tree_paths[w] = winner_path.clone();
            let losers = frontier
                .iter()
                .map(|&u| FrontierPath {
                    vertex: u,
                    path: tentative_path(&tree_paths, &parent_vertex, &parent_edge, u),
                })
                .collect();
            decision = Some(TraceDecision {
                winner: w,
                winner_path,
                losers,
                relaxations: Vec::new(),
            });
        }

        for &(v, e) in graph.neighbors(w) {
            if settled[v] {
                continue;
            }
            let candidate = d + graph.weight(e);
            match dist[v] {
                None => {
                    dist[v] = Some(candidate);
                    parent_edge[v] = Some(e);
                    parent_vertex[v] = Some(w);
                    frontier.insert(v);
                    heap.push(Reverse(Key {
                        dist: candidate,
                        vertex: v,
                    }));
                }
                Some(current) => {
                    let updated = candidate < current;
                    if let Some(decision) = decision.as_mut() {
                        let old = tentative_path(&tree_paths, &parent_vertex, &parent_edge, v);
                        let new = extend(&tree_paths[w], e);
                        let (kept, rejected) = if updated { (new, old) } else { (old, new) };
                        decision.relaxations.push(Relaxation {
                            target: v,
                            kept,
                            rejected,
                            updated,
                        });
                    }
                    if updated {
                        dist[v] = Some(candidate);
                        parent_edge[v] = Some(e);
                        parent_vertex[v] = Some(w);
                        heap.push(Reverse(Key {
                            dist: candidate,
                            vertex: v,
                        }));
                    }
                }
            }
        }

        if let (Some(trace), Some(decision)) = (trace.as_mut(), decision) {
            trace.push(decision);
        }
    }

    Ok(ShortestPathTree {
        source,
        dist,
        parent_edge,
        parent_vertex,
        settle_order,
        trace,
    })
}

fn extend(prefix: &[EdgeIndex], e: EdgeIndex) -> Vec<EdgeIndex> {
    let mut path = Vec::with_capacity(prefix.len() + 1);
    path.extend_from_slice(prefix);
    path.push(e);
    path
}

fn tentative_path(
    tree_paths: &[Vec<EdgeIndex>],
    parent_vertex: &[Option<VertexId>],
    parent_edge: &[Option<EdgeIndex>],
    v: VertexId,
) -> Vec<EdgeIndex> {
    match (parent_vertex[v], parent_edge[v]) {
        (Some(p), Some(e)) => extend(&tree_paths[p], e),
        _ => Vec::new(),
    }
}

/// One canonical tree per requested source (all vertices when `sources` is
/// `None`). Duplicated sources yield duplicated trees.
pub fn apsp_canonical(
    graph: &WeightedGraph,
    sources: Option<&[VertexId]>,
    capture_trace: bool,
) -> Result<Vec<ShortestPathTree>, PathError> {
    let n = graph.vertex_count();
    match sources {
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&s| s >= n) {
                return Err(PathError::SourceOutOfRange {
                    source: bad,
                    vertex_count: n,
                });
            }
            list.iter()
                .map(|&s| sssp_canonical(graph, s, capture_trace))
                .collect()
        }
        None => (0..n)
            .map(|s| sssp_canonical(graph, s, capture_trace))
            .collect(),
    }
}

/// Structural equality of two trees: identical parent edges (which implies
/// identical reachable sets). Distances are deliberately ignored.
pub fn trees_equal(a: &ShortestPathTree, b: &ShortestPathTree) -> Result<bool, PathError> {
    if a.source != b.source {
        return Err(PathError::SourceMismatch {
            left: a.source,
            right: b.source,
        });
    }
    if a.dist.len() != b.dist.len() {
        return Err(PathError::VertexCountMismatch {
            left: a.dist.len(),
            right: b.dist.len(),
        });
    }
    let same_reach = a
        .dist
        .iter()
        .zip(&b.dist)
        .all(|(x, y)| x.is_some() == y.is_some());
    Ok(same_reach && a.parent_edge == b.parent_edge)
}

impl ShortestPathTree {
    pub fn vertex_count(&self) -> usize {
        self.dist.len()
    }

    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.dist.get(v).is_some_and(|d| d.is_some())
    }

    /// Edge indices along the tree path source→`target`, or `Ok(None)` when
    /// `target` is unreachable.
    pub fn path_to(&self, target: VertexId) -> Result<Option<Vec<EdgeIndex>>, PathError> {
        if target >= self.vertex_count() {
            return Err(PathError::TargetOutOfRange {
                target,
                vertex_count: self.vertex_count(),
            });
        }
        if self.dist[target].is_none() {
            return Ok(None);
        }
        let mut path = Vec::new();
        let mut v = target;
        while let (Some(e), Some(p)) = (self.parent_edge[v], self.parent_vertex[v]) {
            path.push(e);
            v = p;
        }
        path.reverse();
        Ok(Some(path))
    }

    /// Tree path to a vertex known to be reachable; empty otherwise.
    pub(crate) fn tree_path(&self, v: VertexId) -> Vec<EdgeIndex> {
        self.path_to(v).ok().flatten().unwrap_or_default()
    }

    /// Vertices on the tree path source→`target`, both ends included.
    pub(crate) fn path_vertices(&self, target: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut v = target;
        out.push(v);
        while let Some(p) = self.parent_vertex[v] {
            out.push(p);
            v = p;
        }
        out.reverse();
        out
    }
}

/// Sum of edge weights along `path`, accumulated source to target.
pub fn path_cost(graph: &WeightedGraph, path: &[EdgeIndex]) -> f64 {
    path.iter().fold(0.0, |acc, &e| acc + graph.weight(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Directedness, Edge};
    use alloc::vec;

    fn triangle(w: [f64; 3]) -> WeightedGraph {
        WeightedGraph::new(
            3,
            Directedness::Undirected,
            vec![
                Edge::new(0, 1, w[0]),
                Edge::new(1, 2, w[1]),
                Edge::new(0, 2, w[2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn triangle_from_zero() {
        let t = sssp_canonical(&triangle([1.0, 1.0, 3.0]), 0, false).unwrap();
        assert_eq!(t.dist, vec![Some(0.0), Some(1.0), Some(2.0)]);
        assert_eq!(t.parent_edge, vec![None, Some(0), Some(1)]);
        assert_eq!(t.settle_order, vec![0, 1, 2]);
        assert!(t.trace.is_none());
    }

    #[test]
    fn path_graph_distances_and_order() {
        let g = WeightedGraph::new(
            3,
            Directedness::Undirected,
            vec![Edge::new(0, 1, 2.0), Edge::new(1, 2, 3.0)],
        )
        .unwrap();
        let t = sssp_canonical(&g, 0, true).unwrap();
        assert_eq!(t.dist, vec![Some(0.0), Some(2.0), Some(5.0)]);
        assert_eq!(t.settle_order, vec![0, 1, 2]);
    }

    #[test]
    fn single_vertex() {
        let g = WeightedGraph::new(1, Directedness::Undirected, vec![]).unwrap();
        let t = sssp_canonical(&g, 0, true).unwrap();
        assert_eq!(t.dist, vec![Some(0.0)]);
        let trace = t.trace.unwrap();
        assert_eq!(trace.len(), 1);
        assert!(trace[0].losers.is_empty() && trace[0].relaxations.is_empty());
        assert!(matches!(
            sssp_canonical(&g, 1, false),
            Err(PathError::SourceOutOfRange { source: 1, .. })
        ));
    }

    #[test]
    fn triangle_trace_records_extraction_and_update() {
        let t = sssp_canonical(&triangle([1.0, 1.0, 3.0]), 0, true).unwrap();
        let trace = t.trace.unwrap();
        assert_eq!(trace.len(), 3);
        // Settling 1 beats the direct path to 2 still on the frontier.
        assert_eq!(trace[1].winner, 1);
        assert_eq!(trace[1].winner_path, vec![0]);
        assert_eq!(
            trace[1].losers,
            vec![FrontierPath {
                vertex: 2,
                path: vec![2]
            }]
        );
        // Relaxing 1→2 replaces [e2] with [e0, e1].
        assert_eq!(
            trace[1].relaxations,
            vec![Relaxation {
                target: 2,
                kept: vec![0, 1],
                rejected: vec![2],
                updated: true
            }]
        );
        assert_eq!(trace[2].winner_path, vec![0, 1]);
    }

    #[test]
    fn equal_candidate_does_not_update() {
        // Square with unit weights: 3 is reached via 1 first, then 2 ties.
        let g = WeightedGraph::new(
            4,
            Directedness::Undirected,
            vec![
                Edge::new(0, 1, 1.0),
                Edge::new(1, 3, 1.0),
                Edge::new(0, 2, 1.0),
                Edge::new(2, 3, 1.0),
            ],
        )
        .unwrap();
        let t = sssp_canonical(&g, 0, true).unwrap();
        assert_eq!(t.parent_edge, vec![None, Some(0), Some(2), Some(1)]);
        let trace = t.trace.unwrap();
        let rel = &trace[2].relaxations[0];
        assert_eq!((rel.target, rel.updated), (3, false));
        assert_eq!(rel.kept, vec![0, 1]);
        assert_eq!(rel.rejected, vec![2, 3]);
    }

    #[test]
    fn apsp_triangle_and_duplicates() {
        let g = triangle([1.0, 1.0, 3.0]);
        let trees = apsp_canonical(&g, None, false).unwrap();
        assert_eq!(trees.len(), 3);
        // From 2, vertex 0 hangs off vertex 1 (cost 2 < 3).
        assert_eq!(trees[2].parent_edge[0], Some(0));
        assert_eq!(trees[2].parent_vertex[0], Some(1));
        assert!(apsp_canonical(&g, Some(&[]), false).unwrap().is_empty());
        let dup = apsp_canonical(&g, Some(&[0, 0]), true).unwrap();
        assert_eq!(dup[0], dup[1]);
        assert!(apsp_canonical(&g, Some(&[0, 3]), false).is_err());
    }

    #[test]
    fn tree_comparison_ignores_distances() {
        let base = sssp_canonical(&triangle([1.0, 1.0, 3.0]), 0, false).unwrap();
        let same = sssp_canonical(&triangle([1.0, 1.0, 10.0]), 0, false).unwrap();
        let flipped = sssp_canonical(&triangle([5.0, 5.0, 3.0]), 0, false).unwrap();
        assert!(trees_equal(&base, &base).unwrap());
        assert!(trees_equal(&base, &same).unwrap());
        assert!(!trees_equal(&base, &flipped).unwrap());
        assert_eq!(flipped.parent_edge[2], Some(2));
        let other_source = sssp_canonical(&triangle([1.0, 1.0, 3.0]), 1, false).unwrap();
        assert!(trees_equal(&base, &other_source).is_err());
    }

    #[test]
    fn path_reconstruction() {
        let t = sssp_canonical(&triangle([1.0, 1.0, 3.0]), 0, false).unwrap();
        assert_eq!(t.path_to(2).unwrap(), Some(vec![0, 1]));
        assert_eq!(t.path_to(0).unwrap(), Some(vec![]));
        assert!(t.path_to(3).is_err());
        assert_eq!(t.path_vertices(2), vec![0, 1, 2]);

        let g =
            WeightedGraph::new(3, Directedness::Undirected, vec![Edge::new(0, 1, 1.0)]).unwrap();
        let t = sssp_canonical(&g, 0, false).unwrap();
        assert_eq!(t.path_to(2).unwrap(), None);
        assert!(!t.is_reachable(2));
    }

    #[test]
    fn directed_edges_are_one_way() {
        let g = WeightedGraph::new(
            3,
            Directedness::Directed,
            vec![Edge::new(0, 1, 1.0), Edge::new(2, 1, 1.0)],
        )
        .unwrap();
        let t = sssp_canonical(&g, 0, false).unwrap();
        assert_eq!(t.dist, vec![Some(0.0), Some(1.0), None]);
    }
}
