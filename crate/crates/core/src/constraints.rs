//! Turning shortest-path structure into linear inequalities over the edge
//! weight variables.
//!
//! Every row is kept in canonical form `Σ a_e·x_e ≤ rhs` with integer net
//! coefficients sorted by edge index, so duplicate detection is a plain
//! comparison of `(coeffs, rhs)`.
//!
//! Two generators preserve a tree:
//!
//! * [`gen_trace_constraints`] replays every comparison recorded during a
//!   traced Dijkstra run (extract-min choices and relaxation outcomes).
//! * [`gen_optimality_constraints`] emits one row per non-tree arc, stating
//!   that the arc cannot shorten the tree path to its head. It is never
//!   larger than the trace model.
//!
//! Strict inequalities are encoded with a margin: `winner − loser ≤ −δ`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::graph::{EdgeIndex, VertexId, WeightedGraph};
use crate::lp::{LpModel, LpRow};
use crate::shortest_paths::{path_cost, ShortestPathTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowKind {
    Trace,
    Optimality,
    CostLower,
    CostUpper,
}

impl RowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::Trace => "trace",
            RowKind::Optimality => "optimality",
            RowKind::CostLower => "cost-lower",
            RowKind::CostUpper => "cost-upper",
        }
    }
}

/// Where a row came from: the generator, the tree's source and the
/// vertices whose comparison the row encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub kind: RowKind,
    pub source: VertexId,
    pub vertices: Vec<VertexId>,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} source={} vertices=", self.kind.as_str(), self.source)?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    /// Nonzero integer coefficients in ascending edge-index order.
    pub coeffs: Vec<(EdgeIndex, i32)>,
    pub rhs: f64,
    pub provenance: Provenance,
}

impl ConstraintRow {
    /// `Σ a_e·x_e` at `point`.
    pub fn lhs(&self, point: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|&(e, a)| f64::from(a) * point[e])
            .sum()
    }

    /// Largest value the left-hand side can take inside the box.
    pub fn interval_max(&self, bounds: &Bounds) -> f64 {
        self.coeffs
            .iter()
            .map(|&(e, a)| {
                let a = f64::from(a);
                if a > 0.0 {
                    a * bounds.upper[e]
                } else {
                    a * bounds.lower[e]
                }
            })
            .sum()
    }

    fn key(&self) -> (Vec<(EdgeIndex, i32)>, u64) {
        (self.coeffs.clone(), normalize_zero(self.rhs).to_bits())
    }
}

fn normalize_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    pub rows: Vec<ConstraintRow>,
    pub num_vars: usize,
    pub delta: f64,
}

impl ConstraintSet {
    pub fn empty(num_vars: usize, delta: f64) -> Self {
        ConstraintSet {
            rows: Vec::new(),
            num_vars,
            delta,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends `row` unless an identical `(coeffs, rhs)` row is present.
    fn push_unique(
        &mut self,
        seen: &mut BTreeSet<(Vec<(EdgeIndex, i32)>, u64)>,
        row: ConstraintRow,
    ) {
        if seen.insert(row.key()) {
            self.rows.push(row);
        }
    }
}

/// Per-variable box `[lower, upper]` with `0 < lower ≤ upper < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ConstraintError> {
        if lower.len() != upper.len() {
            return Err(ConstraintError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (var, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l > 0.0 && l <= u) {
                return Err(ConstraintError::InvalidBounds {
                    var,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Bounds { lower, upper })
    }

    pub fn uniform(num_vars: usize, lower: f64, upper: f64) -> Result<Self, ConstraintError> {
        Bounds::new(alloc::vec![lower; num_vars], alloc::vec![upper; num_vars])
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }
}

/// Allowed deviation of a preserved path cost from its original value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostTolerance {
    /// `D ± ε`.
    Absolute(f64),
    /// `D ± ε·D`.
    Relative(f64),
}

impl CostTolerance {
    pub fn epsilon(self) -> f64 {
        match self {
            CostTolerance::Absolute(e) | CostTolerance::Relative(e) => e,
        }
    }

    pub fn for_distance(self, dist: f64) -> f64 {
        match self {
            CostTolerance::Absolute(e) => e,
            CostTolerance::Relative(e) => e * dist,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintError {
    MissingTrace { source: VertexId },
    UnreachableTarget { source: VertexId, target: VertexId },
    TargetOutOfRange { target: VertexId },
    NegativeDelta(f64),
    NegativeEpsilon(f64),
    NumVarsMismatch { expected: usize, got: usize },
    DeltaMismatch { expected: f64, got: f64 },
    DimensionMismatch { expected: usize, got: usize },
    InvalidBounds { var: usize, lower: f64, upper: f64 },
}

impl fmt::Display for ConstraintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintError::MissingTrace { source } => {
                write!(f, "tree from source {source} was built without a trace")
            }
            ConstraintError::UnreachableTarget { source, target } => {
                write!(f, "target {target} is unreachable from source {source}")
            }
            ConstraintError::TargetOutOfRange { target } => {
                write!(f, "target {target} out of range")
            }
            ConstraintError::NegativeDelta(d) => write!(f, "delta must be >= 0, got {d}"),
            ConstraintError::NegativeEpsilon(e) => write!(f, "epsilon must be >= 0, got {e}"),
            ConstraintError::NumVarsMismatch { expected, got } => {
                write!(
                    f,
                    "constraint sets disagree on variable count ({expected} vs {got})"
                )
            }
            ConstraintError::DeltaMismatch { expected, got } => {
                write!(f, "constraint sets disagree on delta ({expected} vs {got})")
            }
            ConstraintError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            ConstraintError::InvalidBounds { var, lower, upper } => write!(
                f,
                "invalid bounds for variable {var}: [{lower}, {upper}] (need 0 < L <= U < inf)"
            ),
        }
    }
}

impl core::error::Error for ConstraintError {}

fn check_delta(delta: f64) -> Result<(), ConstraintError> {
    if delta >= 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(ConstraintError::NegativeDelta(delta))
    }
}

/// Net coefficients of `cost(plus) − cost(minus) − cost(extra)`.
fn path_difference(
    plus: &[EdgeIndex],
    minus: &[EdgeIndex],
    extra_minus: Option<EdgeIndex>,
) -> Vec<(EdgeIndex, i32)> {
    let mut net: BTreeMap<EdgeIndex, i32> = BTreeMap::new();
    for &e in plus {
        *net.entry(e).or_insert(0) += 1;
    }
    for &e in minus.iter().chain(extra_minus.iter()) {
        *net.entry(e).or_insert(0) -= 1;
    }
    net.into_iter().filter(|&(_, a)| a != 0).collect()
}

/// A comparison row with no positive coefficient says that a path is no
/// shorter than one of its own extensions; positive weights already imply
/// it strictly, so it carries no information.
fn is_dominated(coeffs: &[(EdgeIndex, i32)]) -> bool {
    coeffs.iter().all(|&(_, a)| a <= 0)
}

/// How the right-hand side of a comparison row is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Margin {
    /// Every row demands the same strict margin: `winner − loser ≤ −δ`.
    Uniform(f64),
    /// Each row demands `min(δ, original slack)`: comparisons the original
    /// weights decided by a tie stay ties (`≤ 0`), all others stay strict.
    /// The original weights always satisfy an anchored system.
    Anchored(f64),
}

impl Margin {
    pub fn delta(self) -> f64 {
        match self {
            Margin::Uniform(d) | Margin::Anchored(d) => d,
        }
    }

    fn rhs(self, original_slack: f64) -> f64 {
        let m = match self {
            Margin::Uniform(d) => d,
            Margin::Anchored(d) => d.min(original_slack.max(0.0)),
        };
        normalize_zero(-m)
    }
}

fn comparison_row(
    coeffs: Vec<(EdgeIndex, i32)>,
    rhs: f64,
    kind: RowKind,
    source: VertexId,
    vertices: Vec<VertexId>,
) -> ConstraintRow {
    ConstraintRow {
        coeffs,
        rhs,
        provenance: Provenance {
            kind,
            source,
            vertices,
        },
    }
}

/// Rows replaying every decision of a traced Dijkstra run: for each
/// extraction, the winner's path beats every frontier path; for each
/// relaxation, the kept path beats the rejected one.
pub fn gen_trace_constraints(
    graph: &WeightedGraph,
    tree: &ShortestPathTree,
    delta: f64,
) -> Result<ConstraintSet, ConstraintError> {
    gen_trace_constraints_with(graph, tree, Margin::Uniform(delta))
}

pub fn gen_trace_constraints_with(
    graph: &WeightedGraph,
    tree: &ShortestPathTree,
    margin: Margin,
) -> Result<ConstraintSet, ConstraintError> {
    check_delta(margin.delta())?;
    let trace = tree.trace.as_ref().ok_or(ConstraintError::MissingTrace {
        source: tree.source,
    })?;
    let mut set = ConstraintSet::empty(graph.edge_count(), margin.delta());
    let mut seen = BTreeSet::new();
    let mut emit = |set: &mut ConstraintSet,
                    winner: &[EdgeIndex],
                    loser: &[EdgeIndex],
                    vertices: Vec<VertexId>| {
        let coeffs = path_difference(winner, loser, None);
        if coeffs.is_empty() || is_dominated(&coeffs) {
            return;
        }
        let slack = path_cost(graph, loser) - path_cost(graph, winner);
        let row = comparison_row(
            coeffs,
            margin.rhs(slack),
            RowKind::Trace,
            tree.source,
            vertices,
        );
        set.push_unique(&mut seen, row);
    };
    for decision in trace {
        for loser in &decision.losers {
            emit(
                &mut set,
                &decision.winner_path,
                &loser.path,
                alloc::vec![decision.winner, loser.vertex],
            );
        }
        for relax in &decision.relaxations {
            emit(
                &mut set,
                &relax.kept,
                &relax.rejected,
                alloc::vec![decision.winner, relax.target],
            );
        }
    }
    Ok(set)
}

/// Reduced model: for every arc `a→b` outside the tree with both ends
/// reachable, `cost(path(b)) − cost(path(a)) − x_ab ≤ −δ`.
pub fn gen_optimality_constraints(
    graph: &WeightedGraph,
    tree: &ShortestPathTree,
    delta: f64,
) -> Result<ConstraintSet, ConstraintError> {
    gen_optimality_constraints_with(graph, tree, Margin::Uniform(delta))
}

/// Optimality rows under `margin`. With [`Margin::Anchored`], an arc that
/// ties with the tree parent `p` of its head additionally gets the row
/// `cost(path(p)) − cost(path(a)) ≤ −min(δ, d(a) − d(p))`, so `p` keeps
/// settling first and wins the tie.
pub fn gen_optimality_constraints_with(
    graph: &WeightedGraph,
    tree: &ShortestPathTree,
    margin: Margin,
) -> Result<ConstraintSet, ConstraintError> {
    check_delta(margin.delta())?;
    let mut set = ConstraintSet::empty(graph.edge_count(), margin.delta());
    let mut seen = BTreeSet::new();
    let paths: Vec<Option<Vec<EdgeIndex>>> = (0..graph.vertex_count())
        .map(|v| tree.is_reachable(v).then(|| tree.tree_path(v)))
        .collect();
    for (a, b, e) in graph.arcs() {
        if tree.parent_edge[b] == Some(e) && tree.parent_vertex[b] == Some(a) {
            continue;
        }
        let (Some(path_a), Some(path_b)) = (&paths[a], &paths[b]) else {
            continue;
        };
        let coeffs = path_difference(path_b, path_a, Some(e));
        if coeffs.is_empty() || is_dominated(&coeffs) {
            continue;
        }
        let (Some(da), Some(db)) = (tree.dist[a], tree.dist[b]) else {
            continue;
        };
        let slack = da + graph.weight(e) - db;
        set.push_unique(
            &mut seen,
            comparison_row(
                coeffs,
                margin.rhs(slack),
                RowKind::Optimality,
                tree.source,
                alloc::vec![a, b],
            ),
        );
        if let (Margin::Anchored(_), true, Some(p)) = (margin, slack <= 0.0, tree.parent_vertex[b])
        {
            let (Some(path_p), Some(dp)) = (&paths[p], tree.dist[p]) else {
                continue;
            };
            let order = path_difference(path_p, path_a, None);
            if order.is_empty() || is_dominated(&order) {
                continue;
            }
            set.push_unique(
                &mut seen,
                comparison_row(
                    order,
                    margin.rhs(da - dp),
                    RowKind::Optimality,
                    tree.source,
                    alloc::vec![p, a],
                ),
            );
        }
    }
    Ok(set)
}

/// Two rows per target pinning the tree path cost to `D ± ε`. The source
/// itself contributes nothing. `delta` is recorded on the set only.
pub fn gen_cost_constraints(
    graph: &WeightedGraph,
    tree: &ShortestPathTree,
    targets: &[VertexId],
    tolerance: CostTolerance,
    delta: f64,
) -> Result<ConstraintSet, ConstraintError> {
    check_delta(delta)?;
    let eps = tolerance.epsilon();
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(ConstraintError::NegativeEpsilon(eps));
    }
    let mut set = ConstraintSet::empty(graph.edge_count(), delta);
    let mut seen = BTreeSet::new();
    for &t in targets {
        if t >= tree.vertex_count() {
            return Err(ConstraintError::TargetOutOfRange { target: t });
        }
        let Some(dist) = tree.dist[t] else {
            return Err(ConstraintError::UnreachableTarget {
                source: tree.source,
                target: t,
            });
        };
        if t == tree.source {
            continue;
        }
        let path = tree.tree_path(t);
        let slack = tolerance.for_distance(dist);
        let plus = path_difference(&path, &[], None);
        let minus: Vec<_> = plus.iter().map(|&(e, a)| (e, -a)).collect();
        let vertices = tree.path_vertices(t);
        set.push_unique(
            &mut seen,
            ConstraintRow {
                coeffs: plus,
                rhs: dist + slack,
                provenance: Provenance {
                    kind: RowKind::CostUpper,
                    source: tree.source,
                    vertices: vertices.clone(),
                },
            },
        );
        set.push_unique(
            &mut seen,
            ConstraintRow {
                coeffs: minus,
                rhs: normalize_zero(-(dist - slack)),
                provenance: Provenance {
                    kind: RowKind::CostLower,
                    source: tree.source,
                    vertices,
                },
            },
        );
    }
    Ok(set)
}

/// Union of `sets` in input order, dropping exact duplicates (the first
/// occurrence keeps its provenance).
pub fn compose(
    num_vars: usize,
    delta: f64,
    sets: &[ConstraintSet],
) -> Result<ConstraintSet, ConstraintError> {
    let mut out = ConstraintSet::empty(num_vars, delta);
    let mut seen = BTreeSet::new();
    for set in sets {
        if set.num_vars != num_vars {
            return Err(ConstraintError::NumVarsMismatch {
                expected: num_vars,
                got: set.num_vars,
            });
        }
        if set.delta != delta {
            return Err(ConstraintError::DeltaMismatch {
                expected: delta,
                got: set.delta,
            });
        }
        for row in &set.rows {
            out.push_unique(&mut seen, row.clone());
        }
    }
    Ok(out)
}

/// Drops rows the box alone already implies: interval maximum ≤ rhs.
pub fn prune_implied(
    set: &ConstraintSet,
    bounds: &Bounds,
) -> Result<ConstraintSet, ConstraintError> {
    if bounds.len() != set.num_vars {
        return Err(ConstraintError::DimensionMismatch {
            expected: set.num_vars,
            got: bounds.len(),
        });
    }
    let rows = set
        .rows
        .iter()
        .filter(|row| row.interval_max(bounds) > row.rhs)
        .cloned()
        .collect();
    Ok(ConstraintSet {
        rows,
        num_vars: set.num_vars,
        delta: set.delta,
    })
}

/// Minimization LP over the rows of `set` inside `bounds`.
pub fn assemble_lp(
    set: &ConstraintSet,
    bounds: &Bounds,
    objective: &[f64],
) -> Result<LpModel, ConstraintError> {
    if objective.len() != set.num_vars {
        return Err(ConstraintError::DimensionMismatch {
            expected: set.num_vars,
            got: objective.len(),
        });
    }
    if bounds.len() != set.num_vars {
        return Err(ConstraintError::DimensionMismatch {
            expected: set.num_vars,
            got: bounds.len(),
        });
    }
    let rows = set
        .rows
        .iter()
        .map(|r| LpRow {
            coeffs: r.coeffs.iter().map(|&(e, a)| (e, f64::from(a))).collect(),
            rhs: r.rhs,
        })
        .collect();
    LpModel::new(
        objective.to_vec(),
        rows,
        bounds.lower.clone(),
        bounds.upper.clone(),
    )
    .map_err(|_| ConstraintError::DimensionMismatch {
        expected: set.num_vars,
        got: objective.len(),
    })
}

/// Independent draws, uniform on `[−1, 1]`. With a `ChaCha8Rng` seeded via
/// `seed_from_u64` this is the objective the CLI uses.
pub fn random_objective<R: Rng + ?Sized>(num_vars: usize, rng: &mut R) -> Vec<f64> {
    (0..num_vars).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}
