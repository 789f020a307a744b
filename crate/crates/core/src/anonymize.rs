//! End-to-end anonymization: trees → constraints → LP → verified weights.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constraints::{
    assemble_lp, compose, gen_cost_constraints, gen_optimality_constraints_with,
    gen_trace_constraints_with, prune_implied, random_objective, Bounds, ConstraintError,
    ConstraintSet, CostTolerance, Margin, Provenance,
};
use crate::graph::{VertexId, WeightedGraph};
use crate::lp::{solve, LpModel, LpStatus, SolveError};
use crate::metrics::{kendall_tau, preservation_rate};
use crate::shortest_paths::{sssp_canonical, ShortestPathTree};

/// Smallest positive margin tried before falling back to zero.
pub const DELTA_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSelection {
    Single(VertexId),
    All,
    Subset(Vec<VertexId>),
}

impl SourceSelection {
    pub fn resolve(&self, vertex_count: usize) -> Result<Vec<VertexId>, AnonymizeError> {
        let list = match self {
            SourceSelection::Single(s) => alloc::vec![*s],
            SourceSelection::All => (0..vertex_count).collect(),
            SourceSelection::Subset(list) => list.clone(),
        };
        if let Some(bad) = list.iter().find(|&&s| s >= vertex_count) {
            return Err(AnonymizeError::InvalidConfig(format!(
                "source {bad} out of range (graph has {vertex_count} vertices)"
            )));
        }
        Ok(list)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    Trace,
    Optimality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonymizeOptions {
    pub sources: SourceSelection,
    pub mode: ConstraintMode,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    /// Keep every preserved path cost within a tolerance of the original.
    pub cost: Option<CostTolerance>,
    /// Widen `[lower, upper]` so cost-pinned paths stay representable
    /// (see [`effective_bounds`]). Set when the user did not choose bounds.
    pub widen_bounds: bool,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for AnonymizeOptions {
    fn default() -> Self {
        AnonymizeOptions {
            sources: SourceSelection::Single(0),
            mode: ConstraintMode::Optimality,
            delta: 1.0,
            lower: 1.0,
            upper: 1000.0,
            cost: None,
            widen_bounds: false,
            rounds: 1,
            seed: 0,
        }
    }
}

impl AnonymizeOptions {
    pub fn validate(&self) -> Result<(), AnonymizeError> {
        let bad = |msg: String| Err(AnonymizeError::InvalidConfig(msg));
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!(
                "delta must be a finite value >= 0, got {}",
                self.delta
            ));
        }
        if !(self.lower > 0.0 && self.lower <= self.upper && self.upper.is_finite()) {
            return bad(format!(
                "bounds must satisfy 0 < L <= U < inf, got [{}, {}]",
                self.lower, self.upper
            ));
        }
        if self.rounds == 0 {
            return bad("rounds must be >= 1".into());
        }
        if let Some(tol) = self.cost {
            let e = tol.epsilon();
            if !(e >= 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be a finite value >= 0, got {e}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonymizeOutcome {
    pub graph: WeightedGraph,
    pub sources: Vec<VertexId>,
    pub delta_used: f64,
    /// Margin stage that produced the weights.
    pub margin: Margin,
    pub rounds_used: usize,
    /// Zero-based round whose solution was kept.
    pub selected_round: usize,
    pub kendall_tau: f64,
    pub lower: f64,
    pub upper: f64,
    pub row_count: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnonymizeError {
    InvalidConfig(String),
    Constraint(ConstraintError),
    Solver(SolveError),
    /// No margin down to zero admits a solution. `violated` lists the rows
    /// the original weights (clamped into the box) break.
    Infeasible {
        violated: Vec<Provenance>,
        out_of_bounds: Vec<usize>,
    },
    /// Every round produced weights whose trees differ from the originals.
    Unverified {
        delta_used: f64,
        failed_sources: Vec<VertexId>,
    },
}

impl fmt::Display for AnonymizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnonymizeError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            AnonymizeError::Constraint(e) => write!(f, "{e}"),
            AnonymizeError::Solver(e) => write!(f, "{e}"),
            AnonymizeError::Infeasible {
                violated,
                out_of_bounds,
            } => write!(
                f,
                "constraint system infeasible at every margin ({} conflicting rows, {} original weights outside the bounds)",
                violated.len(),
                out_of_bounds.len()
            ),
            AnonymizeError::Unverified {
                delta_used,
                failed_sources,
            } => write!(
                f,
                "no round preserved every tree (delta {delta_used}, {} sources failed)",
                failed_sources.len()
            ),
        }
    }
}

impl core::error::Error for AnonymizeError {}

impl From<ConstraintError> for AnonymizeError {
    fn from(e: ConstraintError) -> Self {
        AnonymizeError::Constraint(e)
    }
}

impl From<SolveError> for AnonymizeError {
    fn from(e: SolveError) -> Self {
        AnonymizeError::Solver(e)
    }
}

/// Canonical trees for every source, traced when the mode needs it.
pub fn build_trees(
    graph: &WeightedGraph,
    sources: &[VertexId],
    mode: ConstraintMode,
) -> Result<Vec<ShortestPathTree>, AnonymizeError> {
    sources
        .iter()
        .map(|&s| {
            sssp_canonical(graph, s, mode == ConstraintMode::Trace)
                .map_err(|e| AnonymizeError::InvalidConfig(format!("{e}")))
        })
        .collect()
}

/// Bounds actually used for the LP.
///
/// Without cost preservation (or with `widen_bounds` unset) this is the
/// configured box. Otherwise, with `ε̂` the tolerance relative to the
/// smallest positive preserved distance (or the relative tolerance itself):
///
/// * `L' = min(L, w_min · max(1 − ε̂, 0.001))`
/// * `U' = max(U, max_t (D_t + tol_t))`
pub fn effective_bounds(
    graph: &WeightedGraph,
    trees: &[ShortestPathTree],
    options: &AnonymizeOptions,
) -> (f64, f64) {
    let (lower, upper) = (options.lower, options.upper);
    let Some(tol) = options.cost.filter(|_| options.widen_bounds) else {
        return (lower, upper);
    };
    let distances = trees
        .iter()
        .flat_map(|t| t.dist.iter().flatten().copied())
        .filter(|&d| d > 0.0);
    let (min_d, max_reach) = distances.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
        (lo.min(d), hi.max(d + tol.for_distance(d)))
    });
    let min_w = graph
        .edges()
        .iter()
        .map(|e| e.weight)
        .fold(f64::INFINITY, f64::min);
    let rel = match tol {
        CostTolerance::Absolute(e) if min_d.is_finite() => e / min_d,
        CostTolerance::Absolute(_) => 0.0,
        CostTolerance::Relative(e) => e,
    };
    let new_lower = if min_w.is_finite() {
        lower.min(min_w * (1.0 - rel).max(1e-3))
    } else {
        lower
    };
    (new_lower, upper.max(max_reach))
}

/// Composed, pruned constraint system for all `trees` under `margin`.
pub fn build_constraints(
    graph: &WeightedGraph,
    trees: &[ShortestPathTree],
    mode: ConstraintMode,
    cost: Option<CostTolerance>,
    margin: Margin,
    bounds: &Bounds,
) -> Result<ConstraintSet, AnonymizeError> {
    let delta = margin.delta();
    let mut sets = Vec::with_capacity(trees.len() * 2);
    for tree in trees {
        let set = match mode {
            ConstraintMode::Trace => gen_trace_constraints_with(graph, tree, margin)?,
            ConstraintMode::Optimality => gen_optimality_constraints_with(graph, tree, margin)?,
        };
        sets.push(set);
        if let Some(tol) = cost {
            let targets: Vec<VertexId> = (0..graph.vertex_count())
                .filter(|&v| tree.is_reachable(v) && v != tree.source)
                .collect();
            sets.push(gen_cost_constraints(graph, tree, &targets, tol, delta)?);
        }
    }
    let composed = compose(graph.edge_count(), delta, &sets)?;
    Ok(prune_implied(&composed, bounds)?)
}

/// The LP the pipeline would solve first: margin `options.delta`, the
/// first objective drawn from `options.seed`.
pub fn export_model(
    graph: &WeightedGraph,
    options: &AnonymizeOptions,
) -> Result<LpModel, AnonymizeError> {
    options.validate()?;
    let sources = options.sources.resolve(graph.vertex_count())?;
    let trees = build_trees(graph, &sources, options.mode)?;
    let (lower, upper) = effective_bounds(graph, &trees, options);
    let bounds = Bounds::uniform(graph.edge_count(), lower, upper)?;
    let set = build_constraints(
        graph,
        &trees,
        options.mode,
        options.cost,
        Margin::Uniform(options.delta),
        &bounds,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let objective = random_objective(graph.edge_count(), &mut rng);
    Ok(assemble_lp(&set, &bounds, &objective)?)
}

/// Margins tried in order: `δ, δ/10, …` while `≥ DELTA_MIN`, then the
/// anchored margin `δ` (ties of the original weights stay ties), then 0.
pub fn delta_schedule(delta: f64) -> Vec<Margin> {
    let mut out = Vec::new();
    let mut d = delta;
    while d >= DELTA_MIN {
        out.push(Margin::Uniform(d));
        d /= 10.0;
    }
    if delta > 0.0 {
        out.push(Margin::Anchored(delta));
    }
    out.push(Margin::Uniform(0.0));
    out
}

// LP vertices of these systems sit on a coarse dyadic grid; pull values that
// are within rounding noise of it back on, so tied path sums compare equal.
fn snap(x: f64) -> f64 {
    const GRID: f64 = 1024.0;
    let y = libm::round(x * GRID) / GRID;
    if (x - y).abs() <= 1e-7 * (1.0 + x.abs()) {
        y
    } else {
        x
    }
}

struct Candidate {
    weights: Vec<f64>,
    abs_tau: f64,
    tau: f64,
    round: usize,
}

pub fn anonymize(
    graph: &WeightedGraph,
    options: &AnonymizeOptions,
) -> Result<AnonymizeOutcome, AnonymizeError> {
    options.validate()?;
    let sources = options.sources.resolve(graph.vertex_count())?;
    let trees = build_trees(graph, &sources, options.mode)?;
    let (lower, upper) = effective_bounds(graph, &trees, options);
    let m = graph.edge_count();
    let bounds = Bounds::uniform(m, lower, upper)?;
    let original = graph.weights();
    let mut warnings = Vec::new();

    let mut last_set = None;
    let mut unverified: Option<(f64, Vec<VertexId>)> = None;
    for margin in delta_schedule(options.delta) {
        let set = build_constraints(graph, &trees, options.mode, options.cost, margin, &bounds)?;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let mut best: Option<Candidate> = None;
        let mut failed_sources = Vec::new();
        let mut feasible = true;

        for round in 0..options.rounds {
            let objective = random_objective(m, &mut rng);
            let model = assemble_lp(&set, &bounds, &objective)?;
            let solution = solve(&model)?;
            if solution.status != LpStatus::Optimal {
                feasible = false;
                break;
            }
            let weights: Vec<f64> = solution
                .point
                .unwrap_or_default()
                .iter()
                .zip(bounds.lower.iter().zip(&bounds.upper))
                .map(|(&x, (&l, &u))| snap(x).clamp(l, u))
                .collect();
            let candidate_graph = graph
                .with_weights(&weights)
                .map_err(|e| AnonymizeError::InvalidConfig(format!("{e}")))?;
            let verdict = preservation_rate(graph, &candidate_graph, &sources)
                .map_err(|e| AnonymizeError::InvalidConfig(format!("{e}")))?;
            if !verdict.all_preserved() {
                failed_sources = verdict
                    .verdicts
                    .iter()
                    .filter(|&&(_, ok)| !ok)
                    .map(|&(s, _)| s)
                    .collect();
                continue;
            }
            let tau = if m >= 2 {
                kendall_tau(&original, &weights).unwrap_or(0.0)
            } else {
                0.0
            };
            if best.as_ref().is_none_or(|b| tau.abs() < b.abs_tau) {
                best = Some(Candidate {
                    weights,
                    abs_tau: tau.abs(),
                    tau,
                    round,
                });
            }
        }

        if !feasible {
            last_set = Some(set);
            continue;
        }
        let Some(best) = best else {
            // Feasible but no round kept every tree; a later stage may.
            if unverified.is_none() {
                unverified = Some((margin.delta(), failed_sources));
            }
            continue;
        };
        if margin != Margin::Uniform(options.delta) {
            warnings.push(match margin {
                Margin::Uniform(0.0) => format!(
                    "margin {} infeasible; fell back to 0, strict preservation is not guaranteed",
                    options.delta
                ),
                Margin::Uniform(d) => format!("margin {} infeasible; reduced to {d}", options.delta),
                Margin::Anchored(d) => format!(
                    "margin {d} infeasible because the original weights tie; kept those ties and used margin {d} elsewhere"
                ),
            });
        }
        let anonymized = graph
            .with_weights(&best.weights)
            .map_err(|e| AnonymizeError::InvalidConfig(format!("{e}")))?;
        return Ok(AnonymizeOutcome {
            graph: anonymized,
            sources,
            delta_used: margin.delta(),
            margin,
            rounds_used: options.rounds,
            selected_round: best.round,
            kendall_tau: best.tau,
            lower,
            upper,
            row_count: set.len(),
            warnings,
        });
    }

    if let Some((delta_used, failed_sources)) = unverified {
        return Err(AnonymizeError::Unverified {
            delta_used,
            failed_sources,
        });
    }
    // Every margin failed; explain with the clamped original weights.
    let clamped: Vec<f64> = original.iter().map(|w| w.clamp(lower, upper)).collect();
    let violated = last_set
        .map(|set| {
            set.rows
                .iter()
                .filter(|r| r.lhs(&clamped) - r.rhs > 1e-9 * (1.0 + r.rhs.abs()))
                .map(|r| r.provenance.clone())
                .collect()
        })
        .unwrap_or_default();
    let out_of_bounds = original
        .iter()
        .enumerate()
        .filter(|(_, &w)| w < lower || w > upper)
        .map(|(e, _)| e)
        .collect();
    Err(AnonymizeError::Infeasible {
        violated,
        out_of_bounds,
    })
}
