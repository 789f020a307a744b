//! Box-bounded linear programs `min cᵀx  s.t.  Ax ≤ b,  L ≤ x ≤ U`.

use alloc::vec::Vec;
use core::fmt;

use crate::simplex;

/// Relative row tolerance a returned optimum is guaranteed to meet.
pub const ROW_TOLERANCE: f64 = 1e-7;
/// Absolute bound tolerance a returned optimum is guaranteed to meet.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    /// `(variable, coefficient)` pairs; the row reads `Σ coeff·x ≤ rhs`.
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LpRow {
    pub fn lhs(&self, point: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * point[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    VariableOutOfRange {
        row: usize,
        var: usize,
    },
    InvalidBound {
        var: usize,
        lower: f64,
        upper: f64,
    },
    NonFinite {
        row: usize,
    },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch {
                what,
                expected,
                got,
            } => {
                write!(f, "{what}: expected {expected} entries, got {got}")
            }
            LpError::VariableOutOfRange { row, var } => {
                write!(f, "row {row} references unknown variable {var}")
            }
            LpError::InvalidBound { var, lower, upper } => {
                write!(f, "variable {var} has invalid bounds [{lower}, {upper}]")
            }
            LpError::NonFinite { row } => write!(f, "row {row} has a non-finite entry"),
        }
    }
}

impl core::error::Error for LpError {}

impl LpModel {
    /// Validates dimensions and requires finite bounds with `L ≤ U`.
    pub fn new(
        objective: Vec<f64>,
        rows: Vec<LpRow>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self, LpError> {
        let n = objective.len();
        for (what, len) in [("lower bounds", lower.len()), ("upper bounds", upper.len())] {
            if len != n {
                return Err(LpError::DimensionMismatch {
                    what,
                    expected: n,
                    got: len,
                });
            }
        }
        for (var, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(LpError::InvalidBound {
                    var,
                    lower: l,
                    upper: u,
                });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if !row.rhs.is_finite() || row.coeffs.iter().any(|&(_, a)| !a.is_finite()) {
                return Err(LpError::NonFinite { row: i });
            }
            if let Some(&(var, _)) = row.coeffs.iter().find(|&&(j, _)| j >= n) {
                return Err(LpError::VariableOutOfRange { row: i, var });
            }
        }
        Ok(LpModel {
            objective,
            rows,
            lower,
            upper,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status` is `Optimal`.
    pub point: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// The pivot budget ran out before reaching a verdict.
    IterationLimit { iterations: usize },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::IterationLimit { iterations } => {
                write!(
                    f,
                    "simplex stopped after {iterations} iterations without a verdict"
                )
            }
        }
    }
}

impl core::error::Error for SolveError {}

/// Solves `model` with the bounded-variable primal simplex.
pub fn solve(model: &LpModel) -> Result<LpSolution, SolveError> {
    simplex::solve_bounded(&model.objective, &model.rows, &model.lower, &model.upper)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityViolation {
    Dimension { expected: usize, got: usize },
    Row { row: usize, lhs: f64, rhs: f64 },
    Lower { var: usize, value: f64, bound: f64 },
    Upper { var: usize, value: f64, bound: f64 },
}

impl fmt::Display for FeasibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibilityViolation::Dimension { expected, got } => {
                write!(f, "point has {got} entries, model has {expected} variables")
            }
            FeasibilityViolation::Row { row, lhs, rhs } => {
                write!(f, "row {row}: lhs {lhs} > rhs {rhs}")
            }
            FeasibilityViolation::Lower { var, value, bound } => {
                write!(f, "variable {var}: {value} below lower bound {bound}")
            }
            FeasibilityViolation::Upper { var, value, bound } => {
                write!(f, "variable {var}: {value} above upper bound {bound}")
            }
        }
    }
}

/// Every row or bound of `model` that `point` violates by more than
/// `tol·(1 + |rhs|)` (resp. `tol·(1 + |bound|)`).
pub fn check_feasible(
    model: &LpModel,
    point: &[f64],
    tol: f64,
) -> Result<(), Vec<FeasibilityViolation>> {
    if point.len() != model.num_vars() {
        return Err(alloc::vec![FeasibilityViolation::Dimension {
            expected: model.num_vars(),
            got: point.len(),
        }]);
    }
    let mut violations = Vec::new();
    for (i, row) in model.rows.iter().enumerate() {
        let lhs = row.lhs(point);
        if lhs - row.rhs > tol * (1.0 + row.rhs.abs()) {
            violations.push(FeasibilityViolation::Row {
                row: i,
                lhs,
                rhs: row.rhs,
            });
        }
    }
    for (var, &x) in point.iter().enumerate() {
        let (l, u) = (model.lower[var], model.upper[var]);
        if l - x > tol * (1.0 + l.abs()) {
            violations.push(FeasibilityViolation::Lower {
                var,
                value: x,
                bound: l,
            });
        }
        if x - u > tol * (1.0 + u.abs()) {
            violations.push(FeasibilityViolation::Upper {
                var,
                value: x,
                bound: u,
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
