//! Dense-tableau primal simplex with bounded variables.
//!
//! Each row `a·x ≤ b` gets a slack `s ≥ 0`. Structural variables start at
//! whichever bound their cost prefers, so a feasible start is already
//! optimal. Rows whose slack would start negative get an artificial
//! variable instead, and phase 1 minimizes the sum of artificials.
//!
//! Pricing is Dantzig's largest reduced cost. After `3·(rows + vars)`
//! degenerate steps the solver switches to Bland's smallest-index rule for
//! the remainder of the solve, which rules out cycling.

use alloc::vec::Vec;

use crate::lp::{LpRow, LpSolution, LpStatus, SolveError};

pub const MAX_ITERATIONS: usize = 1_000_000;

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;
const DEGENERATE_STEP: f64 = 1e-12;
const REFRESH_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

struct Tableau<'a> {
    rows: &'a [LpRow],
    m: usize,
    n: usize,
    /// Stored columns: `n` structural then `m` slacks. Artificials are
    /// implicit; they never re-enter once they leave the basis.
    ncols: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    /// Variable ids: `< n` structural, `n..n+m` slack, `n+m+i` artificial of row `i`.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    cost: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
    degenerate: usize,
    degenerate_limit: usize,
    bland: bool,
}

/// Solves `min cᵀx  s.t.  rows,  lower ≤ x ≤ upper`. Lower bounds must be
/// finite; upper bounds may be `+∞`, which is the only way to obtain an
/// `Unbounded` verdict.
pub fn solve_bounded(
    objective: &[f64],
    rows: &[LpRow],
    lower: &[f64],
    upper: &[f64],
) -> Result<LpSolution, SolveError> {
    let mut tab = Tableau::new(objective, rows, lower, upper);

    if tab.basis.iter().any(|&k| tab.is_artificial(k)) {
        tab.set_phase_costs(Phase::One, objective);
        tab.run()?;
        tab.refresh_beta();
        let infeasibility: f64 = (0..tab.m)
            .filter(|&i| tab.is_artificial(tab.basis[i]))
            .map(|i| tab.beta[i].max(0.0))
            .sum();
        if infeasibility > PHASE1_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                point: None,
                objective_value: None,
                iterations: tab.iterations,
            });
        }
        // Remaining artificials are pinned at zero for phase 2.
        for i in 0..tab.m {
            let art = tab.n + tab.m + i;
            tab.upper[art] = 0.0;
        }
        for i in 0..tab.m {
            if tab.is_artificial(tab.basis[i]) {
                tab.beta[i] = 0.0;
            }
        }
    }

    tab.set_phase_costs(Phase::Two, objective);
    if let Step::Unbounded = tab.run()? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            point: None,
            objective_value: None,
            iterations: tab.iterations,
        });
    }
    tab.refresh_beta();
    let point = tab.point();
    let value = objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        point: Some(point),
        objective_value: Some(value),
        iterations: tab.iterations,
    })
}

impl<'a> Tableau<'a> {
    fn new(objective: &[f64], rows: &'a [LpRow], lower: &[f64], upper: &[f64]) -> Self {
        let n = objective.len();
        let m = rows.len();
        let ncols = n + m;
        let total = n + 2 * m;

        let mut lo = Vec::with_capacity(total);
        let mut up = Vec::with_capacity(total);
        lo.extend_from_slice(lower);
        up.extend_from_slice(upper);
        lo.resize(total, 0.0);
        up.resize(total, f64::INFINITY);

        let mut at_upper = alloc::vec![false; total];
        for j in 0..n {
            at_upper[j] = objective[j] < 0.0 && up[j].is_finite();
        }

        let mut tab = Tableau {
            rows,
            m,
            n,
            ncols,
            t: alloc::vec![0.0; m * ncols],
            beta: alloc::vec![0.0; m],
            basis: alloc::vec![0; m],
            is_basic: alloc::vec![false; total],
            lower: lo,
            upper: up,
            at_upper,
            cost: alloc::vec![0.0; total],
            d: alloc::vec![0.0; ncols],
            iterations: 0,
            degenerate: 0,
            degenerate_limit: 3 * (m + n),
            bland: false,
        };

        for (i, row) in rows.iter().enumerate() {
            let mut residual = row.rhs;
            for &(j, a) in &row.coeffs {
                residual -= a * tab.value(j);
            }
            let (sign, basic) = if residual >= 0.0 {
                (1.0, n + i)
            } else {
                (-1.0, n + m + i)
            };
            let r = &mut tab.t[i * ncols..(i + 1) * ncols];
            for &(j, a) in &row.coeffs {
                r[j] += sign * a;
            }
            r[n + i] = sign;
            tab.beta[i] = sign * residual;
            tab.basis[i] = basic;
            tab.is_basic[basic] = true;
        }
        tab
    }

    fn is_artificial(&self, k: usize) -> bool {
        k >= self.n + self.m
    }

    /// Current value of a nonbasic variable.
    fn value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            self.lower[j]
        }
    }

    fn set_phase_costs(&mut self, phase: Phase, objective: &[f64]) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        match phase {
            Phase::One => {
                for i in 0..self.m {
                    self.cost[self.n + self.m + i] = 1.0;
                }
            }
            Phase::Two => self.cost[..self.n].copy_from_slice(objective),
        }
        self.recompute_reduced_costs();
    }

    fn recompute_reduced_costs(&mut self) {
        self.d.copy_from_slice(&self.cost[..self.ncols]);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
            for (dj, &tij) in self.d.iter_mut().zip(row) {
                *dj -= cb * tij;
            }
        }
        for j in 0..self.ncols {
            if self.is_basic[j] {
                self.d[j] = 0.0;
            }
        }
    }

    /// Recomputes basic values from scratch: `β = B⁻¹(b − N·x_N)`. The slack
    /// columns of the tableau hold `B⁻¹`.
    fn refresh_beta(&mut self) {
        let mut residual: Vec<f64> = Vec::with_capacity(self.m);
        for (i, row) in self.rows.iter().enumerate() {
            let mut r = row.rhs;
            for &(j, a) in &row.coeffs {
                if !self.is_basic[j] {
                    r -= a * self.value(j);
                }
            }
            let slack = self.n + i;
            if !self.is_basic[slack] {
                r -= self.value(slack);
            }
            residual.push(r);
        }
        for k in 0..self.m {
            let row = &self.t[k * self.ncols + self.n..(k + 1) * self.ncols];
            self.beta[k] = row.iter().zip(&residual).map(|(b, r)| b * r).sum();
        }
    }

    fn run(&mut self) -> Result<Step, SolveError> {
        let mut since_refresh = 0;
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(SolveError::IterationLimit {
                    iterations: self.iterations,
                });
            }
            match self.iterate() {
                Step::Continue => {}
                done => return Ok(done),
            }
            self.iterations += 1;
            since_refresh += 1;
            if since_refresh >= REFRESH_EVERY {
                since_refresh = 0;
                self.refresh_beta();
            }
        }
    }

    fn choose_entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.ncols {
            if self.is_basic[j] || self.lower[j] == self.upper[j] {
                continue;
            }
            let dj = self.d[j];
            let (eligible, dir, score) = if self.at_upper[j] {
                (dj > OPT_TOL, -1.0, dj)
            } else {
                (dj < -OPT_TOL, 1.0, -dj)
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some((j, dir));
            }
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    fn iterate(&mut self) -> Step {
        let (q, dir) = match self.choose_entering() {
            Some(choice) => choice,
            None => {
                // Confirm optimality against freshly computed reduced costs.
                self.recompute_reduced_costs();
                match self.choose_entering() {
                    Some(choice) => choice,
                    None => return Step::Optimal,
                }
            }
        };

        let ncols = self.ncols;
        let mut theta = self.upper[q] - self.lower[q];
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let alpha = dir * self.t[i * ncols + q];
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let k = self.basis[i];
            let limit = if alpha > 0.0 {
                ((self.beta[i] - self.lower[k]) / alpha).max(0.0)
            } else if self.upper[k].is_finite() {
                ((self.upper[k] - self.beta[i]) / -alpha).max(0.0)
            } else {
                continue;
            };
            let better = match leave {
                _ if limit < theta - 1e-12 => true,
                None => limit <= theta,
                Some((r, a)) if limit <= theta + 1e-12 => {
                    if self.bland {
                        k < self.basis[r]
                    } else {
                        alpha.abs() > a.abs()
                    }
                }
                Some(_) => false,
            };
            if better {
                theta = theta.min(limit);
                leave = Some((i, alpha));
            }
        }
        if theta.is_infinite() {
            return Step::Unbounded;
        }
        if theta <= DEGENERATE_STEP {
            self.degenerate += 1;
            if self.degenerate > self.degenerate_limit {
                self.bland = true;
            }
        }

        if theta > 0.0 {
            for i in 0..self.m {
                let tiq = self.t[i * ncols + q];
                if tiq != 0.0 {
                    self.beta[i] -= dir * theta * tiq;
                }
            }
        }

        match leave {
            None => {
                self.at_upper[q] = !self.at_upper[q];
            }
            Some((r, alpha)) => {
                let entering_value = self.value(q) + dir * theta;
                let k = self.basis[r];
                self.is_basic[k] = false;
                self.at_upper[k] = alpha < 0.0;
                if self.is_artificial(k) {
                    self.upper[k] = 0.0;
                    self.at_upper[k] = false;
                }
                self.pivot(r, q);
                self.basis[r] = q;
                self.is_basic[q] = true;
                self.at_upper[q] = false;
                self.beta[r] = entering_value;
            }
        }
        Step::Continue
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let ncols = self.ncols;
        let (before, rest) = self.t.split_at_mut(r * ncols);
        let (prow, after) = rest.split_at_mut(ncols);

        let inv = 1.0 / prow[q];
        for v in prow.iter_mut() {
            *v *= inv;
        }
        prow[q] = 1.0;

        let nz: Vec<usize> = (0..ncols).filter(|&j| prow[j] != 0.0).collect();
        let sparse = nz.len() * 3 < ncols;
        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f == 0.0 {
                return;
            }
            if sparse {
                for &j in &nz {
                    row[j] -= f * prow[j];
                }
            } else {
                for (x, &p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
            }
            row[q] = 0.0;
        };
        for row in before.chunks_exact_mut(ncols) {
            eliminate(row);
        }
        for row in after.chunks_exact_mut(ncols) {
            eliminate(row);
        }
        eliminate(&mut self.d);
    }

    fn point(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.n).map(|j| self.value(j)).collect();
        for (i, &k) in self.basis.iter().enumerate() {
            if k < self.n {
                x[k] = self.beta[i].clamp(self.lower[k], self.upper[k]);
            }
        }
        x
    }
}
