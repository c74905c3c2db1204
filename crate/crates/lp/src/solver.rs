use thiserror::Error;

use crate::problem::{LpProblem, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. `x`, `objective_value` and `tight_constraints` are
/// meaningful only when `status == Optimal`; otherwise `x` is empty.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
    /// Indices of input constraints with slack below the feasibility
    /// tolerance at the returned point.
    pub tight_constraints: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    BadProblem(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

/// Deterministic dense simplex. See the crate docs for the dualization
/// strategy; all tolerances are absolute.
#[derive(Debug, Clone)]
pub struct Simplex {
    /// Constraint satisfaction tolerance for returned points (1e-7).
    pub feas_tol: f64,
    /// Reduced-cost threshold below which a column may enter.
    pub opt_tol: f64,
    /// Minimum acceptable pivot magnitude in the ratio test.
    pub pivot_tol: f64,
    /// Hard iteration cap across both phases.
    pub max_iters: usize,
}

impl Default for Simplex {
    fn default() -> Self {
        Simplex {
            feas_tol: 1e-7,
            opt_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iters: 10_000,
        }
    }
}

/// Pivots with a ratio below this count as degenerate; a long run of them
/// triggers the switch to Bland's rule.
const DEGENERATE_RATIO: f64 = 1e-10;
const DEGENERATE_RUN_LIMIT: u32 = 50;
/// Pivot magnitudes below this are a numerical breakdown.
const BREAKDOWN_TOL: f64 = 1e-12;

struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

enum DualOutcome {
    /// Primal optimum recovered from the dual multipliers.
    Optimal(Vec<f64>),
    /// Dual infeasible: the primal is unbounded or infeasible.
    DualInfeasible,
    /// Dual unbounded: the primal is infeasible.
    DualUnbounded,
}

impl Simplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&self, problem: &LpProblem) -> Result<LpSolution, LpError> {
        problem.validate().map_err(LpError::BadProblem)?;
        let rows = rows_with_bounds(problem);

        match self.solve_via_dual(&problem.objective, &rows)? {
            DualOutcome::Optimal(x) => {
                let (objective_value, tight_constraints) = self.certify(problem, &rows, &x)?;
                Ok(LpSolution {
                    x,
                    objective_value,
                    status: LpStatus::Optimal,
                    tight_constraints,
                })
            }
            DualOutcome::DualUnbounded => Ok(not_optimal(LpStatus::Infeasible)),
            DualOutcome::DualInfeasible => {
                // The dual tells us nothing more; decide between Infeasible
                // and Unbounded with an auxiliary LP: min t subject to every
                // row relaxed by t, t >= 0. Feasible and bounded by
                // construction, and t* = 0 iff the original rows admit a
                // feasible point.
                let n = problem.num_vars();
                let mut aux_rows = Vec::with_capacity(2 * rows.len() + 1);
                for row in &rows {
                    let mut ge = row.coeffs.clone();
                    ge.push(1.0);
                    aux_rows.push(Row {
                        coeffs: ge,
                        relation: Relation::Ge,
                        rhs: row.rhs,
                    });
                    if row.relation == Relation::Eq {
                        let mut flipped: Vec<f64> = row.coeffs.iter().map(|c| -c).collect();
                        flipped.push(1.0);
                        aux_rows.push(Row {
                            coeffs: flipped,
                            relation: Relation::Ge,
                            rhs: -row.rhs,
                        });
                    }
                }
                let mut t_nonneg = vec![0.0; n + 1];
                t_nonneg[n] = 1.0;
                aux_rows.push(Row {
                    coeffs: t_nonneg,
                    relation: Relation::Ge,
                    rhs: 0.0,
                });
                let mut aux_obj = vec![0.0; n + 1];
                aux_obj[n] = 1.0;

                match self.solve_via_dual(&aux_obj, &aux_rows)? {
                    DualOutcome::Optimal(xt) => {
                        if xt[n] <= self.feas_tol {
                            Ok(not_optimal(LpStatus::Unbounded))
                        } else {
                            Ok(not_optimal(LpStatus::Infeasible))
                        }
                    }
                    _ => Err(LpError::NumericalBreakdown(
                        "auxiliary feasibility LP did not reach an optimum".into(),
                    )),
                }
            }
        }
    }

    /// Run the two-phase simplex on the dual of `min objective . x` over
    /// `rows`. The dual has one equality row per primal variable and one
    /// column per Ge row (two per Eq row), all nonnegative.
    fn solve_via_dual(&self, objective: &[f64], rows: &[Row]) -> Result<DualOutcome, LpError> {
        let n = objective.len();

        // Column j of the dual is sign * rows[row].coeffs with cost
        // -sign * rows[row].rhs (maximizing b'y as a minimization).
        let mut col_row: Vec<usize> = Vec::new();
        let mut col_sign: Vec<f64> = Vec::new();
        let mut col_cost: Vec<f64> = Vec::new();
        for (j, row) in rows.iter().enumerate() {
            col_row.push(j);
            col_sign.push(1.0);
            col_cost.push(-row.rhs);
            if row.relation == Relation::Eq {
                col_row.push(j);
                col_sign.push(-1.0);
                col_cost.push(row.rhs);
            }
        }
        let ncols = col_row.len();
        let art0 = ncols; // artificial column block
        let rhs_col = ncols + n;
        let width = ncols + n + 1;

        // Flip rows so the right-hand side (the primal objective) is
        // nonnegative; the flip signs are needed to read the multipliers back.
        let flip: Vec<f64> = objective
            .iter()
            .map(|&c| if c < 0.0 { -1.0 } else { 1.0 })
            .collect();

        let mut tab: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut row = vec![0.0; width];
            for j in 0..ncols {
                row[j] = flip[i] * col_sign[j] * rows[col_row[j]].coeffs[i];
            }
            row[art0 + i] = 1.0;
            row[rhs_col] = flip[i] * objective[i];
            tab.push(row);
        }
        // Objective row (reduced costs); phase 1 minimizes the artificial sum.
        let mut obj = vec![0.0; width];
        for j in 0..width {
            if j >= art0 && j < art0 + n {
                continue; // artificial reduced costs start at zero
            }
            let mut s = 0.0;
            for row in tab.iter() {
                s += row[j];
            }
            obj[j] = -s;
        }
        tab.push(obj);

        let mut state = Dual {
            tab,
            basis: (art0..art0 + n).collect(),
            eligible: vec![true; ncols + n],
            n,
            ncols,
            art0,
            rhs_col,
            width,
            bland: false,
            degen_run: 0,
            iters: 0,
            cfg: self,
        };

        // Phase 1.
        if state.run_phase()? == PhaseEnd::Unbounded {
            // The artificial objective is bounded below by zero.
            return Err(LpError::NumericalBreakdown(
                "phase-1 objective reported unbounded".into(),
            ));
        }
        let phase1_obj = -state.tab[n][rhs_col];
        if phase1_obj > self.feas_tol {
            return Ok(DualOutcome::DualInfeasible);
        }
        state.drive_out_artificials()?;

        // Phase 2: artificial columns stay in the tableau (their reduced
        // costs at optimality are the primal multipliers) but never enter.
        for a in 0..n {
            state.eligible[art0 + a] = false;
        }
        state.reset_objective(&col_cost);
        state.bland = false;
        state.degen_run = 0;
        if state.run_phase()? == PhaseEnd::Unbounded {
            return Ok(DualOutcome::DualUnbounded);
        }

        // x*_i = flip_i * (reduced cost of artificial column i).
        let x: Vec<f64> = (0..n).map(|i| flip[i] * state.tab[n][art0 + i]).collect();
        Ok(DualOutcome::Optimal(x))
    }

    /// Re-check the candidate optimum against every row of the input; the
    /// tableau arithmetic is not trusted.
    fn certify(
        &self,
        problem: &LpProblem,
        rows: &[Row],
        x: &[f64],
    ) -> Result<(f64, Vec<usize>), LpError> {
        for (j, row) in rows.iter().enumerate() {
            let slack = dot(&row.coeffs, x) - row.rhs;
            let ok = match row.relation {
                Relation::Ge => slack >= -self.feas_tol,
                Relation::Eq => slack.abs() <= self.feas_tol,
            };
            if !ok {
                return Err(LpError::NumericalBreakdown(format!(
                    "recovered point violates row {} by {:.3e}",
                    j,
                    slack.abs()
                )));
            }
        }
        let tight = problem
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, con)| {
                let slack = dot(&con.coeffs, x) - con.rhs;
                slack.abs() <= self.feas_tol
            })
            .map(|(j, _)| j)
            .collect();
        Ok((dot(&problem.objective, x), tight))
    }
}

#[derive(PartialEq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Dual<'a> {
    tab: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    eligible: Vec<bool>,
    n: usize,
    ncols: usize,
    art0: usize,
    rhs_col: usize,
    width: usize,
    bland: bool,
    degen_run: u32,
    iters: usize,
    cfg: &'a Simplex,
}

impl Dual<'_> {
    fn run_phase(&mut self) -> Result<PhaseEnd, LpError> {
        loop {
            self.iters += 1;
            if self.iters > self.cfg.max_iters {
                return Err(LpError::IterationLimit);
            }
            let Some(entering) = self.pick_entering() else {
                return Ok(PhaseEnd::Optimal);
            };
            let Some(leaving_row) = self.pick_leaving(entering)? else {
                return Ok(PhaseEnd::Unbounded);
            };
            self.pivot(leaving_row, entering)?;
        }
    }

    fn pick_entering(&self) -> Option<usize> {
        let obj = &self.tab[self.n];
        if self.bland {
            (0..self.ncols + self.n).find(|&j| self.eligible[j] && obj[j] < -self.cfg.opt_tol)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for (j, &z) in obj.iter().enumerate().take(self.ncols + self.n) {
                if !self.eligible[j] || z >= -self.cfg.opt_tol {
                    continue;
                }
                match best {
                    Some((_, v)) if z >= v => {}
                    _ => best = Some((j, z)),
                }
            }
            best.map(|(j, _)| j)
        }
    }

    /// Minimum-ratio test; ties broken by smallest basic-variable index
    /// (Bland-compatible).
    fn pick_leaving(&mut self, entering: usize) -> Result<Option<usize>, LpError> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.n {
            let t = self.tab[i][entering];
            if t <= self.cfg.pivot_tol {
                continue;
            }
            let ratio = (self.tab[i][self.rhs_col] / t).max(0.0);
            match best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi])
                    {
                        best = Some((i, ratio));
                    }
                }
            }
        }
        let Some((row, ratio)) = best else {
            return Ok(None);
        };
        if ratio <= DEGENERATE_RATIO {
            self.degen_run += 1;
            if self.degen_run > DEGENERATE_RUN_LIMIT {
                self.bland = true;
            }
        } else {
            self.degen_run = 0;
        }
        Ok(Some(row))
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), LpError> {
        let pivot = self.tab[row][col];
        if pivot.abs() < BREAKDOWN_TOL {
            return Err(LpError::NumericalBreakdown(format!(
                "pivot magnitude {:.3e} below {:.0e}",
                pivot.abs(),
                BREAKDOWN_TOL
            )));
        }
        let inv = 1.0 / pivot;
        for v in self.tab[row].iter_mut() {
            *v *= inv;
        }
        self.tab[row][col] = 1.0;
        for r in 0..=self.n {
            if r == row {
                continue;
            }
            let factor = self.tab[r][col];
            if factor == 0.0 {
                continue;
            }
            // Split borrow: pivot row is disjoint from row r.
            let (pivot_row, target) = if r < row {
                let (lo, hi) = self.tab.split_at_mut(row);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = self.tab.split_at_mut(r);
                (&lo[row], &mut hi[0])
            };
            for j in 0..self.width {
                target[j] -= factor * pivot_row[j];
            }
            target[col] = 0.0;
        }
        let leaving = self.basis[row];
        // An artificial that leaves the basis never returns.
        if leaving >= self.art0 {
            self.eligible[leaving] = false;
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Pivot remaining basic artificials onto real columns where possible;
    /// rows that offer no pivot are redundant and keep their artificial
    /// pinned at zero.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        for i in 0..self.n {
            if self.basis[i] < self.art0 {
                continue;
            }
            let col = (0..self.ncols)
                .find(|&j| self.eligible[j] && self.tab[i][j].abs() > self.cfg.pivot_tol);
            if let Some(col) = col {
                self.pivot(i, col)?;
            }
        }
        Ok(())
    }

    /// Rebuild the reduced-cost row for the given per-column costs
    /// (artificials cost zero).
    fn reset_objective(&mut self, col_cost: &[f64]) {
        let cost_of = |j: usize| -> f64 {
            if j < self.ncols {
                col_cost[j]
            } else {
                0.0
            }
        };
        let mut obj = vec![0.0; self.width];
        for (j, o) in obj.iter_mut().enumerate().take(self.width) {
            if j == self.rhs_col {
                continue;
            }
            *o = cost_of(j);
        }
        let mut obj_rhs = 0.0;
        for i in 0..self.n {
            let cb = cost_of(self.basis[i]);
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[i];
            for (j, (o, t)) in obj.iter_mut().zip(row).enumerate() {
                if j != self.rhs_col {
                    *o -= cb * t;
                }
            }
            obj_rhs -= cb * row[self.rhs_col];
        }
        obj[self.rhs_col] = obj_rhs;
        // Basic columns must price out to exactly zero.
        for i in 0..self.n {
            obj[self.basis[i]] = 0.0;
        }
        self.tab[self.n] = obj;
    }
}

fn not_optimal(status: LpStatus) -> LpSolution {
    LpSolution {
        x: Vec::new(),
        objective_value: 0.0,
        status,
        tight_constraints: Vec::new(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Expand per-variable bounds into plain Ge rows appended after the input
/// constraints, leaving every variable free.
fn rows_with_bounds(problem: &LpProblem) -> Vec<Row> {
    let n = problem.num_vars();
    let mut rows: Vec<Row> = problem
        .constraints
        .iter()
        .map(|c| Row {
            coeffs: c.coeffs.clone(),
            relation: c.relation,
            rhs: c.rhs,
        })
        .collect();
    for (i, &(lower, upper)) in problem.bounds.iter().enumerate() {
        if let Some(lo) = lower {
            let mut coeffs = vec![0.0; n];
            coeffs[i] = 1.0;
            rows.push(Row {
                coeffs,
                relation: Relation::Ge,
                rhs: lo,
            });
        }
        if let Some(up) = upper {
            let mut coeffs = vec![0.0; n];
            coeffs[i] = -1.0;
            rows.push(Row {
                coeffs,
                relation: Relation::Ge,
                rhs: -up,
            });
        }
    }
    rows
}
