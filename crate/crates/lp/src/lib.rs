//! Dense two-phase simplex solver for linear programs with few decision
//! variables and a very large number of constraints (the shape produced by
//! least-core problems: up to ~65k inequality rows over at most ~25 variables).
//!
//! Problems of that shape cannot be pivoted on directly — a primal tableau
//! would be quadratic in the constraint count — so [`Simplex`] pivots on the
//! dual, whose tableau has one row per *variable* and one column per
//! constraint. The primal solution is read off the optimal dual multipliers
//! and independently re-verified against every input constraint before being
//! returned.
//!
//! Pivot selection is deterministic: largest reduced-cost improvement with
//! lowest-index tie-breaking, switching permanently to Bland's rule when a
//! run of degenerate pivots is detected. Identical problems therefore produce
//! bit-identical solutions.

mod problem;
mod solver;

pub use problem::{Constraint, LpProblem, Relation};
pub use solver::{LpError, LpSolution, LpStatus, Simplex};
