//! Dual and primal solvers with a shared stopping rule: a run converges
//! once the recovered point satisfies `x in dom f` and
//! `||A x - b|| / (1 + ||b||) < tol`.
//!
//! Dual methods (`solve_gd_bb`, `solve_lbfgs`, `solve_ssn`) minimize the
//! convex dual and recover the primal through the prox; primal methods
//! (`solve_admm`, `solve_altproj`) work on the constrained problem
//! directly. All solves are single-threaded and deterministic.

mod admm;
mod altproj;
mod gd_bb;
mod lbfgs;
mod ssn;

pub use admm::solve_admm;
pub use altproj::solve_altproj;
pub use gd_bb::solve_gd_bb;
pub use lbfgs::solve_lbfgs;
pub use ssn::solve_ssn;

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::dualcore::{DualProblem, Residuals};
use crate::{Error, Result};

const MAX_BACKTRACKS: usize = 50;

/// Rounding allowance for line-search acceptance tests. Near machine
/// precision the true decrease of the dual value falls below the evaluation
/// noise of `Phi_z` (a few ulps of its constituent terms, which largely
/// cancel), so an exact Armijo comparison would reject every step and
/// freeze the iterate; slack of that size keeps the methods moving down to
/// feasibility residuals of order 1e-14.
pub(crate) fn armijo_allowance(phi_ref: f64, objective_scale: f64) -> f64 {
    16.0 * f64::EPSILON * (1.0 + phi_ref.abs() + objective_scale)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub tol: f64,
    pub time_limit_secs: f64,
    pub iter_limit: usize,
    /// Armijo sufficient-decrease parameter.
    pub armijo_gamma: f64,
    /// Backtracking shrink factor.
    pub backtrack_sigma: f64,
    /// Reference window of the nonmonotone line search (GD-BB).
    pub nonmonotone_memory: usize,
    pub lbfgs_memory: usize,
    /// Clamp for the Barzilai-Borwein stepsize.
    pub bb_safeguard: (f64, f64),
    /// CG tolerance relative to `||F(y)||` in the Newton system.
    pub ssn_cg_tol: f64,
    /// Cap of the Newton regularization `eps = min(cap, ||F(y)||)`.
    pub ssn_reg: f64,
    pub admm_rho0: f64,
    /// Relative ratio triggering a penalty update.
    pub admm_mu: f64,
    /// Penalty scaling factor.
    pub admm_tau: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-6,
            time_limit_secs: 600.0,
            iter_limit: 1000,
            armijo_gamma: 1e-4,
            backtrack_sigma: 0.5,
            nonmonotone_memory: 10,
            lbfgs_memory: 10,
            bb_safeguard: (1e-10, 1e10),
            ssn_cg_tol: 1e-2,
            ssn_reg: 0.1,
            admm_rho0: 1.0,
            admm_mu: 10.0,
            admm_tau: 2.0,
            seed: 0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(Error::invalid("tol must be positive"));
        }
        if self.iter_limit == 0 || self.time_limit_secs <= 0.0 || self.time_limit_secs.is_nan() {
            return Err(Error::invalid("iteration and time limits must be positive"));
        }
        if !(self.armijo_gamma > 0.0 && self.armijo_gamma < 1.0) {
            return Err(Error::invalid("armijo_gamma must lie in (0, 1)"));
        }
        if !(self.backtrack_sigma > 0.0 && self.backtrack_sigma < 1.0) {
            return Err(Error::invalid("backtrack_sigma must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    IterLimit,
    TimeLimit,
    LineSearchFail,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::Converged => "converged",
            Termination::IterLimit => "iter_limit",
            Termination::TimeLimit => "time_limit",
            Termination::LineSearchFail => "line_search_fail",
        };
        f.write_str(s)
    }
}

/// One row of a per-iteration trace. For dual solvers `phi` is the dual
/// objective and `grad_norm = ||A x - b||`; primal solvers record the primal
/// objective and their own progress measure (consensus residual for ADMM,
/// projection displacement for AltProj).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub phi: f64,
    pub grad_norm: f64,
    pub r_feas: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solver: String,
    /// Final multiplier for dual methods.
    pub y: Option<DVector<f64>>,
    /// Recovered primal point.
    pub x: DVector<f64>,
    pub residuals: Residuals,
    /// Completed iterations; the trace has one extra record for iterate 0.
    pub iterations: usize,
    pub wall_time_secs: f64,
    pub termination: Termination,
    pub trace: Vec<TraceRecord>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Exact projection onto `{x : A x = b}` through a one-time Cholesky
/// factorization of `A A*`.
pub struct AffineProjector<'a> {
    map: &'a crate::linmap::LinearMap,
    b: &'a DVector<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl<'a> AffineProjector<'a> {
    pub fn new(map: &'a crate::linmap::LinearMap, b: &'a DVector<f64>) -> Result<Self> {
        let gram: DMatrix<f64> = map.gram_matrix();
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::Numerical("gram matrix is not positive definite".into()))?;
        Ok(AffineProjector { map, b, chol })
    }

    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let resid = self.map.apply(x)? - self.b;
        let corr = self.chol.solve(&resid);
        Ok(x - self.map.adjoint(&corr)?)
    }
}

pub(crate) struct RunClock {
    start: Instant,
    limit: f64,
}

impl RunClock {
    pub(crate) fn new(limit_secs: f64) -> Self {
        RunClock { start: Instant::now(), limit: limit_secs }
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub(crate) fn expired(&self) -> bool {
        self.elapsed() >= self.limit
    }
}

/// Tolerance-level convergence of a candidate primal point.
pub(crate) fn is_converged(p: &DualProblem, r_feas: f64, x: &DVector<f64>, tol: f64) -> bool {
    r_feas < tol && p.in_domain(x)
}

pub(crate) fn finish(
    solver: &str,
    p: &DualProblem,
    y: Option<DVector<f64>>,
    x: DVector<f64>,
    termination: Termination,
    trace: Vec<TraceRecord>,
    clock: &RunClock,
) -> Result<SolveReport> {
    let residuals = p.residuals(&x, None)?;
    Ok(SolveReport {
        solver: solver.to_string(),
        y,
        x,
        residuals,
        iterations: trace.len().saturating_sub(1),
        wall_time_secs: clock.elapsed(),
        termination,
        trace,
    })
}
