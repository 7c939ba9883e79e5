//! Two-block ADMM on the primal problem with an adaptive penalty.
//!
//! Consensus split of `min lambda f(x) + 1/2 ||w - z||^2` subject to
//! `A w = b`, `x = w`:
//! the x-step is `Prox_{lambda f / rho}(w - u)`, the w-step minimizes its
//! quadratic exactly and projects onto the affine set through a one-time
//! factorization of `A A*`, and the scaled dual `u` accumulates `x - w`.
//! The penalty follows the usual residual-balancing rule: `rho` scales by
//! `tau` whenever one residual exceeds `mu` times the other, rescaling `u`
//! accordingly.

use nalgebra::DVector;

use super::{finish, is_converged, AffineProjector, RunClock, SolveOptions, SolveReport, Termination, TraceRecord};
use crate::dualcore::DualProblem;
use crate::Result;

pub fn solve_admm(p: &DualProblem, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let clock = RunClock::new(opts.time_limit_secs);
    let projector = AffineProjector::new(p.map(), p.b())?;
    let shape = p.shape();
    let lambda = p.lambda();

    let mut rho = opts.admm_rho0;
    let mut w = projector.project(p.z())?;
    let mut u = DVector::zeros(shape.len());
    let mut x = p.prox().eval_scaled(&(&w - &u), shape, lambda / rho)?.point;

    let mut r_feas = p.residuals(&x, None)?.feas;
    let mut trace = vec![TraceRecord {
        iter: 0,
        phi: p.primal_objective(&x),
        grad_norm: (&x - &w).norm(),
        r_feas,
        elapsed_s: clock.elapsed(),
    }];
    if is_converged(p, r_feas, &x, opts.tol) {
        return finish("admm", p, None, x, Termination::Converged, trace, &clock);
    }

    for k in 1..=opts.iter_limit {
        if clock.expired() {
            return finish("admm", p, None, x, Termination::TimeLimit, trace, &clock);
        }

        // w-step: exact minimizer of 1/2||w - z||^2 + rho/2||x - w + u||^2
        // restricted to the affine set (the quadratic is isotropic, so
        // projecting its unconstrained minimizer is exact).
        let w_prev = w.clone();
        let wbar = (p.z() + (&x + &u) * rho) / (1.0 + rho);
        w = projector.project(&wbar)?;
        u += &x - &w;

        x = p.prox().eval_scaled(&(&w - &u), shape, lambda / rho)?.point;

        let r_primal = (&x - &w).norm();
        let r_dual = rho * (&w - &w_prev).norm();
        if r_primal > opts.admm_mu * r_dual {
            rho *= opts.admm_tau;
            u /= opts.admm_tau;
        } else if r_dual > opts.admm_mu * r_primal {
            rho /= opts.admm_tau;
            u *= opts.admm_tau;
        }

        r_feas = p.residuals(&x, None)?.feas;
        trace.push(TraceRecord {
            iter: k,
            phi: p.primal_objective(&x),
            grad_norm: r_primal,
            r_feas,
            elapsed_s: clock.elapsed(),
        });
        if is_converged(p, r_feas, &x, opts.tol) {
            return finish("admm", p, None, x, Termination::Converged, trace, &clock);
        }
    }
    finish("admm", p, None, x, Termination::IterLimit, trace, &clock)
}
