//! Alternating projection baseline for projection-type problems: feasible
//! but generally suboptimal.

use super::{finish, is_converged, AffineProjector, RunClock, SolveOptions, SolveReport, Termination, TraceRecord};
use crate::dualcore::DualProblem;
use crate::{Error, Result};

/// Alternates the exact affine projection with the set projection from
/// `x0 = z`, stopping once the set-projected iterate is feasible to `tol`.
pub fn solve_altproj(p: &DualProblem, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    if !p.prox().is_projection() {
        return Err(Error::Unsupported(
            "alternating projection requires an indicator prox kind".into(),
        ));
    }
    let clock = RunClock::new(opts.time_limit_secs);
    let projector = AffineProjector::new(p.map(), p.b())?;
    let shape = p.shape();

    let mut x = p.z().clone();
    let mut r_feas = p.residuals(&x, None)?.feas;
    let mut trace = vec![TraceRecord {
        iter: 0,
        phi: p.primal_objective(&x),
        grad_norm: 0.0,
        r_feas,
        elapsed_s: clock.elapsed(),
    }];
    if is_converged(p, r_feas, &x, opts.tol) {
        return finish("altproj", p, None, x, Termination::Converged, trace, &clock);
    }

    for k in 1..=opts.iter_limit {
        if clock.expired() {
            return finish("altproj", p, None, x, Termination::TimeLimit, trace, &clock);
        }
        let on_affine = projector.project(&x)?;
        x = p.prox().eval(&on_affine, shape)?.point;

        r_feas = p.residuals(&x, None)?.feas;
        trace.push(TraceRecord {
            iter: k,
            phi: p.primal_objective(&x),
            grad_norm: (&x - &on_affine).norm(),
            r_feas,
            elapsed_s: clock.elapsed(),
        });
        if r_feas < opts.tol {
            return finish("altproj", p, None, x, Termination::Converged, trace, &clock);
        }
    }
    finish("altproj", p, None, x, Termination::IterLimit, trace, &clock)
}
