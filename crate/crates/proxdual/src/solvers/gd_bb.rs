//! Gradient descent on the dual with Barzilai-Borwein stepsizes and a
//! nonmonotone Armijo line search.

use std::collections::VecDeque;

use nalgebra::DVector;

use super::{armijo_allowance, finish, is_converged, RunClock, SolveOptions, SolveReport, Termination, TraceRecord, MAX_BACKTRACKS};
use crate::dualcore::DualProblem;
use crate::Result;

/// BB1 stepsize `<s, s> / <s, u>` clamped into the safeguard interval; the
/// first step uses `1 / (1 + ||g0||)`. A trial step is accepted once the
/// dual value drops below the maximum of the last `nonmonotone_memory`
/// values minus the Armijo allowance.
pub fn solve_gd_bb(p: &DualProblem, opts: &SolveOptions, y0: &DVector<f64>) -> Result<SolveReport> {
    opts.validate()?;
    let clock = RunClock::new(opts.time_limit_secs);
    let b_scale = 1.0 + p.b().norm();

    let mut y = y0.clone();
    let (mut phi, mut g, mut x, _) = p.value_and_grad(&y)?;
    let mut r_feas = g.norm() / b_scale;
    let mut trace = vec![TraceRecord {
        iter: 0,
        phi,
        grad_norm: g.norm(),
        r_feas,
        elapsed_s: clock.elapsed(),
    }];
    if is_converged(p, r_feas, &x, opts.tol) {
        return finish("gd_bb", p, Some(y), x, Termination::Converged, trace, &clock);
    }

    let mut hist: VecDeque<f64> = VecDeque::with_capacity(opts.nonmonotone_memory);
    hist.push_back(phi);
    let mut pair: Option<(DVector<f64>, DVector<f64>)> = None; // (s, u)

    for k in 1..=opts.iter_limit {
        if clock.expired() {
            return finish("gd_bb", p, Some(y), x, Termination::TimeLimit, trace, &clock);
        }

        let alpha = match &pair {
            None => 1.0 / (1.0 + g.norm()),
            Some((s, u)) => {
                let raw = s.norm_squared() / s.dot(u);
                if raw.is_finite() && raw > 0.0 {
                    raw.clamp(opts.bb_safeguard.0, opts.bb_safeguard.1)
                } else {
                    opts.bb_safeguard.1
                }
            }
        };

        let f_ref = hist.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let gg = g.norm_squared();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let y_new = &y - &g * (t * alpha);
            let (phi_new, g_new, x_new, _) = p.value_and_grad(&y_new)?;
            if phi_new <= f_ref - opts.armijo_gamma * t * alpha * gg + armijo_allowance(f_ref, p.objective_scale()) {
                accepted = Some((y_new, phi_new, g_new, x_new));
                break;
            }
            t *= opts.backtrack_sigma;
        }
        let Some((y_new, phi_new, g_new, x_new)) = accepted else {
            return finish("gd_bb", p, Some(y), x, Termination::LineSearchFail, trace, &clock);
        };

        pair = Some((&y_new - &y, &g_new - &g));
        y = y_new;
        phi = phi_new;
        g = g_new;
        x = x_new;
        if hist.len() == opts.nonmonotone_memory.max(1) {
            hist.pop_front();
        }
        hist.push_back(phi);

        r_feas = g.norm() / b_scale;
        trace.push(TraceRecord {
            iter: k,
            phi,
            grad_norm: g.norm(),
            r_feas,
            elapsed_s: clock.elapsed(),
        });
        if is_converged(p, r_feas, &x, opts.tol) {
            return finish("gd_bb", p, Some(y), x, Termination::Converged, trace, &clock);
        }
    }
    finish("gd_bb", p, Some(y), x, Termination::IterLimit, trace, &clock)
}
