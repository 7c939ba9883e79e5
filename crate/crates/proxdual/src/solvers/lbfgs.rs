//! Limited-memory BFGS on the dual with Armijo backtracking.

use std::collections::VecDeque;

use nalgebra::DVector;

use super::{armijo_allowance, finish, is_converged, RunClock, SolveOptions, SolveReport, Termination, TraceRecord, MAX_BACKTRACKS};
use crate::dualcore::DualProblem;
use crate::Result;

struct Pair {
    s: DVector<f64>,
    u: DVector<f64>,
    rho: f64,
}

/// Two-loop recursion for `-H g` with the usual `<s,u>/<u,u>` initial
/// scaling from the newest pair.
fn two_loop(g: &DVector<f64>, memory: &VecDeque<Pair>) -> DVector<f64> {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(memory.len());
    for pair in memory.iter().rev() {
        let a = pair.rho * pair.s.dot(&q);
        q -= &pair.u * a;
        alphas.push(a);
    }
    let gamma = memory
        .back()
        .map(|p| p.s.dot(&p.u) / p.u.norm_squared())
        .filter(|g| g.is_finite() && *g > 0.0)
        .unwrap_or(1.0);
    let mut r = q * gamma;
    for (pair, a) in memory.iter().zip(alphas.into_iter().rev()) {
        let beta = pair.rho * pair.u.dot(&r);
        r += &pair.s * (a - beta);
    }
    -r
}

pub fn solve_lbfgs(p: &DualProblem, opts: &SolveOptions, y0: &DVector<f64>) -> Result<SolveReport> {
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
        return finish("lbfgs", p, Some(y), x, Termination::Converged, trace, &clock);
    }

    let mut memory: VecDeque<Pair> = VecDeque::with_capacity(opts.lbfgs_memory);

    for k in 1..=opts.iter_limit {
        if clock.expired() {
            return finish("lbfgs", p, Some(y), x, Termination::TimeLimit, trace, &clock);
        }

        let mut d = two_loop(&g, &memory);
        let mut slope = g.dot(&d);
        if slope >= 0.0 || slope.is_nan() {
            d = -&g;
            slope = -g.norm_squared();
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let y_new = &y + &d * t;
            let (phi_new, g_new, x_new, _) = p.value_and_grad(&y_new)?;
            if phi_new <= phi + opts.armijo_gamma * t * slope + armijo_allowance(phi, p.objective_scale()) {
                accepted = Some((y_new, phi_new, g_new, x_new, t));
                break;
            }
            t *= opts.backtrack_sigma;
        }
        let Some((y_new, phi_new, g_new, x_new, t)) = accepted else {
            return finish("lbfgs", p, Some(y), x, Termination::LineSearchFail, trace, &clock);
        };

        let s = &d * t;
        let u = &g_new - &g;
        let su = s.dot(&u);
        // curvature filter
        if su > 1e-12 * s.norm() * u.norm() {
            if memory.len() == opts.lbfgs_memory.max(1) {
                memory.pop_front();
            }
            memory.push_back(Pair { rho: 1.0 / su, s, u });
        }

        y = y_new;
        phi = phi_new;
        g = g_new;
        x = x_new;
        r_feas = g.norm() / b_scale;
        trace.push(TraceRecord {
            iter: k,
            phi,
            grad_norm: g.norm(),
            r_feas,
            elapsed_s: clock.elapsed(),
        });
        if is_converged(p, r_feas, &x, opts.tol) {
            return finish("lbfgs", p, Some(y), x, Termination::Converged, trace, &clock);
        }
    }
    finish("lbfgs", p, Some(y), x, Termination::IterLimit, trace, &clock)
}
