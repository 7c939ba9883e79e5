//! Semismooth Newton on the dual. The piecewise-smooth system is
//! `F(y) = A Prox_{lambda f}(z + A* y) - b`; each step solves the
//! regularized Newton system `(J + eps I) d = -F` by matrix-free conjugate
//! gradients, where `J` acts through the prox derivative payload and
//! `eps = min(cap, ||F||)`.

use nalgebra::DVector;

use super::{armijo_allowance, finish, is_converged, RunClock, SolveOptions, SolveReport, Termination, TraceRecord, MAX_BACKTRACKS};
use crate::dualcore::DualProblem;
use crate::Result;

/// Conjugate gradients for `op(d) = rhs` from a zero start. Returns the
/// accumulated iterate on breakdown (non-positive curvature); the caller
/// treats a zero direction as a gradient fallback.
fn conjugate_gradients<F>(op: F, rhs: &DVector<f64>, tol: f64, max_iter: usize) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut x = DVector::zeros(rhs.len());
    let mut r = rhs.clone();
    let mut rr = r.norm_squared();
    if rr.sqrt() <= tol {
        return Ok(x);
    }
    let mut d = r.clone();
    for _ in 0..max_iter {
        let ad = op(&d)?;
        let dad = d.dot(&ad);
        if dad <= 0.0 || !dad.is_finite() {
            break;
        }
        let alpha = rr / dad;
        x += &d * alpha;
        r -= &ad * alpha;
        let rr_new = r.norm_squared();
        if rr_new.sqrt() <= tol {
            break;
        }
        d = &r + &d * (rr_new / rr);
        rr = rr_new;
    }
    Ok(x)
}

pub fn solve_ssn(p: &DualProblem, opts: &SolveOptions, y0: &DVector<f64>) -> Result<SolveReport> {
    opts.validate()?;
    let clock = RunClock::new(opts.time_limit_secs);
    let b_scale = 1.0 + p.b().norm();
    let m = p.dual_dim();

    let mut y = y0.clone();
    let (mut phi, mut g, mut x, mut prox_res) = p.value_and_grad(&y)?;
    let mut r_feas = g.norm() / b_scale;
    let mut trace = vec![TraceRecord {
        iter: 0,
        phi,
        grad_norm: g.norm(),
        r_feas,
        elapsed_s: clock.elapsed(),
    }];
    if is_converged(p, r_feas, &x, opts.tol) {
        return finish("ssn", p, Some(y), x, Termination::Converged, trace, &clock);
    }

    for k in 1..=opts.iter_limit {
        if clock.expired() {
            return finish("ssn", p, Some(y), x, Termination::TimeLimit, trace, &clock);
        }

        let norm_f = g.norm();
        // regularize against the scale-free residual: on problems with large
        // ||b|| (distance matrices) an absolute min(cap, ||F||) would dwarf
        // the Jacobian's curvature and degrade Newton to a damped gradient
        let eps = opts.ssn_reg.min(norm_f / b_scale);
        let cg_tol = opts.ssn_cg_tol * norm_f;
        let v = p.v(&y)?;
        let rhs = -&g;
        let mut d = conjugate_gradients(
            |dir| Ok(p.jacobian_action(&v, &prox_res, dir)? + dir * eps),
            &rhs,
            cg_tol,
            m.clamp(20, 200),
        )?;

        let mut slope = g.dot(&d);
        if slope >= 0.0 || slope.is_nan() {
            d = -&g;
            slope = -norm_f * norm_f;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let y_new = &y + &d * t;
            let eval = p.value_and_grad(&y_new)?;
            if eval.0 <= phi + opts.armijo_gamma * t * slope + armijo_allowance(phi, p.objective_scale()) {
                accepted = Some((y_new, eval));
                break;
            }
            t *= opts.backtrack_sigma;
        }
        let Some((y_new, (phi_new, g_new, x_new, res_new))) = accepted else {
            return finish("ssn", p, Some(y), x, Termination::LineSearchFail, trace, &clock);
        };

        y = y_new;
        phi = phi_new;
        g = g_new;
        x = x_new;
        prox_res = res_new;
        r_feas = g.norm() / b_scale;
        trace.push(TraceRecord {
            iter: k,
            phi,
            grad_norm: g.norm(),
            r_feas,
            elapsed_s: clock.elapsed(),
        });
        if is_converged(p, r_feas, &x, opts.tol) {
            return finish("ssn", p, Some(y), x, Termination::Converged, trace, &clock);
        }
    }
    finish("ssn", p, Some(y), x, Termination::IterLimit, trace, &clock)
}
