//! End-to-end solver behavior on catalog instances: fixed points, known
//! multipliers, cross-solver agreement, certificates, and determinism.

use nalgebra::DVector;
use proxdual::problems::{
    gen_edm_helix, gen_lowrank_diag, gen_scad, gen_sparse_simplex, sparse_simplex_project,
};
use proxdual::solvers::{
    solve_admm, solve_altproj, solve_gd_bb, solve_lbfgs, solve_ssn, SolveOptions, Termination,
};

fn y0_for(p: &proxdual::dualcore::DualProblem) -> DVector<f64> {
    DVector::zeros(p.dual_dim())
}

#[test]
fn every_solver_stops_immediately_at_a_feasible_fixed_point() {
    // noiseless helix: the observation is already in K with A z = b
    let inst = gen_edm_helix(12, 3, 0.0, 4).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions { tol: 1e-8, ..Default::default() };

    for report in [
        solve_gd_bb(p, &opts, &y0_for(p)).unwrap(),
        solve_lbfgs(p, &opts, &y0_for(p)).unwrap(),
        solve_ssn(p, &opts, &y0_for(p)).unwrap(),
        solve_admm(p, &opts).unwrap(),
        solve_altproj(p, &opts).unwrap(),
    ] {
        assert_eq!(report.termination, Termination::Converged, "{}", report.solver);
        assert_eq!(report.iterations, 0, "{}", report.solver);
        assert_eq!(report.trace.len(), 1, "{}", report.solver);
    }
}

#[test]
fn gd_bb_finds_the_sparse_simplex_multiplier() {
    let z = DVector::from_column_slice(&[0.5, 0.3, 0.2]);
    let inst = gen_sparse_simplex(3, 2, 0).unwrap();
    // replace the random observation with the worked example
    let p = proxdual::dualcore::DualProblem::new(
        inst.dual_problem.prox().clone(),
        inst.dual_problem.map().clone(),
        inst.dual_problem.b().clone(),
        z.clone(),
    )
    .unwrap();
    let opts = SolveOptions { tol: 1e-12, ..Default::default() };
    let report = solve_gd_bb(&p, &opts, &y0_for(&p)).unwrap();
    assert!(report.converged());

    let (x_oracle, y_oracle) = sparse_simplex_project(&z, 2).unwrap();
    let y = report.y.as_ref().unwrap();
    assert!((y[0] - y_oracle).abs() < 1e-6, "y = {}, oracle {}", y[0], y_oracle);
    assert!((&report.x - &x_oracle).norm() < 1e-8);
}

#[test]
fn dual_solvers_converge_on_lowrank_within_iteration_budgets() {
    let inst = gen_lowrank_diag(50, 5, 7).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions::default(); // tol 1e-6

    let gd = solve_gd_bb(p, &opts, &y0_for(p)).unwrap();
    assert!(gd.converged() && gd.iterations <= 200, "gd: {:?} in {}", gd.termination, gd.iterations);

    let lb = solve_lbfgs(p, &opts, &y0_for(p)).unwrap();
    assert!(lb.converged() && lb.iterations <= 200, "lbfgs: {:?} in {}", lb.termination, lb.iterations);

    let nt = solve_ssn(p, &opts, &y0_for(p)).unwrap();
    assert!(nt.converged() && nt.iterations <= 40, "ssn: {:?} in {}", nt.termination, nt.iterations);

    // converged dual reports satisfy the certificate chain
    for report in [&gd, &lb, &nt] {
        let gap = p
            .duality_gap_certificate(&report.x, report.y.as_ref().unwrap())
            .unwrap();
        assert!(gap <= 100.0 * opts.tol, "{}: gap {gap}", report.solver);
    }
}

#[test]
fn dual_solvers_agree_pairwise_at_tight_tolerance() {
    let inst = gen_lowrank_diag(30, 4, 11).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions { tol: 1e-8, ..Default::default() };
    let xs = [
        solve_gd_bb(p, &opts, &y0_for(p)).unwrap(),
        solve_lbfgs(p, &opts, &y0_for(p)).unwrap(),
        solve_ssn(p, &opts, &y0_for(p)).unwrap(),
    ];
    for a in &xs {
        assert!(a.converged(), "{} did not converge", a.solver);
        for b in &xs {
            let r_sol = (&a.x - &b.x).norm() / (1.0 + b.x.norm());
            assert!(r_sol <= 1e-5, "{} vs {}: {r_sol}", a.solver, b.solver);
        }
    }
}

#[test]
fn edm_dual_solvers_agree() {
    let inst = gen_edm_helix(30, 3, 1e-2, 3).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions { tol: 1e-8, ..Default::default() };
    let reports = [
        solve_gd_bb(p, &opts, &y0_for(p)).unwrap(),
        solve_lbfgs(p, &opts, &y0_for(p)).unwrap(),
        solve_ssn(p, &opts, &y0_for(p)).unwrap(),
    ];
    for a in &reports {
        assert!(a.converged(), "{}", a.solver);
        for b in &reports {
            let r_sol = (&a.x - &b.x).norm() / (1.0 + b.x.norm());
            assert!(r_sol <= 1e-6, "{} vs {}: {r_sol}", a.solver, b.solver);
        }
    }
}

#[test]
fn admm_reaches_reference_accuracy_on_a_small_instance() {
    let inst = gen_lowrank_diag(20, 3, 13).unwrap();
    let p = &inst.dual_problem;
    let reference = solve_ssn(p, &SolveOptions { tol: 1e-14, ..Default::default() }, &y0_for(p))
        .unwrap();
    assert!(reference.converged());

    let admm = solve_admm(p, &SolveOptions { tol: 1e-12, iter_limit: 3000, ..Default::default() })
        .unwrap();
    assert!(admm.converged(), "admm: {:?}", admm.termination);
    let r = p.residuals(&admm.x, Some(&reference.x)).unwrap();
    assert!(r.obj.unwrap() <= 1e-10, "r_obj {}", r.obj.unwrap());
    assert!(r.sol.unwrap() <= 1e-8, "r_sol {}", r.sol.unwrap());
}

#[test]
fn altproj_is_feasible_but_suboptimal_on_lowrank() {
    let inst = gen_lowrank_diag(30, 4, 17).unwrap();
    let p = &inst.dual_problem;
    let reference = solve_ssn(p, &SolveOptions { tol: 1e-12, ..Default::default() }, &y0_for(p))
        .unwrap();
    let ap = solve_altproj(p, &SolveOptions { tol: 1e-10, iter_limit: 5000, ..Default::default() })
        .unwrap();
    assert!(ap.converged());
    let r = p.residuals(&ap.x, Some(&reference.x)).unwrap();
    assert!(r.feas <= 1e-10);
    assert!(
        r.obj.unwrap() >= 1e-7,
        "alternating projection unexpectedly optimal: r_obj {}",
        r.obj.unwrap()
    );
}

#[test]
fn altproj_on_a_convex_set_matches_the_dual_projection() {
    // convex K = nonnegative orthant (top-k with k = n) and e^T x = 1
    let inst = gen_sparse_simplex(3, 2, 1).unwrap();
    let p = proxdual::dualcore::DualProblem::new(
        proxdual::proxlib::ProxOperator::new(
            proxdual::proxlib::ProxKind::PositivePartTopK { k: 3 },
            1.0,
        )
        .unwrap(),
        inst.dual_problem.map().clone(),
        inst.dual_problem.b().clone(),
        DVector::from_column_slice(&[0.5, -0.2, 0.4]),
    )
    .unwrap();
    let opts = SolveOptions { tol: 1e-10, iter_limit: 20000, ..Default::default() };
    let ap = solve_altproj(&p, &opts).unwrap();
    let dual = solve_ssn(&p, &opts, &y0_for(&p)).unwrap();
    assert!(ap.converged() && dual.converged());
    assert!(
        (&ap.x - &dual.x).norm() <= 1e-6,
        "gap {}",
        (&ap.x - &dual.x).norm()
    );
}

#[test]
fn scad_solves_certify_and_agree() {
    let inst = gen_scad(100, 0.05, 0.01, 0.1, 19).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions { tol: 1e-10, ..Default::default() };
    let gd = solve_gd_bb(p, &opts, &y0_for(p)).unwrap();
    let nt = solve_ssn(p, &opts, &y0_for(p)).unwrap();
    assert!(gd.converged() && nt.converged());
    for report in [&gd, &nt] {
        let gap = p
            .duality_gap_certificate(&report.x, report.y.as_ref().unwrap())
            .unwrap();
        assert!(gap <= 1e-8, "{}: gap {gap}", report.solver);
    }
    assert!((&gd.x - &nt.x).norm() / (1.0 + nt.x.norm()) <= 1e-5);
}

#[test]
fn traces_are_deterministic_modulo_wall_time() {
    let inst = gen_lowrank_diag(20, 3, 23).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions::default();
    let a = solve_gd_bb(p, &opts, &y0_for(p)).unwrap();
    let b = solve_gd_bb(p, &opts, &y0_for(p)).unwrap();
    assert_eq!(a.iterations, b.iterations);
    for (ra, rb) in a.trace.iter().zip(b.trace.iter()) {
        assert_eq!(ra.iter, rb.iter);
        assert_eq!(ra.phi.to_bits(), rb.phi.to_bits());
        assert_eq!(ra.grad_norm.to_bits(), rb.grad_norm.to_bits());
        assert_eq!(ra.r_feas.to_bits(), rb.r_feas.to_bits());
    }
    assert_eq!(a.x, b.x);
}

#[test]
fn nonmonotone_rule_bounds_the_gd_trace() {
    let inst = gen_scad(60, 0.05, 0.01, 0.5, 29).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions::default();
    let report = solve_gd_bb(p, &opts, &y0_for(p)).unwrap();
    let phis: Vec<f64> = report.trace.iter().map(|r| r.phi).collect();
    for k in 1..phis.len() {
        let window = phis[k.saturating_sub(opts.nonmonotone_memory)..k]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            phis[k] <= window + 1e-12 * (1.0 + window.abs()),
            "iteration {k}: {} exceeds window max {window}",
            phis[k]
        );
    }
}

#[test]
fn iter_limit_is_reported() {
    let inst = gen_lowrank_diag(20, 3, 31).unwrap();
    let p = &inst.dual_problem;
    let opts = SolveOptions { tol: 1e-14, iter_limit: 2, ..Default::default() };
    let report = solve_gd_bb(p, &opts, &y0_for(p)).unwrap();
    assert_eq!(report.termination, Termination::IterLimit);
    assert_eq!(report.iterations, 2);
    assert_eq!(report.trace.len(), 3);
}

#[test]
fn altproj_rejects_non_projection_kinds() {
    let inst = gen_scad(40, 0.05, 0.01, 0.1, 37).unwrap();
    assert!(solve_altproj(&inst.dual_problem, &SolveOptions::default()).is_err());
}
