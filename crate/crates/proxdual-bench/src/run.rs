//! Experiment driver: generate the instance, compute the reference
//! solution, run each solver, and emit rows/traces.

use std::panic::{catch_unwind, AssertUnwindSafe};

use anyhow::{bail, Context, Result};
use nalgebra::DVector;
use proxdual::problems::{
    composite_dual_residual, gen_edm_helix, gen_l0_data, gen_lowrank_diag, gen_scad,
    gen_sparse_simplex, l0_regression_dual_solve, sparse_simplex_project, Family, Instance,
};
use proxdual::proxlib::{ProxKind, ProxOperator};
use proxdual::solvers::{
    solve_admm, solve_altproj, solve_gd_bb, solve_lbfgs, solve_ssn, SolveOptions, SolveReport,
};

use crate::config::{ExperimentConfig, ReferencePolicy};
use crate::table::{emit_table, trace_csv, TableRow};

pub struct ExperimentOutput {
    pub rows: Vec<TableRow>,
    pub reports: Vec<(String, Option<SolveReport>)>,
    pub table_text: String,
}

pub fn generate_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    Ok(match cfg.family {
        Family::Lowrank => gen_lowrank_diag(cfg.n, cfg.r, cfg.seed)?,
        Family::Edm => gen_edm_helix(cfg.n, cfg.r, cfg.sigma, cfg.seed)?,
        Family::Scad => gen_scad(cfg.n, cfg.rho, cfg.sigma, cfg.lambda, cfg.seed)?,
        Family::SparseSimplex => gen_sparse_simplex(cfg.n, cfg.k, cfg.seed)?,
        Family::L0Regression => bail!("l0-regression runs through its specialist solver"),
    })
}

fn method_label(solver: &str) -> Result<&'static str> {
    Ok(match solver {
        "gd" | "gd-bb" => "D-GD",
        "lbfgs" => "D-LBFGS",
        "ssn" => "D-SSN",
        "admm" => "P-ADMM",
        "altproj" => "P-AltProj",
        other => bail!("unknown solver '{other}' (gd, lbfgs, ssn, admm, altproj)"),
    })
}

fn dispatch(
    solver: &str,
    p: &proxdual::dualcore::DualProblem,
    opts: &SolveOptions,
) -> proxdual::Result<SolveReport> {
    let y0 = DVector::zeros(p.dual_dim());
    match solver {
        "gd" | "gd-bb" => solve_gd_bb(p, opts, &y0),
        "lbfgs" => solve_lbfgs(p, opts, &y0),
        "ssn" => solve_ssn(p, opts, &y0),
        "admm" => solve_admm(p, opts),
        "altproj" => solve_altproj(p, opts),
        other => Err(proxdual::Error::Unsupported(format!("solver {other}"))),
    }
}

fn reference_solution(cfg: &ExperimentConfig, inst: &Instance) -> Result<Option<DVector<f64>>> {
    match cfg.reference {
        ReferencePolicy::None => Ok(None),
        ReferencePolicy::Ssn1e14 => {
            let opts = SolveOptions {
                tol: 1e-14,
                iter_limit: 2000,
                time_limit_secs: cfg.time_limit_secs,
                ..Default::default()
            };
            let p = &inst.dual_problem;
            let report = solve_ssn(p, &opts, &DVector::zeros(p.dual_dim()))?;
            if !report.converged() {
                eprintln!(
                    "warning: reference SSN run stopped with {:?} at r_feas {:.2e}",
                    report.termination, report.residuals.feas
                );
            }
            Ok(Some(report.x))
        }
        ReferencePolicy::ClosedForm => match cfg.family {
            Family::SparseSimplex => {
                let (x, _) = sparse_simplex_project(&inst.observation, cfg.k)?;
                Ok(Some(x))
            }
            other => bail!("no closed-form reference for the {other} family"),
        },
    }
}

/// Run the full solver matrix of one experiment. Solver panics are caught
/// and reported as rows with empty residuals.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.family == Family::L0Regression {
        return run_l0_experiment(cfg);
    }
    let inst = generate_instance(cfg)?;
    let xref = reference_solution(cfg, &inst)?;
    let p = &inst.dual_problem;
    let opts = cfg.solve_options();

    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for solver in &cfg.solvers {
        let label = method_label(solver)?;
        let outcome = catch_unwind(AssertUnwindSafe(|| dispatch(solver, p, &opts)));
        match outcome {
            Ok(Ok(report)) => {
                let res = p.residuals(&report.x, xref.as_ref())?;
                rows.push(TableRow::new(
                    label,
                    Some(res.feas),
                    res.obj,
                    res.sol,
                    report.iterations,
                    report.wall_time_secs,
                ));
                if let Some(dir) = &cfg.out {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join(format!(
                        "{}_n{}_{}.trace.csv",
                        cfg.family, cfg.n, solver
                    ));
                    std::fs::write(&path, trace_csv(&report.trace))
                        .with_context(|| format!("writing {}", path.display()))?;
                }
                reports.push((label.to_string(), Some(report)));
            }
            Ok(Err(err)) => {
                eprintln!("solver {label} failed: {err}");
                rows.push(TableRow::new(label, None, None, None, 0, 0.0));
                reports.push((label.to_string(), None));
            }
            Err(_) => {
                eprintln!("solver {label} panicked; reported as an error row");
                rows.push(TableRow::new(label, None, None, None, 0, 0.0));
                reports.push((label.to_string(), None));
            }
        }
    }

    let table_text = emit_table(&rows, cfg.format)?;
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        let ext = match cfg.format {
            crate::table::TableFormat::Csv => "csv",
            crate::table::TableFormat::Markdown => "md",
        };
        std::fs::write(dir.join(format!("results.{ext}")), &table_text)?;
    }
    Ok(ExperimentOutput { rows, reports, table_text })
}

/// The composite sparse-regression family has no iterative solver matrix;
/// the specialist support iteration is the method. The row reports the
/// relative norm of the composite dual inclusion residual.
fn run_l0_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let data = gen_l0_data(cfg.n, cfg.lambda, cfg.seed)?;
    let start = std::time::Instant::now();
    let sol = l0_regression_dual_solve(&data.map, &data.b, &data.x0, &data.y0, data.lambda)?;
    let elapsed = start.elapsed().as_secs_f64();

    let fprox = ProxOperator::new(ProxKind::HardThreshold, data.lambda)?;
    let center: Vec<f64> = data.b.iter().copied().collect();
    let gprox = ProxOperator::new(ProxKind::QuadraticShift { center }, data.lambda)?;
    let residual =
        composite_dual_residual(&fprox, &gprox, &data.map, &data.x0, &data.y0, &sol.u)?;
    let r_feas = residual.norm() / (1.0 + data.b.norm());

    let rows = vec![TableRow::new(
        "D-Support",
        Some(r_feas),
        None,
        None,
        sol.support_updates,
        elapsed,
    )];
    let table_text = emit_table(&rows, cfg.format)?;
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        let ext = match cfg.format {
            crate::table::TableFormat::Csv => "csv",
            crate::table::TableFormat::Markdown => "md",
        };
        std::fs::write(dir.join(format!("results.{ext}")), &table_text)?;
    }
    Ok(ExperimentOutput { rows, reports: Vec::new(), table_text })
}
