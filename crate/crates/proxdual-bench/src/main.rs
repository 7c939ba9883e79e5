use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use proxdual_bench::config::{ConfigPatch, ReferencePolicy};
use proxdual_bench::run::{generate_instance, run_experiment};
use proxdual_bench::table::TableFormat;

#[derive(Parser)]
#[command(
    name = "proxdual-bench",
    about = "Benchmarks for exact affine-constrained proximal mappings via the convex dual"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Problem family: lowrank | edm | scad | sparse-simplex | l0-regression
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Rank bound for lowrank/edm
    #[arg(long)]
    r: Option<usize>,
    /// Sparsity level for sparse-simplex
    #[arg(long)]
    k: Option<usize>,
    /// Prox parameter lambda (scad, l0-regression)
    #[arg(long)]
    lambda: Option<f64>,
    /// Noise level
    #[arg(long)]
    sigma: Option<f64>,
    /// Ground-truth sparsity fraction (scad)
    #[arg(long)]
    rho: Option<f64>,
    /// Solvers to run (repeatable): gd | lbfgs | ssn | admm | altproj
    #[arg(long = "solver")]
    solvers: Vec<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    iter_limit: Option<usize>,
    /// Wall-clock limit per solve, seconds
    #[arg(long)]
    time_limit: Option<f64>,
    /// Instance seed (default: PROXDUAL_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (tables and traces)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference policy: ssn-1e-14 | closed-form | none
    #[arg(long)]
    reference: Option<String>,
    /// Table format: csv | markdown
    #[arg(long)]
    format: Option<String>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonFlags {
    fn patch(&self) -> Result<ConfigPatch> {
        let base = match &self.config {
            Some(path) => ConfigPatch::from_json_file(path)?,
            None => ConfigPatch::default(),
        };
        let flags = ConfigPatch {
            family: self.family.as_deref().map(str::parse).transpose()?,
            n: self.n,
            r: self.r,
            k: self.k,
            lambda: self.lambda,
            sigma: self.sigma,
            rho: self.rho,
            solvers: if self.solvers.is_empty() { None } else { Some(self.solvers.clone()) },
            tol: self.tol,
            iter_limit: self.iter_limit,
            time_limit_secs: self.time_limit,
            seed: self.seed,
            out: self.out.clone(),
            reference: self
                .reference
                .as_deref()
                .map(str::parse::<ReferencePolicy>)
                .transpose()?,
            format: self.format.as_deref().map(str::parse::<TableFormat>).transpose()?,
        };
        Ok(flags.over(base))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as a JSON document
    Gen {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Run a single solver on a generated instance
    Solve {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Run a solver matrix and emit a result table plus traces
    Bench {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Run the acceptance suite; exits nonzero on any failed criterion
    Accept,
}

fn cmd_gen(flags: &CommonFlags) -> Result<()> {
    let cfg = flags.patch()?.resolve()?;
    let inst = generate_instance(&cfg)?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let path = out.join(format!("{}_n{}_seed{}.json", cfg.family, cfg.n, cfg.seed));
    proxdual::problems::write_instance(&path, &inst)
        .with_context(|| format!("writing {}", path.display()))?;
    println!(
        "wrote {} (family {}, n {}, m {}, seed {})",
        path.display(),
        cfg.family,
        cfg.n,
        inst.metadata.m,
        cfg.seed
    );
    Ok(())
}

fn cmd_solve(flags: &CommonFlags) -> Result<()> {
    let patch = flags.patch()?;
    if let Some(solvers) = &patch.solvers {
        if solvers.len() != 1 {
            anyhow::bail!("solve expects exactly one --solver");
        }
    }
    let cfg = patch.resolve()?;
    let out = run_experiment(&cfg)?;
    print!("{}", out.table_text);
    for (name, report) in &out.reports {
        if let Some(report) = report {
            println!(
                "# {name}: {} after {} iterations in {:.2}s",
                report.termination, report.iterations, report.wall_time_secs
            );
        }
    }
    Ok(())
}

fn cmd_bench(flags: &CommonFlags) -> Result<()> {
    let cfg = flags.patch()?.resolve()?;
    let out = run_experiment(&cfg)?;
    print!("{}", out.table_text);
    if let Some(dir) = &cfg.out {
        println!("# results and traces written under {}", dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen { flags } => cmd_gen(flags),
        Command::Solve { flags } => cmd_solve(flags),
        Command::Bench { flags } => cmd_bench(flags),
        Command::Accept => {
            let results = proxdual_bench::acceptance::run_all();
            let failed = results.iter().filter(|r| !r.pass).count();
            return if failed == 0 {
                println!("all {} criteria passed", results.len());
                ExitCode::SUCCESS
            } else {
                println!("{failed} of {} criteria failed", results.len());
                ExitCode::FAILURE
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
