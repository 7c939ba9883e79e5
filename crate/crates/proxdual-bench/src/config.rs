//! Experiment configuration: JSON file plus flag overrides, with the
//! `PROXDUAL_SEED` environment variable as a default-seed override.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use proxdual::problems::Family;
use serde::{Deserialize, Serialize};

use crate::table::TableFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferencePolicy {
    /// High-accuracy semismooth Newton run at tol 1e-14.
    Ssn1e14,
    /// Family's closed-form specialist.
    ClosedForm,
    None,
}

impl std::str::FromStr for ReferencePolicy {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ssn-1e-14" => Ok(ReferencePolicy::Ssn1e14),
            "closed-form" => Ok(ReferencePolicy::ClosedForm),
            "none" => Ok(ReferencePolicy::None),
            other => bail!("unknown reference policy '{other}'"),
        }
    }
}

/// Partial configuration: every field optional so that a JSON file and CLI
/// flags can be merged (flags win).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ConfigPatch {
    pub family: Option<Family>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub solvers: Option<Vec<String>>,
    pub tol: Option<f64>,
    pub iter_limit: Option<usize>,
    pub time_limit_secs: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub reference: Option<ReferencePolicy>,
    pub format: Option<TableFormat>,
}

impl ConfigPatch {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Overlay `self` (higher priority) on `base`.
    pub fn over(self, base: ConfigPatch) -> ConfigPatch {
        ConfigPatch {
            family: self.family.or(base.family),
            n: self.n.or(base.n),
            r: self.r.or(base.r),
            k: self.k.or(base.k),
            lambda: self.lambda.or(base.lambda),
            sigma: self.sigma.or(base.sigma),
            rho: self.rho.or(base.rho),
            solvers: self.solvers.or(base.solvers),
            tol: self.tol.or(base.tol),
            iter_limit: self.iter_limit.or(base.iter_limit),
            time_limit_secs: self.time_limit_secs.or(base.time_limit_secs),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            reference: self.reference.or(base.reference),
            format: self.format.or(base.format),
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let family = self.family.context("a problem family is required (--family)")?;
        let n = self.n.unwrap_or(match family {
            Family::Lowrank => 50,
            Family::Edm => 200,
            Family::Scad => 2000,
            Family::SparseSimplex => 100,
            Family::L0Regression => 20,
        });
        let seed = match self.seed {
            Some(s) => s,
            None => std::env::var("PROXDUAL_SEED")
                .ok()
                .map(|s| s.parse().context("PROXDUAL_SEED must be an integer"))
                .transpose()?
                .unwrap_or(0),
        };
        let solvers = self.solvers.unwrap_or_else(|| match family {
            Family::Lowrank | Family::Edm => {
                ["altproj", "admm", "gd", "lbfgs", "ssn"].map(String::from).to_vec()
            }
            Family::Scad => ["admm", "gd", "lbfgs", "ssn"].map(String::from).to_vec(),
            Family::SparseSimplex => {
                ["altproj", "admm", "gd", "lbfgs", "ssn"].map(String::from).to_vec()
            }
            Family::L0Regression => vec!["support".to_string()],
        });
        let cfg = ExperimentConfig {
            family,
            n,
            r: self.r.unwrap_or(match family {
                Family::Edm => 3,
                _ => 5,
            }),
            k: self.k.unwrap_or_else(|| (n / 10).max(1)),
            lambda: self.lambda.unwrap_or(match family {
                Family::Scad => 0.01,
                Family::L0Regression => 0.05,
                _ => 1.0,
            }),
            sigma: self.sigma.unwrap_or(match family {
                Family::Edm => 1e-2,
                Family::Scad => 0.01,
                _ => 0.0,
            }),
            rho: self.rho.unwrap_or(0.05),
            solvers,
            tol: self.tol.unwrap_or(1e-6),
            iter_limit: self.iter_limit.unwrap_or(1000),
            time_limit_secs: self.time_limit_secs.unwrap_or(600.0),
            seed,
            out: self.out,
            reference: self.reference.unwrap_or(ReferencePolicy::Ssn1e14),
            format: self.format.unwrap_or(TableFormat::Csv),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub lambda: f64,
    pub sigma: f64,
    pub rho: f64,
    pub solvers: Vec<String>,
    pub tol: f64,
    pub iter_limit: usize,
    pub time_limit_secs: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub reference: ReferencePolicy,
    pub format: TableFormat,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            bail!("at least one solver is required");
        }
        match self.family {
            Family::Lowrank | Family::Edm => {
                if self.r == 0 || self.r > self.n {
                    bail!("rank must satisfy 1 <= r <= n");
                }
            }
            Family::SparseSimplex => {
                if self.k == 0 || self.k >= self.n {
                    bail!("sparse simplex requires 1 <= k < n");
                }
            }
            Family::Scad => {
                if self.n < 20 {
                    bail!("scad family needs n >= 20");
                }
                if !(self.rho > 0.0 && self.rho <= 1.0) {
                    bail!("sparsity fraction rho must lie in (0, 1]");
                }
            }
            Family::L0Regression => {
                if self.lambda <= 0.0 || self.lambda.is_nan() {
                    bail!("l0 regression requires lambda > 0");
                }
            }
        }
        if self.tol <= 0.0 || self.tol.is_nan() {
            bail!("tol must be positive");
        }
        Ok(())
    }

    pub fn solve_options(&self) -> proxdual::solvers::SolveOptions {
        proxdual::solvers::SolveOptions {
            tol: self.tol,
            iter_limit: self.iter_limit,
            time_limit_secs: self.time_limit_secs,
            seed: self.seed,
            ..Default::default()
        }
    }
}
