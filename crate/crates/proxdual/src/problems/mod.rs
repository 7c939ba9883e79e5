//! Instance generators for the experiment families, plus closed-form
//! specialist solvers that double as test oracles.
//!
//! Generation is deterministic in the seed: every random array is drawn
//! from its own ChaCha8 stream (see [`crate::rng::Streams`]); the stream ids
//! are documented on each generator.

mod io;
mod l0;
mod simplex;

pub use io::{read_instance, write_instance};
pub use l0::{composite_dual_residual, gen_l0_data, l0_regression_dual_solve, l0_subproblem_objective, L0Data, L0Solution};
pub use simplex::{sparse_simplex_matrix_project, sparse_simplex_project, sparse_simplex_root_1d};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dualcore::DualProblem;
use crate::linmap::LinearMap;
use crate::proxlib::{ProxKind, ProxOperator};
use crate::rng::Streams;
use crate::shape::{from_matrix, Shape};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Lowrank,
    Edm,
    Scad,
    SparseSimplex,
    L0Regression,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowrank" => Ok(Family::Lowrank),
            "edm" => Ok(Family::Edm),
            "scad" => Ok(Family::Scad),
            "sparse-simplex" => Ok(Family::SparseSimplex),
            "l0-regression" => Ok(Family::L0Regression),
            other => Err(Error::invalid(format!("unknown family '{other}'"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Lowrank => "lowrank",
            Family::Edm => "edm",
            Family::Scad => "scad",
            Family::SparseSimplex => "sparse-simplex",
            Family::L0Regression => "l0-regression",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub family: Family,
    pub n: usize,
    /// Number of affine constraints.
    pub m: usize,
    /// Rank bound `r` or sparsity level `k`, family dependent.
    pub rank_or_sparsity: Option<usize>,
    pub sigma: Option<f64>,
    pub lambda: f64,
    pub seed: u64,
    /// Number of exactly observed off-diagonal pairs (EDM family).
    pub omega_size: Option<usize>,
}

/// A generated problem with ground truth, observation and an optional
/// high-accuracy reference solution.
#[derive(Debug, Clone)]
pub struct Instance {
    pub dual_problem: DualProblem,
    pub ground_truth: DVector<f64>,
    pub observation: DVector<f64>,
    pub reference_solution: Option<DVector<f64>>,
    pub metadata: InstanceMetadata,
}

/// Affine-constrained low-rank projection: the ground truth is
/// `U V^T` with i.i.d. standard Gaussian factors, the constraint pins the
/// diagonal, and the observation adds unit Gaussian noise.
///
/// Streams: 0 -> `U` (n x r), 1 -> `V` (n x r), 2 -> noise (n x n).
pub fn gen_lowrank_diag(n: usize, r: usize, seed: u64) -> Result<Instance> {
    if r == 0 || r > n {
        return Err(Error::invalid(format!("rank r={r} must lie in 1..=n (n={n})")));
    }
    let streams = Streams::new(seed);
    let u = streams.gaussian_matrix(0, n, r);
    let v = streams.gaussian_matrix(1, n, r);
    let noise = streams.gaussian_matrix(2, n, n);
    let truth_mat = &u * v.transpose();
    let obs_mat = &truth_mat + &noise;

    let shape = Shape::matrix(n, n);
    let map = LinearMap::entry_mask(shape, (0..n).map(|i| (i, i)).collect())?;
    let truth = from_matrix(&truth_mat);
    let b = map.apply(&truth)?;
    let observation = from_matrix(&obs_mat);
    let prox = ProxOperator::new(ProxKind::RankProjection { r }, 1.0)?;
    let dual_problem = DualProblem::new(prox, map, b, observation.clone())?;

    Ok(Instance {
        dual_problem,
        ground_truth: truth,
        observation,
        reference_solution: None,
        metadata: InstanceMetadata {
            family: Family::Lowrank,
            n,
            m: n,
            rank_or_sparsity: Some(r),
            sigma: None,
            lambda: 1.0,
            seed,
            omega_size: None,
        },
    })
}

/// 3D helix coordinates used by the distance-matrix family.
pub fn helix_points(n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * (i as f64) / ((n - 1) as f64);
            [4.0 * (3.0 * t).cos(), 4.0 * (3.0 * t).sin(), 2.0 * t]
        })
        .collect()
}

/// Low-rank Euclidean distance matrix projection from noisy helix data.
///
/// The true matrix holds squared distances of `n` points on a 3D helix. A
/// subset `Omega` of off-diagonal pairs is observed exactly (each pair kept
/// with probability `1/n`); all remaining entries are perturbed by centered
/// Gaussian noise scaled by `sigma` times the empirical standard deviation
/// of the true squared distances. Constraints pin the diagonal to zero and
/// the `Omega` entries to their exact values.
///
/// Streams: 0 -> `Omega` membership uniforms (pairs `i < j` in row-major
/// order), 1 -> noise draws (same pair order; a draw is consumed for every
/// pair and used only off `Omega`).
pub fn gen_edm_helix(n: usize, r: usize, sigma: f64, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(Error::invalid("edm instance needs n >= 2"));
    }
    if r == 0 || r > n {
        return Err(Error::invalid(format!("rank r={r} must lie in 1..=n (n={n})")));
    }
    let streams = Streams::new(seed);
    let points = helix_points(n);
    let mut truth_mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = [
                points[i][0] - points[j][0],
                points[i][1] - points[j][1],
                points[i][2] - points[j][2],
            ];
            truth_mat[(i, j)] = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        }
    }

    let n_pairs = n * (n - 1) / 2;
    let memb = streams.uniform_vector(0, n_pairs);
    let eps = streams.gaussian_vector(1, n_pairs);

    // sample std of the true squared distances over i < j
    let mut mean = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            mean += truth_mat[(i, j)];
        }
    }
    mean /= n_pairs as f64;
    let mut var = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = truth_mat[(i, j)] - mean;
            var += d * d;
        }
    }
    let spread = (var / ((n_pairs - 1).max(1) as f64)).sqrt();

    let mut obs_mat = truth_mat.clone();
    let mut entries: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    let mut pair_idx = 0;
    let mut omega_size = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if memb[pair_idx] < 1.0 / (n as f64) {
                entries.push((i, j));
                omega_size += 1;
            } else {
                let noisy = truth_mat[(i, j)] + sigma * spread * eps[pair_idx];
                obs_mat[(i, j)] = noisy;
                obs_mat[(j, i)] = noisy;
            }
            pair_idx += 1;
        }
    }

    let shape = Shape::symmetric(n);
    let m = entries.len();
    let map = LinearMap::entry_mask(shape, entries)?;
    let truth = from_matrix(&truth_mat);
    let b = map.apply(&truth)?;
    let observation = from_matrix(&obs_mat);
    let prox = ProxOperator::new(ProxKind::EdmConeProjection { r }, 1.0)?;
    let dual_problem = DualProblem::new(prox, map, b, observation.clone())?;

    Ok(Instance {
        dual_problem,
        ground_truth: truth,
        observation,
        reference_solution: None,
        metadata: InstanceMetadata {
            family: Family::Edm,
            n,
            m,
            rank_or_sparsity: Some(r),
            sigma: Some(sigma),
            lambda: 1.0,
            seed,
            omega_size: Some(omega_size),
        },
    })
}

/// Affine-constrained SCAD proximal step. The constraint matrix has
/// `m = ceil(n/10)` orthonormalized Gaussian rows, the ground truth is
/// `ceil(rho n)`-sparse with Gaussian nonzeros, `b = A xbar`, and the prox
/// center is `xbar + sigma xi`. SCAD parameters are `mu = 1`, `a = 3.7`.
///
/// Streams: 0 -> constraint matrix, 1 -> support selection,
/// 2 -> nonzero values, 3 -> center noise `xi`.
pub fn gen_scad(n: usize, rho: f64, sigma: f64, lambda: f64, seed: u64) -> Result<Instance> {
    if n < 20 {
        return Err(Error::invalid("scad instance needs n >= 20"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid("sparsity fraction rho must lie in (0, 1]"));
    }
    let streams = Streams::new(seed);
    let m = n.div_ceil(10);
    let g = streams.gaussian_matrix(0, m, n);
    let qr = g.transpose().qr();
    let a_mat = qr.q().transpose();

    let k = ((rho * n as f64).ceil() as usize).clamp(1, n);
    let mut rng = streams.stream(1);
    let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    let values = streams.gaussian_vector(2, k);
    let mut truth = DVector::zeros(n);
    for (pos, &i) in support.iter().enumerate() {
        truth[i] = values[pos];
    }

    let xi = streams.gaussian_vector(3, n);
    let observation = &truth + xi * sigma;
    let map = LinearMap::dense_rows(a_mat);
    let b = map.apply(&truth)?;
    let prox = ProxOperator::new(ProxKind::Scad { mu: 1.0, a: 3.7 }, lambda)?;
    let dual_problem = DualProblem::new(prox, map, b, observation.clone())?;

    Ok(Instance {
        dual_problem,
        ground_truth: truth,
        observation,
        reference_solution: None,
        metadata: InstanceMetadata {
            family: Family::Scad,
            n,
            m,
            rank_or_sparsity: Some(k),
            sigma: Some(sigma),
            lambda,
            seed,
            omega_size: None,
        },
    })
}

/// Sparse simplex projection instance: project a Gaussian point onto
/// `{e^T x = 1, x >= 0, ||x||_0 <= k}`. The closed-form specialist solution
/// is stored as both ground truth and reference.
///
/// Streams: 0 -> the point `z`.
pub fn gen_sparse_simplex(n: usize, k: usize, seed: u64) -> Result<Instance> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("sparse simplex requires 1 <= k < n, got k={k}, n={n}")));
    }
    let streams = Streams::new(seed);
    let observation = streams.gaussian_vector(0, n);
    let (x_star, _) = sparse_simplex_project(&observation, k)?;
    let map = LinearMap::single_sum(n);
    let prox = ProxOperator::new(ProxKind::PositivePartTopK { k }, 1.0)?;
    let dual_problem = DualProblem::new(
        prox,
        map,
        DVector::from_element(1, 1.0),
        observation.clone(),
    )?;

    Ok(Instance {
        dual_problem,
        ground_truth: x_star.clone(),
        observation,
        reference_solution: Some(x_star),
        metadata: InstanceMetadata {
            family: Family::SparseSimplex,
            n,
            m: 1,
            rank_or_sparsity: Some(k),
            sigma: None,
            lambda: 1.0,
            seed,
            omega_size: None,
        },
    })
}
