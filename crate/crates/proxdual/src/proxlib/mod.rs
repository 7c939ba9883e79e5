//! Catalog of proximal operators and set projections.
//!
//! Every operator returns the prox point together with the Moreau-envelope
//! value and derivative information usable by semismooth Newton. Set-valued
//! proxes are resolved to one deterministic branch:
//! hard thresholding maps `|z| = tau` to 0, top-k ties keep the lowest
//! index, and spectral truncations keep the factorization's leading block.

mod separable;
mod spectral;

pub use separable::{
    hard_threshold, positive_part_topk, quadratic_prox, scad_penalty, scad_prox,
    scad_prox_scaled_scalar,
};
pub use spectral::{edm_cone_projection, psd_rank_projection, rank_projection};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::shape::Shape;
use crate::{Error, Result};

/// Relative tolerance for set-membership checks of indicator functions.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProxKind {
    /// Separable SCAD-type folded concave penalty; see [`scad_penalty`].
    Scad { mu: f64, a: f64 },
    /// `f = ||.||_0`; threshold `tau = sqrt(2 lambda)`.
    HardThreshold,
    /// Indicator of `{x >= 0, ||x||_0 <= k}`.
    PositivePartTopK { k: usize },
    /// Indicator of `{rank(X) <= r}` for general matrices.
    RankProjection { r: usize },
    /// Indicator of `{X psd, rank(X) <= r}` for symmetric matrices.
    PsdRankProjection { r: usize },
    /// Indicator of `{D symmetric : -JDJ psd, rank(JDJ) <= r}` with
    /// `J = I - ee^T/n` (distance matrices of embedding dimension `r`).
    EdmConeProjection { r: usize },
    /// `f(x) = 1/2 ||x - center||^2`.
    QuadraticShift { center: Vec<f64> },
}

impl ProxKind {
    pub fn is_projection(&self) -> bool {
        matches!(
            self,
            ProxKind::PositivePartTopK { .. }
                | ProxKind::RankProjection { .. }
                | ProxKind::PsdRankProjection { .. }
                | ProxKind::EdmConeProjection { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProxKind::Scad { .. } => "scad",
            ProxKind::HardThreshold => "hard_threshold",
            ProxKind::PositivePartTopK { .. } => "positive_part_topk",
            ProxKind::RankProjection { .. } => "rank_projection",
            ProxKind::PsdRankProjection { .. } => "psd_rank_projection",
            ProxKind::EdmConeProjection { .. } => "edm_cone_projection",
            ProxKind::QuadraticShift { .. } => "quadratic_shift",
        }
    }
}

/// Derivative information attached to a prox evaluation.
#[derive(Debug, Clone)]
pub enum DerivInfo {
    /// Componentwise slopes of a separable piecewise-linear operator. The
    /// slope pattern doubles as the branch signature.
    Diagonal(DVector<f64>),
    /// Spectral operator: the full sorted spectrum and how many modes were
    /// kept. Directional derivatives are taken by finite differences.
    Spectral { spectrum: DVector<f64>, kept: usize },
    None,
}

impl DerivInfo {
    /// Whether two evaluations selected the same smooth branch.
    pub fn same_branch(&self, other: &DerivInfo) -> bool {
        match (self, other) {
            (DerivInfo::Diagonal(a), DerivInfo::Diagonal(b)) => a == b,
            (
                DerivInfo::Spectral { kept: ka, .. },
                DerivInfo::Spectral { kept: kb, .. },
            ) => ka == kb,
            (DerivInfo::None, DerivInfo::None) => true,
            _ => false,
        }
    }
}

/// Result of one prox evaluation at a point `t`.
#[derive(Debug, Clone)]
pub struct ProxResult {
    pub point: DVector<f64>,
    /// `lambda * f(point) + 1/2 ||point - t||^2`.
    pub envelope: f64,
    pub deriv: DerivInfo,
}

/// A `Prox_{lambda f}` evaluator for one catalog entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProxOperator {
    kind: ProxKind,
    lambda: f64,
}

impl ProxOperator {
    pub fn new(kind: ProxKind, lambda: f64) -> Result<Self> {
        if lambda <= 0.0 || lambda.is_nan() {
            return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
        }
        match &kind {
            ProxKind::Scad { mu, a } => {
                if *a <= 2.0 || a.is_nan() || *mu <= 0.0 || mu.is_nan() {
                    return Err(Error::invalid(format!(
                        "scad requires a > 2 and mu > 0, got a={a}, mu={mu}"
                    )));
                }
            }
            ProxKind::PositivePartTopK { k } => {
                if *k == 0 {
                    return Err(Error::invalid("top-k requires k >= 1"));
                }
            }
            ProxKind::RankProjection { r }
            | ProxKind::PsdRankProjection { r }
            | ProxKind::EdmConeProjection { r }
                if *r == 0 => {
                    return Err(Error::invalid("rank bound must be >= 1"));
                }
            _ => {}
        }
        Ok(ProxOperator { kind, lambda })
    }

    pub fn kind(&self) -> &ProxKind {
        &self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_projection(&self) -> bool {
        self.kind.is_projection()
    }

    /// Check that `shape` matches the operator's variable class and bounds.
    pub fn validate_shape(&self, shape: &Shape) -> Result<()> {
        match (&self.kind, shape) {
            (ProxKind::Scad { .. }, Shape::Vector { .. })
            | (ProxKind::HardThreshold, Shape::Vector { .. }) => Ok(()),
            (ProxKind::PositivePartTopK { k }, Shape::Vector { n }) => {
                if *k > *n {
                    Err(Error::invalid(format!("k={k} exceeds dimension n={n}")))
                } else {
                    Ok(())
                }
            }
            // separable quadratic: acts on any flat layout
            (ProxKind::QuadraticShift { center }, shape) => {
                if center.len() != shape.len() {
                    Err(Error::DimensionMismatch {
                        context: "quadratic shift center",
                        expected: shape.len(),
                        got: center.len(),
                    })
                } else {
                    Ok(())
                }
            }
            (ProxKind::RankProjection { r }, Shape::Matrix { rows, cols }) => {
                if *r > *rows.min(cols) {
                    Err(Error::invalid(format!("rank {r} exceeds min dim of {rows}x{cols}")))
                } else {
                    Ok(())
                }
            }
            (ProxKind::PsdRankProjection { r }, Shape::Symmetric { n })
            | (ProxKind::EdmConeProjection { r }, Shape::Symmetric { n }) => {
                if *r > *n {
                    Err(Error::invalid(format!("rank {r} exceeds dimension {n}")))
                } else {
                    Ok(())
                }
            }
            (kind, shape) => Err(Error::Unsupported(format!(
                "{} does not act on {:?}",
                kind.name(),
                shape
            ))),
        }
    }

    /// Evaluate `Prox_{lambda f}` at `t`.
    pub fn eval(&self, t: &DVector<f64>, shape: &Shape) -> Result<ProxResult> {
        self.validate_shape(shape)?;
        shape.check_len(t, "ProxOperator::eval")?;
        match &self.kind {
            ProxKind::Scad { mu, a } => scad_prox(t, *mu, *a, self.lambda),
            ProxKind::HardThreshold => hard_threshold(t, self.lambda),
            ProxKind::PositivePartTopK { k } => positive_part_topk(t, *k),
            ProxKind::QuadraticShift { center } => {
                quadratic_prox(t, &DVector::from_column_slice(center), self.lambda)
            }
            ProxKind::RankProjection { r } => {
                let (rows, cols) = match shape {
                    Shape::Matrix { rows, cols } => (*rows, *cols),
                    _ => unreachable!(),
                };
                rank_projection(t, rows, cols, *r)
            }
            ProxKind::PsdRankProjection { r } => {
                let n = symmetric_dim(shape);
                psd_rank_projection(t, n, *r)
            }
            ProxKind::EdmConeProjection { r } => {
                let n = symmetric_dim(shape);
                edm_cone_projection(t, n, *r)
            }
        }
    }

    /// Evaluate `Prox_{theta f}` for a prox scale `theta` possibly different
    /// from the operator's `lambda` (the penalty `f` itself is unchanged).
    /// Projections are scale-invariant. Used by the ADMM x-step.
    pub fn eval_scaled(&self, t: &DVector<f64>, shape: &Shape, theta: f64) -> Result<ProxResult> {
        if theta <= 0.0 || theta.is_nan() {
            return Err(Error::invalid(format!("prox scale must be positive, got {theta}")));
        }
        match &self.kind {
            ProxKind::Scad { mu, a } => {
                let point = DVector::from_fn(t.len(), |i, _| {
                    scad_prox_scaled_scalar(t[i], *mu, *a, self.lambda, theta)
                });
                let envelope = theta * self.f_value(&point, shape) + 0.5 * (&point - t).norm_squared();
                Ok(ProxResult { point, envelope, deriv: DerivInfo::None })
            }
            ProxKind::HardThreshold => hard_threshold(t, theta),
            ProxKind::QuadraticShift { center } => {
                quadratic_prox(t, &DVector::from_column_slice(center), theta)
            }
            _ => self.eval(t, shape),
        }
    }

    /// The function value `f(x)`, `+inf` (as `f64::INFINITY`) outside the
    /// domain. Indicator kinds measure membership by the distance to the set
    /// relative to `MEMBERSHIP_TOL`.
    pub fn f_value(&self, x: &DVector<f64>, shape: &Shape) -> f64 {
        match &self.kind {
            ProxKind::Scad { mu, a } => x
                .iter()
                .map(|&xi| scad_penalty(xi, *mu, *a, self.lambda))
                .sum(),
            ProxKind::HardThreshold => x.iter().filter(|&&xi| xi != 0.0).count() as f64,
            ProxKind::QuadraticShift { center } => {
                let c = DVector::from_column_slice(center);
                0.5 * (x - c).norm_squared()
            }
            _ => {
                // Indicator: distance to the set via one projection.
                match self.eval(x, shape) {
                    Ok(res) => {
                        let dist = (x - &res.point).norm();
                        if dist <= MEMBERSHIP_TOL * (1.0 + x.norm()) {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                    }
                    Err(_) => f64::INFINITY,
                }
            }
        }
    }
}

fn symmetric_dim(shape: &Shape) -> usize {
    match shape {
        Shape::Symmetric { n } => *n,
        _ => unreachable!("validated before dispatch"),
    }
}

/// Action of a generalized Jacobian of the prox at `at` on `direction`.
///
/// Diagonal payloads act exactly; spectral payloads use the forward finite
/// difference `(Prox(at + h d) - Prox(at)) / h` with `h = 1e-8 (1 + ||at||)`.
pub fn prox_jvp(
    op: &ProxOperator,
    at: &DVector<f64>,
    at_result: &ProxResult,
    direction: &DVector<f64>,
    shape: &Shape,
) -> Result<DVector<f64>> {
    match &at_result.deriv {
        DerivInfo::Diagonal(slopes) => {
            if slopes.len() != direction.len() {
                return Err(Error::DimensionMismatch {
                    context: "prox_jvp direction",
                    expected: slopes.len(),
                    got: direction.len(),
                });
            }
            Ok(slopes.component_mul(direction))
        }
        DerivInfo::Spectral { .. } => {
            let h = 1e-8 * (1.0 + at.norm());
            let shifted = op.eval(&(at + direction * h), shape)?;
            Ok((shifted.point - &at_result.point) / h)
        }
        DerivInfo::None => Err(Error::Unsupported(
            "prox result carries no derivative payload".into(),
        )),
    }
}
