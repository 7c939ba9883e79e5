//! The dual problem engine.
//!
//! For the primal problem `min lambda f(x) + 1/2 ||x - z||^2  s.t. A x = b`
//! this evaluates the convex dual objective
//!
//! ```text
//! Phi_z(y) = 1/2 ||v||^2 - E_{lambda f}(v) - <b, y> - 1/2 ||z||^2,
//! v = z + A* y,
//! ```
//!
//! together with the (sub)gradient `A Prox_{lambda f}(v) - b`, recovers
//! primal points from multipliers, and computes the residuals and
//! zero-duality-gap certificates that make recovered optima verifiable.
//! `Phi_z` is convex regardless of the convexity of `f`; where the prox is
//! set-valued the branch convention of [`crate::proxlib`] selects one
//! subgradient.

use nalgebra::DVector;

use crate::linmap::LinearMap;
use crate::proxlib::{prox_jvp, ProxOperator, ProxResult};
use crate::shape::Shape;
use crate::{Error, Result};

/// Relative eigenvalue floor of `A A*` below which the constraint operator
/// is rejected as non-surjective.
pub const SURJECTIVITY_FLOOR: f64 = 1e-10;

/// Relative residuals of a candidate primal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `||A x - b|| / (1 + ||b||)`.
    pub feas: f64,
    /// `|f_obj(x) - f_obj(xref)| / (1 + |f_obj(xref)|)`, when a reference is given.
    pub obj: Option<f64>,
    /// `||x - xref|| / (1 + ||xref||)`, when a reference is given.
    pub sol: Option<f64>,
}

/// Outcome of a finite-difference gradient check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdGradientCheck {
    /// Max over coordinates of the relative central-difference error.
    Conclusive(f64),
    /// A prox branch change was detected inside the stencil.
    Inconclusive,
}

/// Bundle of (prox, map, b, z) with cached constants; immutable after
/// construction and safe for concurrent evaluation.
#[derive(Debug, Clone)]
pub struct DualProblem {
    prox: ProxOperator,
    map: LinearMap,
    b: DVector<f64>,
    z: DVector<f64>,
    half_z_norm_sq: f64,
    b_norm: f64,
}

impl DualProblem {
    /// Validates shape consistency and the surjectivity of `A` (smallest
    /// Gram eigenvalue above [`SURJECTIVITY_FLOOR`] relative to the largest).
    pub fn new(
        prox: ProxOperator,
        map: LinearMap,
        b: DVector<f64>,
        z: DVector<f64>,
    ) -> Result<Self> {
        prox.validate_shape(map.input_shape())?;
        map.input_shape().check_len(&z, "DualProblem z")?;
        if b.len() != map.output_dim() {
            return Err(Error::DimensionMismatch {
                context: "DualProblem b",
                expected: map.output_dim(),
                got: b.len(),
            });
        }
        let (min_eig, max_eig) = map.gram_extreme_eigs();
        if min_eig <= SURJECTIVITY_FLOOR * max_eig.max(0.0) {
            return Err(Error::NotSurjective { min_eig, max_eig });
        }
        let half_z_norm_sq = 0.5 * z.norm_squared();
        let b_norm = b.norm();
        Ok(DualProblem { prox, map, b, z, half_z_norm_sq, b_norm })
    }

    pub fn prox(&self) -> &ProxOperator {
        &self.prox
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn z(&self) -> &DVector<f64> {
        &self.z
    }

    pub fn shape(&self) -> &Shape {
        self.map.input_shape()
    }

    pub fn lambda(&self) -> f64 {
        self.prox.lambda()
    }

    /// Dual dimension `m`.
    pub fn dual_dim(&self) -> usize {
        self.map.output_dim()
    }

    /// Magnitude of the constants entering `Phi_z`; the rounding noise of a
    /// dual-value evaluation is a few ulps of this, not of `Phi_z` itself
    /// (the constituent terms cancel).
    pub fn objective_scale(&self) -> f64 {
        self.half_z_norm_sq
    }

    /// `v(y) = z + A* y`.
    pub fn v(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(&self.z + self.map.adjoint(y)?)
    }

    /// One prox call yielding `Phi_z(y)`, its (sub)gradient and the primal
    /// point, all at once.
    pub fn value_and_grad(
        &self,
        y: &DVector<f64>,
    ) -> Result<(f64, DVector<f64>, DVector<f64>, ProxResult)> {
        let v = self.v(y)?;
        let res = self.prox.eval(&v, self.shape())?;
        let phi = 0.5 * v.norm_squared() - res.envelope - self.b.dot(y) - self.half_z_norm_sq;
        let grad = self.map.apply(&res.point)? - &self.b;
        let primal = res.point.clone();
        Ok((phi, grad, primal, res))
    }

    /// `Phi_z(y)`.
    pub fn dual_value(&self, y: &DVector<f64>) -> Result<f64> {
        let v = self.v(y)?;
        let res = self.prox.eval(&v, self.shape())?;
        Ok(0.5 * v.norm_squared() - res.envelope - self.b.dot(y) - self.half_z_norm_sq)
    }

    /// `(A Prox(v(y)) - b, Prox(v(y)))`; a subgradient element where the
    /// prox is set-valued.
    pub fn dual_gradient(&self, y: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let (_, grad, primal, _) = self.value_and_grad(y)?;
        Ok((grad, primal))
    }

    /// The prox point at `v(y)`.
    pub fn recover_primal(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let v = self.v(y)?;
        Ok(self.prox.eval(&v, self.shape())?.point)
    }

    /// Primal objective `f_obj(x) = lambda f(x) + 1/2 ||x - z||^2`
    /// (`+inf` outside `dom f`).
    pub fn primal_objective(&self, x: &DVector<f64>) -> f64 {
        let f = self.prox.f_value(x, self.shape());
        if f.is_infinite() {
            return f64::INFINITY;
        }
        self.lambda() * f + 0.5 * (x - &self.z).norm_squared()
    }

    /// Whether `f(x)` is finite (for indicators: within the membership
    /// tolerance of the set).
    pub fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.prox.f_value(x, self.shape()).is_finite()
    }

    /// Relative feasibility residual, plus objective/solution residuals
    /// against an optional reference point.
    pub fn residuals(&self, x: &DVector<f64>, xref: Option<&DVector<f64>>) -> Result<Residuals> {
        let feas = (self.map.apply(x)? - &self.b).norm() / (1.0 + self.b_norm);
        let (obj, sol) = match xref {
            Some(xr) => {
                let fx = self.primal_objective(x);
                let fr = self.primal_objective(xr);
                let obj = (fx - fr).abs() / (1.0 + fr.abs());
                let sol = (x - xr).norm() / (1.0 + xr.norm());
                (Some(obj), Some(sol))
            }
            None => (None, None),
        };
        Ok(Residuals { feas, obj, sol })
    }

    /// `|f_obj(x) + Phi_z(y)| / (1 + |f_obj(x)|)`. Together with a zero
    /// feasibility residual this certifies global optimality of `x`.
    pub fn duality_gap_certificate(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let fx = self.primal_objective(x);
        if !fx.is_finite() {
            return Err(Error::Domain(
                "certificate requires a point with finite f(x)".into(),
            ));
        }
        let phi = self.dual_value(y)?;
        Ok((fx + phi).abs() / (1.0 + fx.abs()))
    }

    /// Central-difference check of the analytic gradient at `y`. Probes
    /// `y +- h e_i` for prox branch changes; any change makes the check
    /// inconclusive rather than failed.
    pub fn fd_gradient_check(&self, y: &DVector<f64>, h: f64) -> Result<FdGradientCheck> {
        let (_, grad, _, base) = self.value_and_grad(y)?;
        let m = y.len();
        let mut worst: f64 = 0.0;
        let mut probe = y.clone();
        for i in 0..m {
            probe[i] = y[i] + h;
            let v_plus = self.v(&probe)?;
            let res_plus = self.prox.eval(&v_plus, self.shape())?;
            let phi_plus =
                0.5 * v_plus.norm_squared() - res_plus.envelope - self.b.dot(&probe) - self.half_z_norm_sq;

            probe[i] = y[i] - h;
            let v_minus = self.v(&probe)?;
            let res_minus = self.prox.eval(&v_minus, self.shape())?;
            let phi_minus =
                0.5 * v_minus.norm_squared() - res_minus.envelope - self.b.dot(&probe) - self.half_z_norm_sq;
            probe[i] = y[i];

            if !res_plus.deriv.same_branch(&base.deriv)
                || !res_minus.deriv.same_branch(&base.deriv)
            {
                return Ok(FdGradientCheck::Inconclusive);
            }

            let fd = (phi_plus - phi_minus) / (2.0 * h);
            let err = (fd - grad[i]).abs() / (1.0 + grad[i].abs());
            worst = worst.max(err);
        }
        Ok(FdGradientCheck::Conclusive(worst))
    }

    /// Symmetrized central-difference Hessian of `Phi_z` at `y`. Intended
    /// for strong-convexity probes at moderate dual dimensions.
    pub fn fd_hessian(&self, y: &DVector<f64>, h: f64) -> Result<nalgebra::DMatrix<f64>> {
        let m = y.len();
        let mut hess = nalgebra::DMatrix::zeros(m, m);
        let mut probe = y.clone();
        for j in 0..m {
            probe[j] = y[j] + h;
            let (g_plus, _) = self.dual_gradient(&probe)?;
            probe[j] = y[j] - h;
            let (g_minus, _) = self.dual_gradient(&probe)?;
            probe[j] = y[j];
            let col = (g_plus - g_minus) / (2.0 * h);
            hess.set_column(j, &col);
        }
        let ht = hess.transpose();
        Ok((hess + ht) * 0.5)
    }

    /// Newton-system action `d -> A J_prox(v(y)) A* d` at a fixed prox
    /// evaluation. Directions are normalized internally so finite-difference
    /// payloads stay well scaled.
    pub fn jacobian_action(
        &self,
        v: &DVector<f64>,
        at: &ProxResult,
        d: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let norm = d.norm();
        if norm == 0.0 {
            return Ok(DVector::zeros(d.len()));
        }
        let unit = d / norm;
        let dir = self.map.adjoint(&unit)?;
        let jv = prox_jvp(&self.prox, v, at, &dir, self.shape())?;
        Ok(self.map.apply(&jv)? * norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmap::LinearMap;
    use crate::proxlib::ProxKind;

    fn orthant_problem() -> DualProblem {
        // projection onto R^3_+ with the single constraint e^T x = 1
        let prox = ProxOperator::new(ProxKind::PositivePartTopK { k: 3 }, 1.0).unwrap();
        let map = LinearMap::single_sum(3);
        DualProblem::new(
            prox,
            map,
            DVector::from_element(1, 1.0),
            DVector::from_column_slice(&[0.5, -0.2, 0.4]),
        )
        .unwrap()
    }

    #[test]
    fn dual_value_at_zero_is_minus_envelope() {
        let p = orthant_problem();
        let y0 = DVector::zeros(1);
        // dist(z, R^3_+)^2 = 0.2^2
        assert!((p.dual_value(&y0).unwrap() - (-0.02)).abs() < 1e-14);
    }

    #[test]
    fn gradient_and_primal_at_zero() {
        let p = orthant_problem();
        let (g, x) = p.dual_gradient(&DVector::zeros(1)).unwrap();
        assert!((g[0] - (-0.1)).abs() < 1e-14);
        assert_eq!(x.as_slice(), &[0.5, 0.0, 0.4]);
    }

    #[test]
    fn feasible_fixed_point_has_zero_gradient_and_gap() {
        // z already on the sparse simplex: prox fixed point with y = 0
        let prox = ProxOperator::new(ProxKind::PositivePartTopK { k: 2 }, 1.0).unwrap();
        let map = LinearMap::single_sum(3);
        let z = DVector::from_column_slice(&[0.6, 0.4, 0.0]);
        let p = DualProblem::new(prox, map, DVector::from_element(1, 1.0), z.clone()).unwrap();
        let y0 = DVector::zeros(1);
        let (g, x) = p.dual_gradient(&y0).unwrap();
        assert!(g.norm() < 1e-14);
        assert_eq!(x, z);
        assert!(p.duality_gap_certificate(&z, &y0).unwrap() < 1e-14);
        assert!((p.dual_value(&y0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn sparse_simplex_multiplier_certifies() {
        let prox = ProxOperator::new(ProxKind::PositivePartTopK { k: 2 }, 1.0).unwrap();
        let map = LinearMap::single_sum(3);
        let z = DVector::from_column_slice(&[0.5, 0.3, 0.2]);
        let p = DualProblem::new(prox, map, DVector::from_element(1, 1.0), z).unwrap();
        let y = DVector::from_element(1, 0.1);
        let (g, x) = p.dual_gradient(&y).unwrap();
        assert!(g.norm() < 1e-14);
        assert_eq!(x.as_slice(), &[0.6, 0.4, 0.0]);
        assert!(p.duality_gap_certificate(&x, &y).unwrap() <= 1e-12);
        // a random infeasible x at y=0 leaves a strictly positive gap
        let bad = DVector::from_column_slice(&[0.9, 0.0, 0.0]);
        assert!(p.duality_gap_certificate(&bad, &DVector::zeros(1)).unwrap() > 1e-3);
    }

    #[test]
    fn residual_arithmetic() {
        let prox = ProxOperator::new(ProxKind::PositivePartTopK { k: 2 }, 1.0).unwrap();
        let map = LinearMap::single_sum(2);
        let p = DualProblem::new(
            prox,
            map,
            DVector::from_element(1, 1.0),
            DVector::from_column_slice(&[0.5, 0.5]),
        )
        .unwrap();
        let x = DVector::from_column_slice(&[0.6, 0.6]);
        let r = p.residuals(&x, None).unwrap();
        assert!((r.feas - 0.1).abs() < 1e-15);
        assert_eq!(r.obj, None);
        let same = p.residuals(&x, Some(&x)).unwrap();
        assert_eq!(same.obj, Some(0.0));
        assert_eq!(same.sol, Some(0.0));
        let feasible = DVector::from_column_slice(&[0.7, 0.3]);
        assert!(p.residuals(&feasible, None).unwrap().feas < 1e-15);
    }

    #[test]
    fn fd_check_smooth_and_kink() {
        // smooth everywhere: quadratic shift
        let prox = ProxOperator::new(
            ProxKind::QuadraticShift { center: vec![1.0, -2.0] },
            1.0,
        )
        .unwrap();
        let map = LinearMap::dense_rows(nalgebra::DMatrix::from_row_slice(1, 2, &[1.0, 1.0]));
        let p = DualProblem::new(
            prox,
            map,
            DVector::from_element(1, 0.3),
            DVector::from_column_slice(&[0.2, 0.7]),
        )
        .unwrap();
        match p.fd_gradient_check(&DVector::from_element(1, 0.37), 1e-6).unwrap() {
            FdGradientCheck::Conclusive(err) => assert!(err <= 1e-6, "err = {err}"),
            FdGradientCheck::Inconclusive => panic!("quadratic prox has no branches"),
        }

        // hard threshold sitting exactly on a kink: inconclusive by construction
        let prox = ProxOperator::new(ProxKind::HardThreshold, 0.5).unwrap();
        let map = LinearMap::dense_rows(nalgebra::DMatrix::identity(2, 2));
        let z = DVector::from_column_slice(&[1.0, 2.0]); // tau = 1: first entry on the kink
        let p = DualProblem::new(prox, map, DVector::from_column_slice(&[0.0, 2.0]), z).unwrap();
        assert_eq!(
            p.fd_gradient_check(&DVector::zeros(2), 1e-7).unwrap(),
            FdGradientCheck::Inconclusive
        );
    }

    #[test]
    fn construction_rejects_rank_deficient_maps() {
        let prox = ProxOperator::new(ProxKind::HardThreshold, 0.5).unwrap();
        // [1 0; 1 0] has a singular gram matrix
        let map = LinearMap::dense_rows(nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 0.0, 1.0, 0.0],
        ));
        let out = DualProblem::new(prox, map, DVector::zeros(2), DVector::zeros(2));
        assert!(matches!(out, Err(Error::NotSurjective { .. })));
    }
}
