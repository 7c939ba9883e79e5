//! Separable (componentwise) proximal operators.

use nalgebra::DVector;

use super::{DerivInfo, ProxResult};
use crate::{Error, Result};

/// SCAD-type folded concave penalty with parameters `mu > 0`, `a > 2` and
/// prox scale `lambda`:
///
/// ```text
/// phi(x) = mu |x| - x^2 / (2 a lambda)   for |x| <= a mu lambda,
/// phi(x) = a lambda mu^2 / 2             for |x| >  a mu lambda.
/// ```
///
/// `phi` is (a lambda)^{-1}-weakly convex, zero at the origin, constant for
/// large arguments, and `lambda * phi(x) + 1/2 (x - z)^2` is strictly convex
/// (since a > 2 > 1), so the three-branch prox below is its unique global
/// minimizer.
pub fn scad_penalty(x: f64, mu: f64, a: f64, lambda: f64) -> f64 {
    let cap = a * mu * lambda;
    if x.abs() <= cap {
        mu * x.abs() - x * x / (2.0 * a * lambda)
    } else {
        a * lambda * mu * mu / 2.0
    }
}

fn scad_prox_scalar(z: f64, mu: f64, a: f64, lambda: f64) -> (f64, f64) {
    let t1 = mu * lambda;
    let t2 = a * mu * lambda;
    let az = z.abs();
    if az <= t1 {
        (0.0, 0.0)
    } else if az <= t2 {
        let slope = 1.0 / (1.0 - 1.0 / a);
        ((z - t1 * z.signum()) * slope, slope)
    } else {
        (z, 1.0)
    }
}

/// Componentwise prox of the SCAD-type penalty:
/// `0` on `|z| <= mu lambda`, `(z - mu lambda sign z) / (1 - 1/a)` on
/// `mu lambda < |z| <= a mu lambda`, identity beyond. Kinks take the branch
/// selected by the closed inequality.
pub fn scad_prox(z: &DVector<f64>, mu: f64, a: f64, lambda: f64) -> Result<ProxResult> {
    if a <= 2.0 || mu <= 0.0 || lambda <= 0.0 || a.is_nan() || mu.is_nan() || lambda.is_nan() {
        return Err(Error::invalid(format!(
            "scad_prox requires a > 2, mu > 0, lambda > 0 (got a={a}, mu={mu}, lambda={lambda})"
        )));
    }
    let n = z.len();
    let mut point = DVector::zeros(n);
    let mut slopes = DVector::zeros(n);
    for i in 0..n {
        let (x, s) = scad_prox_scalar(z[i], mu, a, lambda);
        point[i] = x;
        slopes[i] = s;
    }
    let penalty: f64 = point.iter().map(|&x| scad_penalty(x, mu, a, lambda)).sum();
    let envelope = lambda * penalty + 0.5 * (&point - z).norm_squared();
    Ok(ProxResult { point, envelope, deriv: DerivInfo::Diagonal(slopes) })
}

/// Scalar prox of the SCAD-type penalty under a prox scale `theta` that may
/// differ from the `lambda` baked into the penalty. Minimizes
/// `theta phi(x) + 1/2 (x - v)^2` by enumerating the stationary points of
/// each piece together with the piece boundaries.
pub fn scad_prox_scaled_scalar(v: f64, mu: f64, a: f64, lambda: f64, theta: f64) -> f64 {
    if theta == lambda {
        return scad_prox_scalar(v, mu, a, lambda).0;
    }
    let cap = a * mu * lambda;
    let s = if v < 0.0 { -1.0 } else { 1.0 };
    let u = v.abs();
    let h = |x: f64| theta * scad_penalty(x, mu, a, lambda) + 0.5 * (x - u) * (x - u);

    let mut best_x = 0.0;
    let mut best_h = h(0.0);
    let mut consider = |x: f64| {
        let hx = h(x);
        if hx < best_h {
            best_h = hx;
            best_x = x;
        }
    };
    // Inner-piece stationary point (valid only where the piece is convex).
    let denom = 1.0 - theta / (a * lambda);
    if denom > 0.0 {
        let xm = (u - theta * mu) / denom;
        if xm > 0.0 && xm <= cap {
            consider(xm);
        }
    }
    consider(cap);
    if u > cap {
        consider(u);
    }
    s * best_x
}

/// Prox of `lambda ||.||_0`: keep entries with `|z_i| > tau`, zero the rest,
/// with `tau = sqrt(2 lambda)`. The tie `|z_i| = tau` resolves to 0.
pub fn hard_threshold(z: &DVector<f64>, lambda: f64) -> Result<ProxResult> {
    if lambda <= 0.0 || lambda.is_nan() {
        return Err(Error::invalid(format!("hard_threshold requires lambda > 0, got {lambda}")));
    }
    let tau = (2.0 * lambda).sqrt();
    let n = z.len();
    let mut point = DVector::zeros(n);
    let mut slopes = DVector::zeros(n);
    let mut nnz = 0usize;
    for i in 0..n {
        if z[i].abs() > tau {
            point[i] = z[i];
            slopes[i] = 1.0;
            nnz += 1;
        }
    }
    let envelope = lambda * nnz as f64 + 0.5 * (&point - z).norm_squared();
    Ok(ProxResult { point, envelope, deriv: DerivInfo::Diagonal(slopes) })
}

/// Indices of the `k` largest entries, ties broken by lowest index.
pub(crate) fn topk_order(z: &DVector<f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..z.len()).collect();
    idx.sort_by(|&i, &j| z[j].partial_cmp(&z[i]).unwrap().then(i.cmp(&j)));
    idx
}

/// Projection onto `{x >= 0, ||x||_0 <= k}`: positive part, then keep the
/// `k` largest entries (lowest index wins ties at the k-th value).
pub fn positive_part_topk(z: &DVector<f64>, k: usize) -> Result<ProxResult> {
    let n = z.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("top-k requires 1 <= k <= n, got k={k}, n={n}")));
    }
    let order = topk_order(z);
    let mut point = DVector::zeros(n);
    let mut slopes = DVector::zeros(n);
    for &i in order.iter().take(k) {
        if z[i] > 0.0 {
            point[i] = z[i];
            slopes[i] = 1.0;
        }
    }
    let envelope = 0.5 * (&point - z).norm_squared();
    Ok(ProxResult { point, envelope, deriv: DerivInfo::Diagonal(slopes) })
}

/// Prox of `lambda/2 ||. - center||^2`: `(w + lambda center) / (1 + lambda)`.
pub fn quadratic_prox(w: &DVector<f64>, center: &DVector<f64>, lambda: f64) -> Result<ProxResult> {
    if lambda <= 0.0 || lambda.is_nan() {
        return Err(Error::invalid(format!("quadratic_prox requires lambda > 0, got {lambda}")));
    }
    if w.len() != center.len() {
        return Err(Error::DimensionMismatch {
            context: "quadratic_prox center",
            expected: w.len(),
            got: center.len(),
        });
    }
    let point = (w + center * lambda) / (1.0 + lambda);
    let envelope = lambda * 0.5 * (&point - center).norm_squared() + 0.5 * (&point - w).norm_squared();
    let slopes = DVector::from_element(w.len(), 1.0 / (1.0 + lambda));
    Ok(ProxResult { point, envelope, deriv: DerivInfo::Diagonal(slopes) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scad_branches() {
        let z = DVector::from_column_slice(&[0.5, 5.0, 2.0, -2.0, -0.3]);
        let res = scad_prox(&z, 1.0, 3.7, 1.0).unwrap();
        assert_eq!(res.point[0], 0.0);
        assert_eq!(res.point[1], 5.0);
        let mid = 1.0 / (1.0 - 1.0 / 3.7);
        assert!((res.point[2] - mid).abs() < 1e-12);
        assert!((res.point[3] + mid).abs() < 1e-12);
        assert_eq!(res.point[4], 0.0);
        match &res.deriv {
            DerivInfo::Diagonal(s) => {
                assert_eq!(s[0], 0.0);
                assert_eq!(s[1], 1.0);
                assert!((s[2] - mid).abs() < 1e-12);
            }
            _ => panic!("expected diagonal payload"),
        }
    }

    #[test]
    fn scad_rejects_bad_parameters() {
        let z = DVector::from_element(1, 1.0);
        assert!(scad_prox(&z, 1.0, 2.0, 1.0).is_err());
        assert!(scad_prox(&z, 0.0, 3.7, 1.0).is_err());
        assert!(scad_prox(&z, 1.0, 3.7, 0.0).is_err());
    }

    #[test]
    fn scad_scaled_matches_unscaled_at_lambda() {
        for &v in &[-4.0, -1.2, 0.0, 0.4, 1.0, 2.3, 3.69, 3.71, 8.0] {
            let base = scad_prox_scalar(v, 1.0, 3.7, 0.7).0;
            let scaled = scad_prox_scaled_scalar(v, 1.0, 3.7, 0.7, 0.7);
            assert!((base - scaled).abs() < 1e-12, "v={v}: {base} vs {scaled}");
        }
    }

    #[test]
    fn hard_threshold_branch_convention() {
        // tau = 1: the boundary entry maps to zero.
        let z = DVector::from_column_slice(&[2.0, 1.0, 0.3]);
        let res = hard_threshold(&z, 0.5).unwrap();
        assert_eq!(res.point.as_slice(), &[2.0, 0.0, 0.0]);
        let zero = hard_threshold(&DVector::zeros(1), 0.5).unwrap();
        assert_eq!(zero.point[0], 0.0);
    }

    #[test]
    fn topk_truncation_and_ties() {
        let res = positive_part_topk(&DVector::from_column_slice(&[0.6, 0.4, 0.3]), 2).unwrap();
        assert_eq!(res.point.as_slice(), &[0.6, 0.4, 0.0]);
        let none = positive_part_topk(&DVector::from_column_slice(&[-1.0, -2.0]), 1).unwrap();
        assert_eq!(none.point.as_slice(), &[0.0, 0.0]);
        // Tie at the k-th value: lowest index kept.
        let tie = positive_part_topk(&DVector::from_column_slice(&[0.5, 0.5, 0.1]), 1).unwrap();
        assert_eq!(tie.point.as_slice(), &[0.5, 0.0, 0.0]);
        assert!(positive_part_topk(&DVector::zeros(2), 3).is_err());
    }

    #[test]
    fn quadratic_prox_formula() {
        let b = DVector::from_column_slice(&[2.0, 4.0]);
        let fixed = quadratic_prox(&b, &b, 1.0).unwrap();
        assert_eq!(fixed.point, b);
        let mid = quadratic_prox(&DVector::zeros(2), &b, 1.0).unwrap();
        assert_eq!(mid.point.as_slice(), &[1.0, 2.0]);
        let res = quadratic_prox(
            &DVector::from_column_slice(&[4.0, 0.0]),
            &DVector::from_column_slice(&[0.0, 4.0]),
            3.0,
        )
        .unwrap();
        assert_eq!(res.point.as_slice(), &[1.0, 3.0]);
    }
}
