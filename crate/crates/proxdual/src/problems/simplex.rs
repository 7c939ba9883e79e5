//! Closed-form sparse simplex projection and its spectral lift.

use nalgebra::{DMatrix, DVector};

use crate::shape::{from_matrix, symmetrize, to_matrix};
use crate::{Error, Result};

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "sparse simplex projection requires 1 <= k < n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// Indices sorted by value descending, ties by lowest index.
fn descending_order(z: &DVector<f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..z.len()).collect();
    idx.sort_by(|&i, &j| z[j].partial_cmp(&z[i]).unwrap().then(i.cmp(&j)));
    idx
}

/// Projection onto `{x : e^T x = 1, x >= 0, ||x||_0 <= k}` together with the
/// multiplier of the sum constraint.
///
/// Sort `z` descending and let `y_j = (1 - sum_{i<=j} z_(i)) / j`. The
/// active count `j*` is the largest `j <= k` with `z_(j) + y_j > 0`
/// (strict, exact comparison); the solution keeps the `j*` largest entries
/// at `z_i + y_{j*}` and satisfies `e^T x = 1`, `x >= 0`, `nnz(x) <= k`.
pub fn sparse_simplex_project(z: &DVector<f64>, k: usize) -> Result<(DVector<f64>, f64)> {
    check_k(z.len(), k)?;
    let order = descending_order(z);

    let mut prefix = 0.0;
    let mut y_star = f64::NAN;
    let mut j_star = 0;
    for j in 1..=k {
        prefix += z[order[j - 1]];
        let y_j = (1.0 - prefix) / j as f64;
        if z[order[j - 1]] + y_j > 0.0 {
            y_star = y_j;
            j_star = j;
        }
    }
    debug_assert!(j_star >= 1, "j = 1 always satisfies z_(1) + (1 - z_(1)) > 0");

    let mut x = DVector::zeros(z.len());
    for &i in order.iter().take(j_star) {
        x[i] = (z[i] + y_star).max(0.0);
    }
    Ok((x, y_star))
}

/// `F(y) = e^T [(z + e y)^+]_k - 1` for the root finder below.
fn simplex_residual(sorted: &[f64], prefix: &[f64], k: usize, y: f64) -> f64 {
    // entries with z > -y are positive after the shift; sorted descending
    let positive = sorted.partition_point(|&v| v + y > 0.0);
    let j = positive.min(k);
    if j == 0 {
        return -1.0;
    }
    prefix[j] + j as f64 * y - 1.0
}

/// Root of the piecewise-linear nondecreasing `F(y) = e^T [(z+ey)^+]_k - 1`
/// via breakpoint bisection followed by an exact solve on the active linear
/// piece. Agrees with the multiplier of [`sparse_simplex_project`].
pub fn sparse_simplex_root_1d(z: &DVector<f64>, k: usize) -> Result<f64> {
    check_k(z.len(), k)?;
    let n = z.len();
    let mut sorted: Vec<f64> = z.iter().copied().collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut prefix = vec![0.0; n + 1];
    for j in 0..n {
        prefix[j + 1] = prefix[j] + sorted[j];
    }
    let eval = |y: f64| simplex_residual(&sorted, &prefix, k, y);

    // breakpoints where the active set changes, ascending in y
    let mut breaks: Vec<f64> = sorted.iter().map(|&v| -v).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // bisect over breakpoints for the first nonnegative residual
    let root = if eval(breaks[n - 1]) < 0.0 {
        // beyond the last breakpoint every entry is active
        let j = k.min(n);
        (1.0 - prefix[j]) / j as f64
    } else {
        let (mut lo, mut hi) = (0usize, n - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if eval(breaks[mid]) < 0.0 {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        // root lies in (breaks[lo-1], breaks[lo]]: solve the linear piece
        let inside = if lo == 0 {
            breaks[lo] - 1.0
        } else {
            0.5 * (breaks[lo - 1] + breaks[lo])
        };
        let positive = sorted.partition_point(|&v| v + inside > 0.0);
        let j = positive.min(k).max(1);
        let candidate = (1.0 - prefix[j]) / j as f64;
        if eval(candidate).abs() <= 1e-12 {
            candidate
        } else {
            // piece had no interior root: it sits at the breakpoint itself
            breaks[lo]
        }
    };
    Ok(root)
}

/// Spectral lift: project the eigenvalues of a symmetric matrix onto the
/// sparse simplex and reconstruct. The output has unit trace, is psd, and
/// has rank at most `k`.
pub fn sparse_simplex_matrix_project(z: &DVector<f64>, n: usize, k: usize) -> Result<DVector<f64>> {
    check_k(n, k)?;
    let mut m = to_matrix(z, n, n);
    symmetrize(&mut m);
    let eig = m.symmetric_eigen();
    let eigenvalues = DVector::from_fn(n, |i, _| eig.eigenvalues[i]);
    let (projected, _) = sparse_simplex_project(&eigenvalues, k)?;
    let mut out = DMatrix::zeros(n, n);
    for idx in 0..n {
        if projected[idx] != 0.0 {
            let v = eig.eigenvectors.column(idx);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += projected[idx] * v[i] * v[j];
                }
            }
        }
    }
    Ok(from_matrix(&out))
}
