//! Spectral projections: low-rank, psd low-rank, and the distance-matrix
//! cone. Inputs are flat row-major buffers; symmetric inputs are symmetrized
//! before factorization and singular/eigenvalues are sorted descending.

use nalgebra::{DMatrix, DVector};

use super::{DerivInfo, ProxResult};
use crate::shape::{from_matrix, symmetrize, to_matrix};
use crate::{Error, Result};

/// Keep the `r` largest singular values of a `rows x cols` matrix.
/// Envelope is half the sum of squared discarded singular values. When
/// `sigma_r = sigma_{r+1}` the factorization's first `r` columns win.
///
/// Computed through a symmetric eigendecomposition of the smaller Gram
/// matrix: the truncation equals `M Vr Vr^T` (resp. `Ur Ur^T M`), which only
/// needs the leading singular subspace and stays accurate on rank-deficient
/// input where a full SVD can lose orthogonality.
pub fn rank_projection(z: &DVector<f64>, rows: usize, cols: usize, r: usize) -> Result<ProxResult> {
    if r == 0 || r > rows.min(cols) {
        return Err(Error::invalid(format!(
            "rank_projection requires 1 <= r <= min(m, n), got r={r} for {rows}x{cols}"
        )));
    }
    let m = to_matrix(z, rows, cols);
    let use_right = cols <= rows;
    let gram = if use_right {
        m.transpose() * &m
    } else {
        &m * m.transpose()
    };
    let (values, vectors) = sorted_symmetric_eigen(&gram);
    let k = values.len();
    let spectrum = DVector::from_fn(k, |i, _| values[i].max(0.0).sqrt());

    let basis = vectors.columns(0, r).into_owned();
    let out = if use_right {
        // M (Vr Vr^T)
        let proj = &m * &basis;
        proj * basis.transpose()
    } else {
        // (Ur Ur^T) M
        let proj = basis.transpose() * &m;
        basis * proj
    };
    let total = m.norm_squared();
    let kept_sq = out.norm_squared();
    let envelope = 0.5 * (total - kept_sq).max(0.0);
    let point = from_matrix(&out);
    Ok(ProxResult {
        envelope,
        deriv: DerivInfo::Spectral { spectrum, kept: r },
        point,
    })
}

fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap().then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (pos, &i) in order.iter().enumerate() {
        vectors.set_column(pos, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

fn psd_rank_truncate(m: &DMatrix<f64>, r: usize) -> (DMatrix<f64>, Vec<f64>, usize) {
    let n = m.nrows();
    let (values, vectors) = sorted_symmetric_eigen(m);
    let mut out = DMatrix::zeros(n, n);
    let mut kept = 0;
    for (&lam, v) in values.iter().zip(vectors.column_iter()).take(r.min(n)) {
        if lam <= 0.0 {
            break;
        }
        kept += 1;
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += lam * v[i] * v[j];
            }
        }
    }
    (out, values, kept)
}

/// Projection onto `{X psd, rank(X) <= r}`: keep the `r` largest
/// eigenvalues clipped at zero. The input is symmetrized first.
pub fn psd_rank_projection(z: &DVector<f64>, n: usize, r: usize) -> Result<ProxResult> {
    if r == 0 || r > n {
        return Err(Error::invalid(format!(
            "psd_rank_projection requires 1 <= r <= n, got r={r}, n={n}"
        )));
    }
    let mut m = to_matrix(z, n, n);
    symmetrize(&mut m);
    let (out, values, kept) = psd_rank_truncate(&m, r);
    let point = from_matrix(&out);
    let envelope = 0.5 * (&point - z).norm_squared();
    Ok(ProxResult {
        point,
        envelope,
        deriv: DerivInfo::Spectral { spectrum: DVector::from_vec(values), kept },
    })
}

/// Projection onto distance matrices of embedding dimension at most `r`:
/// `Pi(D) = -Pi_{psd,r}(-JDJ) + (D - JDJ)` with the centering
/// `J = I - ee^T / n`. The output satisfies `-J out J` psd with rank <= r.
pub fn edm_cone_projection(z: &DVector<f64>, n: usize, r: usize) -> Result<ProxResult> {
    if r == 0 || r > n {
        return Err(Error::invalid(format!(
            "edm_cone_projection requires 1 <= r <= n, got r={r}, n={n}"
        )));
    }
    let mut d = to_matrix(z, n, n);
    symmetrize(&mut d);
    let centered = center_both_sides(&d);
    let (p, values, kept) = psd_rank_truncate(&(-&centered), r);
    let out = -&p + (&d - &centered);
    let point = from_matrix(&out);
    let envelope = 0.5 * (&point - z).norm_squared();
    Ok(ProxResult {
        point,
        envelope,
        deriv: DerivInfo::Spectral { spectrum: DVector::from_vec(values), kept },
    })
}

/// `J M J` with `J = I - ee^T/n`, via row/column/grand means.
fn center_both_sides(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut row_mean = vec![0.0; n];
    let mut col_mean = vec![0.0; n];
    let mut grand = 0.0;
    for i in 0..n {
        for j in 0..n {
            row_mean[i] += m[(i, j)];
            col_mean[j] += m[(i, j)];
            grand += m[(i, j)];
        }
    }
    for v in row_mean.iter_mut().chain(col_mean.iter_mut()) {
        *v /= n as f64;
    }
    grand /= (n * n) as f64;
    DMatrix::from_fn(n, n, |i, j| m[(i, j)] - row_mean[i] - col_mean[j] + grand)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[f64]) -> DVector<f64> {
        let n = vals.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            m[(i, i)] = v;
        }
        from_matrix(&m)
    }

    #[test]
    fn rank_projection_diagonal() {
        let res = rank_projection(&diag(&[3.0, 2.0, 1.0]), 3, 3, 2).unwrap();
        let m = to_matrix(&res.point, 3, 3);
        assert!((m[(0, 0)] - 3.0).abs() < 1e-10);
        assert!((m[(1, 1)] - 2.0).abs() < 1e-10);
        assert!(m[(2, 2)].abs() < 1e-10);
        assert!((res.envelope - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rank_projection_fixed_point() {
        // rank-1 matrix is untouched by a rank-2 projection
        let u = DVector::from_column_slice(&[1.0, -2.0, 0.5]);
        let m = &u * u.transpose();
        let flat = from_matrix(&m);
        let res = rank_projection(&flat, 3, 3, 2).unwrap();
        assert!((res.point - &flat).norm() < 1e-10);
    }

    #[test]
    fn psd_rank_diagonal_cases() {
        let res = psd_rank_projection(&diag(&[2.0, 1.0, -1.0]), 3, 2).unwrap();
        let m = to_matrix(&res.point, 3, 3);
        assert!((m[(0, 0)] - 2.0).abs() < 1e-10);
        assert!((m[(1, 1)] - 1.0).abs() < 1e-10);
        assert!(m[(2, 2)].abs() < 1e-10);

        let res1 = psd_rank_projection(&diag(&[2.0, 1.0, -1.0]), 3, 1).unwrap();
        let m1 = to_matrix(&res1.point, 3, 3);
        assert!((m1[(0, 0)] - 2.0).abs() < 1e-10);
        assert!(m1[(1, 1)].abs() < 1e-10);

        // negative definite input projects to zero
        let resn = psd_rank_projection(&diag(&[-1.0, -2.0]), 2, 1).unwrap();
        assert!(resn.point.norm() < 1e-12);
    }

    #[test]
    fn edm_projection_two_by_two() {
        let d = DVector::from_column_slice(&[0.0, -1.0, -1.0, 0.0]);
        let res = edm_cone_projection(&d, 2, 1).unwrap();
        assert!(res.point.iter().all(|&v| (v + 0.5).abs() < 1e-12));
    }

    #[test]
    fn edm_projection_zero_and_fixed_point() {
        let zero = edm_cone_projection(&DVector::zeros(9), 3, 2).unwrap();
        assert!(zero.point.norm() < 1e-14);

        // a true 1-d configuration: points 0, 1, 3 on a line
        let pts = [0.0, 1.0, 3.0];
        let mut d = DMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                d[(i, j)] = (pts[i] - pts[j]) * (pts[i] - pts[j]);
            }
        }
        let flat = from_matrix(&d);
        let res = edm_cone_projection(&flat, 3, 1).unwrap();
        assert!((res.point - &flat).norm() < 1e-10);
    }

    #[test]
    fn edm_output_is_in_the_cone() {
        // -J out J must be psd with rank <= r
        let raw = DVector::from_fn(16, |i, _| ((i * 7 % 13) as f64) - 6.0);
        let res = edm_cone_projection(&raw, 4, 2).unwrap();
        let mut out = to_matrix(&res.point, 4, 4);
        symmetrize(&mut out);
        let centered = center_both_sides(&out);
        let eigs = (-centered).symmetric_eigenvalues();
        let mut sorted: Vec<f64> = eigs.iter().copied().collect();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(sorted.iter().all(|&l| l > -1e-8));
        assert!(sorted[2..].iter().all(|&l| l.abs() < 1e-8));
    }

    #[test]
    fn rank_bounds_checked() {
        assert!(rank_projection(&DVector::zeros(6), 2, 3, 3).is_err());
        assert!(psd_rank_projection(&DVector::zeros(4), 2, 0).is_err());
    }
}
