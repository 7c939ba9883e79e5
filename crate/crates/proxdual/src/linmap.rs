//! The affine-constraint operator `A : X -> R^m` with its adjoint.
//!
//! Covers the constraint families used by the instance catalog: dense row
//! maps, entry extraction from matrices, the all-ones row, and stacked maps
//! acting on tuples of variables.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::shape::Shape;
use crate::{Error, Result};

/// Matrix entries dense eigensolve cap for the Gram surjectivity check;
/// larger maps fall back to a Lanczos estimate.
pub const DENSE_GRAM_CAP: usize = 5000;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MapVariant {
    /// `A x = M x` for a dense `m x n` matrix (row-major serialization).
    DenseRows { rows: usize, cols: usize, data: Vec<f64> },
    /// Extraction of matrix entries in declaration order. On a symmetric
    /// input space an off-diagonal pair `(i, j)` is one entry whose value is
    /// `X_ij + X_ji`; the adjoint scatters the multiplier into both mirror
    /// positions, keeping `<A X, w> = <X, A* w>` in the Frobenius inner
    /// product.
    EntryMask { entries: Vec<(usize, usize)> },
    /// The single row `e^T` (sum of all entries).
    SingleSum,
    /// Maps applied to a tuple of variables and summed:
    /// `A (x_1, ..., x_p) = sum_i A_i x_i`. All blocks share the output.
    Stack { parts: Vec<LinearMap> },
}

/// A surjective linear operator together with its input shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearMap {
    input_shape: Shape,
    output_dim: usize,
    variant: MapVariant,
}

impl LinearMap {
    pub fn dense_rows(matrix: DMatrix<f64>) -> Self {
        let (rows, cols) = matrix.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(matrix[(i, j)]);
            }
        }
        LinearMap {
            input_shape: Shape::vector(cols),
            output_dim: rows,
            variant: MapVariant::DenseRows { rows, cols, data },
        }
    }

    /// Entry extraction from a matrix-shaped variable.
    pub fn entry_mask(input_shape: Shape, entries: Vec<(usize, usize)>) -> Result<Self> {
        let (rows, cols) = match input_shape {
            Shape::Matrix { rows, cols } => (rows, cols),
            Shape::Symmetric { n } => (n, n),
            _ => return Err(Error::invalid("entry mask requires a matrix-shaped input")),
        };
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            let key = if matches!(input_shape, Shape::Symmetric { .. }) {
                (i.min(j), i.max(j))
            } else {
                (i, j)
            };
            if !seen.insert(key) {
                return Err(Error::invalid(format!("duplicate entry ({i}, {j}) in mask")));
            }
        }
        Ok(LinearMap {
            output_dim: entries.len(),
            input_shape,
            variant: MapVariant::EntryMask { entries },
        })
    }

    pub fn single_sum(n: usize) -> Self {
        LinearMap {
            input_shape: Shape::vector(n),
            output_dim: 1,
            variant: MapVariant::SingleSum,
        }
    }

    /// Stack maps over a tuple of variables; all parts must share the same
    /// output dimension.
    pub fn stack(parts: Vec<LinearMap>) -> Result<Self> {
        let m = match parts.first() {
            Some(p) => p.output_dim,
            None => return Err(Error::invalid("empty stack")),
        };
        if parts.iter().any(|p| p.output_dim != m) {
            return Err(Error::invalid("stacked maps must share the output dimension"));
        }
        let blocks = parts.iter().map(|p| p.input_shape.clone()).collect();
        Ok(LinearMap {
            input_shape: Shape::Stacked { blocks },
            output_dim: m,
            variant: MapVariant::Stack { parts },
        })
    }

    pub fn input_shape(&self) -> &Shape {
        &self.input_shape
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn variant(&self) -> &MapVariant {
        &self.variant
    }

    fn mask_cols(&self) -> usize {
        match &self.input_shape {
            Shape::Matrix { cols, .. } => *cols,
            Shape::Symmetric { n } => *n,
            _ => unreachable!("mask on non-matrix shape"),
        }
    }

    /// `A x`.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.input_shape.check_len(x, "LinearMap::apply")?;
        Ok(match &self.variant {
            MapVariant::DenseRows { rows, cols, data } => {
                let mut out = DVector::zeros(*rows);
                for i in 0..*rows {
                    let mut acc = 0.0;
                    let row = &data[i * cols..(i + 1) * cols];
                    for (j, a) in row.iter().enumerate() {
                        acc += a * x[j];
                    }
                    out[i] = acc;
                }
                out
            }
            MapVariant::EntryMask { entries } => {
                let cols = self.mask_cols();
                let symmetric = matches!(self.input_shape, Shape::Symmetric { .. });
                DVector::from_fn(entries.len(), |k, _| {
                    let (i, j) = entries[k];
                    if symmetric && i != j {
                        x[i * cols + j] + x[j * cols + i]
                    } else {
                        x[i * cols + j]
                    }
                })
            }
            MapVariant::SingleSum => DVector::from_element(1, x.sum()),
            MapVariant::Stack { parts } => {
                let mut out = DVector::zeros(self.output_dim);
                for (part, (off, len)) in parts.iter().zip(self.input_shape.block_offsets()) {
                    let block = DVector::from_column_slice(&x.as_slice()[off..off + len]);
                    out += part.apply(&block)?;
                }
                out
            }
        })
    }

    /// `A* w`.
    pub fn adjoint(&self, w: &DVector<f64>) -> Result<DVector<f64>> {
        if w.len() != self.output_dim {
            return Err(Error::DimensionMismatch {
                context: "LinearMap::adjoint",
                expected: self.output_dim,
                got: w.len(),
            });
        }
        Ok(match &self.variant {
            MapVariant::DenseRows { rows, cols, data } => {
                let mut out = DVector::zeros(*cols);
                for i in 0..*rows {
                    let wi = w[i];
                    if wi == 0.0 {
                        continue;
                    }
                    let row = &data[i * cols..(i + 1) * cols];
                    for (j, a) in row.iter().enumerate() {
                        out[j] += a * wi;
                    }
                }
                out
            }
            MapVariant::EntryMask { entries } => {
                let cols = self.mask_cols();
                let symmetric = matches!(self.input_shape, Shape::Symmetric { .. });
                let mut out = DVector::zeros(self.input_shape.len());
                for (k, &(i, j)) in entries.iter().enumerate() {
                    out[i * cols + j] += w[k];
                    if symmetric && i != j {
                        out[j * cols + i] += w[k];
                    }
                }
                out
            }
            MapVariant::SingleSum => DVector::from_element(self.input_shape.len(), w[0]),
            MapVariant::Stack { parts } => {
                let mut out = DVector::zeros(self.input_shape.len());
                for (part, (off, len)) in parts.iter().zip(self.input_shape.block_offsets()) {
                    let block = part.adjoint(w)?;
                    out.as_mut_slice()[off..off + len].copy_from_slice(block.as_slice());
                }
                out
            }
        })
    }

    /// Materialize `A` as a dense `m x dim(X)` matrix (columns indexed by the
    /// flat row-major layout). Intended for small maps and tests.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.input_shape.len();
        let mut dense = DMatrix::zeros(self.output_dim, n);
        let mut basis = DVector::zeros(n);
        for j in 0..n {
            basis[j] = 1.0;
            let col = self.apply(&basis).expect("basis vector has the input shape");
            dense.set_column(j, &col);
            basis[j] = 0.0;
        }
        dense
    }

    /// The dense Gram matrix `A A*`, built matrix-free.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        let m = self.output_dim;
        let mut gram = DMatrix::zeros(m, m);
        let mut basis = DVector::zeros(m);
        for k in 0..m {
            basis[k] = 1.0;
            let col = self
                .apply(&self.adjoint(&basis).expect("basis fits"))
                .expect("adjoint output has the input shape");
            gram.set_column(k, &col);
            basis[k] = 0.0;
        }
        gram
    }

    /// Smallest eigenvalue of `A A*`. Dense eigensolve up to
    /// [`DENSE_GRAM_CAP`]; a Lanczos estimate with full reorthogonalization
    /// beyond that.
    pub fn gram_min_eig(&self) -> f64 {
        self.gram_extreme_eigs().0
    }

    /// `(min, max)` eigenvalues of `A A*` with the default dense cap.
    pub fn gram_extreme_eigs(&self) -> (f64, f64) {
        self.gram_extreme_eigs_with_cap(DENSE_GRAM_CAP)
    }

    /// `(min, max)` eigenvalues of `A A*`, switching to Lanczos above
    /// `dense_cap` output dimensions.
    pub fn gram_extreme_eigs_with_cap(&self, dense_cap: usize) -> (f64, f64) {
        let m = self.output_dim;
        if m <= dense_cap {
            let eigs = self.gram_matrix().symmetric_eigenvalues();
            (eigs.min(), eigs.max())
        } else {
            lanczos_extreme_eigs(|v| {
                self.apply(&self.adjoint(v).expect("dim")).expect("dim")
            }, m, 120)
        }
    }
}

/// Extremal Ritz values of a symmetric operator from `steps` Lanczos
/// iterations with full reorthogonalization.
fn lanczos_extreme_eigs<F>(op: F, dim: usize, steps: usize) -> (f64, f64)
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let steps = steps.min(dim);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps);

    // Fixed deterministic start vector.
    let mut v = DVector::from_fn(dim, |i, _| ((i as f64) * 0.734_261 + 1.0).sin());
    v /= v.norm();

    for k in 0..steps {
        let mut w = op(&v);
        let alpha = v.dot(&w);
        alphas.push(alpha);
        w -= &v * alpha;
        if k > 0 {
            let beta_prev: f64 = betas[k - 1];
            w -= &basis[k - 1] * beta_prev;
        }
        for q in &basis {
            let c = q.dot(&w);
            w -= q * c;
        }
        basis.push(v.clone());
        let beta = w.norm();
        if beta < 1e-14 {
            break;
        }
        betas.push(beta);
        v = w / beta;
    }

    let k = alphas.len();
    let mut tri = DMatrix::zeros(k, k);
    for i in 0..k {
        tri[(i, i)] = alphas[i];
        if i + 1 < k && i < betas.len() {
            tri[(i, i + 1)] = betas[i];
            tri[(i + 1, i)] = betas[i];
        }
    }
    let eigs = tri.symmetric_eigenvalues();
    (eigs.min(), eigs.max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Streams;

    fn random_point(streams: &Streams, id: u64, shape: &Shape) -> DVector<f64> {
        streams.gaussian_vector(id, shape.len())
    }

    #[test]
    fn single_sum_apply_adjoint() {
        let map = LinearMap::single_sum(3);
        let x = DVector::from_column_slice(&[0.5, 0.3, 0.2]);
        assert_eq!(map.apply(&x).unwrap()[0], 1.0);
        let back = map.adjoint(&DVector::from_element(1, 0.1)).unwrap();
        assert_eq!(back.as_slice(), &[0.1, 0.1, 0.1]);
        assert_eq!(map.gram_min_eig(), 3.0);
    }

    #[test]
    fn entry_mask_diag_extraction_and_scatter() {
        let map = LinearMap::entry_mask(Shape::symmetric(2), vec![(0, 0), (1, 1)]).unwrap();
        let x = DVector::from_column_slice(&[1., 5., 5., 2.]);
        assert_eq!(map.apply(&x).unwrap().as_slice(), &[1.0, 2.0]);
        let back = map.adjoint(&DVector::from_column_slice(&[1., 2.])).unwrap();
        assert_eq!(back.as_slice(), &[1., 0., 0., 2.]);
    }

    #[test]
    fn dense_identity_roundtrip() {
        let map = LinearMap::dense_rows(DMatrix::identity(2, 2));
        let x = DVector::from_column_slice(&[3., 4.]);
        assert_eq!(map.apply(&x).unwrap().as_slice(), &[3., 4.]);
        assert_eq!(map.adjoint(&x).unwrap().as_slice(), &[3., 4.]);
        assert!((map.gram_min_eig() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirrored_off_diagonal_doubles_gram() {
        // Diagonal rows have unit Gram entries, mirrored off-diagonal rows 2.
        let map = LinearMap::entry_mask(
            Shape::symmetric(3),
            vec![(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)],
        )
        .unwrap();
        let gram = map.gram_matrix();
        let dense = map.to_dense();
        let explicit = &dense * dense.transpose();
        assert!((gram.clone() - &explicit).norm() < 1e-12);
        assert!((gram[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((gram[(3, 3)] - 2.0).abs() < 1e-12);
        assert!((map.gram_min_eig() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn adjoint_identity_all_variants() {
        let streams = Streams::new(7);
        let dense = LinearMap::dense_rows(streams.gaussian_matrix(0, 4, 9));
        let mask = LinearMap::entry_mask(
            Shape::symmetric(4),
            vec![(0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (1, 3)],
        )
        .unwrap();
        let sum = LinearMap::single_sum(6);
        let stack = LinearMap::stack(vec![
            LinearMap::dense_rows(streams.gaussian_matrix(1, 3, 5)),
            LinearMap::dense_rows(-DMatrix::identity(3, 3)),
        ])
        .unwrap();

        for (t, map) in [dense, mask, sum, stack].iter().enumerate() {
            for trial in 0..100 {
                let id = 100 + (t * 100 + trial) as u64;
                let x = random_point(&streams, id, map.input_shape());
                let w = streams.gaussian_vector(id + 10_000, map.output_dim());
                let lhs = map.apply(&x).unwrap().dot(&w);
                let rhs = x.dot(&map.adjoint(&w).unwrap());
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()),
                    "variant {t}: <Ax,w>={lhs} vs <x,A*w>={rhs}"
                );
            }
        }
    }

    #[test]
    fn gram_matches_dense_action() {
        let streams = Streams::new(11);
        let maps = [LinearMap::dense_rows(streams.gaussian_matrix(0, 3, 7)),
            LinearMap::entry_mask(Shape::symmetric(3), vec![(0, 0), (1, 1), (0, 2)]).unwrap(),
            LinearMap::single_sum(5),
            LinearMap::stack(vec![
                LinearMap::dense_rows(streams.gaussian_matrix(1, 2, 4)),
                LinearMap::dense_rows(-DMatrix::identity(2, 2)),
            ])
            .unwrap()];
        for (t, map) in maps.iter().enumerate() {
            let dense = map.to_dense();
            let explicit = &dense * dense.transpose();
            for trial in 0..20 {
                let w = streams.gaussian_vector(500 + (t * 20 + trial) as u64, map.output_dim());
                let via_map = map.apply(&map.adjoint(&w).unwrap()).unwrap();
                let via_dense = &explicit * &w;
                assert!((via_map - via_dense).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn orthonormal_rows_have_unit_gram() {
        let streams = Streams::new(3);
        let g = streams.gaussian_matrix(0, 4, 12);
        let qr = g.transpose().qr();
        let a = qr.q().transpose();
        let map = LinearMap::dense_rows(a.clone());
        assert!((map.gram_min_eig() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let map = LinearMap::single_sum(3);
        assert!(map.apply(&DVector::zeros(4)).is_err());
        assert!(map.adjoint(&DVector::zeros(2)).is_err());
    }

    #[test]
    fn lanczos_agrees_with_dense_on_small_gram() {
        let streams = Streams::new(19);
        let a = streams.gaussian_matrix(0, 20, 60);
        let map = LinearMap::dense_rows(a);
        let (dense_min, dense_max) = map.gram_extreme_eigs();
        let (lo, hi) = super::lanczos_extreme_eigs(
            |v| map.apply(&map.adjoint(v).unwrap()).unwrap(),
            20,
            20,
        );
        assert!((lo - dense_min).abs() < 1e-8 * (1.0 + dense_max));
        assert!((hi - dense_max).abs() < 1e-8 * (1.0 + dense_max));
    }
}
