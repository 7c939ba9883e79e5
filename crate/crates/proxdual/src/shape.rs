//! Shapes of primal variables.
//!
//! All primal points are stored as flat `DVector<f64>`; a [`Shape`] says how
//! to interpret the flat data. Matrices are flattened row-major. Symmetric
//! matrices are stored full (all `n*n` entries), not packed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Vector { n: usize },
    Matrix { rows: usize, cols: usize },
    /// Symmetric `n x n` matrix, stored full.
    Symmetric { n: usize },
    /// Concatenation of independent blocks.
    Stacked { blocks: Vec<Shape> },
}

impl Shape {
    pub fn vector(n: usize) -> Self {
        Shape::Vector { n }
    }

    pub fn matrix(rows: usize, cols: usize) -> Self {
        Shape::Matrix { rows, cols }
    }

    pub fn symmetric(n: usize) -> Self {
        Shape::Symmetric { n }
    }

    /// Flat storage length.
    pub fn len(&self) -> usize {
        match self {
            Shape::Vector { n } => *n,
            Shape::Matrix { rows, cols } => rows * cols,
            Shape::Symmetric { n } => n * n,
            Shape::Stacked { blocks } => blocks.iter().map(Shape::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_len(&self, v: &DVector<f64>, context: &'static str) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.len(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Offsets of each block for `Stacked`; a single block otherwise.
    pub fn block_offsets(&self) -> Vec<(usize, usize)> {
        match self {
            Shape::Stacked { blocks } => {
                let mut out = Vec::with_capacity(blocks.len());
                let mut off = 0;
                for b in blocks {
                    out.push((off, b.len()));
                    off += b.len();
                }
                out
            }
            _ => vec![(0, self.len())],
        }
    }
}

/// Reinterpret a flat row-major slice as a dense matrix.
pub fn to_matrix(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    debug_assert_eq!(v.len(), rows * cols);
    DMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Flatten a dense matrix row-major.
pub fn from_matrix(m: &DMatrix<f64>) -> DVector<f64> {
    let (rows, cols) = m.shape();
    DVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

/// Symmetrize `(M + M^T) / 2` in place.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_row_major() {
        let m = DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.]);
        let v = from_matrix(&m);
        assert_eq!(v.as_slice(), &[1., 2., 3., 4., 5., 6.]);
        assert_eq!(to_matrix(&v, 2, 3), m);
    }

    #[test]
    fn stacked_offsets() {
        let s = Shape::Stacked {
            blocks: vec![Shape::vector(3), Shape::matrix(2, 2)],
        };
        assert_eq!(s.len(), 7);
        assert_eq!(s.block_offsets(), vec![(0, 3), (3, 4)]);
    }
}
