//! Kernels, saturation, fraction-free determinants, and exact solving.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use super::Matrix;
use crate::{Error, Result, Scalar};

/// Exact solution of `M x = b` with free variables pinned to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSolution<T: Clone + Integer> {
    pub values: Vec<Ratio<T>>,
    /// Dimension of the solution space of the homogeneous system.
    pub nullity: usize,
}

impl<T: Scalar> Matrix<T> {
    /// Basis of the integer kernel `{x : Mx = 0}`.
    ///
    /// The kernel of a map into a free module is saturated, and because the
    /// basis is read off a unimodular transform it generates the full integer
    /// kernel, not a finite-index subgroup. Rows are returned in Hermite
    /// normal form so the basis is canonical.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let hf = self.transpose().hnf();
        let rank = hf.pivots.len();
        let rows: Vec<Vec<T>> = (rank..hf.u.rows()).map(|i| hf.u.row(i)).collect();
        if rows.is_empty() {
            return rows;
        }
        let stacked = Matrix::from_rows(rows).expect("kernel rows have equal length");
        let canon = stacked.hnf();
        (0..canon.pivots.len()).map(|i| canon.h.row(i)).collect()
    }

    /// Number of pivots under fraction-free (Bareiss) elimination with full
    /// pivoting.
    pub fn rank(&self) -> usize {
        let (_, pivots, _) = bareiss(self.clone(), true);
        pivots
    }

    /// Exact determinant by fraction-free elimination. Errors on non-square
    /// input; the 0x0 determinant is 1.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let n = self.rows();
        if n == 0 {
            return Ok(T::one());
        }
        let (m, pivots, sign_flip) = bareiss(self.clone(), false);
        if pivots < n {
            return Ok(T::zero());
        }
        let d = m.at(n - 1, n - 1).clone();
        Ok(if sign_flip { -d } else { d })
    }

    /// Whether `v` lies in the lattice generated by the rows of `self`.
    pub fn row_span_contains(&self, v: &[T]) -> Result<bool> {
        if v.len() != self.cols() {
            return Err(Error::Dimension(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols()
            )));
        }
        let hf = self.hnf();
        let mut rem: Vec<T> = v.to_vec();
        for &(r, c) in &hf.pivots {
            let (q, residue) = rem[c].div_rem(hf.h.at(r, c));
            if !residue.is_zero() {
                return Ok(false);
            }
            for (e, h) in rem.iter_mut().zip(hf.h.row(r)) {
                *e = e.clone() - q.clone() * h;
            }
        }
        Ok(rem.iter().all(Zero::is_zero))
    }

    /// Exact rational solution of `M x = b`, or `None` when the system is
    /// inconsistent. Positive-dimensional solution spaces are reported via
    /// `nullity`, with the free variables set to zero.
    pub fn solve_rational(&self, b: &[T]) -> Result<Option<RationalSolution<T>>> {
        if b.len() != self.rows() {
            return Err(Error::Dimension(format!(
                "matrix has {} rows, right-hand side has length {}",
                self.rows(),
                b.len()
            )));
        }
        let mut aug: Matrix<Ratio<T>> = Matrix::from_fn(self.rows(), self.cols() + 1, |i, j| {
            if j < self.cols() {
                Ratio::from_integer(self.at(i, j).clone())
            } else {
                Ratio::from_integer(b[i].clone())
            }
        });

        let mut pivot_cols = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols() {
            let Some(p) = (row..aug.rows()).find(|&i| !aug.at(i, col).is_zero()) else {
                continue;
            };
            aug.swap_rows(row, p);
            for i in 0..aug.rows() {
                if i == row || aug.at(i, col).is_zero() {
                    continue;
                }
                let q = -(aug.at(i, col).clone() / aug.at(row, col).clone());
                for j in col..=self.cols() {
                    let v = aug.at(i, j).clone() + q.clone() * aug.at(row, j).clone();
                    *aug.at_mut(i, j) = v;
                }
            }
            pivot_cols.push((row, col));
            row += 1;
            if row == aug.rows() {
                break;
            }
        }
        // Inconsistent when a zero row has nonzero right-hand side.
        for i in row..aug.rows() {
            if !aug.at(i, self.cols()).is_zero() {
                return Ok(None);
            }
        }
        let mut values = vec![Ratio::zero(); self.cols()];
        for &(r, c) in &pivot_cols {
            values[c] = aug.at(r, self.cols()).clone() / aug.at(r, c).clone();
        }
        Ok(Some(RationalSolution {
            values,
            nullity: self.cols() - pivot_cols.len(),
        }))
    }
}

/// Basis of the saturation of the span of the input vectors:
/// `(span ⊗ Q) ∩ Z^n`. Computed as the kernel of the kernel, both of which
/// are saturated; the empty input returns an empty basis.
pub fn saturate<T: Scalar>(vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors.to_vec()).expect("saturate: ragged input");
    let kernel = m.kernel_basis();
    if kernel.is_empty() {
        return Matrix::<T>::identity(m.cols()).row_vectors();
    }
    let k = Matrix::from_rows(kernel).expect("kernel rows have equal length");
    k.kernel_basis()
}

/// Bareiss fraction-free elimination. With `full_pivoting` the search covers
/// the whole trailing submatrix (used for rank); otherwise only rows are
/// swapped and the parity of swaps is reported for the determinant.
fn bareiss<T: Scalar>(mut m: Matrix<T>, full_pivoting: bool) -> (Matrix<T>, usize, bool) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut sign_flip = false;
    let mut prev = T::one();
    let mut k = 0usize;
    while k < rows.min(cols) {
        if m.at(k, k).is_zero() {
            let mut found = None;
            'search: for i in k..rows {
                for j in k..cols {
                    if !full_pivoting && j > k {
                        continue;
                    }
                    if !m.at(i, j).is_zero() {
                        found = Some((i, j));
                        break 'search;
                    }
                }
            }
            let Some((pi, pj)) = found else { break };
            if pi != k {
                m.swap_rows(k, pi);
                sign_flip = !sign_flip;
            }
            if pj != k {
                m.swap_cols(k, pj);
                sign_flip = !sign_flip;
            }
        }
        for i in k + 1..rows {
            for j in k + 1..cols {
                let num = m.at(i, j).clone() * m.at(k, k).clone()
                    - m.at(i, k).clone() * m.at(k, j).clone();
                // Exact division by the previous pivot (Sylvester identity).
                *m.at_mut(i, j) = num / prev.clone();
            }
            *m.at_mut(i, k) = T::zero();
        }
        prev = m.at(k, k).clone();
        k += 1;
    }
    (m, k, sign_flip)
}
