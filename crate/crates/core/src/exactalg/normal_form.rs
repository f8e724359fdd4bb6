//! Hermite and Smith normal forms with unimodular transforms.



use super::Matrix;
use crate::Scalar;

/// Row Hermite normal form `U * M = H` with `U` unimodular.
///
/// Convention: pivots positive, entries above each pivot reduced into
/// `[0, pivot)`, zero rows last. This makes class-group presentations
/// canonical and report output stable.
#[derive(Debug, Clone)]
pub struct HermiteForm<T> {
    pub h: Matrix<T>,
    pub u: Matrix<T>,
    /// Pivot positions `(row, col)` in `h`, top to bottom.
    pub pivots: Vec<(usize, usize)>,
}

/// Smith normal form `U * M * V = S` with `U`, `V` unimodular, the diagonal
/// of `S` non-negative and each entry dividing the next.
#[derive(Debug, Clone)]
pub struct SmithDecomposition<T> {
    pub s: Matrix<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
    /// Inverse of `v`, tracked during elimination; used to read off
    /// generators of the canonical decomposition of a quotient group.
    pub v_inv: Matrix<T>,
}

impl<T: Scalar> SmithDecomposition<T> {
    /// Diagonal of `S`, padded with zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<T> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.at(i, i).clone()).collect()
    }
}

impl<T: Scalar> Matrix<T> {
    /// Row Hermite normal form. Empty matrices return empty forms.
    pub fn hnf(&self) -> HermiteForm<T> {
        let mut h = self.clone();
        let mut u = Matrix::identity(self.rows());
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;

        for col in 0..h.cols() {
            if pivot_row == h.rows() {
                break;
            }
            // Gcd-eliminate the column below pivot_row.
            loop {
                let best = (pivot_row..h.rows())
                    .filter(|&i| !h.at(i, col).is_zero())
                    .min_by_key(|&i| h.at(i, col).abs());
                let Some(best) = best else { break };
                h.swap_rows(pivot_row, best);
                u.swap_rows(pivot_row, best);
                let mut dirty = false;
                for i in pivot_row + 1..h.rows() {
                    if h.at(i, col).is_zero() {
                        continue;
                    }
                    let q = -h.at(i, col).div_floor(h.at(pivot_row, col));
                    h.add_row_multiple(i, pivot_row, &q);
                    u.add_row_multiple(i, pivot_row, &q);
                    if !h.at(i, col).is_zero() {
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
            }
            if h.at(pivot_row, col).is_zero() {
                continue;
            }
            if h.at(pivot_row, col).is_negative() {
                h.negate_row(pivot_row);
                u.negate_row(pivot_row);
            }
            // Reduce entries above the pivot into [0, pivot).
            for i in 0..pivot_row {
                let q = -h.at(i, col).div_floor(h.at(pivot_row, col));
                if !q.is_zero() {
                    h.add_row_multiple(i, pivot_row, &q);
                    u.add_row_multiple(i, pivot_row, &q);
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }

        HermiteForm { h, u, pivots }
    }

    /// Smith normal form. The elimination keeps a running pivot of minimal
    /// absolute value, which guarantees termination and the divisibility
    /// chain `d_i | d_{i+1}`.
    pub fn snf(&self) -> SmithDecomposition<T> {
        let mut s = self.clone();
        let mut u = Matrix::identity(self.rows());
        let mut v = Matrix::identity(self.cols());
        let mut v_inv = Matrix::<T>::identity(self.cols());
        let (rows, cols) = (self.rows(), self.cols());

        // Column op on `s`/`v` paired with the inverse row op on `v_inv`,
        // so that v * v_inv = identity throughout.
        macro_rules! col_swap {
            ($a:expr, $b:expr) => {{
                s.swap_cols($a, $b);
                v.swap_cols($a, $b);
                v_inv.swap_rows($a, $b);
            }};
        }
        macro_rules! col_add {
            ($dst:expr, $src:expr, $q:expr) => {{
                let q = $q;
                s.add_col_multiple($dst, $src, &q);
                v.add_col_multiple($dst, $src, &q);
                v_inv.add_row_multiple($src, $dst, &(-q));
            }};
        }

        let mut t = 0usize;
        while t < rows.min(cols) {
            // Minimal nonzero entry of the trailing submatrix becomes pivot.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if s.at(i, j).is_zero() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if s.at(pi, pj).abs() <= s.at(i, j).abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            col_swap!(t, pj);

            'reduce: loop {
                // Clear column t.
                for i in 0..rows {
                    if i == t || s.at(i, t).is_zero() {
                        continue;
                    }
                    let q = -s.at(i, t).div_floor(s.at(t, t));
                    s.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    if !s.at(i, t).is_zero() {
                        // Remainder is strictly smaller; promote it.
                        s.swap_rows(t, i);
                        u.swap_rows(t, i);
                        continue 'reduce;
                    }
                }
                // Clear row t.
                for j in 0..cols {
                    if j == t || s.at(t, j).is_zero() {
                        continue;
                    }
                    let q = -s.at(t, j).div_floor(s.at(t, t));
                    col_add!(j, t, q);
                    if !s.at(t, j).is_zero() {
                        col_swap!(t, j);
                        continue 'reduce;
                    }
                }
                // Row and column are clear; enforce divisibility of the
                // trailing submatrix by the pivot.
                let mut offender = None;
                'scan: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !s.at(i, j).mod_floor(s.at(t, t)).is_zero() {
                            offender = Some(i);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        let one = T::one();
                        s.add_row_multiple(t, i, &one);
                        u.add_row_multiple(t, i, &one);
                        continue 'reduce;
                    }
                    None => break 'reduce,
                }
            }
            t += 1;
        }

        // Normalize diagonal signs.
        for i in 0..rows.min(cols) {
            if s.at(i, i).is_negative() {
                s.negate_row(i);
                u.negate_row(i);
            }
        }

        SmithDecomposition { s, u, v, v_inv }
    }
}
