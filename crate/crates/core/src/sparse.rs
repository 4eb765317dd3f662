//! Compressed sparse column storage with the handful of kernels the solvers need.

use crate::scalar::Scalar;

/// Column-compressed sparse matrix. Column `j` occupies
/// `row_idx[col_ptr[j]..col_ptr[j + 1]]`, rows sorted ascending, no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T> {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

/// Sparse vector given as parallel index/value arrays.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector<T> {
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Scalar> SparseVector<T> {
    pub fn new() -> Self {
        Self { indices: Vec::new(), values: Vec::new() }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn clear(&mut self) {
        self.indices.clear();
        self.values.clear();
    }

    pub fn push(&mut self, index: usize, value: T) {
        self.indices.push(index);
        self.values.push(value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn norm_sq(&self) -> T {
        self.values.iter().map(|&v| v * v).sum()
    }

    pub fn to_dense(&self, len: usize) -> Vec<T> {
        let mut out = vec![T::zero(); len];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    /// Builds the sparse representation of the nonzero entries of `dense`.
    pub fn from_dense(dense: &[T]) -> Self {
        let mut out = Self::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != T::zero() {
                out.push(i, v);
            }
        }
        out
    }
}

impl<T: Scalar> CscMatrix<T> {
    /// Assembles a matrix from `(row, col, value)` triplets. Repeated
    /// coordinates are summed; explicit zeros are kept out of the pattern.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut sorted: Vec<(usize, usize, T)> = triplets
            .iter()
            .copied()
            .inspect(|&(r, c, _)| {
                assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            })
            .collect();
        sorted.sort_by_key(|t| (t.1, t.0));

        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<T> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_idx.push(r);
            values.push(v);
            col_ptr[c + 1] += 1;
        }
        for j in 0..ncols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut m = Self { nrows, ncols, col_ptr, row_idx, values };
        m.drop_zeros();
        m
    }

    /// Builds a matrix from dense row-major data.
    pub fn from_dense_rows(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense rows");
            for (j, &v) in row.iter().enumerate() {
                if v != T::zero() {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &trip)
    }

    fn drop_zeros(&mut self) {
        let mut write = 0;
        let mut new_ptr = vec![0usize; self.ncols + 1];
        for j in 0..self.ncols {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                if self.values[p] != T::zero() {
                    self.row_idx[write] = self.row_idx[p];
                    self.values[write] = self.values[p];
                    write += 1;
                }
            }
            new_ptr[j + 1] = write;
        }
        self.row_idx.truncate(write);
        self.values.truncate(write);
        self.col_ptr = new_ptr;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> (&[usize], &[T]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    pub fn col_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    /// `a_jᵀ y`. Every caller that needs a column inner product goes through
    /// here, so dense and screened scans agree bit for bit.
    #[inline]
    pub fn col_dot(&self, j: usize, y: &[T]) -> T {
        let (rows, vals) = self.column(j);
        let mut acc = T::zero();
        for (&i, &v) in rows.iter().zip(vals) {
            acc += v * y[i];
        }
        acc
    }

    /// `out += alpha * a_j`.
    #[inline]
    pub fn axpy_col(&self, alpha: T, j: usize, out: &mut [T]) {
        let (rows, vals) = self.column(j);
        for (&i, &v) in rows.iter().zip(vals) {
            out[i] += alpha * v;
        }
    }

    pub fn col_norm1(&self, j: usize) -> T {
        self.column(j).1.iter().map(|v| v.abs()).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut out = vec![T::zero(); self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != T::zero() {
                self.axpy_col(xj, j, &mut out);
            }
        }
        out
    }

    /// `Aᵀ y`.
    pub fn tr_mul_vec(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.nrows);
        (0..self.ncols).map(|j| self.col_dot(j, y)).collect()
    }

    /// Dense row-major copy; intended for tests and small diagnostics.
    pub fn to_dense_rows(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.ncols]; self.nrows];
        for j in 0..self.ncols {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                out[i][j] = v;
            }
        }
        out
    }

    /// Appends a column given as `(row, value)` pairs.
    pub fn push_column(&mut self, entries: &[(usize, T)]) {
        let mut entries: Vec<(usize, T)> =
            entries.iter().copied().filter(|&(_, v)| v != T::zero()).collect();
        entries.sort_by_key(|e| e.0);
        for (r, v) in entries {
            assert!(r < self.nrows);
            if self.row_idx.len() > self.col_ptr[self.ncols] && *self.row_idx.last().unwrap() == r
            {
                *self.values.last_mut().unwrap() += v;
            } else {
                self.row_idx.push(r);
                self.values.push(v);
            }
        }
        self.col_ptr.push(self.row_idx.len());
        self.ncols += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CscMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 0, 2.0), (1, 2, 0.0), (1, 1, -1.0)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.column(0), (&[0usize][..], &[3.0][..]));
        assert_eq!(m.col_nnz(2), 0);
    }

    #[test]
    fn products_match_dense() {
        let rows = vec![vec![1.0, 2.0, 0.0], vec![0.0, -1.0, 4.0]];
        let m = CscMatrix::from_dense_rows(&rows);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        assert_eq!(m.tr_mul_vec(&[1.0, 2.0]), vec![1.0, 0.0, 8.0]);
        assert_eq!(m.to_dense_rows(), rows);
        assert_eq!(m.col_norm1(1), 3.0);
    }

    #[test]
    fn push_column_extends() {
        let mut m = CscMatrix::from_dense_rows(&[vec![1.0], vec![0.0]]);
        m.push_column(&[(1, 5.0), (0, -1.0)]);
        assert_eq!(m.to_dense_rows(), vec![vec![1.0, -1.0], vec![0.0, 5.0]]);
    }
}
