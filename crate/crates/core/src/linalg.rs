//! Dense Gaussian elimination over a [`Field`].

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// Row-major dense matrix of field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Submatrix keeping the listed columns, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, field: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, pr);
            let inv = field.inv(self.get(row, col)).expect("pivot is nonzero");
            for c in col..self.cols {
                let v = field.mul(self.get(row, c), inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = field.sub(self.get(r, c), field.mul(factor, self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.clone().rref(field).len()
    }
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// No solution exists.
    Inconsistent,
    /// A particular solution (free variables set to zero) and the rank of `A`.
    Found { x: Vec<Elem>, rank: usize },
}

/// Solves `A x = b` by elimination on the augmented matrix.
pub fn solve(field: &Field, a: &Matrix, b: &[Elem]) -> Result<Solution> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    for (r, &rhs) in b.iter().enumerate() {
        for c in 0..n {
            aug.set(r, c, a.get(r, c));
        }
        aug.set(r, n, rhs);
    }
    let pivots = aug.rref(field);
    if pivots.last() == Some(&n) {
        return Ok(Solution::Inconsistent);
    }
    let mut x = vec![Elem::ZERO; n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, n);
    }
    Ok(Solution::Found { x, rank: pivots.len() })
}

/// Inverse of a square matrix.
pub fn invert(field: &Field, a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.cols() });
    }
    let mut aug = Matrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, a.get(r, c));
        }
        aug.set(r, n + r, Elem::ONE);
    }
    let pivots = aug.rref(field);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::Precondition("matrix is singular".into()));
    }
    let mut out = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, aug.get(r, n + c));
        }
    }
    Ok(out)
}
