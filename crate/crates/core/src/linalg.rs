//! Dense row-major matrices and Gaussian elimination.

use crate::error::{PdError, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n = rows.len();
        Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: Vec<T>) {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        assert_eq!(row.len(), self.cols, "row width mismatch");
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &i in keep {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: keep.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(keep.iter().map(|&j| row[j].clone()));
        }
        Matrix { rows: self.rows, cols: keep.len(), data }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self * other^T`.
    pub fn mul_transpose(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for k in 0..other.rows {
                out[(i, k)] = dot(self.row(i), other.row(k));
            }
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x.clone() * y.clone();
        }
    }
    s
}

/// Max-norm of `a x - b`.
pub fn residual_max<T: Scalar>(a: &Matrix<T>, x: &[T], b: &[T]) -> f64 {
    (0..a.rows)
        .map(|i| (dot(a.row(i), x) - b[i].clone()).to_f64().abs())
        .fold(0.0, f64::max)
}

fn max_abs<T: Scalar>(values: &[T]) -> f64 {
    values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}

/// Solves a square system by Gaussian elimination with partial pivoting.
pub fn solve_square<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows;
    assert_eq!(a.cols, n, "solve_square needs a square matrix");
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = max_abs(&m.data).max(1.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[(col, col)].abs();
        for r in col + 1..n {
            let v = m[(r, col)].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best.is_zero() || best.to_f64() <= T::tolerance().to_f64() * scale {
            return Err(PdError::Singular);
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        let p = m[(col, col)].clone();
        for r in col + 1..n {
            if m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone() / p.clone();
            for j in col..n {
                if !m[(col, j)].is_zero() {
                    let delta = factor.clone() * m[(col, j)].clone();
                    m[(r, j)] -= delta;
                }
            }
            let delta = factor * rhs[col].clone();
            rhs[r] -= delta;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i].clone();
        for j in i + 1..n {
            if !m[(i, j)].is_zero() {
                s -= m[(i, j)].clone() * x[j].clone();
            }
        }
        x[i] = s / m[(i, i)].clone();
    }
    Ok(x)
}

/// Least squares through the normal equations `A^T A x = A^T b`.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let at = a.transpose();
    let ata = at.mul_transpose(&at);
    let atb = at.mul_vec(b);
    solve_square(&ata, &atb)
}

/// Outcome of a row-echelon pass over `[A | b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowBasis {
    /// Indices of linearly independent rows, in original order.
    pub kept: Vec<usize>,
    /// A dependent row whose right-hand side contradicts the kept rows.
    pub inconsistent_row: Option<usize>,
}

/// Greedily keeps each row of `a` that is independent of the rows kept so
/// far, and flags the first dependent row with an incompatible `b` entry.
/// Float tolerances are relative to each row's magnitude.
pub fn independent_rows<T: Scalar>(a: &Matrix<T>, b: &[T]) -> RowBasis {
    let cols = a.cols;
    // Reduced basis rows with their pivot column, kept in echelon form.
    let mut basis: Vec<(usize, Vec<T>, T)> = Vec::new();
    let mut kept = Vec::new();
    let mut inconsistent_row = None;
    let tol = T::tolerance().to_f64();
    for i in 0..a.rows {
        let mut row = a.row(i).to_vec();
        let mut rhs = b[i].clone();
        let scale = max_abs(&row).max(rhs.to_f64().abs()).max(1.0);
        for (pivot, brow, brhs) in &basis {
            if row[*pivot].is_zero() {
                continue;
            }
            let factor = row[*pivot].clone();
            for j in 0..cols {
                if !brow[j].is_zero() {
                    row[j] -= factor.clone() * brow[j].clone();
                }
            }
            rhs -= factor * brhs.clone();
            row[*pivot] = T::zero();
        }
        let (mut pivot, mut best) = (None, 0.0);
        for (j, v) in row.iter().enumerate() {
            let m = v.to_f64().abs();
            if !v.is_zero() && m > best {
                best = m;
                pivot = Some(j);
            }
        }
        match pivot {
            Some(p) if best > tol * scale * 100.0 || tol == 0.0 => {
                let pv = row[p].clone();
                for v in row.iter_mut() {
                    *v = v.clone() / pv.clone();
                }
                rhs /= pv;
                // Keep earlier basis rows reduced against the new pivot.
                for (_, brow, brhs) in basis.iter_mut() {
                    if brow[p].is_zero() {
                        continue;
                    }
                    let factor = brow[p].clone();
                    for j in 0..cols {
                        if !row[j].is_zero() {
                            brow[j] -= factor.clone() * row[j].clone();
                        }
                    }
                    *brhs -= factor * rhs.clone();
                    brow[p] = T::zero();
                }
                basis.push((p, row, rhs));
                kept.push(i);
            }
            _ => {
                let off = rhs.to_f64().abs();
                let bad = if tol == 0.0 { !rhs.is_zero() } else { off > 1e-9 * scale };
                if bad && inconsistent_row.is_none() {
                    inconsistent_row = Some(i);
                }
            }
        }
    }
    RowBasis { kept, inconsistent_row }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn identity_solve() {
        let b = vec![0.3, -1.0, 2.5];
        let x = solve_square(&Matrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn pivoting_needed() {
        let a = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 1.0]]);
        let x: Vec<f64> = solve_square(&a, &[2.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_detected() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(solve_square(&a, &[1.0, 2.0]), Err(PdError::Singular)));
    }

    #[test]
    fn exact_rational_solve() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let a = Matrix::from_rows(vec![vec![r(1, 3), r(1, 1)], vec![r(2, 1), r(-1, 2)]]);
        let x = solve_square(&a, &[r(1, 1), r(0, 1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![r(1, 1), r(0, 1)]);
    }

    #[test]
    fn dependent_and_inconsistent_rows() {
        let a = Matrix::from_rows(vec![
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![2.0, 2.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 2.0, 1.0],
        ]);
        let basis = independent_rows(&a, &[1.0, 0.0, 2.0, 0.5, 1.5]);
        assert_eq!(basis.kept, vec![0, 3]);
        assert_eq!(basis.inconsistent_row, None);
        let basis = independent_rows(&a, &[1.0, 0.0, 2.0, 0.5, 1.7]);
        assert_eq!(basis.inconsistent_row, Some(4));
    }

    #[test]
    fn normal_equations() {
        let a = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let x: Vec<f64> = least_squares(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
