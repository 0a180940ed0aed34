//! Two-phase tableau simplex for `min c^T x  s.t.  A x = b, x >= 0`.
//!
//! Pricing is Dantzig's most-negative reduced cost; after a run of degenerate
//! pivots it switches to Bland's smallest-index rule, which cannot cycle,
//! until the objective moves again. Works over any [`Scalar`], so exact
//! rational programs are solved without tolerances.

use crate::error::{PdError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpStatus<T> {
    Optimal { x: Vec<T>, value: T },
    /// Phase one could not drive the artificial variables to zero; `excess`
    /// is the smallest total infeasibility found.
    Infeasible { excess: T },
    Unbounded,
}

impl<T> LpStatus<T> {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpStatus::Optimal { .. })
    }
}

const DEGENERATE_STREAK: usize = 50;

struct Tableau<T> {
    m: usize,
    width: usize,
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    cells: Vec<T>,
    basis: Vec<usize>,
    eps: T,
}

impl<T: Scalar> Tableau<T> {
    fn at(&self, i: usize, j: usize) -> &T {
        &self.cells[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> &T {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width;
        let p = self.at(r, s).clone();
        for j in 0..w {
            if !self.cells[r * w + j].is_zero() {
                self.cells[r * w + j] = self.cells[r * w + j].clone() / p.clone();
            }
        }
        let pivot_row: Vec<(usize, T)> = (0..w)
            .filter(|&j| !self.cells[r * w + j].is_zero())
            .map(|j| (j, self.cells[r * w + j].clone()))
            .collect();
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + s].clone();
            if f.is_zero() {
                continue;
            }
            for (j, v) in &pivot_row {
                let delta = f.clone() * v.clone();
                self.cells[i * w + j] -= delta;
            }
            self.cells[i * w + s] = T::zero();
        }
        self.basis[r] = s;
    }

    /// Rewrites the objective row as reduced costs for `cost` under the
    /// current basis.
    fn set_objective(&mut self, cost: &[T]) {
        let w = self.width;
        let obj = self.m * w;
        for j in 0..w {
            self.cells[obj + j] = if j < cost.len() { cost[j].clone() } else { T::zero() };
        }
        for i in 0..self.m {
            let cb = cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..w {
                let v = self.cells[i * w + j].clone();
                if !v.is_zero() {
                    self.cells[obj + j] -= cb.clone() * v;
                }
            }
        }
    }

    /// Runs simplex iterations over columns `< allowed`. Returns `false` when
    /// the program is unbounded.
    fn optimize(&mut self, allowed: usize, budget: &mut usize) -> Result<bool> {
        let w = self.width;
        let obj = self.m * w;
        let mut streak = 0usize;
        let neg_eps = -self.eps.clone();
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = neg_eps.clone();
            for j in 0..allowed {
                let d = &self.cells[obj + j];
                if *d < neg_eps {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if *d < best {
                        best = d.clone();
                        entering = Some(j);
                    }
                }
            }
            let Some(s) = entering else { return Ok(true) };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = self.at(i, s);
                if *a > self.eps {
                    let ratio = self.rhs(i).clone() / a.clone();
                    let better = match &leave {
                        None => true,
                        Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else { return Ok(false) };
            if *budget == 0 {
                return Err(PdError::PivotLimit(0));
            }
            *budget -= 1;
            if ratio <= self.eps {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, s);
        }
    }
}

/// Solves the program. Rows may be linearly dependent; redundant rows are
/// dropped after phase one.
pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpStatus<T>> {
    let m = lp.a.rows;
    let n = lp.a.cols;
    assert_eq!(lp.b.len(), m);
    assert_eq!(lp.c.len(), n);
    let eps = T::tolerance() * T::from_f64(10.0);
    let feas_tol = T::tolerance() * T::from_f64(1000.0);

    // Sign-normalise rows so the rhs is nonnegative.
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut rhs: Vec<T> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = lp.a.row(i).to_vec();
        let mut bi = lp.b[i].clone();
        if bi < T::zero() {
            row.iter_mut().for_each(|v| *v = -v.clone());
            bi = -bi;
        }
        rows.push(row);
        rhs.push(bi);
    }

    // Columns that are positive multiples of a unit vector start in the basis.
    let mut basis: Vec<Option<usize>> = vec![None; m];
    for j in 0..n {
        let mut hit = None;
        let mut count = 0;
        for (i, row) in rows.iter().enumerate() {
            if !row[j].is_zero() {
                count += 1;
                hit = Some(i);
            }
        }
        if count == 1 {
            let i = hit.unwrap();
            if basis[i].is_none() && rows[i][j] > T::zero() {
                let p = rows[i][j].clone();
                rows[i].iter_mut().for_each(|v| *v = v.clone() / p.clone());
                rhs[i] = rhs[i].clone() / p;
                basis[i] = Some(j);
            }
        }
    }
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| basis[i].is_none()).collect();
    let n_art = artificial_rows.len();
    let total = n + n_art;
    let width = total + 1;
    let mut cells = vec![T::zero(); (m + 1) * width];
    for i in 0..m {
        for j in 0..n {
            cells[i * width + j] = rows[i][j].clone();
        }
        cells[i * width + total] = rhs[i].clone();
    }
    for (k, &i) in artificial_rows.iter().enumerate() {
        cells[i * width + n + k] = T::one();
        basis[i] = Some(n + k);
    }
    let mut tab = Tableau {
        m,
        width,
        cells,
        basis: basis.into_iter().map(Option::unwrap).collect(),
        eps: eps.clone(),
    };
    let mut budget = 50 * (m + total) + 10_000;
    let limit = budget;
    let wrap = |e: PdError| match e {
        PdError::PivotLimit(_) => PdError::PivotLimit(limit),
        other => other,
    };

    if n_art > 0 {
        let mut cost = vec![T::zero(); total];
        for c in cost.iter_mut().skip(n) {
            *c = T::one();
        }
        tab.set_objective(&cost);
        tab.optimize(total, &mut budget).map_err(wrap)?;
        let excess: T = (0..m)
            .filter(|&i| tab.basis[i] >= n)
            .fold(T::zero(), |acc, i| acc + tab.rhs(i).clone());
        if excess > feas_tol {
            return Ok(LpStatus::Infeasible { excess });
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.m {
            if tab.basis[i] >= n {
                let col = (0..n).find(|&j| tab.at(i, j).abs() > eps);
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        remove_row(&mut tab, i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = lp.c.clone();
    cost.extend(std::iter::repeat_n(T::zero(), n_art));
    tab.set_objective(&cost);
    if !tab.optimize(n, &mut budget).map_err(wrap)? {
        return Ok(LpStatus::Unbounded);
    }
    let mut x = vec![T::zero(); n];
    for i in 0..tab.m {
        let j = tab.basis[i];
        if j < n {
            let v = tab.rhs(i).clone();
            x[j] = if v < T::zero() { T::zero() } else { v };
        }
    }
    let value = x
        .iter()
        .zip(&lp.c)
        .fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    Ok(LpStatus::Optimal { x, value })
}

fn remove_row<T: Scalar>(tab: &mut Tableau<T>, r: usize) {
    let w = tab.width;
    tab.cells.drain(r * w..(r + 1) * w);
    tab.basis.remove(r);
    tab.m -= 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn lp(rows: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> LinearProgram<f64> {
        LinearProgram { a: Matrix::from_rows(rows), b, c }
    }

    #[test]
    fn textbook_program() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6 -> (4, 0) with value 12.
        let p = lp(
            vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]],
            vec![4.0, 6.0],
            vec![-3.0, -2.0, 0.0, 0.0],
        );
        match solve_lp(&p).unwrap() {
            LpStatus::Optimal { x, value } => {
                assert!((value + 12.0).abs() < 1e-9);
                assert!((x[0] - 4.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0], vec![0.0, 0.0]);
        assert!(matches!(solve_lp(&p).unwrap(), LpStatus::Infeasible { .. }));
        let p = lp(vec![vec![1.0, -1.0]], vec![1.0], vec![0.0, -1.0]);
        assert_eq!(solve_lp(&p).unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let p = lp(
            vec![vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0], vec![1.0, 0.0, 0.0]],
            vec![1.0, 2.0, 0.25],
            vec![0.0, 1.0, 0.0],
        );
        match solve_lp(&p).unwrap() {
            LpStatus::Optimal { x, value } => {
                assert!(value.abs() < 1e-12);
                assert!((x[0] - 0.25).abs() < 1e-12 && (x[2] - 0.75).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_rationals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let p = LinearProgram {
            a: Matrix::from_rows(vec![vec![r(1, 1), r(1, 1), r(1, 1)], vec![r(1, 3), r(0, 1), r(-1, 1)]]),
            b: vec![r(1, 1), r(0, 1)],
            c: vec![r(-1, 1), r(0, 1), r(0, 1)],
        };
        match solve_lp(&p).unwrap() {
            LpStatus::Optimal { value, .. } => assert_eq!(value, r(-3, 4)),
            other => panic!("{other:?}"),
        }
    }
}
