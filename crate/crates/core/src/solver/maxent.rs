use super::{entropy_bits, package, world_mode, SolveResult, SolverConfig};
use crate::constraints::{LinearSystem, RowTag};
use crate::error::{PdError, Result};
use crate::linalg::{independent_rows, solve_square, Matrix};
use crate::model::{Backend, EntropyMode};
use crate::scalar::{Real, Scalar};
use crate::simplex::{solve_lp, LinearProgram, LpStatus};

const NEWTON_ITERATIONS: usize = 200;
const NEWTON_TOL: f64 = 1e-11;
// Accepted when the line search stalls on rounding near the optimum.
const NEWTON_STALL_TOL: f64 = 1e-8;

/// Worlds that every solution must leave at zero, found by sign arguments
/// alone. With `sum pi = 1`, each row gives `sum_j (a_ij - b_i) pi_j = 0`; if
/// the live coefficients of such a row share a sign, every world with a
/// nonzero coefficient is forced to zero. Repeats to a fixed point.
pub fn forced_zero_worlds<T: Scalar>(system: &LinearSystem<T>) -> Vec<bool> {
    let sys = system.to_f64();
    let w = sys.n_worlds;
    let mut zero = vec![false; w];
    let has_norm = sys.row_tags.contains(&RowTag::Normalization);
    let eps = 1e-12;
    loop {
        let mut changed = false;
        for i in 0..sys.rows() {
            if matches!(sys.row_tags[i], RowTag::Lagrange(_)) {
                continue;
            }
            let shift = if has_norm { sys.b[i] } else if sys.b[i].abs() <= eps { 0.0 } else { continue };
            let row = sys.a.row(i);
            let (mut pos, mut neg) = (false, false);
            for j in (0..w).filter(|&j| !zero[j]) {
                let c = row[j] - shift;
                pos |= c > eps;
                neg |= c < -eps;
            }
            if pos != neg {
                for j in 0..w {
                    if !zero[j] && (row[j] - shift).abs() > eps {
                        zero[j] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return zero;
        }
    }
}

/// Worlds that are positive in some solution of the system, by one LP:
/// maximise `sum t_j` subject to `A x = B s`, `x = t + u`, `0 <= t <= 1`,
/// `u, s >= 0`. Scaling a relative-interior solution saturates every `t_j`
/// on the support, so the optimum marks the support exactly. Returns an empty
/// set when the system has no nonnegative solution.
pub fn support_worlds<T: Scalar>(system: &LinearSystem<T>) -> Result<Vec<bool>> {
    let sys = system.to_f64();
    let forced = forced_zero_worlds(system);
    let live: Vec<usize> = (0..sys.n_worlds).filter(|&j| !forced[j]).collect();
    let mut support = vec![false; sys.n_worlds];
    if live.is_empty() {
        return Ok(support);
    }
    let rows: Vec<usize> =
        (0..sys.rows()).filter(|&i| !matches!(sys.row_tags[i], RowTag::Lagrange(_))).collect();
    let k = live.len();
    let m = rows.len();
    // Columns: t (k), u (k), s (1), v (k).
    let cols = 3 * k + 1;
    let mut a = Matrix::zeros(m + k, cols);
    let mut b = vec![0.0; m + k];
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in live.iter().enumerate() {
            let v = sys.a[(i, j)];
            a[(r, c)] = v;
            a[(r, k + c)] = v;
        }
        a[(r, 2 * k)] = -sys.b[i];
    }
    for c in 0..k {
        a[(m + c, c)] = 1.0;
        a[(m + c, 2 * k + 1 + c)] = 1.0;
        b[m + c] = 1.0;
    }
    let mut cost = vec![0.0; cols];
    cost.iter_mut().take(k).for_each(|v| *v = -1.0);
    match solve_lp(&LinearProgram { a, b, c: cost })? {
        LpStatus::Optimal { x, .. } => {
            for (c, &j) in live.iter().enumerate() {
                support[j] = x[c] > 0.5;
            }
            Ok(support)
        }
        _ => Ok(support),
    }
}

struct Newton {
    pi: Vec<f64>,
    converged: bool,
    iterations: usize,
}

/// Newton's method on the dual `D(l) = sum_j exp(a_j . l - 1) - l . b` over
/// the given columns; the primal point is `p_j = exp(a_j . l - 1)`.
fn newton(a: &Matrix<f64>, b: &[f64], cols: &[usize]) -> Newton {
    let m = a.rows;
    let k = cols.len();
    let sub = a.select_cols(cols);
    let mut lambda = vec![0.0; m];
    let primal = |lambda: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|c| {
                let z: f64 = (0..m).map(|i| sub[(i, c)] * lambda[i]).sum::<f64>() - 1.0;
                z.min(700.0).exp()
            })
            .collect()
    };
    let dual = |lambda: &[f64], p: &[f64]| -> f64 {
        p.iter().sum::<f64>() - lambda.iter().zip(b).map(|(l, bi)| l * bi).sum::<f64>()
    };
    let mut p = primal(&lambda);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < NEWTON_ITERATIONS {
        let g: Vec<f64> = (0..m).map(|i| sub.row(i).iter().zip(&p).map(|(x, y)| x * y).sum::<f64>() - b[i]).collect();
        let gmax = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        converged = gmax < NEWTON_STALL_TOL;
        if gmax < NEWTON_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let mut h = Matrix::zeros(m, m);
        for i in 0..m {
            for l in i..m {
                let v: f64 = (0..k).map(|c| sub[(i, c)] * sub[(l, c)] * p[c]).sum();
                h[(i, l)] = v;
                h[(l, i)] = v;
            }
        }
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = match solve_square(&h, &neg_g) {
            Ok(s) => s,
            Err(_) => {
                let scale = (0..m).map(|i| h[(i, i)]).fold(0.0f64, f64::max).max(1.0);
                for i in 0..m {
                    h[(i, i)] += 1e-10 * scale;
                }
                match solve_square(&h, &neg_g) {
                    Ok(s) => s,
                    Err(_) => {
                        converged = false;
                        break;
                    }
                }
            }
        };
        let slope: f64 = g.iter().zip(&step).map(|(x, y)| x * y).sum();
        let current = dual(&lambda, &p);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = lambda.iter().zip(&step).map(|(l, s)| l + t * s).collect();
            let tp = primal(&trial);
            let value = dual(&trial, &tp);
            if value.is_finite() && value <= current + 1e-4 * t * slope {
                lambda = trial;
                p = tp;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || (converged && t < 1e-3) {
            break;
        }
    }
    let mut pi = vec![0.0; a.cols];
    for (c, &j) in cols.iter().enumerate() {
        pi[j] = p[c];
    }
    Newton { pi, converged, iterations }
}

/// Reduces the system to independent rows over `cols` and runs Newton.
fn newton_on(sys: &LinearSystem<f64>, cols: &[usize]) -> Result<Newton> {
    let sub = sys.a.select_cols(cols);
    let basis = independent_rows(&sub, &sys.b);
    if basis.inconsistent_row.is_some() {
        return Err(PdError::Infeasible { mode: world_mode(sys) });
    }
    let a = sys.a.select_rows(&basis.kept);
    let b: Vec<f64> = basis.kept.iter().map(|&i| sys.b[i]).collect();
    Ok(newton(&a, &b, cols))
}

/// Maximum Shannon entropy distribution satisfying the system.
///
/// Worlds forced to zero by sign arguments are removed first; if the dual
/// Newton iteration then fails to converge, the exact support is found by
/// linear programming and Newton is rerun on it. Infeasible systems are an
/// error.
pub fn solve_max_entropy<T: Real>(system: &LinearSystem<T>, config: &SolverConfig) -> Result<SolveResult<T>> {
    config.validate()?;
    if system.is_augmented() {
        return Err(PdError::Unsupported("maximum entropy expects a non-augmented system".into()));
    }
    let sys = system.to_f64();
    let forced = forced_zero_worlds(&sys);
    let live: Vec<usize> = (0..sys.n_worlds).filter(|&j| !forced[j]).collect();
    if live.is_empty() {
        return Err(PdError::Infeasible { mode: world_mode(&sys) });
    }
    let mut run = newton_on(&sys, &live);
    let needs_lp = match &run {
        Ok(r) => !r.converged,
        Err(_) => false,
    };
    let mut iterations = run.as_ref().map(|r| r.iterations).unwrap_or(0);
    if needs_lp {
        let support = support_worlds(&sys)?;
        let cols: Vec<usize> = (0..sys.n_worlds).filter(|&j| support[j]).collect();
        if cols.is_empty() {
            return Err(PdError::Infeasible { mode: world_mode(&sys) });
        }
        run = newton_on(&sys, &cols);
        iterations += run.as_ref().map(|r| r.iterations).unwrap_or(0);
    }
    let run = run?;
    let raw: Vec<T> = run.pi.iter().map(|&p| T::from_f64(p)).collect();
    let objective = entropy_bits(&run.pi);
    let mut result = package(system, raw, EntropyMode::Max, Backend::Newton, iterations, config.tol, Some(objective));
    result.converged = run.converged && result.dist.residual <= config.tol;
    Ok(result)
}
