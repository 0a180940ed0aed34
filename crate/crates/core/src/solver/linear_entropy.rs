use super::{package, sgd::solve_sgd, world_mode, SolveResult, SolverConfig};
use crate::constraints::{build_lagrange_augmented, LinearSystem};
use crate::error::{PdError, Result};
use crate::linalg::{dot, independent_rows, solve_square, Matrix};
use crate::model::{Backend, EntropyMode};
use crate::scalar::Real;

const DYKSTRA_ITERATIONS: usize = 10_000;

/// Maximises linear entropy `sum pi (1 - pi)`, i.e. finds the minimum-norm
/// solution, through the Lagrange stationarity system.
///
/// Zero and dependent rows are dropped first so the augmented matrix is
/// nonsingular. If the stationary point leaves the box, the minimiser over
/// `{A pi = B, pi >= 0}` is computed by Dykstra projection instead. The
/// reported objective is the Shannon entropy of the result, in bits.
pub fn solve_max_linear_entropy<T: Real>(
    system: &LinearSystem<T>,
    config: &SolverConfig,
    backend: Backend,
) -> Result<SolveResult<T>> {
    config.validate()?;
    let basis = independent_rows(&system.a, &system.b);
    if basis.inconsistent_row.is_some() {
        return Err(PdError::Infeasible { mode: world_mode(system) });
    }
    let reduced = system.select_rows(&basis.kept);
    let augmented = build_lagrange_augmented(&reduced);
    let w = system.n_worlds;
    let (raw, epochs) = match backend {
        Backend::Direct => (solve_square(&augmented.a, &augmented.b)?, 0),
        Backend::Sgd => {
            let r = solve_sgd(&augmented, config)?;
            (r.raw, r.epochs_used)
        }
        other => {
            return Err(PdError::Unsupported(format!("linear entropy has no {other:?} backend")));
        }
    };
    let slack = T::from_f64(1e-9);
    let in_box = raw[..w].iter().all(|p| *p >= -slack);
    let raw = if in_box {
        raw
    } else {
        let mut pi = project_feasible(&reduced, DYKSTRA_ITERATIONS)?;
        pi.extend(std::iter::repeat_n(T::zero(), reduced.rows()));
        pi
    };
    Ok(package(system, raw, EntropyMode::Linear, backend, epochs, config.tol, None))
}

/// Euclidean projection of the uniform distribution onto
/// `{pi : A pi = B, pi >= 0}` by Dykstra's alternating projections. `system`
/// must have independent rows.
pub fn project_feasible<T: Real>(system: &LinearSystem<T>, iterations: usize) -> Result<Vec<T>> {
    let w = system.n_worlds;
    let a = system.a.select_cols(&(0..w).collect::<Vec<_>>());
    let m = a.rows;
    let gram = a.mul_transpose(&a);
    // Columns of the Gram inverse.
    let mut inv = Matrix::zeros(m, m);
    for k in 0..m {
        let mut e = vec![T::zero(); m];
        e[k] = T::one();
        let col = solve_square(&gram, &e)?;
        for i in 0..m {
            inv[(i, k)] = col[i];
        }
    }
    let project_affine = |y: &[T]| -> Vec<T> {
        let r: Vec<T> = (0..m).map(|i| dot(a.row(i), y) - system.b[i]).collect();
        let z = inv.mul_vec(&r);
        let mut out = y.to_vec();
        for i in 0..m {
            if z[i].is_zero() {
                continue;
            }
            for (j, v) in a.row(i).iter().enumerate() {
                if !v.is_zero() {
                    out[j] -= *v * z[i];
                }
            }
        }
        out
    };
    let u = T::one() / T::from_usize(w);
    let mut x = vec![u; w];
    let mut p = vec![T::zero(); w];
    let mut q = vec![T::zero(); w];
    let tiny = 1e-13;
    for _ in 0..iterations.max(1) {
        let shifted: Vec<T> = x.iter().zip(&p).map(|(a, b)| *a + *b).collect();
        let y = project_affine(&shifted);
        for j in 0..w {
            p[j] = shifted[j] - y[j];
        }
        let mut change = 0.0f64;
        for j in 0..w {
            let v = y[j] + q[j];
            let nx = if v < T::zero() { T::zero() } else { v };
            q[j] = v - nx;
            change = change.max((nx - x[j]).to_f64().abs());
            x[j] = nx;
        }
        if change < tiny && crate::linalg::residual_max(&a, &x, &system.b) < tiny * 1e3 {
            break;
        }
    }
    Ok(x)
}
