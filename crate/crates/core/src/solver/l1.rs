use super::{package, SolveResult, SolverConfig};
use crate::constraints::{LinearSystem, RowTag};
use crate::error::{PdError, Result};
use crate::linalg::Matrix;
use crate::model::{Backend, EntropyMode};
use crate::scalar::Scalar;
use crate::simplex::{solve_lp, LinearProgram, LpStatus};

/// Minimises `sum_i |a_i . pi - b_i|` over the probability simplex.
///
/// Every row except normalisation is relaxed by splitting its residual into
/// `p_i - q_i` with `p, q >= 0` and charging `p_i + q_i`; normalisation stays
/// exact. Always yields a distribution, with the L1 value as objective.
pub fn solve_l1_relaxed<T: Scalar>(system: &LinearSystem<T>, config: &SolverConfig) -> Result<SolveResult<T>> {
    config.validate()?;
    let w = system.n_worlds;
    let relaxed: Vec<usize> = (0..system.rows())
        .filter(|&i| !matches!(system.row_tags[i], RowTag::Normalization | RowTag::Lagrange(_)))
        .collect();
    let k = relaxed.len();
    let cols = w + 2 * k;
    let mut a = Matrix::zeros(k + 1, cols);
    let mut b = Vec::with_capacity(k + 1);
    for (r, &i) in relaxed.iter().enumerate() {
        for j in 0..w {
            a[(r, j)] = system.a[(i, j)].clone();
        }
        a[(r, w + r)] = -T::one();
        a[(r, w + k + r)] = T::one();
        b.push(system.b[i].clone());
    }
    for j in 0..w {
        a[(k, j)] = T::one();
    }
    b.push(T::one());
    let mut c = vec![T::zero(); cols];
    c.iter_mut().skip(w).for_each(|v| *v = T::one());
    match solve_lp(&LinearProgram { a, b, c })? {
        LpStatus::Optimal { x, value } => {
            let mut result = package(
                system,
                x[..w].to_vec(),
                EntropyMode::None,
                Backend::Lp,
                0,
                config.tol,
                Some(value.to_f64()),
            );
            result.converged = true;
            Ok(result)
        }
        _ => Err(PdError::Unsupported("L1 relaxation failed to find a distribution".into())),
    }
}
