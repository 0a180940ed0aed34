use super::{package, SolveResult};
use crate::constraints::LinearSystem;
use crate::error::Result;
use crate::linalg::{least_squares, solve_square};
use crate::model::{Backend, EntropyMode};
use crate::scalar::Scalar;

/// Verification tolerance for dense solutions.
const DIRECT_TOL: f64 = 1e-6;

/// Gaussian elimination with partial pivoting for square systems, normal
/// equations otherwise. A singular matrix is an error; a solution that leaves
/// the `[0, 1]` box is returned with `converged = false`.
pub fn solve_direct<T: Scalar>(system: &LinearSystem<T>) -> Result<SolveResult<T>> {
    let raw = if system.rows() == system.cols() {
        solve_square(&system.a, &system.b)?
    } else {
        least_squares(&system.a, &system.b)?
    };
    let slack = T::from_f64(DIRECT_TOL);
    let in_box = raw[..system.n_worlds]
        .iter()
        .all(|p| *p >= -slack.clone() && *p <= T::one() + slack.clone());
    let exact_residual = system.residual(&raw);
    let mut result = package(system, raw, EntropyMode::None, Backend::Direct, 0, DIRECT_TOL, None);
    result.converged = in_box && exact_residual <= DIRECT_TOL && result.dist.residual <= DIRECT_TOL;
    Ok(result)
}
