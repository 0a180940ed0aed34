use super::{package, world_mode, SolveResult};
use crate::constraints::LinearSystem;
use crate::error::{PdError, Result};
use crate::linalg::Matrix;
use crate::model::{Backend, ConjMask, EntropyMode, Literal};
use crate::scalar::Scalar;
use crate::simplex::{solve_lp, LinearProgram, LpStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

fn world_columns<T: Scalar>(system: &LinearSystem<T>) -> Matrix<T> {
    if system.is_augmented() {
        system.a.select_cols(&(0..system.n_worlds).collect::<Vec<_>>())
    } else {
        system.a.clone()
    }
}

fn run<T: Scalar>(system: &LinearSystem<T>, c: Vec<T>) -> Result<LpStatus<T>> {
    solve_lp(&LinearProgram { a: world_columns(system), b: system.b.clone(), c })
}

/// Smallest or largest probability of the conjunction `target` over all
/// nonnegative solutions of the system.
pub fn optimize_bounds<T: Scalar>(system: &LinearSystem<T>, target: &[Literal], sense: Sense) -> Result<T> {
    let mask = ConjMask::new(system.n_atoms, target);
    let weight = match sense {
        Sense::Min => T::one(),
        Sense::Max => -T::one(),
    };
    let c: Vec<T> = (0..system.n_worlds)
        .map(|j| if mask.is_some_and(|m| m.matches(j)) { weight.clone() } else { T::zero() })
        .collect();
    match run(system, c)? {
        LpStatus::Optimal { value, .. } => Ok(match sense {
            Sense::Min => value,
            Sense::Max => -value,
        }),
        LpStatus::Infeasible { .. } => Err(PdError::Infeasible { mode: world_mode(system) }),
        LpStatus::Unbounded => unreachable!("probabilities are bounded by the normalisation row"),
    }
}

/// Whether some `pi >= 0` satisfies the system, with the phase-one excess.
pub fn is_feasible<T: Scalar>(system: &LinearSystem<T>) -> Result<(bool, T)> {
    match run(system, vec![T::zero(); system.n_worlds])? {
        LpStatus::Optimal { .. } => Ok((true, T::zero())),
        LpStatus::Infeasible { excess } => Ok((false, excess)),
        LpStatus::Unbounded => unreachable!("zero objective"),
    }
}

/// A vertex solution favouring low-index worlds: minimises `sum_j j * pi_j`.
pub fn solve_lp_vertex<T: Scalar>(system: &LinearSystem<T>) -> Result<SolveResult<T>> {
    let c: Vec<T> = (0..system.n_worlds).map(T::from_usize).collect();
    match run(system, c)? {
        LpStatus::Optimal { x, .. } => {
            Ok(package(system, x, EntropyMode::None, Backend::Lp, 0, 1e-6, None))
        }
        _ => Err(PdError::Infeasible { mode: world_mode(system) }),
    }
}
