//! Solvers for `A pi = B`: stochastic gradient descent, dense direct solves,
//! simplex-based bounds and relaxations, and maximum-entropy selection.

mod bounds;
mod direct;
mod l1;
mod linear_entropy;
mod maxent;
mod sgd;

pub use bounds::{is_feasible, optimize_bounds, solve_lp_vertex, Sense};
pub use direct::solve_direct;
pub use l1::solve_l1_relaxed;
pub use linear_entropy::{project_feasible, solve_max_linear_entropy};
pub use maxent::{forced_zero_worlds, solve_max_entropy, support_worlds};
pub use sgd::solve_sgd;

use crate::constraints::{LinearSystem, RowTag};
use crate::error::{PdError, Result};
use crate::linalg::dot;
use crate::model::{Backend, EntropyMode, JointDistribution, SolveMode, WorldMode};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Step size; `None` means `1 / 2^n`.
    pub learning_rate: Option<f64>,
    pub momentum: f64,
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
    /// Clip world probabilities to `[0, 1]` after each update.
    pub clip: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { learning_rate: None, momentum: 0.9, tol: 1e-3, max_epochs: 200_000, seed: 0, clip: true }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(lr) = self.learning_rate {
            if lr.is_nan() || lr <= 0.0 {
                return Err(PdError::Config(format!("learning rate must be positive, got {lr}")));
            }
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(PdError::Config(format!("momentum must lie in [0, 1), got {}", self.momentum)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(PdError::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    /// Clipped and normalised world probabilities.
    pub dist: JointDistribution<T>,
    pub converged: bool,
    pub epochs_used: usize,
    /// Entropy in bits, or the attained L1 value for relaxations.
    pub objective: Option<f64>,
    /// Unprocessed solution vector, including multipliers of augmented systems.
    pub raw: Vec<T>,
}

impl<T: Scalar> SolveResult<T> {
    pub fn multipliers(&self) -> &[T] {
        &self.raw[self.dist.probs.len().min(self.raw.len())..]
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

pub(crate) fn world_mode<T>(system: &LinearSystem<T>) -> WorldMode {
    if system.row_tags.iter().any(|t| matches!(t, RowTag::Pcwa(_))) {
        WorldMode::Pcwa
    } else {
        WorldMode::Owa
    }
}

/// Clips to `[0, 1]` and rescales to unit mass; an all-zero vector becomes uniform.
pub(crate) fn normalize<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut probs: Vec<T> = values
        .iter()
        .map(|v| {
            if *v < T::zero() {
                T::zero()
            } else if *v > T::one() {
                T::one()
            } else {
                v.clone()
            }
        })
        .collect();
    let total = probs.iter().fold(T::zero(), |acc, p| acc + p.clone());
    if total.is_zero() {
        let u = T::one() / T::from_usize(probs.len());
        probs.iter_mut().for_each(|p| *p = u.clone());
    } else if total != T::one() {
        probs.iter_mut().for_each(|p| *p = p.clone() / total.clone());
    }
    probs
}

/// Residual of the non-Lagrange rows against world probabilities only.
pub(crate) fn world_residual<T: Scalar>(system: &LinearSystem<T>, probs: &[T]) -> f64 {
    let w = system.n_worlds;
    (0..system.rows())
        .filter(|&i| !matches!(system.row_tags[i], RowTag::Lagrange(_)))
        .map(|i| (dot(&system.a.row(i)[..w], probs) - system.b[i].clone()).to_f64().abs())
        .fold(0.0, f64::max)
}

pub(crate) fn package<T: Scalar>(
    system: &LinearSystem<T>,
    raw: Vec<T>,
    entropy: EntropyMode,
    backend: Backend,
    epochs_used: usize,
    tol: f64,
    objective: Option<f64>,
) -> SolveResult<T> {
    let probs = normalize(&raw[..system.n_worlds]);
    let residual = world_residual(system, &probs);
    let objective = objective.or_else(|| {
        Some(entropy_bits(&probs.iter().map(Scalar::to_f64).collect::<Vec<_>>()))
    });
    SolveResult {
        converged: residual <= tol,
        dist: JointDistribution {
            probs,
            residual,
            mode: SolveMode { world: world_mode(system), entropy, backend },
        },
        epochs_used,
        objective,
        raw,
    }
}
