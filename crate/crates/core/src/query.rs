//! Framework-level entry points: build the system for a world mode, solve it
//! with the chosen entropy criterion and backend, and read off marginals.

use crate::constraints::{build_owa, build_pcwa};
use crate::error::{PdError, Result};
use crate::model::{marginal, Literal, PDFramework};
pub use crate::model::{Backend, EntropyMode, WorldMode};
use crate::solver::{
    is_feasible, optimize_bounds, solve_direct, solve_l1_relaxed, solve_lp_vertex, solve_max_entropy, solve_max_linear_entropy,
    solve_sgd, Sense, SolveResult, SolverConfig,
};
use crate::System;

#[derive(Clone, Debug, PartialEq)]
pub struct Pipeline {
    pub mode: WorldMode,
    pub entropy: EntropyMode,
    pub backend: Backend,
    pub config: SolverConfig,
    /// Minimise the L1 violation instead of solving exactly; for
    /// inconsistent rule sets. Entropy mode and backend are ignored.
    pub relax: bool,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            mode: WorldMode::Pcwa,
            entropy: EntropyMode::Max,
            backend: Backend::Newton,
            config: SolverConfig::default(),
            relax: false,
        }
    }
}

impl Pipeline {
    pub fn new(mode: WorldMode, entropy: EntropyMode, backend: Backend) -> Self {
        Pipeline { mode, entropy, backend, config: SolverConfig::default(), relax: false }
    }
}

pub fn build_system(fw: &PDFramework, mode: WorldMode) -> Result<System> {
    match mode {
        WorldMode::Owa => build_owa(fw),
        WorldMode::Pcwa => build_pcwa(fw),
    }
}

/// `Ok` when the framework has a model under `mode`. Otherwise reports
/// whether the p-rules alone are unsatisfiable or only the closed-world rows
/// make them so.
pub fn check(fw: &PDFramework, mode: WorldMode) -> Result<()> {
    let owa = build_system(fw, WorldMode::Owa)?;
    if !is_feasible(&owa)?.0 {
        return Err(PdError::NotRulePsat);
    }
    if mode == WorldMode::Pcwa && !is_feasible(&build_system(fw, WorldMode::Pcwa)?)?.0 {
        return Err(PdError::NotPcwaConsistent);
    }
    Ok(())
}

/// Solves the framework. Semantic failures are reported as
/// `NotRulePsat`/`NotPcwaConsistent`; a feasible system on which an
/// iterative backend stalls comes back with `converged = false`.
pub fn solve_framework(fw: &PDFramework, pipeline: &Pipeline) -> Result<SolveResult<f64>> {
    let system = build_system(fw, pipeline.mode)?;
    let config = &pipeline.config;
    if pipeline.relax {
        return solve_l1_relaxed(&system, config);
    }
    let attempt = match (pipeline.entropy, pipeline.backend) {
        (EntropyMode::Max, _) => solve_max_entropy(&system, config),
        (EntropyMode::Linear, b @ (Backend::Direct | Backend::Sgd)) => solve_max_linear_entropy(&system, config, b),
        (EntropyMode::None, Backend::Sgd) => solve_sgd(&system, config),
        (EntropyMode::None, Backend::Direct) => solve_direct(&system),
        (EntropyMode::None, Backend::Lp) => solve_lp_vertex(&system),
        (entropy, backend) => {
            return Err(PdError::Unsupported(format!(
                "entropy mode {entropy:?} cannot use the {backend:?} backend"
            )))
        }
    };
    match attempt {
        Ok(r) if r.converged => Ok(r),
        Ok(r) => {
            check(fw, pipeline.mode)?;
            Ok(r)
        }
        Err(e) if e.is_semantic() || matches!(e, PdError::Singular) => {
            check(fw, pipeline.mode)?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

pub fn literal_probability(fw: &PDFramework, lit: Literal, pipeline: &Pipeline) -> Result<f64> {
    let r = solve_framework(fw, pipeline)?;
    Ok(marginal(&r.dist, &[lit]))
}

/// Tightest `[lower, upper]` for `Pr(lit)` over all models under `mode`.
pub fn literal_bounds(fw: &PDFramework, lit: Literal, mode: WorldMode) -> Result<(f64, f64)> {
    check(fw, mode)?;
    let system = build_system(fw, mode)?;
    let lo = optimize_bounds(&system, &[lit], Sense::Min)?;
    let hi = optimize_bounds(&system, &[lit], Sense::Max)?;
    Ok((lo.max(0.0), hi.min(1.0)))
}
