//! Probabilistic deduction over p-rules.
//!
//! A p-rule `<h <- b1, ..., bk> : theta` reads as `Pr(h | b1 ∧ ... ∧ bk) = theta`.
//! The crate compiles a rule set into a linear system over the `2^n` possible
//! worlds, solves it for a joint distribution (any feasible one, a bounded
//! marginal, the maximum-entropy one, or an L1 relaxation when the rules are
//! inconsistent) and reads literal probabilities, arguments, attacks and
//! labellings off the result.
//!
//! ```
//! use pd_core::{parse_pd, query::{Pipeline, literal_probability}};
//!
//! let fw = parse_pd("a <- ~b : 1.\nb <- : 1.").unwrap();
//! let a = fw.literal("a").unwrap();
//! let p = literal_probability(&fw, a, &Pipeline::default()).unwrap();
//! assert!(p.abs() < 1e-6);
//! ```

pub mod bench;
pub mod constraints;
pub mod error;
pub mod linalg;
pub mod model;
pub mod parser;
pub mod query;
pub mod reasoner;
pub mod report;
pub mod scalar;
pub mod simplex;
pub mod solver;

pub use constraints::{
    append_pcwa_rows, build_lagrange_augmented, build_owa, build_pcwa, group_heads, HeadGroup,
    LinearSystem, RowTag,
};
pub use error::{PdError, Result};
pub use model::{
    check_consistency_by_substitution, enumerate_worlds, marginal, satisfies, world_cap, Atom,
    Backend, ConsistencyReport, EntropyMode, JointDistribution, Literal, PDFramework, PRule, SolveMode, World,
    WorldMode,
};
pub use parser::{parse_aa, parse_pd, serialize_aa, serialize_pd, AAGraph, ParseError, SourceSpan};
pub use scalar::{Real, Scalar};
pub use solver::{SolveResult, SolverConfig};

/// Linear system over doubles, the default working precision.
pub type System = LinearSystem<f64>;
/// Linear system over exact rationals.
pub type ExactSystem = LinearSystem<num_rational::BigRational>;
/// Single-precision system, for memory-bound experiments.
pub type System32 = LinearSystem<f32>;
/// Joint distribution over doubles.
pub type Distribution = JointDistribution<f64>;
/// Joint distribution over exact rationals.
pub type ExactDistribution = JointDistribution<num_rational::BigRational>;
/// Solver output over doubles.
pub type Solution = SolveResult<f64>;
