//! Random satisfiable rule sets and solver timing.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraints::build_owa;
use crate::error::{PdError, Result};
use crate::model::{check_cap, marginal, Backend, EntropyMode, JointDistribution, Literal, PDFramework, SolveMode, WorldMode};
use crate::solver::{
    entropy_bits, solve_direct, solve_lp_vertex, solve_max_entropy, solve_max_linear_entropy, solve_sgd, SolveResult,
    SolverConfig,
};
use crate::System;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchBackend {
    /// Feasibility by SGD.
    Sgd,
    /// Feasibility by dense elimination or normal equations.
    Direct,
    /// Maximum linear entropy, Lagrange system solved directly.
    DirectEntropy,
    /// Maximum linear entropy, Lagrange system solved by SGD.
    SgdEntropy,
    /// Maximum Shannon entropy.
    MaxEntropy,
    /// LP vertex.
    Lp,
}

impl BenchBackend {
    pub const ALL: [BenchBackend; 6] = [
        BenchBackend::Sgd,
        BenchBackend::Direct,
        BenchBackend::DirectEntropy,
        BenchBackend::SgdEntropy,
        BenchBackend::MaxEntropy,
        BenchBackend::Lp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchBackend::Sgd => "sgd",
            BenchBackend::Direct => "direct",
            BenchBackend::DirectEntropy => "direct-entropy",
            BenchBackend::SgdEntropy => "sgd-entropy",
            BenchBackend::MaxEntropy => "max-entropy",
            BenchBackend::Lp => "lp",
        }
    }

    pub fn solve(self, system: &System, config: &SolverConfig) -> Result<SolveResult<f64>> {
        match self {
            BenchBackend::Sgd => solve_sgd(system, config),
            BenchBackend::Direct => solve_direct(system),
            BenchBackend::DirectEntropy => solve_max_linear_entropy(system, config, Backend::Direct),
            BenchBackend::SgdEntropy => solve_max_linear_entropy(system, config, Backend::Sgd),
            BenchBackend::MaxEntropy => solve_max_entropy(system, config),
            BenchBackend::Lp => solve_lp_vertex(system),
        }
    }
}

impl FromStr for BenchBackend {
    type Err = PdError;

    fn from_str(s: &str) -> Result<Self> {
        BenchBackend::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| PdError::Bench(format!("unknown backend `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSpec {
    pub n_literals: usize,
    pub n_rules: usize,
    /// Longest rule, head included; `None` means the language size.
    pub max_body: Option<usize>,
    pub seed: u64,
    pub backends: Vec<BenchBackend>,
    pub repetitions: usize,
    /// Time system construction together with the solve.
    pub include_build: bool,
    pub config: SolverConfig,
}

impl BenchSpec {
    pub fn new(n_literals: usize, n_rules: usize, seed: u64) -> Self {
        BenchSpec {
            n_literals,
            n_rules,
            max_body: None,
            seed,
            backends: vec![BenchBackend::Sgd, BenchBackend::DirectEntropy],
            repetitions: 10,
            include_build: false,
            config: SolverConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_rules == 0 {
            return Err(PdError::Bench("need at least one rule".into()));
        }
        if self.n_literals == 0 {
            return Err(PdError::Bench("need at least one atom".into()));
        }
        if self.max_body == Some(0) {
            return Err(PdError::Bench("rule length must be at least one".into()));
        }
        check_cap(self.n_literals)
    }
}

/// A uniform point of the probability simplex over `2^n` worlds, from
/// normalised uniform draws.
pub fn sample_distribution(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..1usize << n).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Random rules whose probabilities are read off a sampled distribution, so
/// the result is satisfiable by construction.
pub fn generate_satisfiable(spec: &BenchSpec) -> Result<PDFramework> {
    generate_with_distribution(spec, 0).map(|(fw, _)| fw)
}

/// As [`generate_satisfiable`] for repetition `rep`, also returning the
/// generating distribution. Each repetition draws from its own stream.
pub fn generate_with_distribution(spec: &BenchSpec, rep: u64) -> Result<(PDFramework, Vec<f64>)> {
    spec.validate()?;
    let n = spec.n_literals;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(rep);
    let pi = sample_distribution(n, &mut rng);
    let dist = JointDistribution {
        probs: pi.clone(),
        residual: 0.0,
        mode: SolveMode { world: WorldMode::Owa, entropy: EntropyMode::None, backend: Backend::Direct },
    };
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut fw = PDFramework::with_atoms(&names);
    let longest = spec.max_body.unwrap_or(n).min(n);
    let budget = 1000 * spec.n_rules;
    let mut attempts = 0;
    while fw.rules.len() < spec.n_rules {
        attempts += 1;
        if attempts > budget {
            return Err(PdError::Bench(format!("gave up after {budget} draws")));
        }
        let head = Literal { atom: rng.gen_range(0..n), positive: rng.gen() };
        let body_len = rng.gen_range(1..=longest) - 1;
        let mut atoms: Vec<usize> = (0..n).filter(|&a| a != head.atom).collect();
        let mut body = Vec::with_capacity(body_len);
        for _ in 0..body_len {
            let a = atoms.swap_remove(rng.gen_range(0..atoms.len()));
            body.push(Literal { atom: a, positive: rng.gen() });
        }
        let p_body = marginal(&dist, &body);
        if p_body <= 1e-12 {
            continue;
        }
        let mut joint = body.clone();
        joint.push(head);
        let theta = (marginal(&dist, &joint) / p_body).min(1.0);
        if theta <= 0.0 {
            continue;
        }
        fw.push_rule(head, body, theta)?;
    }
    Ok((fw, pi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub backend: BenchBackend,
    pub n_literals: usize,
    pub n_rules: usize,
    pub seed: u64,
    pub rep: u64,
    pub wall_ms: f64,
    pub converged: bool,
    pub residual: f64,
    pub entropy_bits: f64,
}

pub const CSV_HEADER: &str = "backend,n_literals,n_rules,seed,rep,wall_ms,converged,residual,entropy_bits";

/// Generates `repetitions` instances and solves each one with every backend,
/// over the open-world encoding. A backend error yields a non-converged row
/// with NaN residual and entropy.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for rep in 0..spec.repetitions as u64 {
        let (fw, _) = generate_with_distribution(spec, rep)?;
        let prebuilt = build_owa::<f64>(&fw)?;
        for &backend in &spec.backends {
            let start = Instant::now();
            let outcome = if spec.include_build {
                build_owa::<f64>(&fw).and_then(|s| backend.solve(&s, &spec.config))
            } else {
                backend.solve(&prebuilt, &spec.config)
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let (converged, residual, entropy) = match outcome {
                Ok(r) => (r.converged, r.dist.residual, entropy_bits(&r.dist.probs)),
                Err(_) => (false, f64::NAN, f64::NAN),
            };
            rows.push(BenchRow {
                backend,
                n_literals: spec.n_literals,
                n_rules: spec.n_rules,
                seed: spec.seed,
                rep,
                wall_ms,
                converged,
                residual,
                entropy_bits: entropy,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            r.backend.name().to_string(),
            r.n_literals.to_string(),
            r.n_rules.to_string(),
            r.seed.to_string(),
            r.rep.to_string(),
            format!("{:.3}", r.wall_ms),
            r.converged.to_string(),
            format!("{:e}", r.residual),
            format!("{:.6}", r.entropy_bits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchSummary {
    pub backend: BenchBackend,
    pub runs: usize,
    pub mean_wall_ms: f64,
    pub convergence_rate: f64,
    pub mean_residual: f64,
    pub mean_entropy_bits: f64,
}

/// Per-backend means, in the order backends first appear.
pub fn summarize(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut order: Vec<BenchBackend> = Vec::new();
    for r in rows {
        if !order.contains(&r.backend) {
            order.push(r.backend);
        }
    }
    order
        .into_iter()
        .map(|backend| {
            let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.backend == backend).collect();
            let k = mine.len() as f64;
            BenchSummary {
                backend,
                runs: mine.len(),
                mean_wall_ms: mine.iter().map(|r| r.wall_ms).sum::<f64>() / k,
                convergence_rate: mine.iter().filter(|r| r.converged).count() as f64 / k,
                mean_residual: mine.iter().map(|r| r.residual).sum::<f64>() / k,
                mean_entropy_bits: mine.iter().map(|r| r.entropy_bits).sum::<f64>() / k,
            }
        })
        .collect()
}
