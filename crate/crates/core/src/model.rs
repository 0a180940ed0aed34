//! Language, p-rules, possible worlds and joint distributions.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{PdError, Result};
use crate::scalar::Scalar;

/// Largest language the world enumerator accepts unless `PD_WORLD_CAP` says otherwise.
pub const DEFAULT_WORLD_CAP: usize = 24;

/// Atom ceiling imposed by the `u64` world encoding.
const HARD_WORLD_CAP: usize = 40;

pub fn world_cap() -> usize {
    std::env::var("PD_WORLD_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.min(HARD_WORLD_CAP))
        .unwrap_or(DEFAULT_WORLD_CAP)
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    let cap = world_cap();
    if n > cap {
        return Err(PdError::WorldCap { n, cap });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub index: usize,
    pub name: String,
}

/// A signed atom. Ordered by atom index, positive before negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub atom: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: usize) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: usize) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negate(self) -> Self {
        Literal { atom: self.atom, positive: !self.positive }
    }

    /// Key ordering positive literals before negative ones of the same atom.
    pub fn sort_key(&self) -> (usize, bool) {
        (self.atom, !self.positive)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RuleError {
    #[error("probability {0} is outside [0, 1]")]
    ThetaOutOfRange(f64),
    #[error("body contains both a literal and its negation")]
    ContradictoryBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PRule {
    pub head: Literal,
    pub body: Vec<Literal>,
    pub theta: f64,
}

impl PRule {
    /// Builds a rule in normal form: duplicate body literals are dropped
    /// (first occurrence kept) and `theta = 0` becomes the negated head with
    /// `theta = 1`.
    pub fn new(head: Literal, body: Vec<Literal>, theta: f64) -> std::result::Result<Self, RuleError> {
        if !(0.0..=1.0).contains(&theta) || theta.is_nan() {
            return Err(RuleError::ThetaOutOfRange(theta));
        }
        let mut seen: Vec<Literal> = Vec::with_capacity(body.len());
        for lit in body {
            if seen.contains(&lit.negate()) {
                return Err(RuleError::ContradictoryBody);
            }
            if !seen.contains(&lit) {
                seen.push(lit);
            }
        }
        let (head, theta) = if theta == 0.0 { (head.negate(), 1.0) } else { (head, theta) };
        Ok(PRule { head, body: seen, theta })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PDFramework {
    pub language: Vec<Atom>,
    pub rules: Vec<PRule>,
}

impl PDFramework {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_atoms<S: AsRef<str>>(names: &[S]) -> Self {
        let mut fw = Self::new();
        for name in names {
            fw.intern(name.as_ref());
        }
        fw
    }

    pub fn n_atoms(&self) -> usize {
        self.language.len()
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.language.iter().position(|a| a.name == name)
    }

    /// Index of `name`, adding it to the language if new.
    pub fn intern(&mut self, name: &str) -> usize {
        match self.atom_index(name) {
            Some(i) => i,
            None => {
                let index = self.language.len();
                self.language.push(Atom { index, name: name.to_string() });
                index
            }
        }
    }

    /// Resolves `name` or `~name`.
    pub fn literal(&self, text: &str) -> Result<Literal> {
        let text = text.trim();
        let (positive, name) = match text.strip_prefix('~') {
            Some(rest) => (false, rest.trim()),
            None => (true, text),
        };
        self.atom_index(name)
            .map(|atom| Literal { atom, positive })
            .ok_or_else(|| PdError::UnknownLiteral(text.to_string()))
    }

    pub fn literal_name(&self, lit: Literal) -> String {
        let name = self.language.get(lit.atom).map(|a| a.name.as_str()).unwrap_or("?");
        if lit.positive {
            name.to_string()
        } else {
            format!("~{name}")
        }
    }

    pub fn push_rule(&mut self, head: Literal, body: Vec<Literal>, theta: f64) -> Result<()> {
        let rule = PRule::new(head, body, theta)?;
        self.check_literals(std::iter::once(&rule.head).chain(&rule.body))?;
        self.rules.push(rule);
        Ok(())
    }

    /// Checks that every rule literal names an atom of the language.
    pub fn validate(&self) -> Result<()> {
        self.check_literals(self.rules.iter().flat_map(|r| std::iter::once(&r.head).chain(&r.body)))
    }

    fn check_literals<'a>(&self, lits: impl Iterator<Item = &'a Literal>) -> Result<()> {
        let n = self.n_atoms();
        for lit in lits {
            if lit.atom >= n {
                return Err(PdError::UnresolvedLiteral { atom: lit.atom, n });
            }
        }
        Ok(())
    }

    /// Every literal of `L^c`, in atom order, positive first.
    pub fn literals(&self) -> Vec<Literal> {
        (0..self.n_atoms()).flat_map(|i| [Literal::pos(i), Literal::neg(i)]).collect()
    }

    /// Rule indices grouped by head literal.
    pub fn rules_by_head(&self) -> HashMap<Literal, Vec<usize>> {
        let mut map: HashMap<Literal, Vec<usize>> = HashMap::new();
        for (i, r) in self.rules.iter().enumerate() {
            map.entry(r.head).or_default().push(i);
        }
        map
    }

    pub fn display_rule(&self, rule: &PRule) -> String {
        let body: Vec<String> = rule.body.iter().map(|l| self.literal_name(*l)).collect();
        format!("<{} <- {}>:{}", self.literal_name(rule.head), body.join(", "), rule.theta)
    }
}

/// A complete assignment to the `n` atoms. Atom 0 is the most significant
/// bit, so worlds in ascending numeric order read like the usual truth-table
/// listing (`00, 01, 10, 11` for two atoms).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    pub bits: u64,
    pub n: usize,
}

impl World {
    pub fn holds(&self, atom: usize) -> bool {
        (self.bits >> (self.n - 1 - atom)) & 1 == 1
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.holds(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn enumerate_worlds(language: &[Atom]) -> Result<impl Iterator<Item = World>> {
    let n = language.len();
    check_cap(n)?;
    Ok((0..1u64 << n).map(move |bits| World { bits, n }))
}

/// Bit mask and expected value selecting the worlds of a conjunction.
/// `None` when the conjunction contains a complementary pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConjMask {
    pub mask: u64,
    pub value: u64,
}

impl ConjMask {
    pub fn new(n: usize, conj: &[Literal]) -> Option<Self> {
        let mut mask = 0u64;
        let mut value = 0u64;
        for lit in conj {
            let bit = 1u64 << (n - 1 - lit.atom);
            let want = if lit.positive { bit } else { 0 };
            if mask & bit != 0 && value & bit != want {
                return None;
            }
            mask |= bit;
            value |= want;
        }
        Some(ConjMask { mask, value })
    }

    pub fn matches(&self, world: usize) -> bool {
        (world as u64) & self.mask == self.value
    }
}

/// Indices of the worlds satisfying `conj`, ascending.
pub fn worlds_satisfying(n: usize, conj: &[Literal]) -> Vec<usize> {
    match ConjMask::new(n, conj) {
        Some(m) => (0..1usize << n).filter(|&j| m.matches(j)).collect(),
        None => Vec::new(),
    }
}

pub fn satisfies(world: World, conj: &[Literal]) -> Result<bool> {
    for lit in conj {
        if lit.atom >= world.n {
            return Err(PdError::UnresolvedLiteral { atom: lit.atom, n: world.n });
        }
    }
    Ok(conj.iter().all(|l| world.holds(l.atom) == l.positive))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorldMode {
    Owa,
    Pcwa,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyMode {
    /// Any solution of the system.
    None,
    /// Maximum linear entropy, i.e. minimum Euclidean norm.
    Linear,
    /// Maximum Shannon entropy.
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Sgd,
    Direct,
    Lp,
    Newton,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveMode {
    pub world: WorldMode,
    pub entropy: EntropyMode,
    pub backend: Backend,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution<T> {
    pub probs: Vec<T>,
    /// Max-norm of `A pi - B` for the system it was solved against.
    pub residual: f64,
    pub mode: SolveMode,
}

impl<T: Scalar> JointDistribution<T> {
    pub fn n_atoms(&self) -> usize {
        self.probs.len().trailing_zeros() as usize
    }

    pub fn to_f64(&self) -> JointDistribution<f64> {
        JointDistribution {
            probs: self.probs.iter().map(Scalar::to_f64).collect(),
            residual: self.residual,
            mode: self.mode,
        }
    }
}

/// Probability of a conjunction; the empty conjunction has probability one.
pub fn marginal<T: Scalar>(dist: &JointDistribution<T>, conj: &[Literal]) -> T {
    let n = dist.n_atoms();
    let mut total = T::zero();
    if let Some(m) = ConjMask::new(n, conj) {
        for (j, p) in dist.probs.iter().enumerate() {
            if m.matches(j) {
                total += p.clone();
            }
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    VacuousBody,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleCheck {
    pub rule: usize,
    pub residual: f64,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub rules: Vec<RuleCheck>,
    pub bounds_residual: f64,
    pub normalization_residual: f64,
    pub pass: bool,
}

/// Substitutes `dist` into every p-rule. A conditional rule whose body has
/// probability below `tol` is reported as vacuous rather than judged.
pub fn check_consistency_by_substitution(
    framework: &PDFramework,
    dist: &JointDistribution<f64>,
    tol: f64,
) -> ConsistencyReport {
    let mut rules = Vec::with_capacity(framework.rules.len());
    for (i, rule) in framework.rules.iter().enumerate() {
        let mut full = rule.body.clone();
        full.push(rule.head);
        let joint = marginal(dist, &full);
        let (residual, status) = if rule.body.is_empty() {
            let r = (joint - rule.theta).abs();
            (r, if r <= tol { CheckStatus::Pass } else { CheckStatus::Fail })
        } else {
            let body = marginal(dist, &rule.body);
            let r = (joint - rule.theta * body).abs();
            let status = if body < tol {
                CheckStatus::VacuousBody
            } else if r <= tol {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            };
            (r, status)
        };
        rules.push(RuleCheck { rule: i, residual, status });
    }
    let bounds_residual = dist
        .probs
        .iter()
        .map(|&p| (-p).max(p - 1.0).max(0.0))
        .fold(0.0, f64::max);
    let normalization_residual = (dist.probs.iter().sum::<f64>() - 1.0).abs();
    let pass = dist.probs.len() == 1usize << framework.n_atoms()
        && rules.iter().all(|r| r.status != CheckStatus::Fail)
        && bounds_residual <= tol
        && normalization_residual <= tol;
    ConsistencyReport { rules, bounds_residual, normalization_residual, pass }
}
