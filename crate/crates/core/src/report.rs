//! Serializable summaries of a solved framework.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::model::{marginal, Literal, PDFramework, SolveMode};
use crate::query::{literal_bounds, solve_framework, Pipeline};
use crate::reasoner::{
    argument_probability, compute_attacks, enumerate_arguments, enumerate_maximal_deductions,
    probabilistic_labelling, Label,
};
use crate::solver::entropy_bits;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiteralEntry {
    pub literal: String,
    pub probability: f64,
    /// False when no rule derives the literal; its probability then comes
    /// only from the closed world or the entropy criterion.
    pub has_deduction: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArgumentEntry {
    pub id: usize,
    pub claim: String,
    pub support: Vec<String>,
    pub probability: f64,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackEntry {
    pub attacker: usize,
    pub attacked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorldEntry {
    pub world: String,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub mode: SolveMode,
    pub converged: bool,
    pub residual: f64,
    pub entropy_bits: f64,
    pub epochs: usize,
    pub literals: Vec<LiteralEntry>,
    pub arguments: Vec<ArgumentEntry>,
    pub attacks: Vec<AttackEntry>,
    pub worlds: Vec<WorldEntry>,
}

pub fn world_label(n: usize, j: usize) -> String {
    if n == 0 {
        return String::new();
    }
    format!("{j:0n$b}")
}

/// Solves `fw` and collects literal marginals, arguments with labels, attacks
/// and the world distribution. Bounds are added on request, one LP pair per
/// literal.
pub fn build_report(fw: &PDFramework, pipeline: &Pipeline, with_bounds: bool, epsilon: f64) -> Result<Report> {
    let solved = solve_framework(fw, pipeline)?;
    let dist = &solved.dist;
    let mut literals = Vec::new();
    for lit in fw.literals() {
        let bounds = if with_bounds {
            let (lo, hi) = literal_bounds(fw, lit, pipeline.mode)?;
            Some([lo, hi])
        } else {
            None
        };
        literals.push(LiteralEntry {
            literal: fw.literal_name(lit),
            probability: marginal(dist, &[lit]),
            has_deduction: !enumerate_maximal_deductions(fw, lit).is_empty(),
            bounds,
        });
    }
    let args = enumerate_arguments(fw);
    let probs: Vec<f64> = args.iter().map(|a| argument_probability(a, dist)).collect();
    let labels = probabilistic_labelling(&probs, epsilon).labels;
    let arguments = args
        .iter()
        .enumerate()
        .map(|(id, a)| ArgumentEntry {
            id,
            claim: fw.literal_name(a.claim()),
            support: a.support_sorted().iter().map(|l: &Literal| fw.literal_name(*l)).collect(),
            probability: probs[id],
            label: labels[id],
        })
        .collect();
    let attacks = compute_attacks(&args)
        .into_iter()
        .map(|a| AttackEntry { attacker: a.attacker, attacked: a.attacked })
        .collect();
    let n = fw.n_atoms();
    let worlds = dist
        .probs
        .iter()
        .enumerate()
        .map(|(j, &p)| WorldEntry { world: world_label(n, j), probability: p })
        .collect();
    Ok(Report {
        mode: dist.mode,
        converged: solved.converged,
        residual: dist.residual,
        entropy_bits: entropy_bits(&dist.probs),
        epochs: solved.epochs_used,
        literals,
        arguments,
        attacks,
        worlds,
    })
}

/// Plain-text rendering for terminals.
pub fn render_table(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mode {:?}/{:?}/{:?}  converged {}  residual {:.2e}  entropy {:.4} bits",
        report.mode.world, report.mode.entropy, report.mode.backend, report.converged, report.residual,
        report.entropy_bits
    );
    let width = report.literals.iter().map(|l| l.literal.len()).max().unwrap_or(7).max(7);
    let _ = writeln!(s, "{:<width$}  {:>8}", "literal", "Pr");
    for l in &report.literals {
        let _ = write!(s, "{:<width$}  {:>8.4}", l.literal, l.probability);
        if let Some([lo, hi]) = l.bounds {
            let _ = write!(s, "  [{lo:.4}, {hi:.4}]");
        }
        if !l.has_deduction {
            let _ = write!(s, "  (no deduction)");
        }
        s.push('\n');
    }
    if !report.arguments.is_empty() {
        let _ = writeln!(s, "arguments");
        for a in &report.arguments {
            let _ = writeln!(
                s,
                "  A{:<3} {:<width$} {:>8.4}  {:<6} {{{}}}",
                a.id,
                a.claim,
                a.probability,
                format!("{:?}", a.label).to_lowercase(),
                a.support.join(", ")
            );
        }
    }
    s
}
