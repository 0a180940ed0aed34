use super::argument::{argument_probability, enumerate_arguments};
use super::labelling::{probabilistic_labelling, verify_complete_labelling, Labelling};
use crate::error::Result;
use crate::model::{marginal, Literal, PDFramework};
use crate::parser::AAGraph;
use crate::query::{solve_framework, Pipeline};

/// One atom per argument and one rule `a <- ~b1, ..., ~bk : 1` per argument
/// `a` with attackers `b1..bk` in declaration order.
pub fn aa_to_pd(graph: &AAGraph) -> PDFramework {
    let mut fw = PDFramework::with_atoms(&graph.arguments);
    for i in 0..graph.arguments.len() {
        let body = graph.attackers(i).into_iter().map(Literal::neg).collect();
        fw.push_rule(Literal::pos(i), body, 1.0).expect("attackers never contradict");
    }
    fw
}

#[derive(Clone, Debug, PartialEq)]
pub struct AaLabelling {
    /// Probability of each AA argument's PD counterpart.
    pub probabilities: Vec<f64>,
    pub labelling: Labelling,
    /// Whether the labelling is complete for the AA graph.
    pub complete: bool,
}

/// Labels an AA graph through its PD image: solve, take each argument's
/// probability and threshold it at `epsilon`.
pub fn label_aa(graph: &AAGraph, pipeline: &Pipeline, epsilon: f64) -> Result<AaLabelling> {
    let fw = aa_to_pd(graph);
    let solved = solve_framework(&fw, pipeline)?;
    let dist = solved.dist;
    let args = enumerate_arguments(&fw);
    let probabilities: Vec<f64> = (0..graph.arguments.len())
        .map(|i| {
            let claim = Literal::pos(i);
            match args.iter().find(|a| a.claim() == claim) {
                Some(a) => argument_probability(a, &dist),
                None => marginal(&dist, &[claim]),
            }
        })
        .collect();
    let labelling = probabilistic_labelling(&probabilities, epsilon);
    let complete = verify_complete_labelling(graph.arguments.len(), &graph.attacks, &labelling.labels);
    Ok(AaLabelling { probabilities, labelling, complete })
}
