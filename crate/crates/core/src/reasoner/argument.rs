use std::collections::BTreeSet;

use super::deduction::{build_deduction, enumerate_choices, Choice, Deduction};
use crate::model::{marginal, JointDistribution, Literal, PDFramework};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Argument {
    pub deduction: Deduction,
}

impl Argument {
    pub fn claim(&self) -> Literal {
        self.deduction.claim
    }

    pub fn support(&self) -> &BTreeSet<Literal> {
        &self.deduction.support
    }

    pub fn support_sorted(&self) -> Vec<Literal> {
        self.deduction.support_sorted()
    }
}

/// `attacker` attacks `attacked` when the negation of the attacker's claim is
/// in the attacked argument's support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attack {
    pub attacker: usize,
    pub attacked: usize,
}

/// All arguments of the framework, ordered by claim then support.
///
/// A node is either expanded by one of its rules or, when the complementary
/// literal heads some rule, left as an assumption leaf. Arguments with such a
/// leaf need more than one support literal, which rules out bare assumptions.
pub fn enumerate_arguments(fw: &PDFramework) -> Vec<Argument> {
    let by_head = fw.rules_by_head();
    let options = |lit: Literal| -> Vec<Choice> {
        let mut v: Vec<Choice> = by_head
            .get(&lit)
            .map(|rules| rules.iter().map(|&r| Choice::Rule(r)).collect())
            .unwrap_or_default();
        if by_head.contains_key(&lit.negate()) {
            v.push(Choice::Leaf);
        }
        v
    };
    let mut claims = fw.literals();
    claims.sort_by_key(Literal::sort_key);
    let mut out = Vec::new();
    for claim in claims {
        if !by_head.contains_key(&claim) {
            continue;
        }
        let mut found: Vec<Argument> = enumerate_choices(fw, claim, &options)
            .into_iter()
            .filter(|c| c.len() > 1 || c.values().all(|v| *v != Choice::Leaf))
            .map(|c| Argument { deduction: build_deduction(fw, claim, &c) })
            .collect();
        found.sort_by_key(|a| a.support_sorted().iter().map(Literal::sort_key).collect::<Vec<_>>());
        out.extend(found);
    }
    out
}

pub fn compute_attacks(args: &[Argument]) -> Vec<Attack> {
    let mut out = Vec::new();
    for (i, a) in args.iter().enumerate() {
        let target = a.claim().negate();
        for (j, b) in args.iter().enumerate() {
            if b.support().contains(&target) {
                out.push(Attack { attacker: i, attacked: j });
            }
        }
    }
    out
}

/// Probability that every support literal holds.
pub fn argument_probability<T: Scalar>(arg: &Argument, dist: &JointDistribution<T>) -> T {
    marginal(dist, &arg.support_sorted())
}
