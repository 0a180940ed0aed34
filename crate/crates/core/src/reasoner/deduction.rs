use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::constraints::{build_owa, group_heads, LinearSystem, RowTag};
use crate::error::Result;
use crate::model::{ConjMask, Literal, PDFramework};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    /// The empty body of a fact.
    Tau,
    Lit(Literal),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeductionNode {
    pub label: NodeLabel,
    /// Rule expanding this node; `None` for leaves.
    pub rule: Option<usize>,
    pub children: Vec<usize>,
}

/// A deduction with its support set and one witness tree. `nodes[0]` is the
/// root; a literal occurring several times shares one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deduction {
    pub claim: Literal,
    pub support: BTreeSet<Literal>,
    pub nodes: Vec<DeductionNode>,
}

impl Deduction {
    /// Support literals sorted positive-first within each atom.
    pub fn support_sorted(&self) -> Vec<Literal> {
        let mut v: Vec<Literal> = self.support.iter().copied().collect();
        v.sort_by_key(Literal::sort_key);
        v
    }

    /// Literals labelling unexpanded leaves.
    pub fn leaves(&self) -> Vec<Literal> {
        self.nodes
            .iter()
            .filter_map(|n| match (n.label, n.rule) {
                (NodeLabel::Lit(l), None) => Some(l),
                _ => None,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Choice {
    Rule(usize),
    Leaf,
}

/// Enumerates every assignment of one choice per reachable literal, starting
/// from `claim`. `options` lists the admissible choices for a literal.
pub(crate) fn enumerate_choices(
    fw: &PDFramework,
    claim: Literal,
    options: &dyn Fn(Literal) -> Vec<Choice>,
) -> Vec<BTreeMap<Literal, Choice>> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<BTreeSet<Literal>> = BTreeSet::new();
    let mut choices = BTreeMap::new();
    recurse(fw, vec![claim], &mut choices, options, &mut seen, &mut out);
    out
}

fn recurse(
    fw: &PDFramework,
    mut pending: Vec<Literal>,
    choices: &mut BTreeMap<Literal, Choice>,
    options: &dyn Fn(Literal) -> Vec<Choice>,
    seen: &mut BTreeSet<BTreeSet<Literal>>,
    out: &mut Vec<BTreeMap<Literal, Choice>>,
) {
    while let Some(&lit) = pending.last() {
        if choices.contains_key(&lit) {
            pending.pop();
        } else {
            break;
        }
    }
    let Some(lit) = pending.pop() else {
        let support: BTreeSet<Literal> = choices.keys().copied().collect();
        if seen.insert(support) {
            out.push(choices.clone());
        }
        return;
    };
    for choice in options(lit) {
        choices.insert(lit, choice);
        let mut next = pending.clone();
        if let Choice::Rule(r) = choice {
            next.extend(fw.rules[r].body.iter().rev().filter(|l| !choices.contains_key(l)));
        }
        recurse(fw, next, choices, options, seen, out);
        choices.remove(&lit);
    }
}

/// Builds the witness tree for a choice map.
pub(crate) fn build_deduction(fw: &PDFramework, claim: Literal, choices: &BTreeMap<Literal, Choice>) -> Deduction {
    let mut nodes: Vec<DeductionNode> = Vec::new();
    let mut index: HashMap<Literal, usize> = HashMap::new();
    let mut queue = vec![claim];
    index.insert(claim, 0);
    nodes.push(DeductionNode { label: NodeLabel::Lit(claim), rule: None, children: vec![] });
    while let Some(lit) = queue.pop() {
        let at = index[&lit];
        if let Some(Choice::Rule(r)) = choices.get(&lit) {
            nodes[at].rule = Some(*r);
            let body = &fw.rules[*r].body;
            if body.is_empty() {
                nodes.push(DeductionNode { label: NodeLabel::Tau, rule: None, children: vec![] });
                let tau = nodes.len() - 1;
                nodes[at].children.push(tau);
            }
            for &b in body {
                let child = match index.get(&b) {
                    Some(&c) => c,
                    None => {
                        nodes.push(DeductionNode { label: NodeLabel::Lit(b), rule: None, children: vec![] });
                        let c = nodes.len() - 1;
                        index.insert(b, c);
                        queue.push(b);
                        c
                    }
                };
                nodes[at].children.push(child);
            }
        }
    }
    Deduction { claim, support: choices.keys().copied().collect(), nodes }
}

/// Maximal deductions for `claim`: every literal that heads a rule is
/// expanded by one of its rules, and only rule-less literals are leaves. A
/// recurring literal reuses its first expansion, which keeps cyclic rule sets
/// finite. One deduction per distinct support set.
pub fn enumerate_maximal_deductions(fw: &PDFramework, claim: Literal) -> Vec<Deduction> {
    let by_head = fw.rules_by_head();
    if !by_head.contains_key(&claim) {
        return Vec::new();
    }
    let options = |lit: Literal| -> Vec<Choice> {
        match by_head.get(&lit) {
            Some(rules) => rules.iter().map(|&r| Choice::Rule(r)).collect(),
            None => vec![Choice::Leaf],
        }
    };
    enumerate_choices(fw, claim, &options)
        .iter()
        .map(|c| build_deduction(fw, claim, c))
        .collect()
}

/// The closed-world encoding built from explicit deductions: for each head
/// literal, worlds where it holds but no maximal deduction's support does are
/// set to zero. Agrees with the per-head local rows.
pub fn build_global_pcwa<T: Scalar>(fw: &PDFramework) -> Result<LinearSystem<T>> {
    let mut system = build_owa::<T>(fw)?;
    let n = fw.n_atoms();
    for g in group_heads(fw) {
        let supports: Vec<ConjMask> = enumerate_maximal_deductions(fw, g.head)
            .iter()
            .filter_map(|d| ConjMask::new(n, &d.support_sorted()))
            .collect();
        let head = ConjMask::new(n, &[g.head]).expect("single literal");
        let row: Vec<T> = (0..system.n_worlds)
            .map(|j| {
                if head.matches(j) && !supports.iter().any(|s| s.matches(j)) {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        system.push_row(row, T::zero(), RowTag::Pcwa(g.head));
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_pd;

    fn supports(fw: &PDFramework, claim: &str) -> Vec<Vec<String>> {
        let lit = fw.literal(claim).unwrap();
        let mut out: Vec<Vec<String>> = enumerate_maximal_deductions(fw, lit)
            .iter()
            .map(|d| d.support_sorted().iter().map(|l| fw.literal_name(*l)).collect())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn closed_world_example() {
        let fw = parse_pd("s0 <- ~s1 : 1. s1 <- : 1.").unwrap();
        assert_eq!(supports(&fw, "s0"), vec![vec!["s0", "~s1"]]);
        assert_eq!(supports(&fw, "s1"), vec![vec!["s1"]]);
        assert!(supports(&fw, "~s0").is_empty());
    }

    #[test]
    fn two_rules_same_head() {
        let fw = parse_pd("s0 <- s1 : 1. s0 <- s2 : 1. s1 <- s3 : 1. s2 <- : 1. s3 <- : 1.").unwrap();
        assert_eq!(supports(&fw, "s0"), vec![vec!["s0", "s1", "s3"], vec!["s0", "s2"]]);
    }

    #[test]
    fn cycles_terminate() {
        let fw = parse_pd("a <- b : 0.5. b <- a : 0.5. b <- : 0.3.").unwrap();
        assert_eq!(supports(&fw, "a"), vec![vec!["a", "b"]]);
        let d = &enumerate_maximal_deductions(&fw, fw.literal("a").unwrap())[0];
        assert_eq!(d.nodes[0].label, NodeLabel::Lit(fw.literal("a").unwrap()));
    }

    #[test]
    fn tau_leaves() {
        let fw = parse_pd("a <- : 0.5.").unwrap();
        let d = &enumerate_maximal_deductions(&fw, Literal::pos(0))[0];
        assert_eq!(d.nodes.len(), 2);
        assert_eq!(d.nodes[1].label, NodeLabel::Tau);
        assert!(d.leaves().is_empty());
    }
}
