use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    In,
    Out,
    Undec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Labelling {
    pub labels: Vec<Label>,
    pub epsilon: f64,
}

/// `in` when the probability is at least `1 - epsilon`, `out` when at most
/// `epsilon`, `undec` otherwise.
pub fn probabilistic_labelling(probs: &[f64], epsilon: f64) -> Labelling {
    let labels = probs
        .iter()
        .map(|&p| {
            if p >= 1.0 - epsilon {
                Label::In
            } else if p <= epsilon {
                Label::Out
            } else {
                Label::Undec
            }
        })
        .collect();
    Labelling { labels, epsilon }
}

/// The only label a complete labelling can give an argument whose attackers
/// carry `attackers`.
pub fn legal_label(attackers: impl IntoIterator<Item = Label>) -> Label {
    let mut all_out = true;
    for l in attackers {
        match l {
            Label::In => return Label::Out,
            Label::Undec => all_out = false,
            Label::Out => {}
        }
    }
    if all_out {
        Label::In
    } else {
        Label::Undec
    }
}

/// Whether `labels` is a complete labelling of the graph with `n` arguments
/// and `attacks` as `(attacker, attacked)` pairs.
pub fn verify_complete_labelling(n: usize, attacks: &[(usize, usize)], labels: &[Label]) -> bool {
    if labels.len() != n {
        return false;
    }
    (0..n).all(|i| {
        let incoming = attacks.iter().filter(|(_, t)| *t == i).map(|(s, _)| labels[*s]);
        legal_label(incoming) == labels[i]
    })
}
