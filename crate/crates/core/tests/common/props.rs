//! Randomized property checks shared by the core tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use pd_core::bench::{generate_with_distribution, BenchSpec};
use pd_core::query::{check, literal_bounds, solve_framework, Pipeline};
use pd_core::reasoner::{
    aa_to_pd, argument_probability, compute_attacks, enumerate_arguments, label_aa, Label,
};
use pd_core::solver::{optimize_bounds, solve_max_entropy, Sense};
use pd_core::{
    build_owa, build_pcwa, marginal, AAGraph, Backend, EntropyMode, Literal, PDFramework, RowTag, SolverConfig,
    System, WorldMode,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MARGINALS: &str = "marginals of a literal and its negation sum to one";
pub const CONJUNCTION: &str = "extending a conjunction never raises its probability";
pub const CONTRADICTORY: &str = "support with a literal and its negation has probability zero";
pub const SELF_ATTACK: &str = "self-attacking arguments have probability zero";
pub const BELOW_CLAIM: &str = "argument probability is at most its claim's";
pub const EQUALS_CLAIM: &str = "argument equals its claim iff no other argument for it is possible";
pub const COHERENT: &str = "attacker and attacked sum to at most one";
pub const ME_UNIQUE: &str = "maximum entropy solution is unique";
pub const ME_WORLDS: &str = "maximum entropy is positive on every world that can be";
pub const ME_LITERALS: &str = "maximum entropy is positive on every literal that can be";
pub const BIJECTION: &str = "abstract arguments and attacks map one to one";
pub const CLAIM_EQUAL: &str = "abstract image: argument equals its claim";
pub const FOUNDED: &str = "abstract image: unattacked arguments have probability one";
pub const CERTAIN_ATTACKER: &str = "abstract image: a certain attacker sends the attacked to zero";
pub const IMPOSSIBLE_ATTACKERS: &str = "abstract image: impossible attackers make an argument certain";
pub const CERTAIN_ARGUMENT: &str = "abstract image: a certain argument has impossible attackers";
pub const ZERO_NEEDS_CERTAIN: &str = "abstract image: a zero argument has a certain attacker";
pub const OPTIMISTIC: &str = "abstract image: argument is at least one minus its attackers";

const TOL: f64 = 1e-6;
const LABEL_EPS: f64 = 1e-4;

#[derive(Default, Debug)]
pub struct Tally {
    pub checks: usize,
    pub violations: Vec<String>,
}

#[derive(Default, Debug)]
pub struct Suite {
    pub tallies: BTreeMap<&'static str, Tally>,
    pub frameworks: usize,
    pub graphs: usize,
    pub rejected_graphs: usize,
    /// Generated rule sets that are only consistent under the open world.
    pub open_world: usize,
}

impl Suite {
    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        let t = self.tallies.entry(name).or_default();
        t.checks += 1;
        if !ok && t.violations.len() < 20 {
            t.violations.push(detail());
        } else if !ok {
            t.violations.push(String::new());
        }
    }

    pub fn violations(&self, name: &str) -> usize {
        self.tallies.get(name).map_or(0, |t| t.violations.len())
    }

    pub fn checks(&self, name: &str) -> usize {
        self.tallies.get(name).map_or(0, |t| t.checks)
    }

    /// Names of properties with at least one violation.
    pub fn failing(&self) -> Vec<&'static str> {
        self.tallies.iter().filter(|(_, t)| !t.violations.is_empty()).map(|(n, _)| *n).collect()
    }
}

pub fn random_framework(seed: u64) -> PDFramework {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = r.gen_range(2..=5);
    let rules = r.gen_range(1..=2 * n);
    let mut spec = BenchSpec::new(n, rules, seed);
    spec.max_body = Some(r.gen_range(1..=n));
    generate_with_distribution(&spec, 0).unwrap().0
}

/// Random attack graph on `k` arguments named `a0..`, with each ordered pair
/// (self-attacks included) present with probability `density`.
pub fn random_graph(rng: &mut ChaCha8Rng, k: usize, density: f64) -> AAGraph {
    let arguments = (0..k).map(|i| format!("a{i}")).collect();
    let mut attacks = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if rng.gen_bool(density) {
                attacks.push((a, b));
            }
        }
    }
    AAGraph { arguments, attacks }
}

pub fn random_small_graph(rng: &mut ChaCha8Rng) -> AAGraph {
    let k = rng.gen_range(1..=6);
    let density = rng.gen_range(0.1..0.5);
    random_graph(rng, k, density)
}

/// Every complete labelling of the graph, by trying all `3^k` assignments
/// against the definition directly.
pub fn brute_force_complete(graph: &AAGraph) -> Vec<Vec<Label>> {
    let k = graph.arguments.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(k as u32) {
        let mut c = code;
        let labels: Vec<Label> = (0..k)
            .map(|_| {
                let l = [Label::In, Label::Out, Label::Undec][c % 3];
                c /= 3;
                l
            })
            .collect();
        let ok = (0..k).all(|x| {
            let attackers: Vec<Label> =
                graph.attacks.iter().filter(|(_, b)| *b == x).map(|(a, _)| labels[*a]).collect();
            let all_out = attackers.iter().all(|l| *l == Label::Out);
            let some_in = attackers.contains(&Label::In);
            match labels[x] {
                Label::In => all_out,
                Label::Out => some_in,
                Label::Undec => !all_out && !some_in,
            }
        });
        if ok {
            out.push(labels);
        }
    }
    out
}

fn permuted(sys: &System, rng: &mut ChaCha8Rng) -> System {
    let mut order: Vec<usize> = (0..sys.rows()).collect();
    order.shuffle(rng);
    let mut out = sys.select_rows(&order);
    for i in 0..out.rows() {
        let s = rng.gen_range(0.5..2.0);
        out.a.row_mut(i).iter_mut().for_each(|v| *v *= s);
        out.b[i] *= s;
    }
    out
}

/// Properties of one general framework. Rule sets without a closed-world
/// model are not PD frameworks; they are solved under the open world and
/// skip the one property that depends on the closed world.
pub fn check_framework(suite: &mut Suite, fw: &PDFramework, seed: u64) {
    suite.frameworks += 1;
    let mode = if check(fw, WorldMode::Pcwa).is_ok() { WorldMode::Pcwa } else { WorldMode::Owa };
    if mode == WorldMode::Owa {
        suite.open_world += 1;
    }
    let pipeline = Pipeline::new(mode, EntropyMode::Max, Backend::Newton);
    let dist = solve_framework(fw, &pipeline).expect("generated frameworks are satisfiable").dist;
    let n = fw.n_atoms();

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for lit in fw.literals() {
        let total = marginal(&dist, &[lit]) + marginal(&dist, &[lit.negate()]);
        suite.check(MARGINALS, (total - 1.0).abs() <= 1e-9, || format!("seed {seed}: {total}"));
        let extra = Literal { atom: rng.gen_range(0..n), positive: rng.gen() };
        let wider = marginal(&dist, &[lit, extra]);
        suite.check(CONJUNCTION, wider <= marginal(&dist, &[lit]) + 1e-12, || format!("seed {seed}"));
    }

    let args = enumerate_arguments(fw);
    let probs: Vec<f64> = args.iter().map(|a| argument_probability(a, &dist)).collect();
    for (i, a) in args.iter().enumerate() {
        let p = probs[i];
        if a.support().iter().any(|l| a.support().contains(&l.negate())) {
            suite.check(CONTRADICTORY, p == 0.0, || format!("seed {seed}: argument {i} = {p}"));
        }
        if a.support().contains(&a.claim().negate()) {
            suite.check(SELF_ATTACK, p == 0.0, || format!("seed {seed}: argument {i} = {p}"));
        }
        let claim = marginal(&dist, &[a.claim()]);
        suite.check(BELOW_CLAIM, p <= claim + 1e-12, || format!("seed {seed}: {p} > {claim}"));
        let others_zero =
            args.iter().enumerate().all(|(j, b)| j == i || b.claim() != a.claim() || probs[j] <= TOL);
        if mode == WorldMode::Owa {
            continue;
        }
        let equal = (p - claim).abs() <= TOL;
        suite.check(EQUALS_CLAIM, equal == others_zero, || {
            format!("seed {seed}: argument {i} = {p}, claim {claim}, others zero {others_zero}\n{}", pd_core::serialize_pd(fw))
        });
    }
    for at in compute_attacks(&args) {
        let s = probs[at.attacker] + probs[at.attacked];
        suite.check(COHERENT, s <= 1.0 + TOL, || format!("seed {seed}: {s}"));
    }

    let sys = match mode {
        WorldMode::Pcwa => build_pcwa::<f64>(fw).unwrap(),
        WorldMode::Owa => build_owa::<f64>(fw).unwrap(),
    };
    let config = SolverConfig { seed: seed + 1, ..SolverConfig::default() };
    let again = solve_max_entropy(&permuted(&sys, &mut rng), &config).unwrap().dist.probs;
    let gap = dist.probs.iter().zip(&again).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    suite.check(ME_UNIQUE, gap <= 5e-3, || format!("seed {seed}: max gap {gap}"));

    if n <= 4 {
        for j in 0..dist.probs.len() {
            let world: Vec<Literal> =
                (0..n).map(|i| Literal { atom: i, positive: j >> (n - 1 - i) & 1 == 1 }).collect();
            let alpha = optimize_bounds(&sys, &world, Sense::Max).unwrap();
            if alpha > 1e-7 {
                let p = dist.probs[j];
                suite.check(ME_WORLDS, p > 0.0, || format!("seed {seed}: world {j} max {alpha}, got {p}"));
            }
        }
    }
    for lit in fw.literals() {
        let (_, hi) = literal_bounds(fw, lit, mode).unwrap();
        if hi > 1e-7 {
            let p = marginal(&dist, &[lit]);
            suite.check(ME_LITERALS, p > 0.0, || format!("seed {seed}: {} max {hi}, got {p}", fw.literal_name(lit)));
        }
    }
}

/// Properties of the image of an attack graph, solved under the closed world
/// with maximum entropy. Graphs without a closed-world model are counted and
/// skipped.
pub fn check_graph(suite: &mut Suite, graph: &AAGraph) {
    suite.graphs += 1;
    let fw = aa_to_pd(graph);
    let labelled = match label_aa(graph, &Pipeline::default(), LABEL_EPS) {
        Ok(l) => l,
        Err(_) => {
            suite.rejected_graphs += 1;
            return;
        }
    };
    let dist = solve_framework(&fw, &Pipeline::default()).unwrap().dist;
    let args = enumerate_arguments(&fw);
    let k = graph.arguments.len();

    let g: Vec<Option<usize>> =
        (0..k).map(|i| args.iter().position(|a| a.claim() == Literal::pos(i))).collect();
    let one_each = args.len() == k && g.iter().all(Option::is_some);
    let mut pd_attacks: Vec<(usize, usize)> = compute_attacks(&args)
        .iter()
        .map(|a| (args[a.attacker].claim().atom, args[a.attacked].claim().atom))
        .collect();
    pd_attacks.sort_unstable();
    let mut aa_attacks = graph.attacks.clone();
    aa_attacks.sort_unstable();
    aa_attacks.dedup();
    suite.check(BIJECTION, one_each && pd_attacks == aa_attacks, || format!("{graph:?}"));
    if !one_each {
        return;
    }

    let p = &labelled.probabilities;
    let is_one = |x: f64| x >= 1.0 - LABEL_EPS;
    let is_zero = |x: f64| x <= LABEL_EPS;
    for x in 0..k {
        let claim = marginal(&dist, &[Literal::pos(x)]);
        suite.check(CLAIM_EQUAL, (p[x] - claim).abs() <= TOL, || format!("{graph:?}: {x}"));
        let attackers = graph.attackers(x);
        if attackers.is_empty() {
            suite.check(FOUNDED, is_one(p[x]), || format!("{graph:?}: {x} = {}", p[x]));
        }
        for &b in &attackers {
            if is_one(p[b]) {
                suite.check(CERTAIN_ATTACKER, is_zero(p[x]), || format!("{graph:?}: {b} -> {x}"));
            }
        }
        if attackers.contains(&x) {
            continue;
        }
        if attackers.iter().all(|&b| is_zero(p[b])) {
            suite.check(IMPOSSIBLE_ATTACKERS, is_one(p[x]), || format!("{graph:?}: {x} = {}", p[x]));
        }
        if is_one(p[x]) {
            suite.check(CERTAIN_ARGUMENT, attackers.iter().all(|&b| is_zero(p[b])), || format!("{graph:?}: {x}"));
        }
        if is_zero(p[x]) {
            suite.check(ZERO_NEEDS_CERTAIN, attackers.iter().any(|&b| is_one(p[b])), || {
                format!("{graph:?}: {x} with attackers at {:?}", attackers.iter().map(|&b| p[b]).collect::<Vec<_>>())
            });
        }
        let bound = 1.0 - attackers.iter().map(|&b| p[b]).sum::<f64>();
        suite.check(OPTIMISTIC, p[x] >= bound - LABEL_EPS, || format!("{graph:?}: {x} = {} < {bound}", p[x]));
    }
}

/// `n` frameworks and `n` attack graphs from one seed.
pub fn run_suite(n: usize, seed: u64) -> Suite {
    let mut suite = Suite::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        check_framework(&mut suite, &random_framework(s), s);
        check_graph(&mut suite, &random_small_graph(&mut rng));
    }
    suite
}

/// True when some closed-world row of `sys` is nonzero at world `j`.
pub fn closed_world_zero(sys: &System, j: usize) -> bool {
    (0..sys.rows()).any(|i| matches!(sys.row_tags[i], RowTag::Pcwa(_)) && sys.a[(i, j)] != 0.0)
}
