#![allow(dead_code)]

pub mod props;

pub use props::*;

use pd_core::reasoner::{argument_probability, enumerate_arguments, Argument};
use pd_core::{parse_aa, parse_pd, AAGraph, Distribution, PDFramework};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn pd_fixture(name: &str) -> PDFramework {
    parse_pd(&fixture(name)).unwrap()
}

pub fn aa_fixture(name: &str) -> AAGraph {
    parse_aa(&fixture(name)).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(close(got, want, tol), "{what}: got {got}, want {want} (tol {tol})");
}

pub fn assert_all_close(got: &[f64], want: &[f64], tol: f64, what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: length");
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert!(close(*g, *w, tol), "{what}[{i}]: got {g}, want {w} (tol {tol}); full {got:?}");
    }
}

/// The argument with this claim and exactly this support, written as names.
pub fn find_argument<'a>(fw: &PDFramework, args: &'a [Argument], claim: &str, support: &[&str]) -> &'a Argument {
    let claim = fw.literal(claim).unwrap();
    let mut want: Vec<_> = support.iter().map(|s| fw.literal(s).unwrap()).collect();
    want.sort();
    args.iter()
        .find(|a| {
            let mut got: Vec<_> = a.support().iter().copied().collect();
            got.sort();
            a.claim() == claim && got == want
        })
        .unwrap_or_else(|| panic!("no argument for {support:?}"))
}

pub fn probability_of(fw: &PDFramework, dist: &Distribution, claim: &str, support: &[&str]) -> f64 {
    let args = enumerate_arguments(fw);
    argument_probability(find_argument(fw, &args, claim, support), dist)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
