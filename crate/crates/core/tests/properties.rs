mod common;

use common::*;

#[test]
fn bool_normalize_agrees_with_truth_tables() {
    let tables = bool_truth_tables(11, 2000).unwrap();
    assert!(tables > 100, "only {tables} distinct tables");
}

#[test]
fn aci_matching_equals_brute_force() {
    let n = aci_brute_force(3, 300).unwrap();
    assert!(n > 0);
}

#[test]
fn rational_arithmetic_agrees_with_fraction_oracle() {
    rat_oracle(5, 2000).unwrap();
}

#[test]
fn fraction_oracle_normalizes() {
    assert_eq!(Frac::new(4, -6), Frac(-2, 3));
    assert_eq!(Frac::new(1, 2).add(Frac::new(1, 3)), Frac(5, 6));
    assert!(Frac::new(-1, 2).le(Frac::new(0, 1)));
}

#[test]
fn engine_invariants_on_corpus() {
    let (n, skipped) = engine_invariants(2_000_000).unwrap();
    println!("{n} reductions, {skipped} too long without memo");
    assert!(n >= 40 && skipped <= 2, "{n} reductions, {skipped} skipped");
}

#[test]
fn golden_reductions_are_fast() {
    let (n, slowest) = golden().unwrap();
    println!("{n} golden reductions, slowest {slowest:?}");
}
