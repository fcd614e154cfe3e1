//! Largest bisimulation and invariance of formulas across it.
use std::collections::BTreeSet;

use subkit::bisim::{max_bisimulation, verify_bisimulation};
use subkit::checker::eval;
use subkit::kripke::KripkeModel;
use subkit::syntax::{parse_formula, prop};

fn main() {
    let m = KripkeModel::fixture("fig1").unwrap();
    let n = m.disjoint_union(&m);
    let vocab: BTreeSet<_> = ["p", "q"].iter().map(|s| prop(s)).collect();
    let z = max_bisimulation(&m, &n, &vocab).unwrap();
    println!("{} pairs, valid: {}", z.len(), verify_bisimulation(&m, &n, &z, &vocab).unwrap());
    let f = parse_formula("<p:=p; (p:=<>p)*>[]p").unwrap();
    for (a, b) in &z {
        assert_eq!(eval(&m, a, &f).unwrap(), eval(&n, b, &f).unwrap());
    }
    println!("{f} is invariant across every pair");
}
