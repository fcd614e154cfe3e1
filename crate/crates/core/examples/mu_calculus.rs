//! Least fixpoints of positive bodies as iteration from the empty set.
use subkit::checker::truth_set;
use subkit::kripke::KripkeModel;
use subkit::syntax::{parse_formula, prop};
use subkit::translate::{mu_truth_set, mu_unfold};

fn main() {
    let m = KripkeModel::fixture("fig2_b1").unwrap();
    let p = prop("p");
    for src in ["[]false | []<>p", "q | <>p", "<>p & []p"] {
        let body = parse_formula(src).unwrap();
        let unfolded = mu_unfold(&p, &body).unwrap();
        let fix = mu_truth_set(&m, &p, &body).unwrap();
        assert_eq!(fix, truth_set(&m, &unfolded).unwrap());
        println!("mu p.{src}\n  -> {unfolded}\n  {:?}", m.names_of(&fix));
    }
    println!("non-positive body: {:?}", mu_unfold(&p, &parse_formula("~p").unwrap()).err());
}
