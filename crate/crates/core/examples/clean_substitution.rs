//! Renaming bound variables apart, then substituting without capture.
use subkit::checker::truth_set;
use subkit::kripke::KripkeModel;
use subkit::reduce::apply_clean_substitution;
use subkit::syntax::{is_clean, parse_formula, rename_to_clean, var_sets};

fn main() {
    let f = parse_formula("<p:=q>(p & <q:=<>p>(q | p))").unwrap();
    let vs = var_sets(&f).unwrap();
    println!("{f}\n  free {:?} bound {:?} clean {}", vs.free, vs.bound, is_clean(&f));
    let c = rename_to_clean(&f);
    println!("{c}\n  clean {}", is_clean(&c));
    let m = KripkeModel::fixture("fig4").unwrap();
    assert_eq!(truth_set(&m, &f).unwrap(), truth_set(&m, &c).unwrap());
    if let subkit::syntax::Formula::Sub { pivot, body, scope } = &c {
        let r = apply_clean_substitution(pivot, body, scope).unwrap();
        println!("substituted: {r}");
        assert_eq!(truth_set(&m, &r).unwrap(), truth_set(&m, &c).unwrap());
    }
}
