//! Eliminating substitutions step by step.
use subkit::checker::truth_set;
use subkit::kripke::KripkeModel;
use subkit::reduce::reduce_to_ml;
use subkit::syntax::parse_formula;

fn main() {
    let f = parse_formula("<p:=<>q>(p & [](p -> <q:=p>q))").unwrap();
    let (g, trace) = reduce_to_ml(&f).unwrap();
    for step in &trace.steps {
        println!("{:<16} {:?}: {}  ~>  {}", step.rule.to_string(), step.position, step.before, step.after);
    }
    println!("{f}\n  == {g}");
    let m = KripkeModel::fixture("fig4").unwrap();
    assert_eq!(truth_set(&m, &f).unwrap(), truth_set(&m, &g).unwrap());
    println!("agree on fig4");
}
