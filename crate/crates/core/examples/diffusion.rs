//! Iterated substitution as a diffusion process: watch the stages of
//! `p := []p | (<>p & p)` on a small model until they repeat.
use subkit::checker::{stage_sequence, truth_set};
use subkit::kripke::KripkeModel;
use subkit::syntax::{parse_formula, prop};

fn main() {
    let m = KripkeModel::fixture("fig1").expect("fixture");
    let body = parse_formula("[]p | (<>p & p)").unwrap();
    let seq = stage_sequence(&m, &prop("p"), &body, None).unwrap();
    for (i, s) in seq.stages.iter().enumerate() {
        println!("stage {i}: {:?}", m.names_of(s));
    }
    println!("pre-period {}, period {}", seq.pre_period, seq.period);

    let f = parse_formula("<p:=p; (p:=[]p | (<>p & p))*>p").unwrap();
    println!("{f} holds at {:?}", m.names_of(&truth_set(&m, &f).unwrap()));

    let osc = KripkeModel::fixture("oscillation").expect("fixture");
    let flip = stage_sequence(&osc, &prop("p"), &parse_formula("~p").unwrap(), None).unwrap();
    println!("negation on the oscillation model: period {}", flip.period);
}
