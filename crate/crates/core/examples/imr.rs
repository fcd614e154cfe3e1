//! Iterated announcements translated into iterated substitution.
use subkit::checker::truth_set;
use subkit::kripke::KripkeModel;
use subkit::translate::{imr_truth_set, parse_imr, translate_imr};

fn main() {
    let m = KripkeModel::fixture("fig4").unwrap();
    for src in ["[!<>p]p", "[!<>p*]p", "[!q]<>q"] {
        let f = parse_imr(src).unwrap();
        let g = translate_imr(&f);
        let same = imr_truth_set(&m, &f).unwrap() == truth_set(&m, &g).unwrap();
        println!("{src}\n  -> {g}\n  agree: {same}");
    }
}
