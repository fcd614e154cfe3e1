//! Programs with iteration expressed through iterated substitution.
use subkit::checker::truth_set;
use subkit::kripke::KripkeModel;
use subkit::translate::{parse_pdl, pdl_truth_set, translate_pdl};

fn main() {
    let m = KripkeModel::fixture("fig1").unwrap();
    for src in ["<d*>p", "[d;d]q", "<(d;d)*>(p & q)", "[d*](p | <d>p)"] {
        let f = parse_pdl(src).unwrap();
        let g = translate_pdl(&f);
        let same = pdl_truth_set(&m, &f).unwrap() == truth_set(&m, &g).unwrap();
        println!("{src}\n  -> {g}\n  agree: {same}");
    }
}
