//! Deciding star-free formulas, and bounded search for iterated ones.
use subkit::sat::{brute_force_search, msl_sat};
use subkit::syntax::parse_formula;

fn main() {
    for src in ["<p:=q>(p & <>~q)", "<p:=<>p>p & []false", "<p:=[]q>[]q -> p"] {
        let f = parse_formula(src).unwrap();
        let r = msl_sat(&f).unwrap();
        print!("{src}: {:?}", r.status);
        if let Some(w) = r.witness {
            print!(" at {} in {} states", w.point, w.model.len());
        }
        println!();
    }
    let f = parse_formula("<p:=[]false; (p:=[]p)*>~p & <>true").unwrap();
    let r = brute_force_search(&f, 3).unwrap();
    println!("bounded search: {:?}, witness size {:?}", r.status, r.witness.map(|w| w.model.len()));
}
