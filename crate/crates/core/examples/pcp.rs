//! Correspondence instances, their encoding, and a witness model for a
//! solvable instance.
use subkit::checker::eval;
use subkit::games::pcp::{pcp_bounded_search, pcp_encode, pcp_fixtures, pcp_witness_model};

fn main() {
    for (name, inst) in pcp_fixtures() {
        match pcp_bounded_search(&inst, 8) {
            Some(sol) => {
                let (u, v) = inst.concat(&sol);
                println!("{name}: {sol:?} gives {u} / {v}");
                let f = pcp_encode(&inst).unwrap();
                let w = pcp_witness_model(&inst, &sol).unwrap();
                println!("  encoding has {} chars; witness with {} states satisfies it: {}",
                    f.to_string().len(), w.model.len(), eval(&w.model, &w.point, &f).unwrap());
            }
            None => println!("{name}: no solution up to length 8"),
        }
    }
}
