//! Building a derivation for a reduction and checking it line by line.
use subkit::calculus::{assemble_reduction_proof, check_derivation, verify_reduction_trace, Derivation};
use subkit::reduce::reduce_to_ml;
use subkit::syntax::parse_formula;

fn main() {
    let f = parse_formula("<p:=<>q>(~p & <r:=p>[]r)").unwrap();
    let d = assemble_reduction_proof(&f).unwrap();
    let report = check_derivation(&d).unwrap();
    println!("{} lines, conclusion {}", report.lines, report.conclusion.unwrap());

    let text = d.to_json_lines();
    let back = Derivation::from_json_lines(&text).unwrap();
    assert_eq!(back, d);

    let (_, trace) = reduce_to_ml(&f).unwrap();
    verify_reduction_trace(&trace).unwrap();
    println!("trace with {} steps verified", trace.steps.len());

    let mut bad = d.clone();
    let last = bad.lines.len() - 1;
    bad.lines[last].formula = parse_formula("p").unwrap();
    println!("tampered: {}", check_derivation(&bad).unwrap_err());
}
