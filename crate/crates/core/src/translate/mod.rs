//! Translations into iterated substitution logic from propositional dynamic
//! logic, iterated announcement logic and least fixpoints, each with a
//! direct evaluator to compare against.

mod imr;
mod mu;
mod pdl;

use thiserror::Error;

use crate::checker::CheckError;
use crate::kripke::ModelError;
use crate::syntax::{Formula, ParseError, PropName, RelLabel};

pub use imr::{imr_eval, imr_truth_set, parse_imr, translate_imr, ImrFormula};
pub use mu::{is_positive, mu_eval, mu_truth_set, mu_unfold, parse_mu_formula};
pub use pdl::{parse_pdl, pdl_eval, pdl_truth_set, program_relation, translate_pdl, PdlFormula, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("relativizing letter {0} is bound in the formula")]
    PivotBound(PropName),
    #[error("{0} occurs negatively or inside a substitution body")]
    NotPositive(PropName),
    #[error("model has no relation {0}")]
    UnknownRelation(RelLabel),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

fn binds(f: &Formula, p: &PropName) -> bool {
    match f {
        Formula::Atom(_) | Formula::Bottom => false,
        Formula::Sub { pivot, .. } | Formula::Star { pivot, .. } if pivot == p => true,
        _ => f.children().into_iter().any(|c| binds(c, p)),
    }
}

/// `(phi)^p`: holds at s iff s lacks p or phi holds at s once the model is
/// restricted to the p-states.
pub fn relativize_formula(f: &Formula, p: &PropName) -> Result<Formula, TranslateError> {
    if binds(f, p) {
        return Err(TranslateError::PivotBound(p.clone()));
    }
    Ok(rel(f, p))
}

fn rel(f: &Formula, p: &PropName) -> Formula {
    let guard = |x: Formula| Formula::Atom(p.clone()).implies(x);
    if let Some((l, inner)) = f.as_box() {
        return guard(Formula::box_l(l, rel(inner, p)));
    }
    match f {
        Formula::Atom(_) | Formula::Bottom => guard(f.clone()),
        Formula::Neg(a) => guard(rel(a, p).not()),
        Formula::And(a, b) => rel(a, p).and(rel(b, p)),
        Formula::Diamond(l, a) => rel(&Formula::box_l(l, (**a).clone().not()).not(), p),
        Formula::Sub { pivot, body, scope } => Formula::sub(pivot, rel(body, p), rel(scope, p)),
        Formula::Star {
            pivot,
            body,
            scope,
            mode,
        } => Formula::star(pivot, rel(body, p), rel(scope, p), *mode),
    }
}
