//! Least fixpoints `mu p . phi` as iterated substitutions from `false`.

use crate::checker::truth_set;
use crate::kripke::{KripkeModel, StateSet};
use crate::syntax::{Formula, Parser, PropName};

use super::TranslateError;

fn occurs_free(f: &Formula, p: &PropName) -> bool {
    match f {
        Formula::Atom(q) => q == p,
        Formula::Bottom => false,
        Formula::Neg(a) | Formula::Diamond(_, a) => occurs_free(a, p),
        Formula::And(a, b) => occurs_free(a, p) || occurs_free(b, p),
        Formula::Sub { pivot, body, scope } => occurs_free(body, p) || (pivot != p && occurs_free(scope, p)),
        // A bare iteration starts from the current value of its pivot.
        Formula::Star { pivot, body, scope, .. } => pivot == p || occurs_free(body, p) || occurs_free(scope, p),
    }
}

fn positive(f: &Formula, p: &PropName, pol: bool) -> bool {
    match f {
        Formula::Atom(q) => q != p || pol,
        Formula::Bottom => true,
        Formula::Neg(a) => positive(a, p, !pol),
        Formula::Diamond(_, a) => positive(a, p, pol),
        Formula::And(a, b) => positive(a, p, pol) && positive(b, p, pol),
        Formula::Sub { pivot, body, scope } => {
            !occurs_free(body, p) && (pivot == p || positive(scope, p, pol))
        }
        Formula::Star { pivot, body, scope, .. } => {
            pivot != p && !occurs_free(body, p) && positive(scope, p, pol)
        }
    }
}

/// Syntactic positivity: every free occurrence of `p` is under an even
/// number of negations and outside substitution bodies.
pub fn is_positive(body: &Formula, p: &PropName) -> bool {
    positive(body, p, true)
}

/// `<p:=false; (p:=body)*>p`.
pub fn mu_unfold(pivot: &PropName, body: &Formula) -> Result<Formula, TranslateError> {
    if !is_positive(body, pivot) {
        return Err(TranslateError::NotPositive(pivot.clone()));
    }
    Ok(Formula::iterate(
        pivot,
        Formula::Bottom,
        body.clone(),
        Formula::Atom(pivot.clone()),
    ))
}

/// Least fixpoint by Kleene iteration from the empty set.
pub fn mu_truth_set(m: &KripkeModel, pivot: &PropName, body: &Formula) -> Result<StateSet, TranslateError> {
    if !is_positive(body, pivot) {
        return Err(TranslateError::NotPositive(pivot.clone()));
    }
    let mut cur = StateSet::empty(m.len());
    loop {
        let next = truth_set(&m.set_valuation(pivot, &cur), body)?;
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

pub fn mu_eval(m: &KripkeModel, state: &str, pivot: &PropName, body: &Formula) -> Result<bool, TranslateError> {
    let i = m.index_of(state)?;
    Ok(mu_truth_set(m, pivot, body)?.contains(i))
}

/// Formula syntax extended with `mu p . phi`, unfolded while parsing.
pub fn parse_mu_formula(src: &str) -> Result<Formula, TranslateError> {
    let mut p = Parser::new(src)?.with_mu(|pivot, body| mu_unfold(&pivot, &body).map_err(|e| e.to_string()));
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}
