//! Reduction of substitution formulas to plain modal logic.
//!
//! The innermost substitution (leftmost on ties) is pushed through the
//! connectives of its scope until it disappears:
//!
//! | rule | before | after |
//! |------|--------|-------|
//! | R1 | `<p:=c>q`, `q != p` (also `false`) | `q` |
//! | R2 | `<p:=c>p` | `c` |
//! | R3 | `<p:=c>~a` | `~<p:=c>a` |
//! | R4 | `<p:=c>(a & b)` | `<p:=c>a & <p:=c>b` |
//! | R5 | `<p:=c><l>a` | `<l><p:=c>a` |
//!
//! Rewrites below an enclosing substitution are followed by congruence steps
//! recording the enclosing node before and after.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sat::tableau_sat;
use crate::syntax::{is_clean, replace, Formula, FormulaError, PropName};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("formula contains an iterated substitution")]
    HasStar,
    #[error("substitution precondition violated: {0}")]
    NotClean(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    CongruenceScope,
    CongruenceBody,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One rewrite: the subformula at `position` went from `before` to `after`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewriteStep {
    pub rule: Rule,
    pub position: Vec<usize>,
    pub before: Formula,
    pub after: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub input: Formula,
    pub output: Formula,
    pub steps: Vec<RewriteStep>,
}

impl ReductionTrace {
    /// One JSON object per step.
    pub fn to_json_lines(&self) -> String {
        self.steps
            .iter()
            .map(|s| serde_json::to_string(s).expect("serializable") + "\n")
            .collect()
    }

    pub fn from_json_lines(input: Formula, text: &str) -> Result<Self, serde_json::Error> {
        let steps = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<RewriteStep>, _>>()?;
        let mut output = input.clone();
        for s in &steps {
            if let Some(slot) = output.at_mut(&s.position) {
                *slot = s.after.clone();
            }
        }
        Ok(ReductionTrace {
            input,
            output,
            steps,
        })
    }

    /// Rewrites excluding congruence bookkeeping.
    pub fn rewrite_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| !matches!(s.rule, Rule::CongruenceScope | Rule::CongruenceBody))
            .count()
    }
}

/// Position of the leftmost substitution with no substitution below it.
fn innermost_sub(f: &Formula) -> Option<Vec<usize>> {
    for (i, c) in f.children().into_iter().enumerate() {
        if let Some(mut path) = innermost_sub(c) {
            path.insert(0, i);
            return Some(path);
        }
    }
    matches!(f, Formula::Sub { .. }).then(Vec::new)
}

/// The local rewrite for a substitution node, if one applies.
pub fn rewrite_once(f: &Formula) -> Option<(Rule, Formula)> {
    let Formula::Sub { pivot, body, scope } = f else {
        return None;
    };
    let sub = |g: &Formula| Formula::sub(pivot, (**body).clone(), g.clone());
    Some(match &**scope {
        Formula::Atom(q) if q == pivot => (Rule::R2, (**body).clone()),
        Formula::Atom(_) | Formula::Bottom => (Rule::R1, (**scope).clone()),
        Formula::Neg(a) => (Rule::R3, sub(a).not()),
        Formula::And(a, b) => (Rule::R4, sub(a).and(sub(b))),
        Formula::Diamond(l, a) => (Rule::R5, Formula::diamond_l(l, sub(a))),
        Formula::Sub { .. } | Formula::Star { .. } => return None,
    })
}

struct Reducer {
    current: Formula,
    steps: Vec<RewriteStep>,
}

impl Reducer {
    fn rewrite_at(&mut self, pos: Vec<usize>) {
        let node = self.current.at(&pos).expect("valid position").clone();
        let Some((rule, after)) = rewrite_once(&node) else {
            return;
        };
        let before_whole = self.current.clone();
        *self.current.at_mut(&pos).expect("valid position") = after.clone();
        self.steps.push(RewriteStep {
            rule,
            position: pos.clone(),
            before: node,
            after: after.clone(),
        });
        for k in (0..pos.len()).rev() {
            let anc = &pos[..k];
            if let Formula::Sub { .. } = before_whole.at(anc).expect("ancestor") {
                self.steps.push(RewriteStep {
                    rule: if pos[k] == 1 {
                        Rule::CongruenceScope
                    } else {
                        Rule::CongruenceBody
                    },
                    position: anc.to_vec(),
                    before: before_whole.at(anc).unwrap().clone(),
                    after: self.current.at(anc).unwrap().clone(),
                });
            }
        }
        let children: Vec<usize> = match rule {
            Rule::R3 | Rule::R5 => vec![0],
            Rule::R4 => vec![0, 1],
            _ => vec![],
        };
        for c in children {
            let mut child = pos.clone();
            child.push(c);
            self.rewrite_at(child);
        }
    }
}

/// Eliminates every substitution, recording each rewrite.
pub fn reduce_to_ml(f: &Formula) -> Result<(Formula, ReductionTrace), ReduceError> {
    if f.has_star() {
        return Err(ReduceError::HasStar);
    }
    let mut r = Reducer {
        current: f.clone(),
        steps: Vec::new(),
    };
    while let Some(pos) = innermost_sub(&r.current) {
        r.rewrite_at(pos);
    }
    let out = r.current.clone();
    Ok((
        out.clone(),
        ReductionTrace {
            input: f.clone(),
            output: out,
            steps: r.steps,
        },
    ))
}

/// Performs `<p:=with>scope` as a syntactic replacement. Both the whole
/// formula and `scope` must be clean, which rules out capture.
pub fn apply_clean_substitution(
    p: &PropName,
    with: &Formula,
    scope: &Formula,
) -> Result<Formula, ReduceError> {
    let whole = Formula::sub(p, with.clone(), scope.clone());
    if let Formula::Star { pivot, .. } = scope {
        if pivot == p {
            return Err(ReduceError::NotClean(format!(
                "<{p}:=...> is the initial assignment of an iterated substitution; \
                 the scope alone is not normal"
            )));
        }
    }
    if !is_clean(scope) {
        return Err(ReduceError::NotClean(format!("scope {scope} is not clean")));
    }
    if !is_clean(&whole) {
        return Err(ReduceError::NotClean(format!("{whole} is not clean")));
    }
    Ok(replace(scope, with, p)?)
}

/// Decides equivalence of two star-free formulas via reduction and the tableau.
pub fn msl_equiv_decide(a: &Formula, b: &Formula) -> Result<bool, ReduceError> {
    let (ra, _) = reduce_to_ml(a)?;
    let (rb, _) = reduce_to_ml(b)?;
    let probe = ra.iff(rb).not();
    Ok(!tableau_sat(&probe).expect("substitution-free").is_sat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{atom, parse_formula, prop};

    fn pf(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn single_rules() {
        let (out, t) = reduce_to_ml(&pf("<p:=r>p")).unwrap();
        assert_eq!(out, atom("r"));
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].rule, Rule::R2);
        let (out, t) = reduce_to_ml(&pf("<p:=r>~p")).unwrap();
        assert_eq!(out, pf("~r"));
        let rules: Vec<Rule> = t.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, [Rule::R3, Rule::R2]);
        let (out, _) = reduce_to_ml(&pf("<p:=r>(<>p & q & false)")).unwrap();
        assert_eq!(out, pf("<>r & q & false"));
    }

    #[test]
    fn innermost_first_with_congruence() {
        let (out, t) = reduce_to_ml(&pf("<p:=q><q:=r>(p & q)")).unwrap();
        assert_eq!(out, pf("q & r"));
        assert_eq!(t.steps[0].rule, Rule::R4);
        assert_eq!(t.steps[0].position, vec![1]);
        assert_eq!(t.steps[1].rule, Rule::CongruenceScope);
        assert_eq!(t.steps[1].position, Vec::<usize>::new());
        assert!(t.to_json_lines().lines().count() == t.steps.len());
    }

    #[test]
    fn reduction_trace_parses_back() {
        let f = pf("<p:=<>q>(p & ~p)");
        let (_, t) = reduce_to_ml(&f).unwrap();
        let back = ReductionTrace::from_json_lines(f, &t.to_json_lines()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn clean_substitution() {
        assert_eq!(
            apply_clean_substitution(&prop("q"), &pf("r"), &pf("q")).unwrap(),
            atom("r")
        );
        assert!(matches!(
            apply_clean_substitution(&prop("p"), &pf("<>p"), &pf("p")),
            Err(ReduceError::NotClean(_))
        ));
        let star = pf("<(p:=[]p)*>p");
        assert!(matches!(
            apply_clean_substitution(&prop("p"), &pf("q"), &star),
            Err(ReduceError::NotClean(m)) if m.contains("iterated")
        ));
        assert_eq!(
            apply_clean_substitution(&prop("q"), &pf("r"), &pf("<p:=q; (p:=[]p)*>p")).unwrap(),
            pf("<p:=r; (p:=[]p)*>p")
        );
    }

    #[test]
    fn stars_are_rejected() {
        assert_eq!(
            reduce_to_ml(&pf("<p:=q; (p:=[]p)*>p")).unwrap_err(),
            ReduceError::HasStar
        );
    }

    #[test]
    fn equivalences() {
        assert!(msl_equiv_decide(&pf("<p:=q>[]p"), &pf("[]q")).unwrap());
        assert!(!msl_equiv_decide(&pf("<p:=q>p"), &pf("p")).unwrap());
    }
}
