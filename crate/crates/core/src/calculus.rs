//! Hilbert-style proof checking for substitution logic.
//!
//! A derivation is a numbered list of formulas, each justified by an axiom,
//! a rule applied to earlier lines, a propositional tautology or a
//! hypothesis. The congruence rules are admitted as macros and are checked by
//! expanding them into primitive lines.
//!
//! Axioms:
//!
//! | id | schema |
//! |----|--------|
//! | A1 | `a -> (b -> a)` |
//! | A2 | `(a -> (b -> c)) -> ((a -> b) -> (a -> c))` |
//! | A3 | `(~a -> ~b) -> (b -> a)` |
//! | Dual | `<l>a <-> ~[l]~a` |
//! | KBox | `[l](a -> b) -> ([l]a -> [l]b)` |
//! | KSub | `[p:=c](a -> b) -> ([p:=c]a -> [p:=c]b)` |
//! | R1..R5 | the reduction equivalences, see [`crate::reduce`] |

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reduce::{reduce_to_ml, ReductionTrace, Rule};
use crate::syntax::{Formula, PropName, RelLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    Dual,
    KBox,
    KSub,
    R1,
    R2,
    R3,
    R4,
    R5,
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Justification {
    Axiom { id: AxiomId },
    /// From `minor` and `major = minor -> this`.
    MP { minor: usize, major: usize },
    NecBox { line: usize },
    NecSub { line: usize, pivot: PropName, body: Formula },
    /// Accepted without proof; reported back by the checker.
    Hypothesis,
    Taut,
    /// `a <-> b` gives `[p:=c]a <-> [p:=c]b`.
    CongScope { line: usize },
    /// `a <-> b` gives `[p:=a]f <-> [p:=b]f`.
    CongBody { line: usize },
    /// `a <-> b` gives `<l>a <-> <l>b`.
    CongDiamond { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofLine {
    pub n: usize,
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Derivation {
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("line {line}: {reason}")]
    SchemaMismatch { line: usize, reason: String },
    #[error("line {line}: side condition violated: {reason}")]
    SideConditionViolated { line: usize, reason: String },
    #[error("line {line}: bad citation of line {cited}")]
    BadCitation { line: usize, cited: usize },
    #[error("proof line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("trace step {index}: {reason}")]
    StepMismatch { index: usize, reason: String },
    #[error("cannot derive: {0}")]
    Unsupported(String),
}

/// Outcome of a successful check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub lines: usize,
    /// Line numbers justified as hypotheses.
    pub hypotheses: Vec<usize>,
    pub conclusion: Option<Formula>,
}

impl Derivation {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    pub fn to_json_lines(&self) -> String {
        self.lines
            .iter()
            .map(|l| serde_json::to_string(l).expect("serializable") + "\n")
            .collect()
    }

    pub fn from_json_lines(text: &str) -> Result<Self, ProofError> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let l: ProofLine = serde_json::from_str(raw).map_err(|e| ProofError::Json {
                line: i + 1,
                message: e.to_string(),
            })?;
            lines.push(l);
        }
        Ok(Derivation { lines })
    }
}

fn as_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::Neg(inner) = f else { return None };
    let Formula::And(a, nb) = &**inner else {
        return None;
    };
    let Formula::Neg(b) = &**nb else { return None };
    Some((a, b))
}

fn as_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::And(x, y) = f else { return None };
    let (a, b) = as_implies(x)?;
    let (b2, a2) = as_implies(y)?;
    (a == a2 && b == b2).then_some((a, b))
}

fn as_sub(f: &Formula) -> Option<(&PropName, &Formula, &Formula)> {
    match f {
        Formula::Sub { pivot, body, scope } => Some((pivot, body, scope)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    Schema(String),
    SideCondition(String),
}

fn need(ok: bool, what: &str) -> Result<(), AxiomFailure> {
    if ok {
        Ok(())
    } else {
        Err(AxiomFailure::Schema(what.to_string()))
    }
}

fn shape<'a, T>(x: Option<T>, what: &str) -> Result<T, AxiomFailure> {
    x.ok_or_else(|| AxiomFailure::Schema(what.to_string()))
}

/// Whether `f` is an instance of the named axiom schema.
pub fn axiom_instance(id: AxiomId, f: &Formula) -> Result<(), AxiomFailure> {
    let not_impl = "not an implication";
    let not_iff = "not a biconditional";
    match id {
        AxiomId::A1 => {
            let (a, r) = shape(as_implies(f), not_impl)?;
            let (_, c) = shape(as_implies(r), not_impl)?;
            need(a == c, "consequent differs from antecedent")
        }
        AxiomId::A2 => {
            let (l, r) = shape(as_implies(f), not_impl)?;
            let (a, l2) = shape(as_implies(l), not_impl)?;
            let (b, c) = shape(as_implies(l2), not_impl)?;
            let (r1, r2) = shape(as_implies(r), not_impl)?;
            let (a1, b1) = shape(as_implies(r1), not_impl)?;
            let (a2, c2) = shape(as_implies(r2), not_impl)?;
            need(a == a1 && a == a2 && b == b1 && c == c2, "components differ")
        }
        AxiomId::A3 => {
            let (l, r) = shape(as_implies(f), not_impl)?;
            let (na, nb) = shape(as_implies(l), not_impl)?;
            let (b, a) = shape(as_implies(r), not_impl)?;
            need(
                *na == a.clone().not() && *nb == b.clone().not(),
                "components differ",
            )
        }
        AxiomId::Dual => {
            let (l, r) = shape(as_iff(f), not_iff)?;
            let Formula::Diamond(lab, a) = l else {
                return Err(AxiomFailure::Schema("left side is not a diamond".into()));
            };
            need(
                *r == Formula::box_l(lab, (**a).clone().not()).not(),
                "right side is not the dual box",
            )
        }
        AxiomId::KBox => {
            let (l, r) = shape(as_implies(f), not_impl)?;
            let (lab, inner) = shape(l.as_box(), "antecedent is not a box")?;
            let (a, b) = shape(as_implies(inner), not_impl)?;
            need(
                *r == Formula::box_l(lab, a.clone()).implies(Formula::box_l(lab, b.clone())),
                "consequent does not distribute the box",
            )
        }
        AxiomId::KSub => {
            let (l, r) = shape(as_implies(f), not_impl)?;
            let (p, c, inner) = shape(as_sub(l), "antecedent is not a substitution")?;
            let (a, b) = shape(as_implies(inner), not_impl)?;
            let s = |g: &Formula| Formula::sub(p, c.clone(), g.clone());
            need(*r == s(a).implies(s(b)), "consequent does not distribute the substitution")
        }
        AxiomId::R1 | AxiomId::R2 | AxiomId::R3 | AxiomId::R4 | AxiomId::R5 => {
            let (l, r) = shape(as_iff(f), not_iff)?;
            let (p, c, scope) = shape(as_sub(l), "left side is not a substitution")?;
            let s = |g: &Formula| Formula::sub(p, c.clone(), g.clone());
            match id {
                AxiomId::R1 => match scope {
                    Formula::Atom(q) if q == p => Err(AxiomFailure::SideCondition(format!(
                        "scope is the pivot {p} itself"
                    ))),
                    Formula::Atom(_) | Formula::Bottom => need(r == scope, "right side differs from scope"),
                    _ => Err(AxiomFailure::Schema("scope is not a letter".into())),
                },
                AxiomId::R2 => {
                    need(*scope == Formula::Atom(p.clone()), "scope is not the pivot")?;
                    need(r == c, "right side is not the substituted formula")
                }
                AxiomId::R3 => {
                    let Formula::Neg(a) = scope else {
                        return Err(AxiomFailure::Schema("scope is not a negation".into()));
                    };
                    need(*r == s(a).not(), "right side mismatch")
                }
                AxiomId::R4 => {
                    let Formula::And(a, b) = scope else {
                        return Err(AxiomFailure::Schema("scope is not a conjunction".into()));
                    };
                    need(*r == s(a).and(s(b)), "right side mismatch")
                }
                _ => {
                    let (lab, a) = shape(scope.as_box(), "scope is not a box")?;
                    need(*r == Formula::box_l(lab, s(a)), "right side mismatch")
                }
            }
        }
    }
}

enum Prop {
    Const(bool),
    Var(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
}

fn abstract_prop(f: &Formula, ids: &mut HashMap<Formula, usize>) -> Prop {
    match f {
        Formula::Bottom => Prop::Const(false),
        Formula::Neg(a) => Prop::Not(Box::new(abstract_prop(a, ids))),
        Formula::And(a, b) => Prop::And(Box::new(abstract_prop(a, ids)), Box::new(abstract_prop(b, ids))),
        _ => {
            let n = ids.len();
            Prop::Var(*ids.entry(f.clone()).or_insert(n))
        }
    }
}

fn eval3(p: &Prop, asg: &[Option<bool>]) -> Option<bool> {
    match p {
        Prop::Const(b) => Some(*b),
        Prop::Var(i) => asg[*i],
        Prop::Not(a) => eval3(a, asg).map(|b| !b),
        Prop::And(a, b) => match (eval3(a, asg), eval3(b, asg)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
    }
}

fn valid_from(p: &Prop, asg: &mut Vec<Option<bool>>, next: usize) -> bool {
    match eval3(p, asg) {
        Some(b) => b,
        None => {
            for v in [false, true] {
                asg[next] = Some(v);
                if !valid_from(p, asg, next + 1) {
                    asg[next] = None;
                    return false;
                }
            }
            asg[next] = None;
            true
        }
    }
}

/// Propositional validity, treating modal and substitution subformulas as
/// opaque letters.
pub fn is_tautology(f: &Formula) -> bool {
    let mut ids = HashMap::new();
    let p = abstract_prop(f, &mut ids);
    let mut asg = vec![None; ids.len()];
    valid_from(&p, &mut asg, 0)
}

fn iff_sides(d: &Derivation, at: usize, cited: usize) -> Result<(Formula, Formula), ProofError> {
    let f = &d.lines[cited - 1].formula;
    as_iff(f)
        .map(|(a, b)| (a.clone(), b.clone()))
        .ok_or_else(|| ProofError::SchemaMismatch {
            line: at,
            reason: format!("cited line {cited} is not a biconditional"),
        })
}

fn expansion_agrees(mut b: ProofBuilder, premise: usize, run: impl FnOnce(&mut ProofBuilder, usize) -> Result<usize, ProofError>, target: &Formula, at: usize) -> Result<(), ProofError> {
    let concl = run(&mut b, premise)?;
    let sub = b.finish();
    check_derivation(&sub).map_err(|e| ProofError::SchemaMismatch {
        line: at,
        reason: format!("macro expansion fails: {e}"),
    })?;
    if &sub.lines[concl - 1].formula != target {
        return Err(ProofError::SchemaMismatch {
            line: at,
            reason: "formula is not the rule's conclusion".into(),
        });
    }
    Ok(())
}

fn check_line(d: &Derivation, k: usize) -> Result<(), ProofError> {
    let line = &d.lines[k - 1];
    let f = &line.formula;
    let cite = |c: usize| {
        if c == 0 || c >= k {
            Err(ProofError::BadCitation { line: k, cited: c })
        } else {
            Ok(&d.lines[c - 1].formula)
        }
    };
    let mismatch = |reason: &str| ProofError::SchemaMismatch {
        line: k,
        reason: reason.to_string(),
    };
    match &line.just {
        Justification::Axiom { id } => axiom_instance(*id, f).map_err(|e| match e {
            AxiomFailure::Schema(r) => ProofError::SchemaMismatch {
                line: k,
                reason: format!("not an instance of {id}: {r}"),
            },
            AxiomFailure::SideCondition(r) => ProofError::SideConditionViolated { line: k, reason: r },
        }),
        Justification::MP { minor, major } => {
            let a = cite(*minor)?;
            let m = cite(*major)?;
            match as_implies(m) {
                Some((x, y)) if x == a && y == f => Ok(()),
                _ => Err(mismatch("modus ponens premises do not fit")),
            }
        }
        Justification::NecBox { line: c } => {
            let a = cite(*c)?;
            match f.as_box() {
                Some((_, inner)) if inner == a => Ok(()),
                _ => Err(mismatch("not a box over the cited line")),
            }
        }
        Justification::NecSub { line: c, pivot, body } => {
            let a = cite(*c)?;
            if *f == Formula::sub(pivot, body.clone(), a.clone()) {
                Ok(())
            } else {
                Err(mismatch("not a substitution over the cited line"))
            }
        }
        Justification::Hypothesis => Ok(()),
        Justification::Taut => {
            if is_tautology(f) {
                Ok(())
            } else {
                Err(mismatch("not a propositional tautology"))
            }
        }
        Justification::CongScope { line: c } => {
            cite(*c)?;
            let (a, b) = iff_sides(d, k, *c)?;
            let (l, _) = as_iff(f).ok_or_else(|| mismatch("not a biconditional"))?;
            let (p, body, _) = as_sub(l).ok_or_else(|| mismatch("left side is not a substitution"))?;
            let (p, body) = (p.clone(), body.clone());
            let mut pb = ProofBuilder::default();
            let h = pb.push(a.iff(b), Justification::Hypothesis);
            expansion_agrees(pb, h, |pb, h| pb.cong_scope(&p, &body, h), f, k)
        }
        Justification::CongBody { line: c } => {
            cite(*c)?;
            let (a, b) = iff_sides(d, k, *c)?;
            let (l, _) = as_iff(f).ok_or_else(|| mismatch("not a biconditional"))?;
            let (p, _, scope) = as_sub(l).ok_or_else(|| mismatch("left side is not a substitution"))?;
            let (p, scope) = (p.clone(), scope.clone());
            let mut pb = ProofBuilder::default();
            let h = pb.push(a.iff(b), Justification::Hypothesis);
            expansion_agrees(pb, h, |pb, h| pb.cong_body(&p, h, &scope), f, k)
        }
        Justification::CongDiamond { line: c } => {
            cite(*c)?;
            let (a, b) = iff_sides(d, k, *c)?;
            let (l, _) = as_iff(f).ok_or_else(|| mismatch("not a biconditional"))?;
            let Formula::Diamond(lab, _) = l else {
                return Err(mismatch("left side is not a diamond"));
            };
            let lab = lab.clone();
            let mut pb = ProofBuilder::default();
            let h = pb.push(a.iff(b), Justification::Hypothesis);
            expansion_agrees(pb, h, |pb, h| Ok(pb.cong_diamond(&lab, h)), f, k)
        }
    }
}

/// Checks every line in order; the first failure is returned.
pub fn check_derivation(d: &Derivation) -> Result<CheckReport, ProofError> {
    let mut hypotheses = Vec::new();
    for (i, line) in d.lines.iter().enumerate() {
        let k = i + 1;
        if line.n != k {
            return Err(ProofError::SchemaMismatch {
                line: k,
                reason: format!("numbered {} out of sequence", line.n),
            });
        }
        check_line(d, k)?;
        if line.just == Justification::Hypothesis {
            hypotheses.push(k);
        }
    }
    Ok(CheckReport {
        lines: d.lines.len(),
        hypotheses,
        conclusion: d.conclusion().cloned(),
    })
}

/// Accumulates primitive proof lines. Formulas already derived are reused.
#[derive(Default)]
pub struct ProofBuilder {
    lines: Vec<ProofLine>,
    known: HashMap<Formula, usize>,
}

impl ProofBuilder {
    pub fn formula(&self, line: usize) -> &Formula {
        &self.lines[line - 1].formula
    }

    pub fn push(&mut self, f: Formula, just: Justification) -> usize {
        if let Some(&n) = self.known.get(&f) {
            return n;
        }
        let n = self.lines.len() + 1;
        self.known.insert(f.clone(), n);
        self.lines.push(ProofLine { n, formula: f, just });
        n
    }

    pub fn finish(self) -> Derivation {
        Derivation { lines: self.lines }
    }

    /// Finishes so that `line` is restated as the last line.
    pub fn finish_at(mut self, line: usize) -> Derivation {
        if line != self.lines.len() {
            let f = self.formula(line).clone();
            let major = self.taut(f.clone().implies(f.clone()));
            let n = self.lines.len() + 1;
            self.lines.push(ProofLine {
                n,
                formula: f,
                just: Justification::MP { minor: line, major },
            });
        }
        self.finish()
    }

    pub fn axiom(&mut self, id: AxiomId, f: Formula) -> usize {
        debug_assert!(axiom_instance(id, &f).is_ok(), "{id}: {f}");
        self.push(f, Justification::Axiom { id })
    }

    pub fn taut(&mut self, f: Formula) -> usize {
        debug_assert!(is_tautology(&f), "{f}");
        self.push(f, Justification::Taut)
    }

    pub fn mp(&mut self, minor: usize, major: usize) -> usize {
        let (_, c) = as_implies(self.formula(major)).expect("major premise is an implication");
        let c = c.clone();
        self.push(c, Justification::MP { minor, major })
    }

    /// Derives `concl` from the premises through one tautology and modus ponens.
    pub fn by_taut(&mut self, premises: &[usize], concl: Formula) -> usize {
        let chain = premises
            .iter()
            .rev()
            .fold(concl, |acc, &p| self.formula(p).clone().implies(acc));
        let mut cur = self.taut(chain);
        for &p in premises {
            cur = self.mp(p, cur);
        }
        cur
    }

    fn sides(&self, line: usize) -> (Formula, Formula) {
        let (a, b) = as_iff(self.formula(line)).expect("biconditional");
        (a.clone(), b.clone())
    }

    pub fn trans(&mut self, i: usize, j: usize) -> usize {
        let (a, _) = self.sides(i);
        let (_, c) = self.sides(j);
        self.by_taut(&[i, j], a.iff(c))
    }

    pub fn nec_box(&mut self, l: &RelLabel, line: usize) -> usize {
        let f = Formula::box_l(l, self.formula(line).clone());
        self.push(f, Justification::NecBox { line })
    }

    pub fn nec_sub(&mut self, p: &PropName, body: &Formula, line: usize) -> usize {
        let f = Formula::sub(p, body.clone(), self.formula(line).clone());
        self.push(
            f,
            Justification::NecSub {
                line,
                pivot: p.clone(),
                body: body.clone(),
            },
        )
    }

    fn one_way_box(&mut self, l: &RelLabel, imp: usize) -> usize {
        let (a, b) = as_implies(self.formula(imp)).expect("implication");
        let (a, b) = (a.clone(), b.clone());
        let nb = self.nec_box(l, imp);
        let k = self.axiom(
            AxiomId::KBox,
            Formula::box_l(l, a.clone().implies(b.clone()))
                .implies(Formula::box_l(l, a).implies(Formula::box_l(l, b))),
        );
        self.mp(nb, k)
    }

    /// `a <-> b` gives `[l]a <-> [l]b`.
    pub fn cong_box(&mut self, l: &RelLabel, line: usize) -> usize {
        let (a, b) = self.sides(line);
        let fwd = self.by_taut(&[line], a.clone().implies(b.clone()));
        let bwd = self.by_taut(&[line], b.clone().implies(a.clone()));
        let x = self.one_way_box(l, fwd);
        let y = self.one_way_box(l, bwd);
        self.by_taut(&[x, y], Formula::box_l(l, a).iff(Formula::box_l(l, b)))
    }

    /// `a <-> b` gives `<l>a <-> <l>b`.
    pub fn cong_diamond(&mut self, l: &RelLabel, line: usize) -> usize {
        let (a, b) = self.sides(line);
        let neg = self.by_taut(&[line], a.clone().not().iff(b.clone().not()));
        let bx = self.cong_box(l, neg);
        let da = self.dual(l, &a);
        let db = self.dual(l, &b);
        self.by_taut(
            &[da, bx, db],
            Formula::diamond_l(l, a).iff(Formula::diamond_l(l, b)),
        )
    }

    fn dual(&mut self, l: &RelLabel, a: &Formula) -> usize {
        self.axiom(
            AxiomId::Dual,
            Formula::diamond_l(l, a.clone()).iff(Formula::box_l(l, a.clone().not()).not()),
        )
    }

    fn one_way_sub(&mut self, p: &PropName, c: &Formula, imp: usize) -> usize {
        let (a, b) = as_implies(self.formula(imp)).expect("implication");
        let (a, b) = (a.clone(), b.clone());
        let s = |g: Formula| Formula::sub(p, c.clone(), g);
        let ns = self.nec_sub(p, c, imp);
        let k = self.axiom(
            AxiomId::KSub,
            s(a.clone().implies(b.clone())).implies(s(a).implies(s(b))),
        );
        self.mp(ns, k)
    }

    /// `a <-> b` gives `[p:=c]a <-> [p:=c]b`.
    pub fn cong_scope(&mut self, p: &PropName, c: &Formula, line: usize) -> Result<usize, ProofError> {
        let (a, b) = self.sides(line);
        let fwd = self.by_taut(&[line], a.clone().implies(b.clone()));
        let bwd = self.by_taut(&[line], b.clone().implies(a.clone()));
        let x = self.one_way_sub(p, c, fwd);
        let y = self.one_way_sub(p, c, bwd);
        let s = |g: Formula| Formula::sub(p, c.clone(), g);
        Ok(self.by_taut(&[x, y], s(a).iff(s(b))))
    }

    /// `[p:=c]<l>a <-> <l>[p:=c]a`, through the dual box.
    pub fn dia_r5(&mut self, p: &PropName, c: &Formula, l: &RelLabel, a: &Formula) -> Result<usize, ProofError> {
        let s = |g: Formula| Formula::sub(p, c.clone(), g);
        let d1 = self.dual(l, a);
        let lifted = self.cong_scope(p, c, d1)?;
        let boxed = Formula::box_l(l, a.clone().not());
        let r3_outer = self.axiom(AxiomId::R3, s(boxed.clone().not()).iff(s(boxed.clone()).not()));
        let r5 = self.axiom(
            AxiomId::R5,
            s(boxed).iff(Formula::box_l(l, s(a.clone().not()))),
        );
        let r3_inner = self.axiom(AxiomId::R3, s(a.clone().not()).iff(s(a.clone()).not()));
        let inner_box = self.cong_box(l, r3_inner);
        let d2 = self.dual(l, &s(a.clone()));
        Ok(self.by_taut(
            &[lifted, r3_outer, r5, inner_box, d2],
            s(Formula::diamond_l(l, a.clone())).iff(Formula::diamond_l(l, s(a.clone()))),
        ))
    }

    /// Proves `[p:=c]f <-> f[c/p]` for substitution-free `f`.
    pub fn push_through(&mut self, p: &PropName, c: &Formula, f: &Formula) -> Result<(usize, Formula), ProofError> {
        let s = |g: Formula| Formula::sub(p, c.clone(), g);
        Ok(match f {
            Formula::Atom(q) if q == p => (self.axiom(AxiomId::R2, s(f.clone()).iff(c.clone())), c.clone()),
            Formula::Atom(_) | Formula::Bottom => (self.axiom(AxiomId::R1, s(f.clone()).iff(f.clone())), f.clone()),
            Formula::Neg(a) => {
                let r3 = self.axiom(AxiomId::R3, s(f.clone()).iff(s((**a).clone()).not()));
                let (i, ra) = self.push_through(p, c, a)?;
                let out = ra.not();
                (self.by_taut(&[r3, i], s(f.clone()).iff(out.clone())), out)
            }
            Formula::And(a, b) => {
                let r4 = self.axiom(
                    AxiomId::R4,
                    s(f.clone()).iff(s((**a).clone()).and(s((**b).clone()))),
                );
                let (i, ra) = self.push_through(p, c, a)?;
                let (j, rb) = self.push_through(p, c, b)?;
                let out = ra.and(rb);
                (self.by_taut(&[r4, i, j], s(f.clone()).iff(out.clone())), out)
            }
            Formula::Diamond(l, a) => {
                let step = self.dia_r5(p, c, l, a)?;
                let (i, ra) = self.push_through(p, c, a)?;
                let inner = self.cong_diamond(l, i);
                let out = Formula::diamond_l(l, ra);
                (self.trans(step, inner), out)
            }
            Formula::Sub { .. } | Formula::Star { .. } => {
                return Err(ProofError::Unsupported(format!("scope {f} is not substitution-free")))
            }
        })
    }

    /// Proves `f <-> g` where `g` is the substitution-free reduct of `f`.
    pub fn reduce(&mut self, f: &Formula) -> Result<(usize, Formula), ProofError> {
        Ok(match f {
            Formula::Atom(_) | Formula::Bottom => (self.taut(f.clone().iff(f.clone())), f.clone()),
            Formula::Neg(a) => {
                let (i, ra) = self.reduce(a)?;
                let out = ra.not();
                (self.by_taut(&[i], f.clone().iff(out.clone())), out)
            }
            Formula::And(a, b) => {
                let (i, ra) = self.reduce(a)?;
                let (j, rb) = self.reduce(b)?;
                let out = ra.and(rb);
                (self.by_taut(&[i, j], f.clone().iff(out.clone())), out)
            }
            Formula::Diamond(l, a) => {
                let (i, ra) = self.reduce(a)?;
                (self.cong_diamond(l, i), Formula::diamond_l(l, ra))
            }
            Formula::Sub { pivot, body, scope } => {
                let (bi, rbody) = self.reduce(body)?;
                let (si, rscope) = self.reduce(scope)?;
                let a = self.cong_scope(pivot, body, si)?;
                let b = self.cong_body_plain(pivot, bi, &rscope)?;
                let (c, out) = self.push_through(pivot, &rbody, &rscope)?;
                (self.by_taut(&[a, b, c], f.clone().iff(out.clone())), out)
            }
            Formula::Star { .. } => {
                return Err(ProofError::Unsupported("iterated substitution".into()))
            }
        })
    }

    /// Replacing `p` by either side of `a <-> b` in a substitution-free `f`
    /// gives equivalent formulas.
    fn replace_cong(&mut self, p: &PropName, line: usize, f: &Formula) -> Result<(usize, Formula, Formula), ProofError> {
        let (a, b) = self.sides(line);
        Ok(match f {
            Formula::Atom(q) if q == p => (line, a, b),
            Formula::Atom(_) | Formula::Bottom => (self.taut(f.clone().iff(f.clone())), f.clone(), f.clone()),
            Formula::Neg(x) => {
                let (i, l, r) = self.replace_cong(p, line, x)?;
                let (l, r) = (l.not(), r.not());
                (self.by_taut(&[i], l.clone().iff(r.clone())), l, r)
            }
            Formula::And(x, y) => {
                let (i, l1, r1) = self.replace_cong(p, line, x)?;
                let (j, l2, r2) = self.replace_cong(p, line, y)?;
                let (l, r) = (l1.and(l2), r1.and(r2));
                (self.by_taut(&[i, j], l.clone().iff(r.clone())), l, r)
            }
            Formula::Diamond(lab, x) => {
                let (i, l, r) = self.replace_cong(p, line, x)?;
                (
                    self.cong_diamond(lab, i),
                    Formula::diamond_l(lab, l),
                    Formula::diamond_l(lab, r),
                )
            }
            Formula::Sub { .. } | Formula::Star { .. } => {
                return Err(ProofError::Unsupported(format!("scope {f} is not substitution-free")))
            }
        })
    }

    fn cong_body_plain(&mut self, p: &PropName, line: usize, f: &Formula) -> Result<usize, ProofError> {
        let (a, b) = self.sides(line);
        let (pa, _) = self.push_through(p, &a, f)?;
        let (mid, _, _) = self.replace_cong(p, line, f)?;
        let (pb, _) = self.push_through(p, &b, f)?;
        Ok(self.by_taut(
            &[pa, mid, pb],
            Formula::sub(p, a, f.clone()).iff(Formula::sub(p, b, f.clone())),
        ))
    }

    /// `a <-> b` gives `[p:=a]f <-> [p:=b]f` for any star-free `f`.
    pub fn cong_body(&mut self, p: &PropName, line: usize, f: &Formula) -> Result<usize, ProofError> {
        let (a, b) = self.sides(line);
        let (i, rf) = self.reduce(f)?;
        let left = self.cong_scope(p, &a, i)?;
        let mid = self.cong_body_plain(p, line, &rf)?;
        let right = self.cong_scope(p, &b, i)?;
        Ok(self.by_taut(
            &[left, mid, right],
            Formula::sub(p, a, f.clone()).iff(Formula::sub(p, b, f.clone())),
        ))
    }
}

/// A checked derivation of `f <-> g`, `g` the reduct computed by
/// [`reduce_to_ml`].
pub fn assemble_reduction_proof(f: &Formula) -> Result<Derivation, ProofError> {
    let (target, _) = reduce_to_ml(f).map_err(|e| ProofError::Unsupported(e.to_string()))?;
    let mut b = ProofBuilder::default();
    let (line, out) = b.reduce(f)?;
    if out != target {
        return Err(ProofError::Unsupported(format!(
            "derived reduct {out} differs from {target}"
        )));
    }
    Ok(b.finish_at(line))
}

fn local_rule(before: &Formula, after: &Formula) -> Option<Rule> {
    let eq = before.clone().iff(after.clone());
    for (id, rule) in [
        (AxiomId::R1, Rule::R1),
        (AxiomId::R2, Rule::R2),
        (AxiomId::R3, Rule::R3),
        (AxiomId::R4, Rule::R4),
    ] {
        if axiom_instance(id, &eq).is_ok() {
            return Some(rule);
        }
    }
    let (p, c, scope) = as_sub(before)?;
    let Formula::Diamond(l, a) = scope else {
        return None;
    };
    (*after == Formula::diamond_l(l, Formula::sub(p, c.clone(), (**a).clone()))).then_some(Rule::R5)
}

/// Replays a reduction trace, matching every rewrite against its schema and
/// every congruence step against the enclosing substitutions.
pub fn verify_reduction_trace(trace: &ReductionTrace) -> Result<(), ProofError> {
    let mut current = trace.input.clone();
    let mut snapshot = current.clone();
    let mut pending: Vec<Vec<usize>> = Vec::new();
    let fail = |index: usize, reason: String| ProofError::StepMismatch { index, reason };
    let mut last_pos: Vec<usize> = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        match step.rule {
            Rule::CongruenceScope | Rule::CongruenceBody => {
                let Some(expected) = pending.first() else {
                    return Err(fail(i, "congruence step without a preceding rewrite".into()));
                };
                if *expected != step.position {
                    return Err(fail(i, "congruence step at the wrong position".into()));
                }
                pending.remove(0);
                let child = last_pos[step.position.len()];
                let want = if child == 1 {
                    Rule::CongruenceScope
                } else {
                    Rule::CongruenceBody
                };
                if step.rule != want {
                    return Err(fail(i, "congruence kind does not match the rewritten child".into()));
                }
                if snapshot.at(&step.position) != Some(&step.before)
                    || current.at(&step.position) != Some(&step.after)
                {
                    return Err(fail(i, "congruence endpoints do not match".into()));
                }
            }
            rule => {
                if !pending.is_empty() {
                    return Err(fail(i, "missing congruence steps".into()));
                }
                if current.at(&step.position) != Some(&step.before) {
                    return Err(fail(i, "before does not match the formula".into()));
                }
                if local_rule(&step.before, &step.after) != Some(rule) {
                    return Err(fail(i, format!("not an instance of {rule}")));
                }
                snapshot = current.clone();
                *current.at_mut(&step.position).expect("checked") = step.after.clone();
                last_pos = step.position.clone();
                pending = (0..last_pos.len())
                    .rev()
                    .map(|k| last_pos[..k].to_vec())
                    .filter(|anc| matches!(snapshot.at(anc), Some(Formula::Sub { .. })))
                    .collect();
            }
        }
    }
    if !pending.is_empty() {
        return Err(fail(trace.steps.len(), "missing congruence steps".into()));
    }
    if current != trace.output {
        return Err(fail(trace.steps.len(), "trace does not end at its output".into()));
    }
    if current.has_sub() {
        return Err(fail(trace.steps.len(), "output still contains a substitution".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, prop};

    fn pf(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn line(n: usize, f: &str, just: Justification) -> ProofLine {
        ProofLine {
            n,
            formula: pf(f),
            just,
        }
    }

    #[test]
    fn axiom_instances() {
        assert!(axiom_instance(AxiomId::A1, &pf("p -> (q -> p)")).is_ok());
        assert!(axiom_instance(AxiomId::A1, &pf("p -> (q -> q)")).is_err());
        assert!(axiom_instance(AxiomId::A2, &pf("(p -> (q -> r)) -> ((p -> q) -> (p -> r))")).is_ok());
        assert!(axiom_instance(AxiomId::A3, &pf("(~p -> ~q) -> (q -> p)")).is_ok());
        assert!(axiom_instance(AxiomId::Dual, &pf("<a>p <-> ~[a]~p")).is_ok());
        assert!(axiom_instance(AxiomId::KBox, &pf("[](p -> q) -> ([]p -> []q)")).is_ok());
        assert!(axiom_instance(AxiomId::R3, &pf("<p:=q>~r <-> ~<p:=q>r")).is_ok());
        assert!(axiom_instance(AxiomId::R5, &pf("<p:=q>[a]r <-> [a]<p:=q>r")).is_ok());
        assert!(axiom_instance(AxiomId::R5, &pf("<p:=q>[a]r <-> [b]<p:=q>r")).is_err());
    }

    #[test]
    fn r1_side_condition() {
        let d = Derivation {
            lines: vec![line(1, "<p:=q>p <-> p", Justification::Axiom { id: AxiomId::R1 })],
        };
        assert!(matches!(
            check_derivation(&d),
            Err(ProofError::SideConditionViolated { line: 1, .. })
        ));
        let ok = Derivation {
            lines: vec![line(1, "<p:=q>p <-> q", Justification::Axiom { id: AxiomId::R2 })],
        };
        assert!(check_derivation(&ok).is_ok());
    }

    #[test]
    fn scope_monotonicity_from_a_hypothesis() {
        let d = Derivation {
            lines: vec![
                line(1, "q -> r", Justification::Hypothesis),
                line(
                    2,
                    "<p:=s>(q -> r)",
                    Justification::NecSub {
                        line: 1,
                        pivot: prop("p"),
                        body: pf("s"),
                    },
                ),
                line(
                    3,
                    "<p:=s>(q -> r) -> (<p:=s>q -> <p:=s>r)",
                    Justification::Axiom { id: AxiomId::KSub },
                ),
                line(4, "<p:=s>q -> <p:=s>r", Justification::MP { minor: 2, major: 3 }),
            ],
        };
        let rep = check_derivation(&d).unwrap();
        assert_eq!(rep.hypotheses, vec![1]);
        let text = d.to_json_lines();
        assert_eq!(Derivation::from_json_lines(&text).unwrap(), d);
    }

    #[test]
    fn bad_citations() {
        let d = Derivation {
            lines: vec![
                line(1, "p -> (q -> p)", Justification::Axiom { id: AxiomId::A1 }),
                line(2, "q -> p", Justification::MP { minor: 3, major: 1 }),
            ],
        };
        assert_eq!(
            check_derivation(&d),
            Err(ProofError::BadCitation { line: 2, cited: 3 })
        );
    }

    #[test]
    fn tautologies() {
        assert!(is_tautology(&pf("<>p | ~<>p")));
        assert!(is_tautology(&pf("(<p:=q>r -> s) -> (~s -> ~<p:=q>r)")));
        assert!(!is_tautology(&pf("<>p -> <>q")));
        assert!(!is_tautology(&pf("p")));
    }

    #[test]
    fn congruence_macros() {
        let d = Derivation {
            lines: vec![
                line(1, "p <-> ~~p", Justification::Taut),
                line(2, "<q:=r>p <-> <q:=r>~~p", Justification::CongScope { line: 1 }),
                line(3, "<q:=p>(q & <>q) <-> <q:=~~p>(q & <>q)", Justification::CongBody { line: 1 }),
                line(4, "<a>p <-> <a>~~p", Justification::CongDiamond { line: 1 }),
            ],
        };
        check_derivation(&d).unwrap();
        let bad = Derivation {
            lines: vec![
                line(1, "p <-> ~~p", Justification::Taut),
                line(2, "<a>p <-> <b>~~p", Justification::CongDiamond { line: 1 }),
            ],
        };
        assert!(matches!(
            check_derivation(&bad),
            Err(ProofError::SchemaMismatch { line: 2, .. })
        ));
    }

    #[test]
    fn assembled_proofs_check() {
        for src in [
            "<p:=q>p",
            "<p:=<>q>(p & <a>~p)",
            "<p:=<q:=r><>q>[]p",
            "<p:=q><q:=p>(p & q)",
            "~<p:=false><>(p | r)",
        ] {
            let f = pf(src);
            let d = assemble_reduction_proof(&f).unwrap();
            let rep = check_derivation(&d).unwrap();
            assert!(rep.hypotheses.is_empty());
            let (g, _) = reduce_to_ml(&f).unwrap();
            assert_eq!(rep.conclusion, Some(f.iff(g)), "{src}");
        }
    }

    #[test]
    fn traces_verify_and_forgeries_fail() {
        for src in ["<p:=q>(p & <>p)", "<p:=<q:=r>~q><>p", "<p:=q>(<r:=p>r & s)"] {
            let (_, trace) = reduce_to_ml(&pf(src)).unwrap();
            verify_reduction_trace(&trace).unwrap();
        }
        let (_, mut trace) = reduce_to_ml(&pf("<p:=q>(p & r)")).unwrap();
        let last = trace.steps.len() - 1;
        trace.steps[last].after = pf("p");
        assert!(matches!(
            verify_reduction_trace(&trace),
            Err(ProofError::StepMismatch { .. })
        ));
        let (_, mut trace) = reduce_to_ml(&pf("<p:=q><r:=p>r")).unwrap();
        trace.steps.retain(|s| s.rule != Rule::CongruenceScope);
        assert!(verify_reduction_trace(&trace).is_err());
    }
}
