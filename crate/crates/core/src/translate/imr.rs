//! Modal logic with public announcements, iterated announcements and
//! common knowledge.

use std::collections::BTreeSet;
use std::fmt;

use crate::kripke::{KripkeModel, StateSet};
use crate::syntax::{prop, Formula, FreshNames, Logic, ParseError, Parser, PropName, RelLabel, Token};

use super::{relativize_formula, TranslateError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ImrFormula {
    Atom(PropName),
    Bottom,
    Neg(Box<ImrFormula>),
    And(Box<ImrFormula>, Box<ImrFormula>),
    Diamond(RelLabel, Box<ImrFormula>),
    /// `[!psi]phi`
    Announce(Box<ImrFormula>, Box<ImrFormula>),
    /// `[!psi*]phi`: every finite repetition of the announcement.
    AnnounceStar(Box<ImrFormula>, Box<ImrFormula>),
    /// `[*]phi`, or `[l*]phi` for another label.
    BoxStar(RelLabel, Box<ImrFormula>),
}

impl Logic for ImrFormula {
    fn atom(p: PropName) -> Self {
        ImrFormula::Atom(p)
    }
    fn bottom() -> Self {
        ImrFormula::Bottom
    }
    fn top() -> Self {
        Self::not(ImrFormula::Bottom)
    }
    fn not(a: Self) -> Self {
        ImrFormula::Neg(Box::new(a))
    }
    fn and(a: Self, b: Self) -> Self {
        ImrFormula::And(Box::new(a), Box::new(b))
    }
    fn or(a: Self, b: Self) -> Self {
        Self::not(Self::and(Self::not(a), Self::not(b)))
    }
    fn implies(a: Self, b: Self) -> Self {
        Self::not(Self::and(a, Self::not(b)))
    }
    fn iff(a: Self, b: Self) -> Self {
        Self::and(Self::implies(a.clone(), b.clone()), Self::implies(b, a))
    }
}

impl ImrFormula {
    pub fn diamond(l: &RelLabel, f: ImrFormula) -> Self {
        ImrFormula::Diamond(l.clone(), Box::new(f))
    }
    pub fn boxed(l: &RelLabel, f: ImrFormula) -> Self {
        Self::not(Self::diamond(l, Self::not(f)))
    }
    pub fn announce(psi: ImrFormula, phi: ImrFormula) -> Self {
        ImrFormula::Announce(Box::new(psi), Box::new(phi))
    }
    pub fn announce_star(psi: ImrFormula, phi: ImrFormula) -> Self {
        ImrFormula::AnnounceStar(Box::new(psi), Box::new(phi))
    }
    pub fn box_star(l: &RelLabel, f: ImrFormula) -> Self {
        ImrFormula::BoxStar(l.clone(), Box::new(f))
    }

    fn atoms(&self, out: &mut BTreeSet<PropName>) {
        match self {
            ImrFormula::Atom(p) => {
                out.insert(p.clone());
            }
            ImrFormula::Bottom => {}
            ImrFormula::Neg(a) | ImrFormula::Diamond(_, a) | ImrFormula::BoxStar(_, a) => a.atoms(out),
            ImrFormula::And(a, b) | ImrFormula::Announce(a, b) | ImrFormula::AnnounceStar(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    /// Depth of nested announcements.
    pub fn announcement_depth(&self) -> usize {
        match self {
            ImrFormula::Atom(_) | ImrFormula::Bottom => 0,
            ImrFormula::Neg(a) | ImrFormula::Diamond(_, a) | ImrFormula::BoxStar(_, a) => a.announcement_depth(),
            ImrFormula::And(a, b) => a.announcement_depth().max(b.announcement_depth()),
            ImrFormula::Announce(a, b) | ImrFormula::AnnounceStar(a, b) => {
                1 + a.announcement_depth().max(b.announcement_depth())
            }
        }
    }
}

impl fmt::Display for ImrFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lab = |l: &RelLabel| {
            if *l == RelLabel::default_label() {
                String::new()
            } else {
                l.to_string()
            }
        };
        match self {
            ImrFormula::Atom(p) => write!(f, "{p}"),
            ImrFormula::Bottom => f.write_str("false"),
            ImrFormula::Neg(a) => write!(f, "~{a}"),
            ImrFormula::And(a, b) => write!(f, "({a} & {b})"),
            ImrFormula::Diamond(l, a) => write!(f, "<{}>{a}", lab(l)),
            ImrFormula::Announce(a, b) => write!(f, "[!{a}]{b}"),
            ImrFormula::AnnounceStar(a, b) => write!(f, "[!{a}*]{b}"),
            ImrFormula::BoxStar(l, a) => write!(f, "[{}*]{a}", lab(l)),
        }
    }
}

fn imr_unary(p: &mut Parser) -> Result<ImrFormula, ParseError> {
    match p.peek() {
        Token::Tilde => {
            p.bump();
            Ok(ImrFormula::not(imr_unary(p)?))
        }
        Token::LBrack if *p.peek_at(1) == Token::Bang => {
            p.bump();
            p.bump();
            let psi = p.binary(&mut imr_unary)?;
            let starred = p.eat(&Token::Star);
            p.expect(Token::RBrack)?;
            let phi = imr_unary(p)?;
            Ok(if starred {
                ImrFormula::announce_star(psi, phi)
            } else {
                ImrFormula::announce(psi, phi)
            })
        }
        Token::Lt | Token::LBrack => {
            let boxed = *p.peek() == Token::LBrack;
            let close = if boxed { Token::RBrack } else { Token::Gt };
            p.bump();
            let label = match p.peek() {
                Token::Ident(_) => p.rel_label()?,
                _ => RelLabel::default_label(),
            };
            let starred = boxed && p.eat(&Token::Star);
            p.expect(close)?;
            let inner = imr_unary(p)?;
            Ok(if starred {
                ImrFormula::box_star(&label, inner)
            } else if boxed {
                ImrFormula::boxed(&label, inner)
            } else {
                ImrFormula::diamond(&label, inner)
            })
        }
        _ => p.primary(&mut imr_unary),
    }
}

/// Parses announcement formulas: `[!psi]phi`, `[!psi*]phi`, `[*]phi`.
pub fn parse_imr(src: &str) -> Result<ImrFormula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.binary(&mut imr_unary)?;
    p.finish()?;
    Ok(f)
}

/// Truth set inside the submodel on `dom`; always a subset of `dom`.
fn truth_in(m: &KripkeModel, dom: &StateSet, f: &ImrFormula) -> Result<StateSet, TranslateError> {
    let n = m.len();
    let rel = |l: &RelLabel| m.relation(l).ok_or_else(|| TranslateError::UnknownRelation(l.clone()));
    Ok(match f {
        ImrFormula::Atom(p) => {
            let mut s = m.valuation_of(p);
            s.intersect_with(dom);
            s
        }
        ImrFormula::Bottom => StateSet::empty(n),
        ImrFormula::Neg(a) => {
            let mut s = dom.clone();
            s.difference_with(&truth_in(m, dom, a)?);
            s
        }
        ImrFormula::And(a, b) => {
            let mut s = truth_in(m, dom, a)?;
            s.intersect_with(&truth_in(m, dom, b)?);
            s
        }
        ImrFormula::Diamond(l, a) => {
            let r = rel(l)?;
            let t = truth_in(m, dom, a)?;
            StateSet::from_indices(n, dom.iter().filter(|&s| r[s].intersects(&t)))
        }
        ImrFormula::Announce(psi, phi) => {
            let inner = truth_in(m, dom, psi)?;
            let mut s = dom.clone();
            s.difference_with(&inner);
            s.union_with(&truth_in(m, &inner, phi)?);
            s
        }
        ImrFormula::AnnounceStar(psi, phi) => {
            let mut acc = dom.clone();
            let mut cur = dom.clone();
            loop {
                let mut here = dom.clone();
                here.difference_with(&cur);
                here.union_with(&truth_in(m, &cur, phi)?);
                acc.intersect_with(&here);
                let next = truth_in(m, &cur, psi)?;
                if next == cur {
                    return Ok(acc);
                }
                cur = next;
            }
        }
        ImrFormula::BoxStar(l, a) => {
            let r = rel(l)?;
            let t = truth_in(m, dom, a)?;
            StateSet::from_indices(
                n,
                dom.iter().filter(|&s| {
                    let mut seen = StateSet::from_indices(n, [s]);
                    let mut stack = vec![s];
                    while let Some(u) = stack.pop() {
                        if !t.contains(u) {
                            return false;
                        }
                        for v in r[u].iter() {
                            if dom.contains(v) && !seen.contains(v) {
                                seen.insert(v);
                                stack.push(v);
                            }
                        }
                    }
                    true
                }),
            )
        }
    })
}

pub fn imr_truth_set(m: &KripkeModel, f: &ImrFormula) -> Result<StateSet, TranslateError> {
    truth_in(m, &m.full_set(), f)
}

pub fn imr_eval(m: &KripkeModel, state: &str, f: &ImrFormula) -> Result<bool, TranslateError> {
    let i = m.index_of(state)?;
    Ok(imr_truth_set(m, f)?.contains(i))
}

struct ImrTranslator {
    fresh: FreshNames,
}

impl ImrTranslator {
    fn q(&mut self) -> PropName {
        self.fresh.fresh(&prop("q"))
    }

    fn formula(&mut self, f: &ImrFormula) -> Formula {
        match f {
            ImrFormula::Atom(p) => Formula::Atom(p.clone()),
            ImrFormula::Bottom => Formula::Bottom,
            ImrFormula::Neg(a) => self.formula(a).not(),
            ImrFormula::And(a, b) => {
                let a = self.formula(a);
                a.and(self.formula(b))
            }
            ImrFormula::Diamond(l, a) => Formula::diamond_l(l, self.formula(a)),
            ImrFormula::BoxStar(l, a) => {
                let q = self.q();
                let init = self.formula(a);
                let step = Formula::box_l(l, Formula::Atom(q.clone()));
                Formula::iterate_box(&q, init, step, Formula::Atom(q.clone()))
            }
            ImrFormula::Announce(psi, phi) => {
                let q = self.q();
                let body = self.formula(psi);
                let scope = self.relativized(phi, &q);
                Formula::sub(&q, body, scope)
            }
            ImrFormula::AnnounceStar(psi, phi) => {
                let q = self.q();
                let step = Formula::Atom(q.clone()).and(self.relativized(psi, &q));
                let scope = self.relativized(phi, &q);
                Formula::iterate_box(&q, Formula::top(), step, scope)
            }
        }
    }

    fn relativized(&mut self, f: &ImrFormula, q: &PropName) -> Formula {
        let t = self.formula(f);
        relativize_formula(&t, q).expect("fresh letter is never bound")
    }
}

/// Announcements become a substitution followed by relativization to the
/// fresh letter; `[!psi*]` and `[*]` use the box reading of iteration.
pub fn translate_imr(f: &ImrFormula) -> Formula {
    let mut atoms = BTreeSet::new();
    f.atoms(&mut atoms);
    let mut fresh = FreshNames::default();
    for p in &atoms {
        fresh.reserve(p);
    }
    ImrTranslator { fresh }.formula(f)
}
