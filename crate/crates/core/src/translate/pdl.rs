//! Propositional dynamic logic: programs, a relational evaluator and the
//! translation into iterated substitutions.

use std::collections::BTreeSet;
use std::fmt;

use crate::kripke::{KripkeModel, StateSet};
use crate::syntax::{Formula, FreshNames, Logic, ParseError, Parser, PropName, RelLabel, Token};

use super::TranslateError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Program {
    Atomic(RelLabel),
    Seq(Box<Program>, Box<Program>),
    Union(Box<Program>, Box<Program>),
    Star(Box<Program>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PdlFormula {
    Atom(PropName),
    Bottom,
    Neg(Box<PdlFormula>),
    And(Box<PdlFormula>, Box<PdlFormula>),
    Diamond(Program, Box<PdlFormula>),
}

impl Logic for PdlFormula {
    fn atom(p: PropName) -> Self {
        PdlFormula::Atom(p)
    }
    fn bottom() -> Self {
        PdlFormula::Bottom
    }
    fn top() -> Self {
        Self::not(PdlFormula::Bottom)
    }
    fn not(a: Self) -> Self {
        PdlFormula::Neg(Box::new(a))
    }
    fn and(a: Self, b: Self) -> Self {
        PdlFormula::And(Box::new(a), Box::new(b))
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

impl PdlFormula {
    pub fn diamond(prog: Program, f: PdlFormula) -> Self {
        PdlFormula::Diamond(prog, Box::new(f))
    }

    pub fn boxed(prog: Program, f: PdlFormula) -> Self {
        Self::not(Self::diamond(prog, Self::not(f)))
    }

    fn atoms(&self, out: &mut BTreeSet<PropName>) {
        match self {
            PdlFormula::Atom(p) => {
                out.insert(p.clone());
            }
            PdlFormula::Bottom => {}
            PdlFormula::Neg(a) | PdlFormula::Diamond(_, a) => a.atoms(out),
            PdlFormula::And(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(p: &Program, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let (level, paren) = match p {
                Program::Union(..) => (0, ctx > 0),
                Program::Seq(..) => (1, ctx > 1),
                _ => (2, false),
            };
            if paren {
                f.write_str("(")?;
            }
            match p {
                Program::Atomic(l) => write!(f, "{l}")?,
                Program::Union(a, b) => {
                    go(a, 0, f)?;
                    f.write_str(" u ")?;
                    go(b, 1, f)?;
                }
                Program::Seq(a, b) => {
                    go(a, 1, f)?;
                    f.write_str(" ; ")?;
                    go(b, 2, f)?;
                }
                Program::Star(a) => {
                    go(a, 3, f)?;
                    f.write_str("*")?;
                }
            }
            if paren {
                f.write_str(")")?;
            }
            let _ = level;
            Ok(())
        }
        go(self, 0, f)
    }
}

impl fmt::Display for PdlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdlFormula::Atom(p) => write!(f, "{p}"),
            PdlFormula::Bottom => f.write_str("false"),
            PdlFormula::Neg(a) => write!(f, "~{a}"),
            PdlFormula::And(a, b) => write!(f, "({a} & {b})"),
            PdlFormula::Diamond(p, a) => write!(f, "<{p}>{a}"),
        }
    }
}

impl Program {
    pub fn atomic(l: &str) -> Program {
        Program::Atomic(crate::syntax::label(l))
    }
    pub fn seq(a: Program, b: Program) -> Program {
        Program::Seq(Box::new(a), Box::new(b))
    }
    pub fn union(a: Program, b: Program) -> Program {
        Program::Union(Box::new(a), Box::new(b))
    }
    pub fn star(a: Program) -> Program {
        Program::Star(Box::new(a))
    }

    pub fn labels(&self, out: &mut BTreeSet<RelLabel>) {
        match self {
            Program::Atomic(l) => {
                out.insert(l.clone());
            }
            Program::Seq(a, b) | Program::Union(a, b) => {
                a.labels(out);
                b.labels(out);
            }
            Program::Star(a) => a.labels(out),
        }
    }
}

fn program(p: &mut Parser) -> Result<Program, ParseError> {
    let mut lhs = seq_program(p)?;
    while matches!(p.peek(), Token::Ident(s) if s == "u") {
        p.bump();
        lhs = Program::union(lhs, seq_program(p)?);
    }
    Ok(lhs)
}

fn seq_program(p: &mut Parser) -> Result<Program, ParseError> {
    let mut lhs = star_program(p)?;
    while p.eat(&Token::Semi) {
        lhs = Program::seq(lhs, star_program(p)?);
    }
    Ok(lhs)
}

fn star_program(p: &mut Parser) -> Result<Program, ParseError> {
    let mut base = if p.eat(&Token::LParen) {
        let inner = program(p)?;
        p.expect(Token::RParen)?;
        inner
    } else {
        Program::Atomic(p.rel_label()?)
    };
    while p.eat(&Token::Star) {
        base = Program::star(base);
    }
    Ok(base)
}

fn pdl_unary(p: &mut Parser) -> Result<PdlFormula, ParseError> {
    match p.peek() {
        Token::Tilde => {
            p.bump();
            Ok(PdlFormula::not(pdl_unary(p)?))
        }
        Token::Lt | Token::LBrack => {
            let boxed = *p.peek() == Token::LBrack;
            let close = if boxed { Token::RBrack } else { Token::Gt };
            p.bump();
            let prog = if *p.peek() == close {
                Program::Atomic(RelLabel::default_label())
            } else {
                program(p)?
            };
            p.expect(close)?;
            let inner = pdl_unary(p)?;
            Ok(if boxed {
                PdlFormula::boxed(prog, inner)
            } else {
                PdlFormula::diamond(prog, inner)
            })
        }
        _ => p.primary(&mut pdl_unary),
    }
}

/// Parses PDL: programs `a`, `pi1 ; pi2`, `pi1 u pi2`, `pi*` inside `<>`/`[]`.
pub fn parse_pdl(src: &str) -> Result<PdlFormula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.binary(&mut pdl_unary)?;
    p.finish()?;
    Ok(f)
}

/// Successor sets of a program, computed relationally.
pub fn program_relation(m: &KripkeModel, prog: &Program) -> Result<Vec<StateSet>, TranslateError> {
    let n = m.len();
    Ok(match prog {
        Program::Atomic(l) => m
            .relation(l)
            .ok_or_else(|| TranslateError::UnknownRelation(l.clone()))?
            .to_vec(),
        Program::Seq(a, b) => {
            let (ra, rb) = (program_relation(m, a)?, program_relation(m, b)?);
            ra.iter()
                .map(|succ| {
                    let mut out = StateSet::empty(n);
                    for t in succ.iter() {
                        out.union_with(&rb[t]);
                    }
                    out
                })
                .collect()
        }
        Program::Union(a, b) => {
            let (mut ra, rb) = (program_relation(m, a)?, program_relation(m, b)?);
            for (x, y) in ra.iter_mut().zip(&rb) {
                x.union_with(y);
            }
            ra
        }
        Program::Star(a) => {
            let ra = program_relation(m, a)?;
            (0..n)
                .map(|s| {
                    let mut seen = StateSet::from_indices(n, [s]);
                    let mut stack = vec![s];
                    while let Some(u) = stack.pop() {
                        for t in ra[u].iter() {
                            if !seen.contains(t) {
                                seen.insert(t);
                                stack.push(t);
                            }
                        }
                    }
                    seen
                })
                .collect()
        }
    })
}

pub fn pdl_truth_set(m: &KripkeModel, f: &PdlFormula) -> Result<StateSet, TranslateError> {
    let n = m.len();
    Ok(match f {
        PdlFormula::Atom(p) => m.valuation_of(p),
        PdlFormula::Bottom => StateSet::empty(n),
        PdlFormula::Neg(a) => pdl_truth_set(m, a)?.complement(),
        PdlFormula::And(a, b) => {
            let mut s = pdl_truth_set(m, a)?;
            s.intersect_with(&pdl_truth_set(m, b)?);
            s
        }
        PdlFormula::Diamond(prog, a) => {
            let rel = program_relation(m, prog)?;
            let t = pdl_truth_set(m, a)?;
            StateSet::from_indices(n, (0..n).filter(|&s| rel[s].intersects(&t)))
        }
    })
}

pub fn pdl_eval(m: &KripkeModel, state: &str, f: &PdlFormula) -> Result<bool, TranslateError> {
    let i = m.index_of(state)?;
    Ok(pdl_truth_set(m, f)?.contains(i))
}

struct PdlTranslator {
    fresh: FreshNames,
}

impl PdlTranslator {
    fn formula(&mut self, f: &PdlFormula) -> Formula {
        match f {
            PdlFormula::Atom(p) => Formula::Atom(p.clone()),
            PdlFormula::Bottom => Formula::Bottom,
            PdlFormula::Neg(a) => self.formula(a).not(),
            PdlFormula::And(a, b) => {
                let a = self.formula(a);
                a.and(self.formula(b))
            }
            PdlFormula::Diamond(prog, a) => {
                let inner = self.formula(a);
                self.diamond(prog, inner)
            }
        }
    }

    /// Translation of `<prog>` applied to an already translated formula.
    fn diamond(&mut self, prog: &Program, inner: Formula) -> Formula {
        match prog {
            Program::Atomic(l) => Formula::diamond_l(l, inner),
            Program::Seq(a, b) => {
                let rest = self.diamond(b, inner);
                self.diamond(a, rest)
            }
            Program::Union(a, b) => {
                let left = self.diamond(a, inner.clone());
                left.or(self.diamond(b, inner))
            }
            Program::Star(a) => {
                let q = self.fresh.fresh(&crate::syntax::prop("q"));
                let step = self.diamond(a, Formula::Atom(q.clone()));
                Formula::iterate(&q, inner, step, Formula::Atom(q.clone()))
            }
        }
    }
}

/// `<pi*>phi` becomes `<q:=T(phi); (q:=T(<pi>q))*>q` with `q` fresh.
pub fn translate_pdl(f: &PdlFormula) -> Formula {
    let mut atoms = BTreeSet::new();
    f.atoms(&mut atoms);
    let mut fresh = FreshNames::default();
    for p in &atoms {
        fresh.reserve(p);
    }
    PdlTranslator { fresh }.formula(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::truth_set;
    use crate::syntax::parse_formula;

    #[test]
    fn star_translation_shape() {
        let f = parse_pdl("<a*>p").unwrap();
        assert_eq!(
            translate_pdl(&f),
            parse_formula("<q:=p; (q:=<a>q)*>q").unwrap()
        );
        let g = parse_pdl("<(a u b)*>p").unwrap();
        assert_eq!(
            translate_pdl(&g),
            parse_formula("<q:=p; (q:=<a>q | <b>q)*>q").unwrap()
        );
    }

    #[test]
    fn nested_stars_use_distinct_names() {
        let f = parse_pdl("<(a*)*>q").unwrap();
        let t = translate_pdl(&f);
        assert_eq!(
            t,
            parse_formula("<q_1:=q; (q_1:=<q_2:=q_1; (q_2:=<a>q_2)*>q_2)*>q_1").unwrap()
        );
    }

    #[test]
    fn evaluation_agrees_on_a_chain() {
        let m = crate::kripke::generate(
            crate::kripke::ModelKind::Chain { len: 4 },
            &[crate::syntax::prop("p")],
            3,
        )
        .unwrap();
        for src in ["<d*>p", "[d*]p", "<d;d>p", "<(d;d)*>p", "<d u d;d>~p"] {
            let f = parse_pdl(src).unwrap();
            let direct = pdl_truth_set(&m, &f).unwrap();
            assert_eq!(truth_set(&m, &translate_pdl(&f)).unwrap(), direct, "{src}");
        }
    }

    #[test]
    fn program_precedence() {
        let f = parse_pdl("<a ; b u c*>p").unwrap();
        let expected = PdlFormula::diamond(
            Program::union(
                Program::seq(Program::atomic("a"), Program::atomic("b")),
                Program::star(Program::atomic("c")),
            ),
            PdlFormula::Atom(crate::syntax::prop("p")),
        );
        assert_eq!(f, expected);
        assert_eq!(parse_pdl(&expected.to_string()).unwrap(), expected);
    }
}
