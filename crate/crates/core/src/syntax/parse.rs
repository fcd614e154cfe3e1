use thiserror::Error;

use super::{Formula, PropName, RelLabel, StarMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    LParen,
    RParen,
    Lt,
    Gt,
    LBrack,
    RBrack,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Assign,
    Semi,
    Star,
    Bang,
    Dot,
    Eof,
}

pub struct Lexer;

impl Lexer {
    pub fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
        let bytes = src.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let rest = &src[i..];
            let (tok, len) = if rest.starts_with("<->") {
                (Token::DArrow, 3)
            } else if rest.starts_with("->") {
                (Token::Arrow, 2)
            } else if rest.starts_with(":=") {
                (Token::Assign, 2)
            } else if c.is_ascii_alphabetic() {
                let len = rest
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                (Token::Ident(rest[..len].to_string()), len)
            } else {
                let tok = match c {
                    b'(' => Token::LParen,
                    b')' => Token::RParen,
                    b'<' => Token::Lt,
                    b'>' => Token::Gt,
                    b'[' => Token::LBrack,
                    b']' => Token::RBrack,
                    b'~' => Token::Tilde,
                    b'&' => Token::Amp,
                    b'|' => Token::Bar,
                    b';' => Token::Semi,
                    b'*' => Token::Star,
                    b'!' => Token::Bang,
                    b'.' => Token::Dot,
                    _ => {
                        return Err(ParseError::new(
                            i,
                            format!("unexpected character {:?}", rest.chars().next().unwrap()),
                        ))
                    }
                };
                (tok, 1)
            };
            out.push((tok, i));
            i += len;
        }
        out.push((Token::Eof, src.len()));
        Ok(out)
    }
}

/// Boolean connectives shared by every formula language in the crate.
pub trait Logic: Sized {
    fn atom(p: PropName) -> Self;
    fn bottom() -> Self;
    fn top() -> Self;
    fn not(a: Self) -> Self;
    fn and(a: Self, b: Self) -> Self;
    fn or(a: Self, b: Self) -> Self;
    fn implies(a: Self, b: Self) -> Self;
    fn iff(a: Self, b: Self) -> Self;
}

impl Logic for Formula {
    fn atom(p: PropName) -> Self {
        Formula::Atom(p)
    }
    fn bottom() -> Self {
        Formula::Bottom
    }
    fn top() -> Self {
        Formula::top()
    }
    fn not(a: Self) -> Self {
        a.not()
    }
    fn and(a: Self, b: Self) -> Self {
        a.and(b)
    }
    fn or(a: Self, b: Self) -> Self {
        a.or(b)
    }
    fn implies(a: Self, b: Self) -> Self {
        a.implies(b)
    }
    fn iff(a: Self, b: Self) -> Self {
        a.iff(b)
    }
}

type MuHook = fn(PropName, Formula) -> Result<Formula, String>;

/// Recursive-descent parser over a token stream. The binary layers are
/// generic so the program and announcement languages reuse them.
pub struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    mu: Option<MuHook>,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: Lexer::tokenize(src)?,
            pos: 0,
            mu: None,
        })
    }

    /// Accept `mu p . phi` inside formulas, building the node with `hook`.
    pub fn with_mu(mut self, hook: MuHook) -> Self {
        self.mu = Some(hook);
        self
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    pub fn peek_at(&self, k: usize) -> &Token {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    pub fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    pub fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.offset(), message)
    }

    pub fn expect(&mut self, tok: Token) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {:?}, found {:?}", tok, self.peek())))
        }
    }

    pub fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Token::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing {:?}", self.peek())))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Token::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {t:?}"))),
        }
    }

    pub fn prop_name(&mut self) -> Result<PropName, ParseError> {
        let at = self.offset();
        let s = self.ident()?;
        PropName::new(&s).map_err(|e| ParseError::new(at, e.to_string()))
    }

    pub fn rel_label(&mut self) -> Result<RelLabel, ParseError> {
        let at = self.offset();
        let s = self.ident()?;
        RelLabel::new(&s).map_err(|e| ParseError::new(at, e.to_string()))
    }

    /// `iff := imp ("<->" imp)*`, left associative.
    pub fn binary<T: Logic>(
        &mut self,
        unary: &mut dyn FnMut(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let mut lhs = self.implication(unary)?;
        while self.eat(&Token::DArrow) {
            let rhs = self.implication(unary)?;
            lhs = T::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    /// `imp := or ("->" or)*`, right associative.
    fn implication<T: Logic>(
        &mut self,
        unary: &mut dyn FnMut(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let lhs = self.disjunction(unary)?;
        if self.eat(&Token::Arrow) {
            let rhs = self.implication(unary)?;
            Ok(T::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction<T: Logic>(
        &mut self,
        unary: &mut dyn FnMut(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let mut lhs = self.conjunction(unary)?;
        while self.eat(&Token::Bar) {
            let rhs = self.conjunction(unary)?;
            lhs = T::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction<T: Logic>(
        &mut self,
        unary: &mut dyn FnMut(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let mut lhs = unary(self)?;
        while self.eat(&Token::Amp) {
            let rhs = unary(self)?;
            lhs = T::and(lhs, rhs);
        }
        Ok(lhs)
    }

    /// Constants, identifiers and parenthesised formulas.
    pub fn primary<T: Logic>(
        &mut self,
        unary: &mut dyn FnMut(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        match self.peek().clone() {
            Token::LParen => {
                self.bump();
                let f = self.binary(unary)?;
                self.expect(Token::RParen)?;
                Ok(f)
            }
            Token::Ident(s) => match s.as_str() {
                "true" | "top" => {
                    self.bump();
                    Ok(T::top())
                }
                "false" | "bot" => {
                    self.bump();
                    Ok(T::bottom())
                }
                _ => Ok(T::atom(self.prop_name()?)),
            },
            t => Err(self.error(format!("expected a formula, found {t:?}"))),
        }
    }

    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        self.binary(&mut |p: &mut Parser| p.formula_unary())
    }

    fn formula_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Tilde => {
                self.bump();
                Ok(self.formula_unary()?.not())
            }
            Token::Lt | Token::LBrack => {
                let boxed = *self.peek() == Token::LBrack;
                let close = if boxed { Token::RBrack } else { Token::Gt };
                self.bump();
                if self.starts_substitution() {
                    let seq = self.subst_seq()?;
                    self.expect(close)?;
                    let scope = self.formula_unary()?;
                    let mode = if boxed { StarMode::Box } else { StarMode::Diamond };
                    Ok(build_sequence(seq, scope, mode))
                } else {
                    let label = if *self.peek() == close {
                        RelLabel::default_label()
                    } else {
                        self.rel_label()?
                    };
                    self.expect(close)?;
                    let inner = self.formula_unary()?;
                    Ok(if boxed {
                        Formula::box_l(&label, inner)
                    } else {
                        Formula::diamond_l(&label, inner)
                    })
                }
            }
            Token::Ident(s) if s == "mu" && self.mu.is_some() => {
                let at = self.offset();
                self.bump();
                let pivot = self.prop_name()?;
                self.expect(Token::Dot)?;
                let body = self.formula()?;
                (self.mu.unwrap())(pivot, body).map_err(|m| ParseError::new(at, m))
            }
            _ => self.primary(&mut |p: &mut Parser| p.formula_unary()),
        }
    }

    fn starts_substitution(&self) -> bool {
        matches!(
            (self.peek(), self.peek_at(1)),
            (Token::Ident(_), Token::Assign) | (Token::LParen, _)
        )
    }

    fn subst_seq(&mut self) -> Result<Vec<(PropName, Formula, bool)>, ParseError> {
        let mut seq = Vec::new();
        loop {
            if self.eat(&Token::LParen) {
                let p = self.prop_name()?;
                self.expect(Token::Assign)?;
                let body = self.formula()?;
                self.expect(Token::RParen)?;
                self.expect(Token::Star)?;
                seq.push((p, body, true));
            } else {
                let p = self.prop_name()?;
                self.expect(Token::Assign)?;
                let body = self.formula()?;
                seq.push((p, body, false));
            }
            if !self.eat(&Token::Semi) {
                return Ok(seq);
            }
        }
    }
}

fn build_sequence(seq: Vec<(PropName, Formula, bool)>, scope: Formula, mode: StarMode) -> Formula {
    seq.into_iter()
        .rev()
        .fold(scope, |acc, (p, body, starred)| {
            if starred {
                Formula::star(&p, body, acc, mode)
            } else {
                Formula::sub(&p, body, acc)
            }
        })
}

/// Parses the concrete syntax of substitution formulas.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}
