//! Formula syntax for modal substitution logic and its iterated extension.
//!
//! The AST keeps a small core (atoms, falsum, negation, conjunction,
//! labelled diamonds, substitutions and iterated substitutions). Every other
//! connective is a constructor function that expands into the core, so
//! `parse(print(f)) == f` holds structurally.

mod ops;
mod parse;
mod print;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use ops::{
    all_names, doi, is_clean, FormulaError, is_normal, msl_depth, normalize, pivots, rename_to_clean, replace,
    subformulas, var_sets, FreshNames, VarSets,
};
pub use parse::{parse_formula, Lexer, Logic, ParseError, Parser, Token};
pub use print::print_formula;

/// Relation label used by `<>` / `[]` and by every single-modality fixture.
pub const DEFAULT_LABEL: &str = "d";

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

const PROP_RESERVED: &[&str] = &["true", "false", "top", "bot", "mu"];
const LABEL_RESERVED: &[&str] = &["true", "false", "top", "bot", "mu", "u"];

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident, $reserved:expr) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: &str) -> Result<Self, NameError> {
                if valid_ident(s) && !$reserved.contains(&s) {
                    Ok(Self(Arc::from(s)))
                } else {
                    Err(NameError(s.to_string()))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", &*self.0)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                $name::new(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

name_type!(
    /// Proposition letter, `[a-z][A-Za-z0-9_]*` minus keywords.
    PropName,
    PROP_RESERVED
);
name_type!(
    /// Accessibility relation label.
    RelLabel,
    LABEL_RESERVED
);

impl RelLabel {
    pub fn default_label() -> Self {
        RelLabel(Arc::from(DEFAULT_LABEL))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier {0:?}")]
pub struct NameError(pub String);

/// Whether an iterated substitution quantifies existentially or universally
/// over its stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StarMode {
    Diamond,
    Box,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(PropName),
    Bottom,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Diamond(RelLabel, Box<Formula>),
    /// `<pivot := body> scope`. Self-dual, so `[pivot := body] scope` is the same node.
    Sub {
        pivot: PropName,
        body: Box<Formula>,
        scope: Box<Formula>,
    },
    /// `<(pivot := body)*> scope`, or the box form when `mode` is `Box`.
    Star {
        pivot: PropName,
        body: Box<Formula>,
        scope: Box<Formula>,
        mode: StarMode,
    },
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&print_formula(self))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_formula(&s).map_err(serde::de::Error::custom)
    }
}

/// Builds an atom; panics on an invalid name, so use it with literals.
pub fn atom(name: &str) -> Formula {
    Formula::Atom(PropName::new(name).expect("valid proposition name"))
}

pub fn prop(name: &str) -> PropName {
    PropName::new(name).expect("valid proposition name")
}

pub fn label(name: &str) -> RelLabel {
    RelLabel::new(name).expect("valid relation label")
}

impl Formula {
    pub fn bottom() -> Formula {
        Formula::Bottom
    }

    pub fn top() -> Formula {
        Formula::Bottom.not()
    }

    pub fn not(self) -> Formula {
        Formula::Neg(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: Formula) -> Formula {
        self.and(other.not()).not()
    }

    pub fn iff(self, other: Formula) -> Formula {
        self.clone().implies(other.clone()).and(other.implies(self))
    }

    pub fn diamond(self) -> Formula {
        Formula::Diamond(RelLabel::default_label(), Box::new(self))
    }

    pub fn boxed(self) -> Formula {
        self.not().diamond().not()
    }

    pub fn diamond_l(label: &RelLabel, f: Formula) -> Formula {
        Formula::Diamond(label.clone(), Box::new(f))
    }

    pub fn box_l(label: &RelLabel, f: Formula) -> Formula {
        Formula::Diamond(label.clone(), Box::new(f.not())).not()
    }

    pub fn sub(pivot: &PropName, body: Formula, scope: Formula) -> Formula {
        Formula::Sub {
            pivot: pivot.clone(),
            body: Box::new(body),
            scope: Box::new(scope),
        }
    }

    pub fn star(pivot: &PropName, body: Formula, scope: Formula, mode: StarMode) -> Formula {
        Formula::Star {
            pivot: pivot.clone(),
            body: Box::new(body),
            scope: Box::new(scope),
            mode,
        }
    }

    /// `<pivot := init; (pivot := step)*> scope`.
    pub fn iterate(pivot: &PropName, init: Formula, step: Formula, scope: Formula) -> Formula {
        Formula::sub(pivot, init, Formula::star(pivot, step, scope, StarMode::Diamond))
    }

    /// `[pivot := init; (pivot := step)*] scope`.
    pub fn iterate_box(pivot: &PropName, init: Formula, step: Formula, scope: Formula) -> Formula {
        Formula::sub(pivot, init, Formula::star(pivot, step, scope, StarMode::Box))
    }

    /// Conjunction of all items, `true` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Disjunction of all items, `false` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// Immediate children in path order: body before scope.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Bottom => vec![],
            Formula::Neg(a) | Formula::Diamond(_, a) => vec![a],
            Formula::And(a, b) => vec![a, b],
            Formula::Sub { body, scope, .. } | Formula::Star { body, scope, .. } => {
                vec![body, scope]
            }
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Formula> {
        match (self, i) {
            (Formula::Neg(a), 0) | (Formula::Diamond(_, a), 0) => Some(a),
            (Formula::And(a, _), 0) => Some(a),
            (Formula::And(_, b), 1) => Some(b),
            (Formula::Sub { body, .. }, 0) | (Formula::Star { body, .. }, 0) => Some(body),
            (Formula::Sub { scope, .. }, 1) | (Formula::Star { scope, .. }, 1) => Some(scope),
            _ => None,
        }
    }

    /// Subformula at a child-index path, if the path exists.
    pub fn at(&self, path: &[usize]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Formula> {
        let mut cur = self;
        for &i in path {
            cur = cur.child_mut(i)?;
        }
        Some(cur)
    }

    /// Copy with the subformula at `path` replaced.
    pub fn replaced_at(&self, path: &[usize], with: Formula) -> Option<Formula> {
        let mut out = self.clone();
        *out.at_mut(path)? = with;
        Some(out)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn has_sub(&self) -> bool {
        match self {
            Formula::Sub { .. } | Formula::Star { .. } => true,
            _ => self.children().iter().any(|c| c.has_sub()),
        }
    }

    pub fn has_star(&self) -> bool {
        match self {
            Formula::Star { .. } => true,
            _ => self.children().iter().any(|c| c.has_star()),
        }
    }

    /// Relation labels of all diamonds, sorted.
    pub fn labels(&self) -> std::collections::BTreeSet<RelLabel> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut std::collections::BTreeSet<RelLabel>) {
        if let Formula::Diamond(l, _) = self {
            out.insert(l.clone());
        }
        for c in self.children() {
            c.collect_labels(out);
        }
    }

    /// Recognises `~<l>~f` and returns `(l, f)`.
    pub fn as_box(&self) -> Option<(&RelLabel, &Formula)> {
        match self {
            Formula::Neg(inner) => match &**inner {
                Formula::Diamond(l, g) => match &**g {
                    Formula::Neg(f) => Some((l, f)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }
}
