//! Workbench for modal substitution logic and its iterated extension.
//!
//! Formulas are parsed and printed by [`syntax`], evaluated on finite Kripke
//! models by [`checker`], reduced to plain modal logic by [`reduce`] and
//! decided by [`sat`]. The remaining modules cover bisimulation, translations
//! from dynamic and announcement logics, game characterizations with the
//! correspondence-problem encoding, and a Hilbert-style proof checker.

pub mod bisim;
pub mod calculus;
pub mod checker;
pub mod cli;
pub mod games;
pub mod kripke;
pub mod reduce;
pub mod sat;
pub mod syntax;
pub mod translate;
