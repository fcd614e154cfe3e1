//! Satisfiability: a tableau for plain multi-modal formulas, a decision
//! procedure for substitution formulas via reduction, and exhaustive small
//! model search, which is the only tool for formulas with iteration.

mod brute;
mod tableau;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::{eval, CheckError};
use crate::kripke::PointedModel;
use crate::reduce::{reduce_to_ml, ReduceError};
use crate::syntax::Formula;

pub use brute::MAX_BRUTE_STATES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SatStatus {
    Sat,
    Unsat,
    /// No model found within the search bound.
    Unknown,
}

impl fmt::Display for SatStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatStatus::Sat => "SAT",
            SatStatus::Unsat => "UNSAT",
            SatStatus::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    pub witness: Option<PointedModel>,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::Sat
    }

    fn from_witness(w: Option<PointedModel>, otherwise: SatStatus) -> Self {
        match w {
            Some(w) => SatResult {
                status: SatStatus::Sat,
                witness: Some(w),
            },
            None => SatResult {
                status: otherwise,
                witness: None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("formula contains a substitution; reduce it first")]
    HasSubstitution,
    #[error("formula contains an iterated substitution; satisfiability is undecidable, use bounded search")]
    HasStar,
    #[error("brute-force search supports at most {MAX_BRUTE_STATES} states")]
    TooManyStates,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<ReduceError> for SatError {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::HasStar => SatError::HasStar,
            other => SatError::Internal(other.to_string()),
        }
    }
}

/// Tableau decision for substitution-free multi-modal formulas.
pub fn tableau_sat(f: &Formula) -> Result<SatResult, SatError> {
    if f.has_sub() {
        return Err(SatError::HasSubstitution);
    }
    let w = tableau::decide(f).map(|w| minimize(f, w));
    Ok(SatResult::from_witness(w, SatStatus::Unsat))
}

/// Greedily drops states while the formula stays true at the point.
fn minimize(f: &Formula, w: PointedModel) -> PointedModel {
    let mut cur = w;
    let mut i = 0;
    while i < cur.model.len() {
        if cur.model.state_name(i) == cur.point {
            i += 1;
            continue;
        }
        let mut keep = cur.model.full_set();
        keep.remove(i);
        let smaller = cur.model.relativize(&keep);
        if eval(&smaller, &cur.point, f) == Ok(true) {
            cur.model = smaller;
        } else {
            i += 1;
        }
    }
    cur
}

/// Decides star-free substitution formulas: reduce, run the tableau, and
/// check the witness against the original formula.
pub fn msl_sat(f: &Formula) -> Result<SatResult, SatError> {
    if f.has_star() {
        return Err(SatError::HasStar);
    }
    let (ml, _) = reduce_to_ml(f)?;
    let mut r = tableau_sat(&ml)?;
    if let Some(w) = &mut r.witness {
        // Reduction can drop labels that only occurred in discarded bodies.
        for l in f.labels() {
            w.model.declare_relation(&l);
        }
        match eval(&w.model, &w.point, f) {
            Ok(true) => {}
            Ok(false) => return Err(SatError::Internal(format!("witness fails {f}"))),
            Err(e) => return Err(SatError::Internal(e.to_string())),
        }
    }
    Ok(r)
}

/// Enumerates every model with up to `max_states` states. A miss means
/// "no model that small", reported as `Unknown`.
pub fn brute_force_search(f: &Formula, max_states: usize) -> Result<SatResult, SatError> {
    if max_states > MAX_BRUTE_STATES {
        return Err(SatError::TooManyStates);
    }
    let w = brute::search(f, max_states);
    if let Some(w) = &w {
        let ok = eval(&w.model, &w.point, f).map_err(|e: CheckError| SatError::Internal(e.to_string()))?;
        if !ok {
            return Err(SatError::Internal(format!("bitmask evaluator disagrees on {f}")));
        }
    }
    Ok(SatResult::from_witness(w, SatStatus::Unknown))
}
