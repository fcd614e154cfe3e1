//! Set-based model checking.
//!
//! Formulas are evaluated to truth sets bottom-up. A substitution evaluates
//! its body and re-evaluates the scope with the pivot's valuation replaced;
//! an iterated substitution computes the stage sequence of its pivot until a
//! stage repeats and then quantifies over the distinct stages.

use std::collections::HashMap;

use thiserror::Error;

use crate::kripke::{KripkeModel, ModelError, StateSet};
use crate::syntax::{Formula, PropName, RelLabel, StarMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("relation {0} is not declared in the model")]
    UnknownRelation(RelLabel),
    #[error("model has no states")]
    EmptyModel,
    #[error("stage sequence did not repeat within {limit} stages")]
    LimitExceeded { limit: usize },
}

impl From<ModelError> for CheckError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownState(s) => CheckError::UnknownState(s),
            other => CheckError::UnknownState(other.to_string()),
        }
    }
}

/// Distinct stages `S0, S1, ...` of a pivot under repeated substitution,
/// ending just before the first repetition. `stages[pre_period]` is the
/// first stage that recurs, after `period` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSequence {
    pub stages: Vec<StateSet>,
    pub pre_period: usize,
    pub period: usize,
}

pub const STAGE_CAP: usize = 1 << 20;

/// Default bound on explored stages: `min(2^|W|, 2^20)`.
pub fn default_stage_cap(m: &KripkeModel) -> usize {
    if m.len() >= 20 {
        STAGE_CAP
    } else {
        1usize << m.len()
    }
}

/// Evaluator bound to one model.
pub struct Checker<'m> {
    model: &'m KripkeModel,
    cap: usize,
}

type Env = Vec<(PropName, StateSet)>;

impl<'m> Checker<'m> {
    pub fn new(model: &'m KripkeModel) -> Self {
        Checker {
            model,
            cap: default_stage_cap(model),
        }
    }

    pub fn with_max_stages(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn truth_set(&self, f: &Formula) -> Result<StateSet, CheckError> {
        if self.model.is_empty() {
            return Err(CheckError::EmptyModel);
        }
        self.eval_set(f, &mut Vec::new())
    }

    pub fn eval(&self, state: &str, f: &Formula) -> Result<bool, CheckError> {
        let i = self.model.index_of(state)?;
        Ok(self.truth_set(f)?.contains(i))
    }

    /// Stage sequence starting from the pivot's current valuation.
    pub fn stage_sequence(&self, pivot: &PropName, body: &Formula) -> Result<StageSequence, CheckError> {
        if self.model.is_empty() {
            return Err(CheckError::EmptyModel);
        }
        let init = self.model.valuation_of(pivot);
        self.stages_from(&mut Vec::new(), pivot, body, init, |_, _| Ok(()))
    }

    fn lookup(&self, env: &Env, p: &PropName) -> StateSet {
        env.iter()
            .rev()
            .find(|(q, _)| q == p)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| self.model.valuation_of(p))
    }

    fn stages_from(
        &self,
        env: &mut Env,
        pivot: &PropName,
        body: &Formula,
        init: StateSet,
        mut visit: impl FnMut(&mut Env, &StateSet) -> Result<(), CheckError>,
    ) -> Result<StageSequence, CheckError> {
        let mut stages: Vec<StateSet> = Vec::new();
        let mut seen: HashMap<StateSet, usize> = HashMap::new();
        let mut cur = init;
        loop {
            if let Some(&k) = seen.get(&cur) {
                let period = stages.len() - k;
                return Ok(StageSequence {
                    stages,
                    pre_period: k,
                    period,
                });
            }
            if stages.len() >= self.cap {
                return Err(CheckError::LimitExceeded { limit: self.cap });
            }
            env.push((pivot.clone(), cur.clone()));
            let step = self
                .eval_set(body, env)
                .and_then(|next| visit(env, &cur).map(|_| next));
            env.pop();
            let next = step?;
            seen.insert(cur.clone(), stages.len());
            stages.push(cur);
            cur = next;
        }
    }

    fn eval_set(&self, f: &Formula, env: &mut Env) -> Result<StateSet, CheckError> {
        let n = self.model.len();
        Ok(match f {
            Formula::Atom(p) => self.lookup(env, p),
            Formula::Bottom => StateSet::empty(n),
            Formula::Neg(a) => self.eval_set(a, env)?.complement(),
            Formula::And(a, b) => {
                let mut s = self.eval_set(a, env)?;
                if !s.is_empty() {
                    s.intersect_with(&self.eval_set(b, env)?);
                }
                s
            }
            Formula::Diamond(l, a) => {
                let rel = self
                    .model
                    .relation(l)
                    .ok_or_else(|| CheckError::UnknownRelation(l.clone()))?;
                let target = self.eval_set(a, env)?;
                StateSet::from_indices(n, (0..n).filter(|&s| rel[s].intersects(&target)))
            }
            Formula::Sub { pivot, body, scope } => {
                let value = self.eval_set(body, env)?;
                env.push((pivot.clone(), value));
                let out = self.eval_set(scope, env);
                env.pop();
                out?
            }
            Formula::Star {
                pivot,
                body,
                scope,
                mode,
            } => {
                let mut acc = match mode {
                    StarMode::Diamond => StateSet::empty(n),
                    StarMode::Box => StateSet::full(n),
                };
                let init = self.lookup(env, pivot);
                self.stages_from(env, pivot, body, init, |env, _| {
                    let t = self.eval_set(scope, env)?;
                    match mode {
                        StarMode::Diamond => acc.union_with(&t),
                        StarMode::Box => acc.intersect_with(&t),
                    }
                    Ok(())
                })?;
                acc
            }
        })
    }
}

/// Truth of `f` at `state`.
pub fn eval(m: &KripkeModel, state: &str, f: &Formula) -> Result<bool, CheckError> {
    Checker::new(m).eval(state, f)
}

/// States of `m` satisfying `f`.
pub fn truth_set(m: &KripkeModel, f: &Formula) -> Result<StateSet, CheckError> {
    Checker::new(m).truth_set(f)
}

/// Stages of `pivot` under `body`, stage 0 being its valuation in `m`.
pub fn stage_sequence(
    m: &KripkeModel,
    pivot: &PropName,
    body: &Formula,
    max_stages: Option<usize>,
) -> Result<StageSequence, CheckError> {
    let mut c = Checker::new(m);
    if let Some(cap) = max_stages {
        c = c.with_max_stages(cap);
    }
    c.stage_sequence(pivot, body)
}
