//! Bisimulation by partition refinement over the disjoint union of two
//! models, relative to an explicit set of proposition letters.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::checker::{eval, CheckError};
use crate::kripke::{KripkeModel, ModelError, PointedModel};
use crate::syntax::{all_names, Formula, PropName, RelLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("models declare different relation labels: {left:?} vs {right:?}")]
    LabelMismatch {
        left: Vec<RelLabel>,
        right: Vec<RelLabel>,
    },
    #[error("the pointed models are not bisimilar over the formulas' vocabulary")]
    NotBisimilar,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

fn check_labels(m1: &KripkeModel, m2: &KripkeModel) -> Result<Vec<RelLabel>, BisimError> {
    let left: Vec<RelLabel> = m1.labels().cloned().collect();
    let right: Vec<RelLabel> = m2.labels().cloned().collect();
    if left != right {
        return Err(BisimError::LabelMismatch { left, right });
    }
    Ok(left)
}

/// Block index of every state: left model first, then right.
fn refine(m1: &KripkeModel, m2: &KripkeModel, vocab: &BTreeSet<PropName>, labels: &[RelLabel]) -> Vec<usize> {
    let n1 = m1.len();
    let side = |i: usize| if i < n1 { (m1, i) } else { (m2, i - n1) };
    let total = n1 + m2.len();
    let vals: Vec<_> = vocab
        .iter()
        .map(|p| (m1.valuation_of(p), m2.valuation_of(p)))
        .collect();
    let mut block: Vec<usize> = {
        let keys: Vec<Vec<bool>> = (0..total)
            .map(|i| {
                vals.iter()
                    .map(|(a, b)| if i < n1 { a.contains(i) } else { b.contains(i - n1) })
                    .collect()
            })
            .collect();
        renumber(&keys)
    };
    loop {
        let keys: Vec<(usize, Vec<BTreeSet<usize>>)> = (0..total)
            .map(|i| {
                let (m, s) = side(i);
                let offset = if i < n1 { 0 } else { n1 };
                let sig = labels
                    .iter()
                    .map(|l| {
                        m.successors(l, s)
                            .expect("labels checked")
                            .iter()
                            .map(|t| block[t + offset])
                            .collect()
                    })
                    .collect();
                (block[i], sig)
            })
            .collect();
        let next = renumber(&keys);
        let before = block.iter().collect::<BTreeSet<_>>().len();
        let after = next.iter().collect::<BTreeSet<_>>().len();
        block = next;
        if before == after {
            return block;
        }
    }
}

fn renumber<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    keys.iter()
        .map(|k| {
            let n = ids.len();
            *ids.entry(k.clone()).or_insert(n)
        })
        .collect()
}

/// Largest bisimulation between `m1` and `m2` over `vocab`, as state-name pairs.
pub fn max_bisimulation(
    m1: &KripkeModel,
    m2: &KripkeModel,
    vocab: &BTreeSet<PropName>,
) -> Result<Vec<(String, String)>, BisimError> {
    let labels = check_labels(m1, m2)?;
    let block = refine(m1, m2, vocab, &labels);
    let n1 = m1.len();
    let mut out = Vec::new();
    for i in 0..n1 {
        for j in 0..m2.len() {
            if block[i] == block[n1 + j] {
                out.push((m1.state_name(i).to_string(), m2.state_name(j).to_string()));
            }
        }
    }
    Ok(out)
}

pub fn bisimilar(
    m1: &KripkeModel,
    s1: &str,
    m2: &KripkeModel,
    s2: &str,
    vocab: &BTreeSet<PropName>,
) -> Result<bool, BisimError> {
    let (i, j) = (m1.index_of(s1)?, m2.index_of(s2)?);
    let labels = check_labels(m1, m2)?;
    let block = refine(m1, m2, vocab, &labels);
    Ok(block[i] == block[m1.len() + j])
}

/// Checks the atom, forth and back conditions of a candidate relation directly.
pub fn verify_bisimulation(
    m1: &KripkeModel,
    m2: &KripkeModel,
    relation: &[(String, String)],
    vocab: &BTreeSet<PropName>,
) -> Result<bool, BisimError> {
    let labels = check_labels(m1, m2)?;
    let mut z: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (a, b) in relation {
        z.insert((m1.index_of(a)?, m2.index_of(b)?));
    }
    for &(a, b) in &z {
        for p in vocab {
            if m1.valuation_of(p).contains(a) != m2.valuation_of(p).contains(b) {
                return Ok(false);
            }
        }
        for l in &labels {
            let (sa, sb) = (m1.successors(l, a).unwrap(), m2.successors(l, b).unwrap());
            let forth = sa.iter().all(|x| sb.iter().any(|y| z.contains(&(x, y))));
            let back = sb.iter().all(|y| sa.iter().any(|x| z.contains(&(x, y))));
            if !forth || !back {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub checked: usize,
    /// Formulas whose truth value differs: (formula, left, right).
    pub violations: Vec<(Formula, bool, bool)>,
}

/// Evaluates each formula at both points after confirming bisimilarity over
/// the formulas' full vocabulary, pivots included.
pub fn invariance_suite(
    left: &PointedModel,
    right: &PointedModel,
    formulas: &[Formula],
) -> Result<InvarianceReport, BisimError> {
    let vocab: BTreeSet<PropName> = formulas.iter().flat_map(all_names).collect();
    if !bisimilar(&left.model, &left.point, &right.model, &right.point, &vocab)? {
        return Err(BisimError::NotBisimilar);
    }
    let mut violations = Vec::new();
    for f in formulas {
        let a = eval(&left.model, &left.point, f)?;
        let b = eval(&right.model, &right.point, f)?;
        if a != b {
            violations.push((f.clone(), a, b));
        }
    }
    Ok(InvarianceReport {
        checked: formulas.len(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{label, parse_formula, prop};

    fn vocab(xs: &[&str]) -> BTreeSet<PropName> {
        xs.iter().map(|x| prop(x)).collect()
    }

    #[test]
    fn loop_and_two_cycle() {
        let d = RelLabel::default_label();
        let one = KripkeModel::new(&["s"], &[(d.clone(), "s", "s")], &[]).unwrap();
        let two = KripkeModel::new(&["a", "b"], &[(d.clone(), "a", "b"), (d, "b", "a")], &[]).unwrap();
        assert!(bisimilar(&one, "s", &two, "a", &vocab(&[])).unwrap());
        let z = max_bisimulation(&one, &two, &vocab(&[])).unwrap();
        assert_eq!(z.len(), 2);
        assert!(verify_bisimulation(&one, &two, &z, &vocab(&[])).unwrap());
    }

    #[test]
    fn valuation_breaks_bisimilarity() {
        let m = KripkeModel::fixture("oscillation").unwrap();
        assert!(!bisimilar(&m, "v", &m, "w", &vocab(&["p"])).unwrap());
        assert!(bisimilar(&m, "v", &m, "w", &vocab(&[])).unwrap());
    }

    #[test]
    fn unravelled_dag_is_bisimilar() {
        let m = KripkeModel::fixture("fig2_b1").unwrap();
        let u = m.unravel("a", 3).unwrap();
        assert!(bisimilar(&m, "a", &u.model, &u.point, &vocab(&["p"])).unwrap());
        let f = parse_formula("<p:=[]false; (p:=p | []<>p)*>p").unwrap();
        let pm = PointedModel {
            model: m.clone(),
            point: "a".into(),
        };
        let r = invariance_suite(&pm, &u, &[f]).unwrap();
        assert!(r.violations.is_empty());
    }

    #[test]
    fn label_mismatch() {
        let a = KripkeModel::new(&["s"], &[(label("c"), "s", "s")], &[]).unwrap();
        let b = KripkeModel::new::<&str>(&["s"], &[], &[]).unwrap();
        assert!(matches!(
            bisimilar(&a, "s", &b, "s", &vocab(&[])),
            Err(BisimError::LabelMismatch { .. })
        ));
    }
}
