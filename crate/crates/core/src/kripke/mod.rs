//! Finite multi-relational Kripke models.
//!
//! States are strings kept in lexicographic order; all internal work uses the
//! index of a state in that order. Every model carries the default relation
//! `d`, possibly empty.

mod generate;
mod io;
mod stateset;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{PropName, RelLabel};

pub use generate::{generate, ModelKind};
pub use io::ModelJson;
pub use stateset::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("duplicate state {0:?}")]
    DuplicateState(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid model JSON: {0}")]
    Json(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct KripkeModel {
    states: Vec<String>,
    relations: BTreeMap<RelLabel, Vec<StateSet>>,
    valuation: BTreeMap<PropName, StateSet>,
}

/// A model with a designated state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub point: String,
}

impl std::fmt::Debug for KripkeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl KripkeModel {
    /// Builds a model from named states, labelled edges and a valuation.
    pub fn new<S: AsRef<str>>(
        states: &[S],
        edges: &[(RelLabel, S, S)],
        valuation: &[(PropName, Vec<S>)],
    ) -> Result<Self, ModelError> {
        let mut names: Vec<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateState(w[0].clone()));
        }
        let mut m = KripkeModel::empty_on(names);
        for (l, a, b) in edges {
            let (i, j) = (m.index_of(a.as_ref())?, m.index_of(b.as_ref())?);
            m.add_edge(l, i, j);
        }
        for (p, ss) in valuation {
            let mut set = StateSet::empty(m.len());
            for s in ss {
                set.insert(m.index_of(s.as_ref())?);
            }
            m.valuation
                .entry(p.clone())
                .or_insert_with(|| StateSet::empty(m.states.len()))
                .union_with(&set);
        }
        Ok(m)
    }

    /// States given in sorted order, no edges, empty valuation.
    pub(crate) fn empty_on(states: Vec<String>) -> Self {
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        let n = states.len();
        let mut relations = BTreeMap::new();
        relations.insert(RelLabel::default_label(), vec![StateSet::empty(n); n]);
        KripkeModel {
            states,
            relations,
            valuation: BTreeMap::new(),
        }
    }

    pub(crate) fn add_edge(&mut self, l: &RelLabel, i: usize, j: usize) {
        let n = self.states.len();
        self.relations
            .entry(l.clone())
            .or_insert_with(|| vec![StateSet::empty(n); n])[i]
            .insert(j);
    }

    /// Adds `l` with no edges if it is not present yet.
    pub fn declare_relation(&mut self, l: &RelLabel) {
        let n = self.states.len();
        self.relations
            .entry(l.clone())
            .or_insert_with(|| vec![StateSet::empty(n); n]);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn index_of(&self, s: &str) -> Result<usize, ModelError> {
        self.states
            .binary_search_by(|x| x.as_str().cmp(s))
            .map_err(|_| ModelError::UnknownState(s.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &RelLabel> {
        self.relations.keys()
    }

    /// Successor sets indexed by state, if the label is declared.
    pub fn relation(&self, l: &RelLabel) -> Option<&[StateSet]> {
        self.relations.get(l).map(|v| v.as_slice())
    }

    pub fn successors(&self, l: &RelLabel, i: usize) -> Option<&StateSet> {
        self.relations.get(l).map(|v| &v[i])
    }

    /// Truth set of a letter; letters outside the valuation are false everywhere.
    pub fn valuation_of(&self, p: &PropName) -> StateSet {
        self.valuation
            .get(p)
            .cloned()
            .unwrap_or_else(|| StateSet::empty(self.len()))
    }

    pub fn props(&self) -> impl Iterator<Item = &PropName> {
        self.valuation.keys()
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.len())
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet, ModelError> {
        let mut out = StateSet::empty(self.len());
        for s in names {
            out.insert(self.index_of(s.as_ref())?);
        }
        Ok(out)
    }

    pub fn names_of(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|i| self.states[i].clone()).collect()
    }

    /// Same frame with `V(p)` replaced by `set`.
    pub fn set_valuation(&self, p: &PropName, set: &StateSet) -> KripkeModel {
        assert_eq!(set.capacity(), self.len(), "state set from another model");
        let mut m = self.clone();
        m.valuation.insert(p.clone(), set.clone());
        m
    }

    /// Submodel on `keep`: relations and valuation restricted, names retained.
    pub fn relativize(&self, keep: &StateSet) -> KripkeModel {
        let old: Vec<usize> = keep.iter().collect();
        let mut m = KripkeModel::empty_on(old.iter().map(|&i| self.states[i].clone()).collect());
        let restrict = |s: &StateSet| StateSet::from_indices(old.len(), old.iter().enumerate().filter(|(_, &o)| s.contains(o)).map(|(k, _)| k));
        for (l, rel) in &self.relations {
            let n = old.len();
            let mut new_rel = vec![StateSet::empty(n); n];
            for (k, &o) in old.iter().enumerate() {
                new_rel[k] = restrict(&rel[o]);
            }
            m.relations.insert(l.clone(), new_rel);
        }
        for (p, s) in &self.valuation {
            m.valuation.insert(p.clone(), restrict(s));
        }
        m
    }

    /// Disjoint union; states of the left model become `1:s`, of the right `2:s`.
    pub fn disjoint_union(&self, other: &KripkeModel) -> KripkeModel {
        let left = |s: &str| format!("1:{s}");
        let right = |s: &str| format!("2:{s}");
        let names: Vec<String> = self
            .states
            .iter()
            .map(|s| left(s))
            .chain(other.states.iter().map(|s| right(s)))
            .collect();
        let mut m = KripkeModel::empty_on(names);
        let n1 = self.len();
        for (part, offset) in [(self, 0), (other, n1)] {
            for (l, rel) in &part.relations {
                m.declare_relation(l);
                for (i, succ) in rel.iter().enumerate() {
                    for j in succ.iter() {
                        m.add_edge(l, i + offset, j + offset);
                    }
                }
            }
            for (p, s) in &part.valuation {
                let n = m.len();
                let entry = m.valuation.entry(p.clone()).or_insert_with(|| StateSet::empty(n));
                for i in s.iter() {
                    entry.insert(i + offset);
                }
            }
        }
        m
    }

    /// Tree unravelling from `root`, truncated after `depth` steps. Nodes are
    /// named by their path, `a/b` for a `d`-step and `a/l:b` otherwise.
    pub fn unravel(&self, root: &str, depth: usize) -> Result<PointedModel, ModelError> {
        let r = self.index_of(root)?;
        // (path name, underlying state)
        let mut nodes: Vec<(String, usize)> = vec![(root.to_string(), r)];
        let mut edges: Vec<(RelLabel, usize, usize)> = Vec::new();
        let mut frontier = vec![0usize];
        for _ in 0..depth {
            let mut next = Vec::new();
            for &k in &frontier {
                let (path, s) = nodes[k].clone();
                for (l, rel) in &self.relations {
                    for t in rel[s].iter() {
                        let name = if l.as_str() == crate::syntax::DEFAULT_LABEL {
                            format!("{path}/{}", self.states[t])
                        } else {
                            format!("{path}/{l}:{}", self.states[t])
                        };
                        nodes.push((name, t));
                        edges.push((l.clone(), k, nodes.len() - 1));
                        next.push(nodes.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].0.cmp(&nodes[b].0));
        let mut pos = vec![0; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut m = KripkeModel::empty_on(order.iter().map(|&k| nodes[k].0.clone()).collect());
        for l in self.relations.keys() {
            m.declare_relation(l);
        }
        for (l, a, b) in edges {
            m.add_edge(&l, pos[a], pos[b]);
        }
        for (p, s) in &self.valuation {
            let set = StateSet::from_indices(
                nodes.len(),
                nodes.iter().enumerate().filter(|(_, (_, u))| s.contains(*u)).map(|(k, _)| pos[k]),
            );
            m.valuation.insert(p.clone(), set);
        }
        Ok(PointedModel {
            model: m,
            point: root.to_string(),
        })
    }

    /// Named figure models used throughout the examples and tests.
    pub fn fixture(name: &str) -> Option<KripkeModel> {
        fixtures().remove(name)
    }

    pub(crate) fn valuation_map(&self) -> &BTreeMap<PropName, StateSet> {
        &self.valuation
    }

    pub(crate) fn relations_map(&self) -> &BTreeMap<RelLabel, Vec<StateSet>> {
        &self.relations
    }
}

fn d_model(states: &[&str], edges: &[(&str, &str)], val: &[(&str, &[&str])]) -> KripkeModel {
    let d = RelLabel::default_label();
    let edges: Vec<(RelLabel, &str, &str)> = edges.iter().map(|&(a, b)| (d.clone(), a, b)).collect();
    let val: Vec<(PropName, Vec<&str>)> = val
        .iter()
        .map(|(p, ss)| (crate::syntax::prop(p), ss.to_vec()))
        .collect();
    KripkeModel::new(states, &edges, &val).expect("fixture is well formed")
}

/// The figure models keyed by name:
/// * `fig1`: three mutually connected agents, `p` at `a` and `b`;
/// * `fig2_b1`: the game board `a->b, a->c, c->b, b->d`;
/// * `fig4`: the five-state network with `p` and `q`;
/// * `oscillation`: two mutual friends, `p` at `w` only.
pub fn fixtures() -> BTreeMap<&'static str, KripkeModel> {
    let mut out = BTreeMap::new();
    out.insert(
        "fig1",
        d_model(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "a"), ("a", "c"), ("c", "a"), ("b", "c"), ("c", "b")],
            &[("p", &["a", "b"])],
        ),
    );
    out.insert(
        "fig2_b1",
        d_model(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("c", "b"), ("b", "d")],
            &[],
        ),
    );
    out.insert(
        "fig4",
        d_model(
            &["w1", "w2", "w3", "w4", "w5"],
            &[("w1", "w2"), ("w2", "w3"), ("w2", "w4"), ("w3", "w5"), ("w4", "w5")],
            &[("p", &["w3", "w5"]), ("q", &["w2", "w3", "w4", "w5"])],
        ),
    );
    out.insert(
        "oscillation",
        d_model(&["v", "w"], &[("v", "w"), ("w", "v")], &[("p", &["w"])]),
    );
    out
}

/// Indices of all states reachable from `from` (inclusive) over any relation.
pub fn reachable(m: &KripkeModel, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(s) = stack.pop() {
        for rel in m.relations.values() {
            for t in rel[s].iter() {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
    }
    seen
}
