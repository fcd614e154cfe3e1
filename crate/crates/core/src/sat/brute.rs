//! Exhaustive model enumeration with a bitmask evaluator that is
//! independent of the main checker.

use std::collections::BTreeMap;

use crate::kripke::{KripkeModel, PointedModel, StateSet};
use crate::syntax::{normalize, var_sets, Formula, PropName, RelLabel, StarMode};

pub const MAX_BRUTE_STATES: usize = 8;

enum Op {
    Atom(usize),
    Bottom,
    Neg(Box<Op>),
    And(Box<Op>, Box<Op>),
    Dia(usize, Box<Op>),
    Sub(usize, Box<Op>, Box<Op>),
    Star(usize, Box<Op>, Box<Op>, bool),
}

struct Compiler {
    atoms: BTreeMap<PropName, usize>,
    labels: BTreeMap<RelLabel, usize>,
}

impl Compiler {
    fn atom(&mut self, p: &PropName) -> usize {
        let n = self.atoms.len();
        *self.atoms.entry(p.clone()).or_insert(n)
    }

    fn compile(&mut self, f: &Formula) -> Op {
        match f {
            Formula::Atom(p) => Op::Atom(self.atom(p)),
            Formula::Bottom => Op::Bottom,
            Formula::Neg(a) => Op::Neg(Box::new(self.compile(a))),
            Formula::And(a, b) => Op::And(Box::new(self.compile(a)), Box::new(self.compile(b))),
            Formula::Diamond(l, a) => {
                let k = self.labels[l];
                Op::Dia(k, Box::new(self.compile(a)))
            }
            Formula::Sub { pivot, body, scope } => {
                let p = self.atom(pivot);
                Op::Sub(p, Box::new(self.compile(body)), Box::new(self.compile(scope)))
            }
            Formula::Star {
                pivot,
                body,
                scope,
                mode,
            } => {
                let p = self.atom(pivot);
                Op::Star(
                    p,
                    Box::new(self.compile(body)),
                    Box::new(self.compile(scope)),
                    *mode == StarMode::Box,
                )
            }
        }
    }
}

struct Frame<'a> {
    n: usize,
    all: u64,
    // succ[label][state]
    succ: &'a [Vec<u64>],
}

fn eval(op: &Op, fr: &Frame, val: &mut [u64]) -> u64 {
    match op {
        Op::Atom(i) => val[*i],
        Op::Bottom => 0,
        Op::Neg(a) => !eval(a, fr, val) & fr.all,
        Op::And(a, b) => {
            let x = eval(a, fr, val);
            if x == 0 {
                0
            } else {
                x & eval(b, fr, val)
            }
        }
        Op::Dia(l, a) => {
            let t = eval(a, fr, val);
            let mut out = 0;
            for s in 0..fr.n {
                if fr.succ[*l][s] & t != 0 {
                    out |= 1 << s;
                }
            }
            out
        }
        Op::Sub(p, body, scope) => {
            let v = eval(body, fr, val);
            let old = std::mem::replace(&mut val[*p], v);
            let out = eval(scope, fr, val);
            val[*p] = old;
            out
        }
        Op::Star(p, body, scope, boxed) => {
            let old = val[*p];
            let mut seen: Vec<u64> = Vec::new();
            let mut acc = if *boxed { fr.all } else { 0 };
            let mut cur = old;
            while !seen.contains(&cur) {
                seen.push(cur);
                val[*p] = cur;
                let t = eval(scope, fr, val);
                acc = if *boxed { acc & t } else { acc | t };
                cur = eval(body, fr, val);
            }
            val[*p] = old;
            acc
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                go(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// Edge masks of all frames on `n` states with `labels` relations, keeping
/// one representative per isomorphism class when that is cheap to compute.
fn frames(n: usize, labels: usize) -> Vec<u64> {
    let bits = n * n * labels;
    let total: u64 = 1 << bits;
    let perms = permutations(n);
    let prune = (total as u128) * (perms.len() as u128) <= 20_000_000;
    if !prune {
        return (0..total).collect();
    }
    let relabel = |mask: u64, perm: &[usize]| -> u64 {
        let mut out = 0u64;
        for l in 0..labels {
            for i in 0..n {
                for j in 0..n {
                    let b = l * n * n + i * n + j;
                    if mask >> b & 1 == 1 {
                        out |= 1 << (l * n * n + perm[i] * n + perm[j]);
                    }
                }
            }
        }
        out
    };
    (0..total)
        .filter(|&mask| perms.iter().all(|p| relabel(mask, p) >= mask))
        .collect()
}

/// Searches all models with `1..=max_states` states over the formula's
/// letters and labels. Returns the first satisfying pointed model found.
pub(crate) fn search(f: &Formula, max_states: usize) -> Option<PointedModel> {
    let nf = normalize(f);
    let vocab: Vec<PropName> = var_sets(&nf)
        .expect("normalized")
        .free
        .into_iter()
        .collect();
    let labels: BTreeMap<RelLabel, usize> = f
        .labels()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let mut c = Compiler {
        atoms: BTreeMap::new(),
        labels: labels.clone(),
    };
    for p in &vocab {
        c.atom(p);
    }
    let op = c.compile(f);
    let slots = c.atoms.len();
    let v = vocab.len();
    let nl = labels.len().max(1);
    for n in 1..=max_states.min(MAX_BRUTE_STATES) {
        let all: u64 = (1 << n) - 1;
        let val_bits = n * v;
        for mask in frames(n, labels.len()) {
            let mut succ = vec![vec![0u64; n]; nl];
            for (l, rel) in succ.iter_mut().enumerate().take(labels.len()) {
                for (i, s) in rel.iter_mut().enumerate() {
                    *s = (mask >> (l * n * n + i * n)) & all;
                }
            }
            let fr = Frame {
                n,
                all,
                succ: &succ,
            };
            let mut val = vec![0u64; slots];
            for vm in 0u64..(1u64 << val_bits) {
                for (i, slot) in val.iter_mut().enumerate().take(v) {
                    *slot = (vm >> (i * n)) & all;
                }
                for slot in val.iter_mut().skip(v) {
                    *slot = 0;
                }
                let t = eval(&op, &fr, &mut val);
                if t != 0 {
                    return Some(build(n, &succ, &labels, &vocab, &val[..v], t.trailing_zeros() as usize));
                }
            }
        }
    }
    None
}

fn build(
    n: usize,
    succ: &[Vec<u64>],
    labels: &BTreeMap<RelLabel, usize>,
    vocab: &[PropName],
    val: &[u64],
    point: usize,
) -> PointedModel {
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut m = KripkeModel::empty_on(names.clone());
    for (l, &k) in labels {
        m.declare_relation(l);
        for i in 0..n {
            for j in 0..n {
                if succ[k][i] >> j & 1 == 1 {
                    m.add_edge(l, i, j);
                }
            }
        }
    }
    for (p, &bits) in vocab.iter().zip(val) {
        let set = StateSet::from_indices(n, (0..n).filter(|i| bits >> i & 1 == 1));
        m = m.set_valuation(p, &set);
    }
    PointedModel {
        model: m,
        point: names[point].clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_counts_up_to_isomorphism() {
        // Unlabelled digraphs with loops allowed: 2, 10, 104, 3044.
        assert_eq!(frames(1, 1).len(), 2);
        assert_eq!(frames(2, 1).len(), 10);
        assert_eq!(frames(3, 1).len(), 104);
    }
}
