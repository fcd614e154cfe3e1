use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::kripke::{KripkeModel, PointedModel, StateSet};
use crate::syntax::{Formula, PropName, RelLabel};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    Lit(PropName, bool),
    True,
    False,
    And(u32, u32),
    Or(u32, u32),
    Dia(RelLabel, u32),
    Box(RelLabel, u32),
}

/// Hash-consed negation normal form.
#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        self.index.insert(n, i);
        i
    }

    fn nnf(&mut self, f: &Formula, positive: bool) -> u32 {
        let n = match f {
            Formula::Atom(p) => Node::Lit(p.clone(), positive),
            Formula::Bottom => {
                if positive {
                    Node::False
                } else {
                    Node::True
                }
            }
            Formula::Neg(a) => return self.nnf(a, !positive),
            Formula::And(a, b) => {
                let (x, y) = (self.nnf(a, positive), self.nnf(b, positive));
                if positive {
                    Node::And(x, y)
                } else {
                    Node::Or(x, y)
                }
            }
            Formula::Diamond(l, a) => {
                let x = self.nnf(a, positive);
                if positive {
                    Node::Dia(l.clone(), x)
                } else {
                    Node::Box(l.clone(), x)
                }
            }
            Formula::Sub { .. } | Formula::Star { .. } => {
                unreachable!("caller rejects substitutions")
            }
        };
        self.intern(n)
    }
}

/// Open branch: true letters and one child per diamond.
struct Tree {
    true_atoms: Vec<PropName>,
    children: Vec<(RelLabel, Rc<Tree>)>,
}

struct Prover {
    arena: Arena,
    memo: HashMap<Vec<u32>, Option<Rc<Tree>>>,
}

impl Prover {
    /// Satisfiability of a set of formulas at one state; results are cached
    /// by node-set equality.
    fn sat_node(&mut self, set: Vec<u32>) -> Option<Rc<Tree>> {
        if let Some(r) = self.memo.get(&set) {
            return r.clone();
        }
        let r = self.expand(set.clone(), BTreeSet::new()).map(Rc::new);
        self.memo.insert(set, r.clone());
        r
    }

    fn complement(&self, x: u32) -> Option<u32> {
        match &self.arena.nodes[x as usize] {
            Node::Lit(p, b) => self.arena.index.get(&Node::Lit(p.clone(), !b)).copied(),
            _ => None,
        }
    }

    fn expand(&mut self, mut todo: Vec<u32>, mut done: BTreeSet<u32>) -> Option<Tree> {
        while let Some(x) = todo.pop() {
            if done.contains(&x) {
                continue;
            }
            match self.arena.nodes[x as usize].clone() {
                Node::True => {}
                Node::False => return None,
                Node::Lit(..) => {
                    if self.complement(x).is_some_and(|c| done.contains(&c)) {
                        return None;
                    }
                    done.insert(x);
                }
                Node::And(a, b) => {
                    todo.push(b);
                    todo.push(a);
                }
                Node::Or(a, b) => {
                    if done.contains(&a) || done.contains(&b) {
                        continue;
                    }
                    for branch in [a, b] {
                        let mut t = todo.clone();
                        t.push(branch);
                        if let Some(tree) = self.expand(t, done.clone()) {
                            return Some(tree);
                        }
                    }
                    return None;
                }
                Node::Dia(..) | Node::Box(..) => {
                    done.insert(x);
                }
            }
        }
        let mut boxes: BTreeMap<RelLabel, Vec<u32>> = BTreeMap::new();
        let mut dias = Vec::new();
        let mut true_atoms = Vec::new();
        for &x in &done {
            match &self.arena.nodes[x as usize] {
                Node::Box(l, a) => boxes.entry(l.clone()).or_default().push(*a),
                Node::Dia(l, a) => dias.push((l.clone(), *a)),
                Node::Lit(p, true) => true_atoms.push(p.clone()),
                _ => {}
            }
        }
        let mut children = Vec::new();
        for (l, a) in dias {
            let mut set: Vec<u32> = boxes.get(&l).cloned().unwrap_or_default();
            set.push(a);
            set.sort_unstable();
            set.dedup();
            children.push((l, self.sat_node(set)?));
        }
        Some(Tree {
            true_atoms,
            children,
        })
    }
}

fn tree_to_model(root: &Rc<Tree>, labels: &BTreeSet<RelLabel>) -> PointedModel {
    let mut ids: HashMap<*const Tree, usize> = HashMap::new();
    let mut order: Vec<Rc<Tree>> = Vec::new();
    let mut stack = vec![root.clone()];
    while let Some(t) = stack.pop() {
        let key = Rc::as_ptr(&t);
        if ids.contains_key(&key) {
            continue;
        }
        ids.insert(key, order.len());
        for (_, c) in t.children.iter().rev() {
            stack.push(c.clone());
        }
        order.push(t);
    }
    let width = order.len().saturating_sub(1).to_string().len();
    let names: Vec<String> = (0..order.len()).map(|i| format!("w{i:0width$}")).collect();
    let mut m = KripkeModel::empty_on(names.clone());
    for l in labels {
        m.declare_relation(l);
    }
    let mut val: BTreeMap<PropName, StateSet> = BTreeMap::new();
    for (i, t) in order.iter().enumerate() {
        for (l, c) in &t.children {
            m.add_edge(l, i, ids[&Rc::as_ptr(c)]);
        }
        for p in &t.true_atoms {
            val.entry(p.clone())
                .or_insert_with(|| StateSet::empty(order.len()))
                .insert(i);
        }
    }
    for (p, s) in val {
        m = m.set_valuation(&p, &s);
    }
    PointedModel {
        model: m,
        point: names[0].clone(),
    }
}

/// Tableau decision for substitution-free formulas. Returns a witness for
/// satisfiable input.
pub(crate) fn decide(f: &Formula) -> Option<PointedModel> {
    let mut prover = Prover {
        arena: Arena::default(),
        memo: HashMap::new(),
    };
    let root = prover.arena.nnf(f, true);
    let tree = prover.sat_node(vec![root])?;
    Some(tree_to_model(&tree, &f.labels()))
}
