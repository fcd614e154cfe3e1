//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subkit::kripke::KripkeModel;
use subkit::syntax::{Formula, Logic, PropName, RelLabel, StarMode};
use subkit::translate::{ImrFormula, PdlFormula, Program};

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub atoms: Vec<PropName>,
    pub labels: Vec<RelLabel>,
}

fn names<T, F: Fn(&str) -> T>(xs: &[&str], f: F) -> Vec<T> {
    xs.iter().map(|s| f(s)).collect()
}

impl Gen {
    pub fn new(seed: u64, atoms: &[&str], labels: &[&str]) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            atoms: names(atoms, |s| PropName::new(s).unwrap()),
            labels: names(labels, |s| RelLabel::new(s).unwrap()),
        }
    }

    pub fn atom(&mut self) -> PropName {
        self.atoms.choose(&mut self.rng).unwrap().clone()
    }

    pub fn label(&mut self) -> RelLabel {
        self.labels.choose(&mut self.rng).unwrap().clone()
    }

    fn leaf(&mut self) -> Formula {
        if self.rng.gen_ratio(1, 8) {
            Formula::Bottom
        } else {
            Formula::Atom(self.atom())
        }
    }

    /// Modal formula without substitutions.
    pub fn ml(&mut self, depth: usize) -> Formula {
        self.build(depth, false, 0)
    }

    /// Substitution formula of depth at most `depth`.
    pub fn msl(&mut self, depth: usize) -> Formula {
        self.build(depth, true, 0)
    }

    /// Iterated formula with at most `stars` nested iterations.
    pub fn misl(&mut self, depth: usize, stars: usize) -> Formula {
        self.build(depth, true, stars)
    }

    fn build(&mut self, depth: usize, subs: bool, stars: usize) -> Formula {
        if depth == 0 || self.rng.gen_ratio(1, 6) {
            return self.leaf();
        }
        let d = depth - 1;
        let kinds = if stars > 0 { 9 } else if subs { 8 } else { 6 };
        match self.rng.gen_range(0..kinds) {
            0 => self.build(d, subs, stars).not(),
            1 => self.build(d, subs, stars).and(self.build(d, subs, stars)),
            2 => self.build(d, subs, stars).or(self.build(d, subs, stars)),
            3 => {
                let l = self.label();
                Formula::diamond_l(&l, self.build(d, subs, stars))
            }
            4 => {
                let l = self.label();
                Formula::box_l(&l, self.build(d, subs, stars))
            }
            5 => self.build(d, subs, stars).implies(self.build(d, subs, stars)),
            6 | 7 => {
                let p = self.atom();
                let body = self.build(d, subs, stars);
                Formula::sub(&p, body, self.build(d, subs, stars))
            }
            _ => {
                let p = self.atom();
                let init = self.build(d.min(1), subs, 0);
                let step = self.build(d, subs, stars - 1);
                let scope = self.build(d, subs, stars - 1);
                let mode = if self.rng.gen_bool(0.5) {
                    StarMode::Diamond
                } else {
                    StarMode::Box
                };
                Formula::sub(&p, init, Formula::star(&p, step, scope, mode))
            }
        }
    }

    /// Body in which `p` occurs only positively and outside substitutions.
    pub fn positive(&mut self, p: &PropName, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_ratio(1, 5) {
            return match self.rng.gen_range(0..4) {
                0 => Formula::Atom(p.clone()),
                1 => Formula::Atom(self.atom()).not(),
                2 => Formula::Bottom,
                _ => Formula::Atom(self.atom()),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..4) {
            0 => self.positive(p, d).and(self.positive(p, d)),
            1 => self.positive(p, d).or(self.positive(p, d)),
            2 => self.positive(p, d).diamond(),
            _ => self.positive(p, d).boxed(),
        }
    }

    pub fn program(&mut self, depth: usize) -> Program {
        if depth == 0 || self.rng.gen_ratio(1, 3) {
            return Program::Atomic(self.label());
        }
        let d = depth - 1;
        match self.rng.gen_range(0..3) {
            0 => Program::seq(self.program(d), self.program(d)),
            1 => Program::union(self.program(d), self.program(d)),
            _ => Program::star(self.program(d)),
        }
    }

    pub fn pdl(&mut self, depth: usize, prog_depth: usize) -> PdlFormula {
        if depth == 0 || self.rng.gen_ratio(1, 5) {
            return if self.rng.gen_ratio(1, 8) {
                PdlFormula::bottom()
            } else {
                PdlFormula::atom(self.atom())
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => PdlFormula::not(self.pdl(d, prog_depth)),
            1 => PdlFormula::and(self.pdl(d, prog_depth), self.pdl(d, prog_depth)),
            2 => PdlFormula::or(self.pdl(d, prog_depth), self.pdl(d, prog_depth)),
            3 => {
                let pr = self.program(prog_depth);
                PdlFormula::diamond(pr, self.pdl(d, prog_depth))
            }
            _ => {
                let pr = self.program(prog_depth);
                PdlFormula::boxed(pr, self.pdl(d, prog_depth))
            }
        }
    }

    pub fn imr(&mut self, depth: usize, nesting: usize) -> ImrFormula {
        if depth == 0 || self.rng.gen_ratio(1, 5) {
            return if self.rng.gen_ratio(1, 8) {
                ImrFormula::bottom()
            } else {
                ImrFormula::atom(self.atom())
            };
        }
        let d = depth - 1;
        let kinds = if nesting > 0 { 8 } else { 5 };
        match self.rng.gen_range(0..kinds) {
            0 => ImrFormula::not(self.imr(d, nesting)),
            1 => ImrFormula::and(self.imr(d, nesting), self.imr(d, nesting)),
            2 => ImrFormula::or(self.imr(d, nesting), self.imr(d, nesting)),
            3 => ImrFormula::Diamond(self.label(), Box::new(self.imr(d, nesting))),
            4 => ImrFormula::BoxStar(self.label(), Box::new(self.imr(d, nesting))),
            5 => ImrFormula::Announce(Box::new(self.imr(d, nesting - 1)), Box::new(self.imr(d, nesting - 1))),
            6 => ImrFormula::AnnounceStar(Box::new(self.imr(d, nesting - 1)), Box::new(self.imr(d, nesting - 1))),
            _ => ImrFormula::Announce(Box::new(self.imr(d, nesting - 1)), Box::new(self.imr(d, nesting))),
        }
    }

    /// Random model over the generator's atoms and labels.
    pub fn model(&mut self, max_states: usize) -> KripkeModel {
        let n = self.rng.gen_range(1..=max_states);
        let density = self.rng.gen_range(0.15..0.6);
        let states: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let mut edges = Vec::new();
        for l in &self.labels {
            for a in &states {
                for b in &states {
                    if self.rng.gen_bool(density) {
                        edges.push((l.clone(), a.clone(), b.clone()));
                    }
                }
            }
        }
        let val: Vec<(PropName, Vec<String>)> = self
            .atoms
            .iter()
            .map(|p| {
                let set = states.iter().filter(|_| self.rng.gen_bool(0.5)).cloned().collect();
                (p.clone(), set)
            })
            .collect();
        let mut m = KripkeModel::new(&states, &edges, &val).unwrap();
        for l in &self.labels {
            m.declare_relation(l);
        }
        m
    }
}
