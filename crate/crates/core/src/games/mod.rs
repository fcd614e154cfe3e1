//! Two-player token games on finite boards. Player 0 moves first, a player
//! unable to move loses, and infinite plays go to player 0.

pub mod pcp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::checker::truth_set;
use crate::kripke::{KripkeModel, ModelError, StateSet};
use crate::syntax::{parse_formula, prop, Formula, RelLabel};

pub use pcp::{
    accept_formula, pcp_bounded_search, pcp_candidate_model, pcp_encode, pcp_encode_with, pcp_fixtures,
    pcp_witness_model, start_formula, PcpEncoding, PcpInstance,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("{0} is not a winning position of player 1")]
    NotWinningPosition(String),
    #[error("a board has exactly one relation d, found {0:?}")]
    NotABoard(Vec<RelLabel>),
    #[error("invalid correspondence instance: {0}")]
    InvalidInstance(String),
    #[error("index sequence {0:?} is not a solution")]
    NotASolution(Vec<usize>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A finite board: a Kripke model whose only relation is `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    model: KripkeModel,
}

impl Board {
    pub fn new<S: AsRef<str>>(nodes: &[S], moves: &[(S, S)]) -> Result<Self, GameError> {
        let d = RelLabel::default_label();
        let edges: Vec<(RelLabel, &str, &str)> = moves
            .iter()
            .map(|(a, b)| (d.clone(), a.as_ref(), b.as_ref()))
            .collect();
        let nodes: Vec<&str> = nodes.iter().map(|s| s.as_ref()).collect();
        Ok(Board {
            model: KripkeModel::new(&nodes, &edges, &[])?,
        })
    }

    pub fn from_model(model: KripkeModel) -> Result<Self, GameError> {
        let labels: Vec<RelLabel> = model.labels().cloned().collect();
        if labels != [RelLabel::default_label()] {
            return Err(GameError::NotABoard(labels));
        }
        Ok(Board { model })
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.model.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model.is_empty()
    }

    fn succ(&self, i: usize) -> &StateSet {
        self.model
            .successors(&RelLabel::default_label(), i)
            .expect("boards carry d")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(k) => write!(f, "{k}"),
            Rank::Infinite => f.write_str("INF"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rank::Finite(k) => s.serialize_u64(*k as u64),
            Rank::Infinite => s.serialize_str("INF"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankTable {
    pub ranks: BTreeMap<String, Rank>,
    /// Cumulative sets: entry k holds the positions player 1 wins within k rounds.
    pub win1_by_k: Vec<BTreeSet<String>>,
    pub win1: BTreeSet<String>,
    pub win0: BTreeSet<String>,
}

fn box_dia(b: &Board, x: &StateSet) -> StateSet {
    let n = b.len();
    let dia = StateSet::from_indices(n, (0..n).filter(|&s| b.succ(s).intersects(x)));
    StateSet::from_indices(n, (0..n).filter(|&s| b.succ(s).is_subset(&dia)))
}

fn win_chain(b: &Board) -> Vec<StateSet> {
    let n = b.len();
    let mut chain = vec![StateSet::from_indices(n, (0..n).filter(|&s| b.succ(s).is_empty()))];
    loop {
        let last = chain.last().unwrap();
        let mut next = last.clone();
        next.union_with(&box_dia(b, last));
        if next == *last {
            return chain;
        }
        chain.push(next);
    }
}

/// Backward induction from the dead ends.
pub fn win_ranks(b: &Board) -> RankTable {
    let m = &b.model;
    let chain = win_chain(b);
    let mut ranks = BTreeMap::new();
    for s in 0..b.len() {
        let r = chain
            .iter()
            .position(|w| w.contains(s))
            .map_or(Rank::Infinite, Rank::Finite);
        ranks.insert(m.state_name(s).to_string(), r);
    }
    let win1_by_k: Vec<BTreeSet<String>> = chain
        .iter()
        .map(|w| m.names_of(w).into_iter().collect())
        .collect();
    let win1 = win1_by_k.last().cloned().unwrap_or_default();
    let win0 = m
        .states()
        .iter()
        .filter(|s| !win1.contains(*s))
        .cloned()
        .collect();
    RankTable {
        ranks,
        win1_by_k,
        win1,
        win0,
    }
}

/// `<p:=[]false; (p:=p | []<>p)*>p`.
pub fn winning_formula() -> Formula {
    parse_formula("<p:=[]false; (p:=p | []<>p)*>p").expect("fixed formula")
}

/// The same with exactly `k` unrolled steps.
pub fn winning_formula_k(k: usize) -> Formula {
    let p = prop("p");
    let step = parse_formula("p | []<>p").expect("fixed formula");
    let mut f = Formula::Atom(p.clone());
    for _ in 0..k {
        f = Formula::sub(&p, step.clone(), f);
    }
    Formula::sub(&p, parse_formula("[]false").expect("fixed formula"), f)
}

/// Compares the truth sets of the unrolled and iterated winning formulas
/// with the backward-induction sets, one round past stabilization.
pub fn correspondence_check(b: &Board) -> bool {
    let chain = win_chain(b);
    let last = chain.last().unwrap();
    for k in 0..=chain.len() {
        let expected = chain.get(k).unwrap_or(last);
        match truth_set(&b.model, &winning_formula_k(k)) {
            Ok(t) if t == *expected => {}
            _ => return false,
        }
    }
    matches!(truth_set(&b.model, &winning_formula()), Ok(t) if t == *last)
}

/// Player 1's replies: from any position with a winning successor, move to
/// one of least rank, ties broken by node order.
pub type Strategy = BTreeMap<String, String>;

pub fn extract_strategy(b: &Board) -> Strategy {
    let chain = win_chain(b);
    let rank = |s: usize| chain.iter().position(|w| w.contains(s));
    let mut out = Strategy::new();
    for t in 0..b.len() {
        let best = b
            .succ(t)
            .iter()
            .filter_map(|u| rank(u).map(|r| (r, u)))
            .min();
        if let Some((_, u)) = best {
            out.insert(
                b.model.state_name(t).to_string(),
                b.model.state_name(u).to_string(),
            );
        }
    }
    out
}

/// The strategy restricted to positions reachable when play starts at `start`.
pub fn strategy_for(b: &Board, start: &str) -> Result<Strategy, GameError> {
    let s = b.model.index_of(start)?;
    let table = win_ranks(b);
    if !table.win1.contains(start) {
        return Err(GameError::NotWinningPosition(start.to_string()));
    }
    let full = extract_strategy(b);
    let mut out = Strategy::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        for t in b.succ(x).iter() {
            let name = b.model.state_name(t);
            if let Some(reply) = full.get(name) {
                out.insert(name.to_string(), reply.clone());
                stack.push(b.model.index_of(reply)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Player {
    Zero,
    One,
}

/// How player 0 chooses moves in [`simulate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adversary {
    /// Every choice is explored; the result is the worst case for player 1.
    Exhaustive,
    /// A fixed reply per position; positions without an entry take the
    /// first successor.
    Policy(Strategy),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub winner: Player,
    /// Rounds until player 1 wins; `None` when player 0 wins.
    pub rounds: Option<usize>,
}

/// Plays from `start` with player 1 following `strategy`. A position
/// repeated along a play means player 0 can keep the game running.
pub fn simulate(b: &Board, start: &str, strategy: &Strategy, adversary: &Adversary) -> Result<Outcome, GameError> {
    let s = b.model.index_of(start)?;
    let mut reply = vec![None; b.len()];
    for (t, u) in strategy {
        reply[b.model.index_of(t)?] = Some(b.model.index_of(u)?);
    }
    let mut policy = vec![None; b.len()];
    if let Adversary::Policy(p) = adversary {
        for (t, u) in p {
            policy[b.model.index_of(t)?] = Some(b.model.index_of(u)?);
        }
    }
    let mut memo: Vec<Option<Option<usize>>> = vec![None; b.len()];
    let mut on_path = vec![false; b.len()];
    let rounds = play(b, s, &reply, &policy, adversary, &mut memo, &mut on_path);
    Ok(Outcome {
        winner: if rounds.is_some() { Player::One } else { Player::Zero },
        rounds,
    })
}

/// Rounds player 1 needs from a position where player 0 is to move, or
/// `None` if player 0 escapes.
fn play(
    b: &Board,
    s: usize,
    reply: &[Option<usize>],
    policy: &[Option<usize>],
    adversary: &Adversary,
    memo: &mut Vec<Option<Option<usize>>>,
    on_path: &mut Vec<bool>,
) -> Option<usize> {
    if let Some(r) = memo[s] {
        return r;
    }
    if on_path[s] {
        return None;
    }
    let moves: Vec<usize> = match adversary {
        Adversary::Exhaustive => b.succ(s).iter().collect(),
        Adversary::Policy(_) => policy[s]
            .filter(|&t| b.succ(s).contains(t))
            .or_else(|| b.succ(s).iter().next())
            .into_iter()
            .collect(),
    };
    if moves.is_empty() {
        memo[s] = Some(Some(0));
        return Some(0);
    }
    on_path[s] = true;
    let mut worst = Some(0);
    for t in moves {
        let r = match reply[t] {
            Some(u) if b.succ(t).contains(u) => play(b, u, reply, policy, adversary, memo, on_path).map(|k| k + 1),
            _ => None,
        };
        worst = match (worst, r) {
            (Some(a), Some(c)) => Some(a.max(c)),
            _ => None,
        };
        if worst.is_none() {
            break;
        }
    }
    on_path[s] = false;
    memo[s] = Some(worst);
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{generate, ModelKind};

    fn b1() -> Board {
        Board::from_model(KripkeModel::fixture("fig2_b1").unwrap()).unwrap()
    }

    fn names(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ranks_on_b1() {
        let t = win_ranks(&b1());
        assert_eq!(t.win1_by_k, vec![names(&["d"]), names(&["c", "d"])]);
        assert_eq!(t.win1, names(&["c", "d"]));
        assert_eq!(t.win0, names(&["a", "b"]));
        assert_eq!(t.ranks["d"], Rank::Finite(0));
        assert_eq!(t.ranks["c"], Rank::Finite(1));
        assert_eq!(t.ranks["a"], Rank::Infinite);
    }

    #[test]
    fn degenerate_boards() {
        let empty = Board::new(&["x", "y"], &[]).unwrap();
        let t = win_ranks(&empty);
        assert!(t.ranks.values().all(|r| *r == Rank::Finite(0)));
        assert!(correspondence_check(&empty));
        let looped = Board::new(&["x"], &[("x", "x")]).unwrap();
        let t = win_ranks(&looped);
        assert_eq!(t.ranks["x"], Rank::Infinite);
        assert_eq!(t.win0, names(&["x"]));
        let out = simulate(&looped, "x", &Strategy::new(), &Adversary::Exhaustive).unwrap();
        assert_eq!(out.winner, Player::Zero);
    }

    #[test]
    fn play_on_b1() {
        let b = b1();
        assert!(correspondence_check(&b));
        let strat = strategy_for(&b, "c").unwrap();
        assert_eq!(strat.get("b").map(String::as_str), Some("d"));
        let out = simulate(&b, "c", &strat, &Adversary::Exhaustive).unwrap();
        assert_eq!(out, Outcome { winner: Player::One, rounds: Some(1) });
        let out = simulate(&b, "d", &strat, &Adversary::Exhaustive).unwrap();
        assert_eq!(out.rounds, Some(0));
        let full = extract_strategy(&b);
        let out = simulate(&b, "a", &full, &Adversary::Exhaustive).unwrap();
        assert_eq!(out.winner, Player::Zero);
        assert_eq!(strategy_for(&b, "a"), Err(GameError::NotWinningPosition("a".into())));
    }

    #[test]
    fn random_boards() {
        for seed in 0..30 {
            let m = generate(ModelKind::Random { states: 6, density: 0.3 }, &[], seed).unwrap();
            let b = Board::from_model(m).unwrap();
            assert!(correspondence_check(&b), "seed {seed}");
            let t = win_ranks(&b);
            let strat = extract_strategy(&b);
            for (s, r) in &t.ranks {
                let out = simulate(&b, s, &strat, &Adversary::Exhaustive).unwrap();
                match r {
                    Rank::Finite(k) => assert!(out.rounds.is_some_and(|x| x <= *k), "seed {seed} {s}"),
                    Rank::Infinite => assert_eq!(out.winner, Player::Zero),
                }
            }
        }
    }
}
