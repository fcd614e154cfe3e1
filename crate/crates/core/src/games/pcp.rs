//! Encoding of correspondence-problem instances over {a, b} as formulas
//! that are satisfiable on finite trees exactly when the instance has a
//! solution, with the intended witness model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::kripke::{KripkeModel, PointedModel};
use crate::syntax::{label, parse_formula, prop, Formula, PropName, RelLabel};

use super::GameError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcpInstance {
    pub u: Vec<String>,
    pub v: Vec<String>,
}

impl PcpInstance {
    pub fn new<S: AsRef<str>>(u: &[S], v: &[S]) -> Result<Self, GameError> {
        let inst = PcpInstance {
            u: u.iter().map(|s| s.as_ref().to_string()).collect(),
            v: v.iter().map(|s| s.as_ref().to_string()).collect(),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self, GameError> {
        let inst: PcpInstance =
            serde_json::from_str(text).map_err(|e| GameError::InvalidInstance(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |m: String| Err(GameError::InvalidInstance(m));
        if self.u.is_empty() || self.u.len() != self.v.len() {
            return bad(format!("{} u-words against {} v-words", self.u.len(), self.v.len()));
        }
        for w in self.u.iter().chain(&self.v) {
            if w.is_empty() || !w.chars().all(|c| c == 'a' || c == 'b') {
                return bad(format!("word {w:?} is not a non-empty string over a, b"));
            }
        }
        for i in 0..self.len() {
            for j in 0..i {
                if self.u[i] == self.u[j] && self.v[i] == self.v[j] {
                    return bad(format!("pairs {} and {} coincide", j + 1, i + 1));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Concatenations for a 1-based index sequence.
    pub fn concat(&self, seq: &[usize]) -> (String, String) {
        let mut top = String::new();
        let mut bottom = String::new();
        for &i in seq {
            top.push_str(&self.u[i - 1]);
            bottom.push_str(&self.v[i - 1]);
        }
        (top, bottom)
    }

    pub fn is_solution(&self, seq: &[usize]) -> bool {
        !seq.is_empty() && seq.iter().all(|&i| (1..=self.len()).contains(&i)) && {
            let (a, b) = self.concat(seq);
            a == b
        }
    }
}

/// Named instances: `two_pairs` (a, ab / aa, b), `swapped` (ab / ba) and
/// `single` (a / a).
pub fn pcp_fixtures() -> BTreeMap<&'static str, PcpInstance> {
    let mut m = BTreeMap::new();
    m.insert("two_pairs", PcpInstance::new(&["a", "ab"], &["aa", "b"]).unwrap());
    m.insert("swapped", PcpInstance::new(&["ab"], &["ba"]).unwrap());
    m.insert("single", PcpInstance::new(&["a"], &["a"]).unwrap());
    m
}

/// Shortest solution with at most `max_len` indices, searched breadth first
/// over sequences whose two concatenations stay prefix-compatible.
pub fn pcp_bounded_search(inst: &PcpInstance, max_len: usize) -> Option<Vec<usize>> {
    let mut frontier: Vec<(Vec<usize>, String, String)> = vec![(Vec::new(), String::new(), String::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (seq, top, bottom) in &frontier {
            for i in 1..=inst.len() {
                let t = format!("{top}{}", inst.u[i - 1]);
                let b = format!("{bottom}{}", inst.v[i - 1]);
                let mut s = seq.clone();
                s.push(i);
                if t == b {
                    return Some(s);
                }
                if t.starts_with(&b) || b.starts_with(&t) {
                    next.push((s, t, b));
                }
            }
        }
        frontier = next;
    }
    None
}

/// Which form of the prefix-closure conjunct of `Append` to emit.
///
/// `Literal` marks the last node of the older configuration by requiring a
/// successor that spells the appended word, then demands the same mark on
/// the older configuration state at the same depth; there that node is the
/// end of its branch, so the requirement cannot hold once a candidate has
/// two or more words. `Repaired` accepts a dead end of the opposite parity
/// as the mark on the older side, and only applies when the appended word is
/// present with the expected parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PcpEncoding {
    Literal,
    #[default]
    Repaired,
}

const SIDES: [&str; 2] = ["left", "right"];
const PARITIES: [&str; 2] = ["odd", "even"];
const LETTERS: [&str; 2] = ["a", "b"];

fn xor(x: &str, y: &str) -> String {
    format!("(({x} | {y}) & ~({x} & {y}))")
}

fn conj(parts: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = parts.into_iter().map(|p| format!("({p})")).collect();
    v.join(" & ")
}

/// Reflexive-transitive `[]`, written with the common-knowledge pattern.
fn box_star(f: &str) -> String {
    format!("([q:={f}; (q:=[]q)*]q)")
}

fn dia_star(f: &str) -> String {
    format!("~{}", box_star(&format!("~({f})")))
}

fn string_formula(side: &str, parity: &str, word: &str) -> String {
    let first = &word[..1];
    if word.len() == 1 {
        format!("({side} & {parity} & {first} & []false)")
    } else {
        format!(
            "({side} & {parity} & {first} & <>true & []{})",
            string_formula(side, parity, &word[1..])
        )
    }
}

fn tags(side: &str) -> String {
    format!("{side} & {} & {}", xor("odd", "even"), xor("a", "b"))
}

fn configuration() -> String {
    let unmarked = "~odd & ~even & ~left & ~right".to_string();
    let branches = format!(
        "<p:=[]false & {l}; (p:={l} & <>p)*; q:=[]false & {r}; (q:={r} & <>q)*>(<>true -> (<>p & <>q & [](p | q)))",
        l = tags("left"),
        r = tags("right"),
    );
    let mut uniform = Vec::new();
    for x in SIDES {
        for y in PARITIES {
            for s in LETTERS {
                uniform.push(format!("[q:={x} & {y} & {s}; (q:=<>q)*](<>q -> []({x} -> q))"));
            }
        }
    }
    conj([unmarked, branches, conj(uniform)])
}

/// `start`: an unmarked dead end, the configuration with empty strings.
pub fn start_formula() -> Formula {
    parse_formula(&start_text()).expect("generated formula parses")
}

fn start_text() -> String {
    "~odd & ~even & ~left & ~right & []false".to_string()
}

fn witness() -> String {
    let c = configuration();
    format!("<>true & []({c} & [c]({c}))")
}

fn append(inst: &PcpInstance, i: usize, encoding: PcpEncoding) -> String {
    let word = |x: &str| {
        if x == "left" {
            inst.u[i].as_str()
        } else {
            inst.v[i].as_str()
        }
    };
    let mut parts = vec!["<c>cand".to_string()];
    for (prev, cur) in [("even", "odd"), ("odd", "even")] {
        parts.push(format!(
            "<q:={prev} & []false; (q:=<>q)*><c>q -> ({} & {})",
            dia_star(&string_formula("left", cur, word("left"))),
            dia_star(&string_formula("right", cur, word("right"))),
        ));
    }
    let mut extends = Vec::new();
    for x in SIDES {
        for y in PARITIES {
            for s in LETTERS {
                extends.push(format!("[q:={x} & {y} & {s}; (q:=<>q)*](<c>q -> q)"));
            }
        }
    }
    parts.push(conj(extends));
    let mut prefix = Vec::new();
    for x in SIDES {
        for y in PARITIES {
            for y2 in PARITIES {
                for s in LETTERS {
                    let tail = string_formula(x, y, word(x));
                    match encoding {
                        PcpEncoding::Literal => prefix.push(format!(
                            "[q:={x} & {y2} & {s} & <>{tail}; (q:=<>q)*](q -> [c]q)"
                        )),
                        PcpEncoding::Repaired if y != y2 => prefix.push(format!(
                            "{} -> [q:={x} & {y2} & {s} & (<>{tail} | []false); (q:=<>q)*](q -> [c]q)",
                            dia_star(&tail)
                        )),
                        PcpEncoding::Repaired => {}
                    }
                }
            }
        }
    }
    parts.push(conj(prefix));
    conj(parts)
}

fn accept_text() -> String {
    "<>true & [q:=a; (q:=<>q)*](<>q -> []q) & [q:=b; (q:=<>q)*](<>q -> []q)".to_string()
}

/// `Accept`: both branches spell the same letters at every depth.
pub fn accept_formula() -> Formula {
    parse_formula(&accept_text()).expect("generated formula parses")
}

pub fn pcp_encode_with(inst: &PcpInstance, encoding: PcpEncoding) -> Result<Formula, GameError> {
    inst.validate()?;
    let step: Vec<String> = (0..inst.len())
        .map(|i| format!("({})", append(inst, i, encoding)))
        .collect();
    let text = format!(
        "({}) & <cand:={}; (cand:={})*><>(cand & ({}))",
        witness(),
        start_text(),
        step.join(" | "),
        accept_text()
    );
    parse_formula(&text).map_err(|e| GameError::InvalidInstance(format!("generated formula: {e}")))
}

/// The encoding in its repaired form; see [`PcpEncoding`].
pub fn pcp_encode(inst: &PcpInstance) -> Result<Formula, GameError> {
    pcp_encode_with(inst, PcpEncoding::default())
}

/// The tree shape of the intended witness for any index sequence: `w` sees
/// `c{l}` along `d`, the states `c{l} .. c0` form a chain along `c`, and
/// `c{k}` carries a left and a right branch spelling the first `k` words.
pub fn pcp_candidate_model(inst: &PcpInstance, seq: &[usize]) -> Result<PointedModel, GameError> {
    inst.validate()?;
    if seq.iter().any(|&i| !(1..=inst.len()).contains(&i)) {
        return Err(GameError::InvalidInstance(format!("index out of range in {seq:?}")));
    }
    let d = RelLabel::default_label();
    let c = label("c");
    let l = seq.len();
    let mut states = vec!["w".to_string()];
    let mut edges: Vec<(RelLabel, String, String)> = vec![(d.clone(), "w".into(), format!("c{l}"))];
    let mut val: BTreeMap<PropName, Vec<String>> = BTreeMap::new();
    for k in 0..=l {
        let ck = format!("c{k}");
        states.push(ck.clone());
        if k > 0 {
            edges.push((c.clone(), ck.clone(), format!("c{}", k - 1)));
        }
        for (side, words) in [("left", &inst.u), ("right", &inst.v)] {
            let tag = &side[..1];
            let mut prev = ck.clone();
            let mut depth = 0;
            for (j, &idx) in seq[..k].iter().enumerate() {
                let parity = if j % 2 == 0 { "odd" } else { "even" };
                for ch in words[idx - 1].chars() {
                    depth += 1;
                    let node = format!("c{k}_{tag}{depth}");
                    states.push(node.clone());
                    edges.push((d.clone(), prev, node.clone()));
                    for p in [side, parity, &ch.to_string()] {
                        val.entry(prop(p)).or_default().push(node.clone());
                    }
                    prev = node;
                }
            }
        }
    }
    let valuation: Vec<(PropName, Vec<String>)> = val.into_iter().collect();
    let model = KripkeModel::new(&states, &edges, &valuation)?;
    Ok(PointedModel { model, point: "w".into() })
}

pub fn pcp_witness_model(inst: &PcpInstance, solution: &[usize]) -> Result<PointedModel, GameError> {
    inst.validate()?;
    if !inst.is_solution(solution) {
        return Err(GameError::NotASolution(solution.to_vec()));
    }
    pcp_candidate_model(inst, solution)
}
