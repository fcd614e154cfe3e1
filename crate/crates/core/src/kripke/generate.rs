use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{KripkeModel, ModelError, StateSet};
use crate::syntax::{PropName, RelLabel};

/// Frame shapes for [`generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `s0 -> s1 -> ... -> s(len-1)`.
    Chain { len: usize },
    /// Complete tree, root `s0`, children in breadth-first order.
    Tree { branching: usize, height: usize },
    /// Each ordered pair (loops included) is an edge with probability `density`.
    Random { states: usize, density: f64 },
}

fn state_names(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("s{i:0width$}")).collect()
}

/// Seeded model generator over relation `d`. Every atom is true at each
/// state with probability one half.
pub fn generate(kind: ModelKind, atoms: &[PropName], seed: u64) -> Result<KripkeModel, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = RelLabel::default_label();
    let (n, edges): (usize, Vec<(usize, usize)>) = match kind {
        ModelKind::Chain { len } => {
            if len == 0 {
                return Err(ModelError::InvalidParams("chain length must be positive".into()));
            }
            (len, (1..len).map(|i| (i - 1, i)).collect())
        }
        ModelKind::Tree { branching, height } => {
            if branching == 0 {
                return Err(ModelError::InvalidParams("branching must be positive".into()));
            }
            let mut n = 1usize;
            let mut level = 1usize;
            for _ in 0..height {
                level = level
                    .checked_mul(branching)
                    .filter(|&l| n + l <= 1 << 20)
                    .ok_or_else(|| ModelError::InvalidParams("tree too large".into()))?;
                n += level;
            }
            let edges = (1..n).map(|i| ((i - 1) / branching, i)).collect();
            (n, edges)
        }
        ModelKind::Random { states, density } => {
            if states == 0 || !(0.0..=1.0).contains(&density) {
                return Err(ModelError::InvalidParams(
                    "random models need states > 0 and density in [0, 1]".into(),
                ));
            }
            let mut edges = Vec::new();
            for i in 0..states {
                for j in 0..states {
                    if rng.gen_bool(density) {
                        edges.push((i, j));
                    }
                }
            }
            (states, edges)
        }
    };
    let mut m = KripkeModel::empty_on(state_names(n));
    for (i, j) in edges {
        m.add_edge(&d, i, j);
    }
    for p in atoms {
        let set = StateSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        m = m.set_valuation(p, &set);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::prop;

    #[test]
    fn shapes() {
        let c = generate(ModelKind::Chain { len: 3 }, &[], 0).unwrap();
        assert_eq!(c.states(), ["s0", "s1", "s2"]);
        let t = generate(ModelKind::Tree { branching: 2, height: 2 }, &[], 0).unwrap();
        assert_eq!(t.len(), 7);
        let r = generate(ModelKind::Random { states: 12, density: 0.3 }, &[prop("p")], 7).unwrap();
        assert_eq!(r.states()[0], "s00");
        assert_eq!(r, generate(ModelKind::Random { states: 12, density: 0.3 }, &[prop("p")], 7).unwrap());
        assert!(generate(ModelKind::Random { states: 3, density: 1.5 }, &[], 0).is_err());
    }
}
