use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{bisim_fun, gfp_of, Kind, Mode, Relation};
use crate::lts::Universe;

/// Largest universe whose relations are all enumerated.
pub const EXHAUSTIVE_MAX: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    Exhaustive,
    Sampled,
}

/// The relations a law is checked against on one universe.
///
/// Up to four states every relation is enumerated (by its bit code);
/// beyond that a seeded random sample is mixed with ∅, ⊤, the identity,
/// strong bisimilarity and every singleton.
#[derive(Clone, Debug)]
pub struct Suite {
    n: usize,
    mode: SamplingMode,
    sampled: Vec<Relation>,
}

impl Suite {
    pub fn new(u: &Universe, seed: u64, samples: usize) -> Suite {
        let n = u.len();
        if n <= EXHAUSTIVE_MAX {
            return Suite { n, mode: SamplingMode::Exhaustive, sampled: Vec::new() };
        }
        let mut rels = vec![Relation::empty(n), Relation::full(n), Relation::identity(n)];
        rels.push(gfp_of(n, |r| bisim_fun(u, r, Kind::All, Mode::Strong, false)));
        for i in 0..n {
            for j in 0..n {
                rels.push(Relation::from_pairs(n, [(i, j)]));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        const DENSITIES: [f64; 6] = [0.05, 0.15, 0.3, 0.5, 0.75, 0.95];
        for k in 0..samples {
            let d = DENSITIES[k % DENSITIES.len()];
            let mut r = Relation::empty(n);
            for i in 0..n {
                for j in 0..n {
                    if rng.gen_bool(d) {
                        r.insert(i, j);
                    }
                }
            }
            rels.push(r);
        }
        Suite { n, mode: SamplingMode::Sampled, sampled: rels }
    }

    /// Every relation over `n ≤ 4` states.
    pub fn exhaustive(n: usize) -> Suite {
        assert!(n <= EXHAUSTIVE_MAX);
        Suite { n, mode: SamplingMode::Exhaustive, sampled: Vec::new() }
    }

    pub fn from_relations(n: usize, rels: Vec<Relation>) -> Suite {
        Suite { n, mode: SamplingMode::Sampled, sampled: rels }
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        match self.mode {
            SamplingMode::Exhaustive => 1 << (self.n * self.n),
            SamplingMode::Sampled => self.sampled.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Relation {
        match self.mode {
            SamplingMode::Exhaustive => Relation::from_code(self.n, i as u64),
            SamplingMode::Sampled => self.sampled[i].clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Relation> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    /// Pairs `(R, S)` with `R ⊆ S` for monotonicity checks on a sampled
    /// suite: each relation against its union and intersection with the next.
    /// The exhaustive case is handled through covering pairs of bit codes.
    pub fn chains(&self) -> Vec<(Relation, Relation)> {
        let len = self.len();
        let mut out = Vec::with_capacity(2 * len);
        for i in 0..len {
            let (r, s) = (self.get(i), self.get((i + 1) % len));
            out.push((r.intersect(&s), r.clone()));
            out.push((r.clone(), r.union(&s)));
        }
        out
    }

    /// Index pairs `(i, j)` for binary laws: all pairs exhaustively up to
    /// three states, otherwise each relation with its successor.
    pub fn couples(&self) -> Vec<(usize, usize)> {
        let len = self.len();
        if len <= 512 {
            (0..len).flat_map(|i| (0..len).map(move |j| (i, j))).collect()
        } else {
            (0..len).map(|i| (i, (i + 1) % len)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{reachable_universe, ExplorationBudget};
    use crate::syntax::parse;

    #[test]
    fn small_universes_are_exhaustive() {
        let u = reachable_universe(&[parse("tau.tau.0").unwrap()], &ExplorationBudget::default()).unwrap();
        let s = Suite::new(&u, 0, 512);
        assert_eq!(s.mode(), SamplingMode::Exhaustive);
        assert_eq!(s.len(), 512);
    }

    #[test]
    fn sampled_suite_is_seeded() {
        let u = reachable_universe(&[parse("tau.tau.tau.tau.0").unwrap()], &ExplorationBudget::default()).unwrap();
        let a = Suite::new(&u, 7, 64);
        let b = Suite::new(&u, 7, 64);
        assert_eq!(a.mode(), SamplingMode::Sampled);
        assert_eq!(a.len(), 4 + 25 + 64);
        assert!(a.iter().zip(b.iter()).all(|(x, y)| x == y));
        assert_eq!(a.get(0), Relation::empty(5));
        assert_ne!(Suite::new(&u, 8, 64).get(40), a.get(40));
    }
}
