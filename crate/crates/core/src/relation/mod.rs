//! Relations over a universe, bisimulation functionals and transformers.

mod functional;
mod sample;
mod transformer;

use std::fmt;

use serde::Serialize;

use crate::lts::Universe;

pub use functional::{bisim_fun, expansion_fun, gfp_of, partition_refinement, sim_fun, unmatched_move, Kind, Mode};
pub use sample::{SamplingMode, Suite, EXHAUSTIVE_MAX};
pub use transformer::{compose, intersect, omega, power, union, union_all, Flags, Transformer, TransformerError};

/// A set of pairs of universe states, stored as a row-major bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Relation { n, words, bits: vec![0; words * n] }
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.insert(i, j);
            }
        }
        r
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    /// Relation whose pair `k` (in row-major order) is present iff bit `k` of
    /// `code` is set. Only meaningful for `n * n ≤ 64`.
    pub fn from_code(n: usize, code: u64) -> Self {
        let mut r = Self::empty(n);
        for k in 0..n * n {
            if code >> k & 1 == 1 {
                r.insert(k / n, k % n);
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.contains(i, j)).map(move |j| (i, j)))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut r = self.clone();
        r.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        r
    }

    pub fn intersect(&self, other: &Relation) -> Relation {
        let mut r = self.clone();
        r.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a &= b);
        r
    }

    pub fn inverse(&self) -> Relation {
        let mut r = Self::empty(self.n);
        for (i, j) in self.pairs() {
            r.insert(j, i);
        }
        r
    }

    /// Relational composition `self ; other`: `(x, z)` with `x self y other z`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let mut r = Self::empty(self.n);
        for x in 0..self.n {
            for y in 0..self.n {
                if self.contains(x, y) {
                    let src = other.row(y).to_vec();
                    let dst = &mut r.bits[x * self.words..(x + 1) * self.words];
                    dst.iter_mut().zip(src).for_each(|(a, b)| *a |= b);
                }
            }
        }
        r
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// The first pair (row-major) of `self` missing from `other`.
    pub fn first_not_in(&self, other: &Relation) -> Option<(usize, usize)> {
        for (k, (a, b)) in self.bits.iter().zip(&other.bits).enumerate() {
            let d = a & !b;
            if d != 0 {
                let i = k / self.words;
                let j = (k % self.words) * 64 + d.trailing_zeros() as usize;
                return Some((i, j));
            }
        }
        None
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.inverse()
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }

    /// Pairs as process texts, sorted.
    pub fn to_text_pairs(&self, u: &Universe) -> Vec<(String, String)> {
        self.pairs().map(|(i, j)| (u.state(i).to_string(), u.state(j).to_string())).collect()
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// A relation rendered with process texts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TextRelation(pub Vec<(String, String)>);
