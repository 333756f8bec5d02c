use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::syntax::{lstep, LProcess, Label};
use crate::relation::Relation;

/// Which transitions a bisimulation functional looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LFamily {
    All,
    A,
    B,
    /// Integer labels `m ≤ n`.
    UpTo(u32),
}

impl LFamily {
    pub fn admits(self, l: Label) -> bool {
        match (self, l) {
            (LFamily::All, _) | (LFamily::A, Label::A) | (LFamily::B, Label::B) => true,
            (LFamily::UpTo(n), Label::N(m)) => m <= n,
            _ => false,
        }
    }
}

impl fmt::Display for LFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LFamily::All => write!(f, "b"),
            LFamily::A => write!(f, "b_a"),
            LFamily::B => write!(f, "b_b"),
            LFamily::UpTo(n) => write!(f, "b_{n}"),
        }
    }
}

/// A finite set of lookahead terms closed under `lstep`.
#[derive(Clone, Debug)]
pub struct LUniverse {
    states: Vec<LProcess>,
    index: HashMap<LProcess, usize>,
    trans: Vec<Vec<(Label, usize)>>,
}

impl LUniverse {
    /// The reachable closure of `seeds`; states keep discovery order.
    pub fn reachable(seeds: &[LProcess]) -> LUniverse {
        let mut u = LUniverse { states: Vec::new(), index: HashMap::new(), trans: Vec::new() };
        let mut todo: Vec<LProcess> = seeds.to_vec();
        todo.reverse();
        let mut succ: Vec<Vec<(Label, LProcess)>> = Vec::new();
        while let Some(p) = todo.pop() {
            if u.index.contains_key(&p) {
                continue;
            }
            u.index.insert(p.clone(), u.states.len());
            let moves = lstep(&p);
            todo.extend(moves.iter().rev().map(|(_, q)| q.clone()));
            u.states.push(p);
            succ.push(moves);
        }
        u.trans = succ.into_iter().map(|m| m.into_iter().map(|(l, q)| (l, u.index[&q])).collect()).collect();
        u
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &LProcess {
        &self.states[i]
    }

    pub fn states(&self) -> &[LProcess] {
        &self.states
    }

    pub fn index_of(&self, p: &LProcess) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn moves(&self, i: usize) -> &[(Label, usize)] {
        &self.trans[i]
    }
}

fn answered(u: &LUniverse, r: &Relation, i: usize, j: usize, fam: LFamily, flip: bool) -> bool {
    u.moves(i).iter().filter(|(l, _)| fam.admits(*l)).all(|&(l, i2)| {
        u.moves(j).iter().any(|&(l2, j2)| l2 == l && if flip { r.contains(j2, i2) } else { r.contains(i2, j2) })
    })
}

/// `b_fam(R)`: pairs whose `fam`-moves are matched both ways into `R`.
pub fn l_bisim_fun(u: &LUniverse, r: &Relation, fam: LFamily) -> Relation {
    let n = u.len();
    let mut out = Relation::empty(n);
    for i in 0..n {
        for j in 0..n {
            if answered(u, r, i, j, fam, false) && answered(u, r, j, i, fam, true) {
                out.insert(i, j);
            }
        }
    }
    out
}

pub fn l_gfp(u: &LUniverse, fam: LFamily) -> Relation {
    let mut r = Relation::full(u.len());
    loop {
        let next = l_bisim_fun(u, &r, fam).intersect(&r);
        if next == r {
            return r;
        }
        r = next;
    }
}

/// Canonical forms for strong bisimilarity over all labels. The lookahead
/// LTS is finite and acyclic, so two terms are bisimilar exactly when
/// their hereditary sets of `(label, derivative)` coincide.
#[derive(Default, Debug)]
pub struct Canon {
    memo: HashMap<LProcess, u32>,
    table: HashMap<BTreeSet<(Label, u32)>, u32>,
}

impl Canon {
    pub fn new() -> Canon {
        Canon::default()
    }

    pub fn id(&mut self, p: &LProcess) -> u32 {
        if let Some(&c) = self.memo.get(p) {
            return c;
        }
        let set: BTreeSet<(Label, u32)> = lstep(p).iter().map(|(l, q)| (*l, self.id(q))).collect();
        let fresh = self.table.len() as u32;
        let c = *self.table.entry(set).or_insert(fresh);
        self.memo.insert(p.clone(), c);
        c
    }

    pub fn bisimilar(&mut self, p: &LProcess, q: &LProcess) -> bool {
        self.id(p) == self.id(q)
    }
}
