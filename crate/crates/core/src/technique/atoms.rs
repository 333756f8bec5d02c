//! The individual up-to techniques as maps on relations of a fixed universe.
//!
//! Each comprehension is evaluated inside the universe: a pair is produced
//! when both processes are states. Unary techniques are tabulated once per
//! universe by decomposing every pair of states; the forward generators in
//! this file enumerate what falls outside, for reporting and extension.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::exec;
use crate::lts::Universe;
use crate::relation::Relation;
use crate::syntax::{alpha_canonical, apply_subst, rename, Name, Process, Substitution};

pub(crate) type Pair = (Process, Process);

fn lookup(u: &Universe, p: &Process) -> Option<usize> {
    u.index_of(&alpha_canonical(p))
}

/// Opens the body of a binder with the concrete name `c`, when that does not
/// capture anything. Vacuous binders open to the body itself.
fn open(x: &Name, body: &Process, c: &Name) -> Option<Process> {
    if !body.has_free(x) {
        return Some(body.clone());
    }
    if body.has_free(c) {
        return None;
    }
    Some(rename(body, x, c))
}

/// Inner pairs `(P, Q)` such that `(s, t)` is `(op P, op Q)` for the prefix
/// or replication operator `op` given by `kind`.
fn prefix_witnesses(kind: Unary, s: &Process, t: &Process, pool: &[Name]) -> Vec<Pair> {
    match (kind, s, t) {
        (Unary::Tau, Process::Tau(p), Process::Tau(q)) => vec![((**p).clone(), (**q).clone())],
        (Unary::Rep, Process::Rep(p), Process::Rep(q)) => vec![((**p).clone(), (**q).clone())],
        (Unary::Out, Process::Out(a, b, p), Process::Out(c, d, q)) if a == c && b == d => {
            vec![((**p).clone(), (**q).clone())]
        }
        (Unary::Inp, Process::In(a, x, p), Process::In(c, y, q)) if a == c => opened(x, p, y, q, pool),
        (Unary::Res, _, _) => {
            let mut out = vec![(s.clone(), t.clone())];
            if let (Process::Res(x, p), Process::Res(y, q)) = (s, t) {
                for (p2, q2) in opened(x, p, y, q, pool) {
                    out.extend(prefix_witnesses(Unary::Res, &p2, &q2, pool));
                }
            }
            out
        }
        _ => vec![],
    }
}

/// Both bodies opened with a common name.
fn opened(x: &Name, p: &Process, y: &Name, q: &Process, pool: &[Name]) -> Vec<Pair> {
    if !p.has_free(x) && !q.has_free(y) {
        return vec![(p.clone(), q.clone())];
    }
    pool.iter().filter_map(|c| Some((open(x, p, c)?, open(y, q, c)?))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Unary {
    Tau,
    Out,
    Inp,
    Rep,
    Res,
    Sub,
}

/// For each input pair code `i * n + j`, the output pairs inside the universe.
pub(crate) struct Table {
    n: usize,
    fwd: Vec<Vec<(u32, u32)>>,
}

impl Table {
    pub fn apply(&self, r: &Relation) -> Relation {
        let mut out = Relation::empty(self.n);
        for (i, j) in r.pairs() {
            for &(s, t) in &self.fwd[i * self.n + j] {
                out.insert(s as usize, t as usize);
            }
        }
        out
    }
}

pub(crate) fn unary_table(u: &Universe, kind: Unary) -> Table {
    let n = u.len();
    let mut fwd = vec![Vec::new(); n * n];
    if kind == Unary::Sub {
        let sigmas = Substitution::all_over(u.pool());
        let images: Vec<Vec<Option<u32>>> = exec::map_range(n, |i| {
            sigmas.iter().map(|s| u.index_of(&apply_subst(u.state(i), s)).map(|k| k as u32)).collect()
        });
        let rows = exec::map_range(n * n, |code| {
            let (i, j) = (code / n, code % n);
            let mut v: Vec<(u32, u32)> =
                (0..sigmas.len()).filter_map(|k| Some((images[i][k]?, images[j][k]?))).collect();
            v.sort_unstable();
            v.dedup();
            v
        });
        return Table { n, fwd: rows };
    }
    let pool = u.pool();
    let per_pair = exec::map_range(n * n, |code| {
        let (s, t) = (code / n, code % n);
        let mut inner: Vec<usize> = prefix_witnesses(kind, u.state(s), u.state(t), pool)
            .into_iter()
            .filter_map(|(p, q)| Some(lookup(u, &p)? * n + lookup(u, &q)?))
            .collect();
        inner.sort_unstable();
        inner.dedup();
        inner
    });
    for (code, inner) in per_pair.into_iter().enumerate() {
        for w in inner {
            fwd[w].push(((code / n) as u32, (code % n) as u32));
        }
    }
    Table { n, fwd }
}

/// `pcomp` and `sum`: the states that split into two states.
pub(crate) struct Binary {
    n: usize,
    parts: Vec<(u32, u32, u32)>,
}

impl Binary {
    pub fn new(u: &Universe, sum: bool) -> Binary {
        let parts = (0..u.len())
            .filter_map(|s| {
                let (l, r) = match (sum, u.state(s)) {
                    (false, Process::Par(l, r)) | (true, Process::Sum(l, r)) => (l, r),
                    _ => return None,
                };
                Some((s as u32, lookup(u, l)? as u32, lookup(u, r)? as u32))
            })
            .collect();
        Binary { n: u.len(), parts }
    }

    pub fn apply(&self, r: &Relation) -> Relation {
        let mut out = Relation::empty(self.n);
        for &(s, ls, rs) in &self.parts {
            for &(t, lt, rt) in &self.parts {
                if r.contains(ls as usize, lt as usize) && r.contains(rs as usize, rt as usize) {
                    out.insert(s as usize, t as usize);
                }
            }
        }
        out
    }
}

/// One summand position of `sum_g`: satisfied by `refl`, or by one of the
/// listed pair codes being in the relation.
#[derive(Clone, Debug)]
enum Cond {
    Always,
    AnyOf(Vec<usize>),
}

pub(crate) struct GuardedSum {
    n: usize,
    cands: Vec<(u32, u32, Vec<Cond>)>,
}

fn guards(p: &Process) -> Option<Vec<&Process>> {
    match p {
        Process::Nil => Some(vec![]),
        Process::Sum(..) | Process::Tau(_) | Process::Out(..) | Process::In(..) => {
            let gs = p.summands();
            gs.iter().all(|g| matches!(g, Process::Tau(_) | Process::Out(..) | Process::In(..))).then_some(gs)
        }
        _ => None,
    }
}

impl GuardedSum {
    pub fn new(u: &Universe) -> GuardedSum {
        let n = u.len();
        let pool = u.pool();
        let cands = exec::map_range(n * n, |code| {
            let (s, t) = (code / n, code % n);
            let (gs, hs) = (guards(u.state(s))?, guards(u.state(t))?);
            if gs.len() != hs.len() {
                return None;
            }
            let mut conds = Vec::new();
            for (g, h) in gs.iter().zip(&hs) {
                if alpha_canonical(g) == alpha_canonical(h) {
                    conds.push(Cond::Always);
                    continue;
                }
                let mut any: Vec<usize> = [Unary::Tau, Unary::Out, Unary::Inp]
                    .into_iter()
                    .flat_map(|k| prefix_witnesses(k, g, h, pool))
                    .filter_map(|(p, q)| Some(lookup(u, &p)? * n + lookup(u, &q)?))
                    .collect();
                if any.is_empty() {
                    return None;
                }
                any.sort_unstable();
                any.dedup();
                conds.push(Cond::AnyOf(any));
            }
            Some((s as u32, t as u32, conds))
        });
        GuardedSum { n, cands: cands.into_iter().flatten().collect() }
    }

    pub fn apply(&self, r: &Relation) -> Relation {
        let n = self.n;
        let mut out = Relation::empty(n);
        for (s, t, conds) in &self.cands {
            let ok = conds.iter().all(|c| match c {
                Cond::Always => true,
                Cond::AnyOf(v) => v.iter().any(|&w| r.contains(w / n, w % n)),
            });
            if ok {
                out.insert(*s as usize, *t as usize);
            }
        }
        out
    }
}

/// Processes produced by a unary technique from `(p, q)` that are not states
/// of `u`. Restriction and input vectors are bounded to one binder over the
/// free names involved (plus the pool for input objects).
pub(crate) fn unary_escapes(u: &Universe, kind: Unary, p: &Process, q: &Process) -> Vec<Pair> {
    let pool = u.pool();
    let mut gen: Vec<Pair> = Vec::new();
    match kind {
        Unary::Tau => gen.push((Process::tau(p.clone()), Process::tau(q.clone()))),
        Unary::Rep => {
            if p.is_guard() && q.is_guard() {
                gen.push((Process::rep(p.clone()), Process::rep(q.clone())));
            }
        }
        Unary::Out => {
            for a in pool {
                for b in pool {
                    gen.push((
                        Process::out(a.clone(), b.clone(), p.clone()),
                        Process::out(a.clone(), b.clone(), q.clone()),
                    ));
                }
            }
        }
        Unary::Inp => {
            for a in pool {
                for b in pool {
                    gen.push((
                        Process::inp(a.clone(), b.clone(), p.clone()),
                        Process::inp(a.clone(), b.clone(), q.clone()),
                    ));
                }
            }
        }
        Unary::Res => {
            let names: BTreeSet<Name> = p.free_names().union(&q.free_names()).cloned().collect();
            for a in names {
                gen.push((Process::res(a.clone(), p.clone()), Process::res(a, q.clone())));
            }
        }
        Unary::Sub => {
            for s in Substitution::all_over(pool) {
                gen.push((apply_subst(p, &s), apply_subst(q, &s)));
            }
        }
    }
    escaped(u, gen)
}

pub(crate) fn binary_escapes(u: &Universe, sum: bool, r: &Relation) -> Vec<Pair> {
    let pairs: Vec<(usize, usize)> = r.pairs().collect();
    let mut gen = Vec::new();
    for &(i, j) in &pairs {
        for &(k, l) in &pairs {
            let (p, q, p2, q2) = (u.state(i), u.state(j), u.state(k), u.state(l));
            if sum {
                if p.is_guard() && q.is_guard() && p2.is_guard() && q2.is_guard() {
                    gen.push((Process::sum(p.clone(), p2.clone()), Process::sum(q.clone(), q2.clone())));
                }
            } else {
                gen.push((Process::par(p.clone(), p2.clone()), Process::par(q.clone(), q2.clone())));
            }
        }
    }
    escaped(u, gen)
}

fn escaped(u: &Universe, gen: Vec<Pair>) -> Vec<Pair> {
    gen.into_iter()
        .map(|(p, q)| (alpha_canonical(&p), alpha_canonical(&q)))
        .filter(|(p, q)| u.index_of(p).is_none() || u.index_of(q).is_none())
        .collect()
}

/// `S R S⁻¹`.
pub(crate) fn conjugate(s: &Arc<Relation>, r: &Relation) -> Relation {
    s.compose(r).compose(&s.inverse())
}
