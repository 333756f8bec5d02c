//! Compatibility claims for the lookahead operators.
//!
//! A claim reads `op ∘ G ⊆ H ∘ (id ∪ op)` where `G`, `H` are built from the
//! label-filtered functionals. It is decided for *all* relations at once on
//! a given pair: `(P, Q) ∈ G(R)` is a monotone formula in the membership
//! atoms of `R`, so the claim holds at `(P, Q)` iff the right-hand side
//! holds under each minimal satisfying relation.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bisim::{l_bisim_fun, LFamily, LUniverse};
use super::syntax::{enumerate, lstep, LProcess, Label, OpKind};
use crate::exec;
use crate::relation::{Relation, Suite};

/// A functional built from `b_fam` steps, intersections and the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GExpr {
    Id,
    Step(LFamily, Box<GExpr>),
    Meet(Vec<GExpr>),
}

impl GExpr {
    /// `b_{f1} ∘ b_{f2} ∘ … ∘ id`
    pub fn chain(fams: &[LFamily]) -> GExpr {
        fams.iter().rev().fold(GExpr::Id, |g, &f| GExpr::Step(f, Box::new(g)))
    }

    pub fn meet(gs: Vec<GExpr>) -> GExpr {
        GExpr::Meet(gs)
    }

    /// Membership of `(p, q)` in `self(R)` where `R` is given by `mem`.
    pub fn holds(&self, p: &LProcess, q: &LProcess, mem: &dyn Fn(&LProcess, &LProcess) -> bool) -> bool {
        match self {
            GExpr::Id => mem(p, q),
            GExpr::Meet(gs) => gs.iter().all(|g| g.holds(p, q, mem)),
            GExpr::Step(fam, inner) => {
                let (mp, mq) = (lstep(p), lstep(q));
                let half = |xs: &[(Label, LProcess)], ys: &[(Label, LProcess)], flip: bool| {
                    xs.iter().filter(|(l, _)| fam.admits(*l)).all(|(l, x)| {
                        ys.iter().any(|(l2, y)| {
                            l2 == l && if flip { inner.holds(y, x, mem) } else { inner.holds(x, y, mem) }
                        })
                    })
                };
                half(&mp, &mq, false) && half(&mq, &mp, true)
            }
        }
    }

    pub fn apply(&self, u: &LUniverse, r: &Relation) -> Relation {
        match self {
            GExpr::Id => r.clone(),
            GExpr::Step(fam, inner) => l_bisim_fun(u, &inner.apply(u, r), *fam),
            GExpr::Meet(gs) => {
                let mut it = gs.iter().map(|g| g.apply(u, r));
                let first = it.next().unwrap_or_else(|| Relation::full(u.len()));
                it.fold(first, |a, b| a.intersect(&b))
            }
        }
    }
}

impl fmt::Display for GExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GExpr::Id => write!(f, "id"),
            GExpr::Step(fam, inner) => {
                write!(f, "{fam}")?;
                let mut g = inner.as_ref();
                while let GExpr::Step(fam, next) = g {
                    write!(f, "∘{fam}")?;
                    g = next;
                }
                match g {
                    GExpr::Id => Ok(()),
                    other => write!(f, "∘{other}"),
                }
            }
            GExpr::Meet(gs) => {
                write!(f, "(")?;
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ∩ ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

type Clause = Vec<u32>;

/// Minimal satisfying sets of a monotone formula over interned pairs.
struct Dnf<'a> {
    atoms: &'a mut HashMap<(LProcess, LProcess), u32>,
    cap: usize,
    overflow: bool,
}

impl Dnf<'_> {
    fn atom(&mut self, p: &LProcess, q: &LProcess) -> Vec<Clause> {
        let next = self.atoms.len() as u32;
        let id = *self.atoms.entry((p.clone(), q.clone())).or_insert(next);
        vec![vec![id]]
    }

    fn minimize(&mut self, mut cs: Vec<Clause>) -> Vec<Clause> {
        cs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        cs.dedup();
        let mut kept: Vec<Clause> = Vec::new();
        for c in cs {
            if !kept.iter().any(|k| k.iter().all(|x| c.binary_search(x).is_ok())) {
                kept.push(c);
            }
        }
        if kept.len() > self.cap {
            self.overflow = true;
            kept.truncate(self.cap);
        }
        kept
    }

    fn and(&mut self, a: Vec<Clause>, b: Vec<Clause>) -> Vec<Clause> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in &a {
            for y in &b {
                let mut c: Clause = x.iter().chain(y).copied().collect();
                c.sort_unstable();
                c.dedup();
                out.push(c);
            }
        }
        self.minimize(out)
    }

    fn build(&mut self, g: &GExpr, p: &LProcess, q: &LProcess) -> Vec<Clause> {
        match g {
            GExpr::Id => self.atom(p, q),
            GExpr::Meet(gs) => {
                let mut acc = vec![Vec::new()];
                for g in gs {
                    let d = self.build(g, p, q);
                    acc = self.and(acc, d);
                }
                acc
            }
            GExpr::Step(fam, inner) => {
                let (mp, mq) = (lstep(p), lstep(q));
                let mut acc = vec![Vec::new()];
                for (xs, ys, flip) in [(&mp, &mq, false), (&mq, &mp, true)] {
                    for (l, x) in xs.iter().filter(|(l, _)| fam.admits(*l)) {
                        let mut alts = Vec::new();
                        for (_, y) in ys.iter().filter(|(l2, _)| l2 == l) {
                            alts.extend(if flip { self.build(inner, y, x) } else { self.build(inner, x, y) });
                        }
                        let alts = self.minimize(alts);
                        acc = self.and(acc, alts);
                        if acc.is_empty() {
                            return acc;
                        }
                    }
                }
                acc
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LCounterexample {
    pub pair: (String, String),
    /// A minimal relation `R` with the pair in the left-hand side only.
    pub relation: Vec<(String, String)>,
    /// Which part of `id ∪ op` produced the pair.
    pub via: String,
}

/// `op ∘ lhs ⊆ rhs ∘ (id ∪ op)`.
#[derive(Clone, Debug)]
pub struct LClaim {
    pub op: OpKind,
    pub lhs: GExpr,
    pub rhs: GExpr,
}

#[derive(Clone, Debug, Default)]
struct PairOutcome {
    implicants: usize,
    overflow: bool,
    counterexample: Option<LCounterexample>,
}

impl LClaim {
    pub fn new(op: OpKind, lhs: GExpr, rhs: GExpr) -> LClaim {
        LClaim { op, lhs, rhs }
    }

    /// Membership in `(id ∪ op)(R)`.
    fn f_mem<'a>(&'a self, r: &'a dyn Fn(&LProcess, &LProcess) -> bool) -> impl Fn(&LProcess, &LProcess) -> bool + 'a {
        move |x, y| {
            r(x, y)
                || match (x.as_op(self.op), y.as_op(self.op)) {
                    (Some(x0), Some(y0)) => r(x0, y0),
                    _ => false,
                }
        }
    }

    fn check_pair(&self, p: &LProcess, q: &LProcess, cap: usize) -> PairOutcome {
        let mut atoms = HashMap::new();
        let mut d = Dnf { atoms: &mut atoms, cap, overflow: false };
        let clauses = d.build(&self.lhs, p, q);
        let overflow = d.overflow;
        let mut names: Vec<(LProcess, LProcess)> = vec![(LProcess::Nil, LProcess::Nil); atoms.len()];
        for (k, v) in atoms {
            names[v as usize] = k;
        }
        let (op_p, op_q) = (LProcess::op(self.op, p.clone()), LProcess::op(self.op, q.clone()));
        for c in &clauses {
            let rel: Vec<&(LProcess, LProcess)> = c.iter().map(|&i| &names[i as usize]).collect();
            let r = |x: &LProcess, y: &LProcess| rel.iter().any(|(a, b)| a == x && b == y);
            let fm = self.f_mem(&r);
            for (via, x, y) in [("id", p, q), (self.op.name(), &op_p, &op_q)] {
                if !self.rhs.holds(x, y, &fm) {
                    return PairOutcome {
                        implicants: clauses.len(),
                        overflow,
                        counterexample: Some(LCounterexample {
                            pair: (x.to_string(), y.to_string()),
                            relation: rel.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                            via: via.to_string(),
                        }),
                    };
                }
            }
        }
        PairOutcome { implicants: clauses.len(), overflow, counterexample: None }
    }

    /// Every ordered pair of `terms`; the counterexample reported is the
    /// first in pair order.
    pub fn check_terms(&self, terms: &[LProcess], cap: usize) -> (usize, usize, usize, Option<LCounterexample>) {
        let n = terms.len();
        let outcomes = exec::map_range(n * n, |k| self.check_pair(&terms[k / n], &terms[k % n], cap));
        let implicants = outcomes.iter().map(|o| o.implicants).sum();
        let overflow = outcomes.iter().filter(|o| o.overflow).count();
        let cx = outcomes.into_iter().find_map(|o| o.counterexample);
        (n * n, implicants, overflow, cx)
    }

    /// `(id ∪ op)(R)` on a finite universe; images outside it are dropped.
    pub fn f_apply(&self, u: &LUniverse, r: &Relation) -> Relation {
        let mut out = r.clone();
        for i in 0..u.len() {
            let Some(x) = u.state(i).as_op(self.op) else { continue };
            for j in 0..u.len() {
                let Some(y) = u.state(j).as_op(self.op) else { continue };
                if let (Some(a), Some(b)) = (u.index_of(x), u.index_of(y)) {
                    if r.contains(a, b) {
                        out.insert(i, j);
                    }
                }
            }
        }
        out
    }

    /// The claim on one finite universe, relation by relation.
    pub fn check_universe(&self, u: &LUniverse, suite: &Suite) -> Option<(Relation, (usize, usize))> {
        exec::find_first_range(suite.len(), |k| {
            let r = suite.get(k);
            let lhs = self.f_apply(u, &self.lhs.apply(u, &r));
            let rhs = self.rhs.apply(u, &self.f_apply(u, &r));
            lhs.first_not_in(&rhs).map(|pair| (r, pair))
        })
    }
}

impl fmt::Display for LClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ∘ {} ⊆ {} ∘ (id ∪ {})", self.op.name(), self.lhs, self.rhs, self.op.name())
    }
}

/// A seeded suite on a lookahead universe: every relation up to four
/// states, otherwise ∅, ⊤, the identity, singletons and random relations.
pub fn l_suite(u: &LUniverse, seed: u64, samples: usize) -> Suite {
    let n = u.len();
    if n <= crate::relation::EXHAUSTIVE_MAX {
        return Suite::exhaustive(n);
    }
    let mut rels = vec![Relation::empty(n), Relation::full(n), Relation::identity(n)];
    for i in 0..n {
        for j in 0..n {
            rels.push(Relation::from_pairs(n, [(i, j)]));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        let d = [0.1, 0.3, 0.6, 0.9][k % 4];
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
    Suite::from_relations(n, rels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ClaimStatus {
    /// Stated and argued for in the source development.
    Claimed,
    /// Stated without argument; we only gather finite evidence.
    ConjectureTest,
    /// A contrast experiment with no asserted outcome.
    Experiment,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LClaimReport {
    pub op: OpKind,
    pub claim: String,
    pub status: ClaimStatus,
    /// The outcome the development predicts, when it predicts one.
    pub expected: Option<bool>,
    pub holds: bool,
    pub max_size: usize,
    pub terms: usize,
    pub pairs: usize,
    pub implicants: usize,
    /// Pairs whose implicant set hit the cap (their check is partial).
    pub truncated_pairs: usize,
    pub counterexample: Option<LCounterexample>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AppendixLimits {
    pub max_size: usize,
    /// Largest integer prefix in enumerated terms.
    pub max_label: u32,
    /// Cap on minimal relations per pair.
    pub implicant_cap: usize,
}

impl Default for AppendixLimits {
    fn default() -> Self {
        AppendixLimits { max_size: 5, max_label: 3, implicant_cap: 4096 }
    }
}

pub fn alphabet(op: OpKind, max_label: u32) -> Vec<Label> {
    match op {
        OpKind::Op => vec![Label::A],
        OpKind::Op1 | OpKind::Op2 | OpKind::Op2Mu => vec![Label::A, Label::B],
        OpKind::Op3 | OpKind::Op4 | OpKind::Op5 => (1..=max_label).map(Label::N).collect(),
    }
}

/// The claims attached to `op`, with their status.
pub fn appendix_claims(op: OpKind, max_label: u32) -> Vec<(LClaim, ClaimStatus, Option<bool>)> {
    use LFamily::*;
    let step = |f| GExpr::chain(&[f]);
    let c = |l, r| LClaim::new(op, l, r);
    match op {
        OpKind::Op => vec![
            (c(step(A), step(A)), ClaimStatus::Experiment, Some(false)),
            (c(GExpr::meet(vec![GExpr::chain(&[A, A]), step(A)]), step(A)), ClaimStatus::Experiment, None),
        ],
        OpKind::Op1 => vec![
            (c(step(B), step(B)), ClaimStatus::Claimed, Some(true)),
            (c(GExpr::meet(vec![GExpr::chain(&[B, B]), step(A)]), step(A)), ClaimStatus::Claimed, Some(true)),
        ],
        OpKind::Op2 => vec![
            (c(step(B), step(B)), ClaimStatus::Claimed, Some(true)),
            (c(GExpr::meet(vec![GExpr::chain(&[A, B]), step(A)]), step(A)), ClaimStatus::Claimed, Some(true)),
        ],
        OpKind::Op2Mu => vec![
            (c(step(B), step(B)), ClaimStatus::Claimed, Some(true)),
            (c(GExpr::meet(vec![GExpr::chain(&[All, B]), step(All)]), step(All)), ClaimStatus::Claimed, Some(true)),
        ],
        OpKind::Op3 | OpKind::Op4 | OpKind::Op5 => {
            let mut v = vec![(c(step(UpTo(1)), step(UpTo(1))), ClaimStatus::ConjectureTest, None)];
            for n in 1..max_label {
                let first = if op == OpKind::Op5 { UpTo(n + 1) } else { UpTo(n) };
                let lhs = GExpr::meet(vec![GExpr::chain(&[first, UpTo(n)]), step(UpTo(n + 1))]);
                v.push((c(lhs, step(UpTo(n + 1))), ClaimStatus::ConjectureTest, None));
            }
            // the open question: plain compatibility with the full functional
            v.push((c(step(All), step(All)), ClaimStatus::Experiment, None));
            v
        }
    }
}

/// Decides every claim attached to `op` on all pairs of terms up to
/// `limits.max_size` over the operator's alphabet, nesting `op` itself.
pub fn check_appendix_claims(op: OpKind, limits: &AppendixLimits) -> Vec<LClaimReport> {
    let terms = enumerate(limits.max_size, &alphabet(op, limits.max_label), &[op]);
    appendix_claims(op, limits.max_label)
        .into_iter()
        .map(|(claim, status, expected)| {
            let (pairs, implicants, truncated_pairs, counterexample) = claim.check_terms(&terms, limits.implicant_cap);
            LClaimReport {
                op,
                claim: claim.to_string(),
                status,
                expected,
                holds: counterexample.is_none(),
                max_size: limits.max_size,
                terms: terms.len(),
                pairs,
                implicants,
                truncated_pairs,
                counterexample,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainReport {
    pub op: OpKind,
    pub states: usize,
    /// `b_1 ⊇ b_2 ⊇ …` on every relation of the suite.
    pub decreasing: bool,
    /// Each per-level premise with its finite verdict.
    pub premises: Vec<(String, bool)>,
    /// Relations `R ⊆ b_top((id ∪ op)(R))` found in the suite.
    pub progressions: usize,
    /// Whether all of those lie in the greatest fixpoint of `b_top`.
    pub sound: bool,
}

/// The chain `b_1 ⊇ … ⊇ b_top` with exponents 2 on a finite universe: the
/// premises of the chained soundness theorem for `id ∪ op`, and the
/// conclusion checked directly on every progressing relation of the suite.
pub fn chain_on_universe(op: OpKind, top: u32, u: &LUniverse, suite: &Suite) -> ChainReport {
    let claims: Vec<LClaim> = appendix_claims(op, top)
        .into_iter()
        .filter(|(_, s, _)| *s != ClaimStatus::Experiment)
        .map(|(c, _, _)| c)
        .collect();
    let premises = claims.iter().map(|c| (c.to_string(), c.check_universe(u, suite).is_none())).collect();
    let decreasing = (1..top).all(|n| {
        suite.iter().all(|r| l_bisim_fun(u, &r, LFamily::UpTo(n + 1)).is_subset(&l_bisim_fun(u, &r, LFamily::UpTo(n))))
    });
    let f = LClaim::new(op, GExpr::Id, GExpr::Id);
    let gfp = super::bisim::l_gfp(u, LFamily::UpTo(top));
    let progressing: Vec<Relation> =
        suite.iter().filter(|r| r.is_subset(&l_bisim_fun(u, &f.f_apply(u, r), LFamily::UpTo(top)))).collect();
    let sound = progressing.iter().all(|r| r.is_subset(&gfp));
    ChainReport { op, states: u.len(), decreasing, premises, progressions: progressing.len(), sound }
}
