//! The early labelled transition system.

mod commit;
mod universe;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{alpha_canonical, rename, Name, Process, Substitution};
use commit::{Commit, Commits};

pub use universe::{reachable_universe, reachable_universe_with_pool, Universe, UniverseDoc};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Tau,
    /// Free output `a<b>`.
    Out(Name, Name),
    /// Bound output of a fresh name.
    BOut(Name, Name),
    /// Early input: subject, received name.
    In(Name, Name),
}

impl Action {
    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    pub fn is_visible(&self) -> bool {
        !self.is_tau()
    }

    pub fn subject(&self) -> Option<&Name> {
        match self {
            Action::Tau => None,
            Action::Out(a, _) | Action::BOut(a, _) | Action::In(a, _) => Some(a),
        }
    }

    pub fn object(&self) -> Option<&Name> {
        match self {
            Action::Tau => None,
            Action::Out(_, b) | Action::BOut(_, b) | Action::In(_, b) => Some(b),
        }
    }

    pub fn bound_name(&self) -> Option<&Name> {
        match self {
            Action::BOut(_, b) => Some(b),
            _ => None,
        }
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.subject().into_iter().chain(self.object()).cloned().collect()
    }

    /// Free names: all names except a bound-output object.
    pub fn free_names(&self) -> BTreeSet<Name> {
        match self {
            Action::BOut(a, _) => [a.clone()].into_iter().collect(),
            other => other.names(),
        }
    }

    pub fn apply(&self, sigma: &Substitution) -> Action {
        let s = |n: &Name| sigma.apply_name(n);
        match self {
            Action::Tau => Action::Tau,
            Action::Out(a, b) => Action::Out(s(a), s(b)),
            Action::BOut(a, b) => Action::BOut(s(a), b.clone()),
            Action::In(a, b) => Action::In(s(a), s(b)),
        }
    }

    pub fn parse(s: &str) -> Option<Action> {
        let s = s.trim();
        if s == "tau" {
            return Some(Action::Tau);
        }
        let (subj, rest) = s.split_at(s.find(['<', '('])?);
        let subj = Name::new(subj.trim());
        if let Some(inner) = rest.strip_prefix("<^").and_then(|r| r.strip_suffix('>')) {
            return Some(Action::BOut(subj, Name::new(inner.trim())));
        }
        if let Some(inner) = rest.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            return Some(Action::Out(subj, Name::new(inner.trim())));
        }
        let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
        Some(Action::In(subj, Name::new(inner.trim())))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Out(a, b) => write!(f, "{a}<{b}>"),
            Action::BOut(a, b) => write!(f, "{a}<^{b}>"),
            Action::In(a, b) => write!(f, "{a}({b})"),
        }
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Action::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad action `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub source: Process,
    pub action: Action,
    pub target: Process,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationBudget {
    /// Transition steps explored from the seeds.
    pub depth: usize,
    /// Replication unfoldings per derivation.
    pub unfold: usize,
    /// Number of fresh names added to the pool.
    pub fresh: usize,
}

impl Default for ExplorationBudget {
    fn default() -> Self {
        ExplorationBudget { depth: 6, unfold: 2, fresh: 1 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtsError {
    #[error("name `{0}` is not in the pool")]
    OutsidePool(Name),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Step {
    pub transitions: Vec<Transition>,
    /// Set when the replication cap or the pool cut off some transition.
    pub truncated: bool,
}

/// `fns` plus `k` fresh names `f1, f2, …` not among `fns`.
pub fn make_pool(fns: &BTreeSet<Name>, k: usize) -> Vec<Name> {
    let mut pool: Vec<Name> = fns.iter().cloned().collect();
    let mut i = 1;
    let mut added = 0;
    while added < k {
        let n = Name::new(&format!("f{i}"));
        if !fns.contains(&n) {
            pool.push(n);
            added += 1;
        }
        i += 1;
    }
    pool
}

/// All transitions of `p`, inputs instantiated over `pool` and bound outputs
/// over the pool names the rules allow as the extruded name.
pub fn step(p: &Process, pool: &[Name], budget: &ExplorationBudget) -> Result<Step, LtsError> {
    let fns = p.free_names();
    if let Some(bad) = fns.iter().find(|n| !pool.contains(n)) {
        return Err(LtsError::OutsidePool(bad.clone()));
    }
    let mut cx = Commits::new(p);
    let commits = cx.of(p, budget.unfold);
    let mut truncated = cx.truncated;
    let mut out = BTreeSet::new();
    let mut emit = |action, target: Process| {
        out.insert(Transition { source: p.clone(), action, target: alpha_canonical(&target) });
    };
    for c in commits {
        match c {
            Commit::Tau(t) => emit(Action::Tau, t),
            Commit::Out(a, b, t) => emit(Action::Out(a, b), t),
            Commit::In(a, x, t) => {
                for c in pool {
                    emit(Action::In(a.clone(), c.clone()), rename(&t, &x, c));
                }
            }
            Commit::BOut(a, x, t, avoid) => {
                let unused: Vec<&Name> = pool.iter().filter(|n| !avoid.contains(n)).collect();
                if unused.is_empty() {
                    truncated = true;
                }
                for b in unused {
                    emit(Action::BOut(a.clone(), b.clone()), rename(&t, &x, b));
                }
            }
        }
    }
    Ok(Step { transitions: out.into_iter().collect(), truncated })
}
