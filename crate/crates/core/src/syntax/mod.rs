//! Terms of the π-calculus: names, processes, binding and substitution.
//!
//! Processes are kept in alpha-canonical form: every binder (input object,
//! restriction) is renamed to a [`Name::Bound`] numbered in pre-order
//! traversal order. Free names are always [`Name::Free`], so free names and
//! binders never collide and substitution of free names cannot capture.

mod canon;
mod congruence;
mod enumerate;
mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use canon::alpha_canonical;
pub use congruence::{normal_form, struct_congruent};
pub use enumerate::{enumerate_terms, enumerate_terms_naive, Dialect};
pub use parse::{parse, parse_with_pool, ParseError};
pub use print::{print, print_with, PrintOptions};

/// A channel name.
///
/// `Bound` names only ever appear as binders (and their occurrences) in
/// canonical terms, or as internal placeholders inside the transition
/// machinery. User-visible names are `Free`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    Free(Arc<str>),
    Bound(u32),
}

impl Name {
    pub fn new(s: &str) -> Self {
        Name::Free(Arc::from(s))
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Name::Free(_))
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Name::Free(s) => Some(s),
            Name::Bound(_) => None,
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Free(s) => f.write_str(s),
            Name::Bound(i) => write!(f, "#{i}"),
        }
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Name::new(&s))
    }
}

/// Builds a pool of free names from string slices.
pub fn names(xs: &[&str]) -> Vec<Name> {
    xs.iter().map(|x| Name::new(x)).collect()
}

/// A π-calculus process.
///
/// `Sum` and `Rep` take guards only; see [`Process::is_guard`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Process {
    Nil,
    /// `a<b>.P`
    Out(Name, Name, Box<Process>),
    /// `a(x).P`: subject, binder, body.
    In(Name, Name, Box<Process>),
    Tau(Box<Process>),
    Sum(Box<Process>, Box<Process>),
    Par(Box<Process>, Box<Process>),
    /// `(νx)P`: binder, body.
    Res(Name, Box<Process>),
    Rep(Box<Process>),
}

impl Process {
    pub fn out(a: impl Into<Name>, b: impl Into<Name>, p: Process) -> Self {
        Process::Out(a.into(), b.into(), Box::new(p))
    }

    pub fn inp(a: impl Into<Name>, x: impl Into<Name>, p: Process) -> Self {
        Process::In(a.into(), x.into(), Box::new(p))
    }

    pub fn tau(p: Process) -> Self {
        Process::Tau(Box::new(p))
    }

    pub fn sum(g: Process, h: Process) -> Self {
        Process::Sum(Box::new(g), Box::new(h))
    }

    pub fn par(p: Process, q: Process) -> Self {
        Process::Par(Box::new(p), Box::new(q))
    }

    pub fn res(x: impl Into<Name>, p: Process) -> Self {
        Process::Res(x.into(), Box::new(p))
    }

    pub fn rep(g: Process) -> Self {
        Process::Rep(Box::new(g))
    }

    /// Guards are `0`, prefixes and sums of guards.
    pub fn is_guard(&self) -> bool {
        match self {
            Process::Nil | Process::Out(..) | Process::In(..) | Process::Tau(_) => true,
            Process::Sum(g, h) => g.is_guard() && h.is_guard(),
            Process::Par(..) | Process::Res(..) | Process::Rep(_) => false,
        }
    }

    /// Checks the grammar restriction that sums and replications only apply
    /// to guards, everywhere in the term.
    pub fn well_formed(&self) -> bool {
        match self {
            Process::Nil => true,
            Process::Out(_, _, p) | Process::In(_, _, p) | Process::Tau(p) | Process::Res(_, p) => p.well_formed(),
            Process::Sum(g, h) => g.is_guard() && h.is_guard() && g.well_formed() && h.well_formed(),
            Process::Par(p, q) => p.well_formed() && q.well_formed(),
            Process::Rep(g) => g.is_guard() && g.well_formed(),
        }
    }

    /// Number of constructors, `0` counting as one.
    pub fn size(&self) -> usize {
        match self {
            Process::Nil => 1,
            Process::Out(_, _, p) | Process::In(_, _, p) | Process::Tau(p) | Process::Res(_, p) => 1 + p.size(),
            Process::Rep(p) => 1 + p.size(),
            Process::Sum(p, q) | Process::Par(p, q) => 1 + p.size() + q.size(),
        }
    }

    /// Free names; input objects and restrictions bind.
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let note = |n: &Name, bound: &Vec<Name>, out: &mut BTreeSet<Name>| {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        };
        match self {
            Process::Nil => {}
            Process::Out(a, b, p) => {
                note(a, bound, out);
                note(b, bound, out);
                p.collect_free(bound, out);
            }
            Process::In(a, x, p) => {
                note(a, bound, out);
                bound.push(x.clone());
                p.collect_free(bound, out);
                bound.pop();
            }
            Process::Res(x, p) => {
                bound.push(x.clone());
                p.collect_free(bound, out);
                bound.pop();
            }
            Process::Tau(p) | Process::Rep(p) => p.collect_free(bound, out),
            Process::Sum(p, q) | Process::Par(p, q) => {
                p.collect_free(bound, out);
                q.collect_free(bound, out);
            }
        }
    }

    pub fn has_free(&self, n: &Name) -> bool {
        self.free_names().contains(n)
    }

    /// Largest `Bound` index occurring anywhere (free or binding).
    pub(crate) fn max_bound(&self) -> Option<u32> {
        let mut m: Option<u32> = None;
        self.visit_names(&mut |n| {
            if let Name::Bound(i) = n {
                m = Some(m.map_or(*i, |m| m.max(*i)));
            }
        });
        m
    }

    fn visit_names(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Process::Nil => {}
            Process::Out(a, b, p) | Process::In(a, b, p) => {
                f(a);
                f(b);
                p.visit_names(f);
            }
            Process::Res(x, p) => {
                f(x);
                p.visit_names(f);
            }
            Process::Tau(p) | Process::Rep(p) => p.visit_names(f),
            Process::Sum(p, q) | Process::Par(p, q) => {
                p.visit_names(f);
                q.visit_names(f);
            }
        }
    }

    /// Sum summands, flattening nested sums left to right.
    pub fn summands(&self) -> Vec<&Process> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Process, out: &mut Vec<&'a Process>) {
            match p {
                Process::Sum(g, h) => {
                    go(g, out);
                    go(h, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl Serialize for Process {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Process {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A finite name-to-name map, identity outside its domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<Name, Name>,
}

impl Substitution {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(from: impl Into<Name>, to: impl Into<Name>) -> Self {
        let mut s = Self::default();
        s.insert(from.into(), to.into());
        s
    }

    pub fn from_pairs<I: IntoIterator<Item = (Name, Name)>>(pairs: I) -> Self {
        let mut s = Self::default();
        for (a, b) in pairs {
            s.insert(a, b);
        }
        s
    }

    pub fn insert(&mut self, from: Name, to: Name) {
        if from == to {
            self.map.remove(&from);
        } else {
            self.map.insert(from, to);
        }
    }

    pub fn apply_name(&self, n: &Name) -> Name {
        self.map.get(n).cloned().unwrap_or_else(|| n.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.map.keys()
    }

    pub fn range(&self) -> impl Iterator<Item = &Name> {
        self.map.values()
    }

    /// All maps `pool → pool`, identity included, in a fixed order.
    pub fn all_over(pool: &[Name]) -> Vec<Substitution> {
        let k = pool.len();
        let total = k.checked_pow(k as u32).unwrap_or(usize::MAX);
        (0..total)
            .map(|mut code| {
                let mut s = Substitution::identity();
                for from in pool {
                    let to = &pool[code % k];
                    code /= k;
                    s.insert(from.clone(), to.clone());
                }
                s
            })
            .collect()
    }

    /// Whether applying the map twice equals applying it once.
    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|v| self.apply_name(v) == *v)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_str("}")
    }
}

/// Capture-avoiding simultaneous substitution on an arbitrary term.
///
/// Binders that would capture a name in the range of the map are renamed to
/// fresh `Bound` names first. The result is not canonicalized.
pub fn subst_raw(p: &Process, sigma: &BTreeMap<Name, Name>) -> Process {
    let mut next = p
        .max_bound()
        .into_iter()
        .chain(sigma.keys().chain(sigma.values()).filter_map(|n| match n {
            Name::Bound(i) => Some(*i),
            Name::Free(_) => None,
        }))
        .max()
        .map_or(0, |m| m + 1);
    subst_go(p, sigma, &mut next)
}

fn subst_go(p: &Process, sigma: &BTreeMap<Name, Name>, next: &mut u32) -> Process {
    let app = |n: &Name| sigma.get(n).cloned().unwrap_or_else(|| n.clone());
    match p {
        Process::Nil => Process::Nil,
        Process::Out(a, b, q) => Process::Out(app(a), app(b), Box::new(subst_go(q, sigma, next))),
        Process::Tau(q) => Process::Tau(Box::new(subst_go(q, sigma, next))),
        Process::Rep(q) => Process::Rep(Box::new(subst_go(q, sigma, next))),
        Process::Sum(q, r) => Process::Sum(Box::new(subst_go(q, sigma, next)), Box::new(subst_go(r, sigma, next))),
        Process::Par(q, r) => Process::Par(Box::new(subst_go(q, sigma, next)), Box::new(subst_go(r, sigma, next))),
        Process::In(a, x, q) => {
            let (x2, body) = under_binder(x, q, sigma, next);
            Process::In(app(a), x2, Box::new(body))
        }
        Process::Res(x, q) => {
            let (x2, body) = under_binder(x, q, sigma, next);
            Process::Res(x2, Box::new(body))
        }
    }
}

fn under_binder(x: &Name, body: &Process, sigma: &BTreeMap<Name, Name>, next: &mut u32) -> (Name, Process) {
    let mut inner = sigma.clone();
    inner.remove(x);
    if inner.is_empty() {
        return (x.clone(), body.clone());
    }
    let fv = body.free_names();
    let captures = inner.iter().any(|(k, v)| v == x && fv.contains(k));
    if captures {
        let fresh = Name::Bound(*next);
        *next += 1;
        inner.insert(x.clone(), fresh.clone());
        (fresh, subst_go(body, &inner, next))
    } else {
        (x.clone(), subst_go(body, &inner, next))
    }
}

/// Capture-avoiding substitution followed by alpha-canonicalization.
pub fn apply_subst(p: &Process, sigma: &Substitution) -> Process {
    if sigma.is_identity() {
        return alpha_canonical(p);
    }
    alpha_canonical(&subst_raw(p, &sigma.map))
}

/// Replaces free occurrences of `from` by `to` (capture-avoiding).
pub fn rename(p: &Process, from: &Name, to: &Name) -> Process {
    let mut m = BTreeMap::new();
    m.insert(from.clone(), to.clone());
    subst_raw(p, &m)
}
