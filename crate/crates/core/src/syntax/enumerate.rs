//! Bounded enumeration of canonical terms.

use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{alpha_canonical, Name, Process};
use crate::subcalc::{is_async, type_check_ian};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dialect {
    Full,
    /// Outputs have continuation `0` and never occur as summands.
    Async,
    /// Typable with the empty environment under the immediately-available
    /// names discipline.
    IanTypable,
    /// Terms that are guards.
    GuardOnly,
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Dialect::Full),
            "async" => Ok(Dialect::Async),
            "ian" | "ian-typable" => Ok(Dialect::IanTypable),
            "guard" | "guard-only" => Ok(Dialect::GuardOnly),
            other => Err(format!("unknown dialect `{other}`")),
        }
    }
}

impl Dialect {
    pub fn admits(self, p: &Process) -> bool {
        match self {
            Dialect::Full => true,
            Dialect::Async => is_async(p),
            Dialect::IanTypable => type_check_ian(&BTreeSet::new(), p),
            Dialect::GuardOnly => p.is_guard(),
        }
    }
}

/// All canonical terms of `dialect` with size at most `budget` whose free
/// names are drawn from `pool`, sorted and without duplicates.
pub fn enumerate_terms(budget: usize, pool: &[Name], dialect: Dialect) -> Vec<Process> {
    let g = Gen { pool: pool.to_vec(), dialect };
    let mut out = BTreeSet::new();
    for s in 1..=budget {
        let terms = match dialect {
            Dialect::IanTypable => g.ian(s, 0, &[]),
            Dialect::GuardOnly => g.guard(s, 0, false),
            _ => g.proc(s, 0),
        };
        out.extend(terms.iter().map(alpha_canonical));
    }
    out.into_iter().collect()
}

struct Gen {
    pool: Vec<Name>,
    dialect: Dialect,
}

impl Gen {
    fn names(&self, depth: u32) -> Vec<Name> {
        let mut v = self.pool.clone();
        v.extend((0..depth).map(Name::Bound));
        v
    }

    fn proc(&self, s: usize, d: u32) -> Vec<Process> {
        let mut out = self.guard(s, d, false);
        if s >= 2 {
            for g in self.guard(s - 1, d, false) {
                out.push(Process::rep(g));
            }
            for p in self.proc(s - 1, d + 1) {
                out.push(Process::res(Name::Bound(d), p));
            }
        }
        if s >= 3 {
            for i in 1..s - 1 {
                let left = self.proc(i, d);
                let right = self.proc(s - 1 - i, d);
                for l in &left {
                    for r in &right {
                        out.push(Process::par(l.clone(), r.clone()));
                    }
                }
            }
        }
        out
    }

    /// Guards of exact size `s`; `no_output` forbids output summands.
    fn guard(&self, s: usize, d: u32, no_output: bool) -> Vec<Process> {
        let asynchronous = self.dialect == Dialect::Async;
        let mut out = Vec::new();
        if s == 1 {
            out.push(Process::Nil);
            return out;
        }
        let names = self.names(d);
        if !no_output && (!asynchronous || s == 2) {
            for body in self.proc(s - 1, d) {
                for a in &names {
                    for b in &names {
                        out.push(Process::out(a.clone(), b.clone(), body.clone()));
                    }
                }
            }
        }
        for body in self.proc(s - 1, d + 1) {
            for a in &names {
                out.push(Process::inp(a.clone(), Name::Bound(d), body.clone()));
            }
        }
        for body in self.proc(s - 1, d) {
            out.push(Process::tau(body));
        }
        if s >= 3 {
            let operand_no_output = no_output || asynchronous;
            for i in 1..s - 1 {
                let left = self.guard(i, d, operand_no_output);
                let right = self.guard(s - 1 - i, d, operand_no_output);
                for l in &left {
                    for r in &right {
                        out.push(Process::sum(l.clone(), r.clone()));
                    }
                }
            }
        }
        out
    }

    /// Terms typable under `gamma`, generated rule by rule.
    fn ian(&self, s: usize, d: u32, gamma: &[Name]) -> Vec<Process> {
        let mut out = self.ian_guard(s, d, gamma);
        if s >= 2 {
            for g in self.ian_guard(s - 1, d, gamma) {
                out.push(Process::rep(g));
            }
            let mut inner = gamma.to_vec();
            inner.push(Name::Bound(d));
            for p in self.ian(s - 1, d + 1, &inner) {
                out.push(Process::res(Name::Bound(d), p));
            }
        }
        if s >= 3 {
            for i in 1..s - 1 {
                let left = self.ian(i, d, gamma);
                let right = self.ian(s - 1 - i, d, gamma);
                for l in &left {
                    for r in &right {
                        out.push(Process::par(l.clone(), r.clone()));
                    }
                }
            }
        }
        out
    }

    fn ian_guard(&self, s: usize, d: u32, gamma: &[Name]) -> Vec<Process> {
        let mut out = Vec::new();
        if s == 1 {
            out.push(Process::Nil);
            return out;
        }
        let names = self.names(d);
        for body in self.ian(s - 1, d, &[]) {
            for a in &names {
                for b in &names {
                    out.push(Process::out(a.clone(), b.clone(), body.clone()));
                }
            }
            out.push(Process::tau(body));
        }
        for body in self.ian(s - 1, d + 1, &[]) {
            for a in gamma {
                out.push(Process::inp(a.clone(), Name::Bound(d), body.clone()));
            }
        }
        if s >= 3 {
            for i in 1..s - 1 {
                let left = self.ian_guard(i, d, &[]);
                let right = self.ian_guard(s - 1 - i, d, &[]);
                for l in &left {
                    for r in &right {
                        out.push(Process::sum(l.clone(), r.clone()));
                    }
                }
            }
        }
        out
    }
}

/// Independent enumeration: all unlabelled shapes first, then every name
/// labelling, then filtering by the dialect predicate.
pub fn enumerate_terms_naive(budget: usize, pool: &[Name], dialect: Dialect) -> Vec<Process> {
    let mut out = BTreeSet::new();
    for s in 1..=budget {
        for shape in shapes(s) {
            for t in label(&shape, pool, &mut Vec::new()) {
                if t.well_formed() && dialect.admits(&t) {
                    out.insert(alpha_canonical(&t));
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug)]
enum Shape {
    Nil,
    Out(Box<Shape>),
    In(Box<Shape>),
    Tau(Box<Shape>),
    Sum(Box<Shape>, Box<Shape>),
    Par(Box<Shape>, Box<Shape>),
    Res(Box<Shape>),
    Rep(Box<Shape>),
}

fn shapes(s: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    if s == 1 {
        out.push(Shape::Nil);
        return out;
    }
    for c in shapes(s - 1) {
        out.push(Shape::Out(Box::new(c.clone())));
        out.push(Shape::In(Box::new(c.clone())));
        out.push(Shape::Tau(Box::new(c.clone())));
        out.push(Shape::Res(Box::new(c.clone())));
        out.push(Shape::Rep(Box::new(c)));
    }
    for i in 1..s.saturating_sub(1) {
        for l in shapes(i) {
            for r in shapes(s - 1 - i) {
                out.push(Shape::Sum(Box::new(l.clone()), Box::new(r.clone())));
                out.push(Shape::Par(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

fn label(shape: &Shape, pool: &[Name], scope: &mut Vec<Name>) -> Vec<Process> {
    let visible: Vec<Name> = pool.iter().cloned().chain(scope.iter().cloned()).collect();
    let binder = Name::Bound(1000 + scope.len() as u32);
    match shape {
        Shape::Nil => vec![Process::Nil],
        Shape::Tau(c) => label(c, pool, scope).into_iter().map(Process::tau).collect(),
        Shape::Rep(c) => label(c, pool, scope).into_iter().map(Process::rep).collect(),
        Shape::Out(c) => {
            let bodies = label(c, pool, scope);
            let mut out = Vec::new();
            for a in &visible {
                for b in &visible {
                    for body in &bodies {
                        out.push(Process::out(a.clone(), b.clone(), body.clone()));
                    }
                }
            }
            out
        }
        Shape::In(c) => {
            scope.push(binder.clone());
            let bodies = label(c, pool, scope);
            scope.pop();
            let mut out = Vec::new();
            for a in &visible {
                for body in &bodies {
                    out.push(Process::inp(a.clone(), binder.clone(), body.clone()));
                }
            }
            out
        }
        Shape::Res(c) => {
            scope.push(binder.clone());
            let bodies = label(c, pool, scope);
            scope.pop();
            bodies.into_iter().map(|b| Process::res(binder.clone(), b)).collect()
        }
        Shape::Sum(l, r) | Shape::Par(l, r) => {
            let ls = label(l, pool, scope);
            let rs = label(r, pool, scope);
            let mut out = Vec::new();
            for x in &ls {
                for y in &rs {
                    out.push(match shape {
                        Shape::Sum(..) => Process::sum(x.clone(), y.clone()),
                        _ => Process::par(x.clone(), y.clone()),
                    });
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{names, parse};

    #[test]
    fn budget_one_is_nil() {
        assert_eq!(enumerate_terms(1, &names(&["a"]), Dialect::Full), vec![Process::Nil]);
        assert!(enumerate_terms(0, &names(&["a"]), Dialect::Full).is_empty());
    }

    #[test]
    fn async_budget_three() {
        let terms = enumerate_terms(3, &names(&["a"]), Dialect::Async);
        assert!(terms.contains(&parse("a<a>.0").unwrap()));
        for t in &terms {
            assert!(is_async(t), "{t}");
        }
        assert!(!terms.contains(&parse("a<a>.tau.0").unwrap()));
    }

    #[test]
    fn strategies_agree() {
        let pool = names(&["a", "b"]);
        for dialect in [Dialect::Full, Dialect::Async, Dialect::IanTypable, Dialect::GuardOnly] {
            for budget in 1..=4 {
                let direct = enumerate_terms(budget, &pool, dialect);
                let naive = enumerate_terms_naive(budget, &pool, dialect);
                assert_eq!(direct.len(), naive.len(), "{dialect:?} budget {budget}");
                assert_eq!(direct, naive);
            }
        }
    }

    #[test]
    fn no_duplicates_and_canonical() {
        let terms = enumerate_terms(4, &names(&["a"]), Dialect::Full);
        let set: BTreeSet<_> = terms.iter().collect();
        assert_eq!(set.len(), terms.len());
        assert!(terms.iter().all(|t| alpha_canonical(t) == *t));
    }
}
