//! Transitions with abstract objects.
//!
//! Inputs and bound outputs are computed once with a variable standing for
//! the received (resp. extruded) name; the early instantiation over the pool
//! happens in [`super::step`]. Variables are `Bound` names above every index
//! occurring in the source term, so they never clash with binders.

use std::collections::BTreeSet;

use crate::syntax::{rename, Name, Process};

#[derive(Clone, Debug)]
pub(crate) enum Commit {
    Tau(Process),
    Out(Name, Name, Process),
    /// Bound output: subject, variable for the extruded name, continuation,
    /// and the free names the extruded name must avoid (those of the
    /// restriction and of every parallel component around it).
    BOut(Name, Name, Process, BTreeSet<Name>),
    /// Input: subject, variable for the received name, continuation.
    In(Name, Name, Process),
}

pub(crate) struct Commits {
    next: u32,
    pub truncated: bool,
}

impl Commits {
    pub fn new(p: &Process) -> Self {
        Commits { next: p.max_bound().map_or(0, |m| m + 1).max(1 << 20), truncated: false }
    }

    fn fresh(&mut self) -> Name {
        let n = Name::Bound(self.next);
        self.next += 1;
        n
    }

    pub fn of(&mut self, p: &Process, unfold: usize) -> Vec<Commit> {
        match p {
            Process::Nil => vec![],
            Process::Out(a, b, q) => vec![Commit::Out(a.clone(), b.clone(), (**q).clone())],
            Process::In(a, x, q) => {
                let v = self.fresh();
                vec![Commit::In(a.clone(), v.clone(), rename(q, x, &v))]
            }
            Process::Tau(q) => vec![Commit::Tau((**q).clone())],
            Process::Sum(g, h) => {
                let mut out = self.of(g, unfold);
                out.extend(self.of(h, unfold));
                out
            }
            Process::Par(l, r) => self.par(l, r, unfold),
            Process::Res(x, q) => {
                let z = self.fresh();
                let body = rename(q, x, &z);
                let mut out = Vec::new();
                for c in self.of(&body, unfold) {
                    match c {
                        Commit::Tau(t) => out.push(Commit::Tau(Process::res(z.clone(), t))),
                        Commit::Out(a, _, _) | Commit::BOut(a, _, _, _) | Commit::In(a, _, _) if a == z => {}
                        // Open
                        Commit::Out(a, b, t) if b == z => out.push(Commit::BOut(a, z.clone(), t, p.free_names())),
                        Commit::Out(a, b, t) => out.push(Commit::Out(a, b, Process::res(z.clone(), t))),
                        Commit::BOut(a, y, t, avoid) => out.push(Commit::BOut(a, y, Process::res(z.clone(), t), avoid)),
                        Commit::In(a, y, t) => out.push(Commit::In(a, y, Process::res(z.clone(), t))),
                    }
                }
                out
            }
            Process::Rep(g) => {
                if unfold == 0 {
                    let mut probe = Commits { next: self.next, truncated: false };
                    if !probe.of(g, 0).is_empty() {
                        self.truncated = true;
                    }
                    return vec![];
                }
                // !G --μ--> G' whenever !G | G --μ--> G'
                self.par(p, g, unfold - 1)
            }
        }
    }

    fn par(&mut self, l: &Process, r: &Process, unfold: usize) -> Vec<Commit> {
        let left = self.of(l, unfold);
        let right = self.of(r, unfold);
        let mut out = Vec::new();
        let (fl, fr) = (l.free_names(), r.free_names());
        for c in &left {
            out.push(lift(c, &fr, |t| Process::par(t, r.clone())));
        }
        for c in &right {
            out.push(lift(c, &fl, |t| Process::par(l.clone(), t)));
        }
        for (cl, cr) in left.iter().flat_map(|x| right.iter().map(move |y| (x, y))) {
            if let Some(t) = sync(cl, cr, false) {
                out.push(Commit::Tau(t));
            }
            if let Some(t) = sync(cr, cl, true) {
                out.push(Commit::Tau(t));
            }
        }
        out
    }
}

fn lift(c: &Commit, sibling: &BTreeSet<Name>, wrap: impl Fn(Process) -> Process) -> Commit {
    match c {
        Commit::Tau(t) => Commit::Tau(wrap(t.clone())),
        Commit::Out(a, b, t) => Commit::Out(a.clone(), b.clone(), wrap(t.clone())),
        // Par: bn(μ) ∩ fn(Q) = ∅
        Commit::BOut(a, y, t, avoid) => {
            Commit::BOut(a.clone(), y.clone(), wrap(t.clone()), avoid.union(sibling).cloned().collect())
        }
        Commit::In(a, y, t) => Commit::In(a.clone(), y.clone(), wrap(t.clone())),
    }
}

/// Comm and Close with the input on `inp`. `flipped` says the input side is
/// the right component of the parallel composition.
fn sync(inp: &Commit, out: &Commit, flipped: bool) -> Option<Process> {
    let Commit::In(a, x, pi) = inp else { return None };
    let arrange = |i: Process, o: Process| if flipped { Process::par(o, i) } else { Process::par(i, o) };
    match out {
        Commit::Out(c, b, po) if c == a => Some(arrange(rename(pi, x, b), po.clone())),
        Commit::BOut(c, y, po, _) if c == a => Some(Process::res(y.clone(), arrange(rename(pi, x, y), po.clone()))),
        _ => None,
    }
}
