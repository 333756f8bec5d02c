//! Structural congruence decided by normal forms.
//!
//! Axioms: `|` is associative and commutative with unit `0`; `+` likewise;
//! `(νa)0 ≡ 0`; `(νa)(νb)P ≡ (νb)(νa)P`; `(νa)(P|Q) ≡ P|(νa)Q` when
//! `a ∉ fn(P)`; closure under all contexts. Replication is not unfolded.
//!
//! The normal form pulls every restriction of a parallel level to the top,
//! drops unused ones, and groups the parallel components into connected
//! blocks of shared restricted names. Binder order inside a block is fixed by
//! trying every permutation and keeping the least term.

use std::collections::BTreeMap;

use super::{alpha_canonical, rename, Name, Process};

const PLACEHOLDER: u32 = 1 << 30;
const TEMP: u32 = 1 << 29;

fn level_binder(depth: u32, i: u32) -> Name {
    Name::Bound(PLACEHOLDER + depth * 32 + i)
}

fn input_binder(depth: u32) -> Name {
    Name::Bound(PLACEHOLDER + depth * 32 + 31)
}

/// Canonical representative of the ≡-class of `p`.
pub fn normal_form(p: &Process) -> Process {
    let mut tmp = TEMP;
    alpha_canonical(&nf_at(p, 0, &mut tmp))
}

pub fn struct_congruent(p: &Process, q: &Process) -> bool {
    p == q || normal_form(p) == normal_form(q)
}

fn nf_at(p: &Process, depth: u32, tmp: &mut u32) -> Process {
    let mut binders = Vec::new();
    let mut atoms = Vec::new();
    collect(p, tmp, &mut binders, &mut atoms);
    close(&binders, atoms, depth, tmp)
}

fn collect(p: &Process, tmp: &mut u32, binders: &mut Vec<Name>, atoms: &mut Vec<Process>) {
    match p {
        Process::Nil => {}
        Process::Par(q, r) => {
            collect(q, tmp, binders, atoms);
            collect(r, tmp, binders, atoms);
        }
        Process::Res(x, body) => {
            let t = Name::Bound(*tmp);
            *tmp += 1;
            binders.push(t.clone());
            collect(&rename(body, x, &t), tmp, binders, atoms);
        }
        other => atoms.push(other.clone()),
    }
}

fn norm_atom(p: &Process, depth: u32, tmp: &mut u32) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Out(a, b, q) => Process::Out(a.clone(), b.clone(), Box::new(nf_at(q, depth + 1, tmp))),
        Process::Tau(q) => Process::Tau(Box::new(nf_at(q, depth + 1, tmp))),
        Process::In(a, x, q) => {
            let y = input_binder(depth + 1);
            let body = rename(q, x, &y);
            Process::In(a.clone(), y, Box::new(nf_at(&body, depth + 1, tmp)))
        }
        Process::Sum(..) => {
            let mut parts: Vec<Process> =
                p.summands().into_iter().map(|g| norm_atom(g, depth, tmp)).filter(|g| *g != Process::Nil).collect();
            parts.sort();
            fold(parts, Process::sum)
        }
        Process::Rep(g) => Process::Rep(Box::new(norm_atom(g, depth, tmp))),
        // Non-guards only reach here through malformed input; normalize as a level.
        Process::Par(..) | Process::Res(..) => nf_at(p, depth, tmp),
    }
}

fn fold(mut parts: Vec<Process>, join: fn(Process, Process) -> Process) -> Process {
    match parts.len() {
        0 => Process::Nil,
        _ => {
            let mut acc = parts.pop().unwrap();
            while let Some(x) = parts.pop() {
                acc = join(x, acc);
            }
            acc
        }
    }
}

fn close(binders: &[Name], atoms: Vec<Process>, depth: u32, tmp: &mut u32) -> Process {
    let atoms: Vec<Process> = atoms.iter().map(|a| norm_atom(a, depth, tmp)).filter(|a| *a != Process::Nil).collect();
    let fns: Vec<_> = atoms.iter().map(|a| a.free_names()).collect();
    let used: Vec<&Name> = binders.iter().filter(|b| fns.iter().any(|f| f.contains(*b))).collect();

    // union-find over atoms connected by a shared restricted name
    let mut parent: Vec<usize> = (0..atoms.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for b in &used {
        let holders: Vec<usize> = (0..atoms.len()).filter(|&i| fns[i].contains(*b)).collect();
        for w in holders.windows(2) {
            let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[x] = y;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..atoms.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }

    let mut items = Vec::new();
    for members in groups.values() {
        let scope: Vec<Name> =
            used.iter().filter(|b| members.iter().any(|&i| fns[i].contains(**b))).map(|b| (*b).clone()).collect();
        if scope.is_empty() {
            items.extend(members.iter().map(|&i| atoms[i].clone()));
            continue;
        }
        let group_atoms: Vec<&Process> = members.iter().map(|&i| &atoms[i]).collect();
        let mut best: Option<Process> = None;
        for perm in permutations(scope.len()) {
            let mut renamed: Vec<Process> = group_atoms
                .iter()
                .map(|a| {
                    let mut a = (*a).clone();
                    for (slot, &src) in perm.iter().enumerate() {
                        a = rename(&a, &scope[src], &level_binder(depth, slot as u32));
                    }
                    norm_atom(&a, depth, tmp)
                })
                .collect();
            renamed.sort();
            let mut body = fold(renamed, Process::par);
            for slot in (0..scope.len()).rev() {
                body = Process::res(level_binder(depth, slot as u32), body);
            }
            if best.as_ref().is_none_or(|b| body < *b) {
                best = Some(body);
            }
        }
        items.push(best.expect("at least one permutation"));
    }
    items.sort();
    fold(items, Process::par)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn cong(a: &str, b: &str) -> bool {
        struct_congruent(&parse(a).unwrap(), &parse(b).unwrap())
    }

    #[test]
    fn axioms() {
        assert!(cong("a<b>.0 | 0", "a<b>.0"));
        assert!(cong("a<b>.0 | c<d>.0", "c<d>.0 | a<b>.0"));
        assert!(cong("(a<b> | c<d>) | e<f>", "a<b> | (c<d> | e<f>)"));
        assert!(cong("tau.0 + a<b>.0", "a<b>.0 + tau.0"));
        assert!(cong("tau.0 + 0", "tau.0"));
        assert!(cong("new a. 0", "0"));
        assert!(cong("new a. new b. a<b>.0", "new b. new a. a<b>.0"));
        assert!(cong("new b. (a<c>.0 | b<b>.0)", "a<c>.0 | new b. b<b>.0"));
        assert!(!cong("a<b>.0", "a<c>.0"));
        assert!(!cong("!tau.0", "!tau.0 | tau.0"));
    }

    #[test]
    fn congruence_under_prefix() {
        assert!(cong("tau.(a<b>.0 | 0)", "tau.a<b>.0"));
        assert!(cong("c(x).new a. (x<a>.0 | d<d>.0)", "c(y).(d<d>.0 | new b. y<b>.0)"));
    }

    #[test]
    fn restriction_not_extruded_over_free_occurrence() {
        assert!(!cong("new b. (b<c>.0 | a<b>.0)", "(new b. b<c>.0) | a<b>.0"));
    }

    #[test]
    fn block_binder_order_is_canonical() {
        assert!(cong("new a. new b. (a<b>.0 | b<a>.0 | a<a>.0)", "new b. new a. (a<b>.0 | b<a>.0 | b<b>.0)"));
        assert!(!cong("new a. new b. (a<b>.0 | a<a>.0)", "new a. new b. (a<b>.0 | b<b>.0)"));
    }
}
