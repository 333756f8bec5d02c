//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use piupto::lts::Action;
use piupto::syntax::{alpha_canonical, rename, Name, Process};

/// Transitions of `p` by direct application of one SOS rule at a time, with
/// concrete names throughout. Restricted names are replaced by private
/// concrete names; Close uses a private concrete name too. Labels are then
/// filtered to the pool. Replication truncation is not reported.
pub fn oracle_step(p: &Process, pool: &[Name], unfold: usize) -> BTreeSet<(Action, Process)> {
    let mut names: Vec<Name> = pool.to_vec();
    names.push(Name::new("close#"));
    let raw = derive(p, &names, unfold, 0, &mut false);
    let in_pool = |n: &Name| pool.contains(n);
    raw.into_iter().filter(|(a, _)| a.names().iter().all(in_pool)).map(|(a, t)| (a, alpha_canonical(&t))).collect()
}

fn derive(p: &Process, names: &[Name], unfold: usize, depth: usize, trunc: &mut bool) -> Vec<(Action, Process)> {
    let mut out = Vec::new();
    match p {
        Process::Nil => {}
        // Out
        Process::Out(a, b, q) => out.push((Action::Out(a.clone(), b.clone()), (**q).clone())),
        // Inp
        Process::In(a, x, q) => {
            for c in names {
                out.push((Action::In(a.clone(), c.clone()), rename(q, x, c)));
            }
        }
        Process::Tau(q) => out.push((Action::Tau, (**q).clone())),
        // Sum and its symmetric variant
        Process::Sum(g, h) => {
            out.extend(derive(g, names, unfold, depth, trunc));
            out.extend(derive(h, names, unfold, depth, trunc));
        }
        // Rep
        Process::Rep(g) => {
            if unfold == 0 {
                if !derive(g, names, 0, depth, &mut false).is_empty() {
                    *trunc = true;
                }
            } else {
                let unfolded = Process::par(p.clone(), (**g).clone());
                out.extend(derive(&unfolded, names, unfold - 1, depth, trunc));
            }
        }
        Process::Res(x, q) => {
            let z = Name::new(&format!("res#{depth}"));
            let body = rename(q, x, &z);
            let fn_whole = p.free_names();
            // the body may communicate on z internally
            let mut inner = names.to_vec();
            inner.push(z.clone());
            for (mu, t) in derive(&body, &inner, unfold, depth + 1, trunc) {
                let touches = mu.subject() == Some(&z) || mu.object() == Some(&z);
                // Res
                if !touches {
                    out.push((mu.clone(), Process::res(z.clone(), t.clone())));
                }
                // Open
                if let Action::Out(a, b) = &mu {
                    if *b == z && *a != z {
                        for c in names {
                            if !fn_whole.contains(c) {
                                out.push((Action::BOut(a.clone(), c.clone()), rename(&t, &z, c)));
                            }
                        }
                    }
                }
            }
        }
        Process::Par(l, r) => {
            let dl = derive(l, names, unfold, depth, trunc);
            let dr = derive(r, names, unfold, depth, trunc);
            let fl = l.free_names();
            let fr = r.free_names();
            // Par and its symmetric variant
            for (mu, t) in &dl {
                if mu.bound_name().is_none_or(|b| !fr.contains(b)) {
                    out.push((mu.clone(), Process::par(t.clone(), (**r).clone())));
                }
            }
            for (mu, t) in &dr {
                if mu.bound_name().is_none_or(|b| !fl.contains(b)) {
                    out.push((mu.clone(), Process::par((**l).clone(), t.clone())));
                }
            }
            // Comm, Close and their symmetric variants
            for (ml, tl) in &dl {
                for (mr, tr) in &dr {
                    match (ml, mr) {
                        (Action::In(a, b), Action::Out(c, d)) if a == c && b == d => {
                            out.push((Action::Tau, Process::par(tl.clone(), tr.clone())))
                        }
                        (Action::Out(c, d), Action::In(a, b)) if a == c && b == d => {
                            out.push((Action::Tau, Process::par(tl.clone(), tr.clone())))
                        }
                        (Action::In(a, b), Action::BOut(c, d)) if a == c && b == d && !fl.contains(b) => {
                            out.push((Action::Tau, Process::res(b.clone(), Process::par(tl.clone(), tr.clone()))))
                        }
                        (Action::BOut(c, d), Action::In(a, b)) if a == c && b == d && !fr.contains(b) => {
                            out.push((Action::Tau, Process::res(b.clone(), Process::par(tl.clone(), tr.clone()))))
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    out
}
