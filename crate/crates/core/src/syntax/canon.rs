use super::{Name, Process};

/// Renames every binder to `Bound(i)`, numbering binders in pre-order,
/// left to right. Free occurrences are left untouched.
pub fn alpha_canonical(p: &Process) -> Process {
    let mut env = Vec::new();
    let mut next = 0;
    go(p, &mut env, &mut next)
}

fn lookup(env: &[(Name, Name)], n: &Name) -> Name {
    env.iter().rev().find(|(k, _)| k == n).map(|(_, v)| v.clone()).unwrap_or_else(|| n.clone())
}

fn go(p: &Process, env: &mut Vec<(Name, Name)>, next: &mut u32) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Out(a, b, q) => Process::Out(lookup(env, a), lookup(env, b), Box::new(go(q, env, next))),
        Process::In(a, x, q) => {
            let a = lookup(env, a);
            let fresh = Name::Bound(*next);
            *next += 1;
            env.push((x.clone(), fresh.clone()));
            let body = go(q, env, next);
            env.pop();
            Process::In(a, fresh, Box::new(body))
        }
        Process::Res(x, q) => {
            let fresh = Name::Bound(*next);
            *next += 1;
            env.push((x.clone(), fresh.clone()));
            let body = go(q, env, next);
            env.pop();
            Process::Res(fresh, Box::new(body))
        }
        Process::Tau(q) => Process::Tau(Box::new(go(q, env, next))),
        Process::Rep(q) => Process::Rep(Box::new(go(q, env, next))),
        Process::Sum(q, r) => {
            let q = go(q, env, next);
            Process::Sum(Box::new(q), Box::new(go(r, env, next)))
        }
        Process::Par(q, r) => {
            let q = go(q, env, next);
            Process::Par(Box::new(q), Box::new(go(r, env, next)))
        }
    }
}
