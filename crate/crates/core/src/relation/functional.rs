use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::Relation;
use crate::exec;
use crate::lts::{Action, Universe};

/// Which moves of the challenger are considered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    All,
    Visible,
    Tau,
}

/// How the defender answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// With the same single transition.
    Strong,
    /// With `⇒̂μ`.
    Weak,
    /// With `→μ` for visible `μ`, and zero or one `τ` for `τ`.
    ExpansionUpper,
}

impl Kind {
    fn admits(self, a: &Action) -> bool {
        match self {
            Kind::All => true,
            Kind::Visible => a.is_visible(),
            Kind::Tau => a.is_tau(),
        }
    }
}

fn with_action(ts: &[(u32, u32)], a: u32) -> &[(u32, u32)] {
    let lo = ts.partition_point(|&(x, _)| x < a);
    let hi = ts.partition_point(|&(x, _)| x <= a);
    &ts[lo..hi]
}

fn simulates(u: &Universe, r: &Relation, p: usize, q: usize, kind: Kind, mode: Mode) -> bool {
    unmatched_move(u, r, p, q, kind, mode).is_none()
}

/// The first move `p --a--> p2` (as `(a, p2)`) that `q` cannot answer into
/// `r` under `mode`.
pub fn unmatched_move(u: &Universe, r: &Relation, p: usize, q: usize, kind: Kind, mode: Mode) -> Option<(u32, usize)> {
    for &(a, p2) in u.transitions(p) {
        let action = u.action(a);
        if !kind.admits(action) || u.bound_clash(a, p) || u.bound_clash(a, q) {
            continue;
        }
        let p2 = p2 as usize;
        let matched = match (mode, action.is_tau()) {
            (Mode::Strong, _) | (Mode::ExpansionUpper, false) => {
                with_action(u.transitions(q), a).iter().any(|&(_, q2)| r.contains(p2, q2 as usize))
            }
            (Mode::Weak, true) => u.tau_star(q).iter().any(|&q2| r.contains(p2, q2 as usize)),
            (Mode::Weak, false) => with_action(u.weak_visible(q), a).iter().any(|&(_, q2)| r.contains(p2, q2 as usize)),
            (Mode::ExpansionUpper, true) => u.tau_hat(q).iter().any(|&q2| r.contains(p2, q2 as usize)),
        };
        if !matched {
            return Some((a, p2));
        }
    }
    None
}

/// The simulation functional: pairs `(P, Q)` such that every move of `P`
/// admitted by `kind` is answered by `Q` according to `mode` into `r`.
pub fn sim_fun(u: &Universe, r: &Relation, kind: Kind, mode: Mode) -> Relation {
    let n = u.len();
    let rows = exec::map_range(n, |p| (0..n).filter(|&q| simulates(u, r, p, q, kind, mode)).collect::<Vec<_>>());
    let mut out = Relation::empty(n);
    for (p, qs) in rows.into_iter().enumerate() {
        for q in qs {
            out.insert(p, q);
        }
    }
    out
}

/// `s(R) ∩ s(R⁻¹)⁻¹`, additionally intersected with `R` when `barred`.
pub fn bisim_fun(u: &Universe, r: &Relation, kind: Kind, mode: Mode, barred: bool) -> Relation {
    let fwd = sim_fun(u, r, kind, mode);
    let bwd = sim_fun(u, &r.inverse(), kind, mode).inverse();
    let b = fwd.intersect(&bwd);
    if barred {
        b.intersect(r)
    } else {
        b
    }
}

/// `ws(R) ∩ s′(R⁻¹)⁻¹`: the left process answers with at most one `τ`.
pub fn expansion_fun(u: &Universe, r: &Relation) -> Relation {
    let weak = sim_fun(u, r, Kind::All, Mode::Weak);
    let upper = sim_fun(u, &r.inverse(), Kind::All, Mode::ExpansionUpper).inverse();
    weak.intersect(&upper)
}

/// Greatest fixpoint of a monotone `f` by iteration from the full relation.
pub fn gfp_of(n: usize, f: impl Fn(&Relation) -> Relation) -> Relation {
    let mut r = Relation::full(n);
    loop {
        let next = f(&r).intersect(&r);
        if next == r {
            return r;
        }
        r = next;
    }
}

/// Strong bisimilarity by signature refinement, for universes without bound
/// outputs (where the functional does not depend on free names).
pub fn partition_refinement(u: &Universe) -> Option<Relation> {
    let n = u.len();
    if (0..u.action_count()).any(|a| u.action(a as u32).bound_name().is_some()) {
        return None;
    }
    let mut block = vec![0usize; n];
    let mut count = 1;
    loop {
        let mut ids: HashMap<(usize, BTreeSet<(u32, usize)>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for p in 0..n {
            let sig: BTreeSet<(u32, usize)> = u.transitions(p).iter().map(|&(a, q)| (a, block[q as usize])).collect();
            let fresh = ids.len();
            next[p] = *ids.entry((block[p], sig)).or_insert(fresh);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    Some(Relation::from_pairs(
        n,
        (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).filter(|&(p, q)| block[p] == block[q]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{reachable_universe, ExplorationBudget};
    use crate::syntax::{parse, Process};

    fn uni(seeds: &[&str]) -> Universe {
        let seeds: Vec<Process> = seeds.iter().map(|s| parse(s).unwrap()).collect();
        reachable_universe(&seeds, &ExplorationBudget::default()).unwrap()
    }

    fn idx(u: &Universe, s: &str) -> usize {
        u.index_of(&parse(s).unwrap()).unwrap()
    }

    fn bisim(u: &Universe) -> Relation {
        gfp_of(u.len(), |r| bisim_fun(u, r, Kind::All, Mode::Strong, false))
    }

    fn weak_bisim(u: &Universe) -> Relation {
        gfp_of(u.len(), |r| bisim_fun(u, r, Kind::All, Mode::Weak, false))
    }

    #[test]
    fn sim_examples() {
        let u = uni(&["tau.0", "tau.tau.0"]);
        let n = u.len();
        let s = sim_fun(&u, &Relation::full(n), Kind::Tau, Mode::Strong);
        assert!(s.contains(idx(&u, "tau.0"), idx(&u, "tau.tau.0")));
        let s = sim_fun(&u, &Relation::empty(n), Kind::Visible, Mode::Strong);
        assert!(s.contains(idx(&u, "tau.0"), idx(&u, "0")));
    }

    #[test]
    fn visible_and_tau_split() {
        let u = uni(&["tau.0"]);
        let n = u.len();
        let (t, z) = (idx(&u, "tau.0"), idx(&u, "0"));
        assert!(bisim_fun(&u, &Relation::full(n), Kind::Visible, Mode::Strong, false).contains(t, z));
        assert!(!bisim_fun(&u, &Relation::full(n), Kind::Tau, Mode::Strong, false).contains(t, z));
    }

    #[test]
    fn strong_bisimilarity() {
        let u = uni(&["tau.0 | tau.0", "tau.tau.0"]);
        let b = bisim(&u);
        assert!(b.contains(idx(&u, "tau.0 | tau.0"), idx(&u, "tau.tau.0")));
        assert!(b.is_reflexive() && b.is_symmetric() && b.is_transitive());
        assert_eq!(partition_refinement(&u), Some(b));
    }

    #[test]
    fn weak_examples() {
        let u = uni(&["tau.a.0", "a.0", "tau.a.0 + b.0", "a.0 + b.0"]);
        let wb = weak_bisim(&u);
        assert!(wb.contains(idx(&u, "tau.a.0"), idx(&u, "a.0")));
        assert!(!wb.contains(idx(&u, "tau.a.0 + b.0"), idx(&u, "a.0 + b.0")));
        assert!(bisim(&u).is_subset(&wb));
    }

    #[test]
    fn expansion_is_a_preorder() {
        let u = uni(&["tau.a.0", "a.0", "tau.tau.a.0"]);
        let e = gfp_of(u.len(), |r| expansion_fun(&u, r));
        assert!(e.is_reflexive() && e.is_transitive());
        // the side doing less internal work is on the left
        assert!(e.contains(idx(&u, "a.0"), idx(&u, "tau.a.0")));
        assert!(e.contains(idx(&u, "a.0"), idx(&u, "tau.tau.a.0")));
        assert!(!e.contains(idx(&u, "tau.a.0"), idx(&u, "a.0")));
    }

    #[test]
    fn barred_is_below_argument() {
        let u = uni(&["a<b>.0 | b(x).0"]);
        let r = Relation::from_pairs(u.len(), [(0, 1), (1, 1)]);
        assert!(bisim_fun(&u, &r, Kind::All, Mode::Strong, true).is_subset(&r));
    }
}
