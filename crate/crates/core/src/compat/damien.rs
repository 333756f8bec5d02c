//! Substitution breaks compatibility: a pair in `b²(⊤)` whose image under
//! `{c↦a}` is not.

use std::sync::Arc;

use serde::Serialize;

use super::{check_claim, functional, CompatClaim, Functional, Verdict};
use crate::lts::{make_pool, reachable_universe_with_pool, ExplorationBudget, Universe};
use crate::relation::{compose, unmatched_move, Kind, Mode, Relation, Suite, Transformer};
use crate::syntax::{apply_subst, parse, Process, Substitution};
use crate::technique::{instantiate, InstantiateOptions, TechniqueSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DamienStep {
    pub statement: String,
    pub expected: bool,
    pub observed: bool,
    pub detail: String,
}

impl DamienStep {
    pub fn ok(&self) -> bool {
        self.expected == self.observed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DamienReport {
    pub states: usize,
    pub steps: Vec<DamienStep>,
    /// `sub(b²(⊤)) ⊆ b²(⊤)`, expected to fail.
    pub consequence: Verdict,
}

impl DamienReport {
    pub fn all_ok(&self) -> bool {
        self.steps.iter().all(DamienStep::ok) && !self.consequence.holds
    }
}

fn p(s: &str) -> Process {
    parse(s).expect("golden term parses")
}

fn golden_universe() -> Arc<Universe> {
    let sigma = Substitution::single("c", "a");
    let base = ["a.c^ | c^", "a | c^", "a.c^", "a", "c^ | c^", "c^", "0"];
    let mut seeds: Vec<Process> = base.iter().map(|s| p(s)).collect();
    seeds.extend(base.iter().map(|s| apply_subst(&p(s), &sigma)));
    let pool = make_pool(&[p("a | c^")].iter().flat_map(|q| q.free_names()).collect(), 1);
    Arc::new(reachable_universe_with_pool(&seeds, &pool, &ExplorationBudget::default()).expect("golden universe"))
}

pub fn repro_damien() -> DamienReport {
    let u = golden_universe();
    let n = u.len();
    let idx = |s: &Process| u.index_of(s).expect("state in golden universe");
    let top = Relation::full(n);
    let b = functional(&u, Functional::B, false, false);
    let b1 = b.apply(&top);
    let b2 = b.apply(&b1);
    let sigma = Substitution::single("c", "a");
    let mut steps = Vec::new();
    let mut member = |statement: &str, rel: &Relation, l: &Process, r: &Process, expected: bool, detail: String| {
        steps.push(DamienStep {
            statement: statement.to_string(),
            expected,
            observed: rel.contains(idx(l), idx(r)),
            detail,
        });
    };

    let (cbar, nil) = (p("c^"), p("0"));
    member("(c^, 0) ∈ ⊤", &top, &cbar, &nil, true, String::new());
    member("(a.c^, a) ∈ b(⊤)", &b1, &p("a.c^"), &p("a"), true, String::new());
    member("(c^ | c^, c^) ∈ b(⊤)", &b1, &p("c^ | c^"), &cbar, true, String::new());
    let (l, r) = (p("a.c^ | c^"), p("a | c^"));
    member("(a.c^ | c^, a | c^) ∈ b²(⊤)", &b2, &l, &r, true, String::new());
    let id = Substitution::identity();
    member(
        "identity substitution preserves membership",
        &b2,
        &apply_subst(&l, &id),
        &apply_subst(&r, &id),
        true,
        String::new(),
    );
    let (ls, rs) = (apply_subst(&l, &sigma), apply_subst(&r, &sigma));
    let why = unmatched_move(&u, &b1, idx(&ls), idx(&rs), Kind::All, Mode::Strong)
        .map(|(a, t)| format!("{ls} --{}--> {} is not answered within b(⊤)", u.action(a), u.state(t)))
        .unwrap_or_default();
    member("(a.a^ | a^, a | a^) ∈ b²(⊤)", &b2, &ls, &rs, false, why);
    let abar = apply_subst(&cbar, &sigma);
    let why = unmatched_move(&u, &top, idx(&abar), idx(&nil), Kind::All, Mode::Strong)
        .map(|(a, _)| format!("a^ --{}--> but 0 has no transition", u.action(a)))
        .unwrap_or_default();
    member("(a^, 0) ∈ b(⊤)", &b1, &abar, &nil, false, why);

    let sub = instantiate(&TechniqueSpec::Sub, &u, &InstantiateOptions::default()).expect("sub on golden universe");
    let b_sq: Transformer = compose(&b, &b).expect("same universe").renamed("b²");
    let image = sub.apply(&b2);
    steps.push(DamienStep {
        statement: "(a.a^ | a^, a | a^) ∈ sub(b²(⊤))".into(),
        expected: true,
        observed: image.contains(idx(&ls), idx(&rs)),
        detail: String::new(),
    });
    let claim = CompatClaim::compatible(sub.transformer, b_sq);
    let consequence = check_claim(&claim, &Suite::from_relations(n, vec![top])).expect("claim is well formed");
    DamienReport { states: n, steps, consequence }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_steps_reproduce() {
        let r = repro_damien();
        for s in &r.steps {
            assert!(s.ok(), "{s:?}");
        }
        assert!(!r.consequence.holds);
        assert!(r.all_ok());
    }
}
