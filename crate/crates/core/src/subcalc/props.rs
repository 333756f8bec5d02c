//! Transition properties of the subcalculi, checked instance by instance:
//! subject reduction, postponing outputs, preponing inputs, and the
//! decomposition of transitions of `Pσ`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::{is_async, type_check_ian_with, Stepper, SumRule, TypeEnv};
use crate::exec;
use crate::lts::{step, Action, ExplorationBudget, LtsError};
use crate::syntax::{
    alpha_canonical, apply_subst, enumerate_terms, normal_form, rename, Dialect, Name, Process, Substitution,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropError {
    #[error("{process} is not in the {dialect} subcalculus")]
    Precondition { process: String, dialect: &'static str },
    #[error(transparent)]
    Lts(#[from] LtsError),
}

fn subsets(pool: &[Name]) -> Vec<TypeEnv> {
    (0..1usize << pool.len())
        .map(|m| pool.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, n)| n.clone()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SrViolation {
    pub env: Vec<Name>,
    pub process: Process,
    pub action: Action,
    pub target: Process,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SrReport {
    pub terms: usize,
    /// Typable `(Γ, P)` pairs.
    pub judgements: usize,
    pub transitions: usize,
    pub violations: Vec<SrViolation>,
    pub truncated: bool,
}

/// For every term up to `size` over `pool` and every `Γ ⊆ pool` with
/// `Γ ⊢ P`, checks `Γ ∪ bn(μ) ⊢ P′` for each transition `P →μ P′`.
pub fn check_subject_reduction(size: usize, pool: &[Name], budget: &ExplorationBudget, sum: SumRule) -> SrReport {
    let terms = enumerate_terms(size, pool, Dialect::Full);
    let envs = subsets(pool);
    let lts_pool = crate::lts::make_pool(&pool.iter().cloned().collect(), budget.fresh);
    let parts = exec::map(&terms, |p| {
        let mut r = SrReport { terms: 1, ..Default::default() };
        let typable: Vec<&TypeEnv> = envs.iter().filter(|g| type_check_ian_with(g, p, sum)).collect();
        if typable.is_empty() {
            return r;
        }
        let s = step(p, &lts_pool, budget).expect("enumerated over the pool");
        r.truncated = s.truncated;
        for g in typable {
            r.judgements += 1;
            for t in &s.transitions {
                r.transitions += 1;
                let mut env = g.clone();
                env.extend(t.action.bound_name().cloned());
                if !type_check_ian_with(&env, &t.target, sum) {
                    r.violations.push(SrViolation {
                        env: g.iter().cloned().collect(),
                        process: p.clone(),
                        action: t.action.clone(),
                        target: t.target.clone(),
                    });
                }
            }
        }
        r
    });
    parts.into_iter().fold(SrReport::default(), |mut acc, r| {
        acc.terms += r.terms;
        acc.judgements += r.judgements;
        acc.transitions += r.transitions;
        acc.truncated |= r.truncated;
        acc.violations.extend(r.violations);
        acc
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transposition {
    /// Outputs of asynchronous processes may be moved later.
    AsyncPostpone,
    /// Inputs of typable processes may be moved earlier.
    IanPrepone,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranspositionFailure {
    pub first: Action,
    pub second: Action,
    pub target: Process,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranspositionReport {
    pub process: Process,
    pub which: Transposition,
    /// Two-step sequences of the required shape.
    pub sequences: usize,
    pub failures: Vec<TranspositionFailure>,
    pub truncated: bool,
}

/// Bound names are taken fresh: neither free in `p` nor shared between the
/// two actions.
fn fresh_bound(p: &Process, mu1: &Action, mu2: &Action) -> bool {
    let fns = p.free_names();
    let b1 = mu1.bound_name();
    let b2 = mu2.bound_name();
    !(b1.is_some_and(|b| fns.contains(b) || mu2.names().contains(b))
        || b2.is_some_and(|b| fns.contains(b) || mu1.names().contains(b)))
}

/// Checks that every `P →μ1 →μ2 P′` of the relevant shape can be reordered
/// into `P →μ2 →μ1 P″` with `P″ ≡ P′`.
pub fn check_postpone_prepone(
    p: &Process,
    which: Transposition,
    pool: &[Name],
    budget: &ExplorationBudget,
) -> Result<TranspositionReport, PropError> {
    let ok = match which {
        Transposition::AsyncPostpone => is_async(p),
        Transposition::IanPrepone => type_check_ian_with(&p.free_names(), p, SumRule::AnyEnv),
    };
    if !ok {
        let dialect = if which == Transposition::AsyncPostpone { "asynchronous" } else { "typable" };
        return Err(PropError::Precondition { process: p.to_string(), dialect });
    }
    let mut st = Stepper::new(pool, *budget);
    let mut report =
        TranspositionReport { process: p.clone(), which, sequences: 0, failures: Vec::new(), truncated: false };
    for (mu1, p1) in st.moves(p)? {
        for (mu2, p2) in st.moves(&p1)? {
            let shaped = match which {
                Transposition::AsyncPostpone => matches!(mu1, Action::Out(..) | Action::BOut(..)),
                Transposition::IanPrepone => matches!(mu2, Action::In(..)),
            };
            if !shaped || !fresh_bound(p, &mu1, &mu2) {
                continue;
            }
            report.sequences += 1;
            let goal = normal_form(&p2);
            let mut found = false;
            for (nu1, q1) in st.moves(p)? {
                if nu1 != mu2 {
                    continue;
                }
                if st.moves(&q1)?.iter().any(|(nu2, q2)| *nu2 == mu1 && normal_form(q2) == goal) {
                    found = true;
                    break;
                }
            }
            if !found {
                report.failures.push(TranspositionFailure { first: mu1.clone(), second: mu2, target: p2 });
            }
        }
    }
    report.truncated = st.truncated;
    Ok(report)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CaseCounts {
    pub visible: usize,
    pub tau: usize,
    pub communication: usize,
    pub extrusion: usize,
    /// Inputs matched only through a placeholder received name.
    pub late_input: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DavFailure {
    pub process: Process,
    pub sigma: String,
    pub action: Action,
    pub target: Process,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DavReport {
    pub terms: usize,
    pub substitutions: usize,
    pub transitions: usize,
    /// Transitions of `Pσ` matched by each case (the first that applies).
    pub cases: CaseCounts,
    /// Bound outputs of `Pσ` whose name is not fresh for `P` and `σ`.
    pub skipped: usize,
    pub unmatched: Vec<DavFailure>,
    pub truncated: bool,
}

fn same(p: &Process, q: &Process) -> bool {
    alpha_canonical(p) == alpha_canonical(q)
}

/// Which case of the decomposition explains `Pσ →α P′`, if any.
fn decompose(
    st: &mut Stepper,
    p: &Process,
    sigma: &Substitution,
    alpha: &Action,
    target: &Process,
) -> Result<Option<usize>, LtsError> {
    let moves = st.moves(p)?;
    if alpha.is_visible() {
        if moves.iter().any(|(a, q)| a.apply(sigma) == *alpha && same(&apply_subst(q, sigma), target)) {
            return Ok(Some(0));
        }
        // late reading of inputs: receive a placeholder, substitute, then
        // instantiate; needed when the received name has no preimage
        let Action::In(c, d) = alpha else { return Ok(None) };
        let fns = p.free_names();
        let touched = |n: &Name| sigma.domain().chain(sigma.range()).any(|m| m == n);
        let hit = moves.iter().any(|(a, q)| match a {
            Action::In(a2, n) => {
                !fns.contains(n)
                    && !touched(n)
                    && sigma.apply_name(a2) == *c
                    && same(&rename(&apply_subst(q, sigma), n, d), target)
            }
            _ => false,
        });
        return Ok(hit.then_some(4));
    }
    if moves.iter().any(|(a, q)| a.is_tau() && same(&apply_subst(q, sigma), target)) {
        return Ok(Some(1));
    }
    let goal = normal_form(target);
    for (out, p1) in &moves {
        let (a, b) = match out {
            Action::Out(a, b) | Action::BOut(a, b) => (a, b),
            _ => continue,
        };
        for (inp, p2) in st.moves(p1)? {
            let Action::In(c, x) = &inp else { continue };
            if x != b || sigma.apply_name(a) != sigma.apply_name(c) {
                continue;
            }
            let (image, case) = match out {
                Action::BOut(..) => (apply_subst(&Process::res(b.clone(), p2.clone()), sigma), 3),
                _ => (apply_subst(&p2, sigma), 2),
            };
            if normal_form(&image) == goal {
                return Ok(Some(case));
            }
        }
    }
    Ok(None)
}

/// Every transition of `Pσ`, for all terms up to `size` over `pool` and all
/// `σ : pool → pool`, must decompose into a transition (or an output-input
/// pair) of `P`.
pub fn check_subst_decomposition(size: usize, pool: &[Name], budget: &ExplorationBudget) -> DavReport {
    let terms = enumerate_terms(size, pool, Dialect::Full);
    let sigmas = Substitution::all_over(pool);
    let lts_pool = crate::lts::make_pool(&pool.iter().cloned().collect(), budget.fresh);
    let parts = exec::map(&terms, |p| {
        let mut st = Stepper::new(&lts_pool, *budget);
        let mut r = DavReport { terms: 1, ..Default::default() };
        let fns = p.free_names();
        for sigma in &sigmas {
            let touched: BTreeSet<Name> = sigma.domain().chain(sigma.range()).cloned().collect();
            let ps = apply_subst(p, sigma);
            for (alpha, target) in st.moves(&ps).expect("pool covers the term") {
                if alpha.bound_name().is_some_and(|b| fns.contains(b) || touched.contains(b)) {
                    r.skipped += 1;
                    continue;
                }
                r.transitions += 1;
                match decompose(&mut st, p, sigma, &alpha, &target).expect("pool covers the term") {
                    Some(0) => r.cases.visible += 1,
                    Some(1) => r.cases.tau += 1,
                    Some(2) => r.cases.communication += 1,
                    Some(3) => r.cases.extrusion += 1,
                    Some(_) => r.cases.late_input += 1,
                    None => r.unmatched.push(DavFailure {
                        process: p.clone(),
                        sigma: sigma.to_string(),
                        action: alpha,
                        target,
                    }),
                }
            }
        }
        r.truncated = st.truncated;
        r
    });
    let mut out = DavReport { substitutions: sigmas.len(), ..Default::default() };
    for r in parts {
        out.terms += r.terms;
        out.transitions += r.transitions;
        out.skipped += r.skipped;
        out.cases.visible += r.cases.visible;
        out.cases.tau += r.cases.tau;
        out.cases.communication += r.cases.communication;
        out.cases.extrusion += r.cases.extrusion;
        out.cases.late_input += r.cases.late_input;
        out.truncated |= r.truncated;
        out.unmatched.extend(r.unmatched);
    }
    out
}
