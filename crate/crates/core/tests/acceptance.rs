//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! The report goes to stderr even when output is captured. The test fails
//! when a criterion's outcome differs from the expected one in
//! `EXPECTED_FAILURES` (a documented, analysed failure).

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use piupto::compat::{
    check_claim, derived_law_suite, functional, replay, repro_damien, soundness_harness, standard_statements,
    CompatClaim, Functional, Group, Verdict,
};
use piupto::exec::{self, Strategy};
use piupto::lookahead::{check_appendix_claims, search_unsoundness, AppendixLimits, ClaimStatus, OpKind, SearchParams};
use piupto::lts::{make_pool, reachable_universe_with_pool, step, ExplorationBudget, Universe};
use piupto::relation::{bisim_fun, gfp_of, Kind, Mode, Relation, SamplingMode, Suite};
use piupto::subcalc::{
    check_acp, check_postpone_prepone, check_subject_reduction, check_subst_decomposition, AcpMode, SumRule,
    Transposition,
};
use piupto::syntax::{apply_subst, enumerate_terms, names, parse, Dialect, Name, Process, Substitution};
use piupto::technique::{
    combined_technique, instantiate, CombinedDialect, InstantiateOptions, TechniqueError, TechniqueSpec,
};

/// Criteria whose failure is analysed and recorded, with a fragment the
/// failure detail must contain.
const EXPECTED_FAILURES: &[(usize, &str)] = &[(3, "pcomp is b_α-compatible")];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn p(s: &str) -> Process {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn uni(seeds: &[&str]) -> Arc<Universe> {
    let ps: Vec<Process> = seeds.iter().map(|s| p(s)).collect();
    let fns: BTreeSet<Name> = ps.iter().flat_map(|q| q.free_names()).collect();
    let budget = ExplorationBudget::default();
    let pool = make_pool(&fns, budget.fresh);
    Arc::new(reachable_universe_with_pool(&ps, &pool, &budget).unwrap())
}

fn tech(u: &Arc<Universe>, s: &str) -> piupto::relation::Transformer {
    let spec: TechniqueSpec = s.parse().unwrap();
    instantiate(&spec, u, &InstantiateOptions::default()).unwrap().transformer
}

fn failing(vs: &[Verdict]) -> Vec<String> {
    vs.iter()
        .filter(|v| !v.holds)
        .map(|v| match &v.counterexample {
            Some(cx) => format!("{} at ({}, {})", v.claim, cx.pair.0, cx.pair.1),
            None => v.claim.clone(),
        })
        .collect()
}

fn criterion1() -> Outcome {
    let t = Instant::now();
    let r = repro_damien();
    let el = t.elapsed();
    let ok = r.all_ok() && r.steps.len() >= 4 && el < Duration::from_secs(1);
    outcome(
        ok,
        format!(
            "{} steps ok, consequence fails: {}, {el:.2?}",
            r.steps.iter().filter(|s| s.ok()).count(),
            !r.consequence.holds
        ),
    )
}

fn criterion2() -> Outcome {
    let budget = ExplorationBudget::default();
    let pool = names(&["a", "b", "f1"]);
    let terms = enumerate_terms(6, &names(&["a", "b"]), Dialect::Full);
    let bad = exec::map(&terms, |t| {
        let got: BTreeSet<_> =
            step(t, &pool, &budget).unwrap().transitions.into_iter().map(|x| (x.action, x.target)).collect();
        got != common::oracle_step(t, &pool, budget.unfold)
    });
    let n = bad.iter().filter(|b| **b).count();
    outcome(n == 0, format!("{} terms of size ≤ 6, {n} discrepancies", terms.len()))
}

/// Closed, untruncated universes with at most four states.
fn small_universes() -> Vec<Arc<Universe>> {
    let seeds: &[&[&str]] = &[
        &["a<b>.0"],
        &["tau.a<b>.0", "c<d>.0"],
        &["a<b>.0 | c<d>.0"],
        &["a(x).0", "tau.0"],
        &["a<b>.0 + tau.0", "tau.tau.0"],
        &["new b. a<b>.0"],
        &["tau.0 | tau.0"],
        &["a | c^"],
    ];
    seeds.iter().map(|s| uni(s)).filter(|u| u.len() <= 4 && !u.is_truncated()).collect()
}

fn sampled_universes() -> Vec<Arc<Universe>> {
    [
        &["a<b>.c(y).0", "a<b>.0 | c(y).0"][..],
        &["new b. a<b>.0 | c(y).0", "a<a>.0 + tau.0"],
        &["a<b>.0 + b(x).c<x>.0", "a<b>.0"],
        &["a<a>.0 | a<a>.0", "a<a>.0", "tau.a<a>.0"],
        &["tau.a<b>.0 | b(x).0", "tau.tau.b(x).0"],
    ]
    .iter()
    .map(|s| uni(s))
    .collect()
}

const SECTION_CLAIMS: &[&str] = &[
    "res is b_α-compatible",
    "pcomp is b_α-compatible",
    "tau is b_α-compatible",
    "id∪out is b̄_α-compatible",
    "id∪sum is b_α-compatible",
    "id∪rep is b_α-compatible up to pcomp∪id",
];

fn run_statements(u: &Arc<Universe>, groups: &[Group], suite: &Suite, keep: impl Fn(&str) -> bool) -> Vec<Verdict> {
    standard_statements(u, groups, suite)
        .unwrap()
        .iter()
        .filter(|s| keep(&s.label))
        .map(|s| s.evaluate(suite).unwrap())
        .collect()
}

fn criterion3() -> Outcome {
    let small = small_universes();
    let mut verdicts = Vec::new();
    for u in &small {
        let suite = Suite::exhaustive(u.len());
        verdicts.extend(run_statements(u, &[Group::Contexts], &suite, |l| SECTION_CLAIMS.contains(&l)));
    }
    let exhaustive_fail = failing(&verdicts);
    let mut sampled = Vec::new();
    for (i, u) in sampled_universes().iter().enumerate() {
        let suite = Suite::new(u, i as u64 + 1, 512);
        assert_eq!(suite.mode(), SamplingMode::Sampled, "{} states", u.len());
        sampled.extend(run_statements(u, &[Group::Contexts], &suite, |l| SECTION_CLAIMS.contains(&l)));
    }
    let sampled_fail = failing(&sampled);
    let ok = exhaustive_fail.is_empty() && sampled_fail.is_empty() && small.len() >= 4;
    outcome(
        ok,
        format!(
            "{} exhaustive universes ({} checks), failing: {:?}; sampled: {} checks, failing: {:?}",
            small.len(),
            verdicts.len(),
            exhaustive_fail,
            sampled.len(),
            sampled_fail
        ),
    )
}

fn acp_universe(u: &Universe) -> bool {
    u.states().iter().all(|s| check_acp(s, AcpMode::Strong, u.pool(), u.budget()).unwrap().holds())
}

/// The universe the counterexample to compatibility of `sub` lives in.
fn golden_universe() -> Arc<Universe> {
    let sigma = Substitution::single("c", "a");
    let base = ["a.c^ | c^", "a | c^", "a.c^", "a", "c^ | c^", "c^", "0"];
    let mut seeds: Vec<Process> = base.iter().map(|s| p(s)).collect();
    seeds.extend(base.iter().map(|s| apply_subst(&p(s), &sigma)));
    let pool = make_pool(&p("a | c^").free_names(), 1);
    Arc::new(reachable_universe_with_pool(&seeds, &pool, &ExplorationBudget::default()).unwrap())
}

fn criterion4() -> Outcome {
    let mut everywhere = Vec::new();
    let mut upto = Vec::new();
    let mut acp = 0;
    let all: Vec<Arc<Universe>> = small_universes().into_iter().chain(sampled_universes()).collect();
    for (i, u) in all.iter().enumerate() {
        let suite = Suite::new(u, 40 + i as u64, 512);
        everywhere.extend(run_statements(u, &[Group::Substitution], &suite, |l| l == "sub is b_α-compatible"));
        if acp_universe(u) {
            acp += 1;
            upto.extend(run_statements(u, &[Group::Substitution], &suite, |l| l.starts_with("sub is b_α²,b_τ")));
        }
    }
    let u = golden_universe();
    let b = functional(&u, Functional::B, false, false);
    let top = Relation::full(u.len());
    let bt = b.apply(&top);
    let mut rels = vec![top, bt.clone(), b.apply(&bt)];
    rels.extend(Suite::new(&u, 5, 256).iter());
    let suite = Suite::from_relations(u.len(), rels);
    let claim = CompatClaim::compatible(tech(&u, "sub"), b);
    let v = check_claim(&claim, &suite).unwrap();
    let replayed = v.counterexample.as_ref().is_some_and(|cx| replay(&claim, cx));
    // statements involving `sub` exist only where the pool is within the cap
    let ok = everywhere.len() >= 8
        && failing(&everywhere).is_empty()
        && acp >= 3
        && upto.len() >= 3
        && failing(&upto).is_empty()
        && !v.holds
        && replayed;
    let cx = v.counterexample.map(|c| format!("({}, {})", c.pair.0, c.pair.1)).unwrap_or_default();
    outcome(
        ok,
        format!(
            "sub b_α on {} of {} universes (the rest exceed the substitution pool cap), failing {:?}; up-to claim on {} of {acp} ACP universes, failing {:?}; sub not b-compatible at {cx}",
            everywhere.len(),
            all.len(),
            failing(&everywhere),
            upto.len(),
            failing(&upto)
        ),
    )
}

fn criterion5() -> Outcome {
    let cases = [
        ("tau.0 | tau.0", "tau.tau.0 + tau.(tau.0 | 0)"),
        ("a<b>.0 | c(y).0", "c(y).0 | a<b>.0"),
        ("new x. (x<a>.0 | x(y).0)", "tau.0"),
        ("a<b>.0 | tau.0", "tau.a<b>.0 + a<b>.tau.0"),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (l, r) in cases {
        let t = Instant::now();
        let u = uni(&[l, r]);
        let spec = match combined_technique(CombinedDialect::AcpFull, &u) {
            Ok(s) => s,
            Err(e) => {
                ok = false;
                lines.push(format!("{l} ~ {r}: {e}"));
                continue;
            }
        };
        let suite = Suite::new(&u, 9, 128);
        let f = instantiate(&spec, &u, &InstantiateOptions::default()).unwrap().transformer.checked(&suite);
        let b = functional(&u, Functional::B, false, false);
        let rel = Relation::from_pairs(u.len(), [(u.index_of(&p(l)).unwrap(), u.index_of(&p(r)).unwrap())]);
        let rep = soundness_harness(&f, &b, None, 1, &rel, &suite).unwrap();
        // independent oracle: plain gfp iteration of the strong functional
        let gfp = gfp_of(u.len(), |x| bisim_fun(&u, x, Kind::All, Mode::Strong, false));
        let closure_in_gfp =
            rep.closure.iter().all(|(x, y)| gfp.contains(u.index_of(x).unwrap(), u.index_of(y).unwrap()));
        let el = t.elapsed();
        let good = rep.holds() && closure_in_gfp && el < Duration::from_secs(10);
        ok &= good;
        lines.push(format!(
            "{l} ~ {r}: {} ({} closure pairs, {el:.2?})",
            if good { "ok" } else { "FAILED" },
            rep.closure.len()
        ));
    }
    outcome(ok, lines.join("; "))
}

fn criterion6() -> Outcome {
    let base = names(&["a", "b"]);
    let budget = ExplorationBudget::default();
    let acp_fail = |dialect| {
        let terms = enumerate_terms(6, &base, dialect);
        let bad = exec::map(&terms, |t| {
            let pool = make_pool(&t.free_names(), budget.fresh);
            [AcpMode::Strong, AcpMode::Weak].iter().any(|&m| !check_acp(t, m, &pool, &budget).unwrap().holds())
        });
        (terms.len(), bad.iter().filter(|b| **b).count())
    };
    let (na, fa) = acp_fail(Dialect::Async);
    let (ni, fi) = acp_fail(Dialect::IanTypable);
    let neg = p("a<b>.c(y).0");
    let neg_fails = !check_acp(&neg, AcpMode::Strong, &make_pool(&neg.free_names(), 1), &budget).unwrap().holds();
    let sr = check_subject_reduction(6, &base, &budget, SumRule::AnyEnv);
    let trans = |dialect, which| {
        let terms = enumerate_terms(6, &base, dialect);
        let fails = exec::map(&terms, |t| {
            let pool = make_pool(&t.free_names(), budget.fresh);
            check_postpone_prepone(t, which, &pool, &budget).unwrap().failures.len()
        });
        fails.iter().sum::<usize>()
    };
    let post = trans(Dialect::Async, Transposition::AsyncPostpone);
    let pre = trans(Dialect::IanTypable, Transposition::IanPrepone);
    let ok = fa == 0 && fi == 0 && neg_fails && sr.violations.is_empty() && post == 0 && pre == 0;
    outcome(
        ok,
        format!(
            "ACP failures: async {fa}/{na}, ian {fi}/{ni}; a<b>.c(y).0 fails: {neg_fails}; SR {} judgements, {} violations; postpone {post}, prepone {pre} failures",
            sr.judgements,
            sr.violations.len()
        ),
    )
}

fn criterion7() -> Outcome {
    let u = uni(&["tau.a.0", "a.0", "tau.a.0 + b.0", "a.0 + b.0"]);
    let wb = gfp_of(u.len(), |r| bisim_fun(&u, r, Kind::All, Mode::Weak, false));
    let i = |s: &str| u.index_of(&p(s)).unwrap();
    let related = wb.contains(i("tau.a.0"), i("a.0"));
    let separated = !wb.contains(i("tau.a.0 + b.0"), i("a.0 + b.0"));
    let mut incl = Vec::new();
    for seeds in [&["tau.a<b>.0 + a<b>.0"][..], &["a(x).0 + tau.0"], &["tau.0 + tau.tau.0"]] {
        let u = uni(seeds);
        assert!(u.len() <= 4, "{seeds:?}");
        let suite = Suite::exhaustive(u.len());
        incl.extend(run_statements(&u, &[Group::Weak], &suite, |l| l.starts_with("sum_g")));
    }
    let refused = matches!(
        combined_technique(CombinedDialect::WeakAcp, &uni(&["a<b>.c(y).0"])),
        Err(TechniqueError::AcpRefused { .. })
    );
    let ok = related && separated && incl.len() == 6 && failing(&incl).is_empty() && refused;
    outcome(
        ok,
        format!(
            "τ.a.0 ≈ a.0: {related}; τ.a.0+b.0 ≉ a.0+b.0: {separated}; {} sum_g inclusions, failing {:?}; non-ACP seed refused: {refused}",
            incl.len(),
            failing(&incl)
        ),
    )
}

fn criterion8() -> Outcome {
    let r = check_subst_decomposition(5, &names(&["a", "b"]), &ExplorationBudget::default());
    let c = r.cases;
    outcome(
        r.unmatched.is_empty() && r.transitions > 0,
        format!(
            "{} terms, {} transitions: visible {}, τ {}, communication {}, extrusion {}, late input {}; {} unmatched",
            r.terms,
            r.transitions,
            c.visible,
            c.tau,
            c.communication,
            c.extrusion,
            c.late_input,
            r.unmatched.len()
        ),
    )
}

fn criterion9() -> Outcome {
    let limits = AppendixLimits { max_size: 5, ..Default::default() };
    let mut held = 0;
    let mut bad = Vec::new();
    for op in [OpKind::Op1, OpKind::Op2] {
        for r in check_appendix_claims(op, &limits) {
            if r.holds && r.truncated_pairs == 0 && r.status == ClaimStatus::Claimed {
                held += 1;
            } else {
                bad.push(r.claim);
            }
        }
    }
    let search = search_unsoundness(&SearchParams::default());
    let witness = search.witness.as_ref().map(|w| format!("{:?}", w.relation));
    let mut conj = 0;
    for op in [OpKind::Op3, OpKind::Op4, OpKind::Op5] {
        let rs = check_appendix_claims(op, &limits);
        conj += rs.iter().filter(|r| serde_json::to_string(r).unwrap().contains("CONJECTURE-TEST")).count();
    }
    let ok = held >= 4 && bad.is_empty() && witness.is_some() && conj >= 3;
    outcome(
        ok,
        format!(
            "{held} op1/op2 inclusions hold at size ≤ 5, failing {bad:?}; witness {}; {conj} CONJECTURE-TEST reports",
            witness.unwrap_or_else(|| "none".into())
        ),
    )
}

/// Serialised reports produced from a fixed seed.
fn reports(seed: u64) -> String {
    let u = uni(&["a<b>.0 | c(y).0", "tau.a<b>.0"]);
    let suite = Suite::new(&u, seed, 64);
    let verdicts = run_statements(&u, &[Group::Contexts, Group::Substitution, Group::Weak], &suite, |_| true);
    let laws = derived_law_suite(&u, seed, 64, 8);
    let claims = check_appendix_claims(OpKind::Op2, &AppendixLimits { max_size: 4, ..Default::default() });
    let search = search_unsoundness(&SearchParams { max_size: 5, ..Default::default() });
    serde_json::to_string(&(verdicts, laws, claims, search, repro_damien())).unwrap()
}

fn criterion10() -> Outcome {
    exec::set_strategy(Strategy::Sequential);
    let a = reports(7);
    let b = reports(7);
    exec::set_strategy(Strategy::Parallel);
    let c = reports(7);
    let other = reports(8);
    let ok = a == b && b == c;
    outcome(
        ok,
        format!("{} bytes identical across reruns and strategies: {ok}; other seed differs: {}", a.len(), a != other),
    )
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
        (10, criterion10),
    ];
    let mut unexpected = Vec::new();
    for (n, run) in criteria {
        let t = Instant::now();
        let o = run();
        // written to the raw handle so the report survives output capture
        let line =
            format!("criterion {n}: {} ({:.1?}) {}\n", if o.pass { "PASS" } else { "FAIL" }, t.elapsed(), o.detail);
        let _ = std::io::stderr().write_all(line.as_bytes());
        let expected_fail = EXPECTED_FAILURES.iter().find(|(k, _)| *k == n);
        match expected_fail {
            None if !o.pass => unexpected.push(n),
            Some((_, frag)) if o.pass || !o.detail.contains(frag) => unexpected.push(n),
            _ => {}
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
