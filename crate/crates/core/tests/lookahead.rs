use piupto::lookahead::*;
use piupto::relation::Suite;
use proptest::prelude::*;

fn p(s: &str) -> LProcess {
    lparse(s).unwrap()
}

fn moves(s: &str) -> Vec<(String, String)> {
    lstep(&p(s)).into_iter().map(|(l, q)| (l.to_string(), q.to_string())).collect()
}

#[test]
fn rule_examples() {
    assert_eq!(moves("op(a.a.0)"), vec![("a".into(), "0".into())]);
    assert!(moves("op(a.0)").is_empty());
    assert_eq!(moves("op1(b.b.0)"), vec![("a".into(), "0".into())]);
    assert_eq!(moves("op2(a.b.a.0)"), vec![("a".into(), "a.0".into())]);
    assert!(moves("op2(b.b.0)").is_empty());
    assert_eq!(moves("op2m(b.b.0)"), vec![("a".into(), "0".into())]);
    assert_eq!(moves("op3(2.2.0)"), vec![("3".into(), "0".into())]);
    assert!(moves("op3(2.1.0)").is_empty());
    assert_eq!(moves("op4(2.1.0)"), vec![("3".into(), "0".into())]);
    assert_eq!(moves("op5(2.1.0)"), vec![("2".into(), "0".into())]);
    assert!(moves("op5(1.2.0)").is_empty());
}

#[test]
fn parse_round_trips_and_rejects() {
    for s in ["0", "a.b.0", "op(a.a.0)", "op2m(b.op1(b.b.0))", "3.op4(1.2.0)"] {
        assert_eq!(p(s).to_string(), s);
    }
    assert_eq!(p("a"), p("a.0"));
    assert_eq!(p("(a.(b))"), p("a.b.0"));
    for bad in ["0.a", "c.0", "op(a", "op7(0)", "0 0"] {
        assert!(lparse(bad).is_err(), "{bad}");
    }
    assert!(lparse("0.0").is_err());
}

#[test]
fn rule_faithfulness_audit() {
    // op-family transitions exist exactly when a two-step premise does
    let all_ops = OpKind::ALL;
    let labels = [Label::A, Label::B, Label::N(1), Label::N(2)];
    for t in enumerate(4, &labels, &[]) {
        for k in all_ops {
            let got = lstep(&LProcess::op(k, t.clone()));
            let mut want = Vec::new();
            for (l1, t1) in lstep(&t) {
                for (l2, t2) in lstep(&t1) {
                    if let Some(l) = k.fire(l1, l2) {
                        want.push((l, t2));
                    }
                }
            }
            want.sort();
            want.dedup();
            assert_eq!(got, want);
            if k == OpKind::Op1 {
                assert!(got.iter().all(|(l, _)| *l == Label::A));
            }
        }
    }
}

#[test]
fn gfp_examples() {
    let u = LUniverse::reachable(&[p("a.0"), p("a.a.0"), p("b.0"), p("op1(b.b.0)")]);
    let i = |s: &str| u.index_of(&p(s)).unwrap();
    assert!(!l_gfp(&u, LFamily::A).contains(i("a.0"), i("a.a.0")));
    assert!(l_gfp(&u, LFamily::A).contains(i("op1(b.b.0)"), i("a.0")));
    assert!(l_gfp(&u, LFamily::B).contains(i("op1(b.b.0)"), i("0")));
    for fam in [LFamily::All, LFamily::A, LFamily::B, LFamily::UpTo(1)] {
        assert!(l_gfp(&u, fam).contains(i("0"), i("0")));
    }
    let mut c = Canon::new();
    assert!(c.bisimilar(&p("op(a.a.a.0)"), &p("a.a.0")));
    assert!(!c.bisimilar(&p("a.0"), &p("a.a.0")));
}

#[test]
fn b_n_chain_shrinks() {
    let terms = enumerate(4, &[Label::N(1), Label::N(2), Label::N(3)], &[OpKind::Op4]);
    let u = LUniverse::reachable(&terms);
    for n in 1..4 {
        let big = l_gfp(&u, LFamily::UpTo(n + 1));
        assert!(big.is_subset(&l_gfp(&u, LFamily::UpTo(n))));
    }
}

/// The symbolic check agrees with enumeration of every relation on small
/// closed universes, for true and false claims alike.
#[test]
fn symbolic_check_matches_brute_force() {
    let seeds = [
        vec!["b.b.0", "b.0", "a.0"],
        vec!["op1(b.b.0)", "a.0"],
        vec!["op(a.a.0)", "a.0"],
        vec!["a.b.0", "a.0"],
        vec!["a.a.0", "a.0"],
        vec!["2.1.0", "1.0"],
    ];
    for seed in seeds {
        let terms: Vec<LProcess> = seed.iter().map(|s| p(s)).collect();
        let u = LUniverse::reachable(&terms);
        assert!(u.len() <= 4, "{}", u.len());
        let suite = Suite::exhaustive(u.len());
        for op in OpKind::ALL {
            for (claim, _, _) in appendix_claims(op, 2) {
                let brute = claim.check_universe(&LUniverse::reachable(&with_ops(&u, op)), &full_suite(&u, op, &suite));
                let (_, _, over, cx) = claim.check_terms(u.states(), 4096);
                assert_eq!(over, 0);
                assert_eq!(brute.is_none(), cx.is_none(), "{claim} on {seed:?}: brute {brute:?} symbolic {cx:?}");
            }
        }
    }
}

/// The universe plus the `op` images of its states, so the lhs is complete.
fn with_ops(u: &LUniverse, op: OpKind) -> Vec<LProcess> {
    let mut v = u.states().to_vec();
    v.extend(u.states().iter().map(|s| LProcess::op(op, s.clone())));
    v
}

/// Relations over the larger universe that only relate states of `u`; the
/// claim's lhs only reads `R` on `u`, its rhs reads `R` on derivatives.
fn full_suite(u: &LUniverse, op: OpKind, small: &Suite) -> Suite {
    let big = LUniverse::reachable(&with_ops(u, op));
    let map: Vec<usize> = u.states().iter().map(|s| big.index_of(s).unwrap()).collect();
    let rels = small
        .iter()
        .map(|r| piupto::relation::Relation::from_pairs(big.len(), r.pairs().map(|(i, j)| (map[i], map[j]))))
        .collect();
    Suite::from_relations(big.len(), rels)
}

#[test]
fn original_op_is_not_compatible() {
    let r = check_appendix_claims(OpKind::Op, &AppendixLimits { max_size: 4, ..Default::default() });
    assert!(!r[0].holds);
    let cx = r[0].counterexample.as_ref().unwrap();
    assert_eq!(cx.via, "op");
}

#[test]
fn op1_op2_claims_hold_small() {
    for op in [OpKind::Op1, OpKind::Op2, OpKind::Op2Mu] {
        for r in check_appendix_claims(op, &AppendixLimits { max_size: 4, ..Default::default() }) {
            assert_eq!(r.status, ClaimStatus::Claimed);
            assert!(r.holds, "{}: {:?}", r.claim, r.counterexample);
            assert_eq!(r.truncated_pairs, 0);
        }
    }
}

#[test]
fn conjecture_reports_are_labelled() {
    for op in [OpKind::Op3, OpKind::Op4, OpKind::Op5] {
        let reports = check_appendix_claims(op, &AppendixLimits { max_size: 3, max_label: 2, ..Default::default() });
        assert!(reports.len() >= 3);
        assert!(reports.iter().all(|r| r.status != ClaimStatus::Claimed && r.expected.is_none()));
        let json = serde_json::to_string(&reports[0]).unwrap();
        assert!(json.contains("CONJECTURE-TEST"), "{json}");
    }
}

#[test]
fn search_finds_witness_and_none_without_op() {
    let small = SearchParams { max_size: 4, ..Default::default() };
    let r = search_unsoundness(&small);
    let w = r.witness.expect("witness");
    let mut c = Canon::new();
    let (l, rr) = &w.non_bisimilar;
    assert!(!c.bisimilar(&p(l), &p(rr)));
    assert!(w.moves.iter().any(|m| m.reason.contains("op(")));
    let without = search_unsoundness(&small.clone().without_op());
    assert!(without.witness.is_none());
    assert!(without.candidates > 0);
}

#[test]
fn bisimilar_relations_never_witness() {
    let terms = enumerate(4, &[Label::A], &[OpKind::Op]);
    let ctxs = contexts(2, &[Label::A], &OpKind::ALL);
    let mut c = Canon::new();
    for x in &terms {
        for y in &terms {
            if c.bisimilar(x, y) {
                assert!(naive_check(&[(x.clone(), y.clone())], &ctxs, &mut c).is_some());
            }
        }
    }
}

fn arb_term() -> impl Strategy<Value = LProcess> {
    let leaf = Just(LProcess::Nil);
    leaf.prop_recursive(5, 16, 1, |inner| {
        prop_oneof![
            (prop_oneof![Just(Label::A), Just(Label::B), (1u32..4).prop_map(Label::N)], inner.clone())
                .prop_map(|(l, t)| LProcess::prefix(l, t)),
            (proptest::sample::select(OpKind::ALL.to_vec()), inner).prop_map(|(k, t)| LProcess::op(k, t)),
        ]
    })
}

proptest! {
    #[test]
    fn parse_display_round_trip(t in arb_term()) {
        prop_assert_eq!(lparse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn derivatives_are_smaller(t in arb_term()) {
        for (_, q) in lstep(&t) {
            prop_assert!(q.size() < t.size());
        }
    }

    #[test]
    fn canon_agrees_with_gfp(a in arb_term(), b in arb_term()) {
        let u = LUniverse::reachable(&[a.clone(), b.clone()]);
        let g = l_gfp(&u, LFamily::All);
        let mut c = Canon::new();
        prop_assert_eq!(g.contains(u.index_of(&a).unwrap(), u.index_of(&b).unwrap()), c.bisimilar(&a, &b));
    }
}

#[test]
fn chain_premises_agree_with_claims() {
    let seeds: [&[&str]; 3] =
        [&["op3(1.1.0)", "2.0"], &["op4(1.2.0)", "3.0", "op4(2.1.0)"], &["op5(2.1.0)", "2.0", "op5(3.1.1.0)"]];
    for (op, seed) in [OpKind::Op3, OpKind::Op4, OpKind::Op5].into_iter().zip(seeds) {
        let terms: Vec<LProcess> = seed.iter().map(|s| p(s)).collect();
        let u = LUniverse::reachable(&terms);
        let suite = l_suite(&u, 7, 256);
        let report = chain_on_universe(op, 3, &u, &suite);
        let symbolic = check_appendix_claims(op, &AppendixLimits { max_size: 4, max_label: 3, ..Default::default() });
        assert!(report.decreasing);
        for (name, ok) in &report.premises {
            let sym = symbolic.iter().find(|r| &r.claim == name).unwrap();
            if sym.holds {
                assert!(ok, "{name}");
            }
        }
        if report.premises.iter().all(|(_, ok)| *ok) {
            assert!(report.sound, "{report:?}");
        }
        assert!(report.progressions > 0);
    }
}
