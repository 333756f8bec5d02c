use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use piupto::compat::{standard_statements, Group};
use piupto::exec::{self, Strategy};
use piupto::lookahead::{check_appendix_claims, AppendixLimits, OpKind};
use piupto::lts::{make_pool, reachable_universe_with_pool, ExplorationBudget};
use piupto::relation::Suite;
use piupto::subcalc::{check_acp, AcpMode};
use piupto::syntax::{enumerate_terms, names, parse, Dialect};

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn acp_sweep(c: &mut Criterion) {
    let terms = enumerate_terms(5, &names(&["a", "b"]), Dialect::Async);
    let budget = ExplorationBudget::default();
    let mut g = c.benchmark_group("acp_sweep_async_5");
    g.sample_size(10);
    for (name, s) in STRATEGIES {
        exec::set_strategy(s);
        g.bench_function(name, |b| {
            b.iter(|| {
                exec::map(&terms, |t| {
                    let pool = make_pool(&t.free_names(), 1);
                    check_acp(t, AcpMode::Weak, &pool, &budget).unwrap().holds()
                })
            })
        });
    }
    g.finish();
}

fn catalogue(c: &mut Criterion) {
    let seeds = [parse("a<b>.0 | c(y).0").unwrap(), parse("tau.a<b>.0").unwrap()];
    let pool = make_pool(&seeds.iter().flat_map(|p| p.free_names()).collect(), 1);
    let u = std::sync::Arc::new(reachable_universe_with_pool(&seeds, &pool, &ExplorationBudget::default()).unwrap());
    let suite = Suite::new(&u, 1, 256);
    let stmts = standard_statements(&u, &[Group::Contexts], &suite).unwrap();
    let mut g = c.benchmark_group("catalogue_contexts");
    g.sample_size(10);
    for (name, s) in STRATEGIES {
        exec::set_strategy(s);
        g.bench_function(name, |b| {
            b.iter(|| stmts.iter().filter(|st| st.evaluate(black_box(&suite)).unwrap().holds).count())
        });
    }
    g.finish();
}

fn lookahead_claims(c: &mut Criterion) {
    let limits = AppendixLimits { max_size: 4, ..Default::default() };
    let mut g = c.benchmark_group("lookahead_op2_size4");
    g.sample_size(10);
    for (name, s) in STRATEGIES {
        exec::set_strategy(s);
        g.bench_function(name, |b| b.iter(|| check_appendix_claims(OpKind::Op2, black_box(&limits))));
    }
    g.finish();
}

criterion_group!(benches, acp_sweep, catalogue, lookahead_claims);
criterion_main!(benches);
