//! Derived composition laws checked on one universe: when a lemma's premises
//! verify for transformers drawn from the catalogue, its conclusion must too.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_claim, check_inclusion, functional, CompatClaim, Functional};
use crate::lts::Universe;
use crate::relation::{compose, intersect, power, union, SamplingMode, Suite, Transformer};
use crate::technique::{instantiate, InstantiateOptions, TechniqueSpec};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub draws: usize,
    /// Draws whose premises all verified.
    pub premise_satisfied: usize,
    /// Draws with a failing premise; these say nothing about the law.
    pub vacuous: usize,
    pub conclusion_held: usize,
    /// Conclusions that failed although the premises verified.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub states: usize,
    pub sampling_mode: SamplingMode,
    pub bounded: bool,
    pub laws: Vec<LawOutcome>,
}

impl LawReport {
    /// Conclusion failures where the suite is exhaustive and the universe
    /// complete, i.e. genuine counterexamples to a law.
    pub fn hard_failures(&self) -> usize {
        if self.sampling_mode == SamplingMode::Exhaustive && !self.bounded {
            self.laws.iter().map(|l| l.failures.len()).sum()
        } else {
            0
        }
    }
}

const CATALOGUE: &[&str] =
    &["id", "refl", "res", "pcomp", "tau", "out", "inp", "sum", "rep", "F(bisim)", "F(cong)", "sub"];

/// Closures usable as the `f′` of an up-to claim.
const CLOSURES: &[&str] =
    &["id", "omega(union(id, refl))", "omega(union(F(bisim), refl))", "omega(union(F(cong), refl))"];

struct Ctx<'a> {
    suite: &'a Suite,
    cache: HashMap<String, bool>,
}

impl Ctx<'_> {
    fn claim(&mut self, c: &CompatClaim) -> bool {
        let key = c.to_string();
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = check_claim(c, self.suite).map(|v| v.holds).unwrap_or(false);
        self.cache.insert(key, v);
        v
    }

    fn flag(&mut self, key: String, f: impl FnOnce(&Suite) -> bool) -> bool {
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = f(self.suite);
        self.cache.insert(key, v);
        v
    }

    fn monotone(&mut self, t: &Transformer) -> bool {
        self.flag(format!("mono {}", t.name()), |s| t.monotonicity_counterexample(s).is_none())
    }

    fn below(&mut self, lo: &Transformer, hi: &Transformer) -> bool {
        let u = lo.universe().clone();
        self.flag(format!("{} ⊆ {}", lo.name(), hi.name()), |s| {
            check_inclusion("", &u, s, |x| lo.apply(x).first_not_in(&hi.apply(x))).holds
        })
    }
}

/// What one draw of a law produced.
enum Draw {
    Vacuous,
    Held,
    Failed(String),
}

fn conclude(ctx: &mut Ctx, premises: bool, conclusions: &[CompatClaim]) -> Draw {
    if !premises {
        return Draw::Vacuous;
    }
    for c in conclusions {
        if !ctx.claim(c) {
            return Draw::Failed(c.to_string());
        }
    }
    Draw::Held
}

/// Evaluates each law on `draws` random picks from the catalogue.
pub fn derived_law_suite(u: &Arc<Universe>, seed: u64, samples: usize, draws: usize) -> LawReport {
    let suite = Suite::new(u, seed, samples);
    let opts = InstantiateOptions::default();
    let mk = |s: &str| -> Option<Transformer> {
        let spec: TechniqueSpec = s.parse().expect("catalogue entry parses");
        instantiate(&spec, u, &opts).ok().map(|i| i.transformer.checked(&suite))
    };
    let fs: Vec<Transformer> = CATALOGUE.iter().filter_map(|s| mk(s)).collect();
    let closures: Vec<Transformer> = CLOSURES.iter().filter_map(|s| mk(s)).collect();
    let b = |w: Functional, barred: bool| functional(u, w, false, barred);
    let gs = vec![
        b(Functional::B, false),
        b(Functional::BAlpha, false),
        b(Functional::BTau, false),
        b(Functional::BAlpha, true),
        b(Functional::BTau, true),
    ];
    // functions below the identity
    let small = vec![b(Functional::BAlpha, true), b(Functional::BTau, true), b(Functional::B, true)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1a5);
    let mut ctx = Ctx { suite: &suite, cache: HashMap::new() };

    type Law = fn(&mut Ctx, &mut ChaCha8Rng, &[Transformer], &[Transformer], &[Transformer], &[Transformer]) -> Draw;
    let laws: Vec<(&str, Law)> = vec![
        ("composition", |ctx, rng, fs, gs, _, _| {
            let (f1, f2, g) = (pick(rng, fs), pick(rng, fs), pick(rng, gs));
            let p = ctx.monotone(&f1)
                && ctx.claim(&CompatClaim::compatible(f1.clone(), g.clone()))
                && ctx.claim(&CompatClaim::compatible(f2.clone(), g.clone()));
            conclude(ctx, p, &[CompatClaim::compatible(compose(&f1, &f2).unwrap(), g)])
        }),
        ("union", |ctx, rng, fs, gs, _, _| {
            let (f1, f2, g) = (pick(rng, fs), pick(rng, fs), pick(rng, gs));
            let p = ctx.monotone(&g)
                && ctx.claim(&CompatClaim::compatible(f1.clone(), g.clone()))
                && ctx.claim(&CompatClaim::compatible(f2.clone(), g.clone()));
            conclude(ctx, p, &[CompatClaim::compatible(union(&f1, &f2).unwrap(), g)])
        }),
        ("meet to with", |ctx, rng, fs, gs, _, _| {
            let (f, g, h) = (pick(rng, fs), pick(rng, gs), pick(rng, gs));
            let p = ctx.claim(&CompatClaim::compatible(f.clone(), intersect(&g, &h).unwrap()));
            conclude(ctx, p, &[CompatClaim::with(f.clone(), g.clone(), h.clone()), CompatClaim::with(f, h, g)])
        }),
        ("with to meet", |ctx, rng, fs, gs, _, _| {
            let (f, g, h) = (pick(rng, fs), pick(rng, gs), pick(rng, gs));
            let p = ctx.monotone(&f)
                && ctx.claim(&CompatClaim::compatible(f.clone(), g.clone()))
                && ctx.claim(&CompatClaim::with(f.clone(), g.clone(), h.clone()));
            conclude(ctx, p, &[CompatClaim::compatible(f, intersect(&g, &h).unwrap())])
        }),
        ("with: composition", |ctx, rng, fs, gs, _, _| {
            let (f1, f2, g, h) = (pick(rng, fs), pick(rng, fs), pick(rng, gs), pick(rng, gs));
            let p = [&f1, &f2].into_iter().all(|f| {
                ctx.monotone(f)
                    && ctx.claim(&CompatClaim::compatible(f.clone(), g.clone()))
                    && ctx.claim(&CompatClaim::with(f.clone(), g.clone(), h.clone()))
            });
            conclude(ctx, p, &[CompatClaim::with(compose(&f1, &f2).unwrap(), g, h)])
        }),
        ("with: union", |ctx, rng, fs, gs, _, _| {
            let (f1, f2, g, h) = (pick(rng, fs), pick(rng, fs), pick(rng, gs), pick(rng, gs));
            let p = ctx.monotone(&f1)
                && ctx.monotone(&f2)
                && ctx.monotone(&h)
                && ctx.claim(&CompatClaim::with(f1.clone(), g.clone(), h.clone()))
                && ctx.claim(&CompatClaim::with(f2.clone(), g.clone(), h.clone()));
            conclude(ctx, p, &[CompatClaim::with(union(&f1, &f2).unwrap(), g, h)])
        }),
        ("compatible is compatible up to", |ctx, rng, fs, gs, cl, _| {
            let (f, g, fp) = (pick(rng, fs), pick(rng, gs), pick(rng, cl));
            let p =
                fp.flags().expansive && ctx.monotone(&g) && ctx.claim(&CompatClaim::compatible(f.clone(), g.clone()));
            conclude(ctx, p, &[CompatClaim::up_to(f, g, fp)])
        }),
        ("up-to promotion", |ctx, rng, fs, gs, cl, _| {
            let (f, g, fp) = (pick(rng, fs), pick(rng, gs), pick(rng, cl));
            let fl = fp.flags();
            let p = fl.idempotent
                && fl.expansive
                && ctx.monotone(&fp)
                && ctx.claim(&CompatClaim::compatible(fp.clone(), g.clone()))
                && ctx.claim(&CompatClaim::up_to(f.clone(), g.clone(), fp.clone()));
            conclude(ctx, p, &[CompatClaim::compatible(compose(&fp, &f).unwrap(), g)])
        }),
        ("weakening", |ctx, rng, fs, gs, _, _| {
            let (f, g, g2, h) = (pick(rng, fs), pick(rng, gs), pick(rng, gs), pick(rng, gs));
            let p = ctx.monotone(&f)
                && ctx.below(&g2, &g)
                && ctx.claim(&CompatClaim::with(f.clone(), g.clone(), h.clone()));
            conclude(ctx, p, &[CompatClaim::with(f, g2, h)])
        }),
        ("exponent merge", |ctx, rng, fs, gs, _, small| {
            let (f1, f2, g, h) = (pick(rng, fs), pick(rng, fs), pick(rng, small), pick(rng, gs));
            let m = rng.gen_range(1..=2);
            let n = rng.gen_range(1..=m);
            let p = ctx.monotone(&f1)
                && ctx.monotone(&f2)
                && ctx.claim(&CompatClaim::compatible(f1.clone(), g.clone()))
                && ctx.claim(&CompatClaim::compatible(f2.clone(), g.clone()))
                && ctx.claim(&CompatClaim::with(f1.clone(), g.clone(), h.clone()).exponent(m))
                && ctx.claim(&CompatClaim::with(f2.clone(), g.clone(), h.clone()).exponent(n));
            conclude(
                ctx,
                p,
                &[
                    CompatClaim::with(compose(&f1, &f2).unwrap(), g.clone(), h.clone()).exponent(m),
                    CompatClaim::with(compose(&f2, &f1).unwrap(), g, h).exponent(m),
                ],
            )
        }),
        ("chain", |ctx, rng, fs, gs, _, _| {
            let (f, g1, g2, g3) = (pick(rng, fs), pick(rng, gs), pick(rng, gs), pick(rng, gs));
            let n = rng.gen_range(1..=2);
            let g12 = intersect(&g1, &g2).unwrap();
            let p = ctx.claim(&CompatClaim::compatible(f.clone(), g12.clone()))
                && ctx.claim(&CompatClaim::with(f.clone(), g2.clone(), g3.clone()).exponent(n));
            let target = intersect(&power(&g12, n), &g3).unwrap();
            conclude(ctx, p, &[CompatClaim::compatible(f, target)])
        }),
    ];

    let mut outcomes = Vec::new();
    for (name, law) in laws {
        let mut o = LawOutcome { law: name.to_string(), draws, ..Default::default() };
        for _ in 0..draws {
            match law(&mut ctx, &mut rng, &fs, &gs, &closures, &small) {
                Draw::Vacuous => o.vacuous += 1,
                Draw::Held => {
                    o.premise_satisfied += 1;
                    o.conclusion_held += 1;
                }
                Draw::Failed(c) => {
                    o.premise_satisfied += 1;
                    o.failures.push(c);
                }
            }
        }
        outcomes.push(o);
    }
    LawReport { states: u.len(), sampling_mode: suite.mode(), bounded: u.is_truncated(), laws: outcomes }
}

fn pick(rng: &mut ChaCha8Rng, xs: &[Transformer]) -> Transformer {
    xs.choose(rng).expect("non-empty catalogue").clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{reachable_universe, ExplorationBudget};
    use crate::syntax::{parse, Process};

    fn uni(srcs: &[&str]) -> Arc<Universe> {
        let seeds: Vec<Process> = srcs.iter().map(|s| parse(s).unwrap()).collect();
        Arc::new(reachable_universe(&seeds, &ExplorationBudget::default()).unwrap())
    }

    #[test]
    fn laws_hold_where_premises_do() {
        let u = uni(&["tau.0 | a<a>.0", "tau.a<a>.0"]);
        let r = derived_law_suite(&u, 11, 24, 6);
        for l in &r.laws {
            assert_eq!(l.draws, l.vacuous + l.premise_satisfied);
            assert!(l.failures.is_empty(), "{l:?}");
        }
        assert!(r.laws.iter().any(|l| l.premise_satisfied > 0));
    }

    #[test]
    fn chain_with_one_function_is_plain_compatibility() {
        let u = uni(&["tau.0 | tau.0", "tau.tau.0"]);
        let suite = Suite::new(&u, 2, 32);
        let b = functional(&u, Functional::B, false, false);
        let f: Transformer = {
            let spec: TechniqueSpec = "refl".parse().unwrap();
            instantiate(&spec, &u, &InstantiateOptions::default()).unwrap().transformer
        };
        let bb = intersect(&b, &b).unwrap();
        let chained = intersect(&power(&bb, 1), &b).unwrap();
        let a = check_claim(&CompatClaim::compatible(f.clone(), chained), &suite).unwrap();
        let plain = check_claim(&CompatClaim::compatible(f, b), &suite).unwrap();
        assert_eq!(a.holds, plain.holds);
    }
}
