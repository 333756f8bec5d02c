use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::{instantiate, Base, InstantiateOptions, TechniqueError, TechniqueSpec};
use crate::lts::{make_pool, reachable_universe_with_pool, Action, ExplorationBudget, LtsError, Universe};
use crate::relation::{bisim_fun, gfp_of, unmatched_move, Kind, Mode, Relation};
use crate::subcalc::{check_acp, AcpMode};
use crate::syntax::{alpha_canonical, Name, Process};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Strong,
    Weak,
}

impl Target {
    fn mode(self) -> Mode {
        match self {
            Target::Strong => Mode::Strong,
            Target::Weak => Mode::Weak,
        }
    }
}

#[derive(Clone, Debug)]
pub struct UptoOptions {
    pub target: Target,
    pub barred: bool,
    pub budget: ExplorationBudget,
    /// Rounds of universe extension by escaping processes.
    pub extend_rounds: usize,
    /// Also verify `f^ω(R) ⊆` bisimilarity on the universe.
    pub certify: bool,
    pub instantiate: InstantiateOptions,
}

impl Default for UptoOptions {
    fn default() -> Self {
        UptoOptions {
            target: Target::Strong,
            barred: false,
            budget: ExplorationBudget::default(),
            extend_rounds: 1,
            certify: true,
            instantiate: InstantiateOptions::default(),
        }
    }
}

/// A move of one side of a pair that the other side cannot answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unmatched {
    pub left: Process,
    pub right: Process,
    /// Which side moved: `left` or `right`.
    pub mover: &'static str,
    pub action: Action,
    pub target: Process,
}

#[derive(Clone, Debug, Serialize)]
pub struct UptoVerdict {
    pub technique: String,
    pub target: Target,
    pub barred: bool,
    pub holds: bool,
    pub failure: Option<Unmatched>,
    /// Pairs of the relation missing from `f(R)` (barred checks only).
    pub not_in_f: Option<(Process, Process)>,
    pub states: usize,
    pub escapes: usize,
    pub log: Vec<String>,
    /// Whether `f^ω(R)` is contained in bisimilarity on the universe.
    pub certified: Option<bool>,
    /// The universe was cut off by the budget.
    pub bounded: bool,
}

fn universe(seeds: &[Process], pool: &[Name], budget: &ExplorationBudget) -> Result<Universe, LtsError> {
    reachable_universe_with_pool(seeds, pool, budget)
}

/// Checks `R ⊆ b(f(R))` (or its barred or weak variant) for the relation
/// given by `pairs`, on the universe they generate.
pub fn upto_check(
    pairs: &[(Process, Process)],
    spec: &TechniqueSpec,
    opts: &UptoOptions,
) -> Result<UptoVerdict, TechniqueError> {
    let pairs: Vec<(Process, Process)> = pairs.iter().map(|(p, q)| (alpha_canonical(p), alpha_canonical(q))).collect();
    let seeds: Vec<Process> = pairs.iter().flat_map(|(p, q)| [p.clone(), q.clone()]).collect();
    let fns: BTreeSet<Name> = seeds.iter().flat_map(|p| p.free_names()).collect();
    let pool = make_pool(&fns, opts.budget.fresh);
    let lts = |e: LtsError| TechniqueError::Parse(e.to_string());
    let mut u = Arc::new(universe(&seeds, &pool, &opts.budget).map_err(lts)?);
    let relation_on = |u: &Universe| {
        Relation::from_pairs(u.len(), pairs.iter().map(|(p, q)| (u.index_of(p).unwrap(), u.index_of(q).unwrap())))
    };
    let mut inst = instantiate(spec, &u, &opts.instantiate)?;
    for _ in 0..opts.extend_rounds {
        let esc = inst.escapes(&relation_on(&u));
        if esc.is_empty() {
            break;
        }
        let extra: Vec<Process> =
            esc.into_iter().flat_map(|(p, q)| [p, q]).collect::<BTreeSet<_>>().into_iter().collect();
        u = Arc::new(u.extend(&extra).map_err(lts)?);
        inst = instantiate(spec, &u, &opts.instantiate)?;
    }
    let r = relation_on(&u);
    let fr = inst.apply(&r);
    let escapes = inst.escapes(&r).len();
    let mode = opts.target.mode();
    let not_in_f = if opts.barred { r.first_not_in(&fr) } else { None };
    let mut failure = None;
    for (p, q) in r.pairs() {
        if let Some((a, t)) = unmatched_move(&u, &fr, p, q, Kind::All, mode) {
            failure = Some(Unmatched {
                left: u.state(p).clone(),
                right: u.state(q).clone(),
                mover: "left",
                action: u.action(a).clone(),
                target: u.state(t).clone(),
            });
            break;
        }
        if let Some((a, t)) = unmatched_move(&u, &fr.inverse(), q, p, Kind::All, mode) {
            failure = Some(Unmatched {
                left: u.state(p).clone(),
                right: u.state(q).clone(),
                mover: "right",
                action: u.action(a).clone(),
                target: u.state(t).clone(),
            });
            break;
        }
    }
    let holds = failure.is_none() && not_in_f.is_none();
    let certified = (holds && opts.certify).then(|| {
        let n = u.len();
        let bis = gfp_of(n, |x| bisim_fun(&u, x, Kind::All, mode, false));
        crate::relation::omega(&inst.transformer).apply(&r).is_subset(&bis)
    });
    Ok(UptoVerdict {
        technique: spec.to_string(),
        target: opts.target,
        barred: opts.barred,
        holds,
        failure,
        not_in_f: not_in_f.map(|(p, q)| (u.state(p).clone(), u.state(q).clone())),
        states: u.len(),
        escapes,
        log: u.log().to_vec(),
        certified,
        bounded: u.is_truncated(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombinedDialect {
    /// Bisimilarity, identity, reflexivity and non-input evaluation contexts.
    FullNoninput,
    /// All contexts plus substitution; needs the aliased communication property.
    AcpFull,
    /// The weak version with expansion and guarded sums.
    WeakAcp,
}

impl std::str::FromStr for CombinedDialect {
    type Err = TechniqueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full-noninput" => Ok(CombinedDialect::FullNoninput),
            "acp-full" => Ok(CombinedDialect::AcpFull),
            "weak-acp" => Ok(CombinedDialect::WeakAcp),
            other => Err(TechniqueError::Parse(format!("unknown combined technique `{other}`"))),
        }
    }
}

impl CombinedDialect {
    pub fn spec(self) -> TechniqueSpec {
        use TechniqueSpec as T;
        let parts = match self {
            CombinedDialect::FullNoninput => vec![T::Id, T::F(Base::Bisim), T::Refl, T::Res, T::Pcomp],
            CombinedDialect::AcpFull => vec![
                T::F(Base::Bisim),
                T::Id,
                T::Refl,
                T::Sub,
                T::Res,
                T::Pcomp,
                T::Sum,
                T::Rep,
                T::Tau,
                T::Out,
                T::Inp,
            ],
            CombinedDialect::WeakAcp => vec![
                T::F(Base::Expansion),
                T::Id,
                T::Refl,
                T::Sub,
                T::Res,
                T::Pcomp,
                T::SumG,
                T::Rep,
                T::Tau,
                T::Out,
                T::Inp,
            ],
        };
        T::Union(parts).omega()
    }
}

/// The combined technique for `dialect`, refused when a state of `u`
/// violates the (weak) aliased communication property it relies on.
pub fn combined_technique(dialect: CombinedDialect, u: &Universe) -> Result<TechniqueSpec, TechniqueError> {
    let mode = match dialect {
        CombinedDialect::FullNoninput => return Ok(dialect.spec()),
        CombinedDialect::AcpFull => AcpMode::Strong,
        CombinedDialect::WeakAcp => AcpMode::Weak,
    };
    for p in u.states() {
        let report = check_acp(p, mode, u.pool(), u.budget()).map_err(|e| TechniqueError::Parse(e.to_string()))?;
        if !report.holds() {
            return Err(TechniqueError::AcpRefused { technique: dialect.spec().to_string(), process: p.to_string() });
        }
    }
    Ok(dialect.spec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::reachable_universe;
    use crate::syntax::parse;

    fn pair(a: &str, b: &str) -> (Process, Process) {
        (parse(a).unwrap(), parse(b).unwrap())
    }

    #[test]
    fn parallel_taus() {
        let spec = CombinedDialect::FullNoninput.spec();
        let v = upto_check(&[pair("tau.0 | tau.0", "tau.tau.0")], &spec, &UptoOptions::default()).unwrap();
        assert!(v.holds, "{v:?}");
        assert_eq!(v.certified, Some(true));
    }

    #[test]
    fn empty_relation_holds() {
        let u = Arc::new(reachable_universe(&[parse("a<a>.0").unwrap()], &ExplorationBudget::default()).unwrap());
        let i = instantiate(&TechniqueSpec::Refl, &u, &InstantiateOptions::default()).unwrap();
        let r = Relation::empty(u.len());
        let fr = i.apply(&r);
        assert!(r.is_subset(&bisim_fun(&u, &fr, Kind::All, Mode::Strong, false)));
        assert!(upto_check(&[], &TechniqueSpec::Refl, &UptoOptions::default()).unwrap().holds);
    }

    #[test]
    fn different_prefixes_fail() {
        let v = upto_check(&[pair("a<a>.0", "b<b>.0")], &TechniqueSpec::Refl, &UptoOptions::default()).unwrap();
        assert!(!v.holds);
        let f = v.failure.unwrap();
        assert_eq!(f.mover, "left");
        assert_eq!(f.action.subject(), Some(&Name::new("a")));
    }

    #[test]
    fn weak_target() {
        let opts = UptoOptions { target: Target::Weak, ..Default::default() };
        let v = upto_check(&[pair("tau.a<a>.0", "a<a>.0")], &TechniqueSpec::Refl, &opts).unwrap();
        assert!(v.holds, "{v:?}");
        let v = upto_check(&[pair("tau.a<a>.0 + b<b>.0", "a<a>.0 + b<b>.0")], &TechniqueSpec::Refl, &opts).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn combined_refuses_without_acp() {
        let budget = ExplorationBudget::default();
        let bad = reachable_universe(&[parse("a<b>.c(y).0").unwrap()], &budget).unwrap();
        assert!(matches!(combined_technique(CombinedDialect::AcpFull, &bad), Err(TechniqueError::AcpRefused { .. })));
        assert!(matches!(combined_technique(CombinedDialect::WeakAcp, &bad), Err(TechniqueError::AcpRefused { .. })));
        assert!(combined_technique(CombinedDialect::FullNoninput, &bad).is_ok());
        let good = reachable_universe(&[parse("a<b>.0 | c(y).0").unwrap()], &budget).unwrap();
        let spec = combined_technique(CombinedDialect::WeakAcp, &good).unwrap();
        assert!(spec.to_string().contains("sum_g") && !spec.to_string().contains("sum,"));
    }
}
