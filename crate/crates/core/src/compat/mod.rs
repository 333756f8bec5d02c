//! Transformer inclusions checked pointwise over a sampling suite:
//! compatibility, compatibility with a second function, and their up-to
//! variants.

mod catalogue;
mod damien;
mod laws;
mod soundness;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::exec;
use crate::lts::Universe;
use crate::relation::{bisim_fun, power, Kind, Mode, Relation, SamplingMode, Suite, Transformer};
use crate::syntax::Process;

pub use catalogue::{standard_statements, Group, NamedStatement, Statement};
pub use damien::{repro_damien, DamienReport, DamienStep};
pub use laws::{derived_law_suite, LawOutcome, LawReport};
pub use soundness::{appendix_soundness, soundness_harness, AppendixParams, AppendixVariant, SoundnessReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    /// `f ∘ g^m ⊆ g ∘ f`
    Compatible,
    /// `f ∘ (g^m ∩ h) ⊆ h ∘ f`
    CompatibleWith,
    /// `f ∘ g^m ⊆ g ∘ f′ ∘ f`
    CompatibleUpTo,
    /// `f ∘ (g^m ∩ h) ⊆ h ∘ f′ ∘ f`
    CompatibleWithUpTo,
}

/// A compatibility statement about transformers of one universe.
///
/// `m` is the exponent of `g` on the left-hand side; it is 1 for the plain
/// notions.
#[derive(Clone, Debug)]
pub struct CompatClaim {
    kind: ClaimKind,
    f: Transformer,
    g: Transformer,
    h: Option<Transformer>,
    f_prime: Option<Transformer>,
    m: usize,
}

impl CompatClaim {
    pub fn compatible(f: Transformer, g: Transformer) -> Self {
        CompatClaim { kind: ClaimKind::Compatible, f, g, h: None, f_prime: None, m: 1 }
    }

    pub fn with(f: Transformer, g: Transformer, h: Transformer) -> Self {
        CompatClaim { kind: ClaimKind::CompatibleWith, f, g, h: Some(h), f_prime: None, m: 1 }
    }

    pub fn up_to(f: Transformer, g: Transformer, f_prime: Transformer) -> Self {
        CompatClaim { kind: ClaimKind::CompatibleUpTo, f, g, h: None, f_prime: Some(f_prime), m: 1 }
    }

    pub fn with_up_to(f: Transformer, g: Transformer, h: Transformer, f_prime: Transformer) -> Self {
        CompatClaim { kind: ClaimKind::CompatibleWithUpTo, f, g, h: Some(h), f_prime: Some(f_prime), m: 1 }
    }

    /// Raises `g` to the power `m ≥ 1` on the left-hand side.
    pub fn exponent(mut self, m: usize) -> Self {
        assert!(m >= 1, "exponent must be positive");
        self.m = m;
        self
    }

    pub fn kind(&self) -> ClaimKind {
        self.kind
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.f.universe()
    }

    /// The argument of `f` on the left-hand side.
    fn lhs_inner(&self, r: &Relation) -> Relation {
        let gm = if self.m == 1 { self.g.apply(r) } else { power(&self.g, self.m).apply(r) };
        match &self.h {
            Some(h) => gm.intersect(&h.apply(r)),
            None => gm,
        }
    }

    pub fn lhs(&self, r: &Relation) -> Relation {
        self.f.apply(&self.lhs_inner(r))
    }

    pub fn rhs(&self, r: &Relation) -> Relation {
        let fr = self.f.apply(r);
        let inner = match &self.f_prime {
            Some(fp) => fp.apply(&fr),
            None => fr,
        };
        match &self.h {
            Some(h) => h.apply(&inner),
            None => self.g.apply(&inner),
        }
    }

    /// The first pair of `lhs(r)` outside `rhs(r)`.
    pub fn failure_on(&self, r: &Relation) -> Option<(usize, usize)> {
        self.lhs(r).first_not_in(&self.rhs(r))
    }
}

impl fmt::Display for CompatClaim {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = if self.m == 1 { self.g.name().to_string() } else { format!("{}^{}", self.g.name(), self.m) };
        let inner = match &self.h {
            Some(h) => format!("({g} ∩ {})", h.name()),
            None => g,
        };
        let outer = self.h.as_ref().unwrap_or(&self.g).name();
        let fp = self.f_prime.as_ref().map(|t| format!(" ∘ {}", t.name())).unwrap_or_default();
        let f = self.f.name();
        write!(fm, "{f} ∘ {inner} ⊆ {outer}{fp} ∘ {f}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompatError {
    #[error("`{0}` and `{1}` live on different universes")]
    UniverseMismatch(String, String),
    #[error("`{0}` must be checked expansive for an up-to claim")]
    NotExpansive(String),
    #[error("`{0}` must be checked monotone")]
    NotMonotone(String),
    #[error("suite has {0} states but the universe has {1}")]
    SuiteMismatch(usize, usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// The relation the claim fails on.
    pub relation: Vec<(Process, Process)>,
    /// A pair of the left-hand side missing from the right-hand side.
    pub pair: (Process, Process),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub claim: String,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    pub sampling_mode: SamplingMode,
    /// Relations evaluated.
    pub checked: usize,
    /// The universe was cut off by the exploration budget.
    pub bounded: bool,
    pub universe_hash: String,
}

/// FNV-1a over the universe's JSON form; stable across runs and platforms.
pub fn universe_hash(u: &Universe) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in u.to_json().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn pairs_of(u: &Universe, r: &Relation) -> Vec<(Process, Process)> {
    r.pairs().map(|(i, j)| (u.state(i).clone(), u.state(j).clone())).collect()
}

pub(crate) fn validate(c: &CompatClaim, suite: &Suite) -> Result<(), CompatError> {
    let u = c.universe();
    let others = [Some(&c.g), c.h.as_ref(), c.f_prime.as_ref()];
    for t in others.into_iter().flatten() {
        if !Arc::ptr_eq(t.universe(), u) && t.universe().to_doc() != u.to_doc() {
            return Err(CompatError::UniverseMismatch(c.f.name().into(), t.name().into()));
        }
    }
    if suite.universe_size() != u.len() {
        return Err(CompatError::SuiteMismatch(suite.universe_size(), u.len()));
    }
    if let Some(fp) = &c.f_prime {
        if !(fp.flags().expansive && fp.flags().evidence.is_some()) {
            return Err(CompatError::NotExpansive(fp.name().into()));
        }
    }
    Ok(())
}

/// Evaluates the claim's inclusion on every relation of `suite` and reports
/// the first failure in suite order.
pub fn check_claim(c: &CompatClaim, suite: &Suite) -> Result<Verdict, CompatError> {
    validate(c, suite)?;
    Ok(check_inclusion(&c.to_string(), c.universe(), suite, |r| c.failure_on(r)))
}

/// A pointwise check over `suite`: `fail(R)` returns a pair witnessing the
/// failure on `R`, if any.
pub fn check_inclusion(
    claim: &str,
    u: &Universe,
    suite: &Suite,
    fail: impl Fn(&Relation) -> Option<(usize, usize)> + Sync + Send,
) -> Verdict {
    let hit = exec::find_first_range(suite.len(), |i| {
        let r = suite.get(i);
        fail(&r).map(|p| (r, p))
    });
    Verdict {
        claim: claim.to_string(),
        holds: hit.is_none(),
        counterexample: hit.map(|(r, (i, j))| Counterexample {
            relation: pairs_of(u, &r),
            pair: (u.state(i).clone(), u.state(j).clone()),
        }),
        sampling_mode: suite.mode(),
        checked: suite.len(),
        bounded: u.is_truncated(),
        universe_hash: universe_hash(u),
    }
}

/// Monotonicity of `f` on `suite` as a verdict; the counterexample relation
/// is the smaller one.
pub fn monotone_verdict(f: &Transformer, suite: &Suite) -> Verdict {
    let u = f.universe();
    let hit = f.monotonicity_counterexample(suite);
    Verdict {
        claim: format!("{} is monotone", f.name()),
        holds: hit.is_none(),
        counterexample: hit.map(|(lo, hi)| {
            let (i, j) = f.apply(&lo).first_not_in(&f.apply(&hi)).expect("witness of non-monotonicity");
            Counterexample { relation: pairs_of(u, &lo), pair: (u.state(i).clone(), u.state(j).clone()) }
        }),
        sampling_mode: suite.mode(),
        checked: suite.len(),
        bounded: u.is_truncated(),
        universe_hash: universe_hash(u),
    }
}

/// Re-evaluates a counterexample: whether the claim still fails on exactly
/// that relation with that pair.
pub fn replay(c: &CompatClaim, cx: &Counterexample) -> bool {
    let u = c.universe();
    let idx = |p: &Process| u.index_of(p);
    let mut r = Relation::empty(u.len());
    for (p, q) in &cx.relation {
        match (idx(p), idx(q)) {
            (Some(i), Some(j)) => r.insert(i, j),
            _ => return false,
        }
    }
    match (idx(&cx.pair.0), idx(&cx.pair.1)) {
        (Some(i), Some(j)) => c.lhs(&r).contains(i, j) && !c.rhs(&r).contains(i, j),
        _ => false,
    }
}

/// The functionals of the catalogue, as transformers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `b`: all actions.
    B,
    /// `b_α`: visible actions.
    BAlpha,
    /// `b_τ`: silent actions.
    BTau,
}

/// `b`, `b_α` or `b_τ` (barred: intersected with the argument), strong or weak.
pub fn functional(u: &Arc<Universe>, which: Functional, weak: bool, barred: bool) -> Transformer {
    let kind = match which {
        Functional::B => Kind::All,
        Functional::BAlpha => Kind::Visible,
        Functional::BTau => Kind::Tau,
    };
    let mode = if weak { Mode::Weak } else { Mode::Strong };
    let sub = match which {
        Functional::B => "",
        Functional::BAlpha => "_α",
        Functional::BTau => "_τ",
    };
    let name = format!("{}{}{sub}", if weak { "w" } else { "" }, if barred { "b̄" } else { "b" });
    let v = u.clone();
    let flags = crate::relation::Flags { monotone: true, expansive: false, idempotent: false, evidence: None };
    Transformer::new(name, u.clone(), move |r| bisim_fun(&v, r, kind, mode, barred)).with_flags(flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{reachable_universe, ExplorationBudget};
    use crate::syntax::parse;
    use crate::technique::{instantiate, InstantiateOptions, TechniqueSpec};

    fn uni(srcs: &[&str]) -> Arc<Universe> {
        let seeds: Vec<Process> = srcs.iter().map(|s| parse(s).unwrap()).collect();
        Arc::new(reachable_universe(&seeds, &ExplorationBudget::default()).unwrap())
    }

    fn tech(u: &Arc<Universe>, s: &str) -> Transformer {
        let spec: TechniqueSpec = s.parse().unwrap();
        instantiate(&spec, u, &InstantiateOptions::default()).unwrap().transformer
    }

    #[test]
    fn identity_is_compatible() {
        let u = uni(&["a<a>.0 | tau.0"]);
        assert!(u.len() <= 4);
        let suite = Suite::new(&u, 1, 0);
        for which in [Functional::B, Functional::BAlpha, Functional::BTau] {
            let c = CompatClaim::compatible(Transformer::identity(u.clone()), functional(&u, which, false, false));
            let v = check_claim(&c, &suite).unwrap();
            assert!(v.holds && v.sampling_mode == SamplingMode::Exhaustive);
        }
    }

    #[test]
    fn inp_trivially_with() {
        let u = uni(&["a(x).x<x>.0", "a(x).0", "b(y).0"]);
        let suite = Suite::new(&u, 3, 64);
        let c = CompatClaim::with(
            tech(&u, "inp"),
            functional(&u, Functional::BAlpha, false, true),
            functional(&u, Functional::BTau, false, false),
        );
        assert!(check_claim(&c, &suite).unwrap().holds);
    }

    #[test]
    fn counterexamples_replay() {
        let u = uni(&["a<a>.0 | a<a>.0", "a<a>.0"]);
        let suite = Suite::new(&u, 5, 64);
        let c = CompatClaim::compatible(tech(&u, "pcomp"), functional(&u, Functional::BAlpha, false, false));
        let v = check_claim(&c, &suite).unwrap();
        assert!(!v.holds);
        assert!(replay(&c, v.counterexample.as_ref().unwrap()));
    }

    #[test]
    fn up_to_needs_expansive_evidence() {
        let u = uni(&["tau.0"]);
        let suite = Suite::new(&u, 0, 0);
        let b = functional(&u, Functional::B, false, false);
        let id = Transformer::identity(u.clone());
        let c = CompatClaim::up_to(
            id.clone(),
            b.clone(),
            Transformer::constant("refl", u.clone(), Relation::identity(u.len())),
        );
        assert!(matches!(check_claim(&c, &suite), Err(CompatError::NotExpansive(_))));
        let c = CompatClaim::up_to(id.clone(), b.clone(), id.clone().checked(&suite));
        assert!(check_claim(&c, &suite).unwrap().holds);
        // compatible is compatible up to the identity
        let plain = check_claim(&CompatClaim::compatible(id.clone(), b), &suite).unwrap();
        assert!(plain.holds);
    }
}
