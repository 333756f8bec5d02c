use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{gfp_of, Relation, SamplingMode, Suite};
use crate::exec;
use crate::lts::Universe;

type Map = dyn Fn(&Relation) -> Relation + Send + Sync;

/// Properties established by sampling. A flag is only ever set after the
/// corresponding check passed on a suite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub monotone: bool,
    pub expansive: bool,
    pub idempotent: bool,
    /// How the flags were established, if they were checked at all.
    pub evidence: Option<SamplingMode>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformerError {
    #[error("transformers `{0}` and `{1}` live on different universes")]
    UniverseMismatch(String, String),
    #[error("`{name}` is not monotone: f({below:?}) ⊄ f({above:?})")]
    NotMonotone { name: String, below: Vec<(usize, usize)>, above: Vec<(usize, usize)> },
    #[error("`{0}` has not been checked monotone")]
    Unchecked(String),
}

/// A named map on the relations of one universe.
#[derive(Clone)]
pub struct Transformer {
    name: String,
    universe: Arc<Universe>,
    f: Arc<Map>,
    flags: Flags,
}

impl fmt::Debug for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transformer").field("name", &self.name).field("flags", &self.flags).finish()
    }
}

impl Transformer {
    pub fn new(
        name: impl Into<String>,
        universe: Arc<Universe>,
        f: impl Fn(&Relation) -> Relation + Send + Sync + 'static,
    ) -> Transformer {
        Transformer { name: name.into(), universe, f: Arc::new(f), flags: Flags::default() }
    }

    pub fn identity(universe: Arc<Universe>) -> Transformer {
        Transformer::new("id", universe, Relation::clone)
    }

    /// The constant map to `r`.
    pub fn constant(name: impl Into<String>, universe: Arc<Universe>, r: Relation) -> Transformer {
        Transformer::new(name, universe, move |_| r.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Transformer {
        self.name = name.into();
        self
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn apply(&self, r: &Relation) -> Relation {
        (self.f)(r)
    }

    fn same_universe(&self, other: &Transformer) -> Result<(), TransformerError> {
        if Arc::ptr_eq(&self.universe, &other.universe) {
            Ok(())
        } else {
            Err(TransformerError::UniverseMismatch(self.name.clone(), other.name.clone()))
        }
    }

    /// First `(R, S)` with `R ⊆ S` and `f(R) ⊄ f(S)`.
    pub fn monotonicity_counterexample(&self, suite: &Suite) -> Option<(Relation, Relation)> {
        match suite.mode() {
            SamplingMode::Exhaustive => {
                let bits = suite.universe_size().pow(2);
                let images = exec::map_range(suite.len(), |c| self.apply(&suite.get(c)));
                exec::find_first_range(suite.len(), |c| {
                    (0..bits)
                        .filter(|k| c >> k & 1 == 0)
                        .find(|k| !images[c].is_subset(&images[c | 1 << k]))
                        .map(|k| (suite.get(c), suite.get(c | 1 << k)))
                })
            }
            SamplingMode::Sampled => {
                let chains = suite.chains();
                exec::find_first(&chains, |(r, s)| {
                    (!self.apply(r).is_subset(&self.apply(s))).then(|| (r.clone(), s.clone()))
                })
            }
        }
    }

    /// Checks monotonicity, expansiveness and idempotence on `suite` and
    /// records what held.
    pub fn checked(mut self, suite: &Suite) -> Transformer {
        let monotone = self.monotonicity_counterexample(suite).is_none();
        let (expansive, idempotent) = exec::map_range(suite.len(), |i| {
            let r = suite.get(i);
            let fr = self.apply(&r);
            (r.is_subset(&fr), self.apply(&fr) == fr)
        })
        .into_iter()
        .fold((true, true), |(e, d), (x, y)| (e && x, d && y));
        self.flags = Flags { monotone, expansive, idempotent, evidence: Some(suite.mode()) };
        self
    }

    /// Asserts flags without checking; for maps monotone by construction
    /// over a suite already checked elsewhere.
    pub fn with_flags(mut self, flags: Flags) -> Transformer {
        self.flags = flags;
        self
    }

    /// Greatest fixpoint, refused unless the map was checked monotone.
    pub fn gfp(&self) -> Result<Relation, TransformerError> {
        if !self.flags.monotone {
            return Err(TransformerError::Unchecked(self.name.clone()));
        }
        Ok(gfp_of(self.universe.len(), |r| self.apply(r)))
    }

    /// Like [`Transformer::gfp`], checking monotonicity on `suite` first.
    pub fn gfp_checked(&self, suite: &Suite) -> Result<Relation, TransformerError> {
        if let Some((below, above)) = self.monotonicity_counterexample(suite) {
            return Err(TransformerError::NotMonotone {
                name: self.name.clone(),
                below: below.pairs().collect(),
                above: above.pairs().collect(),
            });
        }
        Ok(gfp_of(self.universe.len(), |r| self.apply(r)))
    }
}

/// Combined flags where both operands' flags carry over.
fn both(a: &Transformer, b: &Transformer, expansive: bool) -> Flags {
    let checked = a.flags.evidence.is_some() && b.flags.evidence.is_some();
    Flags {
        monotone: a.flags.monotone && b.flags.monotone,
        expansive: expansive && a.flags.expansive && b.flags.expansive,
        idempotent: false,
        evidence: if checked { a.flags.evidence.max(b.flags.evidence) } else { None },
    }
}

/// `f ∘ g`: apply `g` first.
pub fn compose(f: &Transformer, g: &Transformer) -> Result<Transformer, TransformerError> {
    f.same_universe(g)?;
    let (ff, gf) = (f.f.clone(), g.f.clone());
    let flags = both(f, g, true);
    Ok(Transformer::new(format!("{}∘{}", f.name, g.name), f.universe.clone(), move |r| ff(&gf(r))).with_flags(flags))
}

pub fn union(f: &Transformer, g: &Transformer) -> Result<Transformer, TransformerError> {
    f.same_universe(g)?;
    let (ff, gf) = (f.f.clone(), g.f.clone());
    let mut flags = both(f, g, false);
    flags.expansive = f.flags.expansive || g.flags.expansive;
    Ok(Transformer::new(format!("{}∪{}", f.name, g.name), f.universe.clone(), move |r| ff(r).union(&gf(r)))
        .with_flags(flags))
}

/// Union of a non-empty list.
pub fn union_all(fs: &[Transformer]) -> Result<Transformer, TransformerError> {
    let mut acc = fs.first().expect("union of no transformers").clone();
    for g in &fs[1..] {
        acc = union(&acc, g)?;
    }
    Ok(acc)
}

pub fn intersect(f: &Transformer, g: &Transformer) -> Result<Transformer, TransformerError> {
    f.same_universe(g)?;
    let (ff, gf) = (f.f.clone(), g.f.clone());
    let flags = both(f, g, true);
    Ok(Transformer::new(format!("{}∩{}", f.name, g.name), f.universe.clone(), move |r| ff(r).intersect(&gf(r)))
        .with_flags(flags))
}

/// `f^n`, with `f^0` the identity.
pub fn power(f: &Transformer, n: usize) -> Transformer {
    let ff = f.f.clone();
    let mut flags = f.flags;
    if n == 0 {
        flags = Flags { monotone: true, expansive: true, idempotent: true, evidence: f.flags.evidence };
    } else if n > 1 {
        flags.idempotent = false;
    }
    Transformer::new(format!("{}^{n}", f.name), f.universe.clone(), move |r| {
        let mut x = r.clone();
        for _ in 0..n {
            x = ff(&x);
        }
        x
    })
    .with_flags(flags)
}

/// `f^ω(R)`: the least `S ⊇ R` with `f(S) ⊆ S`, i.e. the least fixpoint of
/// `S ↦ R ∪ f(S)`. Finite lattices make the iteration terminate.
pub fn omega(f: &Transformer) -> Transformer {
    let ff = f.f.clone();
    let flags =
        Flags { monotone: f.flags.monotone, expansive: true, idempotent: f.flags.monotone, evidence: f.flags.evidence };
    Transformer::new(format!("{}^ω", f.name), f.universe.clone(), move |r| {
        let mut s = r.clone();
        loop {
            let next = r.union(&ff(&s)).union(&s);
            if next == s {
                return s;
            }
            s = next;
        }
    })
    .with_flags(flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{reachable_universe, ExplorationBudget};
    use crate::relation::{bisim_fun, Kind, Mode};
    use crate::syntax::parse;

    fn uni(s: &str) -> Arc<Universe> {
        Arc::new(reachable_universe(&[parse(s).unwrap()], &ExplorationBudget::default()).unwrap())
    }

    fn b(u: &Arc<Universe>, kind: Kind) -> Transformer {
        let v = u.clone();
        Transformer::new(format!("b{kind:?}"), u.clone(), move |r| bisim_fun(&v, r, kind, Mode::Strong, false))
    }

    #[test]
    fn flags_need_checking() {
        let u = uni("tau.a.0");
        let s = Suite::new(&u, 0, 16);
        let f = b(&u, Kind::All);
        assert!(!f.flags().monotone);
        assert!(f.gfp().is_err());
        let f = f.checked(&s);
        assert!(f.flags().monotone && !f.flags().expansive);
        assert_eq!(f.flags().evidence, Some(SamplingMode::Exhaustive));
        let g = f.gfp().unwrap();
        assert!(g.is_reflexive());
    }

    #[test]
    fn non_monotone_is_caught() {
        let u = uni("tau.0");
        let s = Suite::new(&u, 0, 16);
        let n = u.len();
        let comp = Transformer::new("complement", u.clone(), move |r| {
            Relation::from_pairs(n, Relation::full(n).pairs().filter(|&(i, j)| !r.contains(i, j)))
        });
        assert!(comp.monotonicity_counterexample(&s).is_some());
        assert!(matches!(comp.gfp_checked(&s), Err(TransformerError::NotMonotone { .. })));
        assert!(!comp.checked(&s).flags().monotone);
    }

    #[test]
    fn combinators() {
        let u = uni("tau.tau.0");
        let s = Suite::new(&u, 0, 16);
        let f = b(&u, Kind::All);
        let id = Transformer::identity(u.clone());
        let inter = intersect(&b(&u, Kind::Visible), &b(&u, Kind::Tau)).unwrap();
        let w = omega(&f);
        for r in s.iter() {
            assert_eq!(inter.apply(&r), f.apply(&r));
            assert_eq!(omega(&id).apply(&r), r);
            assert_eq!(power(&f, 0).apply(&r), r);
            let fr = f.apply(&r);
            assert!(r.union(&fr).union(&f.apply(&fr)).is_subset(&w.apply(&r)));
        }
        let other = uni("tau.tau.0");
        assert!(matches!(compose(&f, &b(&other, Kind::All)), Err(TransformerError::UniverseMismatch(..))));
        assert!(union(&f, &id).unwrap().checked(&s).flags().expansive);
    }
}
