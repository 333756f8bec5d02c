//! Up-to techniques over a universe, their combinator expressions, and the
//! bisimulation-up-to checker.

mod atoms;
mod check;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::lts::Universe;
use crate::relation::{
    self, bisim_fun, expansion_fun, gfp_of, Kind, Mode, Relation, Suite, Transformer, TransformerError,
};
use crate::syntax::{alpha_canonical, normal_form, Process};
use atoms::{Binary, GuardedSum, Pair, Unary};

pub use check::{combined_technique, upto_check, CombinedDialect, Target, Unmatched, UptoOptions, UptoVerdict};

/// The relation `S` of `F_S(R) = S R S⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    /// Strong bisimilarity.
    Bisim,
    /// Weak bisimilarity (not a sound choice; available for experiments).
    WeakBisim,
    /// The expansion preorder, oriented so the left side does more work.
    Expansion,
    /// Structural congruence.
    Congruence,
    /// Explicit pairs of processes.
    User(Vec<(Process, Process)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TechniqueSpec {
    Id,
    Refl,
    F(Base),
    Res,
    Pcomp,
    Tau,
    Out,
    Inp,
    Sum,
    SumG,
    Rep,
    Sub,
    Union(Vec<TechniqueSpec>),
    /// `compose(f, g)` applies `g` first.
    Compose(Vec<TechniqueSpec>),
    Intersect(Vec<TechniqueSpec>),
    Power(Box<TechniqueSpec>, usize),
    Omega(Box<TechniqueSpec>),
}

impl TechniqueSpec {
    pub fn union(items: Vec<TechniqueSpec>) -> TechniqueSpec {
        TechniqueSpec::Union(items)
    }

    pub fn omega(self) -> TechniqueSpec {
        TechniqueSpec::Omega(Box::new(self))
    }

    /// Whether `sub` occurs anywhere in the expression.
    pub fn uses_sub(&self) -> bool {
        match self {
            TechniqueSpec::Sub => true,
            TechniqueSpec::Union(v) | TechniqueSpec::Compose(v) | TechniqueSpec::Intersect(v) => {
                v.iter().any(TechniqueSpec::uses_sub)
            }
            TechniqueSpec::Power(f, _) | TechniqueSpec::Omega(f) => f.uses_sub(),
            _ => false,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Base::Bisim => "bisim",
            Base::WeakBisim => "weak",
            Base::Expansion => "expansion",
            Base::Congruence => "cong",
            Base::User(_) => "user",
        })
    }
}

impl fmt::Display for TechniqueSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, v: &[TechniqueSpec]| {
            write!(f, "{name}(")?;
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            TechniqueSpec::Id => f.write_str("id"),
            TechniqueSpec::Refl => f.write_str("refl"),
            TechniqueSpec::F(b) => write!(f, "F({b})"),
            TechniqueSpec::Res => f.write_str("res"),
            TechniqueSpec::Pcomp => f.write_str("pcomp"),
            TechniqueSpec::Tau => f.write_str("tau"),
            TechniqueSpec::Out => f.write_str("out"),
            TechniqueSpec::Inp => f.write_str("inp"),
            TechniqueSpec::Sum => f.write_str("sum"),
            TechniqueSpec::SumG => f.write_str("sum_g"),
            TechniqueSpec::Rep => f.write_str("rep"),
            TechniqueSpec::Sub => f.write_str("sub"),
            TechniqueSpec::Union(v) => list(f, "union", v),
            TechniqueSpec::Compose(v) => list(f, "compose", v),
            TechniqueSpec::Intersect(v) => list(f, "intersect", v),
            TechniqueSpec::Power(x, n) => write!(f, "power({x}, {n})"),
            TechniqueSpec::Omega(x) => write!(f, "omega({x})"),
        }
    }
}

impl Serialize for TechniqueSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TechniqueError {
    #[error("technique expression: {0}")]
    Parse(String),
    #[error("sub over a pool of {0} names exceeds the cap of {1}")]
    PoolTooLarge(usize, usize),
    #[error("user relation mentions `{0}`, which is not in the universe")]
    NotInUniverse(String),
    #[error(transparent)]
    Transformer(#[from] TransformerError),
    #[error("{technique} refused: `{process}` violates the aliased communication property")]
    AcpRefused { technique: String, process: String },
}

impl FromStr for TechniqueSpec {
    type Err = TechniqueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = ExprParser { src: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn err(&self, msg: &str) -> TechniqueError {
        TechniqueError::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, TechniqueError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn args(&mut self) -> Result<Vec<TechniqueSpec>, TechniqueError> {
        if !self.eat(b'(') {
            return Err(self.err("expected `(`"));
        }
        let mut v = vec![self.expr()?];
        while self.eat(b',') {
            v.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.err("expected `)`"));
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<TechniqueSpec, TechniqueError> {
        let start = self.pos;
        let id = self.ident()?;
        Ok(match id.as_str() {
            "id" => TechniqueSpec::Id,
            "refl" => TechniqueSpec::Refl,
            "res" => TechniqueSpec::Res,
            "pcomp" => TechniqueSpec::Pcomp,
            "tau" => TechniqueSpec::Tau,
            "out" => TechniqueSpec::Out,
            "inp" => TechniqueSpec::Inp,
            "sum" => TechniqueSpec::Sum,
            "sum_g" => TechniqueSpec::SumG,
            "rep" => TechniqueSpec::Rep,
            "sub" => TechniqueSpec::Sub,
            "F" => {
                if !self.eat(b'(') {
                    return Err(self.err("expected `(`"));
                }
                let b = match self.ident()?.as_str() {
                    "bisim" | "sim" => Base::Bisim,
                    "weak" => Base::WeakBisim,
                    "expansion" | "exp" => Base::Expansion,
                    "cong" | "equiv" => Base::Congruence,
                    other => return Err(TechniqueError::Parse(format!("unknown base relation `{other}`"))),
                };
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                TechniqueSpec::F(b)
            }
            "union" => TechniqueSpec::Union(self.args()?),
            "compose" => TechniqueSpec::Compose(self.args()?),
            "intersect" => TechniqueSpec::Intersect(self.args()?),
            "omega" => {
                let mut a = self.args()?;
                if a.len() != 1 {
                    return Err(self.err("omega takes one argument"));
                }
                TechniqueSpec::Omega(Box::new(a.remove(0)))
            }
            "power" => {
                if !self.eat(b'(') {
                    return Err(self.err("expected `(`"));
                }
                let f = self.expr()?;
                if !self.eat(b',') {
                    return Err(self.err("expected `,`"));
                }
                let n: usize = self.ident()?.parse().map_err(|_| self.err("expected an exponent"))?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                TechniqueSpec::Power(Box::new(f), n)
            }
            other => {
                self.pos = start;
                return Err(TechniqueError::Parse(format!("unknown technique `{other}`")));
            }
        })
    }
}

type EscapeFn = dyn Fn(&Relation) -> Vec<Pair> + Send + Sync;

/// A technique evaluated on one universe.
#[derive(Clone)]
pub struct Instance {
    pub spec: TechniqueSpec,
    pub transformer: Transformer,
    escapes: Arc<EscapeFn>,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance").field("spec", &self.spec.to_string()).finish()
    }
}

impl Instance {
    pub fn apply(&self, r: &Relation) -> Relation {
        self.transformer.apply(r)
    }

    /// Pairs the comprehension produces on `r` that are not in the universe.
    pub fn escapes(&self, r: &Relation) -> Vec<(Process, Process)> {
        let set: BTreeSet<Pair> = (self.escapes)(r).into_iter().collect();
        set.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct InstantiateOptions {
    /// Largest pool `sub` ranges over.
    pub sub_pool_cap: usize,
    /// Check the flags on a suite with this seed and sample count.
    pub check: Option<(u64, usize)>,
}

impl Default for InstantiateOptions {
    fn default() -> Self {
        InstantiateOptions { sub_pool_cap: 4, check: None }
    }
}

/// The base relation `S` on `u`.
pub fn base_relation(u: &Universe, base: &Base) -> Result<Relation, TechniqueError> {
    let n = u.len();
    Ok(match base {
        Base::Bisim => gfp_of(n, |r| bisim_fun(u, r, Kind::All, Mode::Strong, false)),
        Base::WeakBisim => gfp_of(n, |r| bisim_fun(u, r, Kind::All, Mode::Weak, false)),
        // the preorder computed by `expansion_fun` has the more efficient
        // process on the left
        Base::Expansion => gfp_of(n, |r| expansion_fun(u, r)).inverse(),
        Base::Congruence => {
            let nf: Vec<Process> = crate::exec::map_range(n, |i| normal_form(u.state(i)));
            Relation::from_pairs(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| nf[i] == nf[j]))
        }
        Base::User(pairs) => {
            let mut r = Relation::empty(n);
            for (p, q) in pairs {
                let find = |x: &Process| {
                    u.index_of(&alpha_canonical(x)).ok_or_else(|| TechniqueError::NotInUniverse(x.to_string()))
                };
                r.insert(find(p)?, find(q)?);
            }
            r
        }
    })
}

fn unary(u: &Arc<Universe>, spec: &TechniqueSpec, kind: Unary) -> Instance {
    let table = Arc::new(atoms::unary_table(u, kind));
    let v = u.clone();
    Instance {
        spec: spec.clone(),
        transformer: Transformer::new(spec.to_string(), u.clone(), move |r| table.apply(r)),
        escapes: Arc::new(move |r| {
            r.pairs().flat_map(|(i, j)| atoms::unary_escapes(&v, kind, v.state(i), v.state(j))).collect()
        }),
    }
}

fn no_escapes() -> Arc<EscapeFn> {
    Arc::new(|_| Vec::new())
}

/// Evaluates `spec` on `u`.
pub fn instantiate(
    spec: &TechniqueSpec,
    u: &Arc<Universe>,
    opts: &InstantiateOptions,
) -> Result<Instance, TechniqueError> {
    let mut inst = build(spec, u, opts)?;
    if let Some((seed, samples)) = opts.check {
        let suite = Suite::new(u, seed, samples);
        inst.transformer = inst.transformer.checked(&suite);
    }
    Ok(inst)
}

fn build(spec: &TechniqueSpec, u: &Arc<Universe>, opts: &InstantiateOptions) -> Result<Instance, TechniqueError> {
    let n = u.len();
    let plain = |t: Transformer| Instance { spec: spec.clone(), transformer: t, escapes: no_escapes() };
    Ok(match spec {
        TechniqueSpec::Id => plain(Transformer::identity(u.clone())),
        TechniqueSpec::Refl => plain(Transformer::constant("refl", u.clone(), Relation::identity(n))),
        TechniqueSpec::F(base) => {
            let s = Arc::new(base_relation(u, base)?);
            plain(Transformer::new(spec.to_string(), u.clone(), move |r| atoms::conjugate(&s, r)))
        }
        TechniqueSpec::Tau => unary(u, spec, Unary::Tau),
        TechniqueSpec::Out => unary(u, spec, Unary::Out),
        TechniqueSpec::Inp => unary(u, spec, Unary::Inp),
        TechniqueSpec::Rep => unary(u, spec, Unary::Rep),
        TechniqueSpec::Res => unary(u, spec, Unary::Res),
        TechniqueSpec::Sub => {
            if u.pool().len() > opts.sub_pool_cap {
                return Err(TechniqueError::PoolTooLarge(u.pool().len(), opts.sub_pool_cap));
            }
            unary(u, spec, Unary::Sub)
        }
        TechniqueSpec::Pcomp | TechniqueSpec::Sum => {
            let sum = *spec == TechniqueSpec::Sum;
            let b = Arc::new(Binary::new(u, sum));
            let v = u.clone();
            Instance {
                spec: spec.clone(),
                transformer: Transformer::new(spec.to_string(), u.clone(), move |r| b.apply(r)),
                escapes: Arc::new(move |r| atoms::binary_escapes(&v, sum, r)),
            }
        }
        TechniqueSpec::SumG => {
            let g = Arc::new(GuardedSum::new(u));
            let v = u.clone();
            Instance {
                spec: spec.clone(),
                transformer: Transformer::new("sum_g", u.clone(), move |r| g.apply(r)),
                // width-one sums are prefixes
                escapes: Arc::new(move |r| {
                    let mut out = Vec::new();
                    for (i, j) in r.pairs() {
                        for k in [Unary::Tau, Unary::Out, Unary::Inp] {
                            out.extend(atoms::unary_escapes(&v, k, v.state(i), v.state(j)));
                        }
                    }
                    out
                }),
            }
        }
        TechniqueSpec::Union(items) | TechniqueSpec::Intersect(items) => {
            if items.is_empty() {
                return Err(TechniqueError::Parse(format!("{spec} has no operands")));
            }
            let parts: Vec<Instance> = items.iter().map(|x| build(x, u, opts)).collect::<Result<_, _>>()?;
            let ts: Vec<Transformer> = parts.iter().map(|p| p.transformer.clone()).collect();
            let t = if matches!(spec, TechniqueSpec::Union(_)) {
                relation::union_all(&ts)?
            } else {
                let mut acc = ts[0].clone();
                for t in &ts[1..] {
                    acc = relation::intersect(&acc, t)?;
                }
                acc
            };
            let escs: Vec<Arc<EscapeFn>> = parts.iter().map(|p| p.escapes.clone()).collect();
            Instance {
                spec: spec.clone(),
                transformer: t.renamed(spec.to_string()),
                escapes: Arc::new(move |r| escs.iter().flat_map(|e| e(r)).collect()),
            }
        }
        TechniqueSpec::Compose(items) => {
            if items.is_empty() {
                return Err(TechniqueError::Parse("compose() has no operands".into()));
            }
            let parts: Vec<Instance> = items.iter().map(|x| build(x, u, opts)).collect::<Result<_, _>>()?;
            let mut t = parts.last().unwrap().transformer.clone();
            for p in parts.iter().rev().skip(1) {
                t = relation::compose(&p.transformer, &t)?;
            }
            // innermost first: each stage's escapes on the running relation
            let stages: Vec<(Transformer, Arc<EscapeFn>)> =
                parts.iter().rev().map(|p| (p.transformer.clone(), p.escapes.clone())).collect();
            Instance {
                spec: spec.clone(),
                transformer: t.renamed(spec.to_string()),
                escapes: Arc::new(move |r| {
                    let mut cur = r.clone();
                    let mut out = Vec::new();
                    for (t, e) in &stages {
                        out.extend(e(&cur));
                        cur = t.apply(&cur);
                    }
                    out
                }),
            }
        }
        TechniqueSpec::Power(x, k) => {
            let inner = build(x, u, opts)?;
            let t = relation::power(&inner.transformer, *k).renamed(spec.to_string());
            let (f, e, k) = (inner.transformer.clone(), inner.escapes.clone(), *k);
            Instance {
                spec: spec.clone(),
                transformer: t,
                escapes: Arc::new(move |r| {
                    let mut cur = r.clone();
                    let mut out = Vec::new();
                    for _ in 0..k {
                        out.extend(e(&cur));
                        cur = f.apply(&cur);
                    }
                    out
                }),
            }
        }
        TechniqueSpec::Omega(x) => {
            let inner = build(x, u, opts)?;
            let t = relation::omega(&inner.transformer).renamed(spec.to_string());
            let (w, e) = (t.clone(), inner.escapes.clone());
            Instance {
                spec: spec.clone(),
                transformer: t,
                // the escapes of f on the fixpoint cover those of every stage
                escapes: Arc::new(move |r| e(&w.apply(r))),
            }
        }
    })
}
