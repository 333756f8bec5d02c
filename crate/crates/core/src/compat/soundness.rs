//! Soundness harnesses: from verified compatibility premises and a relation
//! progressing through `f`, compute the closure and check it is a
//! post-fixpoint contained in the greatest fixpoint.

use serde::Serialize;

use super::{check_claim, check_inclusion, monotone_verdict, CompatClaim, CompatError, Verdict};
use crate::relation::{compose, gfp_of, omega, power, union_all, Relation, Suite, Transformer};
use crate::syntax::Process;

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub name: String,
    pub preconditions: Vec<Verdict>,
    /// `R ⊆ (g ∩ h)(f(R))`.
    pub progression: bool,
    /// False when a precondition failed; nothing below is computed then.
    pub ran: bool,
    /// Pairs of the closure `f′^ω(R)`.
    pub closure: Vec<(Process, Process)>,
    /// Iterations the closure took to stabilise.
    pub depth: usize,
    /// `f′^ω(R) ⊆ (g ∩ h)(f′^ω(R))`.
    pub post_fixpoint: Option<bool>,
    /// `f′^ω(R) ⊆ gfp(g ∩ h)`.
    pub in_gfp: Option<bool>,
    /// Extra instance checks (appendix variants).
    pub intermediate: Vec<Verdict>,
    /// `(⋆)` holds because `f` is expansive.
    pub star_by_expansiveness: Option<bool>,
}

impl SoundnessReport {
    pub fn holds(&self) -> bool {
        self.ran && self.post_fixpoint == Some(true) && self.in_gfp == Some(true)
    }

    fn new(name: String) -> Self {
        SoundnessReport {
            name,
            preconditions: Vec::new(),
            progression: false,
            ran: false,
            closure: Vec::new(),
            depth: 0,
            post_fixpoint: None,
            in_gfp: None,
            intermediate: Vec::new(),
            star_by_expansiveness: None,
        }
    }

    fn premises_hold(&self) -> bool {
        self.progression && self.preconditions.iter().all(|v| v.holds)
    }
}

/// `f^ω(R)` together with the number of rounds it took.
fn closure_with_depth(f: &Transformer, r: &Relation) -> (Relation, usize) {
    let mut s = r.clone();
    let mut depth = 0;
    loop {
        let next = s.union(&f.apply(&s));
        if next == s {
            return (s, depth);
        }
        s = next;
        depth += 1;
    }
}

fn meet(g: &Transformer, h: Option<&Transformer>, r: &Relation) -> Relation {
    match h {
        Some(h) => g.apply(r).intersect(&h.apply(r)),
        None => g.apply(r),
    }
}

fn conclude(report: &mut SoundnessReport, fp: &Transformer, g: &Transformer, h: Option<&Transformer>, r: &Relation) {
    let u = fp.universe();
    let (s, depth) = closure_with_depth(fp, r);
    let gfp = gfp_of(u.len(), |x| meet(g, h, x));
    report.ran = true;
    report.depth = depth;
    report.closure = s.pairs().map(|(i, j)| (u.state(i).clone(), u.state(j).clone())).collect();
    report.post_fixpoint = Some(s.is_subset(&meet(g, h, &s)));
    report.in_gfp = Some(s.is_subset(&gfp));
}

/// With `h` given: `f` monotone, `g`-compatible and `g^m,h`-compatible, and
/// `R ⊆ ((g∩h)∘f)(R)`; the closure is taken under `f′ = ⋃_{i≤m} f^i`.
/// Without `h` this is the plain harness: `f` monotone and `g`-compatible,
/// `R ⊆ g(f(R))`, closure under `f`.
pub fn soundness_harness(
    f: &Transformer,
    g: &Transformer,
    h: Option<&Transformer>,
    m: usize,
    r: &Relation,
    suite: &Suite,
) -> Result<SoundnessReport, CompatError> {
    if h.is_some() && m == 0 {
        return Err(CompatError::Precondition("exponent must be at least 1".into()));
    }
    let name = match h {
        Some(h) => format!("{} sound for {}∩{} (m={m})", f.name(), g.name(), h.name()),
        None => format!("{} sound for {}", f.name(), g.name()),
    };
    let mut report = SoundnessReport::new(name);
    report.preconditions.push(monotone_verdict(f, suite));
    report.preconditions.push(check_claim(&CompatClaim::compatible(f.clone(), g.clone()), suite)?);
    if let Some(h) = h {
        report.preconditions.push(check_claim(&CompatClaim::with(f.clone(), g.clone(), h.clone()).exponent(m), suite)?);
    }
    report.progression = r.is_subset(&meet(g, h, &f.apply(r)));
    if !report.premises_hold() {
        return Ok(report);
    }
    let fp = match h {
        Some(_) => union_all(&(0..=m).map(|i| power(f, i)).collect::<Vec<_>>()).expect("one universe"),
        None => f.clone(),
    };
    conclude(&mut report, &fp, g, h, r);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AppendixVariant {
    Bis,
    Ter,
}

#[derive(Clone, Debug)]
pub enum AppendixParams {
    /// `g ⊆ id`, `f` `g`-compatible and `h∘g^m,h`-compatible, plus `(⋆)`.
    Bis { f: Transformer, g: Transformer, h: Transformer, m: usize, relation: Relation },
    /// `f` expansive, `g_1 ⊇ … ⊇ g_n`, `f` `g_1`-compatible and
    /// `g_i^{m_i},g_{i+1}`-compatible.
    Ter { f: Transformer, chain: Vec<Transformer>, exponents: Vec<usize>, relation: Relation },
}

impl AppendixParams {
    pub fn variant(&self) -> AppendixVariant {
        match self {
            AppendixParams::Bis { .. } => AppendixVariant::Bis,
            AppendixParams::Ter { .. } => AppendixVariant::Ter,
        }
    }
}

/// `⋃_{i≤k} f^i(R)`.
fn partial_union(f: &Transformer, k: usize, r: &Relation) -> Relation {
    let mut acc = r.clone();
    let mut x = r.clone();
    for _ in 0..k {
        x = f.apply(&x);
        acc = acc.union(&x);
    }
    acc
}

pub fn appendix_soundness(params: &AppendixParams, suite: &Suite) -> Result<SoundnessReport, CompatError> {
    match params {
        AppendixParams::Bis { f, g, h, m, relation } => bis(f, g, h, *m, relation, suite),
        AppendixParams::Ter { f, chain, exponents, relation } => ter(f, chain, exponents, relation, suite),
    }
}

fn bis(
    f: &Transformer,
    g: &Transformer,
    h: &Transformer,
    m: usize,
    r: &Relation,
    suite: &Suite,
) -> Result<SoundnessReport, CompatError> {
    if m == 0 {
        return Err(CompatError::Precondition("exponent must be at least 1".into()));
    }
    let u = f.universe();
    let mut report =
        SoundnessReport::new(format!("{} sound for {}∩{} via h∘g^{m} (bis)", f.name(), g.name(), h.name()));
    for t in [f, g, h] {
        report.preconditions.push(monotone_verdict(t, suite));
    }
    report
        .preconditions
        .push(check_inclusion(&format!("{} ⊆ id", g.name()), u, suite, |x| g.apply(x).first_not_in(x)));
    report.preconditions.push(check_claim(&CompatClaim::compatible(f.clone(), g.clone()), suite)?);
    let hgm = compose(h, &power(g, m)).expect("one universe").renamed(format!("{}∘{}^{m}", h.name(), g.name()));
    report.preconditions.push(check_claim(&CompatClaim::with(f.clone(), hgm, h.clone()), suite)?);
    report.progression = r.is_subset(&meet(g, Some(h), &f.apply(r)));

    // (⋆) for n up to the depth the closure reaches on R
    let (_, depth) = closure_with_depth(f, r);
    let expansive = f.flags().expansive && f.flags().evidence.is_some();
    report.star_by_expansiveness = Some(expansive);
    let fw = omega(f);
    for n in 0..=depth {
        let star = check_inclusion(&format!("(⋆) n={n}"), u, suite, |x| {
            power(f, n).apply(&partial_union(f, m * n + 1, x)).first_not_in(&fw.apply(x))
        });
        if !star.holds {
            return Err(CompatError::Precondition(format!("(⋆) fails at n={n}")));
        }
        report.intermediate.push(star);
    }
    if !report.premises_hold() {
        return Ok(report);
    }
    // (△): f^n ∘ h ∘ g^{mn} ⊆ h ∘ f^n
    for n in 1..=depth.max(1) {
        let hg = compose(h, &power(g, m * n)).expect("one universe");
        let fnn = power(f, n);
        report.intermediate.push(check_inclusion(&format!("(△) n={n}"), u, suite, |x| {
            fnn.apply(&hg.apply(x)).first_not_in(&h.apply(&fnn.apply(x)))
        }));
    }
    conclude(&mut report, f, g, Some(h), r);
    Ok(report)
}

fn ter(
    f: &Transformer,
    chain: &[Transformer],
    exponents: &[usize],
    r: &Relation,
    suite: &Suite,
) -> Result<SoundnessReport, CompatError> {
    if chain.is_empty() || exponents.len() + 1 < chain.len() || exponents.contains(&0) {
        return Err(CompatError::Precondition("need n functions and n-1 positive exponents".into()));
    }
    let u = f.universe();
    for (i, w) in chain.windows(2).enumerate() {
        let v = check_inclusion(&format!("g{} ⊆ g{}", i + 2, i + 1), u, suite, |x| {
            w[1].apply(x).first_not_in(&w[0].apply(x))
        });
        if !v.holds {
            return Err(CompatError::Precondition(format!("chain is not decreasing at position {}", i + 1)));
        }
    }
    let last = chain.last().unwrap();
    let mut report =
        SoundnessReport::new(format!("{} sound for {} (ter, chain of {})", f.name(), last.name(), chain.len()));
    for t in std::iter::once(f).chain(chain) {
        report.preconditions.push(monotone_verdict(t, suite));
    }
    let expansive = check_inclusion(&format!("{} is expansive", f.name()), u, suite, |x| x.first_not_in(&f.apply(x)));
    report.preconditions.push(expansive);
    report.preconditions.push(check_claim(&CompatClaim::compatible(f.clone(), chain[0].clone()), suite)?);
    for (i, w) in chain.windows(2).enumerate() {
        let c = CompatClaim::with(f.clone(), w[0].clone(), w[1].clone()).exponent(exponents[i]);
        report.preconditions.push(check_claim(&c, suite)?);
    }
    report.progression = r.is_subset(&last.apply(&f.apply(r)));
    if !report.premises_hold() {
        return Ok(report);
    }
    conclude(&mut report, f, last, None, r);
    Ok(report)
}
