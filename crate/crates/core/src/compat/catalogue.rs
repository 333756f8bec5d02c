//! The standard compatibility statements about π-calculus techniques,
//! instantiated on one universe.

use std::sync::Arc;

use serde::Serialize;

use super::{check_claim, check_inclusion, functional, CompatClaim, CompatError, Functional, Verdict};
use crate::lts::Universe;
use crate::relation::{Suite, Transformer};
use crate::technique::{instantiate, InstantiateOptions, TechniqueError, TechniqueSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    /// Evaluation and non-input contexts.
    Contexts,
    /// Substitution and input prefixes.
    Substitution,
    /// The weak case.
    Weak,
}

#[derive(Clone, Debug)]
pub enum Statement {
    Claim(CompatClaim),
    /// `lhs(R) ⊆ rhs(R)` for all `R`.
    Inclusion {
        lhs: Transformer,
        rhs: Transformer,
    },
}

#[derive(Clone, Debug)]
pub struct NamedStatement {
    pub label: String,
    pub group: Group,
    pub statement: Statement,
}

impl NamedStatement {
    pub fn evaluate(&self, suite: &Suite) -> Result<Verdict, CompatError> {
        let mut v = match &self.statement {
            Statement::Claim(c) => check_claim(c, suite)?,
            Statement::Inclusion { lhs, rhs } => {
                let name = format!("{} ⊆ {}", lhs.name(), rhs.name());
                check_inclusion(&name, lhs.universe(), suite, |r| lhs.apply(r).first_not_in(&rhs.apply(r)))
            }
        };
        v.claim = format!("{}: {}", self.label, v.claim);
        Ok(v)
    }
}

/// The statements of `groups` that can be instantiated on `u`. Statements
/// involving `sub` are skipped when the pool exceeds the substitution cap.
pub fn standard_statements(
    u: &Arc<Universe>,
    groups: &[Group],
    suite: &Suite,
) -> Result<Vec<NamedStatement>, TechniqueError> {
    let opts = InstantiateOptions::default();
    let t = |s: &str| -> Result<Transformer, TechniqueError> {
        let spec: TechniqueSpec = s.parse()?;
        Ok(instantiate(&spec, u, &opts)?.transformer)
    };
    // closures used as `f′` need checked expansiveness
    let closure = |s: &str| -> Result<Transformer, TechniqueError> { Ok(t(s)?.checked(suite)) };
    let strong = |w, barred| functional(u, w, false, barred);
    let weak = |w, barred| functional(u, w, true, barred);
    let (ba, bt) = (strong(Functional::BAlpha, false), strong(Functional::BTau, false));
    let (bba, bbt) = (strong(Functional::BAlpha, true), strong(Functional::BTau, true));
    let sub_ok = u.pool().len() <= opts.sub_pool_cap;
    let mut out = Vec::new();
    let mut push = |label: &str, group, statement| out.push(NamedStatement { label: label.into(), group, statement });
    use Statement::{Claim, Inclusion};

    if groups.contains(&Group::Contexts) {
        for s in ["F(bisim)", "id", "refl", "res", "pcomp", "tau"] {
            push(&format!("{s} is b_α-compatible"), Group::Contexts, Claim(CompatClaim::compatible(t(s)?, ba.clone())));
        }
        for s in ["F(bisim)", "id", "refl", "res"] {
            push(
                &format!("{s} is b_α,b̄_τ-compatible"),
                Group::Contexts,
                Claim(CompatClaim::with(t(s)?, ba.clone(), bbt.clone())),
            );
        }
        push(
            "pcomp is b_α,b̄_τ-compatible up to res",
            Group::Contexts,
            Claim(CompatClaim::with_up_to(t("pcomp")?, ba.clone(), bbt.clone(), closure("res")?)),
        );
        push(
            "id∪out is b̄_α-compatible",
            Group::Contexts,
            Claim(CompatClaim::compatible(t("union(id, out)")?, bba.clone())),
        );
        push(
            "id∪sum is b_α-compatible",
            Group::Contexts,
            Claim(CompatClaim::compatible(t("union(id, sum)")?, ba.clone())),
        );
        push(
            "id∪rep is b_α-compatible up to pcomp∪id",
            Group::Contexts,
            Claim(CompatClaim::up_to(t("union(id, rep)")?, ba.clone(), closure("union(pcomp, id)")?)),
        );
        for s in ["union(id, tau)", "union(id, out)", "union(id, sum)"] {
            push(
                &format!("{s} is b̄_α,b̄_τ-compatible"),
                Group::Contexts,
                Claim(CompatClaim::with(t(s)?, bba.clone(), bbt.clone())),
            );
        }
        push(
            "id∪rep is b̄_α,b̄_τ-compatible up to pcomp∪id",
            Group::Contexts,
            Claim(CompatClaim::with_up_to(
                t("union(id, rep)")?,
                bba.clone(),
                bbt.clone(),
                closure("union(pcomp, id)")?,
            )),
        );
    }
    if groups.contains(&Group::Substitution) {
        if sub_ok {
            push("sub is b_α-compatible", Group::Substitution, Claim(CompatClaim::compatible(t("sub")?, ba.clone())));
            push(
                "sub is b_α²,b_τ-compatible up to F_≡∘res",
                Group::Substitution,
                Claim(
                    CompatClaim::with_up_to(t("sub")?, ba.clone(), bt.clone(), closure("compose(F(cong), res)")?)
                        .exponent(2),
                ),
            );
            push(
                "id∪inp is b̄_α-compatible up to sub",
                Group::Substitution,
                Claim(CompatClaim::up_to(t("union(id, inp)")?, bba.clone(), closure("sub")?)),
            );
        }
        push(
            "inp is b̄_α,b_τ-compatible",
            Group::Substitution,
            Claim(CompatClaim::with(t("inp")?, bba.clone(), bt.clone())),
        );
    }
    if groups.contains(&Group::Weak) {
        let wba = weak(Functional::BAlpha, false);
        for s in ["F(bisim)", "F(expansion)"] {
            push(&format!("{s} is wb_α-compatible"), Group::Weak, Claim(CompatClaim::compatible(t(s)?, wba.clone())));
        }
        let sum_g = t("sum_g")?;
        push(
            "sum_g ⊆ b_τ∘(id∪refl)",
            Group::Weak,
            Inclusion {
                lhs: sum_g.clone(),
                rhs: crate::relation::compose(&bt, &t("union(id, refl)")?).expect("one universe"),
            },
        );
        if sub_ok {
            push(
                "sum_g ⊆ b_α∘(sub∪refl)",
                Group::Weak,
                Inclusion {
                    lhs: sum_g,
                    rhs: crate::relation::compose(&ba, &t("union(sub, refl)")?).expect("one universe"),
                },
            );
        }
    }
    Ok(out)
}
