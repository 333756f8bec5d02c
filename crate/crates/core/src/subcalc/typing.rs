use std::collections::BTreeSet;

use serde::Serialize;

use crate::syntax::{Name, Process};

pub type TypeEnv = BTreeSet<Name>;

/// True iff every output has continuation `0` and no output is a summand.
pub fn is_async(p: &Process) -> bool {
    match p {
        Process::Nil => true,
        Process::Out(_, _, q) => **q == Process::Nil,
        Process::In(_, _, q) | Process::Tau(q) | Process::Res(_, q) | Process::Rep(q) => is_async(q),
        Process::Sum(..) => p.summands().into_iter().all(|g| !matches!(g, Process::Out(..)) && is_async(g)),
        Process::Par(q, r) => is_async(q) && is_async(r),
    }
}

/// Which form of the sum rule to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumRule {
    /// `∅ ⊢ G` and `∅ ⊢ G′` give `Γ ⊢ G + G′` for any `Γ`.
    #[default]
    AnyEnv,
    /// The conclusion only for the empty environment.
    EmptyEnvOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub rule: &'static str,
    pub env: Vec<Name>,
    pub term: String,
    pub premises: Vec<Derivation>,
}

/// Typability under the immediately-available-names discipline.
pub fn type_check_ian(gamma: &TypeEnv, p: &Process) -> bool {
    derive(gamma, p, SumRule::AnyEnv).is_some()
}

pub fn type_check_ian_with(gamma: &TypeEnv, p: &Process, sum: SumRule) -> bool {
    derive(gamma, p, sum).is_some()
}

/// A derivation of `Γ ⊢ P`, if one exists. The rules are syntax-directed so
/// the derivation is unique.
pub fn derive(gamma: &TypeEnv, p: &Process, sum: SumRule) -> Option<Derivation> {
    let empty = TypeEnv::new();
    let node =
        |rule, premises| Derivation { rule, env: gamma.iter().cloned().collect(), term: p.to_string(), premises };
    match p {
        Process::Nil => Some(node("nil", vec![])),
        Process::Tau(q) => Some(node("tau", vec![derive(&empty, q, sum)?])),
        Process::Out(_, _, q) => Some(node("out", vec![derive(&empty, q, sum)?])),
        Process::In(a, _, q) => {
            if !gamma.contains(a) {
                return None;
            }
            Some(node("inp", vec![derive(&empty, q, sum)?]))
        }
        Process::Rep(g) => Some(node("rep", vec![derive(gamma, g, sum)?])),
        Process::Res(x, q) => {
            let mut inner = gamma.clone();
            inner.insert(x.clone());
            Some(node("res", vec![derive(&inner, q, sum)?]))
        }
        Process::Par(q, r) => Some(node("par", vec![derive(gamma, q, sum)?, derive(gamma, r, sum)?])),
        Process::Sum(g, h) => {
            if sum == SumRule::EmptyEnvOnly && !gamma.is_empty() {
                return None;
            }
            Some(node("sum", vec![derive(&empty, g, sum)?, derive(&empty, h, sum)?]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_canonical, names, parse};

    fn env(xs: &[&str]) -> TypeEnv {
        names(xs).into_iter().collect()
    }

    #[test]
    fn async_membership() {
        assert!(is_async(&parse("a<b>.0 | a(x).x<x>.0").unwrap()));
        assert!(!is_async(&parse("a<b>.c(y).0").unwrap()));
        assert!(!is_async(&parse("a<b>.0 + tau.0").unwrap()));
        assert!(is_async(&parse("a(x).0 + tau.0").unwrap()));
    }

    #[test]
    fn ian_examples() {
        assert!(type_check_ian(&env(&["a"]), &parse("a(b).0").unwrap()));
        assert!(!type_check_ian(&env(&["a"]), &parse("a(b).b(c).0").unwrap()));
        assert!(type_check_ian(&env(&[]), &parse("new a. (a(b).0 | a<c>.0)").unwrap()));
        assert!(!type_check_ian(&env(&["a"]), &parse("a(x).0 + tau.0").unwrap()));
        assert!(type_check_ian(&env(&["a"]), &parse("!a(x).x<x>.0").unwrap()));
    }

    #[test]
    fn sum_rule_variants_differ_only_on_nonempty_env() {
        let p = parse("tau.0 + a<b>.0").unwrap();
        assert!(type_check_ian_with(&env(&[]), &p, SumRule::EmptyEnvOnly));
        assert!(!type_check_ian_with(&env(&["a"]), &p, SumRule::EmptyEnvOnly));
        assert!(type_check_ian_with(&env(&["a"]), &p, SumRule::AnyEnv));
    }

    #[test]
    fn derivation_shape() {
        let d = derive(&env(&[]), &parse("new a. (a(b).0 | a<c>.0)").unwrap(), SumRule::AnyEnv).unwrap();
        assert_eq!(d.rule, "res");
        assert_eq!(d.premises[0].rule, "par");
        assert_eq!(d.premises[0].premises[0].rule, "inp");
    }

    #[test]
    fn invariant_under_alpha() {
        let raw = Process::res("k", Process::inp("k", "y", Process::out("y", "y", Process::Nil)));
        let canon = alpha_canonical(&raw);
        assert_eq!(type_check_ian(&env(&[]), &raw), type_check_ian(&env(&[]), &canon));
        assert_eq!(is_async(&raw), is_async(&canon));
    }
}
