mod common;

use std::collections::BTreeSet;

use piupto::lts::{step, ExplorationBudget};
use piupto::syntax::{enumerate_terms, names, Dialect};

#[test]
fn step_agrees_with_rule_oracle_on_small_terms() {
    let budget = ExplorationBudget::default();
    let pool = names(&["a", "b", "f1"]);
    for p in enumerate_terms(5, &names(&["a", "b"]), Dialect::Full) {
        let got: BTreeSet<_> =
            step(&p, &pool, &budget).unwrap().transitions.into_iter().map(|t| (t.action, t.target)).collect();
        let want = common::oracle_step(&p, &pool, budget.unfold);
        assert_eq!(got, want, "{p}");
    }
}
