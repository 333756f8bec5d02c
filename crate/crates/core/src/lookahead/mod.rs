//! A small language whose operators look two transitions ahead, the
//! label-filtered bisimulation functionals over it, and experiments on
//! which up-to techniques remain sound.

mod bisim;
mod claims;
mod search;
mod syntax;

pub use bisim::{l_bisim_fun, l_gfp, Canon, LFamily, LUniverse};
pub use claims::{
    alphabet, appendix_claims, chain_on_universe, check_appendix_claims, l_suite, AppendixLimits, ChainReport,
    ClaimStatus, GExpr, LClaim, LClaimReport, LCounterexample,
};
pub use search::{
    contexts, naive_check, search_unsoundness, Context, Ctor, MatchedMove, SearchParams, SearchReport,
    UnsoundnessWitness,
};
pub use syntax::{enumerate, lparse, lstep, LParseError, LProcess, Label, OpKind};
