//! Asynchronous π, the immediately-available-names type system, and checks of
//! their transition properties.

mod acp;
mod props;
mod typing;

pub(crate) use acp::Stepper;
pub use acp::{check_acp, AcpMode, AcpReport, AcpViolation};
pub use props::{
    check_postpone_prepone, check_subject_reduction, check_subst_decomposition, CaseCounts, DavFailure, DavReport,
    PropError, SrReport, SrViolation, Transposition, TranspositionFailure, TranspositionReport,
};
pub use typing::{derive, is_async, type_check_ian, type_check_ian_with, Derivation, SumRule, TypeEnv};
