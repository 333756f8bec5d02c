pub mod compat;
pub mod exec;
pub mod lookahead;
pub mod lts;
pub mod relation;
pub mod subcalc;
pub mod syntax;
pub mod technique;
