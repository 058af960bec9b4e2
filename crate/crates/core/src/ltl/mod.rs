//! Finite-trace LTL: formulas, concrete syntax, and premise/conclusion rules.
//!
//! Semantics are LTLf throughout: `X` is the strong next (false at the last
//! position of a trace), `W` the weak next. The evaluators live in
//! [`crate::monitor`].

mod formula;
mod parser;
mod rule;

pub use formula::Formula;
pub use parser::{parse, ParseError};
pub use rule::{parse_rule_file, proposition_slots, Rule, RuleError};
