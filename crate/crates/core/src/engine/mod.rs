//! Rule library, instantiation over agent tuples, trace replay, and the
//! violation metrics.

mod report;
mod rules;
mod run;

pub use report::{Denominator, InstanceRecord, PerTime, RuleReport, ViolationReport};
pub use rules::{builtin_rule, builtin_rules};
pub use run::{check_trace, instantiate, run, EngineError, PreparedRule, RuleInstance};
