//! Monitor construction and the reference evaluator.
//!
//! Two independent evaluation routes are kept deliberately separate:
//! [`MonitorAutomaton`] (formula progression, forward, one letter at a
//! time) and [`evaluate_naive`] (backward dynamic programming over
//! subformulas). Their agreement on random and exhaustive inputs is the
//! crate's central correctness check.

mod alphabet;
mod automaton;
mod eval;
mod minimize;
mod progress;

pub use alphabet::{Alphabet, AlphabetError, Letter, MAX_PROPOSITIONS};
pub use automaton::{
    CompileError, MonitorAutomaton, MonitorRun, MonitorState, StepError, Verdict, VerdictTag,
    VerdictValue, DEFAULT_STATE_CAP,
};
pub use eval::{evaluate_all, evaluate_naive, EvalError};
pub use minimize::minimize;
pub use progress::{eps_eval, normalize, progress};
