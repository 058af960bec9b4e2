//! Traffic-rule monitoring over recorded multi-agent drives.
//!
//! The crate is organized in five layers:
//!
//! * [`ltl`] — finite-trace LTL formulas: parsing, printing, negation normal
//!   form, and the premise/conclusion rule shape `G(premise -> conclusion)`.
//! * [`monitor`] — compilation of formulas into deterministic monitor
//!   automata via formula progression, plus an independent backward-pass
//!   evaluator used as semantic oracle.
//! * [`world`] — maps, lanes, trajectory ingestion, and Frenet-frame
//!   projection onto lane centerlines.
//! * [`predicates`] — the atomic propositions (relational position labels,
//!   safe distance, density, ...) evaluated per scene.
//! * [`engine`] — the built-in rule library, rule instantiation over agent
//!   tuples, trace replay, and violation metrics.

pub mod engine;
pub mod ltl;
pub mod monitor;
pub mod predicates;
pub mod world;

pub use ltl::{Formula, Rule};
pub use monitor::{MonitorAutomaton, Verdict, VerdictValue};
pub use predicates::PredicateParams;
pub use world::{AgentId, MapModel, Scene, Trace};
