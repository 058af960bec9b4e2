//! Deterministic monitor automata over finite traces.
//!
//! States are the normalized residuals reachable by progression. After the
//! reachability sweep, a closure pass collapses every state from which no
//! verdict other than `violated` (resp. `satisfied`) is reachable into the
//! corresponding absorbing sink, so `step` reports a violation at the
//! earliest bad prefix rather than only when the residual folds to `false`
//! syntactically.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ltl::Formula;

use super::alphabet::{Alphabet, AlphabetError, Letter};
use super::progress::{eps_eval, normalize, progress};

/// Default cap on the number of reachable monitor states.
pub const DEFAULT_STATE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictTag {
    Inconclusive,
    PermanentlyTrue,
    PermanentlyFalse,
}

impl VerdictTag {
    fn label(self) -> &'static str {
        match self {
            VerdictTag::Inconclusive => "inconclusive",
            VerdictTag::PermanentlyTrue => "permanently-true",
            VerdictTag::PermanentlyFalse => "permanently-false",
        }
    }
}

/// Three-valued monitor output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictValue {
    Satisfied,
    Violated,
    Inconclusive,
}

/// A verdict plus the timestep at which it became final. `position` is
/// `None` while the monitor is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Verdict {
    pub value: VerdictValue,
    pub position: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct MonitorState {
    pub residual: Formula,
    pub tag: VerdictTag,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("state cap exceeded: more than {cap} reachable monitor states")]
    StateCapExceeded { cap: usize },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("invalid monitor state index {state} (automaton has {count} states)")]
    InvalidState { state: usize, count: usize },
}

/// A deterministic, total monitor automaton for one formula.
#[derive(Debug, Clone)]
pub struct MonitorAutomaton {
    alphabet: Alphabet,
    states: Vec<MonitorState>,
    initial: usize,
    /// transitions[state][letter.0] = successor state
    transitions: Vec<Vec<u32>>,
}

impl MonitorAutomaton {
    /// Compiles `formula` into a monitor automaton by exhaustive progression
    /// over all letters, with the default state cap.
    pub fn compile(formula: &Formula) -> Result<Self, CompileError> {
        Self::compile_capped(formula, DEFAULT_STATE_CAP)
    }

    pub fn compile_capped(formula: &Formula, cap: usize) -> Result<Self, CompileError> {
        let alphabet = Alphabet::of_formula(formula)?;
        let initial = normalize(&formula.to_nnf());
        let letters = alphabet.letter_count();

        let mut residuals: Vec<Formula> = vec![initial.clone()];
        let mut index: HashMap<Formula, usize> = HashMap::from([(initial, 0)]);
        let mut transitions: Vec<Vec<u32>> = Vec::new();

        let mut frontier = 0;
        while frontier < residuals.len() {
            let current = residuals[frontier].clone();
            let mut row = Vec::with_capacity(letters);
            for bits in 0..letters {
                let next = progress(&current, &alphabet, Letter(bits as u16))?;
                let target = match index.get(&next) {
                    Some(&idx) => idx,
                    None => {
                        let idx = residuals.len();
                        if idx >= cap {
                            return Err(CompileError::StateCapExceeded { cap });
                        }
                        residuals.push(next.clone());
                        index.insert(next, idx);
                        idx
                    }
                };
                row.push(target as u32);
            }
            transitions.push(row);
            frontier += 1;
        }

        let automaton = Self::close_verdicts(alphabet, residuals, transitions);
        Ok(automaton)
    }

    /// Collapses semantically decided states into the two absorbing sinks.
    ///
    /// A state is *bad* iff its residual fails on the empty word and every
    /// successor is bad (greatest fixpoint); then every extension of the
    /// prefix, including stopping here, falsifies the formula. Dually for
    /// *good* states. Redirecting those states onto the `false`/`true`
    /// sinks preserves every step-wise and final verdict while making the
    /// sinks the unique decided states.
    fn close_verdicts(
        alphabet: Alphabet,
        residuals: Vec<Formula>,
        transitions: Vec<Vec<u32>>,
    ) -> MonitorAutomaton {
        #[derive(Clone, Copy, PartialEq)]
        enum Class {
            Live,
            Bad,
            Good,
        }

        let n = residuals.len();
        let letters = alphabet.letter_count();

        let mut bad: Vec<bool> = residuals.iter().map(|r| !eps_eval(r)).collect();
        let mut good: Vec<bool> = residuals.iter().map(eps_eval).collect();
        loop {
            let mut changed = false;
            for s in 0..n {
                if bad[s] && transitions[s].iter().any(|&t| !bad[t as usize]) {
                    bad[s] = false;
                    changed = true;
                }
                if good[s] && transitions[s].iter().any(|&t| !good[t as usize]) {
                    good[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let class: Vec<Class> = (0..n)
            .map(|s| {
                if bad[s] {
                    Class::Bad
                } else if good[s] {
                    Class::Good
                } else {
                    Class::Live
                }
            })
            .collect();

        let sink = |tag| match tag {
            VerdictTag::PermanentlyFalse => MonitorState {
                residual: Formula::False,
                tag,
            },
            _ => MonitorState {
                residual: Formula::True,
                tag,
            },
        };

        // An initially decided formula collapses to a single sink.
        match class[0] {
            Class::Bad => {
                return MonitorAutomaton {
                    alphabet,
                    states: vec![sink(VerdictTag::PermanentlyFalse)],
                    initial: 0,
                    transitions: vec![vec![0; letters]],
                }
            }
            Class::Good => {
                return MonitorAutomaton {
                    alphabet,
                    states: vec![sink(VerdictTag::PermanentlyTrue)],
                    initial: 0,
                    transitions: vec![vec![0; letters]],
                }
            }
            Class::Live => {}
        }

        // BFS over live states; decided targets are redirected to sinks
        // appended after the live states.
        let mut remap: Vec<Option<usize>> = vec![None; n];
        let mut order: Vec<usize> = vec![0];
        remap[0] = Some(0);
        let mut head = 0;
        let mut need_false = false;
        let mut need_true = false;
        while head < order.len() {
            let old = order[head];
            head += 1;
            for &target in &transitions[old] {
                let target = target as usize;
                match class[target] {
                    Class::Bad => need_false = true,
                    Class::Good => need_true = true,
                    Class::Live => {
                        if remap[target].is_none() {
                            remap[target] = Some(order.len());
                            order.push(target);
                        }
                    }
                }
            }
        }

        let live_count = order.len();
        let false_idx = live_count;
        let true_idx = live_count + usize::from(need_false);

        let mut states: Vec<MonitorState> = order
            .iter()
            .map(|&old| MonitorState {
                residual: residuals[old].clone(),
                tag: VerdictTag::Inconclusive,
            })
            .collect();
        let mut new_transitions: Vec<Vec<u32>> = order
            .iter()
            .map(|&old| {
                (0..letters)
                    .map(|bits| {
                        let target = transitions[old][bits] as usize;
                        match class[target] {
                            Class::Live => remap[target].unwrap() as u32,
                            Class::Bad => false_idx as u32,
                            Class::Good => true_idx as u32,
                        }
                    })
                    .collect()
            })
            .collect();
        if need_false {
            states.push(sink(VerdictTag::PermanentlyFalse));
            new_transitions.push(vec![false_idx as u32; letters]);
        }
        if need_true {
            states.push(sink(VerdictTag::PermanentlyTrue));
            new_transitions.push(vec![true_idx as u32; letters]);
        }

        MonitorAutomaton {
            alphabet,
            states,
            initial: 0,
            transitions: new_transitions,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[MonitorState] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn successor(&self, state: usize, letter: Letter) -> usize {
        self.transitions[state][letter.0 as usize] as usize
    }

    pub fn tag(&self, state: usize) -> VerdictTag {
        self.states[state].tag
    }

    /// Advances one letter, returning the successor and its verdict value.
    pub fn step(&self, state: usize, letter: Letter) -> Result<(usize, VerdictValue), StepError> {
        if state >= self.states.len() {
            return Err(StepError::InvalidState {
                state,
                count: self.states.len(),
            });
        }
        let next = self.successor(state, letter);
        let value = match self.states[next].tag {
            VerdictTag::PermanentlyTrue => VerdictValue::Satisfied,
            VerdictTag::PermanentlyFalse => VerdictValue::Violated,
            VerdictTag::Inconclusive => VerdictValue::Inconclusive,
        };
        Ok((next, value))
    }

    /// End-of-trace verdict: evaluates the state's residual on the empty
    /// suffix. Never inconclusive.
    pub fn finalize(&self, state: usize) -> VerdictValue {
        if eps_eval(&self.states[state].residual) {
            VerdictValue::Satisfied
        } else {
            VerdictValue::Violated
        }
    }

    /// Runs a whole trace from the initial state: step verdicts first, the
    /// empty-suffix evaluation if no step decided.
    pub fn verdict_on(&self, trace: &[Letter]) -> Verdict {
        let mut run = MonitorRun::new(self);
        for &letter in trace {
            let verdict = run.step(letter).expect("run state is internal");
            if verdict.position.is_some() {
                return verdict;
            }
        }
        run.finalize()
    }

    /// Line-oriented text dump, stable across runs, for golden-file tests.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "alphabet: {}", self.alphabet.names().join(" ")).unwrap();
        writeln!(out, "states: {}", self.states.len()).unwrap();
        writeln!(out, "initial: {}", self.initial).unwrap();
        for (idx, state) in self.states.iter().enumerate() {
            writeln!(out, "state {} {} \"{}\"", idx, state.tag.label(), state.residual).unwrap();
        }
        for (idx, row) in self.transitions.iter().enumerate() {
            let targets: Vec<String> = row.iter().map(|t| t.to_string()).collect();
            writeln!(out, "delta {}: {}", idx, targets.join(" ")).unwrap();
        }
        out
    }

    /// GraphViz dump for visual inspection.
    pub fn dump_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph \"{name}\" {{").unwrap();
        writeln!(out, "  rankdir=LR;").unwrap();
        writeln!(out, "  init [shape=point];").unwrap();
        for (idx, state) in self.states.iter().enumerate() {
            let shape = match state.tag {
                VerdictTag::Inconclusive => "ellipse",
                VerdictTag::PermanentlyTrue => "doublecircle",
                VerdictTag::PermanentlyFalse => "octagon",
            };
            let label = state.residual.to_string().replace('"', "\\\"");
            writeln!(out, "  s{idx} [shape={shape}, label=\"{idx}: {label}\"];").unwrap();
        }
        writeln!(out, "  init -> s{};", self.initial).unwrap();
        // group parallel edges by target
        for (idx, row) in self.transitions.iter().enumerate() {
            let mut by_target: HashMap<u32, Vec<Letter>> = HashMap::new();
            for (bits, &target) in row.iter().enumerate() {
                by_target.entry(target).or_default().push(Letter(bits as u16));
            }
            let mut targets: Vec<_> = by_target.into_iter().collect();
            targets.sort_by_key(|(t, _)| *t);
            for (target, letters) in targets {
                let all = self.alphabet.letter_count();
                let label = if letters.len() == all {
                    "*".to_string()
                } else {
                    letters
                        .iter()
                        .map(|&l| self.alphabet.describe(l))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                writeln!(out, "  s{idx} -> s{target} [label=\"{label}\"];").unwrap();
            }
        }
        writeln!(out, "}}").unwrap();
        out
    }

    pub(crate) fn from_parts(
        alphabet: Alphabet,
        states: Vec<MonitorState>,
        initial: usize,
        transitions: Vec<Vec<u32>>,
    ) -> Self {
        MonitorAutomaton {
            alphabet,
            states,
            initial,
            transitions,
        }
    }

    pub(crate) fn transitions(&self) -> &[Vec<u32>] {
        &self.transitions
    }
}

/// Per-trace run state: the current automaton state plus the number of
/// letters consumed, tracking when the verdict became final.
#[derive(Debug, Clone)]
pub struct MonitorRun<'a> {
    automaton: &'a MonitorAutomaton,
    state: usize,
    steps: usize,
    decided: Option<Verdict>,
}

impl<'a> MonitorRun<'a> {
    pub fn new(automaton: &'a MonitorAutomaton) -> Self {
        MonitorRun {
            automaton,
            state: automaton.initial(),
            steps: 0,
            decided: None,
        }
    }

    pub fn state(&self) -> usize {
        self.state
    }

    /// Consumes one letter. Once decided, the verdict is absorbing.
    pub fn step(&mut self, letter: Letter) -> Result<Verdict, StepError> {
        let position = self.steps;
        let (next, value) = self.automaton.step(self.state, letter)?;
        self.state = next;
        self.steps += 1;
        if self.decided.is_none() && value != VerdictValue::Inconclusive {
            self.decided = Some(Verdict {
                value,
                position: Some(position),
            });
        }
        Ok(self.decided.unwrap_or(Verdict {
            value: VerdictValue::Inconclusive,
            position: None,
        }))
    }

    /// End-of-trace verdict; the position is the final consumed step (or 0
    /// for an empty trace).
    pub fn finalize(&self) -> Verdict {
        if let Some(decided) = self.decided {
            return decided;
        }
        let value = self.automaton.finalize(self.state);
        Verdict {
            value,
            position: Some(self.steps.saturating_sub(1)),
        }
    }

    pub fn decided(&self) -> Option<Verdict> {
        self.decided
    }
}
