//! Reference evaluator: textbook LTLf semantics by backward dynamic
//! programming over the subformula order.
//!
//! This is the semantic oracle the automaton construction is checked
//! against, and the engine's tool for pointwise premise/conclusion
//! accounting. It deliberately shares no code with formula progression.

use std::collections::HashMap;

use thiserror::Error;

use crate::ltl::Formula;

use super::alphabet::{Alphabet, AlphabetError, Letter};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("position {pos} out of range for trace of length {len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

/// Truth of `formula` at position `pos` of the trace.
pub fn evaluate_naive(
    formula: &Formula,
    alphabet: &Alphabet,
    trace: &[Letter],
    pos: usize,
) -> Result<bool, EvalError> {
    if pos >= trace.len() {
        return Err(EvalError::PositionOutOfRange { pos, len: trace.len() });
    }
    Ok(evaluate_all(formula, alphabet, trace)?[pos])
}

/// Truth of `formula` at every position of the trace.
///
/// One backward pass per subformula, children before parents, so the whole
/// vector costs O(|trace| * |subformulas|).
pub fn evaluate_all(
    formula: &Formula,
    alphabet: &Alphabet,
    trace: &[Letter],
) -> Result<Vec<bool>, EvalError> {
    alphabet.covers(formula)?;
    let n = trace.len();
    let subs = formula.subformulas();
    let index: HashMap<&Formula, usize> = subs.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut truth: Vec<Vec<bool>> = Vec::with_capacity(subs.len());

    for sub in &subs {
        let row = match sub {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(name) => {
                let bit = alphabet.position(name).expect("covers() checked atoms");
                trace.iter().map(|letter| letter.get(bit)).collect()
            }
            Formula::Not(p) => {
                let p = &truth[index[&**p]];
                (0..n).map(|t| !p[t]).collect()
            }
            Formula::And(l, r) => {
                let (l, r) = (&truth[index[&**l]], &truth[index[&**r]]);
                (0..n).map(|t| l[t] && r[t]).collect()
            }
            Formula::Or(l, r) => {
                let (l, r) = (&truth[index[&**l]], &truth[index[&**r]]);
                (0..n).map(|t| l[t] || r[t]).collect()
            }
            Formula::Implies(l, r) => {
                let (l, r) = (&truth[index[&**l]], &truth[index[&**r]]);
                (0..n).map(|t| !l[t] || r[t]).collect()
            }
            Formula::Next(p) => {
                let p = &truth[index[&**p]];
                (0..n).map(|t| t + 1 < n && p[t + 1]).collect()
            }
            Formula::WeakNext(p) => {
                let p = &truth[index[&**p]];
                (0..n).map(|t| t + 1 >= n || p[t + 1]).collect()
            }
            Formula::Until(l, r) => {
                let (l, r) = (&truth[index[&**l]], &truth[index[&**r]]);
                let mut row = vec![false; n];
                for t in (0..n).rev() {
                    row[t] = r[t] || (l[t] && t + 1 < n && row[t + 1]);
                }
                row
            }
            Formula::Release(l, r) => {
                let (l, r) = (&truth[index[&**l]], &truth[index[&**r]]);
                let mut row = vec![false; n];
                for t in (0..n).rev() {
                    row[t] = r[t] && (l[t] || t + 1 >= n || row[t + 1]);
                }
                row
            }
            Formula::Globally(p) => {
                let p = &truth[index[&**p]];
                let mut row = vec![false; n];
                for t in (0..n).rev() {
                    row[t] = p[t] && (t + 1 >= n || row[t + 1]);
                }
                row
            }
            Formula::Finally(p) => {
                let p = &truth[index[&**p]];
                let mut row = vec![false; n];
                for t in (0..n).rev() {
                    row[t] = p[t] || (t + 1 < n && row[t + 1]);
                }
                row
            }
        };
        truth.push(row);
    }
    Ok(truth.pop().expect("at least the root subformula"))
}
