use std::collections::HashMap;

use thiserror::Error;

use crate::ltl::Formula;

/// The proposition alphabet of a monitor: an ordered list of names. Letters
/// are bitsets over this order, so the alphabet is capped at 16 propositions
/// to keep transition tables dense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

pub const MAX_PROPOSITIONS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("alphabet has {0} propositions, the maximum is {MAX_PROPOSITIONS}")]
    TooLarge(usize),
    #[error("proposition `{0}` is not assigned by the trace alphabet")]
    Unassigned(String),
}

impl Alphabet {
    /// Builds an alphabet from sorted, deduplicated names.
    pub fn new(mut names: Vec<String>) -> Result<Self, AlphabetError> {
        names.sort();
        names.dedup();
        if names.len() > MAX_PROPOSITIONS {
            return Err(AlphabetError::TooLarge(names.len()));
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Ok(Alphabet { names, index })
    }

    /// The alphabet of a formula: its atoms in sorted order.
    pub fn of_formula(formula: &Formula) -> Result<Self, AlphabetError> {
        Alphabet::new(formula.atoms().into_iter().map(str::to_string).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Number of distinct letters (2^n).
    pub fn letter_count(&self) -> usize {
        1usize << self.names.len()
    }

    /// Checks that every atom of `formula` is covered.
    pub fn covers(&self, formula: &Formula) -> Result<(), AlphabetError> {
        for atom in formula.atoms() {
            if !self.index.contains_key(atom) {
                return Err(AlphabetError::Unassigned(atom.to_string()));
            }
        }
        Ok(())
    }

    pub fn letter_from<F: Fn(&str) -> bool>(&self, truth: F) -> Letter {
        let mut bits = 0u16;
        for (i, name) in self.names.iter().enumerate() {
            if truth(name) {
                bits |= 1 << i;
            }
        }
        Letter(bits)
    }

    /// Renders a letter as the set of true propositions, for dumps.
    pub fn describe(&self, letter: Letter) -> String {
        let set: Vec<&str> = self
            .names
            .iter()
            .enumerate()
            .filter(|(i, _)| letter.get(*i))
            .map(|(_, n)| n.as_str())
            .collect();
        if set.is_empty() {
            "{}".to_string()
        } else {
            format!("{{{}}}", set.join(","))
        }
    }
}

/// One trace position: a truth assignment over an [`Alphabet`], packed as a
/// bitset. Bit `k` is the truth of the alphabet's `k`-th proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Letter(pub u16);

impl Letter {
    pub fn get(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn with(self, index: usize, value: bool) -> Letter {
        if value {
            Letter(self.0 | (1 << index))
        } else {
            Letter(self.0 & !(1 << index))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_is_sorted_and_deduplicated() {
        let alphabet = Alphabet::new(vec!["b".into(), "a".into(), "b".into()]).unwrap();
        assert_eq!(alphabet.names(), ["a".to_string(), "b".to_string()]);
        assert_eq!(alphabet.letter_count(), 4);
    }

    #[test]
    fn letters_round_trip_truth() {
        let alphabet = Alphabet::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let letter = alphabet.letter_from(|n| n == "a" || n == "c");
        assert!(letter.get(0));
        assert!(!letter.get(1));
        assert!(letter.get(2));
        assert_eq!(alphabet.describe(letter), "{a,c}");
    }

    #[test]
    fn oversized_alphabet_is_rejected() {
        let names: Vec<String> = (0..17).map(|i| format!("p{i:02}")).collect();
        assert_eq!(Alphabet::new(names).unwrap_err(), AlphabetError::TooLarge(17));
    }
}
