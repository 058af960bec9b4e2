//! Premise/conclusion rules of the shape `G(premise -> conclusion)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::formula::Formula;
use super::parser::{self, ParseError};

/// Agent slots a proposition may reference via its `_i`/`_j`/`_k` suffix.
/// Slot 0 is the ego agent `i`.
pub const SLOT_NAMES: [char; 3] = ['i', 'j', 'k'];

/// A traffic rule: the pair (premise, conclusion) plus the number of agent
/// slots its propositions range over and the named scalar thresholds its
/// predicates consume.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub name: String,
    pub premise: Formula,
    pub conclusion: Formula,
    pub arity: u8,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("rule `{rule}`: arity {arity} out of range 1..=3")]
    BadArity { rule: String, arity: u8 },
    #[error("rule `{rule}`: proposition `{prop}` references agent slot `{slot}` but arity is {arity}")]
    SlotOutOfRange {
        rule: String,
        prop: String,
        slot: char,
        arity: u8,
    },
    #[error("rule file line {line}: {message}")]
    File { line: usize, message: String },
    #[error("rule file line {line}: {source}")]
    Formula {
        line: usize,
        #[source]
        source: ParseError,
    },
}

/// Splits a proposition name into its base and the agent slots it
/// references. A trailing `_`-separated segment consisting only of the
/// letters `i`, `j`, `k` names the slots (`behind_ij` -> ("behind", [0, 1])).
/// Without such a suffix the proposition implicitly refers to the ego slot.
pub fn proposition_slots(name: &str) -> (&str, Vec<u8>) {
    if let Some(idx) = name.rfind('_') {
        let suffix = &name[idx + 1..];
        if !suffix.is_empty() && suffix.chars().all(|c| SLOT_NAMES.contains(&c)) {
            let slots = suffix
                .chars()
                .map(|c| SLOT_NAMES.iter().position(|s| *s == c).unwrap() as u8)
                .collect();
            return (&name[..idx], slots);
        }
    }
    (name, vec![0])
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        premise: Formula,
        conclusion: Formula,
        arity: u8,
        params: BTreeMap<String, f64>,
    ) -> Result<Self, RuleError> {
        let rule = Rule {
            name: name.into(),
            premise,
            conclusion,
            arity,
            params,
        };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<(), RuleError> {
        if !(1..=3).contains(&self.arity) {
            return Err(RuleError::BadArity {
                rule: self.name.clone(),
                arity: self.arity,
            });
        }
        for formula in [&self.premise, &self.conclusion] {
            for prop in formula.atoms() {
                let (_, slots) = proposition_slots(prop);
                for slot in slots {
                    if slot >= self.arity {
                        return Err(RuleError::SlotOutOfRange {
                            rule: self.name.clone(),
                            prop: prop.to_string(),
                            slot: SLOT_NAMES[slot as usize],
                            arity: self.arity,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The monitored formula `G(premise -> conclusion)`.
    pub fn as_formula(&self) -> Formula {
        self.premise.clone().implies(self.conclusion.clone()).globally()
    }

    /// Sorted proposition names occurring in premise or conclusion.
    pub fn alphabet(&self) -> Vec<String> {
        let mut atoms: Vec<String> = self
            .premise
            .atoms()
            .into_iter()
            .chain(self.conclusion.atoms())
            .map(str::to_string)
            .collect();
        atoms.sort();
        atoms.dedup();
        atoms
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule {} arity {}", self.name, self.arity)?;
        writeln!(f, "premise: {}", self.premise)?;
        writeln!(f, "conclusion: {}", self.conclusion)?;
        for (key, value) in &self.params {
            writeln!(f, "param {key} = {value}")?;
        }
        Ok(())
    }
}

/// Parses a rule-library file: one rule per stanza,
///
/// ```text
/// rule <name> arity <n>
/// premise: <formula>
/// conclusion: <formula>
/// param <key> = <float>
/// ```
///
/// Blank lines separate stanzas; `#` starts a comment line.
pub fn parse_rule_file(text: &str) -> Result<Vec<Rule>, RuleError> {
    struct Pending {
        line: usize,
        name: String,
        arity: u8,
        premise: Option<Formula>,
        conclusion: Option<Formula>,
        params: BTreeMap<String, f64>,
    }

    fn finish(pending: Pending) -> Result<Rule, RuleError> {
        let premise = pending.premise.ok_or(RuleError::File {
            line: pending.line,
            message: format!("rule `{}` is missing a premise", pending.name),
        })?;
        let conclusion = pending.conclusion.ok_or(RuleError::File {
            line: pending.line,
            message: format!("rule `{}` is missing a conclusion", pending.name),
        })?;
        Rule::new(pending.name, premise, conclusion, pending.arity, pending.params)
    }

    let mut rules = Vec::new();
    let mut pending: Option<Pending> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("rule ") {
            if let Some(prev) = pending.take() {
                rules.push(finish(prev)?);
            }
            let mut parts = rest.split_whitespace();
            let name = parts.next().unwrap_or_default().to_string();
            let arity = match (parts.next(), parts.next(), parts.next()) {
                (Some("arity"), Some(n), None) => {
                    n.parse::<u8>().map_err(|_| RuleError::File {
                        line: line_no,
                        message: format!("invalid arity `{n}`"),
                    })?
                }
                _ => {
                    return Err(RuleError::File {
                        line: line_no,
                        message: "expected `rule <name> arity <n>`".into(),
                    })
                }
            };
            pending = Some(Pending {
                line: line_no,
                name,
                arity,
                premise: None,
                conclusion: None,
                params: BTreeMap::new(),
            });
        } else {
            let pending = pending.as_mut().ok_or(RuleError::File {
                line: line_no,
                message: "expected a `rule` header before this line".into(),
            })?;
            if let Some(rest) = line.strip_prefix("premise:") {
                let formula = parser::parse(rest.trim())
                    .map_err(|source| RuleError::Formula { line: line_no, source })?;
                pending.premise = Some(formula);
            } else if let Some(rest) = line.strip_prefix("conclusion:") {
                let formula = parser::parse(rest.trim())
                    .map_err(|source| RuleError::Formula { line: line_no, source })?;
                pending.conclusion = Some(formula);
            } else if let Some(rest) = line.strip_prefix("param ") {
                let (key, value) = rest.split_once('=').ok_or(RuleError::File {
                    line: line_no,
                    message: "expected `param <key> = <float>`".into(),
                })?;
                let value: f64 = value.trim().parse().map_err(|_| RuleError::File {
                    line: line_no,
                    message: format!("invalid float `{}`", value.trim()),
                })?;
                pending.params.insert(key.trim().to_string(), value);
            } else {
                return Err(RuleError::File {
                    line: line_no,
                    message: format!("unrecognized line `{line}`"),
                });
            }
        }
    }
    if let Some(prev) = pending.take() {
        rules.push(finish(prev)?);
    }
    Ok(rules)
}
