//! Formula progression with canonical residual normalization.
//!
//! `progress(f, a)` rewrites a formula against one trace letter so that the
//! residual holds on the remaining suffix iff the original held on the full
//! trace. Together with [`eps_eval`] (evaluation of a residual once the
//! trace is exhausted) this yields deterministic monitor automata whose
//! verdicts match the reference evaluator exactly, including at trace end.
//!
//! Residuals are kept in disjunctive normal form over *temporal literals*:
//! the `X`/`W`/`U`/`R`/`G`/`F`-rooted subformulas plus bare literals of the
//! original formula, and the two end markers below. Progression only ever
//! produces boolean combinations of these finitely many literals, so the
//! DNF representation (sorted clause sets with subsumption) guarantees a
//! finite state space.
//!
//! The delicate point is the strong/weak next distinction. Unfolding `X g`
//! to the bare residual `g` forgets that a next position was required: if
//! the trace ends right there, `g` may be vacuously satisfied (say, `G p`)
//! although `X g` must fail at the last position. Progression therefore
//! guards the unfolded child with the end markers
//!
//! * `F true` — holds iff at least one trace position remains, and
//! * `G false` — holds iff the trace has ended,
//!
//! and normalization elides a guard whenever the child's empty-word value
//! already agrees with it, which keeps residuals in the shapes a hand
//! unfolding would produce.

use std::collections::BTreeSet;

use crate::ltl::Formula;

use super::alphabet::{Alphabet, AlphabetError, Letter};

/// `F true`: true on every non-empty suffix, false on the empty one.
pub(crate) fn not_end() -> Formula {
    Formula::True.finally()
}

/// `G false`: true exactly on the empty suffix.
pub(crate) fn at_end() -> Formula {
    Formula::False.globally()
}

/// Evaluates a formula on the empty word. This is the verdict rule applied
/// to a monitor residual at the end of a trace: atoms, `X`, `U`, `F` fail,
/// `W`, `R`, `G` succeed vacuously.
pub fn eps_eval(formula: &Formula) -> bool {
    match formula {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(_) => false,
        Formula::Not(p) => !eps_eval(p),
        Formula::And(l, r) => eps_eval(l) && eps_eval(r),
        Formula::Or(l, r) => eps_eval(l) || eps_eval(r),
        Formula::Implies(l, r) => !eps_eval(l) || eps_eval(r),
        Formula::Next(_) | Formula::Until(_, _) | Formula::Finally(_) => false,
        Formula::WeakNext(_) | Formula::Release(_, _) | Formula::Globally(_) => true,
    }
}

/// A conjunction of literals. Empty means `true`.
type Clause = BTreeSet<Formula>;

/// A disjunction of clauses. Empty means `false`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Dnf {
    clauses: BTreeSet<Clause>,
}

fn clause_eps(clause: &Clause) -> bool {
    clause.iter().all(eps_eval)
}

impl Dnf {
    fn fixed(value: bool) -> Dnf {
        let mut clauses = BTreeSet::new();
        if value {
            clauses.insert(Clause::new());
        }
        Dnf { clauses }
    }

    fn literal(lit: Formula) -> Dnf {
        Dnf {
            clauses: BTreeSet::from([Clause::from([lit])]),
        }
    }

    /// Clause cleanup: fold constants, drop contradictory clauses, apply
    /// the end-marker rules. Returns `None` when the clause is false.
    fn clean_clause(mut clause: Clause) -> Option<Clause> {
        clause.remove(&Formula::True);
        if clause.contains(&Formula::False) {
            return None;
        }
        // complementary literals
        for lit in &clause {
            if let Formula::Not(inner) = lit {
                if clause.contains(inner) {
                    return None;
                }
            }
        }
        // `G false` forces the empty suffix: everything else must hold
        // vacuously there
        if clause.contains(&at_end()) {
            if clause.iter().all(eps_eval) {
                return Some(Clause::from([at_end()]));
            }
            return None;
        }
        // `F true` only rules out the empty suffix; redundant if another
        // literal already fails on it
        if clause.contains(&not_end())
            && clause.iter().any(|l| *l != not_end() && !eps_eval(l))
        {
            clause.remove(&not_end());
        }
        Some(clause)
    }

    fn insert_clause(&mut self, clause: Clause) {
        if let Some(clause) = Self::clean_clause(clause) {
            self.clauses.insert(clause);
        }
    }

    /// Removes subsumed clauses (supersets of another clause) and applies
    /// the or-level end-marker and complement rules.
    fn tidy(mut self) -> Dnf {
        if self.clauses.contains(&Clause::new()) {
            return Dnf::fixed(true);
        }
        // singleton complementary clauses make the disjunction true
        for clause in &self.clauses {
            if clause.len() == 1 {
                if let Formula::Not(inner) = clause.first().unwrap() {
                    if self.clauses.contains(&Clause::from([(**inner).clone()])) {
                        return Dnf::fixed(true);
                    }
                }
            }
        }
        // `F true | C` is true outright once some clause covers the empty
        // suffix
        let not_end_clause = Clause::from([not_end()]);
        if self.clauses.contains(&not_end_clause) && self.clauses.iter().any(clause_eps) {
            return Dnf::fixed(true);
        }
        // `G false | C` loses the marker once some other clause covers the
        // empty suffix
        let at_end_clause = Clause::from([at_end()]);
        if self.clauses.contains(&at_end_clause)
            && self
                .clauses
                .iter()
                .any(|c| *c != at_end_clause && clause_eps(c))
        {
            self.clauses.remove(&at_end_clause);
        }
        // subsumption: a clause implied by a smaller one adds nothing
        let clauses: Vec<Clause> = self.clauses.iter().cloned().collect();
        let keep: Vec<Clause> = clauses
            .iter()
            .filter(|c| {
                !clauses
                    .iter()
                    .any(|other| *other != **c && other.is_subset(c))
            })
            .cloned()
            .collect();
        Dnf {
            clauses: keep.into_iter().collect(),
        }
    }

    fn or(self, other: Dnf) -> Dnf {
        let mut out = Dnf { clauses: self.clauses };
        for clause in other.clauses {
            out.insert_clause(clause);
        }
        out
    }

    fn and(self, other: Dnf) -> Dnf {
        let mut out = Dnf { clauses: BTreeSet::new() };
        for left in &self.clauses {
            for right in &other.clauses {
                let merged: Clause = left.iter().chain(right.iter()).cloned().collect();
                out.insert_clause(merged);
            }
        }
        out
    }

    fn into_formula(self) -> Formula {
        let mut clause_formulas: Vec<Formula> = self
            .clauses
            .into_iter()
            .map(|clause| {
                let mut lits: Vec<Formula> = clause.into_iter().collect();
                match lits.len() {
                    0 => Formula::True,
                    1 => lits.pop().unwrap(),
                    _ => {
                        let mut iter = lits.into_iter().rev();
                        let last = iter.next().unwrap();
                        iter.fold(last, |acc, lit| lit.and(acc))
                    }
                }
            })
            .collect();
        clause_formulas.sort();
        match clause_formulas.len() {
            0 => Formula::False,
            1 => clause_formulas.pop().unwrap(),
            _ => {
                let mut iter = clause_formulas.into_iter().rev();
                let last = iter.next().unwrap();
                iter.fold(last, |acc, clause| clause.or(acc))
            }
        }
    }
}

/// Canonical form used for monitor states: a sorted disjunction of sorted
/// conjunctions over temporal literals, constants folded, complementary and
/// subsumed parts removed, end-marker guards elided where redundant.
pub fn normalize(formula: &Formula) -> Formula {
    to_dnf(formula).into_formula()
}

fn to_dnf(formula: &Formula) -> Dnf {
    match formula {
        Formula::True => Dnf::fixed(true),
        Formula::False => Dnf::fixed(false),
        Formula::And(l, r) => to_dnf(l).and(to_dnf(r)).tidy(),
        Formula::Or(l, r) => to_dnf(l).or(to_dnf(r)).tidy(),
        other => match normalize_literal(other) {
            Formula::True => Dnf::fixed(true),
            Formula::False => Dnf::fixed(false),
            lit @ (Formula::And(_, _) | Formula::Or(_, _)) => to_dnf(&lit),
            lit => Dnf::literal(lit),
        },
    }
}

/// Node-level folds for non-boolean nodes; children normalized recursively.
fn normalize_literal(formula: &Formula) -> Formula {
    match formula {
        Formula::True | Formula::False | Formula::Atom(_) => formula.clone(),
        Formula::And(_, _) | Formula::Or(_, _) => normalize(formula),
        Formula::Not(p) => match normalize(p) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => other.not(),
        },
        Formula::Implies(l, r) => match (normalize(l), normalize(r)) {
            (Formula::True, r) => r,
            (Formula::False, _) => Formula::True,
            (_, Formula::True) => Formula::True,
            (l, r) => l.implies(r),
        },
        Formula::Next(p) => match normalize(p) {
            Formula::False => Formula::False,
            other => other.next(),
        },
        Formula::WeakNext(p) => match normalize(p) {
            Formula::True => Formula::True,
            other => other.weak_next(),
        },
        Formula::Globally(p) => match normalize(p) {
            Formula::True => Formula::True,
            Formula::Globally(inner) => inner.globally(),
            other => other.globally(),
        },
        Formula::Finally(p) => match normalize(p) {
            Formula::False => Formula::False,
            Formula::Finally(inner) => inner.finally(),
            other => other.finally(),
        },
        Formula::Until(l, r) => match (normalize(l), normalize(r)) {
            (_, Formula::False) => Formula::False,
            (Formula::True, r) => r.finally(),
            // `false U r` demands r immediately, on a non-empty suffix
            (Formula::False, r) => r.and(not_end()),
            (l, r) => l.until(r),
        },
        Formula::Release(l, r) => match (normalize(l), normalize(r)) {
            (_, Formula::True) => Formula::True,
            (Formula::False, r) => r.globally(),
            // `l R false` can only be satisfied by the empty suffix
            (_, Formula::False) => at_end(),
            // `true R r` is r immediately, or the empty suffix
            (Formula::True, r) => r.or(at_end()),
            (l, r) => l.release(r),
        },
    }
}

/// One-letter progression. The input is brought into NNF and the result is
/// normalized, so repeated progression reaches only finitely many residuals.
pub fn progress(
    formula: &Formula,
    alphabet: &Alphabet,
    letter: Letter,
) -> Result<Formula, AlphabetError> {
    let nnf;
    let formula = if formula.is_nnf() {
        formula
    } else {
        nnf = formula.to_nnf();
        &nnf
    };
    Ok(progress_dnf(formula, alphabet, letter)?.into_formula())
}

fn progress_dnf(
    formula: &Formula,
    alphabet: &Alphabet,
    letter: Letter,
) -> Result<Dnf, AlphabetError> {
    let truth = |name: &str| -> Result<bool, AlphabetError> {
        let bit = alphabet
            .position(name)
            .ok_or_else(|| AlphabetError::Unassigned(name.to_string()))?;
        Ok(letter.get(bit))
    };
    Ok(match formula {
        Formula::True => Dnf::fixed(true),
        Formula::False => Dnf::fixed(false),
        Formula::Atom(name) => Dnf::fixed(truth(name)?),
        Formula::Not(p) => match &**p {
            Formula::Atom(name) => Dnf::fixed(!truth(name)?),
            other => progress_dnf(&other.negate_nnf(), alphabet, letter)?,
        },
        Formula::Implies(l, r) => {
            let l = progress_dnf(&l.negate_nnf(), alphabet, letter)?;
            let r = progress_dnf(r, alphabet, letter)?;
            l.or(r).tidy()
        }
        Formula::And(l, r) => progress_dnf(l, alphabet, letter)?
            .and(progress_dnf(r, alphabet, letter)?)
            .tidy(),
        Formula::Or(l, r) => progress_dnf(l, alphabet, letter)?
            .or(progress_dnf(r, alphabet, letter)?)
            .tidy(),
        Formula::Next(p) => {
            // the residual must still fail if the trace ends here
            if eps_eval(p) {
                to_dnf(p).and(Dnf::literal(not_end())).tidy()
            } else {
                to_dnf(p)
            }
        }
        Formula::WeakNext(p) => {
            if eps_eval(p) {
                to_dnf(p)
            } else {
                to_dnf(p).or(Dnf::literal(at_end())).tidy()
            }
        }
        Formula::Until(l, r) => {
            let pr = progress_dnf(r, alphabet, letter)?;
            let pl = progress_dnf(l, alphabet, letter)?;
            pr.or(pl.and(Dnf::literal(formula.clone()))).tidy()
        }
        Formula::Release(l, r) => {
            let pr = progress_dnf(r, alphabet, letter)?;
            let pl = progress_dnf(l, alphabet, letter)?;
            pr.and(pl.or(Dnf::literal(formula.clone())).tidy()).tidy()
        }
        Formula::Globally(p) => progress_dnf(p, alphabet, letter)?
            .and(Dnf::literal(formula.clone()))
            .tidy(),
        Formula::Finally(p) => progress_dnf(p, alphabet, letter)?
            .or(Dnf::literal(formula.clone()))
            .tidy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn step(formula: &str, truth: &[(&str, bool)]) -> Formula {
        let f = parse(formula).unwrap();
        let alphabet = Alphabet::of_formula(&f).unwrap();
        let letter = alphabet.letter_from(|n| truth.iter().any(|(k, v)| *k == n && *v));
        progress(&f, &alphabet, letter).unwrap()
    }

    #[test]
    fn globally_regenerates_itself() {
        assert_eq!(step("G a", &[("a", true)]), parse("G a").unwrap());
        assert_eq!(step("G a", &[("a", false)]), Formula::False);
    }

    #[test]
    fn until_unfolds() {
        assert_eq!(
            step("a U b", &[("a", true), ("b", false)]),
            parse("a U b").unwrap()
        );
        assert_eq!(step("a U b", &[("a", false), ("b", true)]), Formula::True);
        assert_eq!(step("a U b", &[("a", false), ("b", false)]), Formula::False);
    }

    #[test]
    fn passing_chain_conclusion_unfolds_to_release_chain() {
        // one step of !(behind & X (behind U right U front)) under
        // {behind}: the weak-next obligation becomes the NNF complement of
        // the chain itself.
        let residual = step(
            "!(behind & X (behind U right U front))",
            &[("behind", true), ("right", false), ("front", false)],
        );
        let expected = normalize(&parse("behind U right U front").unwrap().negate_nnf());
        assert_eq!(residual, expected);
        assert_eq!(residual, parse("!behind R (!right R !front)").unwrap());
    }

    #[test]
    fn strong_next_residual_fails_at_trace_end() {
        // X (G a): the residual must not be vacuously true if the trace
        // ends immediately after this letter.
        let residual = step("X (G a)", &[("a", true)]);
        assert!(!eps_eval(&residual));
        assert_eq!(residual, parse("G a & F true").unwrap());
    }

    #[test]
    fn strong_next_guard_elided_when_child_is_strict() {
        assert_eq!(step("X (F a)", &[("a", false)]), parse("F a").unwrap());
    }

    #[test]
    fn weak_next_residual_succeeds_at_trace_end() {
        let residual = step("W (F a)", &[("a", false)]);
        assert!(eps_eval(&residual));
        assert_eq!(residual, parse("G false | F a").unwrap());
        assert_eq!(step("W (G a)", &[("a", false)]), parse("G a").unwrap());
    }

    #[test]
    fn eps_eval_matches_verdict_rules() {
        assert!(eps_eval(&parse("G a").unwrap()));
        assert!(!eps_eval(&parse("F a").unwrap()));
        assert!(!eps_eval(&parse("speed_diff U front").unwrap()));
        assert!(eps_eval(&parse("a R b").unwrap()));
        assert!(eps_eval(&parse("W a").unwrap()));
        assert!(!eps_eval(&parse("X a").unwrap()));
    }

    #[test]
    fn normalization_orders_and_deduplicates() {
        let f = parse("b & a & b").unwrap();
        assert_eq!(normalize(&f), parse("a & b").unwrap());
        let g = parse("(G a & F b) & G a").unwrap();
        assert_eq!(normalize(&g), parse("G a & F b").unwrap());
    }

    #[test]
    fn complementary_literals_annihilate() {
        assert_eq!(normalize(&parse("a & !a").unwrap()), Formula::False);
        assert_eq!(normalize(&parse("a | b | !b").unwrap()), Formula::True);
    }

    #[test]
    fn distribution_is_canonical() {
        // and-over-or and or-over-and meet in the same normal form
        let f = parse("(a | G b) & (a | F c)").unwrap();
        let g = parse("a | G b & (F c | a)").unwrap();
        assert_eq!(normalize(&f), normalize(&g));
    }

    #[test]
    fn subsumed_clauses_are_dropped() {
        let f = parse("G a | G a & F b").unwrap();
        assert_eq!(normalize(&f), parse("G a").unwrap());
    }

    #[test]
    fn unassigned_proposition_is_an_error() {
        let f = parse("a & b").unwrap();
        let alphabet = Alphabet::new(vec!["a".into()]).unwrap();
        let err = progress(&f, &alphabet, Letter(1)).unwrap_err();
        assert_eq!(err, AlphabetError::Unassigned("b".into()));
    }
}
