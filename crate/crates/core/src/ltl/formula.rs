use std::collections::HashMap;
use std::fmt;

/// Abstract syntax tree of a finite-trace LTL formula.
///
/// `Next` is the strong next (false at the last trace position). `WeakNext`
/// and `Release` never appear in parsed surface syntax trees built from the
/// core operators alone, but negation normal form needs them as duals of
/// `Next` and `Until`, so they are first-class node kinds.
///
/// The derived `Ord` gives a total syntactic order used for canonical
/// operand ordering during monitor-state normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    WeakNext(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Globally(Box<Formula>),
    Finally(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    // builder-style combinators; `not` is deliberately a consuming builder
    // like the others rather than `std::ops::Not`
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn next(self) -> Self {
        Formula::Next(Box::new(self))
    }

    pub fn weak_next(self) -> Self {
        Formula::WeakNext(Box::new(self))
    }

    pub fn until(self, other: Self) -> Self {
        Formula::Until(Box::new(self), Box::new(other))
    }

    pub fn release(self, other: Self) -> Self {
        Formula::Release(Box::new(self), Box::new(other))
    }

    pub fn globally(self) -> Self {
        Formula::Globally(Box::new(self))
    }

    pub fn finally(self) -> Self {
        Formula::Finally(Box::new(self))
    }

    /// All atomic proposition names, sorted and deduplicated.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.collect_atoms(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(name) => out.push(name),
            Formula::Not(p) | Formula::Next(p) | Formula::WeakNext(p) | Formula::Globally(p)
            | Formula::Finally(p) => p.collect_atoms(out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r)
            | Formula::Release(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Distinct subformulas in topological order: children always precede
    /// their parents, the final entry is `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut order: Vec<&Formula> = Vec::new();
        let mut seen: HashMap<&Formula, usize> = HashMap::new();
        self.visit_subformulas(&mut order, &mut seen);
        order
    }

    fn visit_subformulas<'a>(
        &'a self,
        order: &mut Vec<&'a Formula>,
        seen: &mut HashMap<&'a Formula, usize>,
    ) {
        if seen.contains_key(self) {
            return;
        }
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(p) | Formula::Next(p) | Formula::WeakNext(p) | Formula::Globally(p)
            | Formula::Finally(p) => p.visit_subformulas(order, seen),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r)
            | Formula::Release(l, r) => {
                l.visit_subformulas(order, seen);
                r.visit_subformulas(order, seen);
            }
        }
        seen.insert(self, order.len());
        order.push(self);
    }

    /// True when the formula is in negation normal form: no `Implies`, and
    /// `Not` appears only directly above atoms.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(p) => matches!(**p, Formula::Atom(_)),
            Formula::Implies(_, _) => false,
            Formula::Next(p) | Formula::WeakNext(p) | Formula::Globally(p) | Formula::Finally(p) => {
                p.is_nnf()
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) | Formula::Release(l, r) => {
                l.is_nnf() && r.is_nnf()
            }
        }
    }

    /// Negation normal form. Pushes negations down to atoms and rewrites
    /// implications. `G` and `F` stay native; the duals `¬X φ ≡ W ¬φ` and
    /// `¬(φ U ψ) ≡ ¬φ R ¬ψ` introduce weak-next and release nodes.
    pub fn to_nnf(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(name) => Formula::Atom(name.clone()),
            Formula::Not(p) => p.negate_nnf(),
            Formula::And(l, r) => l.to_nnf().and(r.to_nnf()),
            Formula::Or(l, r) => l.to_nnf().or(r.to_nnf()),
            Formula::Implies(l, r) => l.negate_nnf().or(r.to_nnf()),
            Formula::Next(p) => p.to_nnf().next(),
            Formula::WeakNext(p) => p.to_nnf().weak_next(),
            Formula::Until(l, r) => l.to_nnf().until(r.to_nnf()),
            Formula::Release(l, r) => l.to_nnf().release(r.to_nnf()),
            Formula::Globally(p) => p.to_nnf().globally(),
            Formula::Finally(p) => p.to_nnf().finally(),
        }
    }

    /// NNF of the negation of `self`.
    pub fn negate_nnf(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(name) => Formula::Atom(name.clone()).not(),
            Formula::Not(p) => p.to_nnf(),
            Formula::And(l, r) => l.negate_nnf().or(r.negate_nnf()),
            Formula::Or(l, r) => l.negate_nnf().and(r.negate_nnf()),
            Formula::Implies(l, r) => l.to_nnf().and(r.negate_nnf()),
            Formula::Next(p) => p.negate_nnf().weak_next(),
            Formula::WeakNext(p) => p.negate_nnf().next(),
            Formula::Until(l, r) => l.negate_nnf().release(r.negate_nnf()),
            Formula::Release(l, r) => l.negate_nnf().until(r.negate_nnf()),
            Formula::Globally(p) => p.negate_nnf().finally(),
            Formula::Finally(p) => p.negate_nnf().globally(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(_, _) => 1,
            Formula::Or(_, _) => 2,
            Formula::And(_, _) => 3,
            Formula::Until(_, _) | Formula::Release(_, _) => 4,
            Formula::Not(_)
            | Formula::Next(_)
            | Formula::WeakNext(_)
            | Formula::Globally(_)
            | Formula::Finally(_) => 5,
            Formula::True | Formula::False | Formula::Atom(_) => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min_prec {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(name) => write!(f, "{name}"),
            Formula::Not(p) => {
                write!(f, "!")?;
                p.fmt_prec(f, prec)
            }
            Formula::Next(p) => {
                write!(f, "X ")?;
                p.fmt_prec(f, prec)
            }
            Formula::WeakNext(p) => {
                write!(f, "W ")?;
                p.fmt_prec(f, prec)
            }
            Formula::Globally(p) => {
                write!(f, "G ")?;
                p.fmt_prec(f, prec)
            }
            Formula::Finally(p) => {
                write!(f, "F ")?;
                p.fmt_prec(f, prec)
            }
            // All binary operators are right-associative: the left operand
            // must bind strictly tighter, the right may sit at the same level.
            Formula::And(l, r) => {
                l.fmt_prec(f, prec + 1)?;
                write!(f, " & ")?;
                r.fmt_prec(f, prec)
            }
            Formula::Or(l, r) => {
                l.fmt_prec(f, prec + 1)?;
                write!(f, " | ")?;
                r.fmt_prec(f, prec)
            }
            Formula::Implies(l, r) => {
                l.fmt_prec(f, prec + 1)?;
                write!(f, " -> ")?;
                r.fmt_prec(f, prec)
            }
            Formula::Until(l, r) => {
                l.fmt_prec(f, prec + 1)?;
                write!(f, " U ")?;
                r.fmt_prec(f, prec)
            }
            Formula::Release(l, r) => {
                l.fmt_prec(f, prec + 1)?;
                write!(f, " R ")?;
                r.fmt_prec(f, prec)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("a")
    }

    fn b() -> Formula {
        Formula::atom("b")
    }

    #[test]
    fn nnf_globally_duality() {
        let f = a().globally().not();
        assert_eq!(f.to_nnf(), a().not().finally());
    }

    #[test]
    fn nnf_until_duality() {
        let f = a().until(b()).not();
        assert_eq!(f.to_nnf(), a().not().release(b().not()));
    }

    #[test]
    fn nnf_next_duality_uses_weak_next() {
        let f = a().next().not();
        assert_eq!(f.to_nnf(), a().not().weak_next());
    }

    #[test]
    fn nnf_atom_is_identity() {
        assert_eq!(a().to_nnf(), a());
    }

    #[test]
    fn nnf_output_is_nnf() {
        let f = a().implies(b().until(a().next()).not()).globally().not();
        let nnf = f.to_nnf();
        assert!(nnf.is_nnf());
        assert!(!f.is_nnf());
    }

    #[test]
    fn subformulas_simple() {
        let f = a().globally();
        let subs = f.subformulas();
        assert_eq!(subs, vec![&a(), &f]);
    }

    #[test]
    fn subformulas_deduplicates() {
        let f = a().implies(a());
        let subs = f.subformulas();
        assert_eq!(subs.len(), 2);
        assert_eq!(subs[0], &a());
        assert_eq!(subs[1], &f);
    }

    #[test]
    fn subformulas_of_passing_chain_conclusion() {
        // !(behind & X (behind U right U front)): eight distinct nodes,
        // root last.
        let behind = Formula::atom("behind");
        let right = Formula::atom("right");
        let front = Formula::atom("front");
        let chain = behind.clone().until(right.until(front));
        let f = behind.and(chain.next()).not();
        let subs = f.subformulas();
        assert_eq!(subs.len(), 8);
        assert_eq!(*subs.last().unwrap(), &f);
        for (idx, sub) in subs.iter().enumerate() {
            // children-before-parents: every proper subformula of `sub`
            // occurring in the list appears earlier.
            for later in &subs[idx + 1..] {
                assert_ne!(sub, later);
            }
        }
    }

    #[test]
    fn display_uses_minimal_parens() {
        let f = a().implies(b()).globally();
        assert_eq!(f.to_string(), "G (a -> b)");
        let chain = a().until(b().until(Formula::atom("c")));
        assert_eq!(chain.to_string(), "a U b U c");
        let left_nested = a().until(b()).until(Formula::atom("c"));
        assert_eq!(left_nested.to_string(), "(a U b) U c");
    }
}
