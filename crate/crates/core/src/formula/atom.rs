use std::cmp::Ordering;
use std::fmt;

use super::term::{sign, LinearTerm, Model, Rational, Var};
use super::{EvalError, Formula};

/// Comparison of a term against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `term >= 0`
    Ge,
    /// `term > 0`
    Gt,
    /// `term = 0`
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
        }
    }

    pub fn holds(self, value: &Rational) -> bool {
        match self {
            Relation::Ge => !value.is_negative(),
            Relation::Gt => value.is_positive(),
            Relation::Eq => value.is_zero(),
        }
    }
}

/// A linear constraint `term rel 0` in canonical form.
///
/// The term is scaled by a positive factor so that its constant and coefficients
/// are coprime integers. Equalities additionally have a positive leading
/// coefficient. Ground atoms keep only the sign of their constant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    term: LinearTerm,
    rel: Relation,
}

impl Atom {
    pub fn new(term: LinearTerm, rel: Relation) -> Atom {
        let term = if term.is_ground() {
            LinearTerm::constant(Rational::from_integer(sign(term.constant_part()).into()))
        } else {
            let p = term.primitive();
            if rel == Relation::Eq && p.leading_coeff().is_some_and(|c| c.is_negative()) {
                -p
            } else {
                p
            }
        };
        Atom { term, rel }
    }

    pub fn ge(term: LinearTerm) -> Atom {
        Atom::new(term, Relation::Ge)
    }

    pub fn gt(term: LinearTerm) -> Atom {
        Atom::new(term, Relation::Gt)
    }

    pub fn eq(term: LinearTerm) -> Atom {
        Atom::new(term, Relation::Eq)
    }

    pub fn term(&self) -> &LinearTerm {
        &self.term
    }

    pub fn rel(&self) -> Relation {
        self.rel
    }

    pub fn is_ground(&self) -> bool {
        self.term.is_ground()
    }

    /// Truth value of a ground atom.
    pub fn ground_value(&self) -> Option<bool> {
        self.is_ground().then(|| self.rel.holds(self.term.constant_part()))
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.term.mentions(v)
    }

    pub fn holds(&self, m: &Model) -> Result<bool, EvalError> {
        Ok(self.rel.holds(&self.term.eval(m)?))
    }

    /// The atom equivalent to the negation of an inequality; `None` for equalities.
    pub fn complement(&self) -> Option<Atom> {
        let neg = -self.term.clone();
        match self.rel {
            Relation::Ge => Some(Atom::gt(neg)),
            Relation::Gt => Some(Atom::ge(neg)),
            Relation::Eq => None,
        }
    }

    /// Negation as a negation-free formula. `t = 0` negates to `t > 0 ∨ -t > 0`.
    pub fn negate(&self) -> Formula {
        match self.complement() {
            Some(a) => Formula::atom(a),
            None => Formula::or(vec![
                Formula::atom(Atom::gt(self.term.clone())),
                Formula::atom(Atom::gt(-self.term.clone())),
            ]),
        }
    }

    /// The same constraint with `v` replaced by `replacement`.
    pub fn substitute(&self, v: &Var, replacement: &LinearTerm) -> Atom {
        if !self.mentions(v) {
            return self.clone();
        }
        Atom::new(self.term.substitute(v, replacement), self.rel)
    }

    /// Splits into a predicate (the representative of the pair `{a, ¬a}` whose leading
    /// coefficient is positive) and the polarity under which it denotes `self`.
    pub fn to_predicate(&self) -> (Atom, bool) {
        match self.rel {
            Relation::Eq => (self.clone(), true),
            _ if self.term.leading_coeff().is_some_and(|c| c.is_negative()) => {
                (self.complement().expect("inequality"), false)
            }
            _ => (self.clone(), true),
        }
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Atom) -> Ordering {
        self.term
            .coeffs()
            .cmp(other.term.coeffs())
            .then_with(|| self.term.constant_part().cmp(other.term.constant_part()))
            .then_with(|| self.rel.cmp(&other.rel))
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Atom) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A predicate or its negation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    atom: Atom,
    positive: bool,
}

impl Literal {
    /// Literal denoting `atom`, stated over its predicate.
    pub fn of(atom: &Atom) -> Literal {
        let (atom, positive) = atom.to_predicate();
        Literal { atom, positive }
    }

    /// Literal over an atom taken verbatim as the predicate.
    pub fn new(atom: Atom, positive: bool) -> Literal {
        Literal { atom, positive }
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn negated(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }

    pub fn holds(&self, m: &Model) -> Result<bool, EvalError> {
        Ok(self.atom.holds(m)? == self.positive)
    }

    /// The convex constraint this literal denotes, `None` for a negated equality.
    pub fn to_atom(&self) -> Option<Atom> {
        if self.positive {
            Some(self.atom.clone())
        } else {
            self.atom.complement()
        }
    }

    pub fn to_formula(&self) -> Formula {
        if self.positive {
            Formula::atom(self.atom.clone())
        } else {
            self.atom.negate()
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_atom() {
            Some(a) => write!(f, "{a}"),
            None => write!(f, "(not {})", self.atom),
        }
    }
}

/// Ordered conjunction of distinct literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Conjunction(Vec<Literal>);

impl Conjunction {
    pub fn new() -> Conjunction {
        Conjunction(Vec::new())
    }

    /// Appends unless already present.
    pub fn push(&mut self, lit: Literal) {
        if !self.0.contains(&lit) {
            self.0.push(lit);
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Literal> {
        self.0.iter()
    }

    pub fn reversed(&self) -> Conjunction {
        Conjunction(self.0.iter().rev().cloned().collect())
    }

    /// Copy with the literal at `index` removed.
    pub fn without(&self, index: usize) -> Conjunction {
        let mut lits = self.0.clone();
        lits.remove(index);
        Conjunction(lits)
    }

    pub fn holds(&self, m: &Model) -> Result<bool, EvalError> {
        for l in &self.0 {
            if !l.holds(m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.0.iter().map(Literal::to_formula).collect())
    }

    /// The literals as convex constraints; `None` if some literal is a negated equality.
    pub fn to_atoms(&self) -> Option<Vec<Atom>> {
        self.0.iter().map(Literal::to_atom).collect()
    }
}

impl FromIterator<Literal> for Conjunction {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Conjunction {
        let mut c = Conjunction::new();
        for l in iter {
            c.push(l);
        }
        c
    }
}

impl<'a> IntoIterator for &'a Conjunction {
    type Item = &'a Literal;
    type IntoIter = std::slice::Iter<'a, Literal>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
