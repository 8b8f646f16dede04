//! Terms, atoms and formulas of linear rational arithmetic.
//!
//! Formulas are built through the smart constructors ([`Formula::and`],
//! [`Formula::or`], ...) which keep them normalized: connectives are flattened,
//! constants are folded, duplicate children are dropped and ground atoms become
//! `true`/`false`.

mod atom;
mod parse;
mod print;
mod rational;
mod term;

use std::collections::{BTreeSet, HashSet};

use indexmap::IndexSet;
use thiserror::Error;

pub use atom::{Atom, Conjunction, Literal, Relation};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use term::{bit_size, parse_rational, LinearTerm, Model, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(Var),
    #[error("cannot evaluate a quantified formula")]
    Quantified,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        match a.ground_value() {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => Formula::Atom(a),
        }
    }

    pub fn and(children: Vec<Formula>) -> Formula {
        Formula::junction(children, true)
    }

    pub fn or(children: Vec<Formula>) -> Formula {
        Formula::junction(children, false)
    }

    fn junction(children: Vec<Formula>, is_and: bool) -> Formula {
        let (unit, absorbing) = if is_and {
            (Formula::True, Formula::False)
        } else {
            (Formula::False, Formula::True)
        };
        let mut flat = Vec::with_capacity(children.len());
        let mut seen = HashSet::new();
        let mut stack: Vec<Formula> = children.into_iter().rev().collect();
        while let Some(c) = stack.pop() {
            match c {
                Formula::And(cs) if is_and => stack.extend(cs.into_iter().rev()),
                Formula::Or(cs) if !is_and => stack.extend(cs.into_iter().rev()),
                c if c == unit => {}
                c if c == absorbing => return absorbing,
                c => {
                    if seen.insert(c.clone()) {
                        flat.push(c);
                    }
                }
            }
        }
        match flat.len() {
            0 => unit,
            1 => flat.pop().unwrap(),
            _ if is_and => Formula::And(flat),
            _ => Formula::Or(flat),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::or(vec![Formula::not(lhs), rhs])
    }

    pub fn exists(vars: Vec<Var>, body: Formula) -> Formula {
        Formula::quantify(vars, body, true)
    }

    pub fn forall(vars: Vec<Var>, body: Formula) -> Formula {
        Formula::quantify(vars, body, false)
    }

    fn quantify(vars: Vec<Var>, body: Formula, existential: bool) -> Formula {
        let mut vs: Vec<Var> = Vec::with_capacity(vars.len());
        for v in vars {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        if vs.is_empty() || matches!(body, Formula::True | Formula::False) {
            return body;
        }
        if existential {
            Formula::Exists(vs, Box::new(body))
        } else {
            Formula::Forall(vs, Box::new(body))
        }
    }

    /// Rebuilds the formula through the smart constructors.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::atom(a.clone()),
            Formula::Not(f) => Formula::not(f.normalize()),
            Formula::And(cs) => Formula::and(cs.iter().map(Formula::normalize).collect()),
            Formula::Or(cs) => Formula::or(cs.iter().map(Formula::normalize).collect()),
            Formula::Exists(vs, f) => Formula::exists(vs.clone(), f.normalize()),
            Formula::Forall(vs, f) => Formula::forall(vs.clone(), f.normalize()),
        }
    }

    /// Negation normal form. Negations are pushed into atoms (which absorb them),
    /// `∀v F` becomes `¬∃v ¬F`, and the only remaining `Not` nodes sit directly above
    /// existential quantifiers.
    pub fn nnf(&self) -> Formula {
        self.nnf_polarity(true)
    }

    fn nnf_polarity(&self, positive: bool) -> Formula {
        match (self, positive) {
            (Formula::True, true) | (Formula::False, false) => Formula::True,
            (Formula::True, false) | (Formula::False, true) => Formula::False,
            (Formula::Atom(a), true) => Formula::atom(a.clone()),
            (Formula::Atom(a), false) => a.negate(),
            (Formula::Not(f), p) => f.nnf_polarity(!p),
            (Formula::And(cs), true) | (Formula::Or(cs), false) => {
                Formula::and(cs.iter().map(|c| c.nnf_polarity(positive)).collect())
            }
            (Formula::Or(cs), true) | (Formula::And(cs), false) => {
                Formula::or(cs.iter().map(|c| c.nnf_polarity(positive)).collect())
            }
            (Formula::Exists(vs, f), true) => Formula::exists(vs.clone(), f.nnf_polarity(true)),
            (Formula::Exists(vs, f), false) => Formula::not(Formula::exists(vs.clone(), f.nnf_polarity(true))),
            (Formula::Forall(vs, f), true) => Formula::not(Formula::exists(vs.clone(), f.nnf_polarity(false))),
            (Formula::Forall(vs, f), false) => Formula::exists(vs.clone(), f.nnf_polarity(false)),
        }
    }

    /// Truth value of a quantifier-free formula under `m`.
    pub fn eval(&self, m: &Model) -> Result<bool, EvalError> {
        match self {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atom(a) => a.holds(m),
            Formula::Not(f) => Ok(!f.eval(m)?),
            Formula::And(cs) => {
                for c in cs {
                    if !c.eval(m)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(cs) => {
                for c in cs {
                    if c.eval(m)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists(..) | Formula::Forall(..) => Err(EvalError::Quantified),
        }
    }

    /// Distinct atomic predicates in order of first occurrence. An atom and its
    /// complement share one predicate (see [`Atom::to_predicate`]).
    pub fn atoms(&self) -> IndexSet<Atom> {
        let mut out = IndexSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut IndexSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                if !a.is_ground() {
                    out.insert(a.to_predicate().0);
                }
            }
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.collect_atoms(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars<'a>(&'a self, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.term().vars() {
                    if !bound.contains(&v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Not(f) => f.collect_free_vars(bound, out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_free_vars(bound, out)),
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let depth = bound.len();
                bound.extend(vs.iter());
                f.collect_free_vars(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Number of atom occurrences.
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::True | Formula::False => 0,
            Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.atom_count(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().map(Formula::atom_count).sum(),
        }
    }

    /// True if some atom (bound or free occurrence) mentions one of `vars`.
    pub fn mentions_any(&self, vars: &[Var]) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(a) => vars.iter().any(|v| a.mentions(v)),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.mentions_any(vars),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(|c| c.mentions_any(vars)),
        }
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Formula {
        Formula::atom(a)
    }
}
