//! Conjunctions of linear constraints read as convex polyhedra: exact feasibility,
//! redundancy removal and Fourier–Motzkin projection.

mod fm;
pub(crate) mod simplex;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::formula::{Atom, Formula, LinearTerm, Model, Rational, Relation, Var};
use crate::limits::{Budget, QeError};
use simplex::Simplex;

pub use fm::{fm_eliminate, max_coeff_bits, project, project_within};

/// Ordered, duplicate-free list of canonical constraints.
///
/// Ground constraints never appear except for the single canonical infeasible marker
/// `(>= -1 0)`, which stands for the empty polyhedron.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ConstraintSystem {
    constraints: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("constraint index {index} out of range for a system of {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible(Model),
    /// Indices of an infeasible subset of the constraints.
    Infeasible(Vec<usize>),
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }
}

impl ConstraintSystem {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> ConstraintSystem {
        let mut set = IndexSet::new();
        for a in atoms {
            match a.ground_value() {
                Some(true) => {}
                Some(false) => return ConstraintSystem::infeasible(),
                None => {
                    set.insert(a);
                }
            }
        }
        ConstraintSystem {
            constraints: set.into_iter().collect(),
        }
    }

    pub fn infeasible() -> ConstraintSystem {
        ConstraintSystem {
            constraints: vec![Atom::ge(LinearTerm::constant(-Rational::one()))],
        }
    }

    /// True for the canonical empty-polyhedron marker.
    pub fn is_marked_infeasible(&self) -> bool {
        self.constraints.len() == 1 && self.constraints[0].ground_value() == Some(false)
    }

    pub fn constraints(&self) -> &[Atom] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    /// An empty system denotes the whole space.
    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Atom> {
        self.constraints.iter()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.constraints.iter().flat_map(|a| a.term().vars().cloned()).collect()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.constraints.iter().any(|a| a.mentions(v))
    }

    pub fn without(&self, index: usize) -> ConstraintSystem {
        let mut constraints = self.constraints.clone();
        constraints.remove(index);
        ConstraintSystem { constraints }
    }

    pub fn holds(&self, m: &Model) -> Result<bool, crate::formula::EvalError> {
        for a in &self.constraints {
            if !a.holds(m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.constraints.iter().cloned().map(Formula::atom).collect())
    }
}

impl FromIterator<Atom> for ConstraintSystem {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> ConstraintSystem {
        ConstraintSystem::new(iter)
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(and")?;
        for a in &self.constraints {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Decides the system, returning a rational witness or an infeasible subset.
pub fn feasible(s: &ConstraintSystem) -> FeasibilityResult {
    feasible_within(s, &Budget::unlimited()).expect("unlimited budget")
}

pub(crate) fn feasible_within(s: &ConstraintSystem, budget: &Budget) -> Result<FeasibilityResult, QeError> {
    let mut sx = Simplex::new();
    for (i, a) in s.iter().enumerate() {
        sx.assert_atom(a, i);
    }
    Ok(match sx.check(budget)? {
        Ok(()) => FeasibilityResult::Feasible(sx.model()),
        Err(core) => FeasibilityResult::Infeasible(core),
    })
}

/// Shared simplex for repeated feasibility queries over subsets of one system.
struct SubsetOracle<'a> {
    atoms: &'a [Atom],
    simplex: Simplex,
}

impl<'a> SubsetOracle<'a> {
    fn new(atoms: &'a [Atom]) -> SubsetOracle<'a> {
        SubsetOracle {
            atoms,
            simplex: Simplex::new(),
        }
    }

    /// Feasibility of the constraints at `keep`, plus the negation of `negated`.
    /// Equalities negate to a strict disjunction, so both sides are tried.
    fn feasible_with_negation(&mut self, keep: &[usize], negated: &Atom, budget: &Budget) -> Result<bool, QeError> {
        let branches: Vec<Atom> = match negated.complement() {
            Some(c) => vec![c],
            None => vec![Atom::gt(negated.term().clone()), Atom::gt(-negated.term().clone())],
        };
        for b in branches {
            self.simplex.reset();
            for &i in keep {
                self.simplex.assert_atom(&self.atoms[i], i);
            }
            self.simplex.assert_atom(&b, usize::MAX);
            if self.simplex.check(budget)?.is_ok() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Whether constraint `i` is implied by the others.
pub fn is_redundant(s: &ConstraintSystem, i: usize) -> Result<bool, PolyError> {
    if i >= s.len() {
        return Err(PolyError::IndexOutOfRange { index: i, len: s.len() });
    }
    let keep: Vec<usize> = (0..s.len()).filter(|&j| j != i).collect();
    let mut oracle = SubsetOracle::new(s.constraints());
    Ok(!oracle
        .feasible_with_negation(&keep, &s.constraints()[i], &Budget::unlimited())
        .expect("unlimited budget"))
}

/// Drops implied constraints, scanning in order. Infeasible systems collapse to the marker.
pub fn remove_redundant(s: &ConstraintSystem) -> ConstraintSystem {
    remove_redundant_within(s, &Budget::unlimited()).expect("unlimited budget")
}

pub(crate) fn remove_redundant_within(s: &ConstraintSystem, budget: &Budget) -> Result<ConstraintSystem, QeError> {
    if s.is_empty() || s.is_marked_infeasible() {
        return Ok(s.clone());
    }
    let s = drop_parallel(s);
    if !feasible_within(&s, budget)?.is_feasible() {
        return Ok(ConstraintSystem::infeasible());
    }
    let atoms = s.constraints();
    let mut oracle = SubsetOracle::new(atoms);
    let mut keep: Vec<usize> = (0..atoms.len()).collect();
    let mut pos = 0;
    while pos < keep.len() {
        let i = keep[pos];
        let others: Vec<usize> = keep.iter().copied().filter(|&j| j != i).collect();
        if oracle.feasible_with_negation(&others, &atoms[i], budget)? {
            pos += 1;
        } else {
            keep.remove(pos);
        }
    }
    Ok(ConstraintSystem {
        constraints: keep.into_iter().map(|i| atoms[i].clone()).collect(),
    })
}

/// Among inequalities with identical linear parts only the tightest can be irredundant;
/// dropping the others first saves simplex calls.
fn drop_parallel(s: &ConstraintSystem) -> ConstraintSystem {
    use std::collections::HashMap;
    let atoms = s.constraints();
    // linear part -> (index, normalized constant) of the tightest inequality so far
    let mut best: HashMap<LinearTerm, (usize, Rational)> = HashMap::new();
    let mut dropped = vec![false; atoms.len()];
    for (i, a) in atoms.iter().enumerate() {
        if a.rel() == Relation::Eq {
            continue;
        }
        let key = a.term().linear_part().primitive();
        // a reads `key + c >= 0` (or `> 0`); a smaller c is tighter
        let c = a.term().constant_part() / lin_scale(a.term(), &key);
        match best.get(&key) {
            None => {
                best.insert(key, (i, c));
            }
            Some((j, cj)) => {
                let tighter = c < *cj || (c == *cj && a.rel() == Relation::Gt);
                if tighter {
                    dropped[*j] = true;
                    best.insert(key, (i, c));
                } else {
                    dropped[i] = true;
                }
            }
        }
    }
    ConstraintSystem {
        constraints: atoms
            .iter()
            .zip(dropped)
            .filter(|(_, d)| !d)
            .map(|(a, _)| a.clone())
            .collect(),
    }
}

/// Positive factor `k` with `term.linear_part() = k · lin`.
fn lin_scale(term: &LinearTerm, lin: &LinearTerm) -> Rational {
    let (v, c) = lin.coeffs().iter().next().expect("non-ground");
    let k = term.coeff(v).expect("same support") / c;
    debug_assert!(k.is_positive());
    k
}
