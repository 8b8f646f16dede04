//! Quantifier elimination for linear rational arithmetic.
//!
//! The main entry points are [`eliminate_all`] for arbitrarily quantified formulas and
//! [`exist_elim`] for a single existential block over a quantifier-free body. Both
//! enumerate models of the remaining formula with a lazy SMT solver, widen each model
//! to a conjunction implying the formula, and project that conjunction with
//! Fourier–Motzkin elimination. [`lw_eliminate_all`] is an independent virtual
//! substitution implementation used for cross-checking.

pub mod equiv;
pub mod formula;
pub mod gen;
pub mod harness;
pub mod limits;
pub mod lw;
pub mod polyhedra;
pub mod qe;
pub mod smt;

pub use equiv::equiv_check;
pub use formula::{parse, Atom, Conjunction, Formula, LinearTerm, Literal, Model, ParseError, Rational, Relation, Var};
pub use gen::{gen_random, GenParams};
pub use limits::{Budget, QeError};
pub use lw::{lw_eliminate_all, lw_eliminate_var};
pub use polyhedra::{feasible, project, remove_redundant, ConstraintSystem, FeasibilityResult};
pub use qe::{
    eliminate_all, eliminate_all_with, exist_elim, exist_elim_mod1, exist_elim_mod2, exist_elim_modulo,
    exist_elim_with, generalize1, generalize2, ConjunctOrder, DnfFormula, ElimOptions, ElimStats, Variant,
};
pub use smt::check_sat;
