//! Quantifier elimination by model enumeration: find a model of what remains, widen it
//! to a conjunction implying the formula, project that conjunction, block the
//! projection, repeat.

mod elim;
mod generalize;
mod recursive;
mod verify;

use std::fmt;
use std::time::Duration;

use crate::formula::{Formula, Var};
use crate::limits::Budget;
use crate::polyhedra::ConstraintSystem;

pub use elim::{exist_elim, exist_elim_mod1, exist_elim_mod2, exist_elim_modulo, exist_elim_with};
pub use generalize::{generalize1, generalize2};
pub use recursive::{eliminate_all, eliminate_all_with};

/// Which blocking scheme the loop uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Block the projection of each generalized model.
    #[default]
    Main,
    /// Block the generalized model itself, leaving projections to overlap.
    Mod1,
    /// Block the projection and also conjoin its negation to the relaxation target.
    Mod2,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Main => "main",
            Variant::Mod1 => "mod1",
            Variant::Mod2 => "mod2",
        }
    }
}

/// Order in which generalize2 tries to drop conjuncts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ConjunctOrder {
    /// First-occurrence order of the predicates in the formula.
    #[default]
    Canonical,
    Reversed,
}

#[derive(Clone, Debug, Default)]
pub struct ElimOptions {
    pub variant: Variant,
    pub order: ConjunctOrder,
    /// Check the loop invariants at every iteration, recording failures in the stats.
    pub verify: bool,
    pub budget: Budget,
}

impl ElimOptions {
    pub fn variant(variant: Variant) -> ElimOptions {
        ElimOptions {
            variant,
            ..ElimOptions::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ElimStats {
    pub iterations: u64,
    pub smt_calls: u64,
    pub generalize2_relaxations: u64,
    pub projection_count: u64,
    pub smt_time: Duration,
    pub generalize_time: Duration,
    pub project_time: Duration,
    /// Largest iteration bound `2^(N_F + #equalities)` among the loops run; `u64::MAX`
    /// when it overflows.
    pub iteration_bound: u64,
    pub invariant_violations: Vec<String>,
}

impl ElimStats {
    pub fn absorb(&mut self, other: ElimStats) {
        self.iterations += other.iterations;
        self.smt_calls += other.smt_calls;
        self.generalize2_relaxations += other.generalize2_relaxations;
        self.projection_count += other.projection_count;
        self.smt_time += other.smt_time;
        self.generalize_time += other.generalize_time;
        self.project_time += other.project_time;
        self.iteration_bound = self.iteration_bound.max(other.iteration_bound);
        self.invariant_violations.extend(other.invariant_violations);
    }

    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        format!(
            "iterations={}\nsmt_calls={}\ngeneralize2_relaxations={}\nprojection_count={}\n\
             smt_ms={}\ngeneralize_ms={}\nproject_ms={}\ninvariant_violations={}\n",
            self.iterations,
            self.smt_calls,
            self.generalize2_relaxations,
            self.projection_count,
            self.smt_time.as_millis(),
            self.generalize_time.as_millis(),
            self.project_time.as_millis(),
            self.invariant_violations.len()
        )
    }
}

/// A disjunction of feasible constraint systems.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DnfFormula {
    pub disjuncts: Vec<ConstraintSystem>,
}

impl DnfFormula {
    pub fn is_false(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// True when some disjunct has no constraints.
    pub fn is_true(&self) -> bool {
        self.disjuncts.iter().any(ConstraintSystem::is_empty)
    }

    pub fn atom_count(&self) -> usize {
        self.disjuncts.iter().map(ConstraintSystem::len).sum()
    }

    pub fn mentions_any(&self, vs: &[Var]) -> bool {
        self.disjuncts.iter().any(|d| vs.iter().any(|v| d.mentions(v)))
    }

    pub fn to_formula(&self) -> Formula {
        Formula::or(self.disjuncts.iter().map(ConstraintSystem::to_formula).collect())
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.disjuncts.as_slice() {
            [] => write!(f, "false"),
            [d] => write!(f, "{}", conj(d)),
            ds => {
                write!(f, "(or")?;
                for d in ds {
                    write!(f, " {}", conj(d))?;
                }
                write!(f, ")")
            }
        }
    }
}

fn conj(d: &ConstraintSystem) -> String {
    match d.constraints() {
        [] => "true".to_string(),
        [a] => a.to_string(),
        _ => d.to_string(),
    }
}
