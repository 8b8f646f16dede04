//! Lazy SMT for quantifier-free linear rational arithmetic.
//!
//! Each predicate becomes a propositional variable. A full propositional model is
//! checked by the simplex; an infeasible one yields a minimized conflict whose negation
//! is added as a clause, and the loop repeats.

mod sat;

use std::collections::BTreeSet;

use crate::formula::{Atom, Formula, Literal, Model, Relation, Var};
use crate::limits::{Budget, QeError};
use crate::polyhedra::simplex::Simplex;
use indexmap::IndexMap;
pub use sat::{Lit, SatSolver};

/// A jointly infeasible set of literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryConflict {
    pub literals: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoryResult {
    Feasible(Model),
    Conflict(TheoryConflict),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SmtStats {
    pub checks: u64,
    pub theory_checks: u64,
    pub theory_conflicts: u64,
}

/// Convex theory reasoning over literal lists, on one reusable tableau.
#[derive(Default)]
struct TheorySolver {
    simplex: Simplex,
}

impl TheorySolver {
    /// Feasibility of the literals; on failure, indices of an infeasible subset.
    /// Negated equalities are split into their two strict sides.
    fn check(&mut self, lits: &[Literal], budget: &Budget) -> Result<Result<Model, Vec<usize>>, QeError> {
        let mut convex = Vec::new();
        let mut diseqs = Vec::new();
        for (i, l) in lits.iter().enumerate() {
            match l.to_atom() {
                Some(a) => convex.push((a, i)),
                None => diseqs.push(i),
            }
        }
        self.split(lits, &mut convex, &diseqs, budget)
    }

    fn split(
        &mut self,
        lits: &[Literal],
        convex: &mut Vec<(Atom, usize)>,
        diseqs: &[usize],
        budget: &Budget,
    ) -> Result<Result<Model, Vec<usize>>, QeError> {
        let Some((&d, rest)) = diseqs.split_first() else {
            self.simplex.reset();
            for (a, i) in convex.iter() {
                self.simplex.assert_atom(a, *i);
            }
            return Ok(match self.simplex.check(budget)? {
                Ok(()) => Ok(self.simplex.model()),
                Err(core) => Err(core),
            });
        };
        let t = lits[d].atom().term().clone();
        let mut core = BTreeSet::from([d]);
        for side in [Atom::gt(t.clone()), Atom::gt(-t.clone())] {
            convex.push((side, d));
            let r = self.split(lits, convex, rest, budget)?;
            convex.pop();
            match r {
                Ok(m) => return Ok(Ok(m)),
                Err(c) => core.extend(c),
            }
        }
        Ok(Err(core.into_iter().collect()))
    }

    /// Deletion filter: drops each literal in turn when the rest stays infeasible, then
    /// narrows the remainder to the infeasible subset the check reports.
    fn minimize(&mut self, lits: Vec<Literal>, budget: &Budget) -> Result<Vec<Literal>, QeError> {
        let mut keep = lits;
        let mut i = 0;
        while i < keep.len() {
            let mut trial = keep.clone();
            trial.remove(i);
            match self.check(&trial, budget)? {
                Ok(_) => i += 1,
                Err(core) => {
                    // literals before i are necessary, so every infeasible subset keeps them
                    let core: BTreeSet<usize> = core.into_iter().collect();
                    keep = trial
                        .into_iter()
                        .enumerate()
                        .filter(|(j, _)| core.contains(j))
                        .map(|(_, l)| l)
                        .collect();
                }
            }
        }
        Ok(keep)
    }

    fn conflict(&mut self, lits: &[Literal], core: Vec<usize>, budget: &Budget) -> Result<Vec<Literal>, QeError> {
        let subset = core.into_iter().map(|i| lits[i].clone()).collect();
        self.minimize(subset, budget)
    }
}

/// Checks a set of literals for joint feasibility; conflicts come back minimized.
pub fn theory_check(lits: &[Literal]) -> TheoryResult {
    let budget = Budget::unlimited();
    let mut t = TheorySolver::default();
    match t.check(lits, &budget).expect("unlimited budget") {
        Ok(m) => TheoryResult::Feasible(m),
        Err(core) => TheoryResult::Conflict(TheoryConflict {
            literals: t.conflict(lits, core, &budget).expect("unlimited budget"),
        }),
    }
}

/// Inclusion-minimal infeasible subset of `c`, scanning in input order.
pub fn minimize_conflict(c: &TheoryConflict) -> TheoryConflict {
    let mut t = TheorySolver::default();
    TheoryConflict {
        literals: t
            .minimize(c.literals.clone(), &Budget::unlimited())
            .expect("unlimited budget"),
    }
}

/// Satisfiability of a quantifier-free formula, with an exact model when satisfiable.
pub fn check_sat(f: &Formula) -> Result<Option<Model>, QeError> {
    check_sat_within(f, &Budget::unlimited())
}

pub fn check_sat_within(f: &Formula, budget: &Budget) -> Result<Option<Model>, QeError> {
    let mut s = SmtSolver::new();
    s.assert(f)?;
    s.check(budget)
}

/// A clause database over predicate variables plus the theory loop that refines it.
///
/// Formulas are asserted permanently. Queries may add literal assumptions that hold
/// for that query only.
pub struct SmtSolver {
    sat: SatSolver,
    /// Predicate atoms and their propositional variables.
    preds: IndexMap<Atom, u32>,
    true_var: Option<u32>,
    theory: TheorySolver,
    vars: BTreeSet<Var>,
    pub stats: SmtStats,
}

impl Default for SmtSolver {
    fn default() -> SmtSolver {
        SmtSolver::new()
    }
}

impl SmtSolver {
    pub fn new() -> SmtSolver {
        SmtSolver {
            sat: SatSolver::new(),
            preds: IndexMap::new(),
            true_var: None,
            theory: TheorySolver::default(),
            vars: BTreeSet::new(),
            stats: SmtStats::default(),
        }
    }

    /// Number of distinct predicates seen so far.
    pub fn num_predicates(&self) -> usize {
        self.preds.len()
    }

    fn true_lit(&mut self) -> Lit {
        let v = match self.true_var {
            Some(v) => v,
            None => {
                let v = self.sat.new_var();
                self.sat.add_clause(&[Lit::new(v, true)]);
                self.true_var = Some(v);
                v
            }
        };
        Lit::new(v, true)
    }

    fn intern(&mut self, pred: &Atom) -> u32 {
        if let Some(&v) = self.preds.get(pred) {
            return v;
        }
        let v = self.sat.new_var();
        self.preds.insert(pred.clone(), v);
        self.vars.extend(pred.term().vars().cloned());
        if pred.rel() == Relation::Eq {
            // t = 0  <->  t >= 0 and not t > 0
            let t = pred.term().clone();
            let ge = Lit::new(self.intern(&Atom::ge(t.clone())), true);
            let gt = Lit::new(self.intern(&Atom::gt(t)), true);
            let eq = Lit::new(v, true);
            self.sat.add_clause(&[!eq, ge]);
            self.sat.add_clause(&[!eq, !gt]);
            self.sat.add_clause(&[eq, !ge, gt]);
        }
        v
    }

    /// Propositional literal for the atom, in the given polarity.
    fn atom_lit(&mut self, a: &Atom, positive: bool) -> Lit {
        if let Some(b) = a.ground_value() {
            let t = self.true_lit();
            return if b == positive { t } else { !t };
        }
        let (pred, pol) = a.to_predicate();
        Lit::new(self.intern(&pred), pol == positive)
    }

    pub fn literal(&mut self, l: &Literal) -> Lit {
        self.atom_lit(l.atom(), l.is_positive())
    }

    /// Literal equivalent (in the clauses that use it) to `f` under `positive`.
    fn encode(&mut self, f: &Formula, positive: bool) -> Result<Lit, QeError> {
        Ok(match f {
            Formula::True => {
                let t = self.true_lit();
                if positive {
                    t
                } else {
                    !t
                }
            }
            Formula::False => {
                let t = self.true_lit();
                if positive {
                    !t
                } else {
                    t
                }
            }
            Formula::Atom(a) => self.atom_lit(a, positive),
            Formula::Not(g) => self.encode(g, !positive)?,
            Formula::And(cs) | Formula::Or(cs) => {
                let conjunctive = matches!(f, Formula::And(_)) == positive;
                let mut children = Vec::with_capacity(cs.len());
                for c in cs {
                    children.push(self.encode(c, positive)?);
                }
                let aux = Lit::new(self.sat.new_var(), true);
                if conjunctive {
                    for c in children {
                        self.sat.add_clause(&[!aux, c]);
                    }
                } else {
                    children.push(!aux);
                    self.sat.add_clause(&children);
                }
                aux
            }
            Formula::Exists(..) | Formula::Forall(..) => return Err(QeError::Quantified),
        })
    }

    /// Conjoins `f` permanently.
    pub fn assert(&mut self, f: &Formula) -> Result<(), QeError> {
        self.assert_polarity(f, true)
    }

    fn assert_polarity(&mut self, f: &Formula, positive: bool) -> Result<(), QeError> {
        match f {
            Formula::True | Formula::False => {
                if matches!(f, Formula::False) == positive {
                    self.sat.add_clause(&[]);
                }
            }
            Formula::Not(g) => self.assert_polarity(g, !positive)?,
            Formula::And(cs) | Formula::Or(cs) if matches!(f, Formula::And(_)) == positive => {
                for c in cs {
                    self.assert_polarity(c, positive)?;
                }
            }
            Formula::And(cs) | Formula::Or(cs) => {
                let mut clause = Vec::with_capacity(cs.len());
                for c in cs {
                    clause.push(self.encode(c, positive)?);
                }
                self.sat.add_clause(&clause);
            }
            _ => {
                let l = self.encode(f, positive)?;
                self.sat.add_clause(&[l]);
            }
        }
        Ok(())
    }

    /// Adds the clause "some literal holds".
    pub fn assert_clause(&mut self, lits: &[Literal]) {
        let clause: Vec<Lit> = lits.iter().map(|l| self.literal(l)).collect();
        self.sat.add_clause(&clause);
    }

    pub fn check(&mut self, budget: &Budget) -> Result<Option<Model>, QeError> {
        self.check_assuming(&[], budget)
    }

    /// Satisfiability of the asserted formulas together with `assumptions`.
    pub fn check_assuming(&mut self, assumptions: &[Literal], budget: &Budget) -> Result<Option<Model>, QeError> {
        self.stats.checks += 1;
        let assumed: Vec<Lit> = assumptions.iter().map(|l| self.literal(l)).collect();
        let mut rounds: u64 = 0;
        loop {
            budget.check_time()?;
            let Some(assignment) = self.sat.solve(budget, &assumed)? else {
                return Ok(None);
            };
            rounds += 1;
            debug_assert!(
                self.preds.len() >= 63 || rounds <= 1u64 << self.preds.len(),
                "more theory checks than predicate assignments"
            );
            self.stats.theory_checks += 1;
            let mut lits = Vec::with_capacity(self.preds.len());
            let mut lit_vars = Vec::with_capacity(self.preds.len());
            for (pred, &v) in &self.preds {
                let value = assignment[v as usize];
                // a false equality is implied by its two strict companions
                if pred.rel() == Relation::Eq && !value {
                    continue;
                }
                lits.push(Literal::new(pred.clone(), value));
                lit_vars.push(Lit::new(v, value));
            }
            match self.theory.check(&lits, budget)? {
                Ok(mut model) => {
                    for v in &self.vars {
                        if !model.contains(v) {
                            model.set(v.clone(), num::zero());
                        }
                    }
                    return Ok(Some(model));
                }
                Err(core) => {
                    self.stats.theory_conflicts += 1;
                    let core_lits: Vec<Literal> = core.iter().map(|&i| lits[i].clone()).collect();
                    let minimal = self.theory.minimize(core_lits, budget)?;
                    let block: Vec<Lit> = minimal
                        .iter()
                        .map(|l| {
                            let i = lits.iter().position(|x| x == l).expect("subset");
                            !lit_vars[i]
                        })
                        .collect();
                    debug_assert!(
                        block.iter().all(|b| assignment[b.var() as usize] != b.is_positive()),
                        "blocking clause must exclude the refuted assignment"
                    );
                    self.sat.add_clause(&block);
                }
            }
        }
    }
}
