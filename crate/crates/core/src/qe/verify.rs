//! Per-iteration invariant checks for the elimination loop. Every check builds its own
//! solver, independent of the ones driving the loop.

use std::collections::BTreeSet;

use super::{DnfFormula, Variant};
use crate::formula::{Conjunction, Formula, LinearTerm, Model, Rational, Var};
use crate::gen::SplitMix64;
use crate::limits::{Budget, QeError};
use crate::polyhedra::{feasible, ConstraintSystem};
use crate::smt::check_sat_within;

const SAMPLES: usize = 24;

pub(crate) struct Verifier {
    f: Formula,
    vs: Vec<Var>,
    theory: Formula,
    variant: Variant,
    /// Negated blocked regions conjoined to H.
    h_blockers: Vec<Formula>,
    /// Negated projections conjoined to G (mod2 only).
    g_blockers: Vec<Formula>,
    /// Generalized models blocked so far (mod1 only).
    blocked_models: Vec<Formula>,
    rng: SplitMix64,
    pub violations: Vec<String>,
}

impl Verifier {
    pub fn new(f: &Formula, vs: &[Var], theory: Option<&Formula>, variant: Variant) -> Verifier {
        Verifier {
            f: f.clone(),
            vs: vs.to_vec(),
            theory: theory.cloned().unwrap_or(Formula::True),
            variant,
            h_blockers: Vec::new(),
            g_blockers: Vec::new(),
            blocked_models: Vec::new(),
            rng: SplitMix64::new(0x5eed),
            violations: Vec::new(),
        }
    }

    fn h(&self) -> Formula {
        let mut parts = vec![self.f.clone(), self.theory.clone()];
        parts.extend(self.h_blockers.iter().cloned());
        Formula::and(parts)
    }

    fn g(&self) -> Formula {
        let mut parts = vec![Formula::not(self.f.clone()), self.theory.clone()];
        parts.extend(self.g_blockers.iter().cloned());
        Formula::and(parts)
    }

    fn expect_unsat(&mut self, f: Formula, what: &str, budget: &Budget) -> Result<(), QeError> {
        if check_sat_within(&f, budget)?.is_some() {
            self.violations.push(format!("{what} is satisfiable"));
        }
        Ok(())
    }

    fn expect_sat(&mut self, f: Formula, what: &str, budget: &Budget) -> Result<(), QeError> {
        if check_sat_within(&f, budget)?.is_none() {
            self.violations.push(format!("{what} is unsatisfiable"));
        }
        Ok(())
    }

    pub fn loop_head(&mut self, out: &DnfFormula, budget: &Budget) -> Result<(), QeError> {
        let h = self.h();
        let o = out.to_formula();
        if self.variant == Variant::Mod1 {
            // projections may overlap the remaining models; the blocked models may not
            let covered = Formula::or(self.blocked_models.clone());
            self.expect_unsat(Formula::and(vec![h.clone(), covered]), "H ∧ blocked models", budget)?;
        } else {
            self.expect_unsat(Formula::and(vec![h.clone(), o.clone()]), "H ∧ O", budget)?;
        }
        let f_and_t = Formula::and(vec![self.f.clone(), self.theory.clone()]);
        self.expect_unsat(
            Formula::and(vec![f_and_t, Formula::not(o.clone()), Formula::not(h.clone())]),
            "f ∧ ¬O ∧ ¬H",
            budget,
        )?;
        self.expect_unsat(
            Formula::and(vec![h, Formula::not(o.clone()), Formula::not(self.f.clone())]),
            "H ∧ ¬O ∧ ¬f",
            budget,
        )?;
        if out.mentions_any(&self.vs) {
            self.violations
                .push(format!("O mentions an eliminated variable: {out}"));
        }
        if self.variant == Variant::Mod2 {
            let g = self.g();
            let covered = Formula::or(vec![self.f.clone(), o.clone()]);
            self.expect_unsat(Formula::and(vec![g.clone(), covered.clone()]), "G ∧ (f ∨ O)", budget)?;
            self.expect_unsat(
                Formula::and(vec![Formula::not(covered), self.theory.clone(), Formula::not(g)]),
                "¬(f ∨ O) ∧ ¬G",
                budget,
            )?;
        }
        Ok(())
    }

    pub fn iteration(
        &mut self,
        a: &Model,
        m1: &Conjunction,
        m2: &Conjunction,
        pi: &ConstraintSystem,
        budget: &Budget,
    ) -> Result<(), QeError> {
        if !m1.holds(a).unwrap_or(false) {
            self.violations.push(format!("model {a} does not satisfy M1"));
        }
        self.expect_unsat(
            Formula::and(vec![m1.to_formula(), Formula::not(self.f.clone())]),
            "M1 ∧ ¬f",
            budget,
        )?;
        let g = self.g();
        self.expect_unsat(Formula::and(vec![g.clone(), m2.to_formula()]), "G ∧ M2", budget)?;
        for i in 0..m2.len() {
            self.expect_sat(
                Formula::and(vec![g.clone(), m2.without(i).to_formula()]),
                &format!("G ∧ (M2 without conjunct {i})"),
                budget,
            )?;
        }
        if self.vs.iter().any(|v| pi.mentions(v)) {
            self.violations
                .push(format!("projection mentions an eliminated variable: {pi}"));
        }
        self.check_projection(a, m2, pi);
        Ok(())
    }

    /// Compares `π` with `∃vs M2` at the model and at random rational points.
    fn check_projection(&mut self, a: &Model, m2: &Conjunction, pi: &ConstraintSystem) {
        let Some(atoms) = m2.to_atoms() else {
            self.violations.push("M2 contains a negated equality".into());
            return;
        };
        let free: BTreeSet<Var> = atoms
            .iter()
            .flat_map(|c| c.term().vars().cloned().collect::<Vec<_>>())
            .filter(|v| !self.vs.contains(v))
            .chain(pi.vars())
            .collect();
        let mut points = vec![free
            .iter()
            .map(|v| (v.clone(), a.get(v).cloned().unwrap_or_default()))
            .collect::<Model>()];
        for _ in 0..SAMPLES {
            points.push(
                free.iter()
                    .map(|v| {
                        let num = self.rng.range(-12, 12);
                        let den = self.rng.range(1, 3);
                        (v.clone(), Rational::new(num.into(), den.into()))
                    })
                    .collect(),
            );
        }
        for p in points {
            let in_pi = pi.holds(&p).unwrap_or(false);
            let fixed = atoms.iter().map(|c| {
                p.iter().fold(c.clone(), |c, (v, val)| {
                    c.substitute(v, &LinearTerm::constant(val.clone()))
                })
            });
            let in_shadow = feasible(&ConstraintSystem::new(fixed)).is_feasible();
            if in_pi != in_shadow {
                self.violations.push(format!(
                    "projection {pi} disagrees with the shadow of M2 at {p} ({in_pi} vs {in_shadow})"
                ));
            }
        }
    }

    pub fn blocked(&mut self, m2: &Conjunction, pi: &ConstraintSystem) {
        let not_pi = Formula::not(pi.to_formula());
        match self.variant {
            Variant::Main => self.h_blockers.push(not_pi),
            Variant::Mod1 => {
                self.h_blockers.push(Formula::not(m2.to_formula()));
                self.blocked_models.push(m2.to_formula());
            }
            Variant::Mod2 => {
                self.h_blockers.push(not_pi.clone());
                self.g_blockers.push(not_pi);
            }
        }
    }
}
