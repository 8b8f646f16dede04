use std::time::Instant;

use super::generalize::{generalize1, relax};
use super::verify::Verifier;
use super::{ConjunctOrder, DnfFormula, ElimOptions, ElimStats, Variant};
use crate::formula::{Formula, Literal, Relation, Var};
use crate::limits::QeError;
use crate::polyhedra::{project_within, ConstraintSystem};
use crate::smt::{check_sat_within, SmtSolver};

/// `∃vs f` as a DNF over the remaining variables.
pub fn exist_elim(f: &Formula, vs: &[Var]) -> Result<(DnfFormula, ElimStats), QeError> {
    exist_elim_with(f, vs, None, &ElimOptions::default())
}

/// Variant blocking each generalized model rather than its projection.
pub fn exist_elim_mod1(f: &Formula, vs: &[Var]) -> Result<(DnfFormula, ElimStats), QeError> {
    exist_elim_with(f, vs, None, &ElimOptions::variant(Variant::Mod1))
}

/// Variant that also blocks projections in the formula generalize2 relaxes against.
pub fn exist_elim_mod2(f: &Formula, vs: &[Var]) -> Result<(DnfFormula, ElimStats), QeError> {
    exist_elim_with(f, vs, None, &ElimOptions::variant(Variant::Mod2))
}

/// `∃vs f` up to equivalence under the assumption `t`: the result `O` satisfies
/// `O ∧ t ≡ (∃vs f) ∧ t`. `t` must not mention `vs`.
pub fn exist_elim_modulo(f: &Formula, vs: &[Var], t: &Formula) -> Result<DnfFormula, QeError> {
    Ok(exist_elim_with(f, vs, Some(t), &ElimOptions::default())?.0)
}

/// The elimination loop with explicit options and an optional background assumption.
pub fn exist_elim_with(
    f: &Formula,
    vs: &[Var],
    theory: Option<&Formula>,
    opts: &ElimOptions,
) -> Result<(DnfFormula, ElimStats), QeError> {
    if !f.is_quantifier_free() || theory.is_some_and(|t| !t.is_quantifier_free()) {
        return Err(QeError::Quantified);
    }
    let budget = &opts.budget;
    let mut stats = ElimStats::default();
    let atoms = f.atoms();
    let exponent = atoms.len() + atoms.iter().filter(|a| a.rel() == Relation::Eq).count();
    stats.iteration_bound = if exponent < 64 { 1u64 << exponent } else { u64::MAX };
    let mut out = DnfFormula::default();

    if let Some(t) = theory {
        if check_sat_within(t, budget)?.is_none() {
            stats.smt_calls = 1;
            return Ok((out, stats));
        }
    }

    let mut h = SmtSolver::new();
    let mut g = SmtSolver::new();
    h.assert(f)?;
    g.assert(&Formula::not(f.clone()))?;
    if let Some(t) = theory {
        h.assert(t)?;
        g.assert(t)?;
    }
    let mut verifier = opts.verify.then(|| Verifier::new(f, vs, theory, opts.variant));

    loop {
        budget.check_time()?;
        if let Some(v) = verifier.as_mut() {
            v.loop_head(&out, budget)?;
        }
        let started = Instant::now();
        let model = h.check(budget)?;
        stats.smt_time += started.elapsed();
        let Some(a) = model else { break };
        stats.iterations += 1;
        if stats.iterations > stats.iteration_bound {
            stats.invariant_violations.push(format!(
                "iteration {} exceeds the bound {}",
                stats.iterations, stats.iteration_bound
            ));
        }

        let started = Instant::now();
        let m1 = generalize1(f, &a)?;
        let ordered = match opts.order {
            ConjunctOrder::Canonical => m1.clone(),
            ConjunctOrder::Reversed => m1.reversed(),
        };
        let (m2, removed) = relax(&mut g, &ordered, budget)?;
        stats.generalize_time += started.elapsed();
        stats.generalize2_relaxations += removed;

        let started = Instant::now();
        let atoms = m2.to_atoms().expect("generalized models are convex");
        let pi = project_within(&ConstraintSystem::new(atoms), vs, budget)?;
        stats.project_time += started.elapsed();
        stats.projection_count += 1;
        debug_assert!(!pi.is_marked_infeasible(), "projection of a satisfiable model");

        if let Some(v) = verifier.as_mut() {
            v.iteration(&a, &m1, &m2, &pi, budget)?;
        }

        if pi.is_empty() {
            out.disjuncts = vec![pi];
            break;
        }
        let blocker: Vec<Literal> = pi.iter().map(|c| Literal::of(c).negated()).collect();
        match opts.variant {
            Variant::Main => h.assert_clause(&blocker),
            Variant::Mod1 => {
                let model_blocker: Vec<Literal> = m2.iter().map(Literal::negated).collect();
                h.assert_clause(&model_blocker);
            }
            Variant::Mod2 => {
                h.assert_clause(&blocker);
                g.assert_clause(&blocker);
            }
        }
        if let Some(v) = verifier.as_mut() {
            v.blocked(&m2, &pi);
        }
        if !out.disjuncts.contains(&pi) {
            out.disjuncts.push(pi);
        }
        budget.check_size(out.atom_count())?;
    }
    stats.smt_calls += h.stats.checks + g.stats.checks;
    if let Some(v) = verifier {
        stats.invariant_violations.extend(v.violations);
    }
    Ok((out, stats))
}
