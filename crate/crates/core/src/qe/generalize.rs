use crate::formula::{Atom, Conjunction, Formula, Literal, Model, Relation};
use crate::limits::{Budget, QeError};
use crate::smt::SmtSolver;

/// The truth assignment `a` induces on the predicates of `f`, as a conjunction in
/// first-occurrence atom order.
///
/// A false equality `t = 0` contributes the strict side `t > 0` or `-t > 0` that `a`
/// satisfies, so the conjunction stays convex.
pub fn generalize1(f: &Formula, a: &Model) -> Result<Conjunction, QeError> {
    match f.eval(a) {
        Ok(true) => {}
        Ok(false) => return Err(QeError::Contract("model does not satisfy the formula".into())),
        Err(e) => return Err(QeError::Contract(format!("cannot evaluate formula: {e}"))),
    }
    let mut m = Conjunction::new();
    for p in f.atoms() {
        let value = p.term().eval(a).map_err(|e| QeError::Contract(e.to_string()))?;
        let lit = match p.rel() {
            Relation::Eq if !value.is_zero() => {
                let t = p.term().clone();
                Literal::of(&if value.is_positive() { Atom::gt(t) } else { Atom::gt(-t) })
            }
            rel => Literal::new(p.clone(), rel.holds(&value)),
        };
        m.push(lit);
    }
    Ok(m)
}

/// Drops conjuncts of `m` in list order while `g ∧ m` stays unsatisfiable. The result
/// is an inclusion-minimal subsequence of `m` still contradicting `g`.
pub fn generalize2(g: &Formula, m: &Conjunction) -> Result<Conjunction, QeError> {
    let mut solver = SmtSolver::new();
    solver.assert(g)?;
    let budget = Budget::unlimited();
    if solver.check_assuming(m.literals(), &budget)?.is_some() {
        return Err(QeError::Contract("g ∧ m is satisfiable".into()));
    }
    Ok(relax(&mut solver, m, &budget)?.0)
}

/// Deletion filter against the formula asserted in `g`; also returns the number of
/// conjuncts removed. Assumes `g ∧ m` is unsatisfiable.
pub(crate) fn relax(g: &mut SmtSolver, m: &Conjunction, budget: &Budget) -> Result<(Conjunction, u64), QeError> {
    let mut keep: Vec<Literal> = m.literals().to_vec();
    let mut removed = 0;
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        if g.check_assuming(&trial, budget)?.is_none() {
            keep = trial;
            removed += 1;
        } else {
            i += 1;
        }
    }
    Ok((keep.into_iter().collect(), removed))
}
