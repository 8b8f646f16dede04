use crate::formula::{Formula, Model};
use crate::limits::{Budget, QeError};
use crate::smt::check_sat_within;

/// Whether two quantifier-free formulas are equivalent: both `f1 ∧ ¬f2` and
/// `f2 ∧ ¬f1` must be unsatisfiable.
pub fn equiv_check(f1: &Formula, f2: &Formula) -> Result<bool, QeError> {
    Ok(equiv_witness(f1, f2, &Budget::unlimited())?.is_none())
}

/// A model on which the formulas differ, if any.
pub fn equiv_witness(f1: &Formula, f2: &Formula, budget: &Budget) -> Result<Option<Model>, QeError> {
    let one_way =
        |a: &Formula, b: &Formula| check_sat_within(&Formula::and(vec![a.clone(), Formula::not(b.clone())]), budget);
    if let Some(m) = one_way(f1, f2)? {
        return Ok(Some(m));
    }
    one_way(f2, f1)
}
