use super::{remove_redundant_within, ConstraintSystem};
use crate::formula::{Atom, Relation, Var};
use crate::limits::{Budget, QeError};

/// Largest coefficient bit size (constants included) over the system.
pub fn max_coeff_bits(s: &ConstraintSystem) -> u64 {
    s.iter().map(|a| a.term().max_bit_size()).max().unwrap_or(0)
}

/// One Fourier–Motzkin step: the projection of `s` along `v`.
///
/// An equality mentioning `v` is used to substitute `v` away. Otherwise constraints
/// not mentioning `v` are kept verbatim and every lower/upper bound pair on `v` is
/// combined; the result is strict when either side is.
pub fn fm_eliminate(s: &ConstraintSystem, v: &Var) -> ConstraintSystem {
    if s.is_marked_infeasible() || !s.mentions(v) {
        return s.clone();
    }
    let bits = max_coeff_bits(s);
    let out = if let Some(eq) = s.iter().position(|a| a.rel() == Relation::Eq && a.mentions(v)) {
        substitute_equality(s, eq, v)
    } else {
        let mut kept = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for a in s.iter() {
            match a.term().coeff(v) {
                None => kept.push(a.clone()),
                Some(c) if c.is_positive() => lower.push(a),
                Some(_) => upper.push(a),
            }
        }
        for lo in &lower {
            for up in &upper {
                kept.push(combine(lo, up, v));
            }
        }
        ConstraintSystem::new(kept)
    };
    debug_assert!(max_coeff_bits(&out) <= 2 * bits + 1, "coefficient growth beyond 2s+1");
    out
}

/// `|b|·lo + a·up` where `a > 0` and `b < 0` are the coefficients of `v`.
fn combine(lo: &Atom, up: &Atom, v: &Var) -> Atom {
    let a = lo.term().coeff(v).unwrap();
    let b = up.term().coeff(v).unwrap().abs();
    let term = lo.term().scale(&b) + up.term().scale(a);
    debug_assert!(term.coeff(v).is_none());
    let rel = if lo.rel() == Relation::Gt || up.rel() == Relation::Gt {
        Relation::Gt
    } else {
        Relation::Ge
    };
    Atom::new(term, rel)
}

fn substitute_equality(s: &ConstraintSystem, eq: usize, v: &Var) -> ConstraintSystem {
    let e = &s.constraints()[eq];
    let a = e.term().coeff(v).unwrap().clone();
    let mut rest = e.term().clone();
    rest.add_monomial(v.clone(), &-&a);
    // a·v + rest = 0  =>  v = -rest / a
    let value = rest.scale(&-a.recip());
    let out = s
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != eq)
        .map(|(_, c)| c.substitute(v, &value));
    ConstraintSystem::new(out)
}

/// `∃vs. s` as a constraint system: eliminates the variables in order, removing
/// redundant constraints after each step.
pub fn project(s: &ConstraintSystem, vs: &[Var]) -> ConstraintSystem {
    project_within(s, vs, &Budget::unlimited()).expect("unlimited budget")
}

pub fn project_within(s: &ConstraintSystem, vs: &[Var], budget: &Budget) -> Result<ConstraintSystem, QeError> {
    let mut current = remove_redundant_within(s, budget)?;
    for v in vs {
        if !current.mentions(v) {
            continue;
        }
        budget.check_time()?;
        current = fm_eliminate(&current, v);
        budget.check_size(current.len())?;
        current = remove_redundant_within(&current, budget)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{LinearTerm, Rational};
    use crate::polyhedra::remove_redundant;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn ge(c: i64, parts: &[(&str, i64)]) -> Atom {
        Atom::ge(LinearTerm::from_parts(
            q(c),
            parts.iter().map(|(v, k)| (Var::new(v), q(*k))),
        ))
    }

    fn sys(atoms: &[Atom]) -> ConstraintSystem {
        ConstraintSystem::new(atoms.iter().cloned())
    }

    fn x() -> Var {
        Var::new("x")
    }

    #[test]
    fn single_pair() {
        let s = sys(&[ge(0, &[("x", 1), ("y", -1)]), ge(0, &[("z", 1), ("x", -1)])]);
        assert_eq!(fm_eliminate(&s, &x()), sys(&[ge(0, &[("z", 1), ("y", -1)])]));
    }

    #[test]
    fn figure_band() {
        let s = sys(&[ge(2, &[("y", 1)]), ge(1, &[("x", 1)]), ge(1, &[("x", -1)])]);
        let out = fm_eliminate(&s, &x());
        // 2 >= 0 folds away as a ground truth
        assert_eq!(out, sys(&[ge(2, &[("y", 1)])]));
        assert_eq!(remove_redundant(&out), sys(&[ge(2, &[("y", 1)])]));
    }

    #[test]
    fn pair_count_bound() {
        let lowers: Vec<Atom> = (0..3).map(|k| ge(k, &[("x", 1), ("y", k + 1)])).collect();
        let uppers: Vec<Atom> = (0..4).map(|k| ge(k, &[("x", -1), ("z", k + 1)])).collect();
        let untouched = ge(1, &[("w", 1)]);
        let s = ConstraintSystem::new(lowers.into_iter().chain(uppers).chain([untouched]));
        let out = fm_eliminate(&s, &x());
        assert!(out.len() <= 3 * 4 + 1);
        assert!(!out.mentions(&x()));
    }

    #[test]
    fn strictness_propagates() {
        let s = sys(&[Atom::gt(LinearTerm::var(x())), ge(1, &[("x", -1)])]);
        // 0 < x <= 1 projects to true; 0 < x <= 0 projects to false
        assert!(fm_eliminate(&s, &x()).is_empty());
        let s = sys(&[Atom::gt(LinearTerm::var(x())), ge(0, &[("x", -1)])]);
        assert!(fm_eliminate(&s, &x()).is_marked_infeasible());
    }

    #[test]
    fn equality_substitution() {
        // x = y + 1, x <= 3  ->  y <= 2
        let eq = Atom::eq(LinearTerm::from_parts(q(-1), [(x(), q(1)), (Var::new("y"), q(-1))]));
        let s = sys(&[eq, ge(3, &[("x", -1)])]);
        assert_eq!(fm_eliminate(&s, &x()), sys(&[ge(2, &[("y", -1)])]));
    }

    #[test]
    fn project_examples() {
        let s = sys(&[
            ge(0, &[("x", 1), ("y", -1)]),
            ge(0, &[("z", 1), ("x", -1)]),
            ge(0, &[("x", 1)]),
        ]);
        let p = project(&s, &[x()]);
        assert_eq!(p, sys(&[ge(0, &[("z", 1), ("y", -1)]), ge(0, &[("z", 1)])]));
        assert_eq!(project(&s, &[]), remove_redundant(&s));
        assert!(project(&sys(&[ge(0, &[("x", 1)])]), &[x()]).is_empty());
    }
}
