//! Loos–Weispfenning virtual substitution.
//!
//! `∃x F` is replaced by the disjunction of `F` at finitely many symbolic test points:
//! `-∞`, every bound `e` solved from an atom `c·x + r ⋈ 0` as `e = -r/c`, and `e + ε`
//! for the bounds of strict atoms. Substituting a point into `c·x + r ⋈ 0` with
//! `u = c·e + r` gives:
//!
//! | point  | `=`   | `>=`, `>` with `c > 0` | `>=`, `>` with `c < 0` |
//! |--------|-------|------------------------|------------------------|
//! | `e`    | `u = 0` | `u >= 0` / `u > 0`   | `u >= 0` / `u > 0`     |
//! | `e+ε`  | false | `u >= 0`               | `u > 0`                |
//! | `-∞`   | false | false                  | true                   |
//!
//! Results are only constant-folded, never simplified further.

use crate::formula::{Atom, Formula, LinearTerm, Relation, Var};
use crate::limits::{Budget, QeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestPoint {
    MinusInfinity,
    Exact(LinearTerm),
    ExactPlusEpsilon(LinearTerm),
}

/// `(c, r)` with the atom reading `c·x + r ⋈ 0`, when it mentions `x`.
fn split(a: &Atom, x: &Var) -> Option<(crate::formula::Rational, LinearTerm)> {
    let c = a.term().coeff(x)?.clone();
    let mut r = a.term().clone();
    r.add_monomial(x.clone(), &-&c);
    Some((c, r))
}

/// Test points for eliminating `x` from the negation-free formula `f`, without repeats.
pub fn test_points(f: &Formula, x: &Var) -> Vec<TestPoint> {
    let mut points = vec![TestPoint::MinusInfinity];
    collect_atoms(f, &mut |a| {
        if let Some((c, r)) = split(a, x) {
            let e = r.scale(&-c.recip());
            let p = match a.rel() {
                Relation::Gt => TestPoint::ExactPlusEpsilon(e),
                Relation::Ge | Relation::Eq => TestPoint::Exact(e),
            };
            if !points.contains(&p) {
                points.push(p);
            }
        }
    });
    points
}

fn collect_atoms(f: &Formula, visit: &mut impl FnMut(&Atom)) {
    match f {
        Formula::Atom(a) => visit(a),
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => collect_atoms(g, visit),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| collect_atoms(c, visit)),
        Formula::True | Formula::False => {}
    }
}

/// The atom with `x` replaced by the test point.
pub fn substitute_point(a: &Atom, x: &Var, p: &TestPoint) -> Formula {
    let Some((c, r)) = split(a, x) else {
        return Formula::Atom(a.clone());
    };
    let at = |e: &LinearTerm| e.scale(&c) + r.clone();
    match p {
        TestPoint::MinusInfinity => match a.rel() {
            Relation::Eq => Formula::False,
            _ if c.is_positive() => Formula::False,
            _ => Formula::True,
        },
        TestPoint::Exact(e) => Formula::atom(Atom::new(at(e), a.rel())),
        TestPoint::ExactPlusEpsilon(e) => match a.rel() {
            Relation::Eq => Formula::False,
            _ if c.is_positive() => Formula::atom(Atom::ge(at(e))),
            _ => Formula::atom(Atom::gt(at(e))),
        },
    }
}

fn substitute(f: &Formula, x: &Var, p: &TestPoint) -> Formula {
    match f {
        Formula::Atom(a) => substitute_point(a, x, p),
        Formula::And(cs) => Formula::and(cs.iter().map(|c| substitute(c, x, p)).collect()),
        Formula::Or(cs) => Formula::or(cs.iter().map(|c| substitute(c, x, p)).collect()),
        other => other.clone(),
    }
}

/// A quantifier-free formula equivalent to `∃x f`.
pub fn lw_eliminate_var(f: &Formula, x: &Var) -> Result<Formula, QeError> {
    if !f.is_quantifier_free() {
        return Err(QeError::Quantified);
    }
    let f = f.nnf();
    Ok(Formula::or(
        test_points(&f, x).iter().map(|p| substitute(&f, x, p)).collect(),
    ))
}

/// Eliminates every quantifier, innermost first.
pub fn lw_eliminate_all(f: &Formula) -> Result<Formula, QeError> {
    lw_eliminate_all_within(f, &Budget::unlimited())
}

pub fn lw_eliminate_all_within(f: &Formula, budget: &Budget) -> Result<Formula, QeError> {
    budget.check_time()?;
    Ok(match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(lw_eliminate_all_within(g, budget)?),
        Formula::And(cs) => Formula::and(
            cs.iter()
                .map(|c| lw_eliminate_all_within(c, budget))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(cs) => Formula::or(
            cs.iter()
                .map(|c| lw_eliminate_all_within(c, budget))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Exists(vs, body) => exists(&lw_eliminate_all_within(body, budget)?, vs, budget)?,
        Formula::Forall(vs, body) => {
            let negated = Formula::not(lw_eliminate_all_within(body, budget)?);
            Formula::not(exists(&negated, vs, budget)?).nnf()
        }
    })
}

fn exists(body: &Formula, vs: &[Var], budget: &Budget) -> Result<Formula, QeError> {
    let mut out = body.nnf();
    for v in vs.iter().rev() {
        budget.check_time()?;
        out = lw_eliminate_var(&out, v)?;
        budget.check_size(out.atom_count())?;
    }
    Ok(out)
}
