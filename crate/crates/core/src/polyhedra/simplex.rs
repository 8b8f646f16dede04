//! Bounded general simplex over exact rationals.
//!
//! Every constraint `Σ aᵢxᵢ + c ρ 0` is turned into a bound on a column: either an
//! original variable or a slack standing for a normalized linear form. Strict bounds
//! use values `r + kδ` with `δ` a positive infinitesimal, so a feasible assignment is
//! turned into a rational witness by picking a small enough concrete `δ`.
//! Pivoting follows Bland's rule, which guarantees termination.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Sub};

use crate::formula::{Atom, LinearTerm, Model, Rational, Relation, Var};
use crate::limits::{Budget, QeError};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub(crate) struct DeltaRational {
    real: Rational,
    delta: Rational,
}

impl DeltaRational {
    fn new(real: Rational, delta: Rational) -> DeltaRational {
        DeltaRational { real, delta }
    }

    fn scale(&self, k: &Rational) -> DeltaRational {
        DeltaRational::new(&self.real * k, &self.delta * k)
    }

    fn concrete(&self, delta: &Rational) -> Rational {
        &self.real + &self.delta * delta
    }
}

impl Add for &DeltaRational {
    type Output = DeltaRational;
    fn add(self, rhs: &DeltaRational) -> DeltaRational {
        DeltaRational::new(&self.real + &rhs.real, &self.delta + &rhs.delta)
    }
}

impl Sub for &DeltaRational {
    type Output = DeltaRational;
    fn sub(self, rhs: &DeltaRational) -> DeltaRational {
        DeltaRational::new(&self.real - &rhs.real, &self.delta - &rhs.delta)
    }
}

#[derive(Clone, Debug)]
struct Bound {
    value: DeltaRational,
    source: usize,
}

type Row = BTreeMap<usize, Rational>;

/// Outcome of a feasibility check: `Err` carries the sources of an infeasible subset.
pub(crate) type Check = Result<(), Vec<usize>>;

#[derive(Clone, Debug, Default)]
pub(crate) struct Simplex {
    columns: HashMap<Var, usize>,
    column_var: Vec<Option<Var>>,
    forms: HashMap<BTreeMap<Var, Rational>, usize>,
    rows: Vec<Row>,
    row_basic: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    value: Vec<DeltaRational>,
    lower: Vec<Option<Bound>>,
    upper: Vec<Option<Bound>>,
    /// Set when two asserted bounds already contradict each other.
    bound_conflict: Option<Vec<usize>>,
    pivots: u64,
}

impl Simplex {
    pub(crate) fn new() -> Simplex {
        Simplex::default()
    }

    fn new_column(&mut self, var: Option<Var>) -> usize {
        let c = self.column_var.len();
        self.column_var.push(var);
        self.basic_row.push(None);
        self.value.push(DeltaRational::default());
        self.lower.push(None);
        self.upper.push(None);
        c
    }

    fn var_column(&mut self, v: &Var) -> usize {
        if let Some(&c) = self.columns.get(v) {
            return c;
        }
        let c = self.new_column(Some(v.clone()));
        self.columns.insert(v.clone(), c);
        c
    }

    /// Column carrying `term`'s linear part up to a nonzero factor, and that factor.
    fn column_for(&mut self, term: &LinearTerm) -> (usize, Rational) {
        let coeffs = term.coeffs();
        let lead = coeffs.values().next().expect("non-ground term");
        let mut scale = Rational::primitive_scale(coeffs.values())
            .expect("non-ground term")
            .recip();
        if lead.is_negative() {
            scale = -scale;
        }
        if coeffs.len() == 1 {
            let v = coeffs.keys().next().unwrap().clone();
            return (self.var_column(&v), scale);
        }
        let key: BTreeMap<Var, Rational> = coeffs.iter().map(|(v, c)| (v.clone(), c / &scale)).collect();
        if let Some(&c) = self.forms.get(&key) {
            return (c, scale);
        }
        // Express the new slack over the current nonbasic columns.
        let mut row = Row::new();
        for (v, a) in &key {
            let c = self.var_column(v);
            match self.basic_row[c] {
                Some(r) => {
                    for (k, b) in self.rows[r].clone() {
                        add_entry(&mut row, k, &(a * b));
                    }
                }
                None => add_entry(&mut row, c, a),
            }
        }
        let slack = self.new_column(None);
        let value = row
            .iter()
            .fold(DeltaRational::default(), |acc, (k, a)| &acc + &self.value[*k].scale(a));
        self.value[slack] = value;
        self.basic_row[slack] = Some(self.rows.len());
        self.rows.push(row);
        self.row_basic.push(slack);
        self.forms.insert(key, slack);
        (slack, scale)
    }

    /// Forgets all bounds; the tableau and current assignment are kept.
    pub(crate) fn reset(&mut self) {
        self.lower.iter_mut().for_each(|b| *b = None);
        self.upper.iter_mut().for_each(|b| *b = None);
        self.bound_conflict = None;
    }

    /// Asserts `atom` as the constraint numbered `source`.
    pub(crate) fn assert_atom(&mut self, atom: &Atom, source: usize) {
        if self.bound_conflict.is_some() {
            return;
        }
        if let Some(holds) = atom.ground_value() {
            if !holds {
                self.bound_conflict = Some(vec![source]);
            }
            return;
        }
        let (col, scale) = self.column_for(atom.term());
        let bound = -atom.term().constant_part() / &scale;
        let flip = scale.is_negative();
        match atom.rel() {
            Relation::Eq => {
                self.assert_bound(col, DeltaRational::new(bound.clone(), Rational::zero()), source, true);
                self.assert_bound(col, DeltaRational::new(bound, Rational::zero()), source, false);
            }
            Relation::Ge => {
                self.assert_bound(col, DeltaRational::new(bound, Rational::zero()), source, !flip);
            }
            Relation::Gt => {
                let eps = if flip { -Rational::one() } else { Rational::one() };
                self.assert_bound(col, DeltaRational::new(bound, eps), source, !flip);
            }
        }
    }

    fn assert_bound(&mut self, col: usize, value: DeltaRational, source: usize, is_lower: bool) {
        if is_lower {
            if self.lower[col].as_ref().is_some_and(|b| b.value >= value) {
                return;
            }
            if let Some(u) = &self.upper[col] {
                if value > u.value {
                    self.bound_conflict = Some(dedup(vec![source, u.source]));
                    return;
                }
            }
            self.lower[col] = Some(Bound { value, source });
        } else {
            if self.upper[col].as_ref().is_some_and(|b| b.value <= value) {
                return;
            }
            if let Some(l) = &self.lower[col] {
                if value < l.value {
                    self.bound_conflict = Some(dedup(vec![source, l.source]));
                    return;
                }
            }
            self.upper[col] = Some(Bound { value, source });
        }
    }

    fn below_lower(&self, c: usize) -> bool {
        self.lower[c].as_ref().is_some_and(|b| self.value[c] < b.value)
    }

    fn above_upper(&self, c: usize) -> bool {
        self.upper[c].as_ref().is_some_and(|b| self.value[c] > b.value)
    }

    /// Moves nonbasic column `c` to `v`, keeping the basic columns consistent.
    fn update(&mut self, c: usize, v: DeltaRational) {
        let diff = &v - &self.value[c];
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(a) = row.get(&c) {
                let b = self.row_basic[r];
                self.value[b] = &self.value[b] + &diff.scale(a);
            }
        }
        self.value[c] = v;
    }

    fn pivot(&mut self, r: usize, entering: usize) {
        let leaving = self.row_basic[r];
        let mut row = std::mem::take(&mut self.rows[r]);
        let a = row.remove(&entering).expect("pivot on a zero entry");
        let inv = a.recip();
        // entering = inv·leaving − Σ (aₖ·inv)·xₖ
        let mut new_row: Row = row.into_iter().map(|(k, c)| (k, -(c * &inv))).collect();
        new_row.insert(leaving, inv);
        for (r2, other) in self.rows.iter_mut().enumerate() {
            if r2 == r {
                continue;
            }
            if let Some(c) = other.remove(&entering) {
                for (k, b) in &new_row {
                    add_entry(other, *k, &(&c * b));
                }
            }
        }
        self.rows[r] = new_row;
        self.row_basic[r] = entering;
        self.basic_row[entering] = Some(r);
        self.basic_row[leaving] = None;
        self.pivots += 1;
    }

    /// Decides whether the asserted bounds are jointly satisfiable.
    pub(crate) fn check(&mut self, budget: &Budget) -> Result<Check, QeError> {
        if let Some(conflict) = &self.bound_conflict {
            return Ok(Err(conflict.clone()));
        }
        for c in 0..self.column_var.len() {
            if self.basic_row[c].is_none() {
                if self.below_lower(c) {
                    let v = self.lower[c].as_ref().unwrap().value.clone();
                    self.update(c, v);
                } else if self.above_upper(c) {
                    let v = self.upper[c].as_ref().unwrap().value.clone();
                    self.update(c, v);
                }
            }
        }
        let mut steps = 0u32;
        loop {
            steps += 1;
            if steps.is_multiple_of(64) {
                budget.check_time()?;
            }
            let violated = self
                .row_basic
                .iter()
                .enumerate()
                .filter(|&(_, &b)| self.below_lower(b) || self.above_upper(b))
                .min_by_key(|&(_, &b)| b)
                .map(|(r, &b)| (r, b));
            let Some((r, b)) = violated else {
                return Ok(Ok(()));
            };
            let increase = self.below_lower(b);
            let target = if increase {
                self.lower[b].as_ref().unwrap().value.clone()
            } else {
                self.upper[b].as_ref().unwrap().value.clone()
            };
            let entering = self.rows[r]
                .iter()
                .filter(|(k, a)| {
                    let up = a.is_positive() == increase;
                    if up {
                        self.upper[**k].as_ref().is_none_or(|u| self.value[**k] < u.value)
                    } else {
                        self.lower[**k].as_ref().is_none_or(|l| self.value[**k] > l.value)
                    }
                })
                .map(|(k, _)| *k)
                .min();
            let Some(j) = entering else {
                let own = if increase { &self.lower[b] } else { &self.upper[b] };
                let mut sources = vec![own.as_ref().unwrap().source];
                for (k, a) in &self.rows[r] {
                    let bound = if a.is_positive() == increase {
                        &self.upper[*k]
                    } else {
                        &self.lower[*k]
                    };
                    sources.push(bound.as_ref().expect("blocking bound").source);
                }
                return Ok(Err(dedup(sources)));
            };
            let a = self.rows[r][&j].clone();
            let theta = (&target - &self.value[b]).scale(&a.recip());
            self.value[b] = target;
            self.value[j] = &self.value[j] + &theta;
            for (r2, row) in self.rows.iter().enumerate() {
                if r2 == r {
                    continue;
                }
                if let Some(c) = row.get(&j) {
                    let k = self.row_basic[r2];
                    self.value[k] = &self.value[k] + &theta.scale(c);
                }
            }
            self.pivot(r, j);
        }
    }

    /// Rational assignment to the original variables satisfying every asserted bound.
    /// Only meaningful after a successful [`Simplex::check`].
    pub(crate) fn model(&self) -> Model {
        let mut delta = Rational::one();
        for c in 0..self.column_var.len() {
            let v = &self.value[c];
            if let Some(l) = &self.lower[c] {
                if l.value.real < v.real && l.value.delta > v.delta {
                    delta = delta.min((&v.real - &l.value.real) / (&l.value.delta - &v.delta));
                }
            }
            if let Some(u) = &self.upper[c] {
                if v.real < u.value.real && v.delta > u.value.delta {
                    delta = delta.min((&u.value.real - &v.real) / (&v.delta - &u.value.delta));
                }
            }
        }
        self.column_var
            .iter()
            .enumerate()
            .filter_map(|(c, v)| v.as_ref().map(|v| (v.clone(), self.value[c].concrete(&delta))))
            .collect()
    }

    #[allow(dead_code)]
    pub(crate) fn pivots(&self) -> u64 {
        self.pivots
    }
}

fn add_entry(row: &mut Row, k: usize, a: &Rational) {
    if a.is_zero() {
        return;
    }
    let remove = match row.get_mut(&k) {
        Some(e) => {
            *e += a;
            e.is_zero()
        }
        None => {
            row.insert(k, a.clone());
            false
        }
    };
    if remove {
        row.remove(&k);
    }
}

fn dedup(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn term(c: i64, parts: &[(&str, i64)]) -> LinearTerm {
        LinearTerm::from_parts(q(c), parts.iter().map(|(v, k)| (Var::new(v), q(*k))))
    }

    fn run(atoms: &[Atom]) -> (Check, Model) {
        let mut s = Simplex::new();
        for (i, a) in atoms.iter().enumerate() {
            s.assert_atom(a, i);
        }
        let r = s.check(&Budget::unlimited()).unwrap();
        let m = s.model();
        (r, m)
    }

    #[test]
    fn strict_interval_has_interior_witness() {
        let atoms = [Atom::gt(term(0, &[("x", 1)])), Atom::gt(term(1, &[("x", -1)]))];
        let (r, m) = run(&atoms);
        assert!(r.is_ok());
        for a in &atoms {
            assert!(a.holds(&m).unwrap());
        }
    }

    #[test]
    fn strict_point_is_infeasible() {
        let atoms = [
            Atom::gt(term(0, &[("x", 1), ("y", 1)])),
            Atom::ge(term(0, &[("x", -1), ("y", -1)])),
        ];
        let (r, _) = run(&atoms);
        assert_eq!(r, Err(vec![0, 1]));
    }

    #[test]
    fn conflict_through_rows() {
        // x >= 0, y - x >= 0, -1 - y >= 0
        let atoms = [
            Atom::ge(term(0, &[("x", 1)])),
            Atom::ge(term(0, &[("y", 1), ("x", -1)])),
            Atom::ge(term(-1, &[("y", -1)])),
        ];
        let (r, _) = run(&atoms);
        assert_eq!(r, Err(vec![0, 1, 2]));
    }

    #[test]
    fn reuse_after_reset() {
        let mut s = Simplex::new();
        let a = Atom::ge(term(-1, &[("x", 1), ("y", 1)]));
        let b = Atom::ge(term(0, &[("x", -1), ("y", -1)]));
        s.assert_atom(&a, 0);
        s.assert_atom(&b, 1);
        assert!(s.check(&Budget::unlimited()).unwrap().is_err());
        s.reset();
        s.assert_atom(&b, 1);
        assert!(s.check(&Budget::unlimited()).unwrap().is_ok());
        assert!(b.holds(&s.model()).unwrap());
    }
}
