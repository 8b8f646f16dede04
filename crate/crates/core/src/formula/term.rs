use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, One, Zero};

use super::EvalError;

pub use super::rational::Rational;

/// Parses an integer or a fraction `p/q` with `q > 0`. Decimals are rejected.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (num_part, den_part) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = num_part.strip_prefix('-').unwrap_or(num_part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = num_part.parse().ok()?;
    let denom: BigInt = match den_part {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            d.parse().ok()?
        }
    };
    if denom.is_zero() {
        return None;
    }
    Some(Rational::new(numer, denom))
}

/// Number of bits of the magnitude of an integer-valued rational's numerator and denominator,
/// whichever is larger.
pub fn bit_size(r: &Rational) -> u64 {
    r.bits()
}

/// A variable, compared by name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// True if `name` matches `[A-Za-z_][A-Za-z0-9_']*`.
    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(name: &str) -> Var {
        Var::new(name)
    }
}

/// An assignment of rationals to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    values: BTreeMap<Var, Rational>,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    pub fn get(&self, v: &Var) -> Option<&Rational> {
        self.values.get(v)
    }

    pub fn set(&mut self, v: Var, value: Rational) {
        self.values.insert(v, value);
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.values.contains_key(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Rational)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Restriction of the model to variables not in `drop`.
    pub fn without(&self, drop: &[Var]) -> Model {
        Model {
            values: self
                .values
                .iter()
                .filter(|(v, _)| !drop.contains(v))
                .map(|(v, r)| (v.clone(), r.clone()))
                .collect(),
        }
    }
}

impl FromIterator<(Var, Rational)> for Model {
    fn from_iter<I: IntoIterator<Item = (Var, Rational)>>(iter: I) -> Model {
        Model {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, r)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}={r}")?;
        }
        Ok(())
    }
}

/// `constant + Σ coeff·var`, with no zero coefficient stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearTerm {
    constant: Rational,
    coeffs: BTreeMap<Var, Rational>,
}

impl LinearTerm {
    pub fn zero() -> LinearTerm {
        LinearTerm::default()
    }

    pub fn constant(c: Rational) -> LinearTerm {
        LinearTerm {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(v: Var) -> LinearTerm {
        LinearTerm::monomial(Rational::one(), v)
    }

    pub fn monomial(c: Rational, v: Var) -> LinearTerm {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(v, c);
        }
        LinearTerm {
            constant: Rational::zero(),
            coeffs,
        }
    }

    pub fn from_parts(constant: Rational, coeffs: impl IntoIterator<Item = (Var, Rational)>) -> LinearTerm {
        let mut t = LinearTerm::constant(constant);
        for (v, c) in coeffs {
            t.add_monomial(v, &c);
        }
        t
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn coeffs(&self) -> &BTreeMap<Var, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, v: &Var) -> Option<&Rational> {
        self.coeffs.get(v)
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn is_ground(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    /// First nonzero coefficient in variable order.
    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.values().next()
    }

    pub fn add_monomial(&mut self, v: Var, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let remove = match self.coeffs.get_mut(&v) {
            Some(existing) => {
                *existing += c;
                existing.is_zero()
            }
            None => {
                self.coeffs.insert(v.clone(), c.clone());
                false
            }
        };
        if remove {
            self.coeffs.remove(&v);
        }
    }

    pub fn scale(&self, k: &Rational) -> LinearTerm {
        if k.is_zero() {
            return LinearTerm::zero();
        }
        LinearTerm {
            constant: &self.constant * k,
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    /// `self` with `v` replaced by `replacement`.
    pub fn substitute(&self, v: &Var, replacement: &LinearTerm) -> LinearTerm {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(v);
                rest + replacement.scale(c)
            }
        }
    }

    /// Same linear part, constant dropped.
    pub fn linear_part(&self) -> LinearTerm {
        LinearTerm {
            constant: Rational::zero(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn eval(&self, m: &Model) -> Result<Rational, EvalError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let value = m.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?;
            acc += c * value;
        }
        Ok(acc)
    }

    /// Largest bit size over the constant and all coefficients.
    pub fn max_bit_size(&self) -> u64 {
        self.coeffs
            .values()
            .chain(std::iter::once(&self.constant))
            .map(bit_size)
            .max()
            .unwrap_or(0)
    }

    /// Positive multiple of `self` whose constant and coefficients are coprime integers.
    pub fn primitive(&self) -> LinearTerm {
        let parts = self.coeffs.values().chain(std::iter::once(&self.constant));
        let Some(k) = Rational::primitive_scale(parts) else {
            return LinearTerm::zero();
        };
        if k.is_one() {
            self.clone()
        } else {
            self.scale(&k)
        }
    }
}

impl Add for LinearTerm {
    type Output = LinearTerm;
    fn add(mut self, rhs: LinearTerm) -> LinearTerm {
        self.constant += rhs.constant;
        for (v, c) in rhs.coeffs {
            self.add_monomial(v, &c);
        }
        self
    }
}

impl Sub for LinearTerm {
    type Output = LinearTerm;
    fn sub(self, rhs: LinearTerm) -> LinearTerm {
        self + (-rhs)
    }
}

impl Neg for LinearTerm {
    type Output = LinearTerm;
    fn neg(self) -> LinearTerm {
        LinearTerm {
            constant: -self.constant,
            coeffs: self.coeffs.into_iter().map(|(v, c)| (v, -c)).collect(),
        }
    }
}

impl Mul<&Rational> for &LinearTerm {
    type Output = LinearTerm;
    fn mul(self, k: &Rational) -> LinearTerm {
        self.scale(k)
    }
}

impl fmt::Debug for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sign of a rational as -1, 0 or 1.
pub(crate) fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
