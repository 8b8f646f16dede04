use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in an `i64` are stored inline and
/// computed with 128-bit intermediates; larger values fall back to big integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if let (Ok(a), Ok(b)) = (u64::try_from(a), u64::try_from(b)) {
        return u128::from(gcd_u64(a, b));
    }
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    pub fn zero() -> Rational {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Rational {
        Rational(Repr::Small(1, 1))
    }

    pub fn int(n: i64) -> Rational {
        Rational(Repr::Small(n, 1))
    }

    pub fn from_integer(n: BigInt) -> Rational {
        match n.to_i64() {
            Some(n) => Rational::int(n),
            None => Rational(Repr::Big(Box::new(BigRational::from_integer(n)))),
        }
    }

    /// `numer / denom` in lowest terms. Panics if `denom` is zero.
    pub fn new(numer: BigInt, denom: BigInt) -> Rational {
        Rational::from_big(BigRational::new(numer, denom))
    }

    /// `n / d` for nonzero `d`, reducing through 128-bit arithmetic.
    fn from_i128(mut n: i128, mut d: i128) -> Rational {
        assert!(d != 0, "division by zero");
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(n.into(), d.into())))),
        }
    }

    fn from_big(b: BigRational) -> Rational {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(b))),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw((*n).into(), (*d).into()),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => (*n).into(),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => (*d).into(),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Bit length of the larger of numerator and denominator magnitudes.
    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => {
                u64::from(64 - n.unsigned_abs().leading_zeros()).max(u64::from(64 - d.leading_zeros()))
            }
            Repr::Big(b) => b.numer().bits().max(b.denom().bits()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.0, Repr::Small(_, 1))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational::from_i128(i128::from(*d), i128::from(*n)),
            Repr::Big(b) => Rational::from_big(b.recip()),
        }
    }

    /// Positive `k` such that every `v·k` is an integer and the nonzero ones are
    /// jointly coprime, or `None` if all values are zero.
    pub fn primitive_scale<'a>(values: impl Iterator<Item = &'a Rational> + Clone) -> Option<Rational> {
        let small = || -> Option<Rational> {
            let mut lcm: i128 = 1;
            for v in values.clone() {
                let Repr::Small(_, d) = v.0 else { return None };
                let d = i128::from(d);
                lcm = (lcm / gcd_u128(lcm as u128, d as u128) as i128).checked_mul(d)?;
            }
            let mut gcd: u128 = 0;
            for v in values.clone() {
                let Repr::Small(n, d) = v.0 else { return None };
                let scaled = i128::from(n).checked_mul(lcm / i128::from(d))?;
                gcd = gcd_u128(gcd, scaled.unsigned_abs());
            }
            (gcd != 0).then(|| Rational::from_i128(lcm, gcd as i128))
        };
        if let Some(k) = small() {
            return Some(k);
        }
        let lcm = values.clone().fold(BigInt::one(), |acc, r| acc.lcm(&r.denom()));
        let gcd = values.fold(BigInt::zero(), |acc, r| acc.gcd(&(r.numer() * (&lcm / r.denom()))));
        (!gcd.is_zero()).then(|| Rational::new(lcm, gcd))
    }
}

impl Default for Rational {
    fn default() -> Rational {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Rational {
        Rational::int(n)
    }
}

impl Zero for Rational {
    fn zero() -> Rational {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Rational {
        Rational::one()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (i128::from(*a) * i128::from(*d)).cmp(&(i128::from(*c) * i128::from(*b)))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn add(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(n1, 1), Repr::Small(n2, 1)) => match n1.checked_add(*n2) {
            Some(n) => Rational::int(n),
            None => Rational::from_i128(i128::from(*n1) + i128::from(*n2), 1),
        },
        (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
            // with g = gcd(d1, d2), only gcd(t, g) can remain in t / (d1·d2/g)
            let g = gcd_u64(*d1 as u64, *d2 as u64) as i64;
            let (a1, a2) = (d1 / g, d2 / g);
            let t = i128::from(*n1) * i128::from(a2) + i128::from(*n2) * i128::from(a1);
            if t == 0 {
                return Rational::zero();
            }
            let g2 = gcd_u128(t.unsigned_abs(), g as u128) as i128;
            let n = t / g2;
            match (i64::try_from(n), a1.checked_mul(d2 / g2 as i64)) {
                (Ok(n), Some(d)) => Rational(Repr::Small(n, d)),
                _ => Rational::from_i128(t, i128::from(*d1) * i128::from(a2)),
            }
        }
        _ => Rational::from_big(a.to_big() + b.to_big()),
    }
}

fn mul(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(n1, 1), Repr::Small(n2, 1)) => match n1.checked_mul(*n2) {
            Some(n) => Rational::int(n),
            None => Rational::from_i128(i128::from(*n1) * i128::from(*n2), 1),
        },
        (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
            if *n1 == 0 || *n2 == 0 {
                return Rational::zero();
            }
            let g1 = gcd_u64(n1.unsigned_abs(), *d2 as u64) as i64;
            let g2 = gcd_u64(n2.unsigned_abs(), *d1 as u64) as i64;
            match ((n1 / g1).checked_mul(n2 / g2), (d1 / g2).checked_mul(d2 / g1)) {
                (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
                _ => Rational::from_i128(i128::from(*n1) * i128::from(*n2), i128::from(*d1) * i128::from(*d2)),
            }
        }
        _ => Rational::from_big(a.to_big() * b.to_big()),
    }
}

fn neg(a: &Rational) -> Rational {
    match &a.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(n) => Rational(Repr::Small(n, *d)),
            None => Rational::from_i128(-i128::from(*n), i128::from(*d)),
        },
        Repr::Big(b) => Rational::from_big(-(**b).clone()),
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg(self)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, |a: &Rational, b: &Rational| add(a, &neg(b)));
binop!(Mul, mul, mul);
binop!(Div, div, |a: &Rational, b: &Rational| mul(a, &b.recip()));

macro_rules! assignop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Rational> for Rational {
            fn $method(&mut self, rhs: &Rational) {
                *self = &*self $op rhs;
            }
        }
        impl $trait<Rational> for Rational {
            fn $method(&mut self, rhs: Rational) {
                *self = &*self $op &rhs;
            }
        }
    };
}

assignop!(AddAssign, add_assign, +);
assignop!(SubAssign, sub_assign, -);
assignop!(MulAssign, mul_assign, *);

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(r: &Rational) -> BigRational {
        assert_eq!(
            *r,
            Rational::from_big(BigRational::new(r.numer(), r.denom())),
            "not canonical"
        );
        r.to_big()
    }

    #[test]
    fn matches_big_rationals_across_the_small_boundary() {
        let edge = [
            i64::MIN,
            i64::MIN + 1,
            -(1 << 40) - 7,
            -6,
            -1,
            0,
            1,
            2,
            3,
            1 << 33,
            i64::MAX - 1,
            i64::MAX,
        ];
        let dens = [1, 2, 3, 7, 1 << 32, i64::MAX];
        let mut values = Vec::new();
        for &n in &edge {
            for &d in &dens {
                values.push(Rational::new(n.into(), d.into()));
            }
        }
        for a in &values {
            for b in &values {
                assert_eq!(big(&(a + b)), big(a) + big(b));
                assert_eq!(big(&(a - b)), big(a) - big(b));
                assert_eq!(big(&(a * b)), big(a) * big(b));
                if !b.is_zero() {
                    assert_eq!(big(&(a / b)), big(a) / big(b));
                }
                assert_eq!(a.cmp(b), big(a).cmp(&big(b)));
                // results are canonical, so equality is structural
                assert_eq!(&(a + b) - b, *a);
                assert_eq!(a - a, Rational::zero());
                assert_eq!(a * &Rational::zero(), Rational::zero());
            }
            assert_eq!(big(&-a), -big(a));
            assert_eq!(a.to_string(), big(a).to_string());
        }
    }

    #[test]
    fn primitive_scale() {
        let vals = [Rational::new(1.into(), 2.into()), Rational::new((-3).into(), 4.into())];
        assert_eq!(Rational::primitive_scale(vals.iter()), Some(Rational::int(4)));
        let zeros = [Rational::zero()];
        assert_eq!(Rational::primitive_scale(zeros.iter()), None);
        let ints = [Rational::int(6), Rational::int(-9)];
        assert_eq!(
            Rational::primitive_scale(ints.iter()),
            Some(Rational::new(1.into(), 3.into()))
        );
        let huge = [Rational::new(BigInt::from(1) << 100, 3.into()), Rational::int(2)];
        assert_eq!(
            Rational::primitive_scale(huge.iter()),
            Some(Rational::new(3.into(), 2.into()))
        );
    }
}
