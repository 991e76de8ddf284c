//! Exact scalars of the base field `k`: arbitrary-precision rationals and
//! prime fields `F_p`.
//!
//! The arithmetic operators panic when the operands live in different fields;
//! the `checked_*` methods report [`Error::MixedFields`] instead. Everything
//! above this module validates fields at construction time, so internal code
//! uses the operators.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base field: `Q` or `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

#[derive(Serialize, Deserialize)]
enum FieldRepr {
    Q,
    Fp(u64),
}

impl TryFrom<FieldRepr> for FieldSpec {
    type Error = Error;

    fn try_from(repr: FieldRepr) -> Result<Self> {
        match repr {
            FieldRepr::Q => Ok(FieldSpec::Rationals),
            FieldRepr::Fp(p) => FieldSpec::prime(p),
        }
    }
}

impl From<FieldSpec> for FieldRepr {
    fn from(spec: FieldSpec) -> Self {
        match spec {
            FieldSpec::Rationals => FieldRepr::Q,
            FieldSpec::PrimeField(p) => FieldRepr::Fp(p),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

impl std::str::FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `Q`, `F101`, `F_101` or `Fp101`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let digits = s
            .strip_prefix("F_")
            .or_else(|| s.strip_prefix("Fp"))
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| Error::InvalidField(format!("unknown field {s:?}")))?;
        let p = digits
            .parse()
            .map_err(|_| Error::InvalidField(format!("unknown field {s:?}")))?;
        FieldSpec::prime(p)
    }
}

impl FieldSpec {
    /// `F_p`, rejecting composite or too small moduli.
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime")));
        }
        Ok(FieldSpec::PrimeField(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match *self {
            FieldSpec::Rationals => FieldElement::Rational(BigRational::from_integer(n.into())),
            FieldSpec::PrimeField(p) => FieldElement::Prime {
                value: (n as i128).rem_euclid(p as i128) as u64,
                modulus: p,
            },
        }
    }

    /// Image of the rational number `num/den`; fails when `den` vanishes in the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<FieldElement> {
        match *self {
            FieldSpec::Rationals => {
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(FieldElement::Rational(BigRational::new(num.clone(), den.clone())))
            }
            FieldSpec::PrimeField(p) => {
                let reduce = |x: &BigInt| -> u64 {
                    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
                };
                let n = FieldElement::Prime { value: reduce(num), modulus: p };
                let d = FieldElement::Prime { value: reduce(den), modulus: p };
                Ok(&n * &d.inv()?)
            }
        }
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// An exact element of a [`FieldSpec`]. Rationals are always in lowest
/// terms; `F_p` elements are canonical representatives in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Prime { value: u64, modulus: u64 },
}

impl FieldElement {
    pub fn field(&self) -> FieldSpec {
        match self {
            FieldElement::Rational(_) => FieldSpec::Rationals,
            FieldElement::Prime { modulus, .. } => FieldSpec::PrimeField(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_one(),
            FieldElement::Prime { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        let (a, b) = (self.field(), other.field());
        if a == b {
            Ok(())
        } else {
            Err(Error::MixedFields(a, b))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self * other)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldElement::Rational(q) => FieldElement::Rational(q.recip()),
            FieldElement::Prime { value, modulus } => FieldElement::Prime {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplication by an integer, i.e. by its image `n·1` in the field.
    pub fn mul_int(&self, n: i64) -> Self {
        self * &self.field().from_i64(n)
    }

    /// True for elements that print with a leading minus sign.
    pub(crate) fn is_negative(&self) -> bool {
        matches!(self, FieldElement::Rational(q) if q.is_negative())
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A total order used only for canonical sorting; it carries no algebraic meaning.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => a.cmp(b),
            (
                FieldElement::Prime { value: a, modulus: p },
                FieldElement::Prime { value: b, modulus: q },
            ) => (p, a).cmp(&(q, b)),
            (FieldElement::Rational(_), _) => Ordering::Less,
            (_, FieldElement::Rational(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Prime { value, .. } => write!(f, "{value}"),
        }
    }
}

fn binary(a: &FieldElement, b: &FieldElement, op: char) -> FieldElement {
    match (a, b) {
        (FieldElement::Rational(x), FieldElement::Rational(y)) => FieldElement::Rational(match op {
            '+' => x + y,
            '-' => x - y,
            _ => x * y,
        }),
        (
            FieldElement::Prime { value: x, modulus: p },
            FieldElement::Prime { value: y, modulus: q },
        ) if p == q => {
            let value = match op {
                '+' => ((*x as u128 + *y as u128) % *p as u128) as u64,
                '-' => ((*x as u128 + *p as u128 - *y as u128) % *p as u128) as u64,
                _ => mul_mod(*x, *y, *p),
            };
            FieldElement::Prime { value, modulus: *p }
        }
        _ => panic!("arithmetic on mixed fields {} and {}", a.field(), b.field()),
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                binary(self, rhs, $op)
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                binary(&self, &rhs, $op)
            }
        }
    };
}

forward_binop!(Add, add, '+');
forward_binop!(Sub, sub, '-');
forward_binop!(Mul, mul, '*');

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Rational(q) => FieldElement::Rational(-q),
            FieldElement::Prime { value, modulus } => FieldElement::Prime {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> FieldElement {
        FieldSpec::Rationals
            .from_ratio(&BigInt::from(n), &BigInt::from(d))
            .unwrap()
    }

    #[test]
    fn rational_sum() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
    }

    #[test]
    fn prime_field_reduction() {
        let f = FieldSpec::prime(101).unwrap();
        assert_eq!(f.from_i64(50) + f.from_i64(60), f.from_i64(9));
    }

    #[test]
    fn inverses() {
        assert_eq!(q(2, 1).inv().unwrap(), q(1, 2));
        let f = FieldSpec::prime(101).unwrap();
        assert_eq!(f.from_i64(2).inv().unwrap(), f.from_i64(51));
        assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(FieldSpec::Rationals.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_fields_rejected() {
        let f = FieldSpec::prime(7).unwrap();
        let err = f.one().checked_add(&FieldSpec::Rationals.one()).unwrap_err();
        assert!(matches!(err, Error::MixedFields(..)));
    }

    #[test]
    fn field_spec_validation() {
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(91).is_err());
        assert!(FieldSpec::prime(2).is_ok());
        assert!(FieldSpec::prime(1_000_000_007).is_ok());
        assert!(FieldSpec::prime(18446744073709551557).is_ok());
    }

    #[test]
    fn characteristic() {
        let f = FieldSpec::prime(101).unwrap();
        assert!(f.one().mul_int(101).is_zero());
        for n in 1..500 {
            assert!(!FieldSpec::Rationals.one().mul_int(n).is_zero());
        }
    }

    #[test]
    fn serde_shape() {
        assert_eq!(serde_json::to_string(&FieldSpec::Rationals).unwrap(), "\"Q\"");
        assert_eq!(
            serde_json::to_string(&FieldSpec::PrimeField(101)).unwrap(),
            "{\"Fp\":101}"
        );
        let f: FieldSpec = serde_json::from_str("{\"Fp\":101}").unwrap();
        assert_eq!(f, FieldSpec::PrimeField(101));
        assert!(serde_json::from_str::<FieldSpec>("{\"Fp\":100}").is_err());
    }

    fn element(field: FieldSpec) -> impl Strategy<Value = FieldElement> {
        (-50i64..50, 1i64..20).prop_map(move |(n, d)| {
            field
                .from_ratio(&BigInt::from(n), &BigInt::from(d))
                .unwrap_or_else(|_| field.zero())
        })
    }

    fn field_axioms(a: FieldElement, b: FieldElement, c: FieldElement) {
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert_eq!(&a + &b, &b + &a);
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&a + &a.field().zero(), a);
        assert!((&a + &(-&a)).is_zero());
        if !a.is_zero() {
            assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn rational_field_axioms(a in element(FieldSpec::Rationals),
                                 b in element(FieldSpec::Rationals),
                                 c in element(FieldSpec::Rationals)) {
            field_axioms(a, b, c);
        }

        #[test]
        fn prime_field_axioms(a in element(FieldSpec::PrimeField(101)),
                              b in element(FieldSpec::PrimeField(101)),
                              c in element(FieldSpec::PrimeField(101))) {
            field_axioms(a, b, c);
        }
    }
}
