//! The truncated power series ring `k[t]/(t^N)`.
//!
//! A series carries its own precision `N`. Binary operations return a result
//! at the smaller of the two precisions, so precision lost in a division by a
//! power of `t` propagates automatically.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::{FieldElement, FieldSpec};

/// A `t`-adic valuation. A series whose stored coefficients all vanish only
/// has a lower bound: its valuation is at least its precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(usize),
    AtLeast(usize),
}

impl Valuation {
    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// The exact value or the lower bound.
    pub fn bound(&self) -> usize {
        match *self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn finite(&self) -> Option<usize> {
        match *self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound()
            .cmp(&other.bound())
            .then(self.is_finite().cmp(&other.is_finite()).reverse())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// An element of `k[t]/(t^N)`; `coeffs[j]` is the coefficient of `t^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    field: FieldSpec,
    coeffs: Vec<FieldElement>,
}

impl TruncatedSeries {
    /// Builds a series from coefficients; the precision is `coeffs.len()`.
    pub fn new(field: FieldSpec, coeffs: Vec<FieldElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ShapeMismatch("a series needs precision at least 1".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| c.field() != field) {
            return Err(Error::MixedFields(field, c.field()));
        }
        Ok(TruncatedSeries { field, coeffs })
    }

    /// Builds a series from integer coefficients, padding with zeros up to `precision`.
    pub fn from_ints(field: FieldSpec, ints: &[i64], precision: usize) -> Self {
        assert!(precision >= 1, "precision must be positive");
        let coeffs = (0..precision)
            .map(|j| field.from_i64(ints.get(j).copied().unwrap_or(0)))
            .collect();
        TruncatedSeries { field, coeffs }
    }

    pub fn zero(field: FieldSpec, precision: usize) -> Self {
        Self::from_ints(field, &[], precision)
    }

    pub fn one(field: FieldSpec, precision: usize) -> Self {
        Self::from_ints(field, &[1], precision)
    }

    pub fn constant(c: FieldElement, precision: usize) -> Self {
        let field = c.field();
        let mut s = Self::zero(field, precision);
        s.coeffs[0] = c;
        s
    }

    /// `c·t^k`, which is zero when `k >= precision`.
    pub fn monomial(c: FieldElement, k: usize, precision: usize) -> Self {
        let field = c.field();
        let mut s = Self::zero(field, precision);
        if k < precision {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> FieldElement {
        self.coeffs.get(j).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> &FieldElement {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldElement::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(FieldElement::is_zero)
    }

    /// True when the series only has a constant coefficient.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(FieldElement::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(j) => Valuation::Finite(j),
            None => Valuation::AtLeast(self.precision()),
        }
    }

    /// Reduction modulo `t^m`.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.precision() {
            return Err(Error::PrecisionRequest { requested: m, available: self.precision() });
        }
        Ok(TruncatedSeries { field: self.field, coeffs: self.coeffs[..m].to_vec() })
    }

    /// Truncation to `min(m, precision)`.
    pub(crate) fn truncated_to(&self, m: usize) -> Self {
        let m = m.clamp(1, self.precision());
        TruncatedSeries { field: self.field, coeffs: self.coeffs[..m].to_vec() }
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        TruncatedSeries {
            field: self.field,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Inverse of a unit by the recursion `b_j = -a_0^{-1} Σ_{i≥1} a_i b_{j-i}`.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        let inv0 = self.coeffs[0].inv()?;
        let n = self.precision();
        let mut out: Vec<FieldElement> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for j in 1..n {
            let mut acc = self.field.zero();
            for i in 1..=j {
                acc = &acc + &(&self.coeffs[i] * &out[j - i]);
            }
            out.push(-(&acc * &inv0));
        }
        Ok(TruncatedSeries { field: self.field, coeffs: out })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::MixedFields(self.field, other.field));
        }
        Ok(self * other)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::MixedFields(self.field, other.field));
        }
        Ok(self + other)
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field, self.precision());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents on units.
    pub fn powi(&self, exp: i64) -> Result<Self> {
        if exp >= 0 {
            Ok(self.pow(exp as u64))
        } else {
            Ok(self.invert()?.pow(exp.unsigned_abs()))
        }
    }

    /// Exact division by `t^v`. The top `v` coefficients of the quotient are
    /// unknown, so the result has precision `N - v`.
    pub fn div_t_power(&self, v: usize) -> Result<Self> {
        if v >= self.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "division by t^{v} at precision {}",
                self.precision()
            )));
        }
        if let Some(j) = self.coeffs[..v].iter().position(|c| !c.is_zero()) {
            return Err(Error::NoRelation(format!("t^{v} does not divide a series of valuation {j}")));
        }
        Ok(TruncatedSeries { field: self.field, coeffs: self.coeffs[v..].to_vec() })
    }

    /// The substitution `t ↦ t^r`.
    pub fn substitute_power(&self, r: usize) -> Self {
        assert!(r >= 1);
        let n = self.precision();
        let mut out = Self::zero(self.field, n);
        for (j, c) in self.coeffs.iter().enumerate() {
            if j * r < n {
                out.coeffs[j * r] = c.clone();
            }
        }
        out
    }

    /// Formal derivative `d/dt`; the top coefficient is lost.
    pub fn derivative(&self) -> Self {
        let n = self.precision();
        let coeffs = (0..n)
            .map(|j| {
                if j + 1 < n {
                    self.coeffs[j + 1].mul_int(j as i64 + 1)
                } else {
                    self.field.zero()
                }
            })
            .collect();
        TruncatedSeries { field: self.field, coeffs }
    }

    /// Signed display pieces `(negative, body)`, used for compact printing.
    pub(crate) fn signed_terms(&self) -> Vec<(bool, String)> {
        let mut out = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            let body = match (j, abs.is_one()) {
                (0, _) => abs.to_string(),
                (1, true) => "t".to_string(),
                (1, false) => format!("{abs}*t"),
                (_, true) => format!("t^{j}"),
                (_, false) => format!("{abs}*t^{j}"),
            };
            out.push((neg, body));
        }
        out
    }
}

pub(crate) fn join_signed(terms: &[(bool, String)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, (neg, body)) in terms.iter().enumerate() {
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push('-'),
            (_, false) => s.push('+'),
        }
        s.push_str(body);
    }
    s
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&self.signed_terms()))
    }
}

impl PartialOrd for TruncatedSeries {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical ordering for deterministic output, coefficient by coefficient.
impl Ord for TruncatedSeries {
    fn cmp(&self, other: &Self) -> Ordering {
        self.precision()
            .cmp(&other.precision())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

fn check_fields(a: &TruncatedSeries, b: &TruncatedSeries) {
    assert!(
        a.field == b.field,
        "series arithmetic on mixed fields {} and {}",
        a.field,
        b.field
    );
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        check_fields(self, rhs);
        let n = self.precision().min(rhs.precision());
        TruncatedSeries {
            field: self.field,
            coeffs: (0..n).map(|j| &self.coeffs[j] + &rhs.coeffs[j]).collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        check_fields(self, rhs);
        let n = self.precision().min(rhs.precision());
        TruncatedSeries {
            field: self.field,
            coeffs: (0..n).map(|j| &self.coeffs[j] - &rhs.coeffs[j]).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        check_fields(self, rhs);
        let n = self.precision().min(rhs.precision());
        let mut coeffs = vec![self.field.zero(); n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        TruncatedSeries { field: self.field, coeffs }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            field: self.field,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn s(ints: &[i64], n: usize) -> TruncatedSeries {
        TruncatedSeries::from_ints(Q, ints, n)
    }

    #[test]
    fn products_truncate() {
        assert_eq!(&s(&[1, 1], 3) * &s(&[1, -1], 3), s(&[1, 0, -1], 3));
        assert!((&s(&[0, 1], 2) * &s(&[0, 1], 2)).is_zero());
        let a = s(&[3, -2, 5], 3);
        assert_eq!(&a * &TruncatedSeries::one(Q, 3), a);
    }

    #[test]
    fn inversion() {
        assert_eq!(s(&[1, 1], 3).invert().unwrap(), s(&[1, -1, 1], 3));
        let half = TruncatedSeries::constant(Q.one().mul_int(2).inv().unwrap(), 2);
        assert_eq!(s(&[2], 2).invert().unwrap(), half);
        assert!(matches!(s(&[0, 1], 3).invert(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn valuations() {
        assert_eq!(s(&[1, 1], 3).valuation(), Valuation::Finite(0));
        assert_eq!(s(&[0, 0, 1, 1], 5).valuation(), Valuation::Finite(2));
        assert_eq!(s(&[], 4).valuation(), Valuation::AtLeast(4));
    }

    #[test]
    fn truncation() {
        assert_eq!(s(&[1, 1, 0, 1], 5).truncate(2).unwrap(), s(&[1, 1], 2));
        let a = s(&[4, 0, 1], 3);
        assert_eq!(a.truncate(3).unwrap(), a);
        assert_eq!(
            a.truncate(5),
            Err(Error::PrecisionRequest { requested: 5, available: 3 })
        );
    }

    #[test]
    fn display_is_compact() {
        assert_eq!(s(&[1, 1], 3).to_string(), "1+t");
        assert_eq!(s(&[2, -1], 3).to_string(), "2-t");
        assert_eq!(s(&[-1, 0, 3], 3).to_string(), "-1+3*t^2");
        assert_eq!(s(&[], 3).to_string(), "0");
    }

    #[test]
    fn division_by_t_power_loses_precision() {
        let a = s(&[0, 0, 3, 1], 5);
        let q = a.div_t_power(2).unwrap();
        assert_eq!(q, s(&[3, 1, 0], 3));
        assert!(matches!(s(&[1], 3).div_t_power(1), Err(Error::NoRelation(_))));
    }

    fn series(n: usize) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec(-5i64..5, n).prop_map(move |v| s(&v, n))
    }

    fn triple() -> impl Strategy<Value = (TruncatedSeries, TruncatedSeries, TruncatedSeries)> {
        (1usize..=8).prop_flat_map(|n| (series(n), series(n), series(n)))
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in triple()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn inversion_is_involution(a in (1usize..=8).prop_flat_map(series)) {
            prop_assume!(a.is_unit());
            let inv = a.invert().unwrap();
            prop_assert!((&a * &inv).is_one());
            prop_assert_eq!(inv.invert().unwrap(), a);
        }

        #[test]
        fn valuation_is_additive((a, b, _c) in triple()) {
            let (va, vb) = (a.valuation(), b.valuation());
            if let (Some(x), Some(y)) = (va.finite(), vb.finite()) {
                if x + y < a.precision() {
                    prop_assert_eq!((&a * &b).valuation(), Valuation::Finite(x + y));
                }
            }
        }

        #[test]
        fn truncation_is_ring_map((a, b, _c) in triple(), m in 1usize..=8) {
            prop_assume!(m <= a.precision());
            prop_assert_eq!((&a * &b).truncate(m).unwrap(),
                            &a.truncate(m).unwrap() * &b.truncate(m).unwrap());
        }
    }
}
