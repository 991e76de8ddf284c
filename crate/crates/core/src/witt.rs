//! Big Witt vectors `W_m(k)` as unit series `1 + a_1 t + … + a_m t^m`
//! modulo `t^{m+1}`. Addition is multiplication of series.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalars::{FieldElement, FieldSpec};
use crate::tseries::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    m: usize,
    series: TruncatedSeries,
}

impl WittVector {
    /// Wraps `f ≡ 1 mod t`, truncated to precision `m + 1`.
    pub fn from_series(f: &TruncatedSeries, m: usize) -> Result<Self> {
        if !f.constant_term().is_one() {
            return Err(Error::NotRelative(format!("{f} has constant term {}", f.constant_term())));
        }
        Ok(WittVector { m, series: f.truncate(m + 1)? })
    }

    pub fn one(field: FieldSpec, m: usize) -> Self {
        WittVector { m, series: TruncatedSeries::one(field, m + 1) }
    }

    /// `Π (1 - a_i t^i)`.
    pub fn from_coordinates(field: FieldSpec, coords: &[FieldElement]) -> Result<Self> {
        let m = coords.len();
        let mut acc = TruncatedSeries::one(field, m + 1);
        for (i, a) in coords.iter().enumerate() {
            if a.field() != field {
                return Err(Error::MixedFields(field, a.field()));
            }
            acc = &acc * &one_minus(a, i + 1, m);
        }
        Ok(WittVector { m, series: acc })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> FieldSpec {
        self.series.field()
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::MixedFields(self.field(), other.field()));
        }
        if self.m != other.m {
            return Err(Error::ShapeMismatch(format!("Witt lengths {} and {}", self.m, other.m)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(WittVector { m: self.m, series: &self.series * &other.series })
    }

    pub fn neg(&self) -> Self {
        let inv = self.series.invert().expect("constant term is 1");
        WittVector { m: self.m, series: inv }
    }

    /// The unique `(a_1, …, a_m)` with `f ≡ Π (1 - a_i t^i) mod t^{m+1}`.
    pub fn coordinates(&self) -> Vec<FieldElement> {
        let mut f = self.series.clone();
        let mut out = Vec::with_capacity(self.m);
        for i in 1..=self.m {
            let a = -&f.coeff(i);
            let factor = one_minus(&a, i, self.m).invert().expect("unit");
            f = &f * &factor;
            out.push(a);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.m;
        let field = self.field();
        let xs = self.coordinates();
        let ys = other.coordinates();
        let mut acc = TruncatedSeries::one(field, m + 1);
        for (i, a) in xs.iter().enumerate().map(|(i, a)| (i + 1, a)) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in ys.iter().enumerate().map(|(j, b)| (j + 1, b)) {
                let g = i.gcd(&j);
                let l = i / g * j;
                if l > m || b.is_zero() {
                    continue;
                }
                let c = &a.pow((j / g) as u64) * &b.pow((i / g) as u64);
                acc = &acc * &one_minus(&c, l, m).pow(g as u64);
            }
        }
        Ok(WittVector { m, series: acc })
    }

    /// Coefficients of `-t·f'/f`.
    pub fn ghost(&self) -> Vec<FieldElement> {
        let dlog = &self.series.derivative() * &self.series.invert().expect("unit");
        (1..=self.m).map(|r| -&dlog.coeff(r - 1)).collect()
    }

    /// `V_r(x)(t) = x(t^r)`.
    pub fn verschiebung(&self, r: usize) -> Self {
        assert!(r >= 1, "Verschiebung index must be positive");
        let s = self.series.substitute_power(r).truncated_to(self.m + 1);
        WittVector { m: self.m, series: s }
    }
}

impl fmt::Display for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.series)
    }
}

fn one_minus(a: &FieldElement, i: usize, m: usize) -> TruncatedSeries {
    let field = a.field();
    let one = TruncatedSeries::one(field, m + 1);
    if i > m {
        return one;
    }
    &one - &TruncatedSeries::monomial(a.clone(), i, m + 1)
}

/// `[a] = 1 - a·t`.
pub fn teichmuller(a: &FieldElement, m: usize) -> WittVector {
    WittVector { m, series: one_minus(a, 1, m) }
}

/// `F_r([a]) = [a^r]`.
pub fn frobenius_teichmuller(a: &FieldElement, r: u64, m: usize) -> WittVector {
    teichmuller(&a.pow(r), m)
}

/// The relative unit `u ≡ 1 mod t` at precision `m + 1` as a Witt vector of length `m`.
pub fn witt_from_relative(u: &TruncatedSeries) -> Result<WittVector> {
    if u.precision() < 2 {
        return Err(Error::PrecisionRequest { requested: 2, available: u.precision() });
    }
    WittVector::from_series(u, u.precision() - 1)
}

pub fn witt_to_relative(x: &WittVector) -> TruncatedSeries {
    x.series.clone()
}
