//! Multivariate polynomials in `y_1, …, y_n` (and possibly the auxiliary
//! variable `y'`) with coefficients in `k[t]/(t^N)`.
//!
//! Variables are addressed by 0-based index: `y_1` is variable `0`. The
//! auxiliary variable of a reduction certificate is the last variable.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::{FieldElement, FieldSpec};
use crate::tseries::{join_signed, TruncatedSeries, Valuation};

/// An exponent vector. Monomials are ordered lexicographically with the
/// last variable most significant (`y_1 < y_2 < … < y_n < y'`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, var: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = exp;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

/// Which codimension-one face of `□ = P^1 ∖ {1}` to restrict to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Eps {
    Zero,
    Infinity,
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eps::Zero => write!(f, "0"),
            Eps::Infinity => write!(f, "inf"),
        }
    }
}

/// A polynomial over `k[t]/(t^N)`. No zero coefficients are stored and
/// every coefficient has the polynomial's precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: FieldSpec,
    nvars: usize,
    precision: usize,
    terms: BTreeMap<Monomial, TruncatedSeries>,
}

impl MultiPoly {
    pub fn zero(field: FieldSpec, nvars: usize, precision: usize) -> Self {
        MultiPoly { field, nvars, precision, terms: BTreeMap::new() }
    }

    pub fn constant(c: TruncatedSeries, nvars: usize) -> Self {
        let mut p = Self::zero(c.field(), nvars, c.precision());
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(field: FieldSpec, nvars: usize, precision: usize) -> Self {
        Self::constant(TruncatedSeries::one(field, precision), nvars)
    }

    pub fn from_int(field: FieldSpec, nvars: usize, precision: usize, n: i64) -> Self {
        Self::constant(TruncatedSeries::from_ints(field, &[n], precision), nvars)
    }

    pub fn var(field: FieldSpec, nvars: usize, precision: usize, var: usize) -> Self {
        Self::term(Monomial::var(nvars, var, 1), TruncatedSeries::one(field, precision))
    }

    pub fn term(mono: Monomial, c: TruncatedSeries) -> Self {
        let mut p = Self::zero(c.field(), mono.0.len(), c.precision());
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    /// Collects terms, summing repeated monomials and truncating every
    /// coefficient to the smallest precision present (or `precision`).
    pub fn from_terms(
        field: FieldSpec,
        nvars: usize,
        precision: usize,
        terms: impl IntoIterator<Item = (Monomial, TruncatedSeries)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<Monomial, TruncatedSeries> = BTreeMap::new();
        let mut prec = precision;
        for (m, c) in terms {
            if m.0.len() != nvars {
                return Err(Error::ShapeMismatch(format!(
                    "monomial with {} variables in a polynomial with {nvars}",
                    m.0.len()
                )));
            }
            if c.field() != field {
                return Err(Error::MixedFields(field, c.field()));
            }
            prec = prec.min(c.precision());
            match acc.get_mut(&m) {
                Some(old) => *old = &*old + &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Ok(Self::assemble(field, nvars, prec, acc))
    }

    fn assemble(
        field: FieldSpec,
        nvars: usize,
        precision: usize,
        terms: BTreeMap<Monomial, TruncatedSeries>,
    ) -> Self {
        let terms = terms
            .into_iter()
            .map(|(m, c)| (m, c.truncated_to(precision)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        MultiPoly { field, nvars, precision, terms }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &TruncatedSeries)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> TruncatedSeries {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(self.field, self.precision))
    }

    /// The constant coefficient when the polynomial involves no variable.
    pub fn as_constant(&self) -> Option<TruncatedSeries> {
        match self.terms.len() {
            0 => Some(TruncatedSeries::zero(self.field, self.precision)),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Coefficient of `y_var^k`, as a polynomial not involving `y_var`.
    pub fn coefficient_in(&self, var: usize, k: u32) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[var] == k)
            .map(|(m, c)| {
                let mut e = m.clone();
                e.0[var] = 0;
                (e, c.clone())
            })
            .collect();
        MultiPoly { field: self.field, nvars: self.nvars, precision: self.precision, terms }
    }

    pub fn leading_coeff_in(&self, var: usize) -> MultiPoly {
        match self.degree_in(var) {
            Some(d) => self.coefficient_in(var, d),
            None => self.clone(),
        }
    }

    pub fn is_monic_in(&self, var: usize) -> bool {
        if self.is_zero() {
            return false;
        }
        self.leading_coeff_in(var)
            .as_constant()
            .is_some_and(|c| c.is_one())
    }

    fn check_shape(&self, other: &MultiPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields(self.field, other.field));
        }
        if self.nvars != other.nvars {
            return Err(Error::ShapeMismatch(format!(
                "polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    fn assert_shape(&self, other: &MultiPoly) {
        if let Err(e) = self.check_shape(other) {
            panic!("{e}");
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_shape(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_shape(other)?;
        Ok(self * other)
    }

    /// Multiplication by a coefficient series.
    pub fn scale(&self, c: &TruncatedSeries) -> MultiPoly {
        let prec = self.precision.min(c.precision());
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        Self::assemble(self.field, self.nvars, prec, terms)
    }

    pub fn scale_int(&self, n: i64) -> MultiPoly {
        let c = self.field.from_i64(n);
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a.scale(&c))).collect();
        Self::assemble(self.field, self.nvars, self.precision, terms)
    }

    pub fn scale_scalar(&self, c: &FieldElement) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a.scale(c))).collect();
        Self::assemble(self.field, self.nvars, self.precision, terms)
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = Self::one(self.field, self.nvars, self.precision);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Reduction of every coefficient modulo `t^m`.
    pub fn truncate(&self, m: usize) -> Result<MultiPoly> {
        if m == 0 || m > self.precision {
            return Err(Error::PrecisionRequest { requested: m, available: self.precision });
        }
        Ok(Self::assemble(self.field, self.nvars, m, self.terms.clone()))
    }

    /// Same polynomial viewed in `nvars` variables (only enlarging).
    pub fn embed(&self, nvars: usize) -> MultiPoly {
        assert!(nvars >= self.nvars, "embed can only add variables");
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(nvars, 0);
                (Monomial(e), c.clone())
            })
            .collect();
        MultiPoly { field: self.field, nvars, precision: self.precision, terms }
    }

    /// Division by `g`, monic in `y_var`: returns `(q, r)` with `f = q·g + r`
    /// and `deg_{y_var} r < deg_{y_var} g`.
    pub fn divide_monic(&self, g: &MultiPoly, var: usize) -> Result<(MultiPoly, MultiPoly)> {
        self.check_shape(g)?;
        if !g.is_monic_in(var) {
            return Err(Error::NotMonic(var));
        }
        let dg = g.degree_in(var).unwrap_or(0);
        let prec = self.precision.min(g.precision);
        let mut q = MultiPoly::zero(self.field, self.nvars, prec);
        let mut r = self.truncate(prec)?;
        while let Some(dr) = r.degree_in(var) {
            if dr < dg {
                break;
            }
            let lc = r.coefficient_in(var, dr);
            let shift = MultiPoly::term(
                Monomial::var(self.nvars, var, dr - dg),
                TruncatedSeries::one(self.field, prec),
            );
            let term = &lc * &shift;
            r = &r - &(&term * g);
            q = &q + &term;
        }
        Ok((q, r))
    }

    /// Replaces `y_var` by `s`, which must not involve `y_j` for `j >= var`.
    pub fn substitute(&self, var: usize, s: &MultiPoly) -> Result<MultiPoly> {
        self.check_shape(s)?;
        if (var..self.nvars).any(|j| s.involves(j)) {
            return Err(Error::ShapeMismatch(format!(
                "substitution for y{} may only involve earlier variables",
                var + 1
            )));
        }
        Ok(self.substitute_unchecked(var, s))
    }

    /// Substitution without the triangularity check; `s` must not involve `y_var`.
    pub(crate) fn substitute_unchecked(&self, var: usize, s: &MultiPoly) -> MultiPoly {
        debug_assert!(!s.involves(var));
        let prec = self.precision.min(s.precision);
        let mut acc = MultiPoly::zero(self.field, self.nvars, prec);
        let Some(d) = self.degree_in(var) else {
            return acc;
        };
        for k in (0..=d).rev() {
            acc = &(&acc * s) + &self.coefficient_in(var, k);
        }
        acc
    }

    /// Restriction to the face `y_var = eps`. For `eps = ∞` this is the
    /// leading `y_var`-coefficient: substituting `y_var = 1/u`, clearing the
    /// denominator `u^{deg}` and setting `u = 0`.
    pub fn face_at(&self, var: usize, eps: Eps) -> MultiPoly {
        match eps {
            Eps::Zero => self.coefficient_in(var, 0),
            Eps::Infinity => self.leading_coeff_in(var),
        }
    }

    /// Additive Gauss norm: the minimum `t`-adic valuation of the coefficients.
    pub fn gauss_valuation(&self) -> Valuation {
        self.terms
            .values()
            .map(TruncatedSeries::valuation)
            .min()
            .unwrap_or(Valuation::AtLeast(self.precision))
    }

    pub fn map_coeffs(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> MultiPoly {
        let mut prec = self.precision;
        let terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let c = f(c);
                prec = prec.min(c.precision());
                (m.clone(), c)
            })
            .collect();
        Self::assemble(self.field, self.nvars, prec, terms)
    }

    /// Display with explicit variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayPoly { poly: self, names }
    }

    fn render(&self, names: &[String]) -> String {
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        names[v].clone()
                    } else {
                        format!("{}^{e}", names[v])
                    }
                })
                .collect();
            let mono = mono.join("*");
            let sterms = c.signed_terms();
            if mono.is_empty() {
                pieces.extend(sterms);
            } else if sterms.len() == 1 {
                let (neg, body) = &sterms[0];
                let body = if body == "1" { mono } else { format!("{body}*{mono}") };
                pieces.push((*neg, body));
            } else {
                pieces.push((false, format!("({})*{mono}", join_signed(&sterms))));
            }
        }
        join_signed(&pieces)
    }
}

/// Variable names `y1..yn`, followed by `yp` when `prime` is set.
pub fn var_names(n: usize, prime: bool) -> Vec<String> {
    let mut names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    if prime {
        names.push("yp".to_string());
    }
    names
}

struct DisplayPoly<'a> {
    poly: &'a MultiPoly,
    names: &'a [String],
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.render(self.names))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&var_names(self.nvars, false)))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_shape(rhs);
        let prec = self.precision.min(rhs.precision);
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            match terms.get_mut(m) {
                Some(old) => *old = &*old + c,
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        MultiPoly::assemble(self.field, self.nvars, prec, terms)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            precision: self.precision,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_shape(rhs);
        let prec = self.precision.min(rhs.precision);
        let mut terms: BTreeMap<Monomial, TruncatedSeries> = BTreeMap::new();
        for (ma, a) in &self.terms {
            for (mb, b) in &rhs.terms {
                let m = ma.times(mb);
                let c = a * b;
                match terms.get_mut(&m) {
                    Some(old) => *old = &*old + &c,
                    None => {
                        terms.insert(m, c);
                    }
                }
            }
        }
        MultiPoly::assemble(self.field, self.nvars, prec, terms)
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn p(s: &str, n: usize) -> MultiPoly {
        parse_poly(s, Q, n, false, 6).unwrap()
    }

    fn pp(s: &str, n: usize) -> MultiPoly {
        parse_poly(s, Q, n, true, 6).unwrap()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&p("y1+1", 1) * &p("y1-1", 1), p("y1^2-1", 1));
        let a = parse_poly("y1+t", Q, 1, false, 2).unwrap();
        let t = parse_poly("t", Q, 1, false, 2).unwrap();
        assert_eq!(&a * &t, parse_poly("t*y1", Q, 1, false, 2).unwrap());
        let f = p("(1+t)*y1^2-3*y1", 1);
        assert_eq!(&f * &MultiPoly::one(Q, 1, 6), f);
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(p("y1", 1).checked_mul(&p("y1", 2)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn remainder_theorem() {
        let (q, r) = p("y1^2", 1).divide_monic(&p("y1-5", 1), 0).unwrap();
        assert_eq!(q, p("y1+5", 1));
        assert_eq!(r, p("25", 1));
    }

    #[test]
    fn division_with_t() {
        let f = p("t+y1^2", 1);
        let g = p("y1-1", 1);
        let (q, r) = f.divide_monic(&g, 0).unwrap();
        assert_eq!(q, p("y1+1", 1));
        assert_eq!(r, p("1+t", 1));
        assert_eq!(&(&q * &g) + &r, f);
    }

    #[test]
    fn division_in_second_variable() {
        let f = p("y2^2+y1*y2", 2);
        let g = p("y2-y1", 2);
        let (q, r) = f.divide_monic(&g, 1).unwrap();
        assert_eq!(q, p("y2+2*y1", 2));
        assert_eq!(r, p("2*y1^2", 2));
    }

    #[test]
    fn division_requires_monic() {
        assert_eq!(p("y1^2", 1).divide_monic(&p("2*y1-1", 1), 0), Err(Error::NotMonic(0)));
        assert_eq!(p("y1^2", 1).divide_monic(&p("t*y1^2+y1", 1), 0), Err(Error::NotMonic(0)));
    }

    #[test]
    fn substitution_examples() {
        let f = p("y2-y1-3", 2);
        let s = p("-(1+t)", 2);
        assert_eq!(f.substitute(0, &s).unwrap(), p("y2-2+t", 2));
        assert!(p("y1^2", 1).substitute(0, &p("0", 1)).unwrap().is_zero());
        assert!(matches!(f.substitute(0, &p("y2", 2)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn faces() {
        let f = p("y1^2-3*y1+1+t", 1);
        assert_eq!(f.face_at(0, Eps::Zero), p("1+t", 1));
        assert_eq!(f.face_at(0, Eps::Infinity), p("1", 1));
        // Q = P(y) - (y-1)(y-c) y'  with P = y^2-3y+(1+t), c = 1+t
        let q = &pp("y1^2-3*y1+1+t", 1) - &(&pp("(y1-1)*(y1-1-t)", 1) * &pp("yp", 1));
        assert_eq!(q.face_at(1, Eps::Infinity), pp("-(y1-1)*(y1-1-t)", 1));
        assert_eq!(q.face_at(1, Eps::Zero), pp("y1^2-3*y1+1+t", 1));
        assert_eq!(q.face_at(0, Eps::Zero), pp("(1+t)*(1-yp)", 1));
        assert_eq!(q.face_at(0, Eps::Infinity), pp("1-yp", 1));
    }

    #[test]
    fn gauss_valuations() {
        assert_eq!(p("y1+t*y2", 2).gauss_valuation(), Valuation::Finite(0));
        assert_eq!(p("t^2*y1+t^3", 1).gauss_valuation(), Valuation::Finite(2));
        let z = MultiPoly::zero(Q, 1, 4);
        assert_eq!(z.gauss_valuation(), Valuation::AtLeast(4));
    }

    #[test]
    fn display_order() {
        assert_eq!(p("3*y2+(1+t)*y1^2*y2+t^2", 2).to_string(), "(1+t)*y1^2*y2+3*y2+t^2");
        assert_eq!(p("y1-(1+t)", 1).to_string(), "y1-1-t");
        assert_eq!(pp("y1*yp-yp", 1).display_with(&var_names(1, true)).to_string(), "y1*yp-yp");
    }
}
