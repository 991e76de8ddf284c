//! Formal sums of Milnor symbols `{a_1, …, a_n}` over `k_m = k[t]/(t^m)`.
//!
//! Sums are kept in normal form: entries are truncated to `t^m`, equal
//! tuples are merged, and zero coefficients and degenerate tuples (an entry
//! equal to 1) are dropped. Equality in `K_n^M(k_m)` is decided exactly only
//! for `n = 1`.

use std::collections::BTreeMap;
use std::fmt;

use crate::cycles::TriangularCycle;
use crate::error::{Error, Result};
use crate::falgebra::{retriangulate, AlgebraElement};
use crate::scalars::{FieldElement, FieldSpec};
use crate::tseries::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorSymbolSum {
    field: FieldSpec,
    n: usize,
    m: usize,
    terms: BTreeMap<Vec<TruncatedSeries>, i64>,
}

impl MilnorSymbolSum {
    pub fn zero(field: FieldSpec, n: usize, m: usize) -> Self {
        MilnorSymbolSum { field, n, m, terms: BTreeMap::new() }
    }

    pub fn symbol(coeff: i64, entries: &[TruncatedSeries], m: usize) -> Result<Self> {
        let field = entries
            .first()
            .map(TruncatedSeries::field)
            .ok_or_else(|| Error::ShapeMismatch("a symbol needs at least one entry".into()))?;
        let mut s = MilnorSymbolSum::zero(field, entries.len(), m);
        s.add_term(coeff, entries)?;
        Ok(s)
    }

    pub fn from_terms<'a>(
        field: FieldSpec,
        n: usize,
        m: usize,
        terms: impl IntoIterator<Item = (i64, &'a [TruncatedSeries])>,
    ) -> Result<Self> {
        let mut s = MilnorSymbolSum::zero(field, n, m);
        for (c, e) in terms {
            s.add_term(c, e)?;
        }
        Ok(s)
    }

    pub fn add_term(&mut self, coeff: i64, entries: &[TruncatedSeries]) -> Result<()> {
        if entries.len() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "symbol with {} entries in a sum of length-{} symbols",
                entries.len(),
                self.n
            )));
        }
        let mut key = Vec::with_capacity(self.n);
        for e in entries {
            if e.field() != self.field {
                return Err(Error::MixedFields(self.field, e.field()));
            }
            let e = e.truncate(self.m)?;
            if !e.is_unit() {
                return Err(Error::NotAUnit(format!("symbol entry {e}")));
            }
            key.push(e);
        }
        if coeff == 0 || key.iter().any(TruncatedSeries::is_one) {
            return Ok(());
        }
        let slot = self.terms.entry(key).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &[TruncatedSeries])> {
        self.terms.iter().map(|(e, &c)| (c, e.as_slice()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields(self.field, other.field));
        }
        if self.n != other.n || self.m != other.m {
            return Err(Error::ShapeMismatch(format!(
                "symbol sums of shape (n={}, m={}) and (n={}, m={})",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (c, e) in other.terms() {
            out.add_term(c, e)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = MilnorSymbolSum::zero(self.field, self.n, self.m);
        if k != 0 {
            out.terms = self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect();
        }
        out
    }

    /// Reduction of every entry modulo `t`.
    pub fn ev0(&self) -> Self {
        let mut out = MilnorSymbolSum::zero(self.field, self.n, 1);
        for (c, e) in self.terms() {
            out.add_term(c, e).expect("entries stay units mod t");
        }
        out
    }

    /// For `n = 1`, the product `Π a^c` in `k_m^×`.
    pub fn k1_normal_form(&self) -> Result<TruncatedSeries> {
        if self.n != 1 {
            return Err(Error::Unsupported(format!("normal form in K_{}^M", self.n)));
        }
        let mut acc = TruncatedSeries::one(self.field, self.m);
        for (c, e) in self.terms() {
            acc = &acc * &e[0].powi(c)?;
        }
        Ok(acc)
    }

    /// For `n = 1`, splits `Π a^c` as `a(0)·u` with `u ≡ 1 mod t`.
    pub fn relative_split(&self) -> Result<(FieldElement, TruncatedSeries)> {
        if self.n != 1 {
            return Err(Error::Unsupported(format!("relative splitting in K_{}^M", self.n)));
        }
        let total = self.k1_normal_form()?;
        let c0 = total.constant_term().clone();
        let u = total.scale(&c0.inv()?);
        Ok((c0, u))
    }
}

impl fmt::Display for MilnorSymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, e)) in self.terms().enumerate() {
            let entries: Vec<String> = e.iter().map(ToString::to_string).collect();
            let body = format!("{{{}}}", entries.join(", "));
            match (k, c) {
                (0, 1) => write!(f, "{body}")?,
                (0, -1) => write!(f, "-{body}")?,
                (0, _) => write!(f, "{c}*{body}")?,
                (_, 1) => write!(f, " + {body}")?,
                (_, -1) => write!(f, " - {body}")?,
                (_, c) if c < 0 => write!(f, " - {}*{body}", -c)?,
                (_, c) => write!(f, " + {c}*{body}")?,
            }
        }
        Ok(())
    }
}

/// Outcome of comparing two symbol sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Equal,
    NotEqual,
    Undecided,
}

/// Exact at `n = 1`; for `n ≥ 2` only literal equality of normal forms is
/// recognized and everything else is undecided.
pub fn decide_equal(a: &MilnorSymbolSum, b: &MilnorSymbolSum) -> Result<Decision> {
    a.check_compatible(b)?;
    if a.n == 1 {
        return Ok(if a.k1_normal_form()? == b.k1_normal_form()? {
            Decision::Equal
        } else {
            Decision::NotEqual
        });
    }
    Ok(if a == b { Decision::Equal } else { Decision::Undecided })
}

/// The image of `Spec B` under the coordinates `beta`, as a triangular cycle
/// with multiplicity `rank(B)/rank(image)`.
pub fn push_graph(domain: &TriangularCycle, beta: &[AlgebraElement]) -> Result<TriangularCycle> {
    let b = domain.algebra()?;
    let one = b.one();
    for (j, x) in beta.iter().enumerate() {
        if !b.is_unit(x) {
            return Err(Error::NotAUnit(format!("coordinate {}", j + 1)));
        }
        if b.norm(&b.sub(x, &one)).is_zero() {
            return Err(Error::ExcludedValue(format!("coordinate {} meets y{}=1", j + 1, j + 1)));
        }
    }
    let image = retriangulate(&b, beta)?;
    if b.rank() % image.rank != 0 {
        return Err(Error::NoRelation(format!(
            "image rank {} does not divide rank {}",
            image.rank,
            b.rank()
        )));
    }
    let e = (b.rank() / image.rank) as u64;
    let cycle = TriangularCycle::new(image.relations, domain.multiplicity() * e)?;
    cycle.validate()?;
    Ok(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_series};

    const Q: FieldSpec = FieldSpec::Rationals;

    fn s(src: &str, m: usize) -> TruncatedSeries {
        parse_series(src, Q, m).unwrap()
    }

    fn sum(terms: &[(i64, &[&str])], m: usize) -> MilnorSymbolSum {
        let n = terms[0].1.len();
        let mut out = MilnorSymbolSum::zero(Q, n, m);
        for (c, e) in terms {
            let e: Vec<_> = e.iter().map(|x| s(x, m)).collect();
            out.add_term(*c, &e).unwrap();
        }
        out
    }

    #[test]
    fn ev0_examples() {
        assert!(sum(&[(1, &["1+t", "2"])], 3).ev0().is_zero());
        assert_eq!(sum(&[(1, &["2", "3"])], 3).ev0(), sum(&[(1, &["2", "3"])], 1));
        assert!(sum(&[(2, &["1+t", "3"]), (-1, &["1+t^2", "3"])], 3).ev0().is_zero());
    }

    #[test]
    fn k1_examples() {
        assert_eq!(sum(&[(1, &["2"]), (1, &["3"])], 3).k1_normal_form().unwrap(), s("6", 3));
        assert!(sum(&[(1, &["1+t"]), (-1, &["1+t"])], 3).is_zero());
        assert_eq!(sum(&[(2, &["1+t"])], 3).k1_normal_form().unwrap(), s("1+2*t+t^2", 3));
        assert!(matches!(sum(&[(1, &["2", "3"])], 3).k1_normal_form(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn relative_split_examples() {
        let (c, u) = sum(&[(1, &["2*(1+t)"])], 3).relative_split().unwrap();
        assert_eq!((c, u), (Q.from_i64(2), s("1+t", 3)));
        let (c, u) = sum(&[(1, &["1+t^2"])], 3).relative_split().unwrap();
        assert_eq!((c, u), (Q.one(), s("1+t^2", 3)));
        assert!(matches!(sum(&[(1, &["2", "3"])], 3).relative_split(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn normalization() {
        let mut x = sum(&[(1, &["2", "3"])], 2);
        x.add_term(1, &[s("2+t^2", 4), s("3", 4)]).unwrap();
        assert_eq!(x.terms().count(), 1);
        assert_eq!(x.terms().next().unwrap().0, 2);
        assert!(matches!(x.add_term(1, &[s("t", 2), s("2", 2)]), Err(Error::NotAUnit(_))));
        assert_eq!(x.to_string(), "2*{2, 3}");
        assert_eq!(decide_equal(&x, &x.scale(1)).unwrap(), Decision::Equal);
        assert_eq!(decide_equal(&x, &x.scale(2)).unwrap(), Decision::Undecided);
        let a = sum(&[(1, &["2"]), (1, &["3"])], 2);
        assert_eq!(decide_equal(&a, &sum(&[(1, &["6"])], 2)).unwrap(), Decision::Equal);
        assert_eq!(decide_equal(&a, &sum(&[(1, &["5"])], 2)).unwrap(), Decision::NotEqual);
    }

    fn domain() -> TriangularCycle {
        TriangularCycle::new(vec![parse_poly("y1^2-(1+t)", Q, 1, false, 6).unwrap()], 1).unwrap()
    }

    #[test]
    fn push_graph_examples() {
        let d = domain();
        let b = d.algebra().unwrap();
        let y = b.generator(0).unwrap();
        assert_eq!(push_graph(&d, std::slice::from_ref(&y)).unwrap(), d);

        let y4 = b.add(&y, &b.constant(&s("4", 6)));
        let c = push_graph(&d, &[y4]).unwrap();
        assert_eq!(c.to_string(), "{y1^2-8*y1+15-t}");
        assert_eq!(c.multiplicity(), 1);

        let c = push_graph(&d, &[y.clone(), y]).unwrap();
        assert_eq!(c.to_string(), "{y1^2-1-t, y2-y1}");
        assert_eq!(c.multiplicity(), 1);

        let c = push_graph(&d, &[b.constant(&s("2+t", 6))]).unwrap();
        assert_eq!(c.to_string(), "2*{y1-2-t}");
        assert!(matches!(push_graph(&d, &[b.constant(&s("t", 6))]), Err(Error::NotAUnit(_))));
    }
}
