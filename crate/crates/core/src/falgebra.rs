//! Finite free algebras `B = k_N[y_1..y_i]/(P_1..P_i)` of a triangular tower.
//!
//! The monomial basis `{y^α : α_j < d_j}` is enumerated in mixed radix with
//! `y_1` varying fastest, so the basis of a level-`j` subalgebra is a prefix
//! of the basis of every algebra above it.

use crate::error::{Error, Result};
use crate::linalg::{self, SeriesMatrix};
use crate::mpoly::{Monomial, MultiPoly};
use crate::scalars::FieldSpec;
use crate::tseries::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    field: FieldSpec,
    nvars: usize,
    precision: usize,
    relations: Vec<MultiPoly>,
    degrees: Vec<u32>,
    basis: Vec<Monomial>,
}

/// Coordinates over the monomial basis of a [`FiniteAlgebra`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AlgebraElement {
    pub coords: Vec<TruncatedSeries>,
}

impl AlgebraElement {
    pub fn precision(&self) -> usize {
        self.coords.iter().map(TruncatedSeries::precision).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(TruncatedSeries::is_zero)
    }
}

impl FiniteAlgebra {
    /// The algebra of a tower prefix. Each `relations[j]` lives in `nvars`
    /// variables, is monic in `y_{j+1}` and involves no later variable.
    pub fn new(
        field: FieldSpec,
        nvars: usize,
        precision: usize,
        relations: Vec<MultiPoly>,
    ) -> Result<Self> {
        if relations.len() > nvars {
            return Err(Error::ShapeMismatch(format!(
                "{} relations in {nvars} variables",
                relations.len()
            )));
        }
        let mut degrees = Vec::with_capacity(relations.len());
        let mut prec = precision;
        for (j, rel) in relations.iter().enumerate() {
            if rel.nvars() != nvars || rel.field() != field {
                return Err(Error::ShapeMismatch(format!(
                    "relation P{} does not live in the ambient ring",
                    j + 1
                )));
            }
            if (j + 1..nvars).any(|v| rel.involves(v)) {
                return Err(Error::ShapeMismatch(format!(
                    "relation P{} involves a later variable",
                    j + 1
                )));
            }
            if !rel.is_monic_in(j) {
                return Err(Error::NotMonic(j));
            }
            let d = rel.degree_in(j).unwrap_or(0);
            if d == 0 {
                return Err(Error::ShapeMismatch(format!("relation P{} is constant", j + 1)));
            }
            degrees.push(d);
            prec = prec.min(rel.precision());
        }
        let rank: usize = degrees.iter().map(|&d| d as usize).product();
        let mut basis = Vec::with_capacity(rank);
        for idx in 0..rank {
            let mut e = vec![0u32; nvars];
            let mut rest = idx;
            for (j, &d) in degrees.iter().enumerate() {
                e[j] = (rest % d as usize) as u32;
                rest /= d as usize;
            }
            basis.push(Monomial(e));
        }
        let relations = relations
            .into_iter()
            .map(|r| r.truncate(prec))
            .collect::<Result<_>>()?;
        Ok(FiniteAlgebra { field, nvars, precision: prec, relations, degrees, basis })
    }

    /// The rank-one algebra `k_N` itself.
    pub fn base(field: FieldSpec, nvars: usize, precision: usize) -> Self {
        FiniteAlgebra::new(field, nvars, precision, vec![]).expect("no relations to check")
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

    pub fn level(&self) -> usize {
        self.relations.len()
    }

    pub fn relations(&self) -> &[MultiPoly] {
        &self.relations
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The algebra of the first `level` relations.
    pub fn prefix(&self, level: usize) -> FiniteAlgebra {
        FiniteAlgebra::new(
            self.field,
            self.nvars,
            self.precision,
            self.relations[..level].to_vec(),
        )
        .expect("prefix of a valid tower")
    }

    fn index_of(&self, mono: &Monomial) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (j, &d) in self.degrees.iter().enumerate() {
            idx += mono.0[j] as usize * stride;
            stride *= d as usize;
        }
        idx
    }

    /// Normal form of `f` as a polynomial: every `y_j`-degree below `d_j`.
    pub fn reduce_poly(&self, f: &MultiPoly) -> Result<MultiPoly> {
        let mut r = if f.nvars() < self.nvars { f.embed(self.nvars) } else { f.clone() };
        for (j, rel) in self.relations.iter().enumerate().rev() {
            if r.degree_in(j).is_some_and(|d| d >= self.degrees[j]) {
                r = r.divide_monic(rel, j)?.1;
            }
        }
        Ok(r)
    }

    pub fn reduce(&self, f: &MultiPoly) -> Result<AlgebraElement> {
        let r = self.reduce_poly(f)?;
        if (self.level()..self.nvars).any(|v| r.involves(v)) {
            return Err(Error::ShapeMismatch(format!(
                "polynomial involves variables beyond y{}",
                self.level()
            )));
        }
        let prec = r.precision();
        let mut coords = vec![TruncatedSeries::zero(self.field, prec); self.rank()];
        for (mono, c) in r.terms() {
            coords[self.index_of(mono)] = c.clone();
        }
        Ok(AlgebraElement { coords })
    }

    pub fn to_poly(&self, u: &AlgebraElement) -> MultiPoly {
        let prec = u.precision().min(self.precision);
        let terms = self.basis.iter().cloned().zip(u.coords.iter().cloned());
        MultiPoly::from_terms(self.field, self.nvars, prec, terms).expect("basis shape")
    }

    pub fn constant(&self, c: &TruncatedSeries) -> AlgebraElement {
        let mut coords = vec![TruncatedSeries::zero(self.field, c.precision()); self.rank()];
        coords[0] = c.clone();
        AlgebraElement { coords }
    }

    pub fn one(&self) -> AlgebraElement {
        self.constant(&TruncatedSeries::one(self.field, self.precision))
    }

    pub fn generator(&self, var: usize) -> Result<AlgebraElement> {
        self.reduce(&MultiPoly::var(self.field, self.nvars, self.precision, var))
    }

    pub fn add(&self, u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { coords: u.coords.iter().zip(&v.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { coords: u.coords.iter().zip(&v.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
        self.reduce(&(&self.to_poly(u) * &self.to_poly(v)))
            .expect("product of reduced elements stays in the algebra")
    }

    pub fn pow(&self, u: &AlgebraElement, k: u32) -> AlgebraElement {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, u);
        }
        acc
    }

    /// Matrix of `x ↦ b·x`; column `k` holds the image of the `k`-th basis monomial.
    pub fn mult_matrix(&self, b: &AlgebraElement) -> SeriesMatrix {
        let bp = self.to_poly(b);
        let columns = self
            .basis
            .iter()
            .map(|mono| {
                let shifted = &bp * &MultiPoly::term(mono.clone(), TruncatedSeries::one(self.field, self.precision));
                self.reduce(&shifted).expect("stays in the algebra").coords
            })
            .collect();
        SeriesMatrix::from_columns(self.rank(), columns)
    }

    pub fn norm(&self, b: &AlgebraElement) -> TruncatedSeries {
        self.mult_matrix(b).det()
    }

    pub fn is_unit(&self, b: &AlgebraElement) -> bool {
        self.norm(b).is_unit()
    }

    pub fn inverse(&self, b: &AlgebraElement) -> Result<AlgebraElement> {
        let one = self.one();
        match linalg::solve(&self.mult_matrix(b), &one.coords)? {
            Some(sol) if sol.consumed == 0 => Ok(AlgebraElement { coords: sol.x }),
            _ => Err(Error::NotAUnit(format!("{} in the tower algebra", self.to_poly(b)))),
        }
    }

    /// The monic relation of least degree satisfied by `b` over the
    /// subalgebra spanned by `sub`, found by solving for `b^d` in the span of
    /// `{b^e·s : e < d, s ∈ sub}` for increasing `d`.
    pub fn minimal_polynomial(
        &self,
        b: &AlgebraElement,
        sub: &[AlgebraElement],
    ) -> Result<MinimalPolynomial> {
        let q = sub.len();
        if q == 0 || !self.rank().is_multiple_of(q) {
            return Err(Error::NoRelation(format!(
                "sub-basis of size {q} cannot span a subalgebra of an algebra of rank {}",
                self.rank()
            )));
        }
        let max_degree = self.rank() / q;
        let mut power = self.one();
        let mut span: Vec<Vec<TruncatedSeries>> = Vec::new();
        for d in 1..=max_degree {
            for s in sub {
                span.push(self.mul(&power, s).coords);
            }
            power = self.mul(&power, b);
            let matrix = SeriesMatrix::from_columns(self.rank(), span.clone());
            if let Some(sol) = linalg::solve(&matrix, &power.coords)? {
                let coeffs = sol.x.chunks(q).map(|c| c.iter().map(|x| -x).collect()).collect();
                return Ok(MinimalPolynomial { degree: d as u32, coeffs, consumed: sol.consumed });
            }
        }
        Err(Error::NoRelation(format!(
            "no monic relation of degree at most {max_degree}"
        )))
    }
}

/// `μ(x) = x^d + Σ_{e<d} Σ_l coeffs[e][l]·s_l·x^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalPolynomial {
    pub degree: u32,
    pub coeffs: Vec<Vec<TruncatedSeries>>,
    pub consumed: usize,
}

impl MinimalPolynomial {
    /// Writes `μ` as a polynomial in `y_var`, with `sub_monos[l]` standing for `s_l`.
    pub fn to_poly(&self, sub_monos: &[Monomial], var: usize, field: FieldSpec, nvars: usize) -> MultiPoly {
        let prec = self
            .coeffs
            .iter()
            .flatten()
            .map(TruncatedSeries::precision)
            .min()
            .unwrap_or(1);
        let mut terms = vec![(Monomial::var(nvars, var, self.degree), TruncatedSeries::one(field, prec))];
        for (e, row) in self.coeffs.iter().enumerate() {
            for (l, c) in row.iter().enumerate() {
                let mut mono = sub_monos[l].clone();
                mono.0[var] += e as u32;
                terms.push((mono, c.clone()));
            }
        }
        MultiPoly::from_terms(field, nvars, prec, terms).expect("shapes agree")
    }
}

/// Triangular presentation of the subalgebra generated by `coords`, built
/// from successive minimal polynomials inside `algebra`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retriangulation {
    pub relations: Vec<MultiPoly>,
    pub rank: usize,
    pub consumed: usize,
}

pub fn retriangulate(algebra: &FiniteAlgebra, coords: &[AlgebraElement]) -> Result<Retriangulation> {
    let nvars = coords.len();
    let field = algebra.field();
    let mut sub = vec![algebra.one()];
    let mut sub_monos = vec![Monomial::one(nvars)];
    let mut relations = Vec::with_capacity(nvars);
    let mut consumed = 0;
    for (j, b) in coords.iter().enumerate() {
        let mp = algebra.minimal_polynomial(b, &sub)?;
        consumed = consumed.max(mp.consumed);
        relations.push(mp.to_poly(&sub_monos, j, field, nvars));
        let mut next = Vec::with_capacity(sub.len() * mp.degree as usize);
        let mut next_monos = Vec::with_capacity(next.capacity());
        let mut power = algebra.one();
        for e in 0..mp.degree {
            for (s, mono) in sub.iter().zip(&sub_monos) {
                next.push(algebra.mul(s, &power));
                let mut m = mono.clone();
                m.0[j] = e;
                next_monos.push(m);
            }
            power = algebra.mul(&power, b);
        }
        sub = next;
        sub_monos = next_monos;
    }
    Ok(Retriangulation { relations, rank: sub.len(), consumed })
}
