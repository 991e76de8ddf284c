//! Triangular cycles `{P_1 = … = P_n = 0}` on `Spf(k[[t]]) × □^n`.

use std::fmt;

use crate::error::{Error, Result, Violation, ViolationKind};
use crate::falgebra::FiniteAlgebra;
use crate::mpoly::{var_names, Eps, MultiPoly};
use crate::scalars::FieldSpec;
use crate::tseries::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularCycle {
    field: FieldSpec,
    precision: usize,
    polys: Vec<MultiPoly>,
    multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaceStatus {
    Empty,
    Nonempty(String),
}

/// Emptiness of the `2n` faces `y_i = 0` and `y_i = ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceReport {
    /// `(level, face, status)` with 1-based levels.
    pub faces: Vec<(usize, Eps, FaceStatus)>,
}

impl FaceReport {
    pub fn all_empty(&self) -> bool {
        self.faces.iter().all(|(_, _, s)| *s == FaceStatus::Empty)
    }
}

impl TriangularCycle {
    /// Checks shapes only: `polys[i]` lives in `n` variables and involves
    /// no `y_j` with `j > i + 1`. Admissibility is [`TriangularCycle::validate`].
    pub fn new(polys: Vec<MultiPoly>, multiplicity: u64) -> Result<Self> {
        let Some(first) = polys.first() else {
            return Err(Error::ShapeMismatch("a cycle needs at least one relation".into()));
        };
        let field = first.field();
        let n = polys.len();
        if multiplicity == 0 {
            return Err(Error::ShapeMismatch("multiplicity must be positive".into()));
        }
        for (i, p) in polys.iter().enumerate() {
            if p.field() != field {
                return Err(Error::MixedFields(field, p.field()));
            }
            if p.nvars() != n {
                return Err(Error::ShapeMismatch(format!(
                    "P{} has {} variables, expected {n}",
                    i + 1,
                    p.nvars()
                )));
            }
            if (i + 1..n).any(|v| p.involves(v)) {
                return Err(Error::ShapeMismatch(format!(
                    "P{} involves a variable beyond y{}",
                    i + 1,
                    i + 1
                )));
            }
        }
        let precision = polys.iter().map(MultiPoly::precision).min().unwrap();
        let polys = polys.into_iter().map(|p| p.truncate(precision)).collect::<Result<_>>()?;
        Ok(TriangularCycle { field, precision, polys, multiplicity })
    }

    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    pub fn with_multiplicity(&self, multiplicity: u64) -> Self {
        TriangularCycle { multiplicity, ..self.clone() }
    }

    /// `(deg_{y_1} P_1, …, deg_{y_n} P_n)`.
    pub fn degree_vector(&self) -> Vec<u32> {
        self.polys
            .iter()
            .enumerate()
            .map(|(i, p)| p.degree_in(i).unwrap_or(0))
            .collect()
    }

    /// The algebra of the first `level` relations.
    pub fn algebra_at(&self, level: usize) -> Result<FiniteAlgebra> {
        FiniteAlgebra::new(self.field, self.n(), self.precision, self.polys[..level].to_vec())
    }

    pub fn algebra(&self) -> Result<FiniteAlgebra> {
        self.algebra_at(self.n())
    }

    /// Checks admissibility level by level and reports the faces.
    ///
    /// The value of `P_i` at `y_i = 1` is only required to be a
    /// non-zero-divisor of `R^{(i-1)}` at the working precision: graph
    /// cycles `y - (1+t)` are admissible although `1 - (1+t)` is not a unit.
    pub fn validate(&self) -> Result<FaceReport> {
        let fail = |level: usize, kind| Err(Error::ValidationFailure(Violation { level, kind }));
        let degrees = self.degree_vector();
        for (i, p) in self.polys.iter().enumerate() {
            let level = i + 1;
            if p.is_zero() {
                return fail(level, ViolationKind::ZeroRelation);
            }
            if !p.is_monic_in(i) || degrees[i] == 0 {
                return fail(level, ViolationKind::NotMonic);
            }
            for j in 0..i {
                if let Some(degree) = p.degree_in(j) {
                    if degree >= degrees[j] {
                        return fail(
                            level,
                            ViolationKind::DegreeBound { var: j + 1, degree, bound: degrees[j] },
                        );
                    }
                }
            }
            let below = self.algebra_at(i)?;
            let c0 = below.reduce(&p.face_at(i, Eps::Zero))?;
            if !below.is_unit(&c0) {
                return fail(level, ViolationKind::ConstantTermNotUnit);
            }
            let at_one = p.substitute(i, &MultiPoly::one(self.field, self.n(), self.precision))?;
            if below.norm(&below.reduce(&at_one)?).is_zero() {
                return fail(level, ViolationKind::VanishesAtOne);
            }
        }
        Ok(self.face_report())
    }

    /// Face emptiness without failing on inadmissible input.
    pub fn face_report(&self) -> FaceReport {
        let mut faces = Vec::with_capacity(2 * self.n());
        for (i, p) in self.polys.iter().enumerate() {
            let zero = match self.algebra_at(i) {
                Ok(below) => {
                    let c0 = p.face_at(i, Eps::Zero);
                    match below.reduce(&c0) {
                        Ok(e) if below.is_unit(&e) => FaceStatus::Empty,
                        _ => FaceStatus::Nonempty(format!("constant term {c0} is not a unit")),
                    }
                }
                Err(e) => FaceStatus::Nonempty(e.to_string()),
            };
            let lead = p.face_at(i, Eps::Infinity);
            let inf = match lead.as_constant() {
                Some(c) if c.is_unit() => FaceStatus::Empty,
                _ => FaceStatus::Nonempty(format!("leading coefficient {lead} is not a unit")),
            };
            faces.push((i + 1, Eps::Zero, zero));
            faces.push((i + 1, Eps::Infinity, inf));
        }
        FaceReport { faces }
    }

    /// Monic, degree-reduced generators truncated to `t^m`.
    pub fn canonical(&self, m: usize) -> Result<Vec<MultiPoly>> {
        if m > self.precision || m == 0 {
            return Err(Error::PrecisionRequest { requested: m, available: self.precision });
        }
        let normal = normalize(&self.polys)?;
        normal.polys.iter().map(|p| p.truncate(m)).collect()
    }
}

impl fmt::Display for TriangularCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = var_names(self.n(), false);
        if self.multiplicity != 1 {
            write!(f, "{}*", self.multiplicity)?;
        }
        write!(f, "{{")?;
        for (i, p) in self.polys.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", p.display_with(&names))?;
        }
        write!(f, "}}")
    }
}

/// The graph cycle `Γ_a = {y_i = a_i}`.
pub fn graph(a: &[TruncatedSeries]) -> Result<TriangularCycle> {
    let Some(first) = a.first() else {
        return Err(Error::ShapeMismatch("graph of an empty tuple".into()));
    };
    let field = first.field();
    let n = a.len();
    let mut polys = Vec::with_capacity(n);
    for (i, ai) in a.iter().enumerate() {
        if ai.field() != field {
            return Err(Error::MixedFields(field, ai.field()));
        }
        if !ai.is_unit() {
            return Err(Error::NotAUnit(format!("graph coordinate a{} = {ai}", i + 1)));
        }
        if (ai - &TruncatedSeries::one(field, ai.precision())).is_zero() {
            return Err(Error::ExcludedValue(format!("graph coordinate a{} = 1", i + 1)));
        }
        let y = MultiPoly::var(field, n, ai.precision(), i);
        polys.push(&y - &MultiPoly::constant(ai.clone(), n));
    }
    TriangularCycle::new(polys, 1)
}

/// Scales each generator monic in its top variable and reduces its
/// coefficients against the earlier relations.
pub fn normalize(gens: &[MultiPoly]) -> Result<TriangularCycle> {
    let shaped = TriangularCycle::new(gens.to_vec(), 1)?;
    let (field, n, prec) = (shaped.field, shaped.n(), shaped.precision);
    let mut done: Vec<MultiPoly> = Vec::with_capacity(n);
    for (i, g) in shaped.polys.iter().enumerate() {
        let below = FiniteAlgebra::new(field, n, prec, done.clone())?;
        let g = below.reduce_poly(g)?;
        let Some(d) = g.degree_in(i).filter(|&d| d > 0) else {
            return Err(Error::ShapeMismatch(format!("generator {} does not involve y{}", i + 1, i + 1)));
        };
        let lead = g.coefficient_in(i, d);
        let inv = match lead.as_constant() {
            Some(c) => MultiPoly::constant(
                c.invert().map_err(|_| Error::NotAUnit(format!("leading coefficient {c} of generator {}", i + 1)))?,
                n,
            ),
            None => {
                let e = below.reduce(&lead)?;
                below
                    .inverse(&e)
                    .map(|u| below.to_poly(&u))
                    .map_err(|_| Error::NotAUnit(format!("leading coefficient {lead} of generator {}", i + 1)))?
            }
        };
        let p = below.reduce_poly(&(&g * &inv))?;
        done.push(p);
    }
    TriangularCycle::new(done, 1)
}

/// Equality of canonical generators modulo `t^m`, together with multiplicity.
pub fn mod_i_equivalent(c1: &TriangularCycle, c2: &TriangularCycle, m: usize) -> Result<bool> {
    if c1.field != c2.field {
        return Err(Error::MixedFields(c1.field, c2.field));
    }
    if c1.n() != c2.n() {
        return Err(Error::ShapeMismatch(format!("cycles of dimension {} and {}", c1.n(), c2.n())));
    }
    let (a, b) = (c1.canonical(m)?, c2.canonical(m)?);
    Ok(c1.multiplicity == c2.multiplicity && a == b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_series};
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn cycle(polys: &[&str], prec: usize) -> TriangularCycle {
        let n = polys.len();
        let polys = polys.iter().map(|p| parse_poly(p, Q, n, false, prec).unwrap()).collect();
        TriangularCycle::new(polys, 1).unwrap()
    }

    fn s(src: &str, prec: usize) -> TruncatedSeries {
        parse_series(src, Q, prec).unwrap()
    }

    #[test]
    fn validation_examples() {
        let report = cycle(&["y1-(1+t)"], 6).validate().unwrap();
        assert_eq!(report.faces.len(), 2);
        assert!(report.all_empty());

        let err = cycle(&["y1-(1+t)", "y2-t"], 6).validate().unwrap_err();
        assert_eq!(err.to_string(), "constant term of P2 is not a unit");
        assert_eq!(err.exit_code(), 2);
        let report = cycle(&["y1-(1+t)", "y2-t"], 6).face_report();
        assert!(matches!(report.faces[2], (2, Eps::Zero, FaceStatus::Nonempty(_))));

        assert!(cycle(&["y1^2-3*y1+(1+t)"], 6).validate().unwrap().all_empty());
    }

    #[test]
    fn validation_failures_in_order() {
        let kind = |polys: &[&str]| match cycle(polys, 5).validate() {
            Err(Error::ValidationFailure(v)) => (v.level, v.kind),
            other => panic!("{other:?}"),
        };
        assert_eq!(kind(&["2*y1-3"]), (1, ViolationKind::NotMonic));
        assert_eq!(
            kind(&["y1^2-2", "y2-y1^2"]),
            (2, ViolationKind::DegreeBound { var: 1, degree: 2, bound: 2 })
        );
        assert_eq!(kind(&["y1^2-y1"]), (1, ViolationKind::ConstantTermNotUnit));
        assert_eq!(kind(&["y1^2-3*y1+2"]), (1, ViolationKind::VanishesAtOne));
        assert_eq!(kind(&["y1-2", "y2-1"]), (2, ViolationKind::VanishesAtOne));
    }

    #[test]
    fn graph_examples() {
        let g = graph(&[s("1+t", 5)]).unwrap();
        assert_eq!(g.to_string(), "{y1-1-t}");
        let g = graph(&[s("2", 5), s("3+t^2", 5)]).unwrap();
        assert_eq!(g.degree_vector(), vec![1, 1]);
        g.validate().unwrap();
        assert!(matches!(graph(&[s("1", 5)]), Err(Error::ExcludedValue(_))));
        assert!(matches!(graph(&[s("t", 5)]), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&[parse_poly("2*y1-2*(1+t)", Q, 1, false, 5).unwrap()]).unwrap();
        assert_eq!(n.to_string(), "{y1-1-t}");
        let gens = ["y1^2-(1+t)", "y2-y1^3"].map(|p| parse_poly(p, Q, 2, false, 5).unwrap());
        let n = normalize(&gens).unwrap();
        assert_eq!(n.polys()[1].to_string(), "y2+(-1-t)*y1");
        assert_eq!(normalize(n.polys()).unwrap(), n);
        let gens = ["y1^2-(1+t)", "(2+y1)*y2-1"].map(|p| parse_poly(p, Q, 2, false, 5).unwrap());
        let n = normalize(&gens).unwrap();
        assert!(n.polys()[1].is_monic_in(1));
        assert!(matches!(
            normalize(&[parse_poly("t*y1-1", Q, 1, false, 5).unwrap()]),
            Err(Error::NotAUnit(_))
        ));
    }

    #[test]
    fn degree_vectors() {
        assert_eq!(cycle(&["y1^2-3*y1+(1+t)"], 5).degree_vector(), vec![2]);
        assert_eq!(cycle(&["y1^2-(1+t)", "y2-y1-3"], 5).degree_vector(), vec![2, 1]);
    }

    #[test]
    fn equivalence_examples() {
        let g = |src: &str| graph(&[s(src, 6)]).unwrap();
        assert!(mod_i_equivalent(&g("1+t"), &g("1+t+t^3"), 3).unwrap());
        assert!(mod_i_equivalent(&g("1+t"), &g("1+t+t^2"), 2).unwrap());
        assert!(!mod_i_equivalent(&g("1+t"), &g("1+t+t^2"), 3).unwrap());
        let a = cycle(&["y1^2-3*y1+(1+t)"], 6);
        let b = cycle(&["y1^2-3*y1+(1+t+t^4)"], 6);
        assert!(mod_i_equivalent(&a, &b, 4).unwrap());
        assert!(!mod_i_equivalent(&a, &b, 5).unwrap());
        assert!(!mod_i_equivalent(&a, &a.with_multiplicity(2), 4).unwrap());
        assert!(matches!(mod_i_equivalent(&a, &b, 7), Err(Error::PrecisionRequest { .. })));
    }

    fn unit_tuple(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(
            (prop_oneof![-4i64..=-1, 2i64..6], proptest::collection::vec(-2i64..3, 3))
                .prop_map(|(c, rest)| std::iter::once(c).chain(rest).collect()),
            n,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn graphs_validate_with_unit_degrees(a in (1usize..=3).prop_flat_map(unit_tuple)) {
            let a: Vec<_> = a.iter().map(|c| TruncatedSeries::from_ints(Q, c, 6)).collect();
            let g = graph(&a).unwrap();
            prop_assert!(g.validate().unwrap().all_empty());
            prop_assert!(g.degree_vector().iter().all(|&d| d == 1));
        }

        #[test]
        fn equivalence_is_an_equivalence(x in unit_tuple(3), m in 1usize..4) {
            let series: Vec<_> = x.iter().map(|c| TruncatedSeries::from_ints(Q, c, 5)).collect();
            let g: Vec<_> = series.iter().map(|a| graph(std::slice::from_ref(a)).unwrap()).collect();
            for a in &g {
                prop_assert!(mod_i_equivalent(a, a, m).unwrap());
                for b in &g {
                    let ab = mod_i_equivalent(a, b, m).unwrap();
                    prop_assert_eq!(ab, mod_i_equivalent(b, a, m).unwrap());
                    for c in &g {
                        if ab && mod_i_equivalent(b, c, m).unwrap() {
                            prop_assert!(mod_i_equivalent(a, c, m).unwrap());
                        }
                    }
                }
            }
        }
    }
}
