//! JSON documents for cycles, symbol sums and reduction traces.
//!
//! Polynomials and series travel as strings in the literal grammar of
//! [`crate::parse`]; traces embed every polynomial so they replay without
//! any other input.

use serde::{Deserialize, Serialize};

use crate::cycles::TriangularCycle;
use crate::error::{Error, Result};
use crate::milnor::MilnorSymbolSum;
use crate::mpoly::{var_names, MultiPoly};
use crate::parse::{parse_poly, parse_series};
use crate::reduction::{ReductionCertificate, ReductionTrace};
use crate::scalars::FieldSpec;
use crate::tseries::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleDocument {
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    pub n: usize,
    pub polys: Vec<String>,
    #[serde(default = "one")]
    pub multiplicity: u64,
}

fn one() -> u64 {
    1
}

fn located(err: Error, what: &str) -> Error {
    match err {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{what}: {message}"),
        },
        other => other,
    }
}

/// Parses a JSON document, mapping syntax errors to [`Error::Parse`].
pub fn from_json<T: for<'de> Deserialize<'de>>(src: &str) -> Result<T> {
    serde_json::from_str(src).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

impl CycleDocument {
    pub fn from_cycle(c: &TriangularCycle) -> Self {
        let names = var_names(c.n(), false);
        CycleDocument {
            field: c.field(),
            precision: Some(c.precision()),
            n: c.n(),
            polys: c.polys().iter().map(|p| p.display_with(&names).to_string()).collect(),
            multiplicity: c.multiplicity(),
        }
    }

    /// Builds the cycle, using `default_precision` when the document has none.
    pub fn to_cycle(&self, default_precision: usize) -> Result<TriangularCycle> {
        let precision = self.precision.unwrap_or(default_precision);
        if self.polys.len() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "document declares n = {} but lists {} polynomials",
                self.n,
                self.polys.len()
            )));
        }
        let polys = self
            .polys
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_poly(s, self.field, self.n, false, precision)
                    .map_err(|e| located(e, &format!("polys[{i}]")))
            })
            .collect::<Result<Vec<_>>>()?;
        TriangularCycle::new(polys, self.multiplicity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolTerm {
    pub coeff: i64,
    pub entries: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDocument {
    pub field: FieldSpec,
    pub n: usize,
    pub m: usize,
    pub terms: Vec<SymbolTerm>,
}

impl SymbolDocument {
    pub fn from_sum(s: &MilnorSymbolSum) -> Self {
        SymbolDocument {
            field: s.field(),
            n: s.n(),
            m: s.m(),
            terms: s
                .terms()
                .map(|(coeff, e)| SymbolTerm { coeff, entries: e.iter().map(ToString::to_string).collect() })
                .collect(),
        }
    }

    pub fn to_sum(&self) -> Result<MilnorSymbolSum> {
        let mut out = MilnorSymbolSum::zero(self.field, self.n, self.m);
        for (k, term) in self.terms.iter().enumerate() {
            let entries = term
                .entries
                .iter()
                .map(|e| parse_series(e, self.field, self.m).map_err(|err| located(err, &format!("terms[{k}]"))))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(term.coeff, &entries)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub index: usize,
    pub precision: usize,
    pub lift: String,
    pub q: String,
    pub before: CycleDocument,
    pub after: CycleDocument,
    pub e: u64,
    pub consumed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    pub field: FieldSpec,
    pub n: usize,
    pub precision: usize,
    pub certificates: Vec<CertificateDocument>,
    pub coordinates: Vec<String>,
    pub multiplicity: u64,
    pub consumed: usize,
}

impl CertificateDocument {
    pub fn from_certificate(c: &ReductionCertificate) -> Self {
        let n = c.before.n();
        CertificateDocument {
            index: c.index,
            precision: c.lift.precision(),
            lift: c.lift.display_with(&var_names(n, false)).to_string(),
            q: c.q.display_with(&var_names(n, true)).to_string(),
            before: CycleDocument::from_cycle(&c.before),
            after: CycleDocument::from_cycle(&c.after),
            e: c.e,
            consumed: c.consumed,
        }
    }

    pub fn to_certificate(&self, field: FieldSpec) -> Result<ReductionCertificate> {
        let before = self.before.to_cycle(self.precision)?;
        let after = self.after.to_cycle(self.precision)?;
        if before.field() != field || after.field() != field {
            return Err(Error::MixedFields(field, before.field()));
        }
        let n = before.n();
        let lift = parse_poly(&self.lift, field, n, false, self.precision).map_err(|e| located(e, "lift"))?;
        let q = parse_poly(&self.q, field, n, true, self.precision).map_err(|e| located(e, "q"))?;
        Ok(ReductionCertificate { index: self.index, lift, q, before, after, e: self.e, consumed: self.consumed })
    }
}

impl TraceDocument {
    pub fn from_trace(c: &TriangularCycle, t: &ReductionTrace) -> Self {
        TraceDocument {
            field: c.field(),
            n: c.n(),
            precision: c.precision(),
            certificates: t.certificates.iter().map(CertificateDocument::from_certificate).collect(),
            coordinates: t.coordinates.iter().map(ToString::to_string).collect(),
            multiplicity: t.multiplicity,
            consumed: t.consumed,
        }
    }

    pub fn to_trace(&self) -> Result<ReductionTrace> {
        let certificates = self
            .certificates
            .iter()
            .map(|c| c.to_certificate(self.field))
            .collect::<Result<Vec<_>>>()?;
        let coord_prec = certificates.last().map_or(self.precision, |c| c.after.precision());
        let coordinates = self
            .coordinates
            .iter()
            .map(|s| parse_series(s, self.field, coord_prec))
            .collect::<Result<Vec<TruncatedSeries>>>()?;
        Ok(ReductionTrace { certificates, coordinates, multiplicity: self.multiplicity, consumed: self.consumed })
    }
}

/// Parses a polynomial in `y1..yn` against a cycle's field and precision.
pub fn parse_element(src: &str, c: &TriangularCycle) -> Result<MultiPoly> {
    parse_poly(src, c.field(), c.n(), false, c.precision())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{regulator, replay_trace};
    use proptest::prelude::*;

    #[test]
    fn cycle_round_trip() {
        let src = r#"{"field":"Q","precision":8,"n":2,"polys":["y1^2-(1+t)","y2-y1-3"]}"#;
        let doc: CycleDocument = from_json(src).unwrap();
        let c = doc.to_cycle(99).unwrap();
        assert_eq!(c.precision(), 8);
        assert_eq!(c.multiplicity(), 1);
        let again = CycleDocument::from_cycle(&c);
        assert_eq!(again.polys, vec!["y1^2-1-t", "y2-y1-3"]);
        assert_eq!(again.to_cycle(1).unwrap(), c);
    }

    #[test]
    fn prime_field_documents() {
        let src = r#"{"field":{"Fp":101},"n":1,"polys":["y1^2-3*y1+(1+t)"]}"#;
        let c = from_json::<CycleDocument>(src).unwrap().to_cycle(6).unwrap();
        assert_eq!(c.field(), FieldSpec::PrimeField(101));
        assert!(from_json::<CycleDocument>(r#"{"field":{"Fp":100},"n":1,"polys":["y1"]}"#).is_err());
    }

    #[test]
    fn parse_errors_are_located() {
        let src = r#"{"field":"Q","n":1,"polys":["y1 + y2"]}"#;
        let err = from_json::<CycleDocument>(src).unwrap().to_cycle(4).unwrap_err();
        assert_eq!(err.to_string(), "parse error at 1:6: polys[0]: variable y2 out of range y1..y1");
        let err = from_json::<CycleDocument>("{\n  \"field\": \"Q\",\n  oops").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn traces_round_trip_and_replay() {
        let src = r#"{"field":"Q","precision":10,"n":2,"polys":["y1^2-(1+t)","y2-y1-3"]}"#;
        let c = from_json::<CycleDocument>(src).unwrap().to_cycle(10).unwrap();
        let (sym, trace) = regulator(&c, 3).unwrap();
        let doc = TraceDocument::from_trace(&c, &trace);
        let back: TraceDocument = from_json(&to_json(&doc)).unwrap();
        let replayed = back.to_trace().unwrap();
        assert_eq!(replayed, trace);
        assert!(replay_trace(&replayed).is_verified());
        let sdoc = SymbolDocument::from_sum(&sym);
        assert_eq!(sdoc.terms[0].entries, vec!["-1-t", "2-t"]);
        assert_eq!(sdoc.to_sum().unwrap(), sym);
    }

    proptest! {
        #[test]
        fn display_parses_back(coeffs in proptest::collection::vec((-3i64..4, -3i64..4, 1i64..4), 1..6),
                               p in prop_oneof![Just(0u64), Just(101u64)]) {
            let field = if p == 0 { FieldSpec::Rationals } else { FieldSpec::prime(p).unwrap() };
            let mut src = String::from("0");
            for (k, (a, b, d)) in coeffs.iter().enumerate() {
                src.push_str(&format!("+({a}/{d}+{b}*t)*y1^{}*y2^{}*yp^{}", k % 3, k % 2, k % 2));
            }
            let poly = parse_poly(&src, field, 2, true, 5).unwrap();
            let shown = poly.display_with(&var_names(2, true)).to_string();
            prop_assert_eq!(parse_poly(&shown, field, 2, true, 5).unwrap(), poly);
        }
    }
}
