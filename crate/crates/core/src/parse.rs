//! Literal grammar shared by documents and the command line:
//!
//! ```text
//! expr  := ['+'|'-'] term (('+'|'-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ['^' integer]
//! atom  := integer ['/' integer] | 't' | 'y'<index> | 'yp' | '(' expr ')'
//! ```
//!
//! `t` is the series variable; `y1..yn` are the cube coordinates and `yp`
//! the auxiliary coordinate of a certificate.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::mpoly::{Monomial, MultiPoly};
use crate::scalars::{FieldElement, FieldSpec};
use crate::tseries::TruncatedSeries;

struct Parser {
    chars: Vec<char>,
    pos: usize,
    field: FieldSpec,
    n: usize,
    prime: bool,
    precision: usize,
}

impl Parser {
    fn nvars(&self) -> usize {
        self.n + usize::from(self.prime)
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(self.column(), "expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits
            .parse()
            .map_err(|_| Error::parse(start + 1, format!("bad integer {digits}")))
    }

    fn constant(&self, c: FieldElement) -> MultiPoly {
        MultiPoly::constant(TruncatedSeries::constant(c, self.precision), self.nvars())
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = if self.eat('-') {
            -&self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            let col = self.column();
            let e = self.integer()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| Error::parse(col, "exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let col = self.column();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let save = self.pos;
                if self.eat('/') {
                    if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        let den_col = self.column();
                        let den = self.integer()?;
                        let value = self
                            .field
                            .from_ratio(&num, &den)
                            .map_err(|_| Error::parse(den_col, "zero denominator"))?;
                        return Ok(self.constant(value));
                    }
                    self.pos = save;
                }
                let value = self.field.from_ratio(&num, &BigInt::one())?;
                Ok(self.constant(value))
            }
            Some('t') => {
                self.pos += 1;
                let s = TruncatedSeries::monomial(self.field.one(), 1, self.precision);
                Ok(MultiPoly::constant(s, self.nvars()))
            }
            Some('y') => {
                self.pos += 1;
                if self.chars.get(self.pos) == Some(&'p') {
                    self.pos += 1;
                    if !self.prime {
                        return Err(Error::parse(col, "yp is only allowed in certificates"));
                    }
                    return Ok(self.var(self.n));
                }
                let idx_col = self.column();
                if !self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    return Err(Error::parse(idx_col, "expected a variable index after y"));
                }
                let idx = self.integer()?;
                let idx: usize = idx
                    .try_into()
                    .map_err(|_| Error::parse(idx_col, "variable index too large"))?;
                if idx == 0 || idx > self.n {
                    return Err(Error::parse(
                        col,
                        format!("variable y{idx} out of range y1..y{}", self.n),
                    ));
                }
                Ok(self.var(idx - 1))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::parse(self.column(), "expected ')'"));
                }
                Ok(inner)
            }
            Some(c) => Err(Error::parse(col, format!("unexpected character '{c}'"))),
            None => Err(Error::parse(col, "unexpected end of input")),
        }
    }

    fn var(&self, v: usize) -> MultiPoly {
        MultiPoly::term(
            Monomial::var(self.nvars(), v, 1),
            TruncatedSeries::one(self.field, self.precision),
        )
    }
}

/// Parses a polynomial in `y1..yn` (plus `yp` when `prime` is set).
pub fn parse_poly(
    src: &str,
    field: FieldSpec,
    n: usize,
    prime: bool,
    precision: usize,
) -> Result<MultiPoly> {
    if precision == 0 {
        return Err(Error::parse(1, "precision must be positive"));
    }
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
        field,
        n,
        prime,
        precision,
    };
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(Error::parse(p.column(), "trailing input"));
    }
    Ok(out)
}

/// Parses a series literal `c0 + c1*t + c2*t^2 + …`.
pub fn parse_series(src: &str, field: FieldSpec, precision: usize) -> Result<TruncatedSeries> {
    let p = parse_poly(src, field, 0, false, precision)?;
    Ok(p.as_constant().expect("no variables in a series literal"))
}

/// Parses a base-field literal such as `3` or `-1/2`.
pub fn parse_scalar(src: &str, field: FieldSpec) -> Result<FieldElement> {
    let s = parse_series(src, field, 1)?;
    Ok(s.constant_term().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn series_literals() {
        let s = parse_series("1 + 2*t - 1/2*t^2", Q, 4).unwrap();
        assert_eq!(s.to_string(), "1+2*t-1/2*t^2");
        assert_eq!(parse_series("(1+t)^2", Q, 2).unwrap().to_string(), "1+2*t");
        let f = FieldSpec::prime(101).unwrap();
        assert_eq!(parse_scalar("-1", f).unwrap(), f.from_i64(100));
        assert_eq!(parse_scalar("1/2", f).unwrap(), f.from_i64(51));
    }

    #[test]
    fn poly_literals() {
        let p = parse_poly("(1+t)*y1^2*y2 - 3*y2 + t^2", Q, 2, false, 4).unwrap();
        assert_eq!(p.to_string(), "(1+t)*y1^2*y2-3*y2+t^2");
        let q = parse_poly("y1 - yp", Q, 1, true, 4).unwrap();
        assert_eq!(q.nvars(), 2);
    }

    #[test]
    fn errors_carry_columns() {
        match parse_poly("y1 + y3", Q, 2, false, 4) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        match parse_poly("y1 + yp", Q, 2, false, 4) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly("(y1", Q, 1, false, 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("y1 y1", Q, 1, false, 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("1/0", Q, 1, false, 3), Err(Error::Parse { .. })));
    }
}
