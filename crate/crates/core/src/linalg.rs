//! Dense matrices over `k[t]/(t^N)`.
//!
//! `k[[t]]` is a discrete valuation ring, so elimination pivots on the entry
//! of smallest `t`-adic valuation and divides only by units after pulling out
//! the power of `t`. Every such division costs precision, and the solver
//! reports how much was consumed. Determinants never divide.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::FieldSpec;
use crate::tseries::{TruncatedSeries, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    data: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn from_columns(rows: usize, columns: Vec<Vec<TruncatedSeries>>) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for col in &columns {
                assert_eq!(col.len(), rows, "ragged column");
                data.push(col[i].clone());
            }
        }
        SeriesMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<TruncatedSeries>>) -> Self {
        let nrows = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<_> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), nrows * cols, "ragged rows");
        SeriesMatrix { rows: nrows, cols, data }
    }

    pub fn identity(field: FieldSpec, n: usize, precision: usize) -> Self {
        let mut data = vec![TruncatedSeries::zero(field, precision); n * n];
        for i in 0..n {
            data[i * n + i] = TruncatedSeries::one(field, precision);
        }
        SeriesMatrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: TruncatedSeries) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<TruncatedSeries> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not chain");
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.get(i, 0) * other.get(0, j);
                for k in 1..self.cols {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                data.push(acc);
            }
        }
        SeriesMatrix { rows: self.rows, cols: other.cols, data }
    }

    /// Characteristic polynomial `det(xI - A)` by the division-free
    /// Berkowitz recursion; returns its coefficients from `x^n` down to `x^0`.
    pub fn charpoly(&self) -> Vec<TruncatedSeries> {
        assert_eq!(self.rows, self.cols, "charpoly of a non-square matrix");
        let n = self.rows;
        let (field, prec) = match self.data.first() {
            Some(s) => (s.field(), self.data.iter().map(|s| s.precision()).min().unwrap()),
            None => return vec![],
        };
        let one = TruncatedSeries::one(field, prec);
        let mut v = vec![one.clone()];
        for r in 0..n {
            // Leading (r+1)x(r+1) block [[M, c], [R, a]].
            let a = self.get(r, r);
            let mut toeplitz = Vec::with_capacity(r + 2);
            toeplitz.push(one.clone());
            toeplitz.push(-a);
            // w = M^k c, starting at k = 0.
            let mut w: Vec<TruncatedSeries> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for k in 0..r {
                let rw = (0..r).fold(TruncatedSeries::zero(field, prec), |acc, j| {
                    &acc + &(self.get(r, j) * &w[j])
                });
                toeplitz.push(-&rw);
                if k + 1 < r {
                    w = (0..r)
                        .map(|i| {
                            (0..r).fold(TruncatedSeries::zero(field, prec), |acc, j| {
                                &acc + &(self.get(i, j) * &w[j])
                            })
                        })
                        .collect();
                }
            }
            let mut next = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc = TruncatedSeries::zero(field, prec);
                for (j, vj) in v.iter().enumerate() {
                    if i >= j {
                        acc = &acc + &(&toeplitz[i - j] * vj);
                    }
                }
                next.push(acc);
            }
            v = next;
        }
        v
    }

    /// Determinant via [`SeriesMatrix::charpoly`]; exact at full precision.
    pub fn det(&self) -> TruncatedSeries {
        let n = self.rows;
        let cp = self.charpoly();
        let last = cp[n].clone();
        if n % 2 == 1 {
            -&last
        } else {
            last
        }
    }

    /// Determinant by Laplace expansion along the first row. Exponential in
    /// the dimension; kept as an independent check of [`SeriesMatrix::det`].
    pub fn det_cofactor(&self) -> TruncatedSeries {
        assert_eq!(self.rows, self.cols);
        let idx: Vec<usize> = (0..self.cols).collect();
        self.cofactor_rec(0, &idx)
    }

    fn cofactor_rec(&self, row: usize, cols: &[usize]) -> TruncatedSeries {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let proto = self.get(row, cols[0]);
        let mut acc = TruncatedSeries::zero(proto.field(), proto.precision());
        for (k, &c) in cols.iter().enumerate() {
            let entry = self.get(row, c);
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry * &self.cofactor_rec(row + 1, &rest);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }
}

impl fmt::Display for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A solution of `A x = b` over `k[t]/(t^N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<TruncatedSeries>,
    /// Digits of precision lost to non-unit pivots.
    pub consumed: usize,
}

/// Solves `A x = b` with coefficients in `k[[t]]` known modulo `t^N`.
///
/// Returns `Ok(None)` when the system has no solution with coefficients in
/// `k[[t]]` (inconsistent rows, or a pivot power of `t` not dividing the
/// right-hand side). Free unknowns are set to zero.
pub fn solve(a: &SeriesMatrix, b: &[TruncatedSeries]) -> Result<Option<Solution>> {
    assert_eq!(a.rows, b.len(), "right-hand side has the wrong length");
    let rows = a.rows;
    let cols = a.cols;
    let Some(proto) = b.first() else {
        return Ok(Some(Solution { x: vec![], consumed: 0 }));
    };
    let field = proto.field();
    let start_prec = a
        .data
        .iter()
        .chain(b)
        .map(TruncatedSeries::precision)
        .min()
        .unwrap_or(proto.precision());

    let mut m = a.clone();
    let mut rhs: Vec<TruncatedSeries> = b.to_vec();
    let mut row_active = vec![true; rows];
    let mut col_active = vec![true; cols];
    // (row, col, valuation, inverse of the unit part)
    let mut pivots: Vec<(usize, usize, usize, TruncatedSeries)> = Vec::new();

    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in (0..rows).filter(|&i| row_active[i]) {
            for j in (0..cols).filter(|&j| col_active[j]) {
                if let Valuation::Finite(v) = m.get(i, j).valuation() {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        let unit = m.get(pi, pj).div_t_power(v)?;
        let unit_inv = unit.invert()?;
        for k in (0..rows).filter(|&k| k != pi && row_active[k]) {
            let entry = m.get(k, pj);
            if entry.is_zero() {
                continue;
            }
            let factor = &entry.div_t_power(v)? * &unit_inv;
            for l in 0..cols {
                if col_active[l] {
                    let updated = m.get(k, l) - &(&factor * m.get(pi, l));
                    m.set(k, l, updated);
                }
            }
            rhs[k] = &rhs[k] - &(&factor * &rhs[pi]);
        }
        row_active[pi] = false;
        col_active[pj] = false;
        pivots.push((pi, pj, v, unit_inv));
    }

    if (0..rows).any(|i| row_active[i] && !rhs[i].is_zero()) {
        return Ok(None);
    }

    let mut x: Vec<Option<TruncatedSeries>> = vec![None; cols];
    for (pi, pj, v, unit_inv) in pivots.iter().rev() {
        let mut acc = rhs[*pi].clone();
        for (l, xl) in x.iter().enumerate() {
            if let Some(xl) = xl {
                acc = &acc - &(m.get(*pi, l) * xl);
            }
        }
        let shifted = match acc.div_t_power(*v) {
            Ok(s) => s,
            Err(Error::NoRelation(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        x[*pj] = Some(&shifted * unit_inv);
    }
    let x: Vec<TruncatedSeries> = x
        .into_iter()
        .map(|xi| xi.unwrap_or_else(|| TruncatedSeries::zero(field, start_prec)))
        .collect();
    let end_prec = x.iter().map(TruncatedSeries::precision).min().unwrap_or(start_prec);
    Ok(Some(Solution { x, consumed: start_prec - end_prec }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn s(ints: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_ints(Q, ints, 5)
    }

    #[test]
    fn two_by_two_det() {
        let m = SeriesMatrix::from_rows(vec![vec![s(&[0]), s(&[1, 1])], vec![s(&[1]), s(&[0])]]);
        assert_eq!(m.det(), s(&[-1, -1]));
        assert_eq!(m.det_cofactor(), s(&[-1, -1]));
        let cp = m.charpoly();
        assert_eq!(cp, vec![s(&[1]), s(&[0]), s(&[-1, -1])]);
    }

    #[test]
    fn unit_pivot_solve() {
        let m = SeriesMatrix::from_rows(vec![vec![s(&[1]), s(&[4])], vec![s(&[0]), s(&[1])]]);
        let sol = solve(&m, &[s(&[17, 1]), s(&[8])]).unwrap().unwrap();
        assert_eq!(sol.x, vec![s(&[-15, 1]), s(&[8])]);
        assert_eq!(sol.consumed, 0);
    }

    #[test]
    fn non_unit_pivot_consumes_precision() {
        // t·x = t^2 + t^3 has the solution x = t + t^2, known mod t^4.
        let m = SeriesMatrix::from_rows(vec![vec![s(&[0, 1])]]);
        let sol = solve(&m, &[s(&[0, 0, 1, 1])]).unwrap().unwrap();
        assert_eq!(sol.x[0].to_string(), "t+t^2");
        assert_eq!(sol.consumed, 1);
        // t·x = 1 has no solution over k[[t]].
        assert_eq!(solve(&m, &[s(&[1])]).unwrap(), None);
    }

    #[test]
    fn inconsistent_rows() {
        let m = SeriesMatrix::from_rows(vec![vec![s(&[1])], vec![s(&[2])]]);
        assert_eq!(solve(&m, &[s(&[1]), s(&[3])]).unwrap(), None);
        assert!(solve(&m, &[s(&[1]), s(&[2])]).unwrap().is_some());
    }

    fn matrix(n: usize) -> impl Strategy<Value = SeriesMatrix> {
        proptest::collection::vec(proptest::collection::vec(-3i64..4, 3), n * n).prop_map(move |v| {
            let rows = v
                .chunks(n)
                .map(|row| row.iter().map(|c| TruncatedSeries::from_ints(Q, c, 4)).collect())
                .collect();
            SeriesMatrix::from_rows(rows)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn berkowitz_matches_cofactor(m in (1usize..=5).prop_flat_map(matrix)) {
            prop_assert_eq!(m.det(), m.det_cofactor());
        }

        #[test]
        fn det_is_multiplicative((a, b) in (1usize..=4).prop_flat_map(|n| (matrix(n), matrix(n)))) {
            prop_assert_eq!(a.mul(&b).det(), &a.det() * &b.det());
        }

        #[test]
        fn solutions_satisfy_system(m in (1usize..=4).prop_flat_map(matrix),
                                    seed in proptest::collection::vec(-3i64..4, 4)) {
            let n = m.rows();
            let x0: Vec<_> = (0..n).map(|i| TruncatedSeries::from_ints(Q, &[seed[i % 4], seed[(i + 1) % 4]], 4)).collect();
            let col = SeriesMatrix::from_columns(n, vec![x0]);
            let b = m.mul(&col).column(0);
            let sol = solve(&m, &b).unwrap().expect("constructed to be solvable");
            let xs = SeriesMatrix::from_columns(n, vec![sol.x.clone()]);
            let back = m.mul(&xs).column(0);
            for (lhs, rhs) in back.iter().zip(&b) {
                let p = lhs.precision().min(rhs.precision());
                prop_assert_eq!(lhs.truncate(p).unwrap(), rhs.truncate(p).unwrap());
            }
        }
    }
}
