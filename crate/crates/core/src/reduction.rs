//! Degree-vector reduction of triangular cycles to graph cycles.
//!
//! One step at level `i` (all degrees above `i` equal to 1) replaces `P_i`
//! by `y_i - c` with `c = (-1)^{d_i}·P_i(y_i = 0)`, witnessed by the
//! certificate polynomial `Q = P_i - (y_i - 1)^{d_i - 1}(y_i - c)·y'`.
//! Repeating the step under [`schedule`] ends at a graph cycle whose
//! coordinates give the regulator symbol.

use crate::cycles::TriangularCycle;
use crate::error::{Error, Result};
use crate::falgebra::{retriangulate, AlgebraElement};
use crate::milnor::MilnorSymbolSum;
use crate::mpoly::{Eps, MultiPoly};
use crate::tseries::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    /// 1-based level of the step.
    pub index: usize,
    /// Degree-reduced lift of `c` in `y_1..y_{i-1}`, in `n` variables.
    pub lift: MultiPoly,
    /// Certificate polynomial in `y_1..y_n, y'`.
    pub q: MultiPoly,
    pub before: TriangularCycle,
    pub after: TriangularCycle,
    pub e: u64,
    /// Precision consumed by retriangulation.
    pub consumed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub certificates: Vec<ReductionCertificate>,
    /// Graph coordinates of the final cycle at full precision.
    pub coordinates: Vec<TruncatedSeries>,
    pub multiplicity: u64,
    pub consumed: usize,
}

impl ReductionTrace {
    pub fn indices(&self) -> Vec<usize> {
        self.certificates.iter().map(|c| c.index).collect()
    }
}

/// The largest `i` with `d_i > 1`; every degree above it is then 1.
pub fn schedule(degrees: &[u32]) -> Result<usize> {
    degrees
        .iter()
        .rposition(|&d| d > 1)
        .map(|i| i + 1)
        .ok_or(Error::AllOnes)
}

pub fn iteration_cap(n: usize) -> usize {
    (1usize << n) * n + 16
}

/// Runs `step` under [`schedule`] until the degree vector is all ones.
/// Returns the final state and the emitted indices.
pub fn drive<S>(
    mut state: S,
    cap: usize,
    degrees: impl Fn(&S) -> Vec<u32>,
    mut step: impl FnMut(S, usize) -> Result<S>,
) -> Result<(S, Vec<usize>)> {
    let mut indices = Vec::new();
    loop {
        let d = degrees(&state);
        let i = match schedule(&d) {
            Ok(i) => i,
            Err(Error::AllOnes) => return Ok((state, indices)),
            Err(e) => return Err(e),
        };
        if indices.len() == cap {
            return Err(Error::IterationCapExceeded { cap, expected: (1usize << d.len()) - 1 });
        }
        state = step(state, i)?;
        indices.push(i);
    }
}

fn check_schedulable(c: &TriangularCycle, index: usize) -> Result<Vec<u32>> {
    let d = c.degree_vector();
    if index == 0 || index > c.n() {
        return Err(Error::ShapeMismatch(format!("level {index} outside 1..{}", c.n())));
    }
    if d[index..].iter().any(|&dj| dj > 1) {
        return Err(Error::ScheduleViolation { index, degrees: d });
    }
    Ok(d)
}

/// `c = (-1)^{d_i}·P_i(y_i = 0)`, reduced modulo `P_1..P_{i-1}`.
fn lift_of(c: &TriangularCycle, index: usize, d: u32) -> Result<MultiPoly> {
    let below = c.algebra_at(index - 1)?;
    let c0 = below.reduce_poly(&c.polys()[index - 1].face_at(index - 1, Eps::Zero))?;
    Ok(if d.is_multiple_of(2) { c0 } else { -c0 })
}

fn certificate_poly(p: &MultiPoly, lift: &MultiPoly, index: usize, d: u32) -> MultiPoly {
    let n = p.nvars();
    let (field, prec) = (p.field(), p.precision());
    let yi = MultiPoly::var(field, n + 1, prec, index - 1);
    let yp = MultiPoly::var(field, n + 1, prec, n);
    let one = MultiPoly::one(field, n + 1, prec);
    let factor = &(&yi - &one).pow(d - 1) * &(&yi - &lift.embed(n + 1));
    &p.embed(n + 1) - &(&factor * &yp)
}

/// One reduction step at the 1-based level `index`.
pub fn reduce_step(c: &TriangularCycle, index: usize) -> Result<ReductionCertificate> {
    let d = check_schedulable(c, index)?;
    let n = c.n();
    let i0 = index - 1;
    let below = c.algebra_at(i0)?;
    let lift = lift_of(c, index, d[i0])?;
    let c_elem = below.reduce(&lift)?;
    if !below.is_unit(&c_elem) {
        return Err(Error::NotAUnit(format!("reduction constant {lift} at level {index}")));
    }
    if below.norm(&below.sub(&c_elem, &below.one())).is_zero() {
        return Err(Error::ExcludedValue(format!("reduction constant {lift} at level {index} is 1")));
    }
    let q = certificate_poly(&c.polys()[i0], &lift, index, d[i0]);

    let (field, prec) = (c.field(), c.precision());
    let mut substituted: Vec<MultiPoly> = c.polys()[..i0].to_vec();
    substituted.push(&MultiPoly::var(field, n, prec, i0) - &lift);
    for p in &c.polys()[index..] {
        substituted.push(below.reduce_poly(&p.substitute(i0, &lift)?)?);
    }
    let sub_rank: usize = c.degree_vector()[..i0].iter().map(|&x| x as usize).product();

    // Coordinates of the post-cycle inside the original algebra.
    let b = c.algebra()?;
    let mut coords: Vec<AlgebraElement> = Vec::with_capacity(n);
    for j in 0..n {
        if j < i0 {
            coords.push(b.generator(j)?);
        } else {
            let yj = MultiPoly::var(field, n, prec, j);
            coords.push(b.reduce(&(&yj - &substituted[j]))?);
        }
    }
    let retri = retriangulate(&b, &coords)?;
    if !sub_rank.is_multiple_of(retri.rank) {
        return Err(Error::NoRelation(format!(
            "retriangulated rank {} does not divide {sub_rank}",
            retri.rank
        )));
    }
    let e = (sub_rank / retri.rank) as u64;
    let after = TriangularCycle::new(retri.relations, c.multiplicity() * e)?;
    after.validate()?;
    Ok(ReductionCertificate {
        index,
        lift,
        q,
        before: c.clone(),
        after,
        e,
        consumed: retri.consumed,
    })
}

fn graph_coordinates(c: &TriangularCycle) -> Vec<TruncatedSeries> {
    c.polys()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let c0 = p.face_at(i, Eps::Zero).as_constant().expect("graph relation");
            -&c0
        })
        .collect()
}

fn finish(c: &TriangularCycle, m: usize, certificates: Vec<ReductionCertificate>) -> Result<(MilnorSymbolSum, ReductionTrace)> {
    let last = certificates.last().map_or(c, |cert| &cert.after);
    if last.degree_vector().iter().any(|&d| d != 1) {
        return Err(Error::ScheduleViolation { index: 0, degrees: last.degree_vector() });
    }
    let coordinates = graph_coordinates(last);
    let consumed = certificates.iter().map(|c| c.consumed).sum::<usize>();
    if consumed + m > c.precision() {
        return Err(Error::PrecisionExhausted(format!(
            "{consumed} digits consumed, {} available above t^{m}",
            c.precision() - m
        )));
    }
    let multiplicity = last.multiplicity();
    let coeff = i64::try_from(multiplicity)
        .map_err(|_| Error::Unsupported(format!("multiplicity {multiplicity} overflows")))?;
    let symbol = MilnorSymbolSum::symbol(coeff, &coordinates, m)?;
    Ok((symbol, ReductionTrace { certificates, coordinates, multiplicity, consumed }))
}

fn check_input(c: &TriangularCycle, m: usize) -> Result<()> {
    if m == 0 || m > c.precision() {
        return Err(Error::PrecisionRequest { requested: m, available: c.precision() });
    }
    c.validate()?;
    Ok(())
}

/// `D·{a_1 mod t^m, …, a_n mod t^m}` and the trace of steps that produced it.
pub fn regulator(c: &TriangularCycle, m: usize) -> Result<(MilnorSymbolSum, ReductionTrace)> {
    check_input(c, m)?;
    let mut certificates = Vec::new();
    drive(c.clone(), iteration_cap(c.n()), TriangularCycle::degree_vector, |state, i| {
        let cert = reduce_step(&state, i)?;
        let next = cert.after.clone();
        certificates.push(cert);
        Ok(next)
    })?;
    finish(c, m, certificates)
}

/// As [`regulator`], but following an explicit sequence of levels.
pub fn regulator_with_schedule(
    c: &TriangularCycle,
    m: usize,
    indices: &[usize],
) -> Result<(MilnorSymbolSum, ReductionTrace)> {
    check_input(c, m)?;
    let mut certificates: Vec<ReductionCertificate> = Vec::with_capacity(indices.len());
    for &i in indices {
        let state = certificates.last().map_or(c, |cert| &cert.after);
        let cert = reduce_step(state, i)?;
        certificates.push(cert);
    }
    finish(c, m, certificates)
}

/// Every sequence of at most `max_len` admissible levels that ends at a
/// graph cycle, including those with identity steps. Branches whose step
/// produces an inadmissible cycle are dropped.
pub fn valid_schedules(c: &TriangularCycle, max_len: usize) -> Result<Vec<Vec<usize>>> {
    fn walk(
        c: &TriangularCycle,
        prefix: &mut Vec<usize>,
        max_len: usize,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if c.degree_vector().iter().all(|&d| d == 1) {
            out.push(prefix.clone());
        }
        if prefix.len() == max_len {
            return Ok(());
        }
        let d = c.degree_vector();
        for i in 1..=c.n() {
            if d[i..].iter().all(|&dj| dj == 1) {
                let next = match reduce_step(c, i) {
                    Ok(cert) => cert.after,
                    Err(Error::ValidationFailure(_)) => continue,
                    Err(e) => return Err(e),
                };
                prefix.push(i);
                walk(&next, prefix, max_len, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(c, &mut Vec::new(), max_len, &mut out)?;
    Ok(out)
}

/// Result of replaying a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Replay {
    Verified,
    Rejected(String),
}

impl Replay {
    pub fn is_verified(&self) -> bool {
        *self == Replay::Verified
    }
}

/// Recomputes the constant, the four faces of `Q` and the post-cycle.
pub fn replay_certificate(cert: &ReductionCertificate) -> Replay {
    match replay_inner(cert) {
        Ok(()) => Replay::Verified,
        Err(msg) => Replay::Rejected(msg),
    }
}

fn replay_inner(cert: &ReductionCertificate) -> std::result::Result<(), String> {
    let before = &cert.before;
    let index = cert.index;
    before.validate().map_err(|e| format!("before-cycle is not admissible: {e}"))?;
    let d = check_schedulable(before, index).map_err(|e| e.to_string())?;
    let (n, i0, di) = (before.n(), index - 1, d[index - 1]);
    let (field, prec) = (before.field(), before.precision());
    let below = before.algebra_at(i0).map_err(|e| e.to_string())?;

    let lift = lift_of(before, index, di).map_err(|e| e.to_string())?;
    if lift != cert.lift {
        return Err(format!("constant {} does not match recomputed {lift}", cert.lift));
    }
    let q = &cert.q;
    if q.nvars() != n + 1 || q.field() != field {
        return Err("certificate polynomial has the wrong shape".into());
    }
    if q.degree_in(n) != Some(1) {
        return Err("certificate polynomial is not linear in y'".into());
    }
    let yp = MultiPoly::var(field, n + 1, prec, n);
    let one = MultiPoly::one(field, n + 1, prec);
    let reduce = |p: &MultiPoly| -> std::result::Result<MultiPoly, String> {
        let bq = crate::falgebra::FiniteAlgebra::new(
            field,
            n + 1,
            prec,
            before.polys()[..i0].iter().map(|p| p.embed(n + 1)).collect(),
        )
        .map_err(|e| e.to_string())?;
        bq.reduce_poly(p).map_err(|e| e.to_string())
    };

    // y_i = 0: u·(1 - y') with u a unit of R^{(i-1)}.
    let f0 = reduce(&q.face_at(i0, Eps::Zero))?;
    let u = f0.coefficient_in(n, 0);
    if reduce(&(&f0 - &(&u * &(&one - &yp))))?.is_zero() {
        let u_elem = below
            .reduce(&project(&u, n))
            .map_err(|e| e.to_string())?;
        if !below.is_unit(&u_elem) {
            return Err("face y_i=0 is not a unit multiple of 1-y'".into());
        }
    } else {
        return Err("face y_i=0 is not of the form u·(1-y')".into());
    }
    // y_i = ∞: 1 - y'.
    if q.face_at(i0, Eps::Infinity) != &one - &yp {
        return Err("face y_i=∞ is not 1-y'".into());
    }
    // y' = 0: the relation P_i.
    if q.face_at(n, Eps::Zero) != before.polys()[i0].embed(n + 1) {
        return Err("face y'=0 does not reproduce P_i".into());
    }
    // y' = ∞: -(y_i - 1)^{d-1}(y_i - c); strip the excluded factor and read off c.
    let mut g = -q.face_at(n, Eps::Infinity);
    let yi_minus_one = &MultiPoly::var(field, n + 1, prec, i0) - &one;
    for _ in 1..di {
        let (quot, rem) = g.divide_monic(&yi_minus_one, i0).map_err(|e| e.to_string())?;
        if !rem.is_zero() {
            return Err("face y'=∞ lacks the factor (y_i-1)^(d-1)".into());
        }
        g = quot;
    }
    if g.degree_in(i0) != Some(1) || !g.is_monic_in(i0) {
        return Err("face y'=∞ does not reduce to y_i - c".into());
    }
    let extracted = project(&(-g.face_at(i0, Eps::Zero)), n);
    if extracted != cert.lift {
        return Err(format!("face y'=∞ gives constant {extracted}, certificate has {}", cert.lift));
    }

    let again = reduce_step(before, index).map_err(|e| format!("re-derivation failed: {e}"))?;
    if again.after != cert.after || again.e != cert.e {
        return Err(format!("post-cycle {} does not match re-derived {}", cert.after, again.after));
    }
    Ok(())
}

/// Drops the trailing variable `y'` from a polynomial that does not involve it.
fn project(p: &MultiPoly, n: usize) -> MultiPoly {
    let terms = p.terms().map(|(m, c)| {
        let mut e = m.0.clone();
        e.truncate(n);
        (crate::mpoly::Monomial(e), c.clone())
    });
    MultiPoly::from_terms(p.field(), n, p.precision(), terms).expect("shapes agree")
}

/// All certificates of a trace replay, and consecutive steps chain.
pub fn replay_trace(trace: &ReductionTrace) -> Replay {
    for (k, cert) in trace.certificates.iter().enumerate() {
        if let Replay::Rejected(msg) = replay_certificate(cert) {
            return Replay::Rejected(format!("step {}: {msg}", k + 1));
        }
        if k > 0 && trace.certificates[k - 1].after != cert.before {
            return Replay::Rejected(format!("step {} does not start where step {k} ended", k + 1));
        }
    }
    if let Some(last) = trace.certificates.last() {
        if last.after.degree_vector().iter().any(|&d| d != 1) {
            return Replay::Rejected("trace does not end at a graph cycle".into());
        }
        if graph_coordinates(&last.after) != trace.coordinates {
            return Replay::Rejected("final coordinates do not match the last post-cycle".into());
        }
        if last.after.multiplicity() != trace.multiplicity {
            return Replay::Rejected("multiplicity does not match the last post-cycle".into());
        }
    }
    Replay::Verified
}
