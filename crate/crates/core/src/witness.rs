//! Witness curves for the Steinberg relation and for multiplicativity of
//! graph cycles, with their codimension-one faces computed twice: from the
//! rational parametrization and from the implicit equations.

use crate::error::{Error, Result};
use crate::milnor::MilnorSymbolSum;
use crate::mpoly::{Eps, MultiPoly};
use crate::scalars::FieldSpec;
use crate::tseries::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Point {
    Finite(TruncatedSeries),
    Infinity,
}

/// `x ↦ (a·x + b)/(c·x + d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Mobius {
    a: TruncatedSeries,
    b: TruncatedSeries,
    c: TruncatedSeries,
    d: TruncatedSeries,
}

fn quotient(num: &TruncatedSeries, den: &TruncatedSeries) -> Result<Point> {
    if den.is_zero() {
        if num.is_zero() {
            return Err(Error::Unsupported("indeterminate point on a witness curve".into()));
        }
        return Ok(Point::Infinity);
    }
    if num.is_zero() {
        return Ok(Point::Finite(num.clone()));
    }
    Ok(Point::Finite(num * &den.invert()?))
}

impl Mobius {
    fn eval(&self, x: &Point) -> Result<Point> {
        match x {
            Point::Finite(x) => quotient(&(&(&self.a * x) + &self.b), &(&(&self.c * x) + &self.d)),
            Point::Infinity if self.a.is_zero() && self.c.is_zero() => quotient(&self.b, &self.d),
            Point::Infinity => quotient(&self.a, &self.c),
        }
    }

    /// Points of `P^1` where the coordinate takes the value `eps`.
    fn preimage(&self, eps: Eps) -> Result<Vec<Point>> {
        let (lin, cst) = match eps {
            Eps::Zero => (&self.a, &self.b),
            Eps::Infinity => (&self.c, &self.d),
        };
        let candidate = if !lin.is_zero() {
            Point::Finite(-&(cst * &lin.invert()?))
        } else if !cst.is_zero() {
            Point::Infinity
        } else {
            return Err(Error::Unsupported("witness coordinate is identically 0 or ∞".into()));
        };
        // At x = ∞ only a genuine zero or pole of the reduced fraction counts.
        match (&candidate, self.eval(&candidate)?, eps) {
            (_, Point::Finite(v), Eps::Zero) if v.is_zero() => Ok(vec![candidate]),
            (_, Point::Infinity, Eps::Infinity) => Ok(vec![candidate]),
            _ => Ok(vec![]),
        }
    }
}

/// One codimension-one face `∂_i^ε`, as the graph cycles it consists of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessFace {
    /// 1-based coordinate.
    pub index: usize,
    pub eps: Eps,
    pub graphs: Vec<Vec<TruncatedSeries>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub field: FieldSpec,
    pub precision: usize,
    /// Number of cubical coordinates.
    pub nvars: usize,
    /// Implicit equations in `y_1..y_{nvars}`.
    pub equations: Vec<MultiPoly>,
    param: Vec<Mobius>,
}

impl Witness {
    /// Faces from the parametrization.
    pub fn faces(&self) -> Result<Vec<WitnessFace>> {
        let mut out = Vec::with_capacity(2 * self.nvars);
        for i in 0..self.nvars {
            for eps in [Eps::Zero, Eps::Infinity] {
                let mut graphs = Vec::new();
                for x in self.param[i].preimage(eps)? {
                    if let Some(g) = self.point_on_face(i, &x)? {
                        graphs.push(g);
                    }
                }
                out.push(WitnessFace { index: i + 1, eps, graphs });
            }
        }
        Ok(out)
    }

    fn point_on_face(&self, skip: usize, x: &Point) -> Result<Option<Vec<TruncatedSeries>>> {
        let mut coords = Vec::with_capacity(self.nvars - 1);
        let values = (0..self.nvars)
            .filter(|&j| j != skip)
            .map(|j| self.param[j].eval(x))
            .collect::<Result<Vec<_>>>()?;
        if values.iter().any(|v| matches!(v, Point::Finite(s) if is_one(s))) {
            return Ok(None);
        }
        for v in values {
            match v {
                Point::Finite(s) if s.is_unit() => coords.push(s),
                _ => {
                    return Err(Error::Unsupported(
                        "witness curve meets a face of codimension two".into(),
                    ))
                }
            }
        }
        Ok(Some(coords))
    }

    /// Faces from the implicit equations: restrict every equation to the face
    /// and solve the resulting triangular linear system.
    pub fn implicit_faces(&self) -> Result<Vec<WitnessFace>> {
        let mut out = Vec::with_capacity(2 * self.nvars);
        for i in 0..self.nvars {
            for eps in [Eps::Zero, Eps::Infinity] {
                let restricted: Vec<MultiPoly> = self
                    .equations
                    .iter()
                    .map(|e| if e.involves(i) { e.face_at(i, eps) } else { e.clone() })
                    .collect();
                let graphs = match solve_face(&restricted, i, self.nvars)? {
                    Some(g) => vec![g],
                    None => vec![],
                };
                out.push(WitnessFace { index: i + 1, eps, graphs });
            }
        }
        Ok(out)
    }

    /// `∂ = Σ_i (-1)^i (∂_i^∞ - ∂_i^0)` as a formal sum of graph cycles.
    pub fn boundary(&self) -> Result<MilnorSymbolSum> {
        let mut sum = MilnorSymbolSum::zero(self.field, self.nvars - 1, self.precision);
        for face in self.faces()? {
            let sign = if face.index % 2 == 0 { 1 } else { -1 };
            let sign = if face.eps == Eps::Infinity { sign } else { -sign };
            for g in &face.graphs {
                sum.add_term(sign, g)?;
            }
        }
        Ok(sum)
    }

    /// The faces that are not empty.
    pub fn nonzero_faces(&self) -> Result<Vec<WitnessFace>> {
        Ok(self.faces()?.into_iter().filter(|f| !f.graphs.is_empty()).collect())
    }
}

fn is_one(s: &TruncatedSeries) -> bool {
    (s - &TruncatedSeries::one(s.field(), s.precision())).is_zero()
}

fn solve_face(eqs: &[MultiPoly], skip: usize, nvars: usize) -> Result<Option<Vec<TruncatedSeries>>> {
    let mut known: Vec<Option<TruncatedSeries>> = vec![None; nvars];
    let mut pending: Vec<MultiPoly> = eqs.to_vec();
    loop {
        let mut progressed = false;
        let mut rest = Vec::with_capacity(pending.len());
        for e in pending {
            let mut e = e;
            for (j, v) in known.iter().enumerate() {
                if let Some(v) = v {
                    if e.involves(j) {
                        e = e.substitute_unchecked(j, &MultiPoly::constant(v.clone(), nvars));
                    }
                }
            }
            let unknown: Vec<usize> = (0..nvars).filter(|&j| j != skip && e.involves(j)).collect();
            match unknown.as_slice() {
                [] => match e.as_constant() {
                    Some(c) if c.is_zero() => {}
                    _ => return Ok(None),
                },
                [j] if e.degree_in(*j) == Some(1) => {
                    let lead = e.coefficient_in(*j, 1).as_constant();
                    let cst = e.coefficient_in(*j, 0).as_constant();
                    match (lead, cst) {
                        (Some(l), Some(c)) if l.is_unit() => {
                            known[*j] = Some(-&(&c * &l.invert()?));
                            progressed = true;
                        }
                        _ => rest.push(e),
                    }
                }
                _ => rest.push(e),
            }
        }
        pending = rest;
        if pending.is_empty() {
            break;
        }
        if !progressed {
            return Err(Error::Unsupported("face system is not triangular".into()));
        }
    }
    let mut coords = Vec::with_capacity(nvars - 1);
    for (j, v) in known.into_iter().enumerate() {
        if j == skip {
            continue;
        }
        match v {
            Some(v) => coords.push(v),
            None => return Err(Error::Unsupported(format!("face leaves y{} undetermined", j + 1))),
        }
    }
    if coords.iter().any(is_one) {
        return Ok(None);
    }
    if !coords.iter().all(TruncatedSeries::is_unit) {
        return Err(Error::Unsupported("witness curve meets a face of codimension two".into()));
    }
    Ok(Some(coords))
}

fn check_entry(name: &str, s: &TruncatedSeries) -> Result<()> {
    if !s.is_unit() {
        return Err(Error::NotAUnit(format!("{name} = {s}")));
    }
    if is_one(s) {
        return Err(Error::ExcludedValue(format!("{name} = 1")));
    }
    Ok(())
}

fn constant_map(v: &TruncatedSeries) -> Mobius {
    let z = TruncatedSeries::zero(v.field(), v.precision());
    Mobius { a: z.clone(), b: v.clone(), c: z, d: TruncatedSeries::one(v.field(), v.precision()) }
}

fn common(a: &TruncatedSeries, rest: &[&TruncatedSeries]) -> Result<(FieldSpec, usize)> {
    let field = a.field();
    let mut prec = a.precision();
    for r in rest {
        if r.field() != field {
            return Err(Error::MixedFields(field, r.field()));
        }
        prec = prec.min(r.precision());
    }
    Ok((field, prec))
}

/// The curve `x ↦ (x, 1-x, (a-x)/(1-x), a_3, …)` whose only nonempty face
/// is `∂_3^0 = Γ_{(a, 1-a, a_3, …)}`.
pub fn steinberg_witness(a: &TruncatedSeries, tail: &[TruncatedSeries]) -> Result<Witness> {
    let (field, prec) = common(a, &tail.iter().collect::<Vec<_>>())?;
    let a = a.truncated_to(prec);
    let one = TruncatedSeries::one(field, prec);
    let zero = TruncatedSeries::zero(field, prec);
    check_entry("a", &a)?;
    if !a.constant_term().checked_sub(&field.one())?.is_zero() {
        check_entry("1-a", &(&one - &a))?;
    } else {
        return Err(Error::ExcludedValue("a ≡ 1 mod t".into()));
    }
    for (k, s) in tail.iter().enumerate() {
        check_entry(&format!("a{}", k + 3), s)?;
    }
    let nvars = 3 + tail.len();
    let y = |j| MultiPoly::var(field, nvars, prec, j);
    let cst = |s: &TruncatedSeries| MultiPoly::constant(s.truncated_to(prec), nvars);
    let onep = MultiPoly::one(field, nvars, prec);
    let mut equations = vec![
        &(&y(0) + &y(1)) - &onep,
        &(&(&onep - &y(0)) * &y(2)) - &(&cst(&a) - &y(0)),
    ];
    let mut param = vec![
        Mobius { a: one.clone(), b: zero.clone(), c: zero.clone(), d: one.clone() },
        Mobius { a: -&one, b: one.clone(), c: zero.clone(), d: one.clone() },
        Mobius { a: -&one, b: a.clone(), c: -&one, d: one.clone() },
    ];
    for (k, s) in tail.iter().enumerate() {
        equations.push(&y(3 + k) - &cst(s));
        param.push(constant_map(&s.truncated_to(prec)));
    }
    Ok(Witness { field, precision: prec, nvars, equations, param })
}

/// The curve `x ↦ (x, (a·x - a·b)/(x - a·b), a_2, …)` with faces
/// `∂_1^∞ = Γ_a`, `∂_2^0 = Γ_b` and `∂_2^∞ = Γ_{ab}` (tails appended).
pub fn product_witness(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    tail: &[TruncatedSeries],
) -> Result<Witness> {
    let mut rest: Vec<&TruncatedSeries> = vec![b];
    rest.extend(tail);
    let (field, prec) = common(a, &rest)?;
    let (a, b) = (a.truncated_to(prec), b.truncated_to(prec));
    let ab = &a * &b;
    check_entry("a", &a)?;
    check_entry("b", &b)?;
    check_entry("ab", &ab)?;
    for (k, s) in tail.iter().enumerate() {
        check_entry(&format!("a{}", k + 2), s)?;
    }
    let nvars = 2 + tail.len();
    let one = TruncatedSeries::one(field, prec);
    let y = |j| MultiPoly::var(field, nvars, prec, j);
    let cst = |s: &TruncatedSeries| MultiPoly::constant(s.truncated_to(prec), nvars);
    let mut equations =
        vec![&(&y(1) * &(&y(0) - &cst(&ab))) - &(&cst(&a) * &(&y(0) - &cst(&b)))];
    let mut param = vec![
        Mobius { a: one.clone(), b: TruncatedSeries::zero(field, prec), c: TruncatedSeries::zero(field, prec), d: one.clone() },
        Mobius { a: a.clone(), b: -&ab, c: one, d: -&ab },
    ];
    for (k, s) in tail.iter().enumerate() {
        equations.push(&y(2 + k) - &cst(s));
        param.push(constant_map(&s.truncated_to(prec)));
    }
    Ok(Witness { field, precision: prec, nvars, equations, param })
}
