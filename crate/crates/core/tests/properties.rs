use fatpoint::cycles::{graph, mod_i_equivalent, TriangularCycle};
use fatpoint::milnor::MilnorSymbolSum;
use fatpoint::mpoly::{Monomial, MultiPoly};
use fatpoint::reduction::{regulator, replay_trace};
use fatpoint::scalars::FieldSpec;
use fatpoint::tseries::TruncatedSeries;
use fatpoint::witt::WittVector;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(FieldSpec::Rationals), Just(FieldSpec::PrimeField(101))]
}

fn series(f: FieldSpec, prec: usize) -> impl Strategy<Value = TruncatedSeries> {
    proptest::collection::vec(-7i64..8, prec).prop_map(move |c| TruncatedSeries::from_ints(f, &c, prec))
}

fn unit(f: FieldSpec, prec: usize) -> impl Strategy<Value = TruncatedSeries> {
    (1i64..8, proptest::collection::vec(-7i64..8, prec - 1)).prop_map(move |(c0, rest)| {
        let mut c = vec![c0 + 1];
        c.extend(rest);
        TruncatedSeries::from_ints(f, &c, prec)
    })
}

fn poly(f: FieldSpec, n: usize, prec: usize) -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec((proptest::collection::vec(0u32..4, n), series(f, prec)), 0..6)
        .prop_map(move |t| MultiPoly::from_terms(f, n, prec, t.into_iter().map(|(e, c)| (Monomial(e), c))).unwrap())
}

fn monic(f: FieldSpec, n: usize, prec: usize, var: usize) -> impl Strategy<Value = MultiPoly> {
    (1u32..4, poly(f, n, prec)).prop_map(move |(d, lower)| {
        let mut lead = vec![0; n];
        lead[var] = d;
        let mut g = MultiPoly::term(Monomial(lead), TruncatedSeries::one(f, prec));
        for (m, c) in lower.terms() {
            if m.0[var] < d {
                g = &g + &MultiPoly::term(m.clone(), c.clone());
            }
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_laws((a, b, c) in field().prop_flat_map(|f| (series(f, 6), series(f, 6), series(f, 6)))) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn unit_inverses(u in field().prop_flat_map(|f| unit(f, 7))) {
        prop_assume!(u.is_unit());
        prop_assert!((&u * &u.invert().unwrap()).is_one());
    }

    #[test]
    fn division_is_exact((f, g) in (field(), 1usize..=3).prop_flat_map(|(fl, n)| (poly(fl, n, 5), monic(fl, n, 5, n - 1)))) {
        let var = f.nvars() - 1;
        let (q, r) = f.divide_monic(&g, var).unwrap();
        prop_assert_eq!(&(&q * &g) + &r, f);
        prop_assert!(r.degree_in(var).is_none_or(|d| Some(d) < g.degree_in(var)));
    }

    #[test]
    fn graphs_regulate_to_themselves(a in field().prop_flat_map(|f| proptest::collection::vec(unit(f, 8), 1..=3)), m in 1usize..=4) {
        prop_assume!(a.iter().all(|x| x.is_unit() && !x.is_one()));
        let (sym, trace) = regulator(&graph(&a).unwrap(), m).unwrap();
        prop_assert_eq!(sym, MilnorSymbolSum::symbol(1, &a, m).unwrap());
        prop_assert!(replay_trace(&trace).is_verified());
    }

    #[test]
    fn quadratic_regulators_replay(
        (c0, c1) in field().prop_flat_map(|f| (unit(f, 8), series(f, 8))),
        m in 1usize..=4,
    ) {
        let f = c0.field();
        let p = MultiPoly::from_terms(f, 1, 8, [
            (Monomial(vec![2]), TruncatedSeries::one(f, 8)),
            (Monomial(vec![1]), c1),
            (Monomial(vec![0]), c0.clone()),
        ]).unwrap();
        let c = TriangularCycle::new(vec![p], 1).unwrap();
        prop_assume!(c.validate().is_ok());
        let (sym, trace) = regulator(&c, m).unwrap();
        prop_assert!(replay_trace(&trace).is_verified());
        prop_assert_eq!(sym.k1_normal_form().unwrap(), c0.truncate(m).unwrap());
        prop_assert!(mod_i_equivalent(&c, &c, m).unwrap());
    }

    #[test]
    fn witt_addition_is_series_product((x, y) in field().prop_flat_map(|f| (series(f, 5), series(f, 5)))) {
        let f = x.field();
        let lift = |s: &TruncatedSeries| {
            let mut c = s.coeffs().to_vec();
            c[0] = f.one();
            WittVector::from_series(&TruncatedSeries::new(f, c).unwrap(), 4).unwrap()
        };
        let (wx, wy) = (lift(&x), lift(&y));
        let sum = wx.add(&wy).unwrap();
        prop_assert_eq!(sum.series(), &(wx.series() * wy.series()));
        prop_assert_eq!(WittVector::from_coordinates(f, &wx.coordinates()).unwrap(), wx);
    }
}
