use super::*;
use crate::exactnum::{PrimeField, Rat, Rationals};
use proptest::prelude::*;

fn f2() -> PrimeField {
    PrimeField::new(2).unwrap()
}

fn lp(field: PrimeField, s: &str) -> LaurentPoly<FpElem> {
    LaurentPoly::parse(field, s).unwrap()
}

fn lq(s: &str) -> LaurentPoly<Rat> {
    LaurentPoly::parse(Rationals, s).unwrap()
}

const TABLE: [&str; 8] = ["t", "1", "t^2", "0", "t^6 + t^12", "0", "t^4", "0"];

fn table_derivation(window: Window) -> HSDerivation<FpElem> {
    let images = TABLE.iter().map(|s| lp(f2(), s)).collect();
    HSDerivation::from_table(f2(), images, window).unwrap()
}

fn honda_canonical() -> HSDerivation<FpElem> {
    let law = FormalGroupLaw::honda(2, 2, 17).unwrap();
    HSDerivation::canonical(&law, 8, Window::for_law(law.kind(), 8, 17)).unwrap()
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

#[test]
fn window_parsing_and_defaults() {
    assert_eq!("-9:32".parse::<Window>().unwrap(), Window { lo: -9, hi: 32 });
    assert!("5:1".parse::<Window>().is_err());
    assert!("5".parse::<Window>().is_err());
    let w = Window::for_law(LawKind::Honda { p: 2, h: 2 }, 8, 17);
    assert_eq!(w.to_string(), "-9:32");
    assert_eq!(Window::for_law(LawKind::Additive, 16, 33).to_string(), "-17:16");
}

#[test]
fn canonical_additive_and_multiplicative() {
    let add = FormalGroupLaw::<FpElem>::additive(f2(), 9).unwrap();
    let d = HSDerivation::canonical(&add, 8, Window::unbounded()).unwrap();
    assert_eq!(d.image(1).unwrap(), &lp(f2(), "1"));
    assert!((2..8).all(|n| d.image(n).unwrap().is_zero()));

    let mult = FormalGroupLaw::<FpElem>::multiplicative(f2(), 9).unwrap();
    let d = HSDerivation::canonical(&mult, 8, Window::unbounded()).unwrap();
    assert_eq!(d.image(1).unwrap(), &lp(f2(), "1 + t"));
    assert!((2..8).all(|n| d.image(n).unwrap().is_zero()));
}

#[test]
fn canonical_honda_matches_table() {
    assert_eq!(honda_canonical(), table_derivation(Window::for_law(LawKind::Honda { p: 2, h: 2 }, 8, 17)));
}

#[test]
fn canonical_rejects_unstabilized_or_narrow() {
    let law = FormalGroupLaw::honda(2, 2, 8).unwrap();
    // Y^4 is only known mod X^4 here, so t^6 + t^12 cannot be seen yet
    assert_eq!(
        HSDerivation::canonical(&law, 8, Window::unbounded()),
        Err(HsdError::InsufficientPrecision { order: 4, precision: 8 })
    );
    assert!(matches!(
        HSDerivation::canonical(&law, 9, Window::unbounded()),
        Err(HsdError::InsufficientPrecision { .. })
    ));
    let law = FormalGroupLaw::honda(2, 2, 17).unwrap();
    assert!(matches!(
        HSDerivation::canonical(&law, 8, Window::new(-9, 10).unwrap()),
        Err(HsdError::WindowOverflow { exponent: 12, .. })
    ));
}

#[test]
fn table_validation() {
    let bad = vec![lp(f2(), "1"), lp(f2(), "1")];
    assert!(matches!(
        HSDerivation::from_table(f2(), bad, Window::unbounded()),
        Err(HsdError::InvalidTable(_))
    ));
    assert!(matches!(
        HSDerivation::<FpElem>::from_table(f2(), vec![], Window::unbounded()),
        Err(HsdError::InvalidTable(_))
    ));
}

#[test]
fn apply_examples() {
    let add = HSDerivation::from_table(Rationals, vec![lq("t"), lq("1"), lq("0")], Window::unbounded()).unwrap();
    assert_eq!(add.apply(&lq("t^3"), 2).unwrap(), lq("3*t"));
    assert_eq!(
        add.apply(&lq("t"), 3),
        Err(HsdError::OrderOutOfRange { n: 3, bound: 3 })
    );

    let mult = HSDerivation::from_table(f2(), vec![lp(f2(), "t"), lp(f2(), "1 + t")], Window::unbounded()).unwrap();
    assert_eq!(mult.apply(&lp(f2(), "t^-1"), 1).unwrap(), lp(f2(), "t^-1 + t^-2"));

    let d = honda_canonical();
    assert_eq!(
        d.apply(&lp(f2(), "t^-1"), 4).unwrap(),
        lp(f2(), "t^10 + t^4 + t + t^-2 + t^-5")
    );
}

#[test]
fn inverse_image_examples() {
    let d = honda_canonical();
    let inv = d.inverse_image(8).unwrap();
    // reference values from a separate script running the recursion mod 2
    let expected = [
        "t^-1",
        "t^-2",
        "1 + t^-3",
        "t^-4",
        "t^10 + t^4 + t + t^-2 + t^-5",
        "1 + t^-6",
        "t^8 + t^2 + t^-4 + t^-7",
        "t^-8",
    ];
    for (n, e) in expected.iter().enumerate() {
        assert_eq!(inv[n], lp(f2(), e), "n = {n}");
    }
    assert_eq!(inv[4].to_string(), "t^10 + t^4 + t + t^-2 + t^-5");
    assert!(matches!(d.inverse_image(9), Err(HsdError::OrderOutOfRange { .. })));

    let add = FormalGroupLaw::<Rat>::additive(Rationals, 13).unwrap();
    let d = HSDerivation::canonical(&add, 6, Window::unbounded()).unwrap();
    for (n, q) in d.inverse_image(6).unwrap().into_iter().enumerate() {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(q, LaurentPoly::monomial(Rat::from(sign), -(n as i64) - 1));
    }
}

#[test]
fn leibniz_examples() {
    let d = honda_canonical();
    let one = lp(f2(), "1");
    for n in 0..8 {
        assert!(d.check_leibniz(&one, &one, n).unwrap());
    }
    assert!(d.check_leibniz(&lp(f2(), "t"), &lp(f2(), "t^-1"), 4).unwrap());

    let add = HSDerivation::from_table(Rationals, vec![lq("t"), lq("1"), lq("0")], Window::unbounded()).unwrap();
    assert!(add.check_leibniz(&lq("t"), &lq("t^2"), 2).unwrap());
    assert_eq!(add.apply(&lq("t^3"), 2).unwrap(), lq("3*t"));
}

#[test]
fn iterativity_examples() {
    let add = FormalGroupLaw::<FpElem>::additive(f2(), 9).unwrap();
    let d = HSDerivation::canonical(&add, 8, Window::unbounded()).unwrap();
    assert!(d.check_iterativity(&add).unwrap().passed());

    let honda = FormalGroupLaw::honda(2, 2, 17).unwrap();
    let f3 = honda.truncate(3).unwrap();
    let table = table_derivation(Window::for_law(honda.kind(), 8, 17));
    let report = table.check_truncated_iterativity(&f3).unwrap();
    assert!(report.passed(), "{report}");
    assert_eq!(report.to_string(), "PASS (i, j < 8 (m = 3))");

    let mut images: Vec<_> = TABLE.iter().map(|s| lp(f2(), s)).collect();
    images[2] = lp(f2(), "t");
    let altered = HSDerivation::from_table(f2(), images, Window::for_law(honda.kind(), 8, 17)).unwrap();
    let report = altered.check_truncated_iterativity(&f3).unwrap();
    let m = report.failure.expect("perturbed table must fail");
    assert!(m.i + m.j < 8);
    assert_ne!(m.lhs, m.rhs);

    assert_eq!(
        table.check_truncated_iterativity(&honda.truncate(2).unwrap()),
        Err(HsdError::BoundMismatch { bound: 8, expected: 4 })
    );
}

#[test]
fn full_iterativity_for_honda() {
    let honda = FormalGroupLaw::honda(2, 2, 17).unwrap();
    let d = honda_canonical();
    assert!(d.check_iterativity(&honda).unwrap().passed());
}

#[test]
fn iterativity_needs_enough_precision() {
    let add = FormalGroupLaw::<FpElem>::additive(f2(), 9).unwrap();
    let d = HSDerivation::canonical(&add, 8, Window::unbounded()).unwrap();
    let short = FormalGroupLaw::<FpElem>::additive(f2(), 4).unwrap();
    assert!(matches!(d.check_iterativity(&short), Err(HsdError::InsufficientPrecision { .. })));
}

#[test]
fn additive_binomial_iterativity() {
    let add = FormalGroupLaw::<Rat>::additive(Rationals, 17).unwrap();
    let d = HSDerivation::canonical(&add, 8, Window::unbounded()).unwrap();
    for q in ["t", "t^3", "t^-1", "2*t^5 - t^-2 + 1"] {
        let q = lq(q);
        for i in 0..8 {
            for j in 0..8 - i {
                let lhs = d.apply(&d.apply(&q, j).unwrap(), i).unwrap();
                let c = Rat::from(binomial((i + j) as u64, i as u64));
                let rhs = d.apply(&q, i + j).unwrap().scale(&c);
                assert_eq!(lhs, rhs, "q = {q}, i = {i}, j = {j}");
            }
        }
    }
}

#[test]
fn p1_examples() {
    let d = honda_canonical();
    let report = d.check_p1_extendable(8).unwrap();
    assert_eq!(report.to_string(), "FAIL at n=4; offending: t^10, t^4, t");
    assert!(d.check_p1_extendable(4).unwrap().passed());

    for law in [
        FormalGroupLaw::<FpElem>::additive(f2(), 33).unwrap(),
        FormalGroupLaw::<FpElem>::multiplicative(f2(), 33).unwrap(),
    ] {
        let d = HSDerivation::canonical(&law, 16, Window::for_law(law.kind(), 16, 33)).unwrap();
        let report = d.check_p1_extendable(16).unwrap();
        assert!(report.passed());
        assert_eq!(report.to_string(), "PASS (n < 16)");
    }
}

fn arb_laurent(p: u64) -> impl Strategy<Value = LaurentPoly<FpElem>> {
    let field = PrimeField::new(p).unwrap();
    prop::collection::vec((-4i64..6, 0u64..p), 0..4).prop_map(move |terms| {
        LaurentPoly::from_terms(field, terms.into_iter().map(|(e, c)| (e, FpElem::new(field, c))))
    })
}

fn arb_table(p: u64, bound: usize) -> impl Strategy<Value = HSDerivation<FpElem>> {
    let field = PrimeField::new(p).unwrap();
    prop::collection::vec(arb_laurent(p), bound - 1).prop_map(move |rest| {
        let mut images = vec![LaurentPoly::t(field)];
        images.extend(rest);
        HSDerivation::from_table(field, images, Window::unbounded()).unwrap()
    })
}

fn arb_rat_poly() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..8, -5i64..6), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leibniz_holds(d in arb_table(3, 5), q in arb_laurent(3), r in arb_laurent(3), n in 0usize..5) {
        prop_assert!(d.check_leibniz(&q, &r, n).unwrap());
    }

    #[test]
    fn apply_is_additive(d in arb_table(2, 6), q in arb_laurent(2), r in arb_laurent(2), n in 0usize..6) {
        let lhs = d.apply(&(&q + &r), n).unwrap();
        let rhs = &d.apply(&q, n).unwrap() + &d.apply(&r, n).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_routes_agree(d in arb_table(5, 6)) {
        let t_inv = LaurentPoly::t_pow(d.field(), -1);
        let recursion = d.inverse_image(6).unwrap();
        let series = d.apply_series(&t_inv, 6).unwrap();
        prop_assert_eq!(recursion.as_slice(), series.coeffs());
    }

    #[test]
    fn p1_at_order_two_is_a_degree_bound(d in arb_table(3, 2)) {
        let deg_ok = d.image(1).unwrap().max_exp().is_none_or(|e| e <= 2);
        prop_assert_eq!(d.check_p1_extendable(2).unwrap().passed(), deg_ok);
    }

    #[test]
    fn additive_closed_form(terms in arb_rat_poly(), n in 0usize..8) {
        let add = HSDerivation::from_table(
            Rationals,
            (0..8).map(|k| match k { 0 => lq("t"), 1 => lq("1"), _ => lq("0") }).collect(),
            Window::unbounded(),
        ).unwrap();
        let q = LaurentPoly::from_terms(Rationals, terms.iter().map(|&(e, c)| (e, Rat::from(c))));
        let expected = LaurentPoly::from_terms(
            Rationals,
            q.terms()
                .filter(|&(e, _)| e >= n as i64)
                .map(|(e, a)| (e - n as i64, a.clone() * Rat::from(binomial(e as u64, n as u64)))),
        );
        prop_assert_eq!(add.apply(&q, n).unwrap(), expected);
    }
}

#[test]
fn prolongations_are_iterative_and_canonical() {
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p).unwrap();
        let n = 2 * p as usize + 1;
        let add = FormalGroupLaw::<FpElem>::additive(field, n).unwrap();
        let mult = FormalGroupLaw::<FpElem>::multiplicative(field, n).unwrap();

        let ga = Derivation::new(lp(field, "1")).prolong_additive().unwrap();
        assert!(ga.check_truncated_iterativity(&add.truncate(1).unwrap()).unwrap().passed());
        let canonical = HSDerivation::canonical(&add, p as usize, Window::unbounded()).unwrap();
        assert_eq!(ga, canonical);

        let gm = Derivation::new(lp(field, "1 + t")).prolong_multiplicative().unwrap();
        assert!(gm.check_truncated_iterativity(&mult.truncate(1).unwrap()).unwrap().passed());
        let canonical = HSDerivation::canonical(&mult, p as usize, Window::unbounded()).unwrap();
        assert_eq!(gm, canonical);

        // a·t·d/dt is multiplicatively restricted for every a ≠ 0
        for a in 1..p {
            let d = Derivation::new(LaurentPoly::monomial(field.elem(a as i64), 1));
            let gm = d.prolong_multiplicative().unwrap();
            let report = gm.check_truncated_iterativity(&mult.truncate(1).unwrap()).unwrap();
            assert!(report.passed(), "p = {p}, a = {a}: {report}");
        }
    }
}
