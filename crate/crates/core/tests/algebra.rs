use num_bigint::BigInt;
use proptest::prelude::*;
use qkwhitney::algebra::gcd::poly_gcd;
use qkwhitney::algebra::text::{parse_qseries, parse_rational_function};
use qkwhitney::algebra::{elem_sym, Laurent, Mono, QSeries};
use qkwhitney::scalar::Ring;
use qkwhitney::{Degree, Error, LaurentPolynomial, QSeriesRF, RationalFunction};

fn lp(terms: &[(&[i32], i64)]) -> LaurentPolynomial {
    Laurent::from_terms(terms.iter().map(|(e, c)| (Mono::new(e), BigInt::from(*c))))
}

fn rf(s: &str) -> RationalFunction {
    parse_rational_function(s).unwrap()
}

fn laurent_strategy(nvars: usize, neg: bool) -> impl Strategy<Value = LaurentPolynomial> {
    let lo = if neg { -2 } else { 0 };
    prop::collection::vec((prop::collection::vec(lo..=2i32, nvars), -4i64..=4), 0..4)
        .prop_map(|ts| Laurent::from_terms(ts.into_iter().map(|(e, c)| (Mono::new(&e), BigInt::from(c)))))
}

fn nonzero_poly(nvars: usize) -> impl Strategy<Value = LaurentPolynomial> {
    laurent_strategy(nvars, false).prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfun_strategy() -> impl Strategy<Value = RationalFunction> {
    (laurent_strategy(3, true), nonzero_poly(3)).prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}

#[test]
fn geometric_series_truncates_to_one() {
    let k = 1;
    let one_minus = QSeries::<BigInt>::one_minus_q(k, 2, 0);
    let mut geo = QSeries::<BigInt>::zero(k, 2);
    for e in 0..=2 {
        geo.add_term(Degree::new(vec![e]), &BigInt::from(1));
    }
    assert_eq!(one_minus.mul(&geo).unwrap(), QSeries::one(k, 2));
}

#[test]
fn reciprocal_sum_is_one() {
    let a = rf("1/(1 - T1/T2)");
    let b = rf("1/(1 - T2/T1)");
    assert_eq!(a.add_ref(&b), RationalFunction::from_i64(1));
}

#[test]
fn distinct_error_kinds() {
    let z = RationalFunction::from_i64(0);
    assert_eq!(RationalFunction::from_i64(1).div(&z), Err(Error::DivisionByZero));
    assert_eq!(RationalFunction::new(lp(&[(&[1], 1)]), Laurent::zero()), Err(Error::DivisionByZero));
    let a = QSeries::<BigInt>::one(2, 2);
    let b = QSeries::<BigInt>::one(2, 3);
    assert!(matches!(a.mul(&b), Err(Error::MismatchedTruncation { .. })));
    let q = QSeries::<BigInt>::monomial(2, 2, Degree::new(vec![1, 0]), BigInt::from(1));
    assert_eq!(q.inverse(), Err(Error::NotAUnit));
    let two = QSeries::<BigInt>::constant(1, 2, BigInt::from(2));
    assert_eq!(two.inverse(), Err(Error::NotAUnit));
}

#[test]
fn canonical_form_fixes_sign_and_monomials() {
    // (T1^2 - T1 T2) / (T2^2 - T1 T2) = -T1/T2
    let f = RationalFunction::new(lp(&[(&[2], 1), (&[1, 1], -1)]), lp(&[(&[0, 2], 1), (&[1, 1], -1)])).unwrap();
    assert_eq!(f, rf("-T1*T2^-1"));
    assert!(f.is_laurent());
    // Denominator leading coefficient is positive and free of monomial factors.
    let g = RationalFunction::new(lp(&[(&[0], 1)]), lp(&[(&[2, 1], -2), (&[0, 1], 2)])).unwrap();
    assert_eq!(g.den(), &lp(&[(&[2], 2), (&[], -2)]));
    assert_eq!(g.num(), &lp(&[(&[0, -1], -1)]));
    assert_eq!(g, rf("-1/(2*T2*(T1^2 - 1))"));
}

#[test]
fn gcd_recovers_planted_factor() {
    let g = rf("T1 - T2").num().clone();
    let a = g.mul_ref(&rf("T1 + T3^2 + 3").num().clone());
    let b = g.mul_ref(&rf("T2*T3 - 5*T1 + 1").num().clone());
    assert_eq!(poly_gcd(&a, &b), g.normalize_sign());
    let c = rf("2*T1 + 2").num().clone();
    let d = rf("4*T1^2 - 4").num().clone();
    assert_eq!(poly_gcd(&c, &d), rf("2*T1 + 2").num().clone());
}

#[test]
fn elementary_symmetric_small_cases() {
    let xs: Vec<RationalFunction> = (0..3).map(RationalFunction::var).collect();
    assert_eq!(elem_sym(0, &xs), RationalFunction::from_i64(1));
    assert_eq!(elem_sym(2, &xs), rf("T1*T2 + T1*T3 + T2*T3"));
    assert_eq!(elem_sym(4, &xs), RationalFunction::from_i64(0));
}

#[test]
fn qseries_text_round_trip() {
    let s = parse_qseries("(T1 - T2) + (1/(1 - T1))*q1*q2^2 + q2", 2, 2).unwrap();
    let back = parse_qseries(&s.to_string(), 2, 2).unwrap();
    assert_eq!(s, back);
    assert_eq!(s.coeff(&Degree::new(vec![0, 1])), RationalFunction::from_i64(1));
}

#[test]
fn qseries_inverse_of_one_minus_q() {
    let a = QSeriesRF::one_minus_q(2, 3, 1);
    let inv = a.inverse().unwrap();
    for e in 0..=3 {
        assert_eq!(inv.coeff(&Degree::new(vec![0, e])), RationalFunction::from_i64(1));
    }
    assert_eq!(inv.coeff(&Degree::new(vec![1, 0])), RationalFunction::from_i64(0));
}

fn qseries_strategy(bound: u32) -> impl Strategy<Value = QSeriesRF> {
    (
        ratfun_strategy().prop_filter("unit", |c| !c.num().is_zero()),
        prop::collection::vec(((0..=bound, 0..=bound), ratfun_strategy()), 0..4),
    )
        .prop_map(move |(c0, rest)| {
            let mut s = QSeriesRF::constant(2, bound, c0);
            for ((a, b), c) in rest {
                if a + b > 0 {
                    s.add_term(Degree::new(vec![a, b]), &c);
                }
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laurent_ring_axioms(a in laurent_strategy(3, true), b in laurent_strategy(3, true), c in laurent_strategy(3, true)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &a), &Laurent::zero());
    }

    #[test]
    fn ratfun_ring_axioms(a in ratfun_strategy(), b in ratfun_strategy(), c in ratfun_strategy()) {
        prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
        prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
        prop_assert_eq!(a.add_ref(&b).add_ref(&c), a.add_ref(&b.add_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
        if !b.num().is_zero() {
            prop_assert_eq!(a.div(&b).unwrap().mul_ref(&b), a.clone());
        }
    }

    #[test]
    fn canonicalization_is_idempotent(a in ratfun_strategy()) {
        prop_assert_eq!(a.recanonicalize(), a.clone());
    }

    #[test]
    fn text_round_trip(a in ratfun_strategy()) {
        prop_assert_eq!(parse_rational_function(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn gcd_divides_both(a in nonzero_poly(3), b in nonzero_poly(3), g in nonzero_poly(3)) {
        let x = a.mul_ref(&g);
        let y = b.mul_ref(&g);
        let h = poly_gcd(&x, &y);
        prop_assert!(x.div_exact(&h).is_some());
        prop_assert!(y.div_exact(&h).is_some());
        prop_assert!(h.div_exact(&g.normalize_sign()).is_some() || h.div_exact(&g).is_some());
    }

    #[test]
    fn qseries_inverse_is_involutive(a in qseries_strategy(1), b in qseries_strategy(2), c in qseries_strategy(3)) {
        for s in [a, b, c] {
            let inv = s.inverse().unwrap();
            prop_assert_eq!(inv.inverse().unwrap(), s.clone());
            prop_assert_eq!(inv.mul(&s).unwrap(), QSeriesRF::one(2, s.bound()));
        }
    }
}

/// Equality of canonical forms agrees with cross-multiplication.
#[test]
fn equality_matches_cross_multiplication() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> LaurentPolynomial {
        let nt = rng.gen_range(1..=3);
        Laurent::from_terms((0..nt).map(|_| {
            let e: Vec<i32> = (0..2).map(|_| rng.gen_range(0..=1)).collect();
            (Mono::new(&e), BigInt::from(rng.gen_range(-2i64..=2)))
        }))
    };
    let mut equal_pairs = 0;
    for _ in 0..1000 {
        let (a, b, c, d) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        if b.is_zero() || d.is_zero() {
            continue;
        }
        // Plant equality half of the time.
        let (c, d) = if rng.gen_bool(0.5) {
            let m = pick(&mut rng);
            if m.is_zero() {
                (c, d)
            } else {
                (a.mul_ref(&m), b.mul_ref(&m))
            }
        } else {
            (c, d)
        };
        let x = RationalFunction::new(a.clone(), b.clone()).unwrap();
        let y = RationalFunction::new(c.clone(), d.clone()).unwrap();
        let cross = a.mul_ref(&d) == c.mul_ref(&b);
        assert_eq!(x == y, cross, "{x} vs {y}");
        equal_pairs += usize::from(cross);
    }
    assert!(equal_pairs > 100);
}
