use curvident::{Rational, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn sc(a: (i64, i64), b: (i64, i64)) -> Scalar {
    Scalar::new(Rational::new(a.0, a.1), Rational::new(b.0, b.1))
}

fn small() -> impl Strategy<Value = Scalar> {
    let part = (-60i64..=60, 1i64..=12);
    (part.clone(), part).prop_map(|(a, b)| sc(a, b))
}

/// Includes numerators near the i64 limit so products leave the small path.
fn wide() -> impl Strategy<Value = Scalar> {
    let part = (any::<i64>(), 1i64..=i64::MAX);
    prop_oneof![small(), (part.clone(), part).prop_map(|(a, b)| sc(a, b))]
}

#[test]
fn contract_examples() {
    let x: Scalar = "1/2+1/2*sqrt(3)".parse().unwrap();
    assert_eq!(x, sc((1, 2), (1, 2)));
    assert_eq!(&sc((1, 1), (1, 1)) * &sc((1, 1), (-1, 1)), Scalar::int(-2));
    assert_eq!(&Scalar::sqrt3() * &Scalar::sqrt3(), Scalar::int(3));
    assert_eq!(&sc((1, 2), (1, 2)) + &sc((1, 2), (-1, 2)), Scalar::ONE);
}

#[test]
fn canonical_text() {
    assert_eq!(Scalar::frac(-6, 4).to_string(), "-3/2");
    assert_eq!(sc((0, 1), (-2, 6)).to_string(), "0-1/3*sqrt(3)");
    assert_eq!(sc((5, 1), (7, 1)).to_string(), "5+7*sqrt(3)");
    for text in ["0", "-15", "75/4", "1/2-3*sqrt(3)", "0+1*sqrt(3)"] {
        assert_eq!(text.parse::<Scalar>().unwrap().to_string(), text);
    }
    assert_eq!("4/2".parse::<Scalar>().unwrap().to_string(), "2");
}

#[test]
fn parse_errors_name_the_token() {
    for (text, token) in [
        ("1/0", "0"),
        ("1+2", "end of input"),
        ("x", "x"),
        ("1*sqrt(3)", "*"),
        ("", "end of input"),
    ] {
        let e = text.parse::<Scalar>().unwrap_err();
        assert!(e.to_string().contains(token), "{text}: {e}");
    }
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(Scalar::ZERO.recip().is_err());
    assert!(Scalar::ONE.checked_div(&Scalar::ZERO).is_err());
    assert_eq!(sc((2, 1), (1, 1)).recip().unwrap(), sc((2, 1), (-1, 1)));
}

#[test]
fn overflow_promotes_to_big() {
    let m = Scalar::int(i64::MAX);
    let p = &m * &m;
    let expect = BigInt::from(i64::MAX) * BigInt::from(i64::MAX);
    assert_eq!(p.rat_part().to_big(), BigRational::from_integer(expect.clone()));
    assert_eq!(p.to_string(), expect.to_string());
    let back = &p / &m;
    assert_eq!(back, m);
    assert!(matches!(back.rat_part(), Rational::Small(..)));
}

#[test]
fn sign_of_mixed_terms() {
    // 7 - 4√3 ≈ 0.072, 1 - √3 < 0
    assert_eq!(sc((7, 1), (-4, 1)).signum(), 1);
    assert_eq!(sc((1, 1), (-1, 1)).signum(), -1);
    assert_eq!(sc((-7, 1), (4, 1)).abs(), sc((7, 1), (-4, 1)));
}

proptest! {
    #[test]
    fn field_axioms(a in wide(), b in wide(), c in wide()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Scalar::ONE);
        }
    }

    #[test]
    fn parse_format_round_trip(a in wide()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn norm_is_multiplicative(a in small(), b in small()) {
        prop_assert_eq!((&a * &b).norm(), &a.norm() * &b.norm());
        prop_assert_eq!(Scalar::from(a.norm()), &a * &a.conj());
    }

    #[test]
    fn order_agrees_with_floats(a in small(), b in small()) {
        let (x, y) = (a.to_f64(), b.to_f64());
        if (x - y).abs() > 1e-9 {
            prop_assert_eq!(a < b, x < y);
        }
    }
}
