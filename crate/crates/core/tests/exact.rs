mod common;

use std::cmp::Ordering;

use num::{BigInt, BigRational, Signed, Zero};
use proptest::prelude::*;

use common::*;
use stabkit::exact::eventual_sign_threshold;
use stabkit::{poly_compare, FieldKind, Poly, Scalar};

fn poly(coeffs: &[BigRational]) -> Poly {
    Poly::new(to_scalars(coeffs))
}

/// Horner evaluation over plain rationals.
fn eval_rat(coeffs: &[BigRational], m: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * m + c)
}

fn trimmed(coeffs: &[BigRational]) -> &[BigRational] {
    let len = coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |k| k + 1);
    &coeffs[..len]
}

/// Sign for `m ≫ 0`, read off at a point beyond the Cauchy root bound.
fn eventual_sign(coeffs: &[BigRational]) -> Ordering {
    let c = trimmed(coeffs);
    let Some(lead) = c.last() else {
        return Ordering::Equal;
    };
    let bound = c[..c.len() - 1]
        .iter()
        .map(|x| (x / lead).abs())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    let m = bound + rat(1);
    eval_rat(c, &m).cmp(&BigRational::zero())
}

#[test]
fn compare_examples() {
    let sq = Poly::from_ints(&[0, 0, 1]);
    assert_eq!(poly_compare(&sq, &sq).unwrap(), Ordering::Equal);
    assert_eq!(
        poly_compare(&Poly::from_ints(&[0, 4, 1]), &Poly::from_ints(&[0, 5, 1])).unwrap(),
        Ordering::Less
    );

    let p = [rat(0), rat(1), rat(0), frac(1, 6)];
    let q = [rat(0), rat(0), rat(100)];
    assert_eq!(poly_compare(&poly(&p), &poly(&q)).unwrap(), Ordering::Greater);
    let m = rat(10_000);
    assert!(eval_rat(&p, &m) > eval_rat(&q, &m));
}

#[test]
fn compare_across_fields() {
    // m + √2 against m + 1
    let root2 = Scalar::sqrt_of(2).unwrap();
    let p = Poly::new(vec![root2, Scalar::one()]);
    let q = Poly::from_ints(&[1, 1]);
    assert_eq!(poly_compare(&p, &q).unwrap(), Ordering::Greater);

    let root3 = Poly::constant(Scalar::sqrt_of(3).unwrap());
    assert!(poly_compare(&p, &root3).is_err());
}

#[test]
fn threshold_examples() {
    assert_eq!(eventual_sign_threshold(&Poly::from_ints(&[-5, 1])).unwrap(), 6);
    assert_eq!(eventual_sign_threshold(&Poly::from_ints(&[0, 0, 1])).unwrap(), 1);
    assert_eq!(eventual_sign_threshold(&Poly::from_ints(&[7])).unwrap(), 0);

    // m − 5 is zero at 5 and positive from 6 onward
    let p = [rat(-5), rat(1)];
    assert!(eval_rat(&p, &rat(5)).is_zero());
    assert!((6..100).all(|m| eval_rat(&p, &rat(m)).is_positive()));
}

#[test]
fn evaluation_examples() {
    assert_eq!(Poly::from_ints(&[1, 0, 1]).eval_int(2).unwrap(), Scalar::int(5));
    assert_eq!(Poly::zero().eval_int(17).unwrap(), Scalar::zero());
    let cube = Poly::monomial(Scalar::frac(1, 6), 3);
    assert_eq!(cube.eval_int(3).unwrap(), Scalar::frac(9, 2));
    assert_eq!(eval_rat(&[rat(0), rat(0), rat(0), frac(1, 6)], &rat(3)), frac(9, 2));
}

#[test]
fn quadratic_field_arithmetic() {
    let k = FieldKind::quad(2).unwrap();
    let a = Scalar::parse_in("1+√2", k).unwrap();
    let b = Scalar::parse_in("3-2√2", k).unwrap();
    // (1+√2)(3−2√2) = −1 + √2
    let prod = &a * &b;
    assert_eq!(prod, Scalar::parse_in("-1+√2", k).unwrap());
    assert!(prod.is_positive());
    assert_eq!(Q2::from_scalar(&prod), Q2::from_scalar(&a).mul(&Q2::from_scalar(&b)));
    assert_eq!(&a / &a, Scalar::one());
    assert_eq!(a.floor(), BigInt::from(2));
    assert_eq!(b.ceil(), BigInt::from(1));
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=6).prop_map(|(n, d)| frac(n, d))
}

fn coeff_list() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(small_rational(), 0..6)
}

fn q2_scalar() -> impl Strategy<Value = Scalar> {
    (small_rational(), small_rational()).prop_map(|(a, b)| Scalar::quad(a, b, 2).unwrap())
}

proptest! {
    #[test]
    fn compare_is_antisymmetric(p in coeff_list(), q in coeff_list()) {
        let (a, b) = (poly(&p), poly(&q));
        prop_assert_eq!(poly_compare(&a, &b).unwrap(), poly_compare(&b, &a).unwrap().reverse());
    }

    #[test]
    fn compare_matches_eventual_sign(p in coeff_list(), q in coeff_list()) {
        let n = p.len().max(q.len());
        let diff: Vec<BigRational> = (0..n)
            .map(|i| p.get(i).cloned().unwrap_or_default() - q.get(i).cloned().unwrap_or_default())
            .collect();
        prop_assert_eq!(poly_compare(&poly(&p), &poly(&q)).unwrap(), eventual_sign(&diff));
    }

    #[test]
    fn threshold_holds_and_is_tight(p in coeff_list()) {
        if trimmed(&p).is_empty() {
            prop_assert!(eventual_sign_threshold(&poly(&p)).is_err());
            return Ok(());
        }
        let m0 = eventual_sign_threshold(&poly(&p)).unwrap();
        let sign = eventual_sign(&p);
        for m in m0..m0 + 60 {
            prop_assert_eq!(eval_rat(&p, &rat(m as i64)).cmp(&BigRational::zero()), sign);
        }
        if m0 > 0 {
            prop_assert_ne!(eval_rat(&p, &rat(m0 as i64 - 1)).cmp(&BigRational::zero()), sign);
        }
    }

    #[test]
    fn rescaling_substitutes_the_argument(p in coeff_list(), t in small_rational(), m in -10i64..10) {
        let a = poly(&p);
        let t = Scalar::rational(t);
        let lhs = a.rescale_argument(&t).unwrap().eval_int(m).unwrap();
        let rhs = a.eval(&(&t * Scalar::int(m))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quadratic_ops_agree_with_pairs(a in q2_scalar(), b in q2_scalar()) {
        let (x, y) = (Q2::from_scalar(&a), Q2::from_scalar(&b));
        prop_assert_eq!(Q2::from_scalar(&(&a + &b)), x.add(&y));
        prop_assert_eq!(Q2::from_scalar(&(&a - &b)), x.sub(&y));
        prop_assert_eq!(Q2::from_scalar(&(&a * &b)), x.mul(&y));
        prop_assert_eq!(a.signum(), x.signum());
        prop_assert_eq!(a.cmp(&b), x.sub(&y).signum());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }
}
