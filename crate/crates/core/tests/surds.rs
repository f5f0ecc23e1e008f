//! Printed surd values expanded exactly and compared with computed minimal polynomials.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qstar::arith::Rational;
use qstar::cm::class_polynomial;
use qstar::poly::QPoly;
use qstar::report::analyze_point;

/// `a + b sqrt(d)`.
#[derive(Clone, Debug)]
struct Surd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

fn q(n: &str) -> BigRational {
    BigRational::from_integer(n.parse().unwrap())
}

impl Surd {
    fn new(a: &str, b: &str, d: i64) -> Self {
        Surd { a: q(a), b: q(b), d: BigInt::from(d) }
    }

    fn mul(&self, o: &Surd) -> Surd {
        let d = BigRational::from_integer(self.d.clone());
        Surd { a: &self.a * &o.a + &self.b * &o.b * d, b: &self.a * &o.b + &self.b * &o.a, d: self.d.clone() }
    }

    fn scale(&self, c: &BigRational) -> Surd {
        Surd { a: &self.a * c, b: &self.b * c, d: self.d.clone() }
    }

    fn cube(&self) -> Surd {
        self.mul(self).mul(self)
    }

    /// `x^2 - trace x + norm`, low degree first.
    fn minpoly(&self) -> Vec<BigRational> {
        let d = BigRational::from_integer(self.d.clone());
        let norm = &self.a * &self.a - &self.b * &self.b * d;
        vec![norm, -(&self.a + &self.a), BigRational::one()]
    }
}

fn as_qpoly(c: Vec<BigRational>) -> QPoly {
    QPoly::new(c.into_iter().map(Rational::from).collect())
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn quadratic_factor(level: u64, point: &str) -> QPoly {
    let (ctx, exprs) = common::context(level);
    let r = analyze_point(&ctx, &exprs, &point.parse().unwrap()).unwrap();
    let quads: Vec<QPoly> =
        r.factors.iter().filter(|f| f.poly.degree() == 2).map(|f| f.poly.to_qpoly().monic()).collect();
    assert_eq!(quads.len(), 1, "{level} {point}");
    quads.into_iter().next().unwrap()
}

#[test]
fn level_73_non_cm_pair() {
    let inner = Surd::new("-26670989", "15471309", -127).scale(&frac(3, 1 << 26));
    let j = inner.cube().scale(&frac(20, 1));
    assert_eq!(quadratic_factor(73, "(3/2,-5/8)"), as_qpoly(j.minpoly()));
}

#[test]
fn level_103_non_cm_pair() {
    let j = Surd::new("1623826405", "30228849", 2885).scale(&frac(48, 1)).cube().scale(&frac(19, 1));
    assert_eq!(j.a, q("35982263935929364331785036841779200"));
    assert_eq!(j.b, q("669908635472124980731701532753920"));
    assert_eq!(quadratic_factor(103, "(3,19)"), as_qpoly(j.minpoly()));
}

#[test]
fn level_191_non_cm_pair() {
    let d = 2036079533;
    let left = Surd::new("724537954586714121", "16056976492100", d);
    let right = Surd::new("7725788647437", "95942438", d).scale(&frac(480, 191 * 191));
    let j = left.mul(&right.cube());
    assert!(j.a.is_integer() && j.b.is_integer());
    assert_eq!(j.a, q("2891249511562231668955764266428063102082570956800000"));
    assert_eq!(j.b, q("64074939271375546714155254091066566840131584000"));
    assert_eq!(quadratic_factor(191, "(2,11)"), as_qpoly(j.minpoly()));
}

fn assert_class_polynomial(d: i64, j: Surd) {
    let h = class_polynomial(d).unwrap();
    assert_eq!(h.poly.to_qpoly(), as_qpoly(j.minpoly()), "D = {d}");
}

#[test]
fn printed_cm_surds_are_class_polynomials() {
    let neg = frac(-1, 1);
    assert_class_polynomial(-35, Surd::new("15", "7", 5).scale(&frac(16, 1)).cube().scale(&neg));
    assert_class_polynomial(-100, Surd::new("2927", "1323", 5).scale(&frac(6, 1)).cube());
    assert_class_polynomial(-52, Surd::new("31", "9", 13).scale(&frac(30, 1)).cube());
    assert_class_polynomial(-88, Surd::new("155", "108", 2).scale(&frac(60, 1)).cube());
    assert_class_polynomial(-20, Surd::new("25", "13", 5).scale(&frac(2, 1)).cube());
    assert_class_polynomial(-232, Surd::new("140989", "26163", 29).scale(&frac(30, 1)).cube());
    assert_class_polynomial(-148, Surd::new("2837", "468", 37).scale(&frac(60, 1)).cube());
    // Printed as (3(470 + 213 sqrt5)^3 (1 + sqrt5)/2); the 3 belongs inside the cube.
    let as_printed = Surd::new("470", "213", 5).cube().mul(&Surd::new("1", "1", 5)).scale(&frac(3, 2));
    assert_ne!(class_polynomial(-60).unwrap().poly.to_qpoly(), as_qpoly(as_printed.minpoly()));
    let v = Surd::new("470", "213", 5).scale(&frac(3, 1)).cube().mul(&Surd::new("1", "1", 5)).scale(&frac(1, 2));
    assert_class_polynomial(-60, v);
    // -(4(102 + 61 sqrt3))^3 (-2 + sqrt3)
    let v = Surd::new("102", "61", 3).scale(&frac(4, 1)).cube().mul(&Surd::new("-2", "1", 3)).scale(&neg);
    assert_class_polynomial(-36, v);
    // -(3(-5 + 4 sqrt5))^3 (-3 + sqrt5)/2
    let v = Surd::new("-5", "4", 5).scale(&frac(3, 1)).cube().mul(&Surd::new("-3", "1", 5)).scale(&frac(-1, 2));
    assert_class_polynomial(-15, v);
}

#[test]
fn missing_cube_at_206() {
    // The printed 6(65 + 27 sqrt5) lacks the cube; its cube is the D = -40 value.
    let printed = Surd::new("65", "27", 5).scale(&frac(6, 1));
    let h = class_polynomial(-40).unwrap().poly.to_qpoly();
    assert_ne!(h, as_qpoly(printed.minpoly()));
    assert_eq!(h, as_qpoly(printed.cube().minpoly()));
    assert!(!printed.b.is_zero());
}
