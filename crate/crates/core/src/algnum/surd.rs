//! Quadratic surds and biquadratic quartics.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::factor::{discriminant, rational_roots};
use super::intfactor::{is_perfect_square, squarefree_part, squarefree_part_rational};
use super::intpoly::IntPolynomial;
use super::multiquad::MultiQuadElement;
use super::AlgError;
use crate::arith::Rational;
use crate::poly::QPoly;

/// `a + b sqrt(d)` with `d` squarefree, `d != 0, 1`, `b != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: Rational,
    pub b: Rational,
    pub d: BigInt,
}

impl QuadraticSurd {
    pub fn conjugate(&self) -> Self {
        QuadraticSurd { a: self.a.clone(), b: -&self.b, d: self.d.clone() }
    }

    pub fn to_multiquad(&self) -> MultiQuadElement {
        MultiQuadElement::new(vec![self.d.clone()], vec![self.a.clone(), self.b.clone()])
    }

    /// Exact value of a rational polynomial at this surd.
    pub fn eval_poly(&self, p: &QPoly) -> MultiQuadElement {
        self.to_multiquad().eval_poly(p)
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { "-" } else { "+" };
        let mag = self.b.abs();
        if mag.is_one() {
            write!(f, "{} {sign} sqrt({})", self.a, self.d)
        } else {
            write!(f, "{} {sign} {mag}*sqrt({})", self.a, self.d)
        }
    }
}

/// The two conjugate roots of an irreducible quadratic, positive `b` first.
pub fn quadratic_surd_roots(q: &IntPolynomial) -> Result<(QuadraticSurd, QuadraticSurd), AlgError> {
    if q.degree() != 2 || q.is_zero() {
        return Err(AlgError::Degree { expected: 2, got: q.degree() });
    }
    let q = q.primitive();
    let (c, b, a) = (q.coeff(0), q.coeff(1), q.coeff(2));
    let disc = &b * &b - BigInt::from(4) * &a * &c;
    if is_perfect_square(&disc) {
        return Err(AlgError::SquareDiscriminant(disc.to_string()));
    }
    let d = squarefree_part(&disc).ok_or_else(|| AlgError::Factorization(disc.to_string()))?;
    let e = (&disc / &d).sqrt();
    let two_a = &a * BigInt::from(2);
    let re = Rational::new(-b, two_a.clone());
    let im = Rational::new(e, two_a);
    let r = QuadraticSurd { a: re, b: im, d };
    let c = r.conjugate();
    Ok((r, c))
}

fn canonical_key(d: &BigInt) -> (BigInt, bool) {
    (d.abs(), d.is_negative())
}

/// The resolvent cubic of the monic quartic `x^4 + a x^3 + b x^2 + c x + d`,
/// whose roots are `r1 r2 + r3 r4` and its two images.
pub fn resolvent_cubic(q: &QPoly) -> QPoly {
    let m = q.monic();
    let (a, b, c, d) = (m.coeff(3), m.coeff(2), m.coeff(1), m.coeff(0));
    let four = Rational::from_integer(BigInt::from(4));
    QPoly::new(vec![-(&a * &a * &d - &four * &b * &d + &c * &c), &a * &c - &four * &d, -b, Rational::one()])
}

/// Radicands of the three quadratic subfields of a biquadratic quartic,
/// canonically ordered, or `None` when the Galois group is not `V4`.
pub fn quartic_subfields(q: &IntPolynomial) -> Option<[BigInt; 3]> {
    if q.degree() != 4 || discriminant(q).is_zero() {
        return None;
    }
    let m = q.to_qpoly().monic();
    let cubic = resolvent_cubic(&m);
    let thetas = rational_roots(&IntPolynomial::from_qpoly(&cubic));
    if thetas.len() != 3 {
        return None;
    }
    let (a, b, d) = (m.coeff(3), m.coeff(2), m.coeff(0));
    let four = Rational::from_integer(BigInt::from(4));
    let mut out = Vec::with_capacity(3);
    for t in thetas {
        // r1 + r2 and r1 r2 generate the subfield fixed by (12)(34)
        let sum_disc = &a * &a - &four * (&b - &t);
        let prod_disc = &t * &t - &four * &d;
        let disc = if sum_disc.is_zero() { prod_disc } else { sum_disc };
        let k = squarefree_part_rational(&disc)?;
        if k.is_one() {
            return None;
        }
        out.push(k);
    }
    out.sort_by_key(canonical_key);
    Some([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Two canonical generators of a biquadratic quartic's field: the radicands
/// of smallest absolute value, positive first on ties.
pub fn v4_quartic_subfields(q: &IntPolynomial) -> Option<(BigInt, BigInt)> {
    quartic_subfields(q).map(|[d1, d2, _]| (d1, d2))
}
