//! Genus-2 sextic models `y^2 = x^6 + a5 x^5 + ... + a0`, their points, the
//! generators `f3, f4, f5` and rational point search.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{parse_rational, rat, rat_frac, Rational};
use crate::poly::QPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("sextic is not squarefree")]
    NotSquarefree,
    #[error("polynomial is not a monic sextic")]
    NotMonicSextic,
    #[error("the generators have a pole at inf+")]
    Pole,
    #[error("no monomial has pole order {0}")]
    GapOrder(i64),
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("cannot parse point {0:?}")]
    ParsePoint(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SexticCurve {
    a: [Rational; 6],
}

impl SexticCurve {
    /// `a[i]` is the coefficient of `x^i`.
    pub fn new(a: [Rational; 6]) -> Result<Self, CurveError> {
        let c = SexticCurve { a };
        if !c.f_poly().is_squarefree() {
            return Err(CurveError::NotSquarefree);
        }
        Ok(c)
    }

    /// Integer coefficients `a0..a5`.
    pub fn from_ints(a: [i64; 6]) -> Result<Self, CurveError> {
        Self::new(a.map(rat))
    }

    pub fn from_poly(p: &QPoly) -> Result<Self, CurveError> {
        if p.degree() != Some(6) || !p.leading().is_one() {
            return Err(CurveError::NotMonicSextic);
        }
        Self::new(std::array::from_fn(|i| p.coeff(i)))
    }

    pub fn a(&self, i: usize) -> &Rational {
        &self.a[i]
    }

    pub fn coeffs(&self) -> &[Rational; 6] {
        &self.a
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    pub fn f_poly(&self) -> QPoly {
        let mut v = self.a.to_vec();
        v.push(Rational::one());
        QPoly::new(v)
    }

    pub fn eval_f(&self, x: &Rational) -> Rational {
        self.f_poly().eval(x)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Affine { x, y } => y * y == self.eval_f(x),
            _ => true,
        }
    }

    /// The curve `y^2 = f(x + t)`.
    pub fn translate(&self, t: &Rational) -> Self {
        SexticCurve::from_poly(&self.f_poly().translate(t)).expect("translation keeps the model")
    }
}

impl fmt::Display for SexticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = {}", self.f_poly())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CurvePoint {
    Affine {
        x: Rational,
        y: Rational,
    },
    /// The point at infinity where `y/x^3 = 1`.
    InfinityPlus,
    /// The point at infinity where `y/x^3 = -1`.
    InfinityMinus,
}

impl CurvePoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_weierstrass(&self) -> bool {
        matches!(self, CurvePoint::Affine { y, .. } if y.is_zero())
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Affine { x, .. } => Some(x),
            _ => None,
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Affine { x, y } => write!(f, "({},{})", x, y),
            CurvePoint::InfinityPlus => write!(f, "inf+"),
            CurvePoint::InfinityMinus => write!(f, "inf-"),
        }
    }
}

impl FromStr for CurvePoint {
    type Err = CurveError;

    /// Accepts `inf+`, `inf-`, `x,y` or `(x,y)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "inf+" | "infinity_plus" => return Ok(CurvePoint::InfinityPlus),
            "inf-" | "infinity_minus" => return Ok(CurvePoint::InfinityMinus),
            _ => {}
        }
        let bad = || CurveError::ParsePoint(s.to_string());
        let inner = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
        let (xs, ys) = inner.split_once(',').ok_or_else(bad)?;
        let x = parse_rational(xs).map_err(|_| bad())?;
        let y = parse_rational(ys).map_err(|_| bad())?;
        Ok(CurvePoint::Affine { x, y })
    }
}

/// The hyperelliptic involution.
pub fn involution(p: &CurvePoint) -> CurvePoint {
    match p {
        CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: -y },
        CurvePoint::InfinityPlus => CurvePoint::InfinityMinus,
        CurvePoint::InfinityMinus => CurvePoint::InfinityPlus,
    }
}

/// `poly(x) + y_coeff * x^y_power * y`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FFunction {
    pub poly: QPoly,
    pub y_coeff: Rational,
    pub y_power: usize,
}

impl FFunction {
    pub fn eval_affine(&self, x: &Rational, y: &Rational) -> Rational {
        let mut xp = Rational::one();
        for _ in 0..self.y_power {
            xp *= x;
        }
        self.poly.eval(x) + &self.y_coeff * xp * y
    }

    /// `x * self + k`.
    pub fn times_x_plus(&self, k: Rational) -> Self {
        FFunction {
            poly: self.poly.shift(1).add(&QPoly::constant(k)),
            y_coeff: self.y_coeff.clone(),
            y_power: self.y_power + 1,
        }
    }

    /// The composition with the involution.
    pub fn conjugate(&self) -> Self {
        FFunction { poly: self.poly.clone(), y_coeff: -&self.y_coeff, y_power: self.y_power }
    }

    /// `self - other` when both share the same `x^k y` shape, as a
    /// polynomial part and a `y` part.
    pub fn difference(&self, other: &Self) -> (QPoly, QPoly) {
        let ya = QPoly::constant(self.y_coeff.clone()).shift(self.y_power);
        let yb = QPoly::constant(other.y_coeff.clone()).shift(other.y_power);
        (self.poly.sub(&other.poly), ya.sub(&yb))
    }

    /// `self * (self o w)` after substituting `y^2 = f(x)`.
    pub fn norm(&self, curve: &SexticCurve) -> QPoly {
        let c2 = &self.y_coeff * &self.y_coeff;
        let y2 = curve.f_poly().shift(2 * self.y_power).scale(&c2);
        self.poly.mul(&self.poly).sub(&y2)
    }

    /// Value at a point at infinity; errors if there is a pole there.
    pub fn value_at_infinity(&self, curve: &SexticCurve, sign: i32) -> Result<Rational, CurveError> {
        // y = sign * x^3 * s(1/x) with s(t)^2 = 1 + a5 t + ... + a0 t^6
        let top = self.y_power + 3;
        let mut u = vec![Rational::zero(); top + 1];
        for (n, slot) in u.iter_mut().enumerate().skip(1) {
            if n <= 6 {
                *slot = curve.a(6 - n).clone();
            }
        }
        let two = rat(2);
        let mut s = vec![Rational::one()];
        for n in 1..=top {
            let mut acc = u[n].clone();
            for i in 1..n {
                acc -= &s[i] * &s[n - i];
            }
            s.push(acc / &two);
        }
        let c = if sign > 0 { self.y_coeff.clone() } else { -&self.y_coeff };
        let deg = self.poly.degree().unwrap_or(0).max(top);
        for e in 1..=deg {
            let mut v = self.poly.coeff(e);
            if e <= top {
                v += &c * &s[top - e];
            }
            if !v.is_zero() {
                return Err(CurveError::Pole);
            }
        }
        Ok(self.poly.coeff(0) + &c * &s[top])
    }
}

impl fmt::Display for FFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})", self.poly, self.y_coeff)?;
        match self.y_power {
            0 => write!(f, "*y"),
            1 => write!(f, "*x*y"),
            k => write!(f, "*x^{}*y", k),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FGenerators {
    pub curve: SexticCurve,
    pub f3: FFunction,
    pub f4: FFunction,
    pub f5: FFunction,
    /// `f4 = x f3 + k4`.
    pub k4: Rational,
    /// `f5 = x f4 + k5`.
    pub k5: Rational,
}

/// The three generators with poles of order 3, 4, 5 at `inf+` vanishing at `inf-`.
pub fn rr_generators(curve: &SexticCurve) -> FGenerators {
    let a = |i: usize| curve.a(i).clone();
    let (a1, a2, a3, a4, a5) = (a(1), a(2), a(3), a(4), a(5));
    let r = |n: i64| rat(n);
    let a5_2 = &a5 * &a5;
    let a5_3 = &a5_2 * &a5;
    let a5_4 = &a5_3 * &a5;
    let a5_5 = &a5_4 * &a5;
    let a4_2 = &a4 * &a4;

    let c0 = (r(8) * &a3 - r(4) * &a4 * &a5 + &a5_3) / r(32);
    let c1 = (r(4) * &a4 - &a5_2) / r(16);
    let c2 = &a5 / r(4);
    let f3 = FFunction { poly: QPoly::new(vec![c0, c1, c2, rat_frac(1, 2)]), y_coeff: rat_frac(1, 2), y_power: 0 };
    let k4 = (r(64) * &a2 - r(16) * &a4_2 - r(32) * &a3 * &a5 + r(24) * &a4 * &a5_2 - r(5) * &a5_4) / r(256);
    let k5 = (r(128) * &a1 - r(64) * &a3 * &a4 - r(64) * &a2 * &a5 + r(48) * &a4_2 * &a5 + r(48) * &a3 * &a5_2
        - r(40) * &a4 * &a5_3
        + r(7) * &a5_5)
        / r(512);
    let f4 = f3.times_x_plus(k4.clone());
    let f5 = f4.times_x_plus(k5.clone());
    FGenerators { curve: curve.clone(), f3, f4, f5, k4, k5 }
}

/// `(f3(p), f4(p), f5(p))`.
pub fn evaluate_f(gens: &FGenerators, p: &CurvePoint) -> Result<(Rational, Rational, Rational), CurveError> {
    match p {
        CurvePoint::Affine { x, y } => {
            if !gens.curve.contains(p) {
                return Err(CurveError::NotOnCurve(p.to_string()));
            }
            Ok((gens.f3.eval_affine(x, y), gens.f4.eval_affine(x, y), gens.f5.eval_affine(x, y)))
        }
        CurvePoint::InfinityPlus => Err(CurveError::Pole),
        CurvePoint::InfinityMinus => Ok((
            gens.f3.value_at_infinity(&gens.curve, -1)?,
            gens.f4.value_at_infinity(&gens.curve, -1)?,
            gens.f5.value_at_infinity(&gens.curve, -1)?,
        )),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Gen {
    F3,
    F4,
    F5,
}

impl Gen {
    pub fn pole_order(self) -> i64 {
        match self {
            Gen::F3 => 3,
            Gen::F4 => 4,
            Gen::F5 => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gen::F3 => "f3",
            Gen::F4 => "f4",
            Gen::F5 => "f5",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "f3" => Some(Gen::F3),
            "f4" => Some(Gen::F4),
            "f5" => Some(Gen::F5),
            _ => None,
        }
    }
}

/// `f3^k` (for `Gen::F3`, `k >= 1`) or `g * f3^k` (for `g = f4, f5`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub gen: Gen,
    pub k: u32,
}

impl Monomial {
    pub fn pole_order(&self) -> i64 {
        match self.gen {
            Gen::F3 => 3 * self.k as i64,
            g => g.pole_order() + 3 * self.k as i64,
        }
    }

    /// Value given values of the generators.
    pub fn eval(&self, f: &(Rational, Rational, Rational)) -> Rational {
        let mut p = Rational::one();
        for _ in 0..self.k {
            p *= &f.0;
        }
        match self.gen {
            Gen::F3 => p,
            Gen::F4 => p * &f.1,
            Gen::F5 => p * &f.2,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.pole_order().cmp(&other.pole_order())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pw = |f: &mut fmt::Formatter<'_>, k: u32| match k {
            1 => write!(f, "f3"),
            k => write!(f, "f3^{}", k),
        };
        match self.gen {
            Gen::F3 => pw(f, self.k),
            g => {
                write!(f, "{}", g.name())?;
                if self.k > 0 {
                    write!(f, "*")?;
                    pw(f, self.k)?;
                }
                Ok(())
            }
        }
    }
}

/// The unique monomial with a pole of order `n` at `inf+`.
pub fn monomial_for_order(n: i64) -> Result<Monomial, CurveError> {
    if n < 3 {
        return Err(CurveError::GapOrder(n));
    }
    let k = |base: i64| ((n - base) / 3) as u32;
    Ok(match n % 3 {
        0 => Monomial { gen: Gen::F3, k: k(0) },
        1 => Monomial { gen: Gen::F4, k: k(4) },
        _ => Monomial { gen: Gen::F5, k: k(5) },
    })
}

const QR_MODULI: [u32; 5] = [64, 63, 65, 11, 17];

fn qr_tables() -> Vec<Vec<bool>> {
    QR_MODULI
        .iter()
        .map(|&m| {
            let mut t = vec![false; m as usize];
            for r in 0..m {
                t[((r * r) % m) as usize] = true;
            }
            t
        })
        .collect()
}

fn exact_sqrt_u128(v: u128) -> Option<u128> {
    let r = v.sqrt();
    (r * r == v).then_some(r)
}

fn exact_sqrt_big(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Rational points with `x = u/v`, `max(|u|, v) <= height_bound`, plus both
/// points at infinity. Sorted by `(v, u)`, then `+y` before `-y`.
pub fn search_points(curve: &SexticCurve, height_bound: u64) -> Vec<CurvePoint> {
    let h = height_bound as i64;
    let mut l = BigInt::one();
    for c in curve.coeffs() {
        l = l.lcm(c.denom());
    }
    // l^2 v^6 f(u/v) = sum c_i u^i v^(6-i)
    let mut c: Vec<BigInt> =
        curve.coeffs().iter().map(|a| (a * Rational::from_integer(l.clone())).to_integer() * &l).collect();
    c.push(&l * &l);
    let bound: BigInt = c.iter().map(|x| x.abs()).sum::<BigInt>() * BigInt::from(h).pow(6);
    let fast = bound.bits() < 125;
    let tables = qr_tables();

    let rows: Vec<Vec<(i64, i64, BigInt)>> = (1..=h)
        .into_par_iter()
        .map(|v| {
            let mut out = Vec::new();
            if fast {
                let ci: Vec<i128> = c.iter().map(|x| x.to_i128().unwrap()).collect();
                let d: Vec<i128> = (0..7).map(|i| ci[i] * (v as i128).pow(6 - i as u32)).collect();
                for u in -h..=h {
                    if u.unsigned_abs().gcd(&(v as u64)) != 1 {
                        continue;
                    }
                    let uu = u as i128;
                    let mut acc = d[6];
                    for i in (0..6).rev() {
                        acc = acc * uu + d[i];
                    }
                    if acc < 0 {
                        continue;
                    }
                    let val = acc as u128;
                    if !QR_MODULI.iter().zip(&tables).all(|(&m, t)| t[(val % m as u128) as usize]) {
                        continue;
                    }
                    if let Some(w) = exact_sqrt_u128(val) {
                        out.push((v, u, BigInt::from(w)));
                    }
                }
            } else {
                let bv = BigInt::from(v);
                let d: Vec<BigInt> = (0..7).map(|i| &c[i] * bv.pow(6 - i as u32)).collect();
                for u in -h..=h {
                    if u.unsigned_abs().gcd(&(v as u64)) != 1 {
                        continue;
                    }
                    let bu = BigInt::from(u);
                    let mut acc = d[6].clone();
                    for i in (0..6).rev() {
                        acc = acc * &bu + &d[i];
                    }
                    if let Some(w) = exact_sqrt_big(&acc) {
                        out.push((v, u, w));
                    }
                }
            }
            out
        })
        .collect();

    let mut pts = Vec::new();
    for (v, u, w) in rows.into_iter().flatten() {
        let x = rat_frac(u, v);
        let y = Rational::new(w, &l * BigInt::from(v).pow(3));
        if y.is_zero() {
            pts.push(CurvePoint::affine(x, y));
        } else {
            pts.push(CurvePoint::affine(x.clone(), y.clone()));
            pts.push(CurvePoint::affine(x, -y));
        }
    }
    pts.push(CurvePoint::InfinityPlus);
    pts.push(CurvePoint::InfinityMinus);
    pts
}
