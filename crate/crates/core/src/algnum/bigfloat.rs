//! Binary floating point with a caller-chosen mantissa length, and complex
//! polynomial root finding on top of it. Used only for heuristics whose
//! results are verified exactly afterwards.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::intpoly::IntPolynomial;

/// `m * 2^e`.
#[derive(Clone, Debug, PartialEq)]
pub struct BigFloat {
    m: BigInt,
    e: i64,
}

fn shr_round(m: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return m.clone();
    }
    let half = BigInt::from(1) << (k - 1);
    if m.is_negative() {
        -((-m + half) >> k)
    } else {
        (m + half) >> k
    }
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { m: BigInt::zero(), e: 0 }
    }

    fn round(m: BigInt, e: i64, prec: u64) -> Self {
        let bits = m.bits();
        if bits > prec {
            let k = bits - prec;
            BigFloat { m: shr_round(&m, k), e: e + k as i64 }
        } else {
            BigFloat { m, e }
        }
    }

    pub fn from_int(n: &BigInt, prec: u64) -> Self {
        Self::round(n.clone(), 0, prec)
    }

    pub fn from_f64(x: f64, shift: i64) -> Self {
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        BigFloat { m: BigInt::from(mant) * sign, e: e + shift }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// Approximate `log2 |x|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.m.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.m.bits();
        let k = bits.saturating_sub(60);
        let top = (self.m.abs() >> k).to_f64().unwrap();
        top.log2() + (k as i64 + self.e) as f64
    }

    pub fn neg(&self) -> Self {
        BigFloat { m: -&self.m, e: self.e }
    }

    pub fn add(&self, o: &Self, prec: u64) -> Self {
        if self.m.is_zero() {
            return o.clone();
        }
        if o.m.is_zero() {
            return self.clone();
        }
        let top_a = self.m.bits() as i64 + self.e;
        let top_b = o.m.bits() as i64 + o.e;
        if top_a - top_b > prec as i64 + 4 {
            return self.clone();
        }
        if top_b - top_a > prec as i64 + 4 {
            return o.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &o.m << (o.e - e) as u64;
        Self::round(a + b, e, prec)
    }

    pub fn sub(&self, o: &Self, prec: u64) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u64) -> Self {
        Self::round(&self.m * &o.m, self.e + o.e, prec)
    }

    pub fn div(&self, o: &Self, prec: u64) -> Self {
        assert!(!o.m.is_zero(), "division by zero");
        let shift = (prec + o.m.bits() + 2).saturating_sub(self.m.bits());
        let a = &self.m << shift;
        Self::round(a / &o.m, self.e - o.e - shift as i64, prec)
    }

    pub fn sqrt(&self, prec: u64) -> Self {
        assert!(!self.m.is_negative(), "square root of a negative number");
        if self.m.is_zero() {
            return Self::zero();
        }
        let mut shift = 2 * prec as i64;
        if (self.e - shift) % 2 != 0 {
            shift += 1;
        }
        let r = (&self.m << shift as u64).sqrt();
        Self::round(r, (self.e - shift) / 2, prec)
    }

    /// Nearest integer and the distance to it.
    pub fn nearest_integer(&self, prec: u64) -> (BigInt, BigFloat) {
        let n = if self.e >= 0 { &self.m << self.e as u64 } else { shr_round(&self.m, (-self.e) as u64) };
        let d = self.sub(&BigFloat::from_int(&n, prec + 64), prec + 64);
        (n, d)
    }
}

#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn zero() -> Self {
        BigComplex { re: BigFloat::zero(), im: BigFloat::zero() }
    }

    pub fn real(x: BigFloat) -> Self {
        BigComplex { re: x, im: BigFloat::zero() }
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        BigComplex { re: self.re.add(&o.re, p), im: self.im.add(&o.im, p) }
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        BigComplex { re: self.re.sub(&o.re, p), im: self.im.sub(&o.im, p) }
    }

    pub fn neg(&self) -> Self {
        BigComplex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        let q = p + 8;
        BigComplex {
            re: self.re.mul(&o.re, q).sub(&self.im.mul(&o.im, q), p),
            im: self.re.mul(&o.im, q).add(&self.im.mul(&o.re, q), p),
        }
    }

    pub fn div(&self, o: &Self, p: u64) -> Self {
        let q = p + 8;
        let den = o.re.mul(&o.re, q).add(&o.im.mul(&o.im, q), q);
        let num = self.mul(&BigComplex { re: o.re.clone(), im: o.im.neg() }, q);
        BigComplex { re: num.re.div(&den, p), im: num.im.div(&den, p) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Approximate `log2 |z|`.
    pub fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + 0.5 * (1.0 + 2f64.powf(2.0 * (a.min(b) - m))).log2()
    }

    /// `sqrt(d)` for a nonzero integer, on the positive real or imaginary axis.
    pub fn sqrt_int(d: &BigInt, p: u64) -> Self {
        let r = BigFloat::from_int(&d.abs(), p).sqrt(p);
        if d.is_negative() {
            BigComplex { re: BigFloat::zero(), im: r }
        } else {
            BigComplex::real(r)
        }
    }
}

fn horner(c: &[BigFloat], z: &BigComplex, p: u64) -> (BigComplex, BigComplex) {
    let mut v = BigComplex::real(c[c.len() - 1].clone());
    let mut d = BigComplex::zero();
    for a in c.iter().rev().skip(1) {
        d = d.mul(z, p).add(&v, p);
        v = v.mul(z, p).add(&BigComplex::real(a.clone()), p);
    }
    (v, d)
}

/// Initial guesses spread on circles whose radii come from the Newton polygon.
fn initial_guesses(f: &IntPolynomial) -> Vec<BigComplex> {
    let n = f.degree();
    let pts: Vec<(usize, f64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, BigFloat::from_int(c, 64).log2_abs()))
        .collect();
    // upper convex hull
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(n);
    for (s, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let cnt = j - i;
        let rho = (li - lj) / cnt as f64;
        let whole = rho.floor();
        let scale = 2f64.powf(rho - whole);
        for t in 0..cnt {
            let ang = std::f64::consts::TAU * t as f64 / cnt as f64 + 0.7 * s as f64 + 0.4;
            out.push(BigComplex {
                re: BigFloat::from_f64(scale * ang.cos(), whole as i64),
                im: BigFloat::from_f64(scale * ang.sin(), whole as i64),
            });
        }
    }
    out
}

/// All complex roots of a squarefree polynomial, by Aberth iteration at `prec` bits.
pub fn roots(f: &IntPolynomial, prec: u64) -> Option<Vec<BigComplex>> {
    let n = f.degree();
    let p = prec + 32;
    let c: Vec<BigFloat> = f.coeffs().iter().map(|x| BigFloat::from_int(x, p)).collect();
    let mut z = initial_guesses(f);
    if z.len() != n {
        return None;
    }
    let target = -(prec as f64) + 8.0;
    for _ in 0..(400 + 4 * prec as usize) {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            let (v, d) = horner(&c, &z[i], p);
            if v.is_zero() {
                continue;
            }
            if d.is_zero() {
                return None;
            }
            let w = v.div(&d, p);
            let mut s = BigComplex::zero();
            for j in 0..n {
                if j != i {
                    let diff = z[i].sub(&z[j], p);
                    if diff.is_zero() {
                        return None;
                    }
                    s = s.add(&BigComplex::real(BigFloat::from_f64(1.0, 0)).div(&diff, p), p);
                }
            }
            let one = BigComplex::real(BigFloat::from_f64(1.0, 0));
            let corr = w.div(&one.sub(&w.mul(&s, p), p), p);
            let rel = corr.log2_abs() - z[i].log2_abs().max(0.0);
            worst = worst.max(rel);
            z[i] = z[i].sub(&corr, p);
        }
        if worst < target {
            return Some(z);
        }
    }
    None
}
