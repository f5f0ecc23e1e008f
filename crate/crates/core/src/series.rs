//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! Coefficients are stored as integer numerators over one shared positive
//! denominator.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("cannot invert a series that is zero to its precision")]
    ZeroSeries,
    #[error("coefficient of q^{exponent} is beyond the known precision {precision}")]
    BeyondPrecision { exponent: i64, precision: i64 },
}

/// `q^valuation * (c_0 + c_1 q + ...) / denominator`, known below `precision`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    valuation: i64,
    numerators: Vec<BigInt>,
    denominator: BigInt,
}

impl LaurentSeries {
    /// Identically zero up to `precision`.
    pub fn zero(precision: i64) -> Self {
        LaurentSeries { valuation: precision, numerators: Vec::new(), denominator: BigInt::one() }
    }

    pub fn from_integers(valuation: i64, coeffs: Vec<BigInt>) -> Self {
        Self::from_parts(valuation, coeffs, BigInt::one())
    }

    pub fn from_i64s(valuation: i64, coeffs: &[i64]) -> Self {
        Self::from_integers(valuation, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_rationals(valuation: i64, coeffs: &[Rational]) -> Self {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let nums = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Self::from_parts(valuation, nums, den)
    }

    /// `c * q^exponent`, known below `precision`.
    pub fn monomial(exponent: i64, coeff: Rational, precision: i64) -> Self {
        if exponent >= precision {
            return Self::zero(precision);
        }
        let mut v = vec![Rational::zero(); (precision - exponent) as usize];
        v[0] = coeff;
        Self::from_rationals(exponent, &v)
    }

    pub fn constant(c: Rational, precision: i64) -> Self {
        Self::monomial(0, c, precision)
    }

    fn from_parts(valuation: i64, numerators: Vec<BigInt>, denominator: BigInt) -> Self {
        let mut s = LaurentSeries { valuation, numerators, denominator };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.denominator.is_negative() {
            self.denominator = -&self.denominator;
            for c in self.numerators.iter_mut() {
                *c = -&*c;
            }
        }
        let lead = self.numerators.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.numerators.drain(..lead);
            self.valuation += lead as i64;
        }
        if self.numerators.is_empty() {
            self.denominator = BigInt::one();
            return;
        }
        if self.denominator.is_one() {
            return;
        }
        let mut g = self.denominator.clone();
        for c in &self.numerators {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.denominator = &self.denominator / &g;
            for c in self.numerators.iter_mut() {
                *c = &*c / &g;
            }
        }
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn precision(&self) -> i64 {
        self.valuation + self.numerators.len() as i64
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_zero(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// Numerator of the coefficient of `q^(valuation + i)`.
    pub fn numerator_at(&self, i: usize) -> &BigInt {
        &self.numerators[i]
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.numerators
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.denominator.is_one()
    }

    pub fn coefficient(&self, exponent: i64) -> Result<Rational, SeriesError> {
        if exponent >= self.precision() {
            return Err(SeriesError::BeyondPrecision { exponent, precision: self.precision() });
        }
        if exponent < self.valuation {
            return Ok(Rational::zero());
        }
        let n = &self.numerators[(exponent - self.valuation) as usize];
        Ok(Rational::new(n.clone(), self.denominator.clone()))
    }

    pub fn leading_coefficient(&self) -> Option<Rational> {
        self.numerators.first().map(|n| Rational::new(n.clone(), self.denominator.clone()))
    }

    /// Coefficients for exponents `valuation..precision`.
    pub fn coefficients(&self) -> Vec<Rational> {
        self.numerators.iter().map(|n| Rational::new(n.clone(), self.denominator.clone())).collect()
    }

    /// Drop everything at or above `precision`.
    pub fn truncate(&self, precision: i64) -> Self {
        if precision >= self.precision() {
            return self.clone();
        }
        if precision <= self.valuation {
            return Self::zero(precision);
        }
        let keep = (precision - self.valuation) as usize;
        Self::from_parts(self.valuation, self.numerators[..keep].to_vec(), self.denominator.clone())
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            valuation: self.valuation + k,
            numerators: self.numerators.clone(),
            denominator: self.denominator.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            valuation: self.valuation,
            numerators: self.numerators.iter().map(|c| -c).collect(),
            denominator: self.denominator.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.precision());
        }
        let nums = self.numerators.iter().map(|x| x * c.numer()).collect();
        Self::from_parts(self.valuation, nums, &self.denominator * c.denom())
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.precision());
        }
        let nums = self.numerators.iter().map(|x| x * c).collect();
        Self::from_parts(self.valuation, nums, self.denominator.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let prec = self.precision().min(other.precision());
        let val = self.valuation.min(other.valuation).min(prec);
        let len = (prec - val) as usize;
        let g = self.denominator.gcd(&other.denominator);
        let ma = &other.denominator / &g;
        let mb = &self.denominator / &g;
        let den = &self.denominator * &ma;
        let mut out = vec![BigInt::zero(); len];
        for (i, c) in self.numerators.iter().enumerate() {
            let e = self.valuation + i as i64;
            if e >= prec {
                break;
            }
            if !c.is_zero() {
                out[(e - val) as usize] = if ma.is_one() { c.clone() } else { c * &ma };
            }
        }
        for (i, c) in other.numerators.iter().enumerate() {
            let e = other.valuation + i as i64;
            if e >= prec {
                break;
            }
            if c.is_zero() {
                continue;
            }
            let t = if mb.is_one() { c.clone() } else { c * &mb };
            let slot = &mut out[(e - val) as usize];
            if negate {
                *slot -= t;
            } else {
                *slot += t;
            }
        }
        Self::from_parts(val, out, den)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = (self.precision() + other.valuation).min(other.precision() + self.valuation);
        if self.is_zero() || other.is_zero() {
            return Self::zero(prec);
        }
        let len = self.len().min(other.len());
        let out = mul_truncated(&self.numerators, &other.numerators, len);
        Self::from_parts(self.valuation + other.valuation, out, &self.denominator * &other.denominator)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            let rel = self.len() as i64;
            return Self::constant(Rational::one(), rel);
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        let mut e = k;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.square();
        }
        acc.expect("k > 0")
    }

    pub fn invert(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::ZeroSeries);
        }
        let len = self.len();
        let a0 = &self.numerators[0];
        // 1/(A/D) = D/A with A = a0 (1 + ...)
        let mut b: Vec<BigInt> = Vec::with_capacity(len);
        let den;
        if a0.abs().is_one() {
            b.push(BigInt::one());
            for k in 1..len {
                let mut s = BigInt::zero();
                for i in 1..=k {
                    let ai = &self.numerators[i];
                    if !ai.is_zero() {
                        s += ai * &b[k - i];
                    }
                }
                b.push(if a0.is_positive() { -s } else { s });
            }
            for c in b.iter_mut() {
                *c *= &self.denominator;
                if a0.is_negative() {
                    *c = -&*c;
                }
            }
            den = BigInt::one();
        } else {
            // b_k = B_k / a0^(k+1); common denominator a0^len
            let mut pw = vec![BigInt::one()];
            for i in 1..=len {
                let next = &pw[i - 1] * a0;
                pw.push(next);
            }
            let mut bb: Vec<BigInt> = vec![BigInt::one()];
            for k in 1..len {
                let mut s = BigInt::zero();
                for i in 1..=k {
                    let ai = &self.numerators[i];
                    if !ai.is_zero() {
                        s += ai * &bb[k - i] * &pw[i - 1];
                    }
                }
                bb.push(-s);
            }
            for (k, c) in bb.into_iter().enumerate() {
                b.push(c * &pw[len - 1 - k] * &self.denominator);
            }
            den = pw[len].clone();
        }
        Ok(Self::from_parts(-self.valuation, b, den))
    }

    /// `q d/dq`: the coefficient of `q^k` is multiplied by `k`.
    pub fn q_derivative(&self) -> Self {
        let prec = self.precision();
        let nums: Vec<BigInt> =
            self.numerators.iter().enumerate().map(|(i, c)| c * BigInt::from(self.valuation + i as i64)).collect();
        let mut s = Self::from_parts(self.valuation, nums, self.denominator.clone());
        if s.is_zero() {
            s = Self::zero(prec);
        }
        s
    }

    /// Substitute `q -> q^d`.
    pub fn rescale_exponent(&self, d: u32) -> Self {
        assert!(d >= 1, "rescale factor must be positive");
        let d = d as usize;
        if self.is_zero() {
            return Self::zero(self.precision() * d as i64);
        }
        let len = (self.len() - 1) * d + d;
        let mut out = vec![BigInt::zero(); len];
        for (i, c) in self.numerators.iter().enumerate() {
            out[i * d] = c.clone();
        }
        LaurentSeries { valuation: self.valuation * d as i64, numerators: out, denominator: self.denominator.clone() }
    }

    /// First exponent in `from..precision` with nonzero coefficient.
    pub fn first_nonzero_from(&self, from: i64) -> Option<i64> {
        let start = (from - self.valuation).max(0) as usize;
        self.numerators
            .iter()
            .enumerate()
            .skip(start)
            .find(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.valuation + i as i64)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.numerators.iter().enumerate().take(12) {
            if c.is_zero() {
                continue;
            }
            let r = Rational::new(c.clone(), self.denominator.clone());
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})q^{}", r, self.valuation + i as i64)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.precision())
    }
}

/// First `len` coefficients of the product of two coefficient vectors.
pub(crate) fn mul_truncated(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let dense = |v: &[BigInt]| 4 * v.iter().filter(|x| !x.is_zero()).count() >= v.len();
    if a.len().min(b.len()) >= KRONECKER_MIN_LEN && dense(a) && dense(b) {
        return mul_kronecker(a, b, len);
    }
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

const KRONECKER_MIN_LEN: usize = 24;

/// Coefficients packed at `slot`-word strides into one signed integer.
fn pack(c: &[BigInt], slot: usize) -> BigInt {
    let mut pos = vec![0u32; c.len() * slot];
    let mut neg = vec![0u32; c.len() * slot];
    for (i, x) in c.iter().enumerate() {
        let (sign, digits) = x.to_u32_digits();
        let dst = if sign == Sign::Minus { &mut neg } else { &mut pos };
        dst[i * slot..i * slot + digits.len()].copy_from_slice(&digits);
    }
    BigInt::from_biguint(Sign::Plus, BigUint::new(pos)) - BigInt::from_biguint(Sign::Plus, BigUint::new(neg))
}

/// Product by Kronecker substitution: one big multiplication, then a
/// balanced-digit split.
fn mul_kronecker(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let bits = |v: &[BigInt]| v.iter().map(|x| x.bits()).max().unwrap_or(0);
    let terms = a.len().min(b.len()) as u64;
    let need = bits(a) + bits(b) + (64 - terms.leading_zeros() as u64) + 2;
    let slot = need.div_ceil(32) as usize;
    let width = 32 * slot;
    let prod = pack(a, slot) * pack(b, slot);
    let total = (a.len() + b.len()) * slot + 1;
    // two's complement image over `total` words
    let shifted = prod + (BigInt::one() << (32 * total));
    let (_, mut words) = shifted.to_u32_digits();
    words.resize(total + 1, 0);
    let half = BigInt::one() << (width - 1);
    let full = BigInt::one() << width;
    let n = len.min(a.len() + b.len() - 1);
    let mut out = Vec::with_capacity(len);
    let mut carry = false;
    for i in 0..n {
        let chunk = BigUint::new(words[i * slot..(i + 1) * slot].to_vec());
        let mut v = BigInt::from_biguint(Sign::Plus, chunk);
        if carry {
            v += 1;
        }
        carry = v >= half;
        if carry {
            v -= &full;
        }
        out.push(v);
    }
    out.resize(len, BigInt::zero());
    out
}

/// Sum of cubes of divisors for `0..n` (index 0 unused).
fn sigma3_table(n: usize) -> Vec<BigInt> {
    let mut s = vec![0u128; n];
    for d in 1..n {
        let c = (d as u128).pow(3);
        let mut m = d;
        while m < n {
            s[m] += c;
            m += d;
        }
    }
    s.into_iter().map(BigInt::from).collect()
}

/// `prod_{n>=1} (1 - q^n)` to `len` terms via pentagonal numbers.
fn euler_product(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = BigInt::one();
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let p1 = (k * (3 * k - 1) / 2) as usize;
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p1 >= len {
            break;
        }
        out[p1] += sign;
        if p2 < len {
            out[p2] += sign;
        }
        k += 1;
    }
    out
}

/// `j(q) = 1/q + 744 + 196884 q + ...` with coefficients up to `q^(precision-1)`.
pub fn j_expansion(precision: i64) -> LaurentSeries {
    assert!(precision >= 0, "precision must be non-negative");
    // q j = E4^3 / prod(1-q^n)^24, needed through q^precision
    let len = (precision + 1) as usize;
    let s3 = sigma3_table(len);
    let mut e4 = vec![BigInt::zero(); len];
    e4[0] = BigInt::one();
    let c240 = BigInt::from(240);
    for n in 1..len {
        e4[n] = &c240 * &s3[n];
    }
    let e4sq = mul_truncated(&e4, &e4, len);
    let e4cube = mul_truncated(&e4sq, &e4, len);

    let p = euler_product(len);
    let p2 = mul_truncated(&p, &p, len);
    let p4 = mul_truncated(&p2, &p2, len);
    let p8 = mul_truncated(&p4, &p4, len);
    let p16 = mul_truncated(&p8, &p8, len);
    let p24 = mul_truncated(&p16, &p8, len);

    let eta24 = LaurentSeries::from_integers(0, p24);
    let inv = eta24.invert().expect("leading coefficient is 1");
    let num = LaurentSeries::from_integers(0, e4cube);
    num.mul(&inv).shift(-1)
}
