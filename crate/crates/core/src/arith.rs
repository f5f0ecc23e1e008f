//! Exact rationals and scaled-integer reals/complexes with tracked error bounds.
//!
//! A [`FixedReal`] stores `mantissa * 2^-scale_bits` together with an upper
//! bound (in units of `2^-scale_bits`) on the distance to the real number it
//! approximates. Every operation below states how it propagates that bound.
//! Rounding is to nearest, ties away from zero.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number. Always normalized (`gcd = 1`, positive denominator).
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("scale of {got} bits is below the minimum of {min}")]
    PrecisionTooLow { min: u32, got: u32 },
    #[error("error bound exceeds half of the working scale ({scale_bits} bits)")]
    PrecisionOverflow { scale_bits: u32 },
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_rat(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"a"` or `"a/b"` with arbitrary-size decimal integers.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let s = s.trim();
    let bad = || ArithError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(int_rat(s.parse().map_err(|_| bad())?)),
    }
}

/// Height `max(|num|, den)` of a rational.
pub fn height(r: &Rational) -> BigInt {
    std::cmp::max(r.numer().abs(), r.denom().clone())
}

/// `n / d` rounded to nearest, ties away from zero. `d` must be nonzero.
pub fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (d, n) = if d.is_negative() { (-d, -n) } else { (d.clone(), n.clone()) };
    let twice = (n.abs() << 1usize) + &d;
    let q = twice / (&d << 1usize);
    if n.is_negative() {
        -q
    } else {
        q
    }
}

/// `m / 2^k` rounded to nearest, ties away from zero.
pub fn shr_round(m: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return m.clone();
    }
    let half = BigInt::one() << (k - 1);
    let q = (m.abs() + half) >> k;
    if m.is_negative() {
        -q
    } else {
        q
    }
}

fn ceil_shr(e: &BigUint, k: u64) -> BigUint {
    if k == 0 {
        return e.clone();
    }
    let q = e >> k;
    if (&q << k) == *e {
        q
    } else {
        q + 1u32
    }
}

fn ceil_div(e: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = e.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Real number `mantissa * 2^-scale_bits` with absolute error at most
/// `error_ulps * 2^-scale_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedReal {
    mantissa: BigInt,
    scale_bits: u32,
    error_ulps: BigUint,
}

impl FixedReal {
    pub fn new(mantissa: BigInt, scale_bits: u32, error_ulps: BigUint) -> Self {
        Self { mantissa, scale_bits, error_ulps }
    }

    pub fn exact(mantissa: BigInt, scale_bits: u32) -> Self {
        Self::new(mantissa, scale_bits, BigUint::zero())
    }

    pub fn zero(scale_bits: u32) -> Self {
        Self::exact(BigInt::zero(), scale_bits)
    }

    pub fn from_int(n: &BigInt, scale_bits: u32) -> Self {
        Self::exact(n << scale_bits as usize, scale_bits)
    }

    /// Nearest representable value; error 1 ulp unless exact.
    pub fn from_rational(r: &Rational, scale_bits: u32) -> Self {
        let num = r.numer() << scale_bits as usize;
        let (q, rem) = num.div_rem(r.denom());
        if rem.is_zero() {
            Self::exact(q, scale_bits)
        } else {
            Self::new(div_round(&num, r.denom()), scale_bits, BigUint::one())
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale_bits(&self) -> u32 {
        self.scale_bits
    }

    pub fn error_ulps(&self) -> &BigUint {
        &self.error_ulps
    }

    /// Upper bound on |true value| in ulps.
    pub fn magnitude_bound_ulps(&self) -> BigUint {
        self.mantissa.magnitude() + &self.error_ulps
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.mantissa >> shift as usize).to_f64().unwrap_or(0.0);
        top * 2f64.powi((shift - self.scale_bits as i64) as i32)
    }

    /// Absolute error bound as a float (for diagnostics).
    pub fn error_f64(&self) -> f64 {
        let e = BigInt::from_biguint(Sign::Plus, self.error_ulps.clone());
        FixedReal::exact(e, self.scale_bits).to_f64()
    }

    /// True when the error bound is at most half of one unit (`2^-1`).
    pub fn error_below_half(&self) -> bool {
        self.error_ulps.bits() < self.scale_bits as u64
    }

    /// Nearest integer if the interval `value ± error` certifies it
    /// (interval strictly inside `(n - 1/2, n + 1/2)`).
    pub fn certified_integer(&self) -> Option<BigInt> {
        let s = self.scale_bits as u64;
        let n = shr_round(&self.mantissa, s);
        let dist = (&self.mantissa - (&n << s as usize)).abs();
        let total = dist.magnitude() + &self.error_ulps;
        let half = BigUint::one() << (s - 1) as usize;
        (total < half).then_some(n)
    }

    fn same_scale(&self, other: &Self) {
        assert_eq!(self.scale_bits, other.scale_bits, "scale mismatch");
    }

    /// Errors add.
    pub fn add(&self, other: &Self) -> Self {
        self.same_scale(other);
        Self::new(&self.mantissa + &other.mantissa, self.scale_bits, &self.error_ulps + &other.error_ulps)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_scale(other);
        Self::new(&self.mantissa - &other.mantissa, self.scale_bits, &self.error_ulps + &other.error_ulps)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.mantissa, self.scale_bits, self.error_ulps.clone())
    }

    /// Error: `|a|·e_b + |b|·e_a + e_a·e_b + 1` ulps (rounded up).
    pub fn mul(&self, other: &Self) -> Self {
        self.same_scale(other);
        let s = self.scale_bits as u64;
        let prod = &self.mantissa * &other.mantissa;
        let m = shr_round(&prod, s);
        let rounding = if (&m << s as usize) == prod { 0u32 } else { 1u32 };
        let cross = self.mantissa.magnitude() * &other.error_ulps
            + other.mantissa.magnitude() * &self.error_ulps
            + &self.error_ulps * &other.error_ulps;
        let err = ceil_shr(&cross, s) + rounding;
        Self::new(m, self.scale_bits, err)
    }

    /// Exact scaling; the error scales by `|k|`.
    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::new(&self.mantissa * k, self.scale_bits, &self.error_ulps * k.magnitude())
    }

    /// Rounded division by a nonzero integer; error `ceil(e/|k|)` plus one
    /// ulp when the quotient is inexact.
    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let (q, r) = self.mantissa.div_rem(k);
        let (m, extra) = if r.is_zero() { (q, 0u32) } else { (div_round(&self.mantissa, k), 1u32) };
        Self::new(m, self.scale_bits, ceil_div(&self.error_ulps, k.magnitude()) + extra)
    }

    /// Multiplication by `2^k`. Exact for `k >= 0`; otherwise rounded with
    /// error `ceil(e / 2^-k) + 1`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            Self::new(&self.mantissa << k as usize, self.scale_bits, &self.error_ulps << k as usize)
        } else {
            let k = (-k) as u64;
            let m = shr_round(&self.mantissa, k);
            let inexact = (&m << k as usize) != self.mantissa;
            Self::new(m, self.scale_bits, ceil_shr(&self.error_ulps, k) + u32::from(inexact))
        }
    }

    /// Reinterprets the mantissa at scale `scale_bits + k`, i.e. divides the
    /// value by `2^k` exactly.
    pub fn div_pow2_exact(&self, k: u32) -> Self {
        Self::new(self.mantissa.clone(), self.scale_bits + k, self.error_ulps.clone())
    }

    /// Changes the scale. Increasing is exact; decreasing rounds and adds one ulp.
    pub fn rescale(&self, scale_bits: u32) -> Self {
        if scale_bits >= self.scale_bits {
            let k = (scale_bits - self.scale_bits) as usize;
            Self::new(&self.mantissa << k, scale_bits, &self.error_ulps << k)
        } else {
            let k = (self.scale_bits - scale_bits) as u64;
            let m = shr_round(&self.mantissa, k);
            let inexact = (&m << k as usize) != self.mantissa;
            Self::new(m, scale_bits, ceil_shr(&self.error_ulps, k) + u32::from(inexact))
        }
    }

    /// Widens the error bound by `extra` ulps.
    pub fn with_extra_error(mut self, extra: &BigUint) -> Self {
        self.error_ulps += extra;
        self
    }
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.to_f64(), self.error_f64())
    }
}

/// Complex number with independent [`FixedReal`] components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedComplex {
    pub re: FixedReal,
    pub im: FixedReal,
}

impl FixedComplex {
    pub fn new(re: FixedReal, im: FixedReal) -> Self {
        assert_eq!(re.scale_bits, im.scale_bits, "scale mismatch");
        Self { re, im }
    }

    pub fn from_real(re: FixedReal) -> Self {
        let s = re.scale_bits;
        Self::new(re, FixedReal::zero(s))
    }

    pub fn zero(scale_bits: u32) -> Self {
        Self::from_real(FixedReal::zero(scale_bits))
    }

    pub fn one(scale_bits: u32) -> Self {
        Self::from_real(FixedReal::from_int(&BigInt::one(), scale_bits))
    }

    pub fn scale_bits(&self) -> u32 {
        self.re.scale_bits
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    /// Component errors follow from the real rules applied to
    /// `(ac - bd) + (ad + bc)i`.
    pub fn mul(&self, o: &Self) -> Self {
        let ac = self.re.mul(&o.re);
        let bd = self.im.mul(&o.im);
        let ad = self.re.mul(&o.im);
        let bc = self.im.mul(&o.re);
        Self::new(ac.sub(&bd), ad.add(&bc))
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::new(self.re.mul_int(k), self.im.mul_int(k))
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        Self::new(self.re.div_int(k), self.im.div_int(k))
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Self::new(self.re.mul_pow2(k), self.im.mul_pow2(k))
    }

    pub fn div_pow2_exact(&self, k: u32) -> Self {
        Self::new(self.re.div_pow2_exact(k), self.im.div_pow2_exact(k))
    }

    pub fn rescale(&self, scale_bits: u32) -> Self {
        Self::new(self.re.rescale(scale_bits), self.im.rescale(scale_bits))
    }

    /// Upper bound on `|re| + |im|` in ulps.
    pub fn l1_bound_ulps(&self) -> BigUint {
        self.re.magnitude_bound_ulps() + self.im.magnitude_bound_ulps()
    }

    fn check_half(self) -> Result<Self, ArithError> {
        if self.re.error_below_half() && self.im.error_below_half() {
            Ok(self)
        } else {
            Err(ArithError::PrecisionOverflow { scale_bits: self.scale_bits() })
        }
    }
}

/// Guard bits used by the constant and transcendental routines.
const GUARD_BITS: u32 = 40;

/// `arctan(1/k)` at scale `s`, as (mantissa, error ulps).
///
/// Each term `floor(2^s / (k^(2n+1) (2n+1)))` is off by less than one ulp
/// (nested floor divisions are exact floors), and the alternating tail after
/// the last nonzero power is below one ulp.
fn arctan_inv(k: u64, s: u32) -> (BigInt, u64) {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut power = (BigInt::one() << s as usize) / &k;
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * n + 1);
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    (sum, n + 1)
}

fn pi_unchecked(scale_bits: u32) -> FixedReal {
    let s = scale_bits + GUARD_BITS;
    let (a, ea) = arctan_inv(5, s);
    let (b, eb) = arctan_inv(239, s);
    let m = (a << 4usize) - (b << 2usize);
    let err = 16 * ea + 4 * eb;
    FixedReal::new(m, s, BigUint::from(err)).rescale(scale_bits)
}

/// π via Machin's formula `16·atan(1/5) − 4·atan(1/239)`; error ≤ 2 ulps.
pub fn pi(scale_bits: u32) -> Result<FixedReal, ArithError> {
    if scale_bits < 8 {
        return Err(ArithError::PrecisionTooLow { min: 8, got: scale_bits });
    }
    Ok(pi_unchecked(scale_bits))
}

/// ln 2 = 2·atanh(1/3); error ≤ 2 ulps.
pub fn ln2(scale_bits: u32) -> FixedReal {
    let s = scale_bits + GUARD_BITS;
    let nine = BigInt::from(9u32);
    let mut power = (BigInt::one() << s as usize) / BigInt::from(3u32);
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * n + 1);
        power /= &nine;
        n += 1;
    }
    // positive terms: each floor loses < 1 ulp, tail < 2 ulps
    FixedReal::new(sum << 1usize, s, BigUint::from(2 * (n + 2))).rescale(scale_bits)
}

/// Number of halvings applied before the Taylor series in [`exp_complex`].
const EXP_HALVINGS: u32 = 12;

/// `e^z` with argument reduction: the real part is reduced by multiples of
/// ln 2, the imaginary part modulo 2π, the reduced argument is halved
/// [`EXP_HALVINGS`] times, summed by Taylor series and squared back.
///
/// Fails with [`ArithError::PrecisionOverflow`] if the final error bound of
/// either component exceeds half a unit.
pub fn exp_complex(z: &FixedComplex) -> Result<FixedComplex, ArithError> {
    let s = z.scale_bits();
    if z.re.mantissa.is_zero() && z.im.mantissa.is_zero() && z.re.error_ulps.is_zero() && z.im.error_ulps.is_zero() {
        return Ok(FixedComplex::one(s));
    }
    let work = s + GUARD_BITS + 2 * (64 - (s as u64).leading_zeros()) + EXP_HALVINGS;
    let zw = z.rescale(work);

    let two_pi = pi_unchecked(work).mul_int(&BigInt::from(2u32));
    let turns = div_round(&zw.im.mantissa, &two_pi.mantissa);
    let im_r = zw.im.sub(&two_pi.mul_int(&turns));

    let l2 = ln2(work);
    let k2 = div_round(&zw.re.mantissa, &l2.mantissa);
    let re_r = zw.re.sub(&l2.mul_int(&k2));
    let k2 = k2.to_i64().ok_or(ArithError::PrecisionOverflow { scale_bits: s })?;

    let taylor_scale = work + EXP_HALVINGS;
    let w = FixedComplex::new(re_r, im_r).div_pow2_exact(EXP_HALVINGS);

    let one_ulp = BigUint::one();
    let mut sum = FixedComplex::one(taylor_scale);
    let mut term = sum.clone();
    let mut n = 1u32;
    loop {
        term = term.mul(&w).div_int(&BigInt::from(n));
        sum = sum.add(&term);
        n += 1;
        if term.re.mantissa.magnitude() + term.im.mantissa.magnitude() <= one_ulp {
            break;
        }
    }
    // |w| < 2^-9, so the omitted tail is below the true size of the last term
    let tail = term.l1_bound_ulps();
    sum = FixedComplex::new(sum.re.with_extra_error(&tail), sum.im.with_extra_error(&tail));

    for _ in 0..EXP_HALVINGS {
        sum = sum.mul(&sum);
    }
    let scaled = FixedComplex::new(sum.re.rescale(work), sum.im.rescale(work)).mul_pow2(k2);
    scaled.rescale(s).check_half()
}

/// Square root by integer Newton iteration on the mantissa.
///
/// Error: one ulp for rounding plus the propagated input error
/// `e / sqrt(x - e)` (or `sqrt(2e)` when `x <= e`).
pub fn sqrt_fixed(x: &FixedReal) -> Result<FixedReal, ArithError> {
    let s = x.scale_bits;
    let e = BigInt::from_biguint(Sign::Plus, x.error_ulps.clone());
    if (&x.mantissa + &e).is_negative() {
        return Err(ArithError::NegativeSqrt);
    }
    let m = if x.mantissa.is_negative() { BigInt::zero() } else { x.mantissa.clone() };
    let g = 2u32;
    let fine = (&m << (s + 2 * g) as usize).sqrt();
    let root = shr_round(&fine, g as u64);
    let mut err = BigUint::one();
    if !e.is_zero() {
        let lo = &m - &e;
        let prop = if lo.is_positive() {
            let denom = (lo << s as usize).sqrt();
            let num = (&e << s as usize).to_biguint().unwrap();
            ceil_div(&num, denom.magnitude()) + 1u32
        } else {
            let r = ((&e << 1usize) << s as usize).sqrt();
            r.to_biguint().unwrap() + 1u32
        };
        err += prop;
    }
    Ok(FixedReal::new(root, s, err))
}
