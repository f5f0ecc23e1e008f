//! Binary quadratic forms, genus theory and class polynomials of imaginary
//! quadratic orders, and recognition of CM j-invariants.

use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::algnum::bigfloat::BigFloat;
use crate::algnum::IntPolynomial;
use crate::arith::{exp_complex, pi, sqrt_fixed, ArithError, FixedComplex, FixedReal};
use crate::series::j_expansion;

/// Default ceiling on the working scale of [`class_polynomial`].
pub const DEFAULT_PRECISION_CAP: u32 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CmError {
    #[error("{0} is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("class polynomial of {d} not certified below the {cap}-bit cap")]
    PrecisionCap { d: i64, cap: u32 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// The reduced form properly equivalent to this positive definite form.
    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        loop {
            // normalize b into (-a, a]
            if b <= -a || b > a {
                let two_a = 2 * a;
                let k = Integer::div_floor(&(a - b), &two_a);
                let nb = b + two_a * k;
                c += k * (b + a * k);
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return QuadForm { a, b, c };
        }
    }
}

impl std::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

pub fn is_discriminant(d: i64) -> bool {
    d < 0 && (d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1)
}

fn check(d: i64) -> Result<(), CmError> {
    if is_discriminant(d) {
        Ok(())
    } else {
        Err(CmError::InvalidDiscriminant(d))
    }
}

/// Primitive reduced forms of discriminant `d`, ordered by `a` then `b`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>, CmError> {
    check(d)?;
    let n = -d;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort_by_key(|f| (f.a, f.b));
    Ok(out)
}

pub fn class_number(d: i64) -> Result<usize, CmError> {
    Ok(reduced_forms(d)?.len())
}

fn odd_prime_divisors(mut n: i64) -> Vec<i64> {
    n = n.abs();
    let mut out = Vec::new();
    while n % 2 == 0 && n > 0 {
        n /= 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn legendre(a: i64, p: i64) -> i8 {
    let r = BigInt::from(a.rem_euclid(p)).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// A value properly represented by `f` and prime to `2 d`.
fn represented_unit(f: &QuadForm, d: i64) -> i64 {
    let modulus = 2 * d.abs();
    for r in 1i64.. {
        for x in -r..=r {
            for y in [-r, r] {
                for (x, y) in [(x, y), (y, x)] {
                    if x.gcd(&y) != 1 {
                        continue;
                    }
                    let m = f.eval(x, y);
                    if m.gcd(&modulus) == 1 {
                        return m;
                    }
                }
            }
        }
    }
    unreachable!()
}

/// The assigned genus characters of a form: Legendre symbols at the odd
/// primes dividing `d`, then the 2-adic characters `delta = (-1)^((m-1)/2)`
/// and `epsilon = (-1)^((m^2-1)/8)` as dictated by `d / 4 mod 8`.
pub fn genus_characters(f: &QuadForm, d: i64) -> Vec<i8> {
    let m = represented_unit(f, d);
    let mut out: Vec<i8> = odd_prime_divisors(d).iter().map(|&p| legendre(m, p)).collect();
    let delta = if m.rem_euclid(4) == 1 { 1 } else { -1 };
    let eps = if matches!(m.rem_euclid(8), 1 | 7) { 1 } else { -1 };
    if d % 4 == 0 {
        match (-d / 4).rem_euclid(8) {
            3 | 7 => {}
            1 | 5 | 4 => out.push(delta),
            2 => out.push(delta * eps),
            6 => out.push(eps),
            _ => {
                out.push(delta);
                out.push(eps);
            }
        }
    }
    out
}

/// True iff every genus holds a single class, i.e. the class group has
/// exponent at most 2.
pub fn one_class_per_genus(d: i64) -> Result<bool, CmError> {
    let forms = reduced_forms(d)?;
    let mut vecs: Vec<Vec<i8>> = forms.iter().map(|f| genus_characters(f, d)).collect();
    vecs.sort();
    vecs.dedup();
    Ok(vecs.len() == forms.len())
}

/// A class polynomial together with the working scale that certified it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPolynomial {
    pub discriminant: i64,
    pub poly: IntPolynomial,
    pub certified: bool,
    pub scale_bits: u32,
}

/// Hard ceiling on the working scale; `QSTAR_PRECISION_CAP` overrides it.
pub fn precision_cap() -> u32 {
    std::env::var("QSTAR_PRECISION_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_PRECISION_CAP)
}

/// First working scale tried for discriminant `d` with class number `h`.
pub fn start_bits(d: i64, h: usize) -> u32 {
    let est = 1.2 * std::f64::consts::PI * (-d as f64).sqrt() * h as f64 / std::f64::consts::LN_2;
    128 + est.ceil() as u32
}

static J_COEFFS: OnceLock<RwLock<Arc<Vec<BigInt>>>> = OnceLock::new();

/// Coefficients `c_0 .. c_t` of `j - 1/q`.
fn j_coefficients(t: usize) -> Arc<Vec<BigInt>> {
    let cell = J_COEFFS.get_or_init(|| RwLock::new(Arc::new(Vec::new())));
    {
        let cur = cell.read().unwrap();
        if cur.len() > t {
            return cur.clone();
        }
    }
    let mut w = cell.write().unwrap();
    if w.len() <= t {
        let want = (t + 1).max(2 * w.len());
        let s = j_expansion(want as i64 + 1);
        let v: Vec<BigInt> =
            (0..want as i64).map(|n| s.coefficient(n).expect("within precision").to_integer()).collect();
        *w = Arc::new(v);
    }
    w.clone()
}

/// Number of q-series terms so that the tail of `j - 1/q` is below
/// `2^-(bits + 20)`, given `|q| = exp(-log_r)`, using `c_n <= exp(4 pi sqrt n)`.
fn truncation(bits: u32, log_r: f64) -> usize {
    let pi = std::f64::consts::PI;
    let target = (bits as f64 + 20.0) * std::f64::consts::LN_2;
    let mut n = 4usize;
    loop {
        let m = (n + 1) as f64;
        let log_term = 4.0 * pi * m.sqrt() - m * log_r;
        let ratio = 2.0 * pi / m.sqrt() - log_r;
        if log_term < -target && ratio < -std::f64::consts::LN_2 {
            return n;
        }
        n += 1;
    }
}

/// `j((-b + sqrt(d)) / (2a))` at scale `s`, with certified error.
fn j_of_form(f: &QuadForm, d: i64, s: u32) -> Result<FixedComplex, CmError> {
    let a = BigInt::from(f.a);
    let pi_s = pi(s)?;
    let root = sqrt_fixed(&FixedReal::from_int(&BigInt::from(-d), s))?;
    // 2 pi i tau = -pi sqrt|d| / a - i pi b / a
    let re = pi_s.mul(&root).div_int(&a).neg();
    let im = pi_s.mul_int(&BigInt::from(-f.b)).div_int(&a);
    let z = FixedComplex::new(re, im);
    let q = exp_complex(&z)?;
    let q_inv = exp_complex(&z.neg())?;
    let log_r = std::f64::consts::PI * (-d as f64).sqrt() / f.a as f64;
    let t = truncation(s, log_r);
    let c = j_coefficients(t);
    let mut acc = FixedComplex::from_real(FixedReal::from_int(&c[t], s));
    for n in (0..t).rev() {
        acc = acc.mul(&q).add(&FixedComplex::from_real(FixedReal::from_int(&c[n], s)));
    }
    let tail = BigUint::one();
    let acc = FixedComplex::new(acc.re.with_extra_error(&tail), acc.im.with_extra_error(&tail));
    Ok(acc.add(&q_inv))
}

/// `H_D` at a fixed working scale; `None` when some coefficient is not
/// certified there.
pub fn class_polynomial_at(d: i64, scale_bits: u32) -> Result<Option<IntPolynomial>, CmError> {
    let forms = reduced_forms(d)?;
    let s = scale_bits;
    let js: Vec<FixedComplex> = forms.par_iter().map(|f| j_of_form(f, d, s)).collect::<Result<_, _>>()?;
    // product of (X - j), low degree first
    let mut poly = vec![FixedComplex::one(s)];
    for j in &js {
        let mut next = vec![FixedComplex::zero(s); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(j));
        }
        poly = next;
    }
    let mut coeffs = Vec::with_capacity(poly.len());
    for c in &poly {
        match (c.re.certified_integer(), c.im.certified_integer()) {
            (Some(x), Some(y)) if y.is_zero() => coeffs.push(x),
            _ => return Ok(None),
        }
    }
    Ok(Some(IntPolynomial::new(coeffs)))
}

/// `H_D`, doubling the working scale until every coefficient is certified.
pub fn class_polynomial(d: i64) -> Result<ClassPolynomial, CmError> {
    let h = class_number(d)?;
    let cap = precision_cap();
    let mut bits = start_bits(d, h).min(cap);
    loop {
        if let Some(poly) = class_polynomial_at(d, bits)? {
            return Ok(ClassPolynomial { discriminant: d, poly, certified: true, scale_bits: bits });
        }
        log::debug!("H({d}) not certified at {bits} bits");
        if bits >= cap {
            return Err(CmError::PrecisionCap { d, cap });
        }
        bits = bits.saturating_mul(2).min(cap);
    }
}

/// `log |largest root|` estimated from the coefficients (within a factor
/// depending only on the degree).
fn log_root_bound(g: &IntPolynomial) -> f64 {
    let n = g.degree();
    let lc = BigFloat::from_int(&g.leading(), 64).log2_abs();
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let c = BigFloat::from_int(&g.coeff(i), 64).log2_abs();
        best = best.max((c - lc) / (n - i) as f64);
    }
    best * std::f64::consts::LN_2
}

/// Approximate `j` at the principal form in double precision with a
/// generous absolute error, `None` on overflow.
fn principal_j_f64(d: i64) -> Option<(f64, f64)> {
    let pi = std::f64::consts::PI;
    let sign = if d.rem_euclid(4) == 1 { -1.0 } else { 1.0 };
    let log_r = pi * (-d as f64).sqrt();
    if log_r > 700.0 {
        return None;
    }
    let q = sign * (-log_r).exp();
    let t = truncation(53, log_r);
    let c = j_coefficients(t);
    let mut acc = 0.0;
    for n in (0..=t).rev() {
        acc = acc * q + c[n].to_f64()?;
    }
    Some((acc + 1.0 / q, 1e-9 * (log_r.exp() + 744.0)))
}

/// Cheap necessary test: the principal `j` must be a near-root of `g`.
fn prefilter(g: &IntPolynomial, d: i64) -> bool {
    let Some((j, err)) = principal_j_f64(d) else {
        return true;
    };
    let p = 128;
    let x = BigFloat::from_f64(j, 0);
    let ax = BigFloat::from_f64(j.abs() + err, 0);
    let mut val = BigFloat::zero();
    let mut mag = BigFloat::zero();
    for c in g.coeffs().iter().rev() {
        let cf = BigFloat::from_int(c, p);
        let ca = BigFloat::from_int(&c.abs(), p);
        val = val.mul(&x, p).add(&cf, p);
        mag = mag.mul(&ax, p).add(&ca, p);
    }
    val.is_zero() || val.log2_abs() < mag.log2_abs() - 20.0
}

/// Every `D` in the search window whose class polynomial equals `g`.
pub fn identify_cm_all(g: &IntPolynomial) -> Vec<i64> {
    let n = g.degree();
    if n == 0 || n > 16 || !g.is_monic() {
        return Vec::new();
    }
    let lr = log_root_bound(g);
    let est = if lr.is_finite() && lr > 0.0 { (lr / std::f64::consts::PI).powi(2) } else { 0.0 };
    let lo = ((est / 4.0).floor() as i64).max(3);
    let hi = ((est * 4.0).ceil() as i64).max(16);
    let candidates: Vec<i64> = (lo..=hi)
        .map(|m| -m)
        .filter(|&d| is_discriminant(d))
        .filter(|&d| class_number(d).ok() == Some(n))
        .filter(|&d| prefilter(g, d))
        .collect();
    let mut hits: Vec<i64> = candidates
        .par_iter()
        .filter(|&&d| class_polynomial(d).map(|h| h.poly == *g).unwrap_or(false))
        .copied()
        .collect();
    hits.sort_by_key(|d| d.abs());
    if hits.len() > 1 {
        log::warn!("several discriminants match: {hits:?}");
    }
    hits
}

/// The discriminant `D` with `H_D = g`, smallest `|D|` first.
pub fn identify_cm(g: &IntPolynomial) -> Option<i64> {
    identify_cm_all(g).into_iter().next()
}
