//! Factorization over the rationals (Zassenhaus) and discriminants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::intpoly::IntPolynomial;
use super::modp;
use crate::arith::Rational;
use crate::poly::QPoly;

const RNG_SEED: u64 = 0x5eed_0f_2a11;

fn resultant_q(a: &QPoly, b: &QPoly) -> Rational {
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return Rational::zero();
    };
    if db == 0 {
        return pow_rat(&b.leading(), da);
    }
    let (_, r) = a.divrem(b);
    let Some(dr) = r.degree() else {
        return Rational::zero();
    };
    let sign = if da * db % 2 == 1 { -Rational::one() } else { Rational::one() };
    sign * pow_rat(&b.leading(), da - dr) * resultant_q(b, &r)
}

fn pow_rat(x: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

pub fn resultant(a: &IntPolynomial, b: &IntPolynomial) -> BigInt {
    resultant_q(&a.to_qpoly(), &b.to_qpoly()).to_integer()
}

/// Standard discriminant `(-1)^(n(n-1)/2) res(p, p') / lc(p)`.
pub fn discriminant(p: &IntPolynomial) -> BigInt {
    let n = p.degree();
    if n == 0 {
        return BigInt::one();
    }
    let r = resultant(p, &p.derivative());
    let d = r / p.leading();
    if (n * (n - 1) / 2) % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Yun's algorithm over the rationals; returns primitive factors with multiplicity.
pub fn squarefree_decomposition(p: &IntPolynomial) -> Vec<(IntPolynomial, u32)> {
    let f = p.to_qpoly();
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    let b = f.gcd(&df);
    let mut c = f.divrem(&b).0;
    let mut d = df.divrem(&b).0.sub(&c.derivative());
    let mut i = 1;
    while c.degree().unwrap_or(0) > 0 {
        let a = c.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((IntPolynomial::from_qpoly(&a), i));
        }
        c = c.divrem(&a).0;
        d = d.divrem(&a).0.sub(&c.derivative());
        i += 1;
    }
    out
}

fn is_prime_small(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Smallest prime above 16 not dividing the leading coefficient and keeping `f` squarefree.
pub fn good_prime(f: &IntPolynomial) -> u64 {
    let l = f.leading();
    let mut p = 17u64;
    loop {
        if is_prime_small(p) && !(&l % p).is_zero() {
            let fp = modp::from_int(f.coeffs(), p);
            if modp::is_squarefree(&fp, p) {
                return p;
            }
        }
        p += 1;
    }
}

fn sym_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn reduce(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    v.iter().map(|c| c.mod_floor(m)).collect()
}

fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    IntPolynomial::new(a.to_vec()).mul(&IntPolynomial::new(b.to_vec())).coeffs().to_vec()
}

/// Lift `f = prod factors (mod p)` to monic factors mod `p^k`; `f` is monic mod `p^k`.
fn hensel_lift(f: &[BigInt], factors: &[modp::Fp], p: u64, k: u32, pk: &BigInt) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        return vec![reduce(f, pk)];
    }
    let mid = factors.len() / 2;
    let prod = |fs: &[modp::Fp]| fs.iter().fold(vec![1u64], |a, b| modp::mul(&a, b, p));
    let g0 = prod(&factors[..mid]);
    let h0 = prod(&factors[mid..]);
    let (_, s, t) = modp::ext_gcd(&g0, &h0, p);
    let mut g = modp::to_int(&g0);
    let mut h = modp::to_int(&h0);
    let pb = BigInt::from(p);
    let mut pj = pb.clone();
    for _ in 1..k {
        let gh = mul_int(&g, &h);
        let n = f.len().max(gh.len());
        let e: Vec<BigInt> = (0..n)
            .map(|i| {
                let a = f.get(i).cloned().unwrap_or_default();
                let b = gh.get(i).cloned().unwrap_or_default();
                let d = a - b;
                debug_assert!((&d % &pj).is_zero());
                d / &pj
            })
            .collect();
        let ep = modp::from_int(&e, p);
        let dh = modp::rem(&modp::mul(&s, &ep, p), &h0, p);
        let dg = modp::rem(&modp::mul(&t, &ep, p), &g0, p);
        for (i, c) in dg.iter().enumerate() {
            g[i] += &pj * c;
        }
        for (i, c) in dh.iter().enumerate() {
            h[i] += &pj * c;
        }
        pj *= &pb;
    }
    let mut out = hensel_lift(&g, &factors[..mid], p, k, pk);
    out.extend(hensel_lift(&h, &factors[mid..], p, k, pk));
    out
}

/// Irreducible factors of a primitive squarefree polynomial.
fn zassenhaus(f: &IntPolynomial) -> Vec<IntPolynomial> {
    let n = f.degree();
    if n <= 1 {
        return vec![f.primitive()];
    }
    let p = good_prime(f);
    let l = f.leading();
    let fp = modp::from_int(f.coeffs(), p);
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let modular = modp::factor_squarefree(&modp::monic(&fp, p), p, &mut rng);
    if modular.len() == 1 {
        return vec![f.primitive()];
    }
    // any factor of l f, scaled to leading coefficient l, has coefficients below this
    let bound = l.abs() * (BigInt::one() << n) * f.norm2_bound() * 2;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    let linv = l.mod_floor(&pk).modinv(&pk).expect("p does not divide l");
    let fmon: Vec<BigInt> = f.coeffs().iter().map(|c| (c * &linv).mod_floor(&pk)).collect();
    let lifted = hensel_lift(&fmon, &modular, p, k, &pk);
    recombine(f.clone(), lifted, &pk)
}

fn recombine(mut f: IntPolynomial, mut u: Vec<Vec<BigInt>>, pk: &BigInt) -> Vec<IntPolynomial> {
    let mut out = Vec::new();
    let mut s = 1;
    'outer: while 2 * s <= u.len() {
        let l = f.leading();
        let f0 = &l * f.coeff(0);
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let c0 = idx.iter().fold(l.clone(), |acc, &i| (acc * &u[i][0]).mod_floor(pk));
            let c0 = sym_mod(&c0, pk);
            let plausible = f0.is_zero() || (!c0.is_zero() && (&f0 % &c0).is_zero());
            if plausible {
                let prod = idx.iter().fold(vec![l.clone()], |acc, &i| reduce(&mul_int(&acc, &u[i]), pk));
                let g = IntPolynomial::new(prod.iter().map(|c| sym_mod(c, pk)).collect()).primitive();
                if let Some(q) = f.div_exact(&g) {
                    out.push(g);
                    f = q;
                    for &i in idx.iter().rev() {
                        u.remove(i);
                    }
                    continue 'outer;
                }
            }
            if !next_combination(&mut idx, u.len()) {
                break;
            }
        }
        s += 1;
    }
    if f.degree() > 0 {
        out.push(f.primitive());
    }
    out
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Irreducible factors with multiplicities, sorted by degree then coefficients.
pub fn factor_rational(p: &IntPolynomial) -> Vec<(IntPolynomial, u32)> {
    let mut out = Vec::new();
    for (a, m) in squarefree_decomposition(p) {
        for g in zassenhaus(&a) {
            out.push((g, m));
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

/// Rational root of a linear factor `a x + b`.
pub fn linear_root(f: &IntPolynomial) -> Option<Rational> {
    (f.degree() == 1).then(|| Rational::new(-f.coeff(0), f.coeff(1)))
}

/// Rational roots of `p`, each once.
pub fn rational_roots(p: &IntPolynomial) -> Vec<Rational> {
    factor_rational(p).iter().filter_map(|(f, _)| linear_root(f)).collect()
}

/// Small helper for tests and callers holding machine integers.
pub fn to_i64s(p: &IntPolynomial) -> Option<Vec<i64>> {
    p.coeffs().iter().map(|c| c.to_i64()).collect()
}
