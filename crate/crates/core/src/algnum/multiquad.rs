//! Elements of multiquadratic fields `Q(sqrt(d1), ..., sqrt(dk))` and
//! recognition of polynomials whose roots live in one.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::bigfloat::{self, BigComplex, BigFloat};
use super::intfactor::squarefree_part;
use super::intpoly::IntPolynomial;
use super::surd::quadratic_surd_roots;
use crate::arith::Rational;
use crate::poly::QPoly;

/// `sum_S c_S prod_{i in S} sqrt(d_i)`, with `S` encoded as a bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiQuadElement {
    generators: Vec<BigInt>,
    coords: Vec<Rational>,
}

impl MultiQuadElement {
    pub fn new(generators: Vec<BigInt>, coords: Vec<Rational>) -> Self {
        assert_eq!(coords.len(), 1usize << generators.len(), "need 2^k coordinates");
        MultiQuadElement { generators, coords }
    }

    pub fn from_rational(generators: &[BigInt], c: Rational) -> Self {
        let mut coords = vec![Rational::zero(); 1 << generators.len()];
        coords[0] = c;
        MultiQuadElement { generators: generators.to_vec(), coords }
    }

    pub fn generators(&self) -> &[BigInt] {
        &self.generators
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn coord(&self, mask: usize) -> &Rational {
        &self.coords[mask]
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.generators, o.generators);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        Self::new(self.generators.clone(), coords)
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.generators, o.generators);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        Self::new(self.generators.clone(), coords)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.generators.clone(), self.coords.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.generators, o.generators);
        let n = self.coords.len();
        let mut out = vec![Rational::zero(); n];
        for s in 0..n {
            if self.coords[s].is_zero() {
                continue;
            }
            for t in 0..n {
                if o.coords[t].is_zero() {
                    continue;
                }
                let mut f = &self.coords[s] * &o.coords[t];
                let both = s & t;
                for (i, d) in self.generators.iter().enumerate() {
                    if both >> i & 1 == 1 {
                        f *= Rational::from_integer(d.clone());
                    }
                }
                out[s ^ t] += f;
            }
        }
        Self::new(self.generators.clone(), out)
    }

    /// Flip the sign of `sqrt(d_i)` for every bit `i` set in `sigma`.
    pub fn conjugate(&self, sigma: usize) -> Self {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(s, c)| if (s & sigma).count_ones() % 2 == 1 { -c } else { c.clone() })
            .collect();
        Self::new(self.generators.clone(), coords)
    }

    /// `prod_sigma (x - theta^sigma)` over all `2^k` sign flips, if its
    /// coefficients are rational (they always are, but this is the check).
    pub fn conjugate_product(&self) -> Option<QPoly> {
        let n = self.coords.len();
        let one = Self::from_rational(&self.generators, Rational::one());
        // coefficients of the product, low degree first
        let mut acc: Vec<MultiQuadElement> = vec![one];
        for sigma in 0..n {
            let c = self.conjugate(sigma);
            let mut next = vec![Self::from_rational(&self.generators, Rational::zero()); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                next[i + 1] = next[i + 1].add(a);
                next[i] = next[i].sub(&a.mul(&c));
            }
            acc = next;
        }
        let mut out = Vec::with_capacity(acc.len());
        for e in acc {
            if !e.is_rational() {
                return None;
            }
            out.push(e.coords[0].clone());
        }
        Some(QPoly::new(out))
    }

    /// Evaluate a rational polynomial at this element.
    pub fn eval_poly(&self, p: &QPoly) -> Self {
        let mut acc = Self::from_rational(&self.generators, Rational::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Self::from_rational(&self.generators, c.clone()));
        }
        acc
    }

    /// The conjugate whose coordinate list is lexicographically largest.
    pub fn canonical(&self) -> Self {
        (0..self.coords.len()).map(|s| self.conjugate(s)).max_by(|a, b| a.coords.cmp(&b.coords)).unwrap()
    }

    pub fn field_string(&self) -> String {
        field_string(&self.generators)
    }
}

pub fn field_string(gens: &[BigInt]) -> String {
    let inner: Vec<String> = gens.iter().map(|d| format!("sqrt({d})")).collect();
    format!("Q({})", inner.join(","))
}

fn basis_name(gens: &[BigInt], mask: usize) -> String {
    let parts: Vec<String> =
        gens.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| format!("sqrt({d})")).collect();
    parts.join("*")
}

impl fmt::Display for MultiQuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if s == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", basis_name(&self.generators, s))?;
            } else {
                write!(f, "{a}*{}", basis_name(&self.generators, s))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn canonical_key(d: &BigInt) -> (BigInt, bool) {
    (d.abs(), d.is_negative())
}

fn nearest_int_tight(x: &BigFloat, prec: u64, tol_bits: f64) -> Option<BigInt> {
    let (n, d) = x.nearest_integer(prec);
    (d.log2_abs() < -tol_bits).then_some(n)
}

/// The group of sign characters generated by `chars`.
fn span(chars: &[u64], full: u64) -> Vec<u64> {
    let mut group = vec![0u64];
    for &c in chars {
        if group.contains(&c) {
            continue;
        }
        let extra: Vec<u64> = group.iter().map(|g| g ^ c).collect();
        group.extend(extra);
    }
    group.iter().map(|g| g & full).collect()
}

/// Advance an ascending selection from `1..n`; false when exhausted.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if c[i] < n - m + i {
            c[i] += 1;
            for j in i + 1..m {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// If the signed power sums over the split `plus` have integral squares,
/// the squarefree radicand they share.
fn character_radicand(powers: &[Vec<BigComplex>], plus: u64, p: u64, tol: f64) -> Option<BigInt> {
    let mut squares = Vec::with_capacity(powers[0].len());
    for t in 0..powers[0].len() {
        let mut a = BigComplex::zero();
        for (j, pw) in powers.iter().enumerate() {
            a = if plus >> j & 1 == 1 { a.add(&pw[t], p) } else { a.sub(&pw[t], p) };
        }
        let sq = a.mul(&a, p);
        if sq.im.log2_abs() > -tol {
            return None;
        }
        squares.push(nearest_int_tight(&sq.re, p, tol)?);
    }
    let gg = squares.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if gg.is_zero() {
        return None;
    }
    let sign = squares.iter().find(|v| !v.is_zero()).unwrap().signum();
    squarefree_part(&(gg * sign)).filter(|d| !d.is_one())
}

/// One attempt at `prec` bits on a monic integer polynomial.
fn identify_monic(g: &IntPolynomial, prec: u64) -> Option<MultiQuadElement> {
    let n = g.degree();
    let k = n.trailing_zeros() as usize;
    let roots = bigfloat::roots(g, prec)?;
    let p = prec + 16;
    let tol = (prec as f64 / 4.0).max(24.0);
    // the character of a product of t radicands may first show up in theta^t
    let top = (k + 2).max(3);
    let mut powers: Vec<Vec<BigComplex>> = Vec::with_capacity(n);
    for r in &roots {
        let mut pw = vec![r.clone()];
        for _ in 1..top {
            let next = pw.last().unwrap().mul(r, p);
            pw.push(next);
        }
        powers.push(pw);
    }
    let full: u64 = (1u64 << n) - 1;
    // A character is stored as the bitmask of roots where it is -1.
    let mut found: Vec<(u64, BigInt)> = Vec::new();
    let half = n / 2;
    // subsets of size n/2 containing root 0 give the +1 side
    let mut rest: Vec<usize> = (1..half).collect();
    loop {
        let plus: u64 = rest.iter().fold(1u64, |m, &i| m | 1 << i);
        let minus = full & !plus;
        if let Some(d) = character_radicand(&powers, plus, p, tol) {
            found.push((minus, d));
        }
        if !next_combination(&mut rest, n) {
            break;
        }
    }
    if found.len() != n - 1 {
        log::debug!("multiquadratic: {} characters found, expected {}", found.len(), n - 1);
        return None;
    }
    let masks: Vec<u64> = found.iter().map(|(m, _)| *m).collect();
    if span(&masks, full).len() != n {
        return None;
    }
    found.sort_by(|a, b| canonical_key(&a.1).cmp(&canonical_key(&b.1)));
    let mut chosen: Vec<(u64, BigInt)> = Vec::new();
    for (m, d) in &found {
        let cur: Vec<u64> = chosen.iter().map(|c| c.0).collect();
        if !span(&cur, full).contains(m) {
            chosen.push((*m, d.clone()));
        }
        if chosen.len() == k {
            break;
        }
    }
    if chosen.len() != k {
        return None;
    }
    let gens: Vec<BigInt> = chosen.iter().map(|c| c.1.clone()).collect();
    let sqrt_d: Vec<BigComplex> = gens.iter().map(|d| BigComplex::sqrt_int(d, p)).collect();
    let mut coords = Vec::with_capacity(n);
    for s in 0..n {
        // chi_S(j) = prod over i in S of chosen character i at root j
        let mut sum = BigComplex::zero();
        for (j, r) in roots.iter().enumerate() {
            let neg =
                chosen.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).filter(|(_, c)| c.0 >> j & 1 == 1).count()
                    % 2
                    == 1;
            sum = if neg { sum.sub(r, p) } else { sum.add(r, p) };
        }
        let mut prod_d = BigInt::one();
        for (i, sd) in sqrt_d.iter().enumerate() {
            if s >> i & 1 == 1 {
                sum = sum.mul(sd, p);
                prod_d *= &gens[i];
            }
        }
        if sum.im.log2_abs() > -tol {
            return None;
        }
        let x = nearest_int_tight(&sum.re, p, tol)?;
        coords.push(Rational::new(x, prod_d * BigInt::from(n)));
    }
    let theta = MultiQuadElement::new(gens, coords);
    (theta.conjugate_product()? == g.to_qpoly()).then_some(theta)
}

/// `log2` of Fujiwara's bound on the roots of a monic polynomial.
fn root_bound_bits(g: &IntPolynomial) -> f64 {
    let n = g.degree();
    (1..=n)
        .filter(|&i| !g.coeff(n - i).is_zero())
        .map(|i| (g.coeff(n - i).bits() as f64) / i as f64)
        .fold(0.0, f64::max)
        + 2.0
}

/// A primitive element `theta` of a multiquadratic field whose sign-flip
/// conjugates are exactly the roots of `g`, or `None`.
pub fn identify_multiquadratic(g: &IntPolynomial) -> Option<MultiQuadElement> {
    let n = g.degree();
    if !(n == 2 || n == 4 || n == 8 || n == 16) {
        return None;
    }
    if n == 2 {
        let (r, _) = quadratic_surd_roots(g).ok()?;
        return Some(r.to_multiquad());
    }
    let lc = g.leading();
    let monic = g.monic_transform();
    // squared power sums of degree t reach (n 2^b)^(2t) for roots below 2^b;
    // the tolerance takes a quarter of the working bits
    let b = root_bound_bits(&monic);
    let top = (n.trailing_zeros() as f64 + 2.0).max(3.0);
    let need = 2.0 * top * (b + (n as f64).log2()) + 64.0;
    let mut prec = 256u64.max((need * 4.0 / 3.0).ceil() as u64);
    for _ in 0..5 {
        if let Some(t) = identify_monic(&monic, prec) {
            let theta = t.scale(&Rational::new(BigInt::one(), lc.clone())).canonical();
            debug_assert_eq!(IntPolynomial::from_qpoly(&theta.conjugate_product().unwrap()), g.primitive());
            return Some(theta);
        }
        prec *= 2;
    }
    None
}
