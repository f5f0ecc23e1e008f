//! Squarefree parts of integers.

use num_bigint::{BigInt, BigUint};
use std::collections::BTreeMap;

use num_prime::nt_funcs::{factors, is_prime};
use num_prime::FactorizationConfig;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;

/// The squarefree `d` with `n = d * s^2`, sign kept. `None` for zero, or
/// when a cofactor resists factorization and is not a perfect square.
pub fn squarefree_part(n: &BigInt) -> Option<BigInt> {
    if n.is_zero() {
        return None;
    }
    // cheap pass first, so large square cofactors never reach the rho stage
    let mut cheap = FactorizationConfig::default();
    cheap.rho_trials = 0;
    let (found, rest) = factors(n.magnitude().clone(), Some(cheap));
    let mut d = odd_part(found);
    let mut cofactor = BigUint::one();
    for r in rest.unwrap_or_default() {
        cofactor *= r;
    }
    if !cofactor.is_one() && !is_square(&cofactor) {
        if is_prime(&cofactor, None).probably() {
            d *= cofactor;
        } else {
            let (found, rest) = factors(cofactor, Some(FactorizationConfig::default()));
            d *= odd_part(found);
            let mut left = BigUint::one();
            for r in rest.unwrap_or_default() {
                left *= r;
            }
            if !is_square(&left) {
                return None;
            }
        }
    }
    Some(BigInt::from_biguint(n.sign(), d))
}

fn odd_part(found: BTreeMap<BigUint, usize>) -> BigUint {
    found.into_iter().filter(|(_, e)| e % 2 == 1).fold(BigUint::one(), |acc, (p, _)| acc * p)
}

fn is_square(n: &BigUint) -> bool {
    let s = n.sqrt();
    &s * &s == *n
}

/// Squarefree part of a nonzero rational `p/q`, i.e. of `p q`.
pub fn squarefree_part_rational(x: &Rational) -> Option<BigInt> {
    squarefree_part(&(x.numer() * x.denom()))
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}
