#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use qstar::data::bundled_dataset;
use qstar::jpipeline::{FExpression, LevelContext};
use qstar::report::{FieldDescriptor, PointReport};

pub fn context(level: u64) -> (LevelContext, Vec<FExpression>) {
    let ctx = LevelContext::new(bundled_dataset(level).expect("bundled level"), None).expect("context");
    let exprs = ctx.express_all().expect("expressions");
    (ctx, exprs)
}

/// Squarefree part by trial division.
pub fn squarefree(n: i128) -> i128 {
    assert!(n != 0);
    let mut m = n.abs();
    let mut out = 1i128;
    let mut p = 2i128;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    out * m * n.signum()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Nontrivial classes of `Q*/Q*^2` spanned by `gens`.
pub fn square_class_span(gens: &[i128]) -> BTreeSet<i128> {
    let mut span = BTreeSet::from([1i128]);
    for &g in gens {
        let g = squarefree(g);
        let next: Vec<i128> = span
            .iter()
            .map(|&s| {
                let d = gcd(s, g);
                (s / d) * (g / d)
            })
            .collect();
        span.extend(next);
    }
    span.remove(&1);
    span
}

pub fn to_i128(n: &BigInt) -> i128 {
    n.to_i128().expect("small generator")
}

/// Square-class spans of the non-rational factors.
pub fn factor_spans(r: &PointReport) -> Vec<BTreeSet<i128>> {
    r.factors
        .iter()
        .filter(|f| !matches!(f.field, FieldDescriptor::Rational(_)))
        .map(|f| {
            let g: Vec<i128> = f.field.generators().iter().map(to_i128).collect();
            square_class_span(&g)
        })
        .collect()
}
