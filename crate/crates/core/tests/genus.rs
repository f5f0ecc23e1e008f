//! CM fields against genus theory: for one class per genus, Q(j) is the real
//! subfield of the genus field.

mod common;

use std::collections::BTreeSet;

use common::{factor_spans, square_class_span};
use qstar::cm::{class_number, class_polynomial};
use qstar::data::result_rows;
use qstar::report::analyze_polynomial;

fn odd_prime_divisors(mut n: i64) -> Vec<i64> {
    n = n.abs();
    while n % 2 == 0 {
        n /= 2;
    }
    let mut out = Vec::new();
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

/// Square classes of the assigned characters of discriminant `d`.
fn character_classes(d: i64) -> Vec<i128> {
    let mut out: Vec<i128> =
        odd_prime_divisors(d).into_iter().map(|p| if p % 4 == 1 { p as i128 } else { -(p as i128) }).collect();
    if d.rem_euclid(4) == 0 {
        let n = -d / 4;
        match n.rem_euclid(8) {
            1 | 5 | 4 => out.push(-1),
            2 => out.push(-2),
            6 => out.push(2),
            0 => out.extend([-1, 2]),
            _ => {}
        }
    }
    out
}

/// Nontrivial square classes of the real subfield of the genus field.
fn genus_real_span(d: i64) -> BTreeSet<i128> {
    square_class_span(&character_classes(d)).into_iter().filter(|&c| c > 0).collect()
}

fn fixture_discriminants() -> Vec<i64> {
    let mut ds: Vec<i64> = result_rows().iter().flat_map(|r| r.discriminants()).collect();
    ds.sort();
    ds.dedup();
    ds.retain(|d| *d != -332);
    ds
}

#[test]
fn class_polynomial_fields_match_genus_theory() {
    for d in fixture_discriminants() {
        let h = class_number(d).unwrap();
        let want = genus_real_span(d);
        assert_eq!(want.len() + 1, h, "D = {d}: genus count");
        if h == 1 {
            continue;
        }
        let poly = class_polynomial(d).unwrap().poly.to_qpoly();
        let r = analyze_polynomial(0, qstar::hyperelliptic::CurvePoint::InfinityMinus, poly);
        assert_eq!(r.factors.len(), 1, "D = {d}");
        assert_eq!(r.factors[0].cm, Some(d));
        assert_eq!(factor_spans(&r), vec![want], "D = {d}");
    }
}

#[test]
fn printed_cm_fields_against_genus_theory() {
    let mut disagree = Vec::new();
    for row in result_rows() {
        for e in row.entries.iter().filter(|e| !e.generators.is_empty()) {
            let Some(d) = e.d.as_ref().map(|d| d.parse::<i64>().unwrap()) else {
                continue;
            };
            let g: Vec<i128> = e.generators.iter().map(|s| s.parse().unwrap()).collect();
            if square_class_span(&g) != genus_real_span(d) {
                disagree.push((row.level, row.point.as_str(), d));
            }
        }
    }
    disagree.sort();
    assert_eq!(
        disagree,
        vec![(186, "(-4/3,-143/27)", -332), (205, "(-2,-7)", -1435), (266, "(-5/2,-83/8)", -532), (390, "inf-", -5460),]
    );
    assert_eq!(genus_real_span(-372), square_class_span(&[3, 31]));
    assert_eq!(genus_real_span(-1435), square_class_span(&[5, 41]));
    assert_eq!(genus_real_span(-532), square_class_span(&[7, 19]));
    assert_eq!(genus_real_span(-5460), square_class_span(&[3, 5, 7, 13]));
}
