//! q-expansion datasets for the basis `h1, h2`, the model functions `x, y`
//! and derivation of the sextic.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::arith::{rat, Rational};
use crate::hyperelliptic::{CurveError, SexticCurve};
use crate::series::LaurentSeries;

/// Six unknowns plus ten checked coefficients.
pub const MIN_EQUATION_PRECISION: i64 = 16;
pub const MIN_COORDINATE_PRECISION: i64 = 10;
/// Extra vanishing coefficients below which a derivation is flagged.
pub const LOW_MARGIN: i64 = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("malformed dataset: {0}")]
    Malformed(String),
    #[error("unsupported dataset format {0}")]
    Format(u64),
    #[error("precision {available} is below the required {required}")]
    InsufficientPrecision { required: i64, available: i64 },
    #[error("input series are linearly dependent")]
    Dependent,
    #[error("span has no vector of valuation {0}")]
    MissingPivot(i64),
    #[error("echelon basis is not integral")]
    NonIntegralBasis,
    #[error("y^2 - f(x) has a nonzero coefficient at q^{exponent}")]
    Residual { exponent: i64 },
    #[error("derived coefficients are not all integers: {0:?}")]
    NonIntegralCoefficients(Vec<String>),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// `h1 = q + 0 q^2 + ...`, `h2 = q^2 + ...`, coefficients known below `precision`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModularDataset {
    level: u64,
    precision: i64,
    h1: Vec<BigInt>,
    h2: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Str(String),
    Int(i64),
}

impl Num {
    fn to_big(&self) -> Result<BigInt, DatasetError> {
        match self {
            Num::Int(i) => Ok(BigInt::from(*i)),
            Num::Str(s) => s.trim().parse().map_err(|_| DatasetError::Malformed(format!("not an integer: {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    format: u64,
    level: u64,
    precision: i64,
    h1: Vec<Num>,
    h2: Vec<Num>,
}

fn is_squarefree(n: u64) -> bool {
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl ModularDataset {
    /// `h1` lists `q^1..q^(precision-1)`, `h2` lists `q^2..q^(precision-1)`.
    pub fn new(level: u64, h1: Vec<BigInt>, h2: Vec<BigInt>) -> Result<Self, DatasetError> {
        let bad = |m: &str| Err(DatasetError::Malformed(m.to_string()));
        if level == 0 || !is_squarefree(level) {
            return bad("level must be a square-free positive integer");
        }
        if h1.len() < 2 || h2.len() + 1 != h1.len() {
            return bad("h1 must have one more coefficient than h2 and at least two");
        }
        if !h1[0].is_one() || !h1[1].is_zero() {
            return bad("h1 must start q + 0 q^2");
        }
        if !h2[0].is_one() {
            return bad("h2 must start q^2");
        }
        let precision = h1.len() as i64 + 1;
        Ok(ModularDataset { level, precision, h1, h2 })
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let f: DatasetFile = serde_json::from_str(text).map_err(|e| DatasetError::Malformed(e.to_string()))?;
        if f.format != 1 {
            return Err(DatasetError::Format(f.format));
        }
        let h1 = f.h1.iter().map(Num::to_big).collect::<Result<Vec<_>, _>>()?;
        let h2 = f.h2.iter().map(Num::to_big).collect::<Result<Vec<_>, _>>()?;
        let d = Self::new(f.level, h1, h2)?;
        if d.precision != f.precision {
            return Err(DatasetError::Malformed(format!(
                "declared precision {} but coefficients give {}",
                f.precision, d.precision
            )));
        }
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        let s = |v: &[BigInt]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        json!({
            "format": 1,
            "level": self.level,
            "precision": self.precision,
            "h1": s(&self.h1),
            "h2": s(&self.h2),
        })
        .to_string()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn h1_coeffs(&self) -> &[BigInt] {
        &self.h1
    }

    pub fn h2_coeffs(&self) -> &[BigInt] {
        &self.h2
    }

    pub fn h1(&self) -> LaurentSeries {
        LaurentSeries::from_integers(1, self.h1.clone())
    }

    pub fn h2(&self) -> LaurentSeries {
        LaurentSeries::from_integers(2, self.h2.clone())
    }

    /// Keep coefficients below `precision` only.
    pub fn truncated(&self, precision: i64) -> Result<Self, DatasetError> {
        if precision < 3 || precision > self.precision {
            return Err(DatasetError::InsufficientPrecision { required: precision, available: self.precision });
        }
        let n = (precision - 1) as usize;
        Self::new(self.level, self.h1[..n].to_vec(), self.h2[..n - 1].to_vec())
    }
}

/// Row-reduce two series to the normalized basis `(q + 0 q^2 + ..., q^2 + ...)`.
pub fn echelonize(level: u64, g1: &LaurentSeries, g2: &LaurentSeries) -> Result<ModularDataset, DatasetError> {
    let prec = g1.precision().min(g2.precision());
    if prec < 3 {
        return Err(DatasetError::InsufficientPrecision { required: 3, available: prec });
    }
    let row = |g: &LaurentSeries| -> Result<Vec<Rational>, DatasetError> {
        if !g.is_zero() && g.valuation() < 1 {
            return Err(DatasetError::Malformed("series must have valuation >= 1".into()));
        }
        (1..prec).map(|e| g.coefficient(e).map_err(|e| DatasetError::Malformed(e.to_string()))).collect()
    };
    let mut a = row(g1)?;
    let mut b = row(g2)?;
    if a[0].is_zero() {
        std::mem::swap(&mut a, &mut b);
    }
    if a[0].is_zero() {
        return Err(DatasetError::MissingPivot(1));
    }
    let f = &b[0] / &a[0];
    for i in 0..b.len() {
        let t = &f * &a[i];
        b[i] -= t;
    }
    if b.iter().all(|c| c.is_zero()) {
        return Err(DatasetError::Dependent);
    }
    if b[1].is_zero() {
        return Err(DatasetError::MissingPivot(2));
    }
    let lb = b[1].clone();
    let h2: Vec<Rational> = b.iter().map(|c| c / &lb).collect();
    let c2 = a[1].clone();
    let la = a[0].clone();
    let h1: Vec<Rational> = a.iter().zip(&h2).map(|(x, y)| (x - &c2 * y) / &la).collect();
    let int = |v: &[Rational]| -> Result<Vec<BigInt>, DatasetError> {
        v.iter()
            .map(|c| if c.is_integer() { Ok(c.to_integer()) } else { Err(DatasetError::NonIntegralBasis) })
            .collect()
    };
    ModularDataset::new(level, int(&h1)?, int(&h2[1..])?)
}

/// `x = h1/h2` and `y = -q (dx/dq) / h2`.
pub fn coordinate_series(data: &ModularDataset) -> Result<(LaurentSeries, LaurentSeries), DatasetError> {
    if data.precision < MIN_COORDINATE_PRECISION {
        return Err(DatasetError::InsufficientPrecision {
            required: MIN_COORDINATE_PRECISION,
            available: data.precision,
        });
    }
    let inv = data.h2().invert().expect("h2 has leading coefficient 1");
    let x = data.h1().mul(&inv);
    let y = x.q_derivative().mul(&inv).neg();
    Ok((x, y))
}

/// Outcome of a successful derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub curve: SexticCurve,
    /// Positive exponents at which `y^2 - f(x)` was checked to vanish.
    pub verified_terms: i64,
    /// Checked coefficients beyond the minimum precision.
    pub extra_verified: i64,
}

impl Derivation {
    pub fn low_margin(&self) -> bool {
        self.extra_verified < LOW_MARGIN
    }
}

/// Finds `a0..a5` with `y^2 = x^6 + a5 x^5 + ... + a0` to the dataset's precision.
pub fn derive_equation_checked(data: &ModularDataset) -> Result<Derivation, DatasetError> {
    if data.precision < MIN_EQUATION_PRECISION {
        return Err(DatasetError::InsufficientPrecision {
            required: MIN_EQUATION_PRECISION,
            available: data.precision,
        });
    }
    let (x, y) = coordinate_series(data)?;
    let mut xp = vec![LaurentSeries::constant(Rational::one(), data.precision)];
    for k in 1..=6 {
        let next = xp[k - 1].mul(&x);
        xp.push(next);
    }
    let mut r = y.square().sub(&xp[6]);
    let mut a: Vec<Rational> = vec![Rational::zero(); 6];
    for k in (0..6).rev() {
        let e = -(k as i64);
        if !r.is_zero() && r.valuation() < e {
            return Err(DatasetError::Residual { exponent: r.valuation() });
        }
        let c = r.coefficient(e).expect("within precision");
        r = r.sub(&xp[k].scale(&c));
        a[k] = c;
    }
    if !r.is_zero() {
        return Err(DatasetError::Residual { exponent: r.valuation() });
    }
    if a.iter().any(|c| !c.is_integer()) {
        return Err(DatasetError::NonIntegralCoefficients(a.iter().map(|c| c.to_string()).collect()));
    }
    let verified_terms = r.precision() - 1;
    let curve = SexticCurve::new(a.try_into().expect("six coefficients"))?;
    Ok(Derivation { curve, verified_terms, extra_verified: (data.precision - MIN_EQUATION_PRECISION).max(0) })
}

pub fn derive_equation(data: &ModularDataset) -> Result<SexticCurve, DatasetError> {
    derive_equation_checked(data).map(|d| d.curve)
}

/// The integer `t` with `derived(x) = expected(x + t)`, if any.
pub fn integer_translation(derived: &SexticCurve, expected: &SexticCurve) -> Option<Rational> {
    let t = (derived.a(5) - expected.a(5)) / rat(6);
    if t.is_zero() || !t.is_integer() {
        return None;
    }
    (expected.translate(&t) == *derived).then_some(t)
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub level: u64,
    pub expected: SexticCurve,
    pub derived: Option<SexticCurve>,
    pub matches: [bool; 6],
    pub verified_terms: i64,
    pub extra_verified: i64,
    pub low_margin: bool,
    /// Set when the derived model is the expected one shifted by `x -> x + t`.
    pub translation: Option<Rational>,
    pub error: Option<String>,
}

impl ValidationReport {
    pub fn exact_match(&self) -> bool {
        self.matches.iter().all(|&m| m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let co = |c: &SexticCurve| c.coeffs().iter().map(|a| a.to_string()).collect::<Vec<_>>();
        json!({
            "level": self.level.to_string(),
            "expected": co(&self.expected),
            "derived": self.derived.as_ref().map(co),
            "matches": self.matches,
            "exact_match": self.exact_match(),
            "verified_terms": self.verified_terms.to_string(),
            "extra_verified": self.extra_verified.to_string(),
            "low_margin": self.low_margin,
            "translation": self.translation.as_ref().map(|t| t.to_string()),
            "error": self.error,
        })
    }
}

pub fn validate_dataset(data: &ModularDataset, expected: &SexticCurve) -> ValidationReport {
    let mut rep = ValidationReport {
        level: data.level,
        expected: expected.clone(),
        derived: None,
        matches: [false; 6],
        verified_terms: 0,
        extra_verified: 0,
        low_margin: true,
        translation: None,
        error: None,
    };
    match derive_equation_checked(data) {
        Ok(d) => {
            for i in 0..6 {
                rep.matches[i] = d.curve.a(i) == expected.a(i);
            }
            rep.verified_terms = d.verified_terms;
            rep.extra_verified = d.extra_verified;
            rep.low_margin = d.low_margin();
            rep.translation = integer_translation(&d.curve, expected);
            rep.derived = Some(d.curve);
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    rep
}

/// `a0..a5` of a curve as integers, if integral.
pub fn integer_coefficients(c: &SexticCurve) -> Option<[BigInt; 6]> {
    if !c.is_integral() {
        return None;
    }
    Some(std::array::from_fn(|i| c.a(i).to_integer()))
}
