//! Symmetric functions of `j(d z)` for `d | N`, their exact expansion in the
//! `f3, f4, f5` monomial basis, and the j-polynomial at a point.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::arith::{parse_rational, Rational};
use crate::hyperelliptic::{
    evaluate_f, monomial_for_order, rr_generators, CurveError, CurvePoint, FFunction, FGenerators, Gen, Monomial,
    SexticCurve,
};
use crate::modular::{coordinate_series, derive_equation, DatasetError, ModularDataset};
use crate::poly::QPoly;
use crate::series::{j_expansion, LaurentSeries};

/// Positive exponents that must be checked after a reduction.
pub const MIN_VERIFIED_TAIL: i64 = 8;
/// Margin above `sigma` required of the dataset precision.
pub const PRECISION_MARGIN: i64 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("precision {available} is below the required {required}")]
    InsufficientPrecision { required: i64, available: i64 },
    #[error("{0} does not start with leading term 1/q^n; curve and dataset do not match")]
    LeadingTerm(&'static str),
    #[error("y^2 - f(x) is nonzero at q^{0}; curve and dataset do not match")]
    CurveMismatch(i64),
    #[error("residual has a pole of order {0}, which no function in the basis has")]
    GapPole(i64),
    #[error("residual is nonzero at q^{exponent}")]
    NonzeroTail { exponent: i64 },
    #[error("monomial cache holds pole orders up to {have}, need {need}")]
    CacheTooSmall { have: i64, need: i64 },
    #[error("the j-polynomial is undefined at the cusp")]
    Cusp,
    #[error("J index {0} is out of range")]
    Index(usize),
    #[error("malformed expression: {0}")]
    Malformed(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// q-expansions of the three generators.
#[derive(Clone, Debug)]
pub struct FSeries {
    pub f3: LaurentSeries,
    pub f4: LaurentSeries,
    pub f5: LaurentSeries,
}

fn substitute(f: &FFunction, x: &LaurentSeries, y: &LaurentSeries) -> LaurentSeries {
    let deg = f.poly.degree().unwrap_or(0).max(f.y_power);
    let mut xp = vec![LaurentSeries::constant(Rational::one(), x.precision() + 16)];
    for i in 1..=deg {
        let next = xp[i - 1].mul(x);
        xp.push(next);
    }
    let mut acc = xp[f.y_power].mul(y).scale(&f.y_coeff);
    for (i, c) in f.poly.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&xp[i].scale(c));
        }
    }
    acc
}

/// Substitute the `x, y` series of `dataset` into the generators of `curve`.
pub fn f_series(curve: &SexticCurve, dataset: &ModularDataset) -> Result<FSeries, PipelineError> {
    let (x, y) = coordinate_series(dataset)?;
    let mut fx = LaurentSeries::zero(x.precision() + 16);
    for c in curve.f_poly().coeffs().iter().rev() {
        fx = fx.mul(&x).add(&LaurentSeries::constant(c.clone(), x.precision() + 16));
    }
    let r = y.square().sub(&fx);
    if !r.is_zero() {
        return Err(PipelineError::CurveMismatch(r.valuation()));
    }
    let g = rr_generators(curve);
    let f3 = substitute(&g.f3, &x, &y);
    let f4 = substitute(&g.f4, &x, &y);
    let f5 = substitute(&g.f5, &x, &y);
    for (name, s, n) in [("f3", &f3, 3), ("f4", &f4, 4), ("f5", &f5, 5)] {
        if s.is_zero() || s.valuation() != -n || !s.leading_coefficient().unwrap().is_one() {
            return Err(PipelineError::LeadingTerm(name));
        }
    }
    Ok(FSeries { f3, f4, f5 })
}

/// Series of every monomial up to some pole order.
pub struct MonomialCache {
    max_order: i64,
    f3_pows: Vec<LaurentSeries>,
    f4_times: Vec<LaurentSeries>,
    f5_times: Vec<LaurentSeries>,
}

impl MonomialCache {
    pub fn build(fs: &FSeries, max_order: i64) -> Self {
        let mut c = MonomialCache {
            max_order: 0,
            f3_pows: vec![LaurentSeries::constant(Rational::one(), fs.f3.precision() + 3)],
            f4_times: Vec::new(),
            f5_times: Vec::new(),
        };
        c.extend(fs, max_order);
        c
    }

    /// Grow the cache to cover pole orders up to `max_order`.
    pub fn extend(&mut self, fs: &FSeries, max_order: i64) {
        if max_order <= self.max_order {
            return;
        }
        let k3 = (max_order / 3) as usize;
        while self.f3_pows.len() <= k3 {
            let next = self.f3_pows.last().unwrap().mul(&fs.f3);
            self.f3_pows.push(next);
        }
        let count = |base: i64| {
            if max_order < base {
                0
            } else {
                ((max_order - base) / 3 + 1) as usize
            }
        };
        let (n4, n5) = (count(4), count(5));
        let old4 = self.f4_times.len();
        let old5 = self.f5_times.len();
        let pows = &self.f3_pows;
        let new4: Vec<LaurentSeries> = (old4..n4).into_par_iter().map(|k| fs.f4.mul(&pows[k])).collect();
        let new5: Vec<LaurentSeries> = (old5..n5).into_par_iter().map(|k| fs.f5.mul(&pows[k])).collect();
        self.f4_times.extend(new4);
        self.f5_times.extend(new5);
        self.max_order = max_order;
    }

    pub fn max_order(&self) -> i64 {
        self.max_order
    }

    pub fn get(&self, m: Monomial) -> Result<&LaurentSeries, PipelineError> {
        let k = m.k as usize;
        let s = match m.gen {
            Gen::F3 if k >= 1 => self.f3_pows.get(k),
            Gen::F3 => None,
            Gen::F4 => self.f4_times.get(k),
            Gen::F5 => self.f5_times.get(k),
        };
        s.ok_or(PipelineError::CacheTooSmall { have: self.max_order, need: m.pole_order() })
    }
}

/// `constant + sum coeff * monomial`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FExpression {
    pub constant: Rational,
    pub terms: BTreeMap<Monomial, Rational>,
}

impl FExpression {
    pub fn coefficient(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn pole_order(&self) -> i64 {
        self.terms.keys().next_back().map_or(0, |m| m.pole_order())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| json!({"k": m.k, "gen": m.gen.name(), "coeff": c.to_string()}))
            .collect();
        json!({"constant": self.constant.to_string(), "terms": terms})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, PipelineError> {
        let bad = |m: &str| PipelineError::Malformed(m.to_string());
        let rat = |v: &serde_json::Value| -> Result<Rational, PipelineError> {
            let s = v.as_str().ok_or_else(|| bad("coefficients must be strings"))?;
            parse_rational(s).map_err(|e| bad(&e.to_string()))
        };
        let constant = rat(v.get("constant").ok_or_else(|| bad("missing constant"))?)?;
        let mut terms = BTreeMap::new();
        let list = v.get("terms").and_then(|t| t.as_array()).ok_or_else(|| bad("missing terms"))?;
        for t in list {
            let k = t.get("k").and_then(|k| k.as_u64()).ok_or_else(|| bad("bad k"))?;
            let gen = t.get("gen").and_then(|g| g.as_str()).and_then(Gen::from_name).ok_or_else(|| bad("bad gen"))?;
            let c = rat(t.get("coeff").ok_or_else(|| bad("missing coeff"))?)?;
            let m = Monomial { gen, k: k as u32 };
            if m.pole_order() < 3 || c.is_zero() || terms.insert(m, c).is_some() {
                return Err(bad("invalid or repeated term"));
            }
        }
        Ok(FExpression { constant, terms })
    }
}

impl fmt::Display for FExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            if a.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", a, m)?;
            }
        }
        if !self.constant.is_zero() || first {
            let neg = self.constant.is_negative();
            if first {
                write!(f, "{}", self.constant)?;
            } else {
                write!(f, " {} {}", if neg { '-' } else { '+' }, self.constant.abs())?;
            }
        }
        Ok(())
    }
}

/// Greedy elimination of the pole at `q = 0`, then check the tail is constant.
pub fn express_in_basis(f: &LaurentSeries, cache: &MonomialCache) -> Result<FExpression, PipelineError> {
    let mut r = f.clone();
    let mut terms = BTreeMap::new();
    while !r.is_zero() && r.valuation() < 0 {
        let n = -r.valuation();
        if n < 3 {
            return Err(PipelineError::GapPole(n));
        }
        let m = monomial_for_order(n)?;
        let c = r.leading_coefficient().expect("nonzero");
        r = r.sub(&cache.get(m)?.scale(&c));
        terms.insert(m, c);
    }
    let verified = r.precision() - 1;
    if verified < MIN_VERIFIED_TAIL {
        return Err(PipelineError::InsufficientPrecision { required: MIN_VERIFIED_TAIL + 1, available: r.precision() });
    }
    let constant = r.coefficient(0).expect("within precision");
    let tail = r.sub(&LaurentSeries::constant(constant.clone(), r.precision()));
    if !tail.is_zero() {
        return Err(PipelineError::NonzeroTail { exponent: tail.valuation() });
    }
    Ok(FExpression { constant, terms })
}

/// Substitute series back into an expression.
pub fn reconstruct(e: &FExpression, cache: &MonomialCache) -> Result<LaurentSeries, PipelineError> {
    let prec = cache.f3_pows[0].precision();
    let mut acc = LaurentSeries::constant(e.constant.clone(), prec);
    for (m, c) in &e.terms {
        acc = acc.add(&cache.get(*m)?.scale(c));
    }
    Ok(acc)
}

pub fn evaluate_expression(e: &FExpression, fvals: &(Rational, Rational, Rational)) -> Rational {
    let mut acc = e.constant.clone();
    let mut pow = vec![Rational::one()];
    for (m, c) in &e.terms {
        while pow.len() <= m.k as usize {
            let next = pow.last().unwrap() * &fvals.0;
            pow.push(next);
        }
        let p = &pow[m.k as usize];
        let v = match m.gen {
            Gen::F3 => p.clone(),
            Gen::F4 => p * &fvals.1,
            Gen::F5 => p * &fvals.2,
        };
        acc += c * v;
    }
    acc
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut d: Vec<u64> = (1..=n).take_while(|i| i * i <= n).filter(|i| n % i == 0).collect();
    let big: Vec<u64> = d.iter().rev().map(|i| n / i).filter(|&j| j * j != n).collect();
    d.extend(big);
    d
}

pub struct LevelContext {
    pub level: u64,
    pub divisors: Vec<u64>,
    pub m: usize,
    pub sigma: i64,
    pub curve: SexticCurve,
    pub gens: FGenerators,
    pub dataset: ModularDataset,
    pub f_series: FSeries,
}

impl LevelContext {
    /// Derives the curve from the dataset when none is given.
    pub fn new(dataset: ModularDataset, curve: Option<SexticCurve>) -> Result<Self, PipelineError> {
        let curve = match curve {
            Some(c) => c,
            None => derive_equation(&dataset)?,
        };
        let fs = f_series(&curve, &dataset)?;
        let level = dataset.level();
        let divisors = divisors(level);
        Ok(LevelContext {
            level,
            m: divisors.len(),
            sigma: divisors.iter().sum::<u64>() as i64,
            divisors,
            gens: rr_generators(&curve),
            curve,
            dataset,
            f_series: fs,
        })
    }

    pub fn required_precision(&self) -> i64 {
        self.sigma + PRECISION_MARGIN
    }

    fn check_precision(&self) -> Result<(), PipelineError> {
        let p = self.dataset.precision();
        if p < self.required_precision() {
            return Err(PipelineError::InsufficientPrecision { required: self.required_precision(), available: p });
        }
        Ok(())
    }

    /// `J_1..J_m`, each known below the dataset precision.
    pub fn symmetric_j_series(&self) -> Result<Vec<LaurentSeries>, PipelineError> {
        self.check_precision()?;
        let p = self.dataset.precision();
        let target = p + self.sigma;
        let j = j_expansion(target);
        let mut e: Vec<LaurentSeries> = vec![LaurentSeries::constant(Rational::one(), target)];
        for &d in &self.divisors {
            let jd = j.rescale_exponent(d as u32).truncate(target);
            let mut next = e.clone();
            next.push(LaurentSeries::zero(target));
            let upd: Vec<LaurentSeries> =
                (1..next.len()).into_par_iter().map(|i| next[i].add(&jd.mul(&e[i - 1])).truncate(target)).collect();
            for (i, s) in upd.into_iter().enumerate() {
                next[i + 1] = s;
            }
            e = next;
        }
        Ok(e.into_iter().skip(1).map(|s| s.truncate(p)).collect())
    }

    pub fn symmetric_j_series_at(&self, i: usize) -> Result<LaurentSeries, PipelineError> {
        if i == 0 || i > self.m {
            return Err(PipelineError::Index(i));
        }
        Ok(self.symmetric_j_series()?.swap_remove(i - 1))
    }

    pub fn monomial_cache(&self, max_order: i64) -> MonomialCache {
        MonomialCache::build(&self.f_series, max_order)
    }

    /// Expressions for `J_1..J_m`.
    pub fn express_all(&self) -> Result<Vec<FExpression>, PipelineError> {
        let js = self.symmetric_j_series()?;
        let cache = self.monomial_cache(self.sigma);
        js.par_iter().map(|j| express_in_basis(j, &cache)).collect()
    }
}

/// `z^m + sum (-1)^i J_i(p) z^(m-i)`.
pub fn j_polynomial_at_point(
    gens: &FGenerators,
    exprs: &[FExpression],
    p: &CurvePoint,
) -> Result<QPoly, PipelineError> {
    if *p == CurvePoint::InfinityPlus {
        return Err(PipelineError::Cusp);
    }
    let fv = evaluate_f(gens, p)?;
    let m = exprs.len();
    let mut c = vec![Rational::zero(); m + 1];
    c[m] = Rational::one();
    for (i, e) in exprs.iter().enumerate() {
        let i = i + 1;
        let v = evaluate_expression(e, &fv);
        c[m - i] = if i % 2 == 0 { v } else { -v };
    }
    Ok(QPoly::new(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::data::bundled_dataset;
    use std::sync::OnceLock;

    fn ctx67() -> &'static (LevelContext, Vec<FExpression>) {
        static C: OnceLock<(LevelContext, Vec<FExpression>)> = OnceLock::new();
        C.get_or_init(|| {
            let ctx = LevelContext::new(bundled_dataset(67).unwrap(), None).unwrap();
            let e = ctx.express_all().unwrap();
            (ctx, e)
        })
    }

    fn mono(gen: Gen, k: u32) -> Monomial {
        Monomial { gen, k }
    }

    #[test]
    fn f_series_leading_terms() {
        let (ctx, _) = ctx67();
        let fs = &ctx.f_series;
        assert_eq!(fs.f3.valuation(), -3);
        // f4 = x f3 + 1
        let (x, _) = coordinate_series(&ctx.dataset).unwrap();
        let rhs = x.mul(&fs.f3).add(&LaurentSeries::constant(rat(1), 1000));
        let p = rhs.precision().min(fs.f4.precision());
        assert!(fs.f4.truncate(p).sub(&rhs.truncate(p)).is_zero());
    }

    #[test]
    fn mismatched_curve_rejected() {
        let c73 = SexticCurve::from_ints([1, -2, 7, -8, 6, -2]).unwrap();
        assert!(matches!(
            LevelContext::new(bundled_dataset(67).unwrap(), Some(c73)),
            Err(PipelineError::CurveMismatch(_))
        ));
    }

    #[test]
    fn symmetric_series_level_67() {
        let (ctx, _) = ctx67();
        let js = ctx.symmetric_j_series().unwrap();
        assert_eq!(js.len(), 2);
        assert_eq!(js[0].valuation(), -67);
        assert_eq!(js[0].leading_coefficient().unwrap(), rat(1));
        assert_eq!(js[0].coefficient(0).unwrap(), rat(1488));
        assert_eq!(js[0].coefficient(-1).unwrap(), rat(1));
        assert_eq!(js[1].valuation(), -68);
        assert_eq!(ctx.sigma, 68);
    }

    #[test]
    fn short_dataset_rejected() {
        let d = bundled_dataset(67).unwrap().truncated(79).unwrap();
        let ctx = LevelContext::new(d, None).unwrap();
        assert_eq!(
            ctx.symmetric_j_series().unwrap_err(),
            PipelineError::InsufficientPrecision { required: 80, available: 79 }
        );
    }

    #[test]
    fn level_67_coefficients() {
        let (_, e) = ctx67();
        assert_eq!(e[0].coefficient(mono(Gen::F3, 22)), rat(-23));
        assert_eq!(e[0].coefficient(mono(Gen::F4, 21)), rat(1));
        assert_eq!(e[0].constant, rat(-65536));
        assert_eq!(e[1].coefficient(mono(Gen::F5, 21)), rat(1));
        assert_eq!(e[1].coefficient(mono(Gen::F4, 21)), rat(720));
        assert_eq!(e[1].coefficient(mono(Gen::F3, 22)), rat(179980));
        assert_eq!(e[1].constant, rat(1073741824));
    }

    #[test]
    fn reconstruction_invariant() {
        let (ctx, e) = ctx67();
        let js = ctx.symmetric_j_series().unwrap();
        let cache = ctx.monomial_cache(ctx.sigma);
        for (j, ex) in js.iter().zip(e) {
            let r = reconstruct(ex, &cache).unwrap();
            let p = r.precision().min(j.precision());
            assert!(p > 8);
            assert!(r.truncate(p).sub(&j.truncate(p)).is_zero());
        }
    }

    #[test]
    fn basis_roundtrip() {
        let (ctx, _) = ctx67();
        let cache = ctx.monomial_cache(10);
        let f = ctx.f_series.f4.add(&LaurentSeries::constant(rat(5), 1000));
        let e = express_in_basis(&f, &cache).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.coefficient(mono(Gen::F4, 0)), rat(1));
        assert_eq!(e.constant, rat(5));
        let bad = LaurentSeries::monomial(-2, rat(1), 50);
        assert_eq!(express_in_basis(&bad, &cache), Err(PipelineError::GapPole(2)));
    }

    #[test]
    fn evaluations_level_67() {
        let (ctx, e) = ctx67();
        let z = (rat(0), rat(0), rat(0));
        assert_eq!(evaluate_expression(&e[0], &z), rat(-65536));
        assert_eq!(evaluate_expression(&e[1], &z), rat(1073741824));
        assert_eq!(evaluate_expression(&e[0], &(rat(0), rat(1), rat(0))), rat(16000));
        let p = j_polynomial_at_point(&ctx.gens, e, &CurvePoint::InfinityMinus).unwrap();
        let want = QPoly::new(vec![rat(32768), rat(1)]);
        assert_eq!(p, want.mul(&want));
        let p = j_polynomial_at_point(&ctx.gens, e, &CurvePoint::affine(rat(1), rat(1))).unwrap();
        let want = QPoly::new(vec![rat(-8000), rat(1)]);
        assert_eq!(p, want.mul(&want));
        let p = j_polynomial_at_point(&ctx.gens, e, &CurvePoint::affine(rat(-1), rat(7))).unwrap();
        assert!(p.eval(&rat(16581375)).is_zero());
        assert_eq!(j_polynomial_at_point(&ctx.gens, e, &CurvePoint::InfinityPlus), Err(PipelineError::Cusp));
    }

    #[test]
    fn expression_json_roundtrip() {
        let (_, e) = ctx67();
        for ex in e {
            let v = ex.to_json();
            assert_eq!(&FExpression::from_json(&v).unwrap(), ex);
        }
        let s = e[0].to_string();
        assert!(s.starts_with("f4*f3^21 - 23*f3^22 + 186*f5*f3^20"), "{s}");
        assert!(s.ends_with("- 65536"), "{s}");
    }

    /// Newton identities from power sums, an independent route to the
    /// elementary symmetric functions.
    #[test]
    fn vieta_consistency_low_precision() {
        let d = bundled_dataset(67).unwrap();
        let ctx = LevelContext::new(d, None).unwrap();
        let js = ctx.symmetric_j_series().unwrap();
        let prec = 20;
        let target = prec + ctx.sigma;
        let j = j_expansion(target);
        let jd: Vec<LaurentSeries> =
            ctx.divisors.iter().map(|&d| j.rescale_exponent(d as u32).truncate(target)).collect();
        let p1 = jd[0].add(&jd[1]);
        let p2 = jd[0].square().add(&jd[1].square());
        let e1 = p1.clone();
        let e2 = e1.mul(&p1).sub(&p2).scale(&crate::arith::rat_frac(1, 2));
        for (got, want) in [(&js[0], e1), (&js[1], e2)] {
            let p = prec.min(want.precision());
            assert!(got.truncate(p).sub(&want.truncate(p)).is_zero());
        }
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(67), vec![1, 67]);
        assert_eq!(divisors(390).len(), 16);
        assert_eq!(divisors(390).iter().sum::<u64>(), 1008);
    }
}
