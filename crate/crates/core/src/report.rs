//! Per-point analysis: the j-polynomial, its factorization over Q, the
//! field generated by each factor's roots and CM recognition.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algnum::factor::linear_root;
use crate::algnum::{
    factor_rational, identify_multiquadratic, quadratic_surd_roots, IntPolynomial, MultiQuadElement, QuadraticSurd,
};
use crate::arith::Rational;
use crate::cm::identify_cm;
use crate::hyperelliptic::CurvePoint;
use crate::jpipeline::{j_polynomial_at_point, FExpression, LevelContext, PipelineError};
use crate::poly::QPoly;

/// What is known about the field generated by one root of a factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldDescriptor {
    Rational(Rational),
    Surd(QuadraticSurd, QuadraticSurd),
    Multiquadratic(MultiQuadElement),
    /// Not recognized; the minimal polynomial is all there is.
    Opaque,
}

impl FieldDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            FieldDescriptor::Rational(_) => "rational",
            FieldDescriptor::Surd(..) => "surd",
            FieldDescriptor::Multiquadratic(_) => "multiquadratic",
            FieldDescriptor::Opaque => "opaque",
        }
    }

    /// Radicands of the field, empty for rationals and opaque fields.
    pub fn generators(&self) -> Vec<BigInt> {
        match self {
            FieldDescriptor::Surd(s, _) => vec![s.d.clone()],
            FieldDescriptor::Multiquadratic(e) => e.generators().to_vec(),
            _ => Vec::new(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FieldDescriptor::Rational(r) => r.to_string(),
            FieldDescriptor::Surd(s, t) => format!("{s}, {t}"),
            FieldDescriptor::Multiquadratic(e) => e.field_string(),
            FieldDescriptor::Opaque => "unidentified".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorReport {
    pub poly: IntPolynomial,
    pub multiplicity: u32,
    pub field: FieldDescriptor,
    pub cm: Option<i64>,
}

impl FactorReport {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "degree": self.degree().to_string(),
            "multiplicity": self.multiplicity.to_string(),
            "polynomial": self.poly.display_var("z"),
            "coefficients": self.poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "field": self.field.kind(),
            "cm_discriminant": self.cm.map(|d| d.to_string()),
        });
        match &self.field {
            FieldDescriptor::Rational(r) => v["j"] = json!(r.to_string()),
            FieldDescriptor::Surd(s, t) => {
                v["j"] = json!([s.to_string(), t.to_string()]);
                v["generators"] = json!([s.d.to_string()]);
            }
            FieldDescriptor::Multiquadratic(e) => {
                v["generators"] = json!(e.generators().iter().map(|d| d.to_string()).collect::<Vec<_>>());
                v["field_name"] = json!(e.field_string());
                v["primitive_element"] = json!(e.to_string());
            }
            FieldDescriptor::Opaque => {}
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct PointReport {
    pub level: u64,
    pub point: CurvePoint,
    pub j_polynomial: QPoly,
    pub factors: Vec<FactorReport>,
}

impl PointReport {
    /// Product of the factors with multiplicity, made monic.
    pub fn factor_product(&self) -> QPoly {
        let mut acc = QPoly::constant(Rational::one());
        for f in &self.factors {
            for _ in 0..f.multiplicity {
                acc = acc.mul(&f.poly.to_qpoly());
            }
        }
        acc.monic()
    }

    /// CM discriminants of the factors, in factor order.
    pub fn cm_discriminants(&self) -> Vec<i64> {
        self.factors.iter().filter_map(|f| f.cm).collect()
    }

    /// All rational roots of the j-polynomial.
    pub fn rational_j(&self) -> Vec<Rational> {
        self.factors
            .iter()
            .filter_map(|f| match &f.field {
                FieldDescriptor::Rational(r) => Some(r.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level.to_string(),
            "point": self.point.to_string(),
            "j_polynomial": self.j_polynomial.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "factors": self.factors.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Field and CM data for one irreducible factor.
pub fn analyze_factor(f: &IntPolynomial, multiplicity: u32) -> FactorReport {
    let field = match f.degree() {
        1 => FieldDescriptor::Rational(linear_root(f).expect("degree one")),
        2 => match quadratic_surd_roots(f) {
            Ok((s, t)) => FieldDescriptor::Surd(s, t),
            Err(_) => FieldDescriptor::Opaque,
        },
        4 | 8 | 16 => {
            identify_multiquadratic(f).map(FieldDescriptor::Multiquadratic).unwrap_or(FieldDescriptor::Opaque)
        }
        _ => FieldDescriptor::Opaque,
    };
    let cm = if f.is_monic() { identify_cm(f) } else { None };
    FactorReport { poly: f.clone(), multiplicity, field, cm }
}

/// Factor an arbitrary rational j-polynomial and analyze each factor.
pub fn analyze_polynomial(level: u64, point: CurvePoint, j_polynomial: QPoly) -> PointReport {
    let int = IntPolynomial::from_qpoly(&j_polynomial);
    let factors = if int.degree() == 0 || j_polynomial.is_zero() {
        Vec::new()
    } else {
        factor_rational(&int).iter().map(|(f, e)| analyze_factor(f, *e)).collect()
    };
    PointReport { level, point, j_polynomial, factors }
}

pub fn analyze_point(ctx: &LevelContext, exprs: &[FExpression], p: &CurvePoint) -> Result<PointReport, PipelineError> {
    let jp = j_polynomial_at_point(&ctx.gens, exprs, p)?;
    Ok(analyze_polynomial(ctx.level, p.clone(), jp))
}

/// `x - j` for an integral `j`.
pub fn linear_for(j: &BigInt) -> IntPolynomial {
    IntPolynomial::linear(j)
}

/// Whether a factor of `r` has `j` as a root.
pub fn has_root(r: &PointReport, j: &Rational) -> bool {
    r.j_polynomial.eval(j).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn double_root_at_minus_32_cubed() {
        let p = QPoly::new(vec![rat(1073741824), rat(65536), rat(1)]);
        let r = analyze_polynomial(67, CurvePoint::InfinityMinus, p.clone());
        assert_eq!(r.factors.len(), 1);
        assert_eq!(r.factors[0].multiplicity, 2);
        assert_eq!(r.factors[0].field, FieldDescriptor::Rational(rat(-32768)));
        assert_eq!(r.factors[0].cm, Some(-11));
        assert_eq!(r.factor_product(), p);
    }
}
