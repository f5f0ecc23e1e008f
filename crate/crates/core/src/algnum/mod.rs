//! Factorization over the rationals and identification of the fields
//! generated by roots: rationals, quadratic surds, multiquadratic fields.

pub mod bigfloat;
pub mod factor;
pub mod intfactor;
pub mod intpoly;
pub mod modp;
pub mod multiquad;
pub mod surd;

use thiserror::Error;

pub use factor::{discriminant, factor_rational, rational_roots, resultant};
pub use intfactor::squarefree_part;
pub use intpoly::IntPolynomial;
pub use multiquad::{field_string, identify_multiquadratic, MultiQuadElement};
pub use surd::{quadratic_surd_roots, quartic_subfields, v4_quartic_subfields, QuadraticSurd};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("expected degree {expected}, got {got}")]
    Degree { expected: usize, got: usize },
    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(String),
    #[error("could not factor {0}")]
    Factorization(String),
}
