//! Datasets and fixtures compiled into the library.

use crate::modular::ModularDataset;

macro_rules! datasets {
    ($($n:literal),* $(,)?) => {
        /// Levels with a bundled q-expansion dataset.
        pub const BUNDLED_LEVELS: &[u64] = &[$($n),*];

        fn dataset_text(level: u64) -> Option<&'static str> {
            match level {
                $($n => Some(include_str!(concat!("../data/datasets/", stringify!($n), ".json"))),)*
                _ => None,
            }
        }
    };
}

datasets!(
    67, 73, 85, 93, 103, 106, 107, 115, 122, 129, 133, 134, 146, 154, 158, 161, 165, 167, 170, 177, 186, 191, 205, 206,
    209, 213, 215, 221, 230, 266, 285, 286, 287, 299, 357, 390
);

pub fn bundled_dataset(level: u64) -> Option<ModularDataset> {
    dataset_text(level).map(|t| ModularDataset::from_json(t).expect("bundled dataset is valid"))
}

use std::sync::OnceLock;

use serde::Deserialize;

use crate::arith::{parse_rational, Rational};
use crate::hyperelliptic::{CurvePoint, SexticCurve};

/// One row of the equations table: the sextic and its known rational points.
#[derive(Clone, Debug, Deserialize)]
pub struct EquationRow {
    pub level: u64,
    /// The equation as printed, possibly in factored form.
    pub equation: String,
    /// `a0..a5` as decimal strings.
    pub a: Vec<String>,
    pub points: Vec<(String, String)>,
    pub points_complete: bool,
    #[serde(default)]
    pub anomalies: Vec<serde_json::Value>,
}

impl EquationRow {
    pub fn curve(&self) -> SexticCurve {
        let a: Vec<Rational> = self.a.iter().map(|s| parse_rational(s).expect("fixture integer")).collect();
        SexticCurve::new(a.try_into().expect("six coefficients")).expect("fixture curve")
    }

    pub fn affine_points(&self) -> Vec<CurvePoint> {
        self.points
            .iter()
            .map(|(x, y)| CurvePoint::affine(parse_rational(x).unwrap(), parse_rational(y).unwrap()))
            .collect()
    }

    /// Whether a printed point carries the given anomaly kind.
    pub fn has_anomaly(&self, kind: &str) -> bool {
        self.anomalies.iter().any(|a| a["kind"] == kind)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ResultEntry {
    pub j_tex: String,
    /// Printed discriminant, when the row claims CM.
    pub d: Option<String>,
    /// Decimal j when printed as a rational integer.
    pub j: Option<String>,
    /// Radicands of a printed multiquadratic field.
    #[serde(default)]
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ResultRow {
    pub level: u64,
    pub point: String,
    pub cm: bool,
    pub entries: Vec<ResultEntry>,
    #[serde(default)]
    pub anomalies: Vec<String>,
    /// The matching point on the equation-table model, when the row uses another model.
    #[serde(default)]
    pub equation_table_point: Option<String>,
}

impl ResultRow {
    pub fn curve_point(&self) -> CurvePoint {
        self.point.parse().expect("fixture point")
    }

    pub fn discriminants(&self) -> Vec<i64> {
        self.entries.iter().filter_map(|e| e.d.as_ref()).map(|d| d.parse().unwrap()).collect()
    }

    pub fn is_anomalous(&self) -> bool {
        !self.anomalies.is_empty()
    }
}

#[derive(Deserialize)]
struct EquationFile {
    meta: serde_json::Value,
    levels: Vec<EquationRow>,
}

#[derive(Deserialize)]
struct ResultFile {
    meta: serde_json::Value,
    rows: Vec<ResultRow>,
}

pub const EQUATIONS_JSON: &str = include_str!("../data/fixtures/equations.json");
pub const RESULTS_JSON: &str = include_str!("../data/fixtures/results.json");

fn equations_file() -> &'static EquationFile {
    static F: OnceLock<EquationFile> = OnceLock::new();
    F.get_or_init(|| serde_json::from_str(EQUATIONS_JSON).expect("equation fixture"))
}

fn results_file() -> &'static ResultFile {
    static F: OnceLock<ResultFile> = OnceLock::new();
    F.get_or_init(|| serde_json::from_str(RESULTS_JSON).expect("results fixture"))
}

pub fn equation_rows() -> &'static [EquationRow] {
    &equations_file().levels
}

pub fn equation_row(level: u64) -> Option<&'static EquationRow> {
    equation_rows().iter().find(|r| r.level == level)
}

pub fn equations_meta() -> &'static serde_json::Value {
    &equations_file().meta
}

pub fn result_rows() -> &'static [ResultRow] {
    &results_file().rows
}

pub fn result_rows_for(level: u64) -> impl Iterator<Item = &'static ResultRow> {
    result_rows().iter().filter(move |r| r.level == level)
}

pub fn results_meta() -> &'static serde_json::Value {
    &results_file().meta
}
