//! Command-line frontend. `run` returns the exit code so the commands can be
//! driven from tests without spawning a process.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algnum::IntPolynomial;
use crate::arith::{parse_rational, Rational};
use crate::cm::{class_polynomial, identify_cm, CmError};
use crate::data::{bundled_dataset, equation_row, equation_rows, BUNDLED_LEVELS};
use crate::hyperelliptic::{search_points, CurvePoint, SexticCurve};
use crate::jpipeline::{FExpression, LevelContext, PipelineError};
use crate::modular::{derive_equation_checked, validate_dataset, DatasetError, ModularDataset};
use crate::report::{analyze_point, PointReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Largest `sigma(N)` run without `--allow-large`.
pub const SIGMA_BUDGET: i64 = 600;
pub const MAX_MINPOLY_DEGREE: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Malformed(_) | DatasetError::Format(_) => CliError::Input(e.to_string()),
            DatasetError::InsufficientPrecision { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Mismatch(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Dataset(d) => d.into(),
            PipelineError::InsufficientPrecision { .. } | PipelineError::CacheTooSmall { .. } => {
                CliError::Budget(e.to_string())
            }
            PipelineError::Cusp | PipelineError::Malformed(_) | PipelineError::Index(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Mismatch(e.to_string()),
        }
    }
}

impl From<CmError> for CliError {
    fn from(e: CmError) -> Self {
        match e {
            CmError::InvalidDiscriminant(_) => CliError::Input(e.to_string()),
            _ => CliError::Budget(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qstar", version, about = "Q-curves from rational points on genus-two quotients X0*(N)")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Derive the sextic model from a q-expansion dataset.
    DeriveEquation {
        dataset: PathBuf,
        /// Compare with the bundled equation table; exit 2 on mismatch.
        #[arg(long)]
        check_table: bool,
    },
    /// Dump the expressions of J_1..J_m in the generators f3, f4, f5.
    ExpressJ {
        dataset: PathBuf,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        allow_large: bool,
    },
    /// j-polynomials, their factorization, fields and CM discriminants at points.
    Pipeline {
        dataset: PathBuf,
        #[arg(long, default_value_t = 100)]
        height: u64,
        /// "x,y" or "inf-"; repeatable. Without it the height search is used.
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        allow_large: bool,
    },
    /// Rational points of bounded height.
    SearchPoints {
        #[arg(long, conflicts_with = "equation", required_unless_present = "equation")]
        level: Option<u64>,
        /// Coefficients a0..a5 of y^2 = x^6 + a5 x^5 + ... + a0, comma or space separated.
        #[arg(long, allow_hyphen_values = true)]
        equation: Option<String>,
        #[arg(long, default_value_t = 100)]
        height: u64,
        #[arg(long)]
        json: bool,
    },
    /// CM discriminant of a monic integer polynomial.
    IdentifyCm {
        /// Coefficients from the leading one down: "1 -54000" is z - 54000.
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
    },
    /// Derive every bundled dataset and compare with the equation table.
    ValidateAll,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse arguments and run; never exits the process.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    // buffered so the work can move onto the pool's threads
    let mut buf: Vec<u8> = Vec::new();
    let res = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &mut buf)),
            Err(e) => Err(CliError::Input(e.to_string())),
        },
        None => dispatch(&cli.command, &mut buf),
    };
    let _ = stdout.write_all(&buf);
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::DeriveEquation { dataset, check_table } => derive(dataset, *check_table, stdout),
        Command::ExpressJ { dataset, out, allow_large } => {
            let ctx = context(dataset, *allow_large)?;
            let exprs = ctx.express_all()?;
            let v = json!({
                "level": ctx.level.to_string(),
                "divisors": ctx.divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "expressions": exprs.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
            });
            emit(&v, out, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Pipeline { dataset, height, points, out, allow_large } => {
            let ctx = context(dataset, *allow_large)?;
            let pts = pipeline_points(&ctx.curve, *height, points)?;
            let t0 = Instant::now();
            let exprs = ctx.express_all()?;
            let express_ms = t0.elapsed().as_millis();
            let (reports, times) = run_points(&ctx, &exprs, &pts)?;
            let v = json!({
                "data": {
                    "level": ctx.level.to_string(),
                    "equation": ctx.curve.to_string(),
                    "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                },
                "timing": {
                    "express_ms": express_ms.to_string(),
                    "points_ms": times.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                },
            });
            emit(&v, out, stdout)?;
            Ok(EXIT_OK)
        }
        Command::SearchPoints { level, equation, height, json } => {
            search(*level, equation.as_deref(), *height, *json, stdout)
        }
        Command::IdentifyCm { minpoly } => identify(minpoly, stdout),
        Command::ValidateAll => validate_all(stdout),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

pub fn load_dataset(path: &Path) -> Result<ModularDataset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    ModularDataset::from_json(&text).map_err(|e| match e {
        DatasetError::InsufficientPrecision { .. } => CliError::Budget(e.to_string()),
        _ => CliError::Input(e.to_string()),
    })
}

fn emit(v: &Value, out: &OutArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    match &out.out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| io_err(p, e)),
        None => writeln!(stdout, "{text}").map_err(|e| CliError::Input(e.to_string())),
    }
}

fn context(path: &Path, allow_large: bool) -> Result<LevelContext, CliError> {
    let ds = load_dataset(path)?;
    let ctx = LevelContext::new(ds, None)?;
    if ctx.sigma > SIGMA_BUDGET && !allow_large {
        return Err(CliError::Budget(format!(
            "sigma({}) = {} exceeds the budget {SIGMA_BUDGET}; pass --allow-large",
            ctx.level, ctx.sigma
        )));
    }
    let have = ctx.dataset.precision();
    if have < ctx.required_precision() {
        return Err(CliError::Budget(format!(
            "dataset precision {have} is below the required {}",
            ctx.required_precision()
        )));
    }
    Ok(ctx)
}

fn pipeline_points(curve: &SexticCurve, height: u64, given: &[String]) -> Result<Vec<CurvePoint>, CliError> {
    if given.is_empty() {
        return Ok(search_points(curve, height).into_iter().filter(|p| *p != CurvePoint::InfinityPlus).collect());
    }
    given
        .iter()
        .map(|s| {
            let p: CurvePoint =
                s.parse().map_err(|e: crate::hyperelliptic::CurveError| CliError::Input(e.to_string()))?;
            if p == CurvePoint::InfinityPlus {
                return Err(CliError::Input("inf+ is the cusp; the j-polynomial is undefined there".into()));
            }
            if !curve.contains(&p) {
                return Err(CliError::Input(format!("{p} is not on {curve}")));
            }
            Ok(p)
        })
        .collect()
}

/// Reports in input order, with per-point wall times in milliseconds.
pub fn run_points(
    ctx: &LevelContext,
    exprs: &[FExpression],
    pts: &[CurvePoint],
) -> Result<(Vec<PointReport>, Vec<u128>), CliError> {
    let done: Vec<Result<(PointReport, u128), PipelineError>> = pts
        .par_iter()
        .map(|p| {
            let t = Instant::now();
            analyze_point(ctx, exprs, p).map(|r| (r, t.elapsed().as_millis()))
        })
        .collect();
    let mut reports = Vec::with_capacity(done.len());
    let mut times = Vec::with_capacity(done.len());
    for d in done {
        let (r, t) = d?;
        reports.push(r);
        times.push(t);
    }
    Ok((reports, times))
}

fn coeff_strings(c: &SexticCurve) -> Vec<String> {
    c.coeffs().iter().map(|a| a.to_string()).collect()
}

fn derive(path: &Path, check: bool, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let ds = load_dataset(path)?;
    let d = derive_equation_checked(&ds)?;
    let mut v = json!({
        "level": ds.level().to_string(),
        "equation": d.curve.to_string(),
        "a": coeff_strings(&d.curve),
        "verified_terms": d.verified_terms.to_string(),
        "extra_verified": d.extra_verified.to_string(),
        "low_margin": d.low_margin(),
    });
    let mut code = EXIT_OK;
    if check {
        let row = equation_row(ds.level())
            .ok_or_else(|| CliError::Input(format!("level {} is not in the equation table", ds.level())))?;
        let rep = validate_dataset(&ds, &row.curve());
        let status = if rep.exact_match() {
            "match"
        } else if rep.translation.is_some() {
            "translated"
        } else {
            code = EXIT_MISMATCH;
            "mismatch"
        };
        v["check"] = json!({
            "status": status,
            "table_equation": row.equation,
            "table_a": row.a,
            "matches": rep.matches,
            "translation": rep.translation.map(|t| t.to_string()),
        });
    }
    writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(code)
}

pub fn parse_equation(s: &str) -> Result<SexticCurve, CliError> {
    let parts: Vec<&str> = s.split([',', ' ']).filter(|t| !t.is_empty()).collect();
    if parts.len() != 6 {
        return Err(CliError::Input(format!("expected six coefficients a0..a5, got {}", parts.len())));
    }
    let a: Vec<Rational> = parts
        .iter()
        .map(|t| parse_rational(t).map_err(|e| CliError::Input(e.to_string())))
        .collect::<Result<_, _>>()?;
    SexticCurve::new(a.try_into().expect("six")).map_err(|e| CliError::Input(e.to_string()))
}

fn search(
    level: Option<u64>,
    equation: Option<&str>,
    height: u64,
    as_json: bool,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let (curve, complete) = match (level, equation) {
        (Some(n), _) => {
            let row = equation_row(n).ok_or_else(|| CliError::Input(format!("unknown level {n}")))?;
            (row.curve(), row.points_complete)
        }
        (None, Some(e)) => (parse_equation(e)?, false),
        (None, None) => return Err(CliError::Input("give --level or --equation".into())),
    };
    let pts = search_points(&curve, height);
    let w = |r: std::io::Result<()>| r.map_err(|e| CliError::Input(e.to_string()));
    if as_json {
        let v = json!({
            "level": level.map(|n| n.to_string()),
            "equation": curve.to_string(),
            "height": height.to_string(),
            "points": pts.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "provably_complete": complete,
        });
        w(writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("serializable")))?;
    } else {
        w(writeln!(stdout, "{curve}"))?;
        for p in &pts {
            w(writeln!(stdout, "{p}"))?;
        }
        if complete {
            w(writeln!(stdout, "# provably complete: these are all the rational points"))?;
        }
    }
    Ok(EXIT_OK)
}

/// Coefficients listed from the leading one down.
pub fn parse_minpoly(s: &str) -> Result<IntPolynomial, CliError> {
    let mut c: Vec<num_bigint::BigInt> = s
        .split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Input(format!("not an integer: {t:?}"))))
        .collect::<Result<_, _>>()?;
    c.reverse();
    let p = IntPolynomial::new(c);
    if p.is_zero() || p.degree() == 0 {
        return Err(CliError::Input("polynomial must have positive degree".into()));
    }
    if !p.is_monic() {
        return Err(CliError::Input("polynomial must be monic".into()));
    }
    if p.degree() > MAX_MINPOLY_DEGREE {
        return Err(CliError::Input(format!("degree {} exceeds {MAX_MINPOLY_DEGREE}", p.degree())));
    }
    Ok(p)
}

fn identify(minpoly: &str, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let p = parse_minpoly(minpoly)?;
    let v = match identify_cm(&p) {
        Some(d) => {
            let h = class_polynomial(d)?;
            json!({
                "discriminant": d.to_string(),
                "class_polynomial": h.poly.display_var("z"),
                "coefficients": h.poly.coeffs().iter().rev().map(|c| c.to_string()).collect::<Vec<_>>(),
            })
        }
        None => json!({"discriminant": null, "result": "no CM match"}),
    };
    writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(EXIT_OK)
}

fn validate_all(stdout: &mut dyn Write) -> Result<i32, CliError> {
    let reps: Vec<_> = BUNDLED_LEVELS
        .par_iter()
        .map(|&n| {
            let row = equation_row(n).expect("bundled levels are in the table");
            validate_dataset(&bundled_dataset(n).expect("bundled"), &row.curve())
        })
        .collect();
    let ok = reps.iter().all(|r| r.exact_match() || r.translation.is_some());
    let v = json!({
        "levels": reps.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "table_rows": equation_rows().len().to_string(),
        "all_consistent": ok,
    });
    writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}
