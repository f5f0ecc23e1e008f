//! C ABI over the qstar library.
//!
//! Handles are opaque and owned by the caller until passed to their `_free`
//! function. Every call returns a [`QstarStatus`]; on failure the message is
//! kept per thread and read back with [`qstar_last_error`]. Strings returned
//! through out-parameters are NUL-terminated JSON or text and must be released
//! with [`qstar_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qstar::algnum::IntPolynomial;
use qstar::cli::{CliError, SIGMA_BUDGET};
use qstar::cm::{class_polynomial, identify_cm};
use qstar::data::{bundled_dataset, equation_row};
use qstar::hyperelliptic::{search_points, CurvePoint, SexticCurve};
use qstar::jpipeline::{FExpression, LevelContext};
use qstar::modular::ModularDataset;
use qstar::report::analyze_point;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QstarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Mismatch = 3,
    Budget = 4,
    Panic = 5,
}

/// A sextic `y^2 = x^6 + a5 x^5 + ... + a0`.
pub struct QstarCurve {
    curve: SexticCurve,
}

/// A level with its curve and the expressions of `J_1..J_m`.
pub struct QstarLevel {
    ctx: LevelContext,
    exprs: Vec<FExpression>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (QstarStatus, String);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QstarStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QstarStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&msg);
            QstarStatus::Panic
        }
    }
}

fn from_cli(e: CliError) -> Failure {
    let status = match e {
        CliError::Input(_) => QstarStatus::InvalidInput,
        CliError::Mismatch(_) => QstarStatus::Mismatch,
        CliError::Budget(_) => QstarStatus::Budget,
    };
    (status, e.to_string())
}

fn invalid(msg: impl Into<String>) -> Failure {
    (QstarStatus::InvalidInput, msg.into())
}

fn null(name: &str) -> Failure {
    (QstarStatus::NullPointer, format!("{name} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{name} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| invalid("interior NUL in output"))?;
    write_out(out, c.into_raw(), "out")
}

fn parse_point(s: &str) -> Result<CurvePoint, Failure> {
    s.parse().map_err(|e: qstar::hyperelliptic::CurveError| invalid(e.to_string()))
}

/// Copy of the last error message on this thread, or null. Free with
/// [`qstar_string_free`].
#[no_mangle]
pub extern "C" fn qstar_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qstar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Curve from integer coefficients `a[0..6]` = a0..a5.
///
/// # Safety
/// `a` must point to six readable `int64_t`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_curve_new(a: *const i64, out: *mut *mut QstarCurve) -> QstarStatus {
    guard(|| {
        if a.is_null() {
            return Err(null("a"));
        }
        let mut c = [0i64; 6];
        c.copy_from_slice(std::slice::from_raw_parts(a, 6));
        let curve = SexticCurve::from_ints(c).map_err(|e| invalid(e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(QstarCurve { curve })), "out")
    })
}

/// The equation-table curve of `level`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_curve_from_table(level: u64, out: *mut *mut QstarCurve) -> QstarStatus {
    guard(|| {
        let row = equation_row(level).ok_or_else(|| invalid(format!("unknown level {level}")))?;
        write_out(out, Box::into_raw(Box::new(QstarCurve { curve: row.curve() })), "out")
    })
}

/// # Safety
/// `curve` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qstar_curve_free(curve: *mut QstarCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_curve_describe(curve: *const QstarCurve, out: *mut *mut c_char) -> QstarStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        write_string(out, c.curve.to_string())
    })
}

/// Whether `point` ("x,y", "(x,y)", "inf+" or "inf-") lies on the curve.
///
/// # Safety
/// `curve` must be a live handle, `point` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_curve_contains(
    curve: *const QstarCurve,
    point: *const c_char,
    out: *mut bool,
) -> QstarStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let p = parse_point(read_str(point, "point")?)?;
        write_out(out, c.curve.contains(&p), "out")
    })
}

/// JSON array of the points of height at most `height`.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_curve_search_points(
    curve: *const QstarCurve,
    height: u64,
    out: *mut *mut c_char,
) -> QstarStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let pts: Vec<String> = search_points(&c.curve, height).iter().map(|p| format!("\"{p}\"")).collect();
        write_string(out, format!("[{}]", pts.join(",")))
    })
}

fn open_level(ds: ModularDataset, allow_large: bool) -> Result<QstarLevel, Failure> {
    let ctx = LevelContext::new(ds, None).map_err(|e| from_cli(e.into()))?;
    if ctx.sigma > SIGMA_BUDGET && !allow_large {
        return Err((
            QstarStatus::Budget,
            format!("sigma({}) = {} exceeds the budget {SIGMA_BUDGET}", ctx.level, ctx.sigma),
        ));
    }
    let exprs = ctx.express_all().map_err(|e| from_cli(e.into()))?;
    Ok(QstarLevel { ctx, exprs })
}

/// Open a bundled level; computes the J-expressions, which is the slow part.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_level_bundled(level: u64, allow_large: bool, out: *mut *mut QstarLevel) -> QstarStatus {
    guard(|| {
        let ds = bundled_dataset(level).ok_or_else(|| invalid(format!("no bundled dataset for {level}")))?;
        let l = open_level(ds, allow_large)?;
        write_out(out, Box::into_raw(Box::new(l)), "out")
    })
}

/// Open a level from dataset JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_level_from_json(
    json: *const c_char,
    allow_large: bool,
    out: *mut *mut QstarLevel,
) -> QstarStatus {
    guard(|| {
        let ds = ModularDataset::from_json(read_str(json, "json")?).map_err(|e| from_cli(e.into()))?;
        let l = open_level(ds, allow_large)?;
        write_out(out, Box::into_raw(Box::new(l)), "out")
    })
}

/// # Safety
/// `level` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qstar_level_free(level: *mut QstarLevel) {
    if !level.is_null() {
        drop(Box::from_raw(level));
    }
}

/// JSON report for one point: j-polynomial, factors, fields, CM discriminants.
///
/// # Safety
/// `level` must be a live handle, `point` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_level_analyze_point(
    level: *const QstarLevel,
    point: *const c_char,
    out: *mut *mut c_char,
) -> QstarStatus {
    guard(|| {
        let l = level.as_ref().ok_or_else(|| null("level"))?;
        let p = parse_point(read_str(point, "point")?)?;
        if !l.ctx.curve.contains(&p) {
            return Err(invalid(format!("{p} is not on {}", l.ctx.curve)));
        }
        let r = analyze_point(&l.ctx, &l.exprs, &p).map_err(|e| from_cli(e.into()))?;
        write_string(out, r.to_json().to_string())
    })
}

/// CM discriminant of a monic integer polynomial given low degree first.
/// `found` is false when no discriminant matches.
///
/// # Safety
/// `coeffs` must point to `len` readable `int64_t`; `d` and `found` writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_identify_cm(
    coeffs: *const i64,
    len: usize,
    d: *mut i64,
    found: *mut bool,
) -> QstarStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let p = IntPolynomial::from_i64s(std::slice::from_raw_parts(coeffs, len));
        if p.is_zero() || p.degree() == 0 || !p.is_monic() {
            return Err(invalid("polynomial must be monic of positive degree"));
        }
        let r = identify_cm(&p);
        write_out(d, r.unwrap_or(0), "d")?;
        write_out(found, r.is_some(), "found")
    })
}

/// Hilbert class polynomial of `d` as a JSON array of decimal strings, low degree first.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qstar_class_polynomial(d: i64, out: *mut *mut c_char) -> QstarStatus {
    guard(|| {
        let h = class_polynomial(d).map_err(|e| from_cli(e.into()))?;
        let c: Vec<String> = h.poly.coeffs().iter().map(|c| format!("\"{c}\"")).collect();
        write_string(out, format!("[{}]", c.join(",")))
    })
}
