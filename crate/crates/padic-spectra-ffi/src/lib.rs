//! C ABI surface over the spectral library: opaque handles, integer error
//! codes, and JSON strings for structured payloads, so other languages can
//! bind without knowing the Rust types.
//!
//! Conventions:
//! - Every fallible call returns a `PsStatus` code; `Ok` is 0.
//! - Output values land in caller-supplied pointers, filled only on success.
//! - Strings returned by the library are heap-allocated and must be released
//!   with `ps_string_free`. Configs must be released with `ps_config_free`.

use std::ffi::{c_char, CStr, CString};

use num_complex::Complex64;

use padic_spectra::error::Error;
use padic_spectra::green;
use padic_spectra::jsonio::{self, EigenvalueRecordJson};
use padic_spectra::mseries::MSeries;
use padic_spectra::operator::{self, RealizationConfig};
use padic_spectra::padic::{PAdicRational, PrimeContext};
use padic_spectra::scan::ScanWindow;
use padic_spectra::selftest;

/// Status codes mirrored in the generated header. Nonzero values match the
/// CLI exit codes: 2 for validation problems, 3 for numerical refusals.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    NumericalRefusal = 3,
    InternalError = 4,
}

fn status_of(e: &Error) -> PsStatus {
    match e.exit_code() {
        3 => PsStatus::NumericalRefusal,
        _ => PsStatus::InvalidArgument,
    }
}

/// Opaque realization handle.
pub struct PsConfig {
    inner: RealizationConfig,
}

fn cstr_arg<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().ok()
}

fn export_string(s: String, out: *mut *mut c_char) -> PsStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            PsStatus::Ok
        }
        Err(_) => PsStatus::InternalError,
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string produced by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-string argument
/// of this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a realization from flag-style strings: interaction points as
/// "x1,x2,...", the coupling matrix as row-major JSON, eta mode "parity" or
/// "none". On success writes the handle into `out`.
///
/// # Safety
/// String arguments must be NUL-terminated and valid for reads; `out` must
/// be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_config_new(
    p: u64,
    alpha: f64,
    points: *const c_char,
    coupling_json: *const c_char,
    eta_mode: *const c_char,
    out: *mut *mut PsConfig,
) -> PsStatus {
    if out.is_null() {
        return PsStatus::NullArgument;
    }
    let (points, coupling, eta) = match (
        cstr_arg(points),
        cstr_arg(coupling_json),
        cstr_arg(eta_mode),
    ) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return PsStatus::NullArgument,
    };
    let build = || -> Result<RealizationConfig, Error> {
        let ctx = PrimeContext::new(p)?;
        let points = jsonio::parse_points(points, ctx)?;
        let coupling = jsonio::parse_matrix(coupling)?;
        let eta = match eta {
            "none" => None,
            "parity" => Some(operator::eta_matrix_parity(&points)?),
            other => return Err(Error::InvalidParameter(format!("eta mode `{other}`"))),
        };
        RealizationConfig::new(ctx, alpha, points, coupling, eta)
    };
    match build() {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(PsConfig { inner })) };
            PsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a realization handle.
///
/// # Safety
/// `config` must come from `ps_config_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ps_config_free(config: *mut PsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Evaluates M_0 (gamma_is_infinite = true) or M_{p^gamma} at a complex
/// lambda; writes value and rigorous tail bound.
///
/// # Safety
/// The three output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_mseries_eval(
    p: u64,
    alpha: f64,
    gamma_is_infinite: bool,
    gamma: i64,
    lambda_re: f64,
    lambda_im: f64,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_bound: *mut f64,
) -> PsStatus {
    if out_re.is_null() || out_im.is_null() || out_bound.is_null() {
        return PsStatus::NullArgument;
    }
    let run = || -> Result<padic_spectra::mseries::MEvaluation, Error> {
        let series = MSeries::new(PrimeContext::new(p)?, alpha)?;
        let lambda = Complex64::new(lambda_re, lambda_im);
        if gamma_is_infinite {
            series.m0(lambda, tol)
        } else {
            series.mgamma(gamma, lambda, tol)
        }
    };
    match run() {
        Ok(eval) => {
            unsafe {
                *out_re = eval.value.re;
                *out_im = eval.value.im;
                *out_bound = eval.error_bound;
            }
            PsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Evaluates the one-sided difference series M_0 - M_{p^gamma}, finite at
/// lambda = 0.
///
/// # Safety
/// The three output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_mseries_diff(
    p: u64,
    alpha: f64,
    gamma: i64,
    lambda_re: f64,
    lambda_im: f64,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_bound: *mut f64,
) -> PsStatus {
    if out_re.is_null() || out_im.is_null() || out_bound.is_null() {
        return PsStatus::NullArgument;
    }
    let run = || -> Result<padic_spectra::mseries::MEvaluation, Error> {
        let series = MSeries::new(PrimeContext::new(p)?, alpha)?;
        series.diff(gamma, Complex64::new(lambda_re, lambda_im), tol)
    };
    match run() {
        Ok(eval) => {
            unsafe {
                *out_re = eval.value.re;
                *out_im = eval.value.im;
                *out_bound = eval.error_bound;
            }
            PsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Radial Green's function value at a rational point: center and x as
/// "a/b" strings.
///
/// # Safety
/// `center` and `x` must be NUL-terminated strings valid for reads; the
/// output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_green_eval(
    p: u64,
    alpha: f64,
    center: *const c_char,
    lambda_re: f64,
    lambda_im: f64,
    x: *const c_char,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PsStatus {
    if out_re.is_null() || out_im.is_null() {
        return PsStatus::NullArgument;
    }
    let (center, x) = match (cstr_arg(center), cstr_arg(x)) {
        (Some(a), Some(b)) => (a, b),
        _ => return PsStatus::NullArgument,
    };
    let run = || -> Result<Complex64, Error> {
        let ctx = PrimeContext::new(p)?;
        let series = MSeries::new(ctx, alpha)?;
        let center = PAdicRational::parse(center, ctx)?;
        let x = PAdicRational::parse(x, ctx)?;
        green::eval_h(
            &series,
            &center,
            Complex64::new(lambda_re, lambda_im),
            &x,
            tol,
        )
    };
    match run() {
        Ok(v) => {
            unsafe {
                *out_re = v.re;
                *out_im = v.im;
            }
            PsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Scans the real axis for eigenvalues of the realization; writes a JSON
/// array of records (release with `ps_string_free`).
///
/// # Safety
/// `config` must be a live handle from `ps_config_new`; `out_json` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_spectrum_scan(
    config: *const PsConfig,
    n_lo: i64,
    n_hi: i64,
    negative_axis: bool,
    tol: f64,
    out_json: *mut *mut c_char,
) -> PsStatus {
    if config.is_null() || out_json.is_null() {
        return PsStatus::NullArgument;
    }
    let config = unsafe { &*config };
    let mut window = ScanWindow::new(n_lo, n_hi);
    if negative_axis {
        window = window.with_negative_axis();
    }
    match operator::find_real_eigenvalues(&config.inner, &window, tol) {
        Ok(records) => {
            let json: Vec<EigenvalueRecordJson> = records.iter().map(Into::into).collect();
            match serde_json::to_string(&json) {
                Ok(s) => export_string(s, out_json),
                Err(_) => PsStatus::InternalError,
            }
        }
        Err(e) => status_of(&e),
    }
}

/// Runs the built-in invariant battery; writes a JSON report and returns
/// Ok only if every check passed.
///
/// # Safety
/// `out_json` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_selftest(out_json: *mut *mut c_char) -> PsStatus {
    if out_json.is_null() {
        return PsStatus::NullArgument;
    }
    let outcomes = selftest::run();
    let all_pass = outcomes.iter().all(|o| o.passed);
    let report: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| {
            serde_json::json!({
                "name": o.name,
                "passed": o.passed,
                "detail": o.detail,
            })
        })
        .collect();
    let status = match serde_json::to_string(&report) {
        Ok(s) => export_string(s, out_json),
        Err(_) => return PsStatus::InternalError,
    };
    if status != PsStatus::Ok {
        return status;
    }
    if all_pass {
        PsStatus::Ok
    } else {
        PsStatus::NumericalRefusal
    }
}
