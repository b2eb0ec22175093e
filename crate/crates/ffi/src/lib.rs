//! C ABI over the phrasebound alignment, scoring, statistics and LASSO
//! routines.
//!
//! Every entry point returns a [`PbStatus`]. On failure a message for the
//! calling thread is available from [`pb_last_error`] until the next failing
//! call on that thread. Handles returned through out-pointers are owned by the
//! caller and released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use phrasebound::lasso::{fit_lasso, predict, LassoFit, SolverOptions};
use phrasebound::prosody::{count_syllables, effect_test, RankTest};
use phrasebound::score::{sensitivity_score, Metric, SensitivityCounts};
use phrasebound::textgrid::{decode_bytes, extract_pauses, parse_textgrid, Alignment};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Numeric = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Parsed TextGrid.
pub struct PbTextGrid {
    alignment: Alignment,
}

/// Fitted LASSO model.
pub struct PbLasso {
    fit: LassoFit,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PbPause {
    /// Index of the spoken word the pause follows.
    pub after_word: usize,
    pub duration: f64,
}

/// Undefined ratios are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PbSensitivity {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f1_zero_tp: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PbEffect {
    /// True for the signed-rank test, false for the rank-sum test.
    pub paired: bool,
    pub statistic: f64,
    pub p_value: f64,
    pub exact: bool,
    pub significant: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PbStatus, String);

impl Failure {
    fn null(what: &str) -> Failure {
        Failure(PbStatus::NullPointer, format!("{what} is null"))
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            PbStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn rows(x: *const f64, n: usize, p: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let len = n.checked_mul(p).ok_or_else(|| Failure(PbStatus::InvalidArgument, "n * p overflows".into()))?;
    let flat = slice(x, len, "x")?;
    Ok(flat.chunks(p.max(1)).take(n).map(<[f64]>::to_vec).collect())
}

fn metric(m: Metric) -> f64 {
    m.value().unwrap_or(f64::NAN)
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a TextGrid (long or short format, UTF-8 or UTF-16) from `len` bytes.
///
/// # Safety
/// `bytes` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pb_textgrid_parse(bytes: *const u8, len: usize, out_grid: *mut *mut PbTextGrid) -> PbStatus {
    guard(|| {
        let out_grid = out(out_grid, "out")?;
        *out_grid = ptr::null_mut();
        let bytes = slice(bytes, len, "bytes")?;
        let text = decode_bytes(bytes).ok_or_else(|| Failure(PbStatus::InvalidUtf8, "neither UTF-8 nor UTF-16".into()))?;
        let alignment = parse_textgrid(&text).map_err(|e| Failure(PbStatus::Parse, e.to_string()))?;
        *out_grid = Box::into_raw(Box::new(PbTextGrid { alignment }));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle from [`pb_textgrid_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pb_textgrid_free(grid: *mut PbTextGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `grid` must be a live handle; `xmin` and `xmax` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pb_textgrid_span(grid: *const PbTextGrid, xmin: *mut f64, xmax: *mut f64) -> PbStatus {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| Failure::null("grid"))?;
        *out(xmin, "xmin")? = g.alignment.xmin;
        *out(xmax, "xmax")? = g.alignment.xmax;
        Ok(())
    })
}

/// Pauses of at least `min_dur` seconds between spoken words. The total is
/// stored in `count`; with zero `capacity` nothing else is written, otherwise
/// `capacity` must cover the total.
///
/// # Safety
/// `grid` must be a live handle; `pauses` must hold `capacity` entries;
/// `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pb_textgrid_pauses(
    grid: *const PbTextGrid,
    min_dur: f64,
    pauses: *mut PbPause,
    capacity: usize,
    count: *mut usize,
) -> PbStatus {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| Failure::null("grid"))?;
        let count = out(count, "count")?;
        if !min_dur.is_finite() || min_dur < 0.0 {
            return Err(Failure(PbStatus::InvalidArgument, format!("min_dur must be a non-negative number, got {min_dur}")));
        }
        let found = extract_pauses(&g.alignment, min_dur);
        *count = found.len();
        if capacity == 0 {
            return Ok(());
        }
        if pauses.is_null() {
            return Err(Failure::null("pauses"));
        }
        if capacity < found.len() {
            return Err(Failure(PbStatus::BufferTooSmall, format!("{} pauses, capacity {capacity}", found.len())));
        }
        let dst = std::slice::from_raw_parts_mut(pauses, found.len());
        for (d, p) in dst.iter_mut().zip(&found) {
            *d = PbPause { after_word: p.after_word, duration: p.duration };
        }
        Ok(())
    })
}

/// Orthographic syllable estimate for a NUL-terminated UTF-8 word.
///
/// # Safety
/// `word` must be a valid C string; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pb_count_syllables(word: *const c_char, out_count: *mut u32) -> PbStatus {
    guard(|| {
        let out_count = out(out_count, "out")?;
        if word.is_null() {
            return Err(Failure::null("word"));
        }
        let w = CStr::from_ptr(word).to_str().map_err(|e| Failure(PbStatus::InvalidUtf8, e.to_string()))?;
        *out_count = count_syllables(w, None);
        Ok(())
    })
}

/// # Safety
/// `out_score` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pb_sensitivity_score(tp: u64, fp: u64, fn_: u64, tn: u64, out_score: *mut PbSensitivity) -> PbStatus {
    guard(|| {
        let r = sensitivity_score(SensitivityCounts { tp, fp, fn_, tn });
        *out(out_score, "out")? =
            PbSensitivity { precision: metric(r.precision), recall: metric(r.recall), f1: metric(r.f1), f1_zero_tp: r.f1_zero_tp };
        Ok(())
    })
}

/// Two-sided rank test of `a` against `b`; paired samples must have equal
/// length.
///
/// # Safety
/// `a` and `b` must hold `n_a` and `n_b` values; `out_effect` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pb_effect_test(
    a: *const f64,
    n_a: usize,
    b: *const f64,
    n_b: usize,
    paired: bool,
    alpha: f64,
    out_effect: *mut PbEffect,
) -> PbStatus {
    guard(|| {
        let out_effect = out(out_effect, "out")?;
        let (a, b) = (slice(a, n_a, "a")?, slice(b, n_b, "b")?);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Failure(PbStatus::InvalidArgument, format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let r = effect_test(a, b, paired, alpha).map_err(|e| Failure(PbStatus::InvalidArgument, e.to_string()))?;
        *out_effect = PbEffect {
            paired: r.test == RankTest::WilcoxonSignedRank,
            statistic: r.statistic,
            p_value: r.p_value,
            exact: r.exact,
            significant: r.significant,
        };
        Ok(())
    })
}

/// Fit `y ~ x` with an L1 penalty of `lambda` on the 1/(2n) squared-error
/// scale. `x` is row-major `n × p`; columns are centered but not scaled.
///
/// # Safety
/// `x` must hold `n * p` values, `y` must hold `n`; `out_model` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pb_lasso_fit(x: *const f64, y: *const f64, n: usize, p: usize, lambda: f64, out_model: *mut *mut PbLasso) -> PbStatus {
    guard(|| {
        let out_model = out(out_model, "out")?;
        *out_model = ptr::null_mut();
        if p == 0 {
            return Err(Failure(PbStatus::InvalidArgument, "p must be positive".into()));
        }
        let x = rows(x, n, p)?;
        let y = slice(y, n, "y")?;
        let fit = fit_lasso(&x, y, lambda, SolverOptions::default()).map_err(|e| Failure(PbStatus::Numeric, e.to_string()))?;
        *out_model = Box::into_raw(Box::new(PbLasso { fit }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`pb_lasso_fit`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pb_lasso_free(model: *mut PbLasso) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Copy the intercept and `p` coefficients out of a fitted model.
///
/// # Safety
/// `model` must be a live handle; `coef` must hold `p` values; `intercept`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pb_lasso_coef(model: *const PbLasso, intercept: *mut f64, coef: *mut f64, p: usize) -> PbStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        let beta = &m.fit.beta;
        if p != beta.len() {
            return Err(Failure(PbStatus::InvalidArgument, format!("model has {} coefficients, buffer holds {p}", beta.len())));
        }
        *out(intercept, "intercept")? = m.fit.intercept;
        if coef.is_null() {
            return Err(Failure::null("coef"));
        }
        std::slice::from_raw_parts_mut(coef, p).copy_from_slice(beta);
        Ok(())
    })
}

/// Predictions for `n` rows of `x` (row-major, `p` columns as fitted).
///
/// # Safety
/// `model` must be a live handle; `x` must hold `n * p` values and `pred`
/// `n`.
#[no_mangle]
pub unsafe extern "C" fn pb_lasso_predict(model: *const PbLasso, x: *const f64, n: usize, p: usize, pred: *mut f64) -> PbStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        if p != m.fit.beta.len() {
            return Err(Failure(PbStatus::InvalidArgument, format!("model has {} features, got {p}", m.fit.beta.len())));
        }
        let x = rows(x, n, p)?;
        if n > 0 && pred.is_null() {
            return Err(Failure::null("pred"));
        }
        let yhat = predict(&m.fit, &x);
        if n > 0 {
            std::slice::from_raw_parts_mut(pred, n).copy_from_slice(&yhat);
        }
        Ok(())
    })
}
