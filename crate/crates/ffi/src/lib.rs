//! C ABI for `dhm-core`.
//!
//! Objects cross the boundary as opaque handles created by `dhm_*_new` style
//! constructors and released with the matching `dhm_*_free`. Every fallible
//! call returns a [`DhmStatus`]; on failure the message is kept per thread
//! and can be read with [`dhm_last_error_message`]. Panics never unwind into
//! the caller, they are reported as [`DhmStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dhm_core::norms::{self, ApExactness, Exactness};
use dhm_core::seq::{Seq, Weight, WeightFamily};
use dhm_core::transforms::{self, TransformResult};
use dhm_core::{Error, EvalPlan, MorreyParams, TailPolicy};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DhmStatus {
    Ok = 0,
    NullPointer = 1,
    Empty = 2,
    InvalidParameter = 3,
    NonpositiveWeight = 4,
    OutOfWindow = 5,
    NotMeanZero = 6,
    Parse = 7,
    Panic = 8,
}

impl From<&Error> for DhmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Empty(_) => DhmStatus::Empty,
            Error::InvalidParameter(_) => DhmStatus::InvalidParameter,
            Error::NonPositiveWeight { .. } => DhmStatus::NonpositiveWeight,
            Error::OutOfWindow { .. } => DhmStatus::OutOfWindow,
            Error::NotMeanZero { .. } => DhmStatus::NotMeanZero,
            Error::Parse(_) => DhmStatus::Parse,
        }
    }
}

/// Finitely supported sequence.
pub struct DhmSeq(Seq);

/// Positive weight on a finite window.
pub struct DhmWeight(Weight);

/// Transform values on an evaluation window plus the bound on what lies
/// outside it.
pub struct DhmTransform(TransformResult);

/// Which summation path computes the transform.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DhmPath {
    Naive = 0,
    Fast = 1,
}

/// A supremum over windows `|k - m| <= n` with the window attaining it.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhmNorm {
    pub value: f64,
    /// Nonzero when the value is the exact supremum rather than a lower bound.
    pub exact: u8,
    pub witness_m: i64,
    pub witness_n: i64,
}

/// Muckenhoupt constant over intervals `[lo, hi]` inside the searched window.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhmApConstant {
    pub value: f64,
    /// Nonzero when the supremum was still increasing at the window edge.
    pub growing: u8,
    pub witness_lo: i64,
    pub witness_hi: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DhmStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DhmStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            DhmStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_last_error(e.to_string());
            DhmStatus::from(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            DhmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next `dhm_*` call on the same thread.
#[no_mangle]
pub extern "C" fn dhm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.as_ptr(),
        None => ptr::null(),
    })
}

/// Static name of a status code, e.g. `"out-of-window"`.
#[no_mangle]
pub extern "C" fn dhm_status_name(status: DhmStatus) -> *const c_char {
    let name: &'static CStr = match status {
        DhmStatus::Ok => c"ok",
        DhmStatus::NullPointer => c"null-pointer",
        DhmStatus::Empty => c"empty",
        DhmStatus::InvalidParameter => c"invalid-parameter",
        DhmStatus::NonpositiveWeight => c"nonpositive-weight",
        DhmStatus::OutOfWindow => c"out-of-window",
        DhmStatus::NotMeanZero => c"not-mean-zero",
        DhmStatus::Parse => c"parse",
        DhmStatus::Panic => c"panic",
    };
    name.as_ptr()
}

/// Sequence with `values[i]` at index `offset + i`.
///
/// # Safety
/// `values` must point to `len` readable doubles (it may be NULL when `len`
/// is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dhm_seq_new(values: *const f64, len: usize, offset: i64, out: *mut *mut DhmSeq) -> DhmStatus {
    guard(|| {
        let values = slice(values, len, "values")?.to_vec();
        let seq = Seq::new(values, offset)?;
        write_out(out, Box::into_raw(Box::new(DhmSeq(seq))))
    })
}

/// # Safety
/// `seq` must be NULL or a handle from [`dhm_seq_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dhm_seq_free(seq: *mut DhmSeq) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Lowest stored index.
///
/// # Safety
/// `seq` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dhm_seq_lo(seq: *const DhmSeq) -> i64 {
    seq.as_ref().map_or(0, |s| s.0.lo())
}

/// Number of stored values.
///
/// # Safety
/// `seq` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dhm_seq_len(seq: *const DhmSeq) -> usize {
    seq.as_ref().map_or(0, |s| s.0.len())
}

/// Weight from a family string (`const:C`, `power:A`, `random:SEED:RATIO`,
/// `step:LOW:HIGH:AT`) sampled on `[lo, hi]`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dhm_weight_from_family(
    spec: *const c_char,
    lo: i64,
    hi: i64,
    out: *mut *mut DhmWeight,
) -> DhmStatus {
    guard(|| {
        let spec = deref(spec, "spec")?;
        let spec = CStr::from_ptr(spec)
            .to_str()
            .map_err(|e| Error::Parse(format!("weight spec is not UTF-8: {e}")))?;
        let family: WeightFamily = spec.parse()?;
        let w = Weight::from_family(family, lo, hi)?;
        write_out(out, Box::into_raw(Box::new(DhmWeight(w))))
    })
}

/// Weight with `values[i]` at index `lo + i`; every value must be positive.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dhm_weight_from_values(
    values: *const f64,
    len: usize,
    lo: i64,
    out: *mut *mut DhmWeight,
) -> DhmStatus {
    guard(|| {
        let values = slice(values, len, "values")?.to_vec();
        let w = Weight::from_values(lo, values)?;
        write_out(out, Box::into_raw(Box::new(DhmWeight(w))))
    })
}

/// # Safety
/// `w` must be NULL or a handle from a `dhm_weight_*` constructor not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn dhm_weight_free(w: *mut DhmWeight) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// `(Hb)_n` for `n` in `[eval_lo, eval_hi]`. With `analytic_tail` nonzero the
/// tail bound uses the sharper `O(1/dist^2)` estimate when `seq` sums to
/// zero; otherwise it keeps the `||b||_1 / dist` bound.
///
/// # Safety
/// `seq` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dhm_hilbert(
    seq: *const DhmSeq,
    eval_lo: i64,
    eval_hi: i64,
    path: DhmPath,
    analytic_tail: u8,
    out: *mut *mut DhmTransform,
) -> DhmStatus {
    guard(|| {
        let b = &deref(seq, "seq")?.0;
        let mut plan = EvalPlan::new(eval_lo, eval_hi)?;
        if analytic_tail != 0 {
            plan = plan.with_tail_policy(TailPolicy::AnalyticTail);
        }
        let result = match path {
            DhmPath::Naive => transforms::hilbert_naive(b, &plan)?,
            DhmPath::Fast => transforms::hilbert_fast(b, &plan)?,
        };
        write_out(out, Box::into_raw(Box::new(DhmTransform(result))))
    })
}

/// First index of the evaluation window.
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dhm_transform_lo(t: *const DhmTransform) -> i64 {
    t.as_ref().map_or(0, |t| t.0.values.lo())
}

/// Number of values in the evaluation window.
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dhm_transform_len(t: *const DhmTransform) -> usize {
    t.as_ref().map_or(0, |t| t.0.values.len())
}

/// Borrowed pointer to the values, valid until the handle is freed.
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dhm_transform_values(t: *const DhmTransform) -> *const f64 {
    t.as_ref().map_or(ptr::null(), |t| t.0.values.values().as_ptr())
}

/// Upper bound on `|(Hb)_n|` outside the evaluation window.
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dhm_transform_tail_bound(t: *const DhmTransform) -> f64 {
    t.as_ref().map_or(f64::NAN, |t| t.0.tail_bound)
}

/// # Safety
/// `t` must be NULL or a handle from [`dhm_hilbert`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dhm_transform_free(t: *mut DhmTransform) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Weighted Morrey norm of `seq` with exponents `p`, `lambda`. Windows are
/// searched up to `margin` indices beyond the support; the weight must
/// cover the support widened by `margin + 1`.
///
/// # Safety
/// `seq` and `w` must be live handles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dhm_weighted_morrey_norm(
    seq: *const DhmSeq,
    w: *const DhmWeight,
    p: f64,
    lambda: f64,
    margin: i64,
    out: *mut DhmNorm,
) -> DhmStatus {
    guard(|| {
        let b = &deref(seq, "seq")?.0;
        let w = &deref(w, "weight")?.0;
        let params = MorreyParams::new(p, lambda)?;
        let plan = EvalPlan::around(b, 1).with_margin(margin)?;
        let v = norms::weighted_morrey_norm(b, w, params, &plan)?;
        write_out(
            out,
            DhmNorm {
                value: v.value,
                exact: u8::from(v.exactness == Exactness::Exact),
                witness_m: v.witness.0,
                witness_n: v.witness.1,
            },
        )
    })
}

/// Discrete Muckenhoupt constant of `w` over intervals inside `[lo, hi]`.
///
/// # Safety
/// `w` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dhm_ap_constant(
    w: *const DhmWeight,
    p: f64,
    lo: i64,
    hi: i64,
    out: *mut DhmApConstant,
) -> DhmStatus {
    guard(|| {
        let w = &deref(w, "weight")?.0;
        let v = norms::ap_constant(w, p, lo, hi)?;
        write_out(
            out,
            DhmApConstant {
                value: v.value,
                growing: u8::from(v.exactness == ApExactness::Growing),
                witness_lo: v.witness.0,
                witness_hi: v.witness.1,
            },
        )
    })
}
