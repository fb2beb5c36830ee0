//! C ABI for rotavg.
//!
//! Every fallible function returns a [`RotavgStatus`]; on failure a message is
//! kept per thread and can be fetched with [`rotavg_last_error`]. Strings
//! returned through out-parameters are owned by the caller and must be released
//! with [`rotavg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;
use std::sync::Arc;

use rotavg::averaging::average_tensor_with;
use rotavg::{diag_average, shared_average, solve_coefficients, BlockDiagonalAverage, DenseTensor, Error, IndexTuple};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotavgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidRank = 2,
    InvalidIndex = 3,
    InvalidArgument = 4,
    LengthMismatch = 5,
    Internal = 6,
}

/// Averaging operator for one rank; create with [`rotavg_average_new`].
pub struct RotavgAverage {
    op: Arc<BlockDiagonalAverage>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> RotavgStatus {
    match e {
        Error::EvenRank(_) | Error::UnsupportedRank(_) => RotavgStatus::InvalidRank,
        Error::ParseAxis(_) => RotavgStatus::InvalidIndex,
        Error::LengthMismatch { .. } | Error::DimensionMismatch(_) => RotavgStatus::LengthMismatch,
        Error::NotOddPositive(_) | Error::InvalidPartition { .. } | Error::DoubleFactorialDomain(_) => {
            RotavgStatus::InvalidArgument
        }
        _ => RotavgStatus::Internal,
    }
}

struct Failure(RotavgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure> + UnwindSafe) -> RotavgStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => RotavgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RotavgStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RotavgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(RotavgStatus::InvalidIndex, format!("{what} is not valid UTF-8")))
}

unsafe fn read_tuple(p: *const c_char, what: &str) -> Result<IndexTuple, Failure> {
    Ok(read_str(p, what)?.parse()?)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).expect("no interior nul").into_raw();
    Ok(())
}

unsafe fn handle<'a>(h: *const RotavgAverage) -> Result<&'a RotavgAverage, Failure> {
    h.as_ref().ok_or_else(|| null("handle"))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn rotavg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or null. The pointer is
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn rotavg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn rotavg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds (or reuses) the averaging operator for an odd rank in 3..=11.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to release
/// with [`rotavg_average_free`].
#[no_mangle]
pub unsafe extern "C" fn rotavg_average_new(rank: usize, out: *mut *mut RotavgAverage) -> RotavgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let op = shared_average(rank)?;
        *out = Box::into_raw(Box::new(RotavgAverage { op }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`rotavg_average_new`], freed at most once.
#[no_mangle]
pub unsafe extern "C" fn rotavg_average_free(h: *mut RotavgAverage) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Rank of the operator, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rotavg_average_rank(h: *const RotavgAverage) -> usize {
    h.as_ref().map_or(0, |h| h.op.rank)
}

/// Exact component `I_{lab; mol}` as a `"p/q"` string; `lab` and `mol` are
/// strings over `xyz` of length equal to the rank.
///
/// # Safety
/// `h` must be a live handle, `lab`/`mol` nul-terminated strings, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rotavg_average_entry_exact(
    h: *const RotavgAverage,
    lab: *const c_char,
    mol: *const c_char,
    out: *mut *mut c_char,
) -> RotavgStatus {
    guard(|| {
        let h = handle(h)?;
        let value = h.op.component(&read_tuple(lab, "lab")?, &read_tuple(mol, "mol")?)?;
        write_string(out, value.to_string())
    })
}

/// Component `I_{lab; mol}` as a double.
///
/// # Safety
/// As for [`rotavg_average_entry_exact`], with `out` pointing to a double.
#[no_mangle]
pub unsafe extern "C" fn rotavg_average_entry(
    h: *const RotavgAverage,
    lab: *const c_char,
    mol: *const c_char,
    out: *mut f64,
) -> RotavgStatus {
    guard(|| {
        let h = handle(h)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = h.op.component(&read_tuple(lab, "lab")?, &read_tuple(mol, "mol")?)?.to_f64();
        Ok(())
    })
}

/// Averages a dense tensor of `3^rank` doubles (last index fastest) into `output`.
/// `input` and `output` may alias.
///
/// # Safety
/// Both pointers must reference `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rotavg_average_tensor(
    h: *const RotavgAverage,
    input: *const f64,
    output: *mut f64,
    len: usize,
) -> RotavgStatus {
    guard(|| {
        let h = handle(h)?;
        if input.is_null() || output.is_null() {
            return Err(null("tensor buffer"));
        }
        let entries = std::slice::from_raw_parts(input, len).to_vec();
        let t = DenseTensor::new(h.op.rank, entries)?;
        let avg = average_tensor_with(&h.op, &t)?;
        std::slice::from_raw_parts_mut(output, len).copy_from_slice(avg.entries());
        Ok(())
    })
}

/// Coefficient table for `rank` as JSON.
///
/// # Safety
/// `out` must be valid; the result is freed with [`rotavg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rotavg_coefficients_json(rank: usize, out: *mut *mut c_char) -> RotavgStatus {
    guard(|| {
        let table = solve_coefficients(rank)?;
        let json =
            serde_json::to_string(&table.to_json()).map_err(|e| Failure(RotavgStatus::Internal, e.to_string()))?;
        write_string(out, json)
    })
}

/// Diagonal component `<l_xx^q l_yy^r l_zz^s>` for odd positive `q, r, s`, as `"p/q"`.
///
/// # Safety
/// `out` must be valid; the result is freed with [`rotavg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rotavg_diag_average(q: i64, r: i64, s: i64, out: *mut *mut c_char) -> RotavgStatus {
    guard(|| write_string(out, diag_average(q, r, s)?.to_string()))
}
