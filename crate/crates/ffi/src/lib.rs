//! C ABI for `l2growth`.
//!
//! Objects cross the boundary as opaque handles created by a `*_new` or
//! `*_from_*` function and released with the matching `*_free`. Every
//! fallible function returns an [`L2Status`]; on failure a description is
//! kept per thread and can be read with [`l2_last_error`].
//!
//! Enumeration caps are read from `L2GROWTH_CAPS` on every call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use l2growth::caps::Caps;
use l2growth::cli::parse_subgroup;
use l2growth::covers::instantiate;
use l2growth::document::{load_complex, ComplexDocument};
use l2growth::group_ring::EquivariantChainComplex;
use l2growth::groups::{quotient, short_length, FiniteQuotient, Short};
use l2growth::pattern::betti_by_characters;
use l2growth::spectral::bounds::{gap_bound, sublog_bound, BoundReport};
use l2growth::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum L2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    NotFiniteIndex = 4,
    CapExceeded = 5,
    NotAbelian = 6,
    HypothesisUnverified = 7,
    Overflow = 8,
    Mismatch = 9,
    Panic = 10,
}

/// An equivariant chain complex.
pub struct L2Complex(EquivariantChainComplex);

/// A finite quotient of the group of an [`L2Complex`], with the subgroup's
/// short length.
pub struct L2Quotient {
    quotient: FiniteQuotient,
    short: Short,
}

/// A bound report.
pub struct L2Report(BoundReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(err: &Error) -> L2Status {
    match err {
        Error::NotFiniteIndex => L2Status::NotFiniteIndex,
        Error::SearchCapExceeded { .. } | Error::OrderCapExceeded { .. } | Error::SizeCapExceeded { .. } => {
            L2Status::CapExceeded
        }
        Error::NotAbelian | Error::NotRankOne => L2Status::NotAbelian,
        Error::GapNotVerified { .. }
        | Error::HypothesisUnverified(_)
        | Error::ShortTooSmall(_)
        | Error::FamilyNotLogUniform(_)
        | Error::InsufficientGrid(_) => L2Status::HypothesisUnverified,
        Error::Overflow => L2Status::Overflow,
        _ => L2Status::InvalidInput,
    }
}

struct Failure(L2Status, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure(status_of(&e), e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> L2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => L2Status::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            L2Status::Panic
        }
    }
}

fn caps() -> Result<Caps, Failure> {
    Ok(Caps::from_env()?)
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(L2Status::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(L2Status::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(L2Status::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(L2Status::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn l2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn l2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a JSON complex document.
///
/// # Safety
/// `json` must be a nul-terminated string and `out_complex` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn l2_complex_from_json(json: *const c_char, out_complex: *mut *mut L2Complex) -> L2Status {
    guard(|| {
        let slot = out(out_complex, "out_complex")?;
        let cx = ComplexDocument::from_json(text(json, "json")?)?.to_complex()?;
        *slot = Box::into_raw(Box::new(L2Complex(cx)));
        Ok(())
    })
}

/// Reads a JSON complex document from a file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out_complex` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn l2_complex_from_file(path: *const c_char, out_complex: *mut *mut L2Complex) -> L2Status {
    guard(|| {
        let slot = out(out_complex, "out_complex")?;
        let cx = load_complex(Path::new(text(path, "path")?))?;
        *slot = Box::into_raw(Box::new(L2Complex(cx)));
        Ok(())
    })
}

/// Serialises a complex back to JSON; free the result with
/// [`l2_string_free`].
///
/// # Safety
/// `complex` must be a live handle and `out_json` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn l2_complex_to_json(complex: *const L2Complex, out_json: *mut *mut c_char) -> L2Status {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let doc = ComplexDocument::from_complex(&borrow(complex, "complex")?.0)?;
        *slot = owned_string(doc.to_json());
        Ok(())
    })
}

/// Top dimension of a complex, or 0 for null.
///
/// # Safety
/// `complex` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_complex_top(complex: *const L2Complex) -> usize {
    complex.as_ref().map_or(0, |c| c.0.top())
}

/// Number of equivariant cells in dimension `dim`, or 0 outside the range.
///
/// # Safety
/// `complex` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_complex_cells(complex: *const L2Complex, dim: usize) -> usize {
    complex.as_ref().and_then(|c| c.0.cells().get(dim).copied()).unwrap_or(0)
}

/// # Safety
/// `complex` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn l2_complex_free(complex: *mut L2Complex) {
    if !complex.is_null() {
        drop(Box::from_raw(complex));
    }
}

/// Finite quotient by a subgroup given as lattice rows (`"2 0; 0 3"`, or
/// `"12"` in rank one) or as `"mod m"` for a congruence subgroup.
///
/// # Safety
/// `complex` must be a live handle, `subgroup` a nul-terminated string and
/// `out_quotient` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn l2_quotient_new(
    complex: *const L2Complex,
    subgroup: *const c_char,
    out_quotient: *mut *mut L2Quotient,
) -> L2Status {
    guard(|| {
        let slot = out(out_quotient, "out_quotient")?;
        let group = borrow(complex, "complex")?.0.group();
        let sub = parse_subgroup(text(subgroup, "subgroup")?)?;
        let caps = caps()?;
        let q = quotient(group, &sub, &caps)?;
        let short = short_length(group, &sub, &caps)?;
        *slot = Box::into_raw(Box::new(L2Quotient { quotient: q, short }));
        Ok(())
    })
}

/// Index of the subgroup, or 0 for null.
///
/// # Safety
/// `quotient` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_quotient_order(quotient: *const L2Quotient) -> usize {
    quotient.as_ref().map_or(0, |q| q.quotient.order())
}

/// Short length of the subgroup; 0 when the subgroup is trivial and the
/// length is infinite, or for null.
///
/// # Safety
/// `quotient` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_quotient_short(quotient: *const L2Quotient) -> u64 {
    quotient.as_ref().and_then(|q| q.short.finite()).unwrap_or(0)
}

/// # Safety
/// `quotient` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn l2_quotient_free(quotient: *mut L2Quotient) {
    if !quotient.is_null() {
        drop(Box::from_raw(quotient));
    }
}

/// Betti number `b_dim` of the finite cover, by exact rank.
///
/// # Safety
/// Handles must be live and built from the same complex; `out_betti` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn l2_betti(
    complex: *const L2Complex,
    quotient: *const L2Quotient,
    dim: usize,
    out_betti: *mut usize,
) -> L2Status {
    guard(|| {
        let slot = out(out_betti, "out_betti")?;
        let cover = instantiate(&borrow(complex, "complex")?.0, &borrow(quotient, "quotient")?.quotient, &caps()?)?;
        *slot = cover.betti(dim)?;
        Ok(())
    })
}

/// Betti number by summing kernel dimensions over characters; free abelian
/// groups only. Returns [`L2Status::Mismatch`] if it disagrees with the rank
/// computation, with the character value still written.
///
/// # Safety
/// As for [`l2_betti`].
#[no_mangle]
pub unsafe extern "C" fn l2_betti_characters(
    complex: *const L2Complex,
    quotient: *const L2Quotient,
    dim: usize,
    out_betti: *mut usize,
) -> L2Status {
    guard(|| {
        let slot = out(out_betti, "out_betti")?;
        let r = betti_by_characters(&borrow(complex, "complex")?.0, &borrow(quotient, "quotient")?.quotient, dim, &caps()?)?;
        *slot = r.character_sum;
        if r.agrees {
            Ok(())
        } else {
            Err(Failure(L2Status::Mismatch, format!("character sum {} but rank gives {}", r.character_sum, r.exact)))
        }
    })
}

/// Spectral-gap bound `4 a [G:G'] exp(-M short)` for a gap `lambda0`,
/// verified before the bound is reported.
///
/// # Safety
/// As for [`l2_betti`], with `out_report` writable.
#[no_mangle]
pub unsafe extern "C" fn l2_gap_bound(
    complex: *const L2Complex,
    quotient: *const L2Quotient,
    dim: usize,
    lambda0: f64,
    out_report: *mut *mut L2Report,
) -> L2Status {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        let r = gap_bound(&borrow(complex, "complex")?.0, &borrow(quotient, "quotient")?.quotient, dim, lambda0, None, &caps()?)?;
        *slot = Box::into_raw(Box::new(L2Report(r)));
        Ok(())
    })
}

/// Sublogarithmic bound `C [G:G'] / log short`.
///
/// # Safety
/// As for [`l2_gap_bound`].
#[no_mangle]
pub unsafe extern "C" fn l2_sublog_bound(
    complex: *const L2Complex,
    quotient: *const L2Quotient,
    dim: usize,
    out_report: *mut *mut L2Report,
) -> L2Status {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        let r = sublog_bound(&borrow(complex, "complex")?.0, &borrow(quotient, "quotient")?.quotient, dim, None, &caps()?)?;
        *slot = Box::into_raw(Box::new(L2Report(r)));
        Ok(())
    })
}

/// Bound value, or NaN for null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_report_bound(report: *const L2Report) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.bound)
}

/// Exact Betti number the bound was compared with.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_report_measured(report: *const L2Report) -> usize {
    report.as_ref().map_or(0, |r| r.0.measured)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_report_satisfied(report: *const L2Report) -> bool {
    report.as_ref().is_some_and(|r| r.0.satisfied)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_report_hypothesis_verified(report: *const L2Report) -> bool {
    report.as_ref().is_some_and(|r| r.0.hypothesis_verified)
}

/// Human-readable report with every constant; free with [`l2_string_free`].
/// Null for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn l2_report_to_string(report: *const L2Report) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| owned_string(r.0.to_string()))
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn l2_report_free(report: *mut L2Report) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Runs a verification suite (`"all"`, `"traces"`, `"sandwich"`,
/// `"stripes"` or `"bounds"`) and sums the pass counts. Returns
/// [`L2Status::Mismatch`] when any check fails.
///
/// # Safety
/// `suite` must be a nul-terminated string; `passed` and `total` writable.
#[no_mangle]
pub unsafe extern "C" fn l2_verify(suite: *const c_char, seed: u64, passed: *mut usize, total: *mut usize) -> L2Status {
    guard(|| {
        let (p, t) = (out(passed, "passed")?, out(total, "total")?);
        let reports = l2growth::verify::run(text(suite, "suite")?, seed, &caps()?)?;
        *p = reports.iter().map(|r| r.passed).sum();
        *t = reports.iter().map(|r| r.total).sum();
        if *p == *t {
            Ok(())
        } else {
            Err(Failure(L2Status::Mismatch, reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n")))
        }
    })
}

/// Seed used by the command-line `verify` when none is given.
#[no_mangle]
pub extern "C" fn l2_default_seed() -> u64 {
    l2growth::verify::DEFAULT_SEED
}
