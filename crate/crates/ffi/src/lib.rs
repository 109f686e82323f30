//! C ABI over the `sgx` library.
//!
//! Semigroups cross the boundary as opaque `SgxSemigroup` handles. Every
//! fallible call returns an `SgxStatus`; on anything other than
//! `SGX_STATUS_OK` a message is available from `sgx_last_error` on the same
//! thread. Strings handed out by the library must be released with
//! `sgx_string_free`, handles with `sgx_semigroup_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sgx::closedness::{
    audit_center_necessary, decide_c_closed_commutative, decide_ideally_closed_commutative,
    decide_projectively_closed_commutative, ClosednessError, ClosednessReport,
};
use sgx::corpus::{enumerate_semigroups, CorpusError, DedupPolicy};
use sgx::lazy::{parse_family, LazyError};
use sgx::quotients::{rees_quotient, QuotientError};
use sgx::structure::StructureReport;
use sgx::table::{ElementSet, FiniteSemigroup, TableError};
use sgx::{Status, Subject};

/// Opaque handle to a validated finite semigroup.
pub struct SgxSemigroup {
    inner: FiniteSemigroup,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotAssociative = 4,
    OutOfRange = 5,
    NotAnIdeal = 6,
    NotCommutative = 7,
    UnknownFamily = 8,
    Domain = 9,
    Panic = 10,
}

/// Outcome of a decision procedure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgxVerdict {
    Holds = 0,
    Fails = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgxClaim {
    CClosed = 0,
    IdeallyClosed = 1,
    ProjectivelyClosed = 2,
    CenterNecessary = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    status: SgxStatus,
    message: String,
}

impl Failure {
    fn new(status: SgxStatus, message: impl ToString) -> Self {
        Failure {
            status,
            message: message.to_string(),
        }
    }

    fn null(what: &str) -> Self {
        Failure::new(SgxStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<TableError> for Failure {
    fn from(e: TableError) -> Self {
        let status = match e {
            TableError::NotAssociative { .. } => SgxStatus::NotAssociative,
            TableError::IndexOutOfRange { .. } | TableError::ElementOutOfRange { .. } | TableError::UnknownName(_) => {
                SgxStatus::OutOfRange
            }
            TableError::EmptyCarrier
            | TableError::NonSquare { .. }
            | TableError::DuplicateName(_)
            | TableError::Parse(_) => SgxStatus::Parse,
            _ => SgxStatus::Domain,
        };
        Failure::new(status, e)
    }
}

impl From<QuotientError> for Failure {
    fn from(e: QuotientError) -> Self {
        let status = match e {
            QuotientError::NotAnIdeal(_) => SgxStatus::NotAnIdeal,
            _ => SgxStatus::Domain,
        };
        Failure::new(status, e)
    }
}

impl From<LazyError> for Failure {
    fn from(e: LazyError) -> Self {
        let status = match e {
            LazyError::UnknownFamily(_) | LazyError::BadParameter(_) => SgxStatus::UnknownFamily,
            _ => SgxStatus::Domain,
        };
        Failure::new(status, e)
    }
}

impl From<ClosednessError> for Failure {
    fn from(e: ClosednessError) -> Self {
        Failure::new(SgxStatus::NotCommutative, e)
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::new(SgxStatus::Domain, e)
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `body`, turning errors and panics into a status code and recording
/// the message for `sgx_last_error`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SgxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            SgxStatus::Ok
        }
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(&format!("internal panic: {message}"));
            SgxStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(SgxStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a>(p: *const SgxSemigroup) -> Result<&'a FiniteSemigroup, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| Failure::null("semigroup"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn box_handle(s: FiniteSemigroup) -> *mut SgxSemigroup {
    Box::into_raw(Box::new(SgxSemigroup { inner: s }))
}

fn verdict_of(status: Status) -> SgxVerdict {
    match status {
        Status::Holds => SgxVerdict::Holds,
        Status::Fails => SgxVerdict::Fails,
        Status::Unknown => SgxVerdict::Unknown,
    }
}

fn decide_subject(subject: Subject<'_>, claim: SgxClaim, budget: u64) -> Result<ClosednessReport, Failure> {
    Ok(match claim {
        SgxClaim::CClosed => decide_c_closed_commutative(subject, budget)?,
        SgxClaim::IdeallyClosed => decide_ideally_closed_commutative(subject, budget)?,
        SgxClaim::ProjectivelyClosed => decide_projectively_closed_commutative(subject, budget)?,
        SgxClaim::CenterNecessary => audit_center_necessary(subject, budget),
    })
}

unsafe fn write_report(report: &ClosednessReport, verdict: *mut SgxVerdict, report_json: *mut *mut c_char) {
    *verdict = verdict_of(report.verdict.status);
    if !report_json.is_null() {
        *report_json = into_c_string(report.to_json());
    }
}

/// Parses a semigroup from the JSON (`{"names":[..],"table":[[..]]}`) or
/// plain-text table format and validates it.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgx_semigroup_from_json(text: *const c_char, out: *mut *mut SgxSemigroup) -> SgxStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let text = read_str(text, "text")?;
        let s = FiniteSemigroup::parse_any(text)?;
        *out = box_handle(s);
        Ok(())
    })
}

/// Builds a semigroup from a row-major `order * order` table with entries in
/// `0..order`. Elements are named `0`, `1`, ...
///
/// # Safety
/// `entries` must point to `order * order` readable values and `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgx_semigroup_from_table(
    order: usize,
    entries: *const usize,
    out: *mut *mut SgxSemigroup,
) -> SgxStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        if order == 0 {
            return Err(TableError::EmptyCarrier.into());
        }
        if entries.is_null() {
            return Err(Failure::null("entries"));
        }
        let cells = order
            .checked_mul(order)
            .ok_or_else(|| Failure::new(SgxStatus::Domain, "order too large"))?;
        let flat = std::slice::from_raw_parts(entries, cells);
        let rows = flat.chunks(order).map(|r| r.to_vec()).collect();
        *out = box_handle(FiniteSemigroup::from_rows(rows)?);
        Ok(())
    })
}

/// Releases a handle. Null is accepted.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sgx_semigroup_free(s: *mut SgxSemigroup) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sgx_semigroup_order(s: *const SgxSemigroup) -> usize {
    s.as_ref().map_or(0, |h| h.inner.order())
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgx_semigroup_product(
    s: *const SgxSemigroup,
    x: usize,
    y: usize,
    out: *mut usize,
) -> SgxStatus {
    guard(|| {
        let s = handle(s)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        for v in [x, y] {
            if v >= s.order() {
                return Err(TableError::ElementOutOfRange {
                    index: v,
                    order: s.order(),
                }
                .into());
            }
        }
        *out = s.mul(x, y);
        Ok(())
    })
}

/// Structure report (idempotents, order, H-classes, centers, ...) as JSON.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer. The string is
/// released with `sgx_string_free`.
#[no_mangle]
pub unsafe extern "C" fn sgx_semigroup_analyze_json(s: *const SgxSemigroup, out: *mut *mut c_char) -> SgxStatus {
    guard(|| {
        let s = handle(s)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let report = StructureReport::compute(s);
        let json = serde_json::to_string(&report).map_err(|e| Failure::new(SgxStatus::Domain, e))?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// Rees quotient by the ideal given as element indices. When `map` is not
/// null it receives the image of every element, so it needs room for
/// `sgx_semigroup_order(s)` values.
///
/// # Safety
/// `ideal` must point to `len` values (it may be null when `len` is 0) and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgx_semigroup_rees_quotient(
    s: *const SgxSemigroup,
    ideal: *const usize,
    len: usize,
    out: *mut *mut SgxSemigroup,
    map: *mut usize,
) -> SgxStatus {
    guard(|| {
        let s = handle(s)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let members: &[usize] = if len == 0 {
            &[]
        } else if ideal.is_null() {
            return Err(Failure::null("ideal"));
        } else {
            std::slice::from_raw_parts(ideal, len)
        };
        if let Some(&bad) = members.iter().find(|&&x| x >= s.order()) {
            return Err(TableError::ElementOutOfRange {
                index: bad,
                order: s.order(),
            }
            .into());
        }
        let set = ElementSet::from_indices(s.order(), members.iter().copied());
        let (q, images) = rees_quotient(s, &set)?;
        if !map.is_null() {
            std::slice::from_raw_parts_mut(map, images.len()).copy_from_slice(&images);
        }
        *out = box_handle(q);
        Ok(())
    })
}

/// Runs a decision procedure on a finite semigroup. `report_json` may be
/// null; otherwise it receives the full report.
///
/// # Safety
/// `s` must be a live handle, `verdict` a valid pointer and `report_json`
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn sgx_decide(
    s: *const SgxSemigroup,
    claim: SgxClaim,
    budget: u64,
    verdict: *mut SgxVerdict,
    report_json: *mut *mut c_char,
) -> SgxStatus {
    guard(|| {
        let s = handle(s)?;
        if verdict.is_null() {
            return Err(Failure::null("verdict"));
        }
        let report = decide_subject(Subject::Finite(s), claim, budget)?;
        write_report(&report, verdict, report_json);
        Ok(())
    })
}

/// Same as `sgx_decide` for a named family such as `quasicyclic:3`.
///
/// # Safety
/// `family` must be a NUL-terminated string, `verdict` a valid pointer and
/// `report_json` null or valid.
#[no_mangle]
pub unsafe extern "C" fn sgx_decide_family(
    family: *const c_char,
    claim: SgxClaim,
    budget: u64,
    verdict: *mut SgxVerdict,
    report_json: *mut *mut c_char,
) -> SgxStatus {
    guard(|| {
        let family = read_str(family, "family")?;
        if verdict.is_null() {
            return Err(Failure::null("verdict"));
        }
        let l = parse_family(family)?;
        let report = decide_subject(Subject::Lazy(&l), claim, budget)?;
        write_report(&report, verdict, report_json);
        Ok(())
    })
}

/// Number of semigroups of the given order up to isomorphism, or up to
/// isomorphism and anti-isomorphism when `iso_anti` is set. Order 5 needs
/// `allow_order_5`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgx_enumerate_count(
    order: usize,
    iso_anti: bool,
    allow_order_5: bool,
    out: *mut usize,
) -> SgxStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let policy = if iso_anti {
            DedupPolicy::IsoAnti
        } else {
            DedupPolicy::Iso
        };
        *out = enumerate_semigroups(order, policy, allow_order_5)?.len();
        Ok(())
    })
}

/// Message for the most recent failing call on this thread, or an empty
/// string. Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn sgx_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is accepted.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sgx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
