use std::ffi::{c_char, CStr, CString};
use std::ptr;

use sgx_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sgx_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn parse(text: &str) -> Result<*mut SgxSemigroup, SgxStatus> {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { sgx_semigroup_from_json(c.as_ptr(), &mut out) } {
        SgxStatus::Ok => Ok(out),
        status => Err(status),
    }
}

fn take(s: *mut c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { sgx_string_free(s) };
    text
}

fn chain3() -> *mut SgxSemigroup {
    let entries: [usize; 9] = [0, 0, 0, 0, 1, 1, 0, 1, 2];
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { sgx_semigroup_from_table(3, entries.as_ptr(), &mut out) },
        SgxStatus::Ok
    );
    out
}

#[test]
fn build_and_query() {
    let s = chain3();
    assert_eq!(unsafe { sgx_semigroup_order(s) }, 3);
    let mut p = 0;
    assert_eq!(unsafe { sgx_semigroup_product(s, 2, 1, &mut p) }, SgxStatus::Ok);
    assert_eq!(p, 1);
    assert_eq!(unsafe { sgx_semigroup_product(s, 3, 1, &mut p) }, SgxStatus::OutOfRange);
    assert!(last_error().contains("outside"));
    unsafe { sgx_semigroup_free(s) };
    assert_eq!(unsafe { sgx_semigroup_order(ptr::null()) }, 0);
    unsafe { sgx_semigroup_free(ptr::null_mut()) };
}

#[test]
fn parse_errors_map_to_status_codes() {
    assert_eq!(
        parse(r#"{"names":["a","b"],"table":[[1,0],[0,0]]}"#).unwrap_err(),
        SgxStatus::NotAssociative
    );
    assert_eq!(
        parse(r#"{"names":["a"],"table":[[3]]}"#).unwrap_err(),
        SgxStatus::OutOfRange
    );
    assert_eq!(parse("not a table").unwrap_err(), SgxStatus::Parse);
    assert!(!last_error().is_empty());

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { sgx_semigroup_from_json(ptr::null(), &mut out) },
        SgxStatus::NullPointer
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { sgx_semigroup_from_json(bad.as_ptr() as *const c_char, &mut out) },
        SgxStatus::InvalidUtf8
    );
    assert_eq!(
        unsafe { sgx_semigroup_from_table(0, ptr::null(), &mut out) },
        SgxStatus::Parse
    );

    let s = parse(r#"{"names":["a","0"],"table":[[1,1],[1,1]]}"#).unwrap();
    assert_eq!(last_error(), "");
    unsafe { sgx_semigroup_free(s) };
}

#[test]
fn analyze_returns_json() {
    let s = parse(r#"{"names":["a","0"],"table":[[1,1],[1,1]]}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sgx_semigroup_analyze_json(s, &mut out) }, SgxStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["idempotents"], serde_json::json!(["0"]));
    assert_eq!(v["b_set"], serde_json::json!(["0"]));
    unsafe { sgx_semigroup_free(s) };
}

#[test]
fn rees_quotient() {
    let s = chain3();
    let ideal = [0usize, 1];
    let mut q = ptr::null_mut();
    let mut map = [usize::MAX; 3];
    let status = unsafe { sgx_semigroup_rees_quotient(s, ideal.as_ptr(), 2, &mut q, map.as_mut_ptr()) };
    assert_eq!(status, SgxStatus::Ok);
    assert_eq!(unsafe { sgx_semigroup_order(q) }, 2);
    assert_eq!(map, [1, 1, 0]);
    unsafe { sgx_semigroup_free(q) };

    let not_ideal = [1usize];
    let status = unsafe { sgx_semigroup_rees_quotient(s, not_ideal.as_ptr(), 1, &mut q, ptr::null_mut()) };
    assert_eq!(status, SgxStatus::NotAnIdeal);
    let status = unsafe { sgx_semigroup_rees_quotient(s, ptr::null(), 0, &mut q, ptr::null_mut()) };
    assert_eq!(status, SgxStatus::Ok);
    assert_eq!(unsafe { sgx_semigroup_order(q) }, 3);
    unsafe { sgx_semigroup_free(q) };
    unsafe { sgx_semigroup_free(s) };
}

#[test]
fn decide_finite() {
    let s = chain3();
    let mut verdict = SgxVerdict::Unknown;
    let mut report = ptr::null_mut();
    let status = unsafe { sgx_decide(s, SgxClaim::CClosed, 256, &mut verdict, &mut report) };
    assert_eq!(status, SgxStatus::Ok);
    assert_eq!(verdict, SgxVerdict::Holds);
    let v: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
    assert_eq!(v["claim"], "c_closed");
    unsafe { sgx_semigroup_free(s) };

    let l2 = parse("2\n0 0\n1 1\n").unwrap();
    let status = unsafe { sgx_decide(l2, SgxClaim::CClosed, 256, &mut verdict, ptr::null_mut()) };
    assert_eq!(status, SgxStatus::NotCommutative);
    let status = unsafe { sgx_decide(l2, SgxClaim::CenterNecessary, 256, &mut verdict, ptr::null_mut()) };
    assert_eq!(status, SgxStatus::Ok);
    assert_eq!(verdict, SgxVerdict::Holds);
    unsafe { sgx_semigroup_free(l2) };
}

#[test]
fn decide_families() {
    let decide = |family: &str, claim: SgxClaim, budget: u64| {
        let c = CString::new(family).unwrap();
        let mut verdict = SgxVerdict::Unknown;
        let status = unsafe { sgx_decide_family(c.as_ptr(), claim, budget, &mut verdict, ptr::null_mut()) };
        (status, verdict)
    };
    assert_eq!(
        decide("quasicyclic:2", SgxClaim::CClosed, 256),
        (SgxStatus::Ok, SgxVerdict::Fails)
    );
    assert_eq!(
        decide("bounded_boolean", SgxClaim::ProjectivelyClosed, 256),
        (SgxStatus::Ok, SgxVerdict::Holds)
    );
    assert_eq!(
        decide("infinite_null", SgxClaim::IdeallyClosed, 256),
        (SgxStatus::Ok, SgxVerdict::Fails)
    );
    assert_eq!(
        decide("naturals_plus", SgxClaim::CClosed, 0),
        (SgxStatus::Ok, SgxVerdict::Unknown)
    );
    assert_eq!(decide("integers", SgxClaim::CClosed, 256).0, SgxStatus::UnknownFamily);
    assert_eq!(decide("quasicyclic:6", SgxClaim::CClosed, 256).0, SgxStatus::Domain);
}

#[test]
fn enumerate_counts() {
    let count = |n: usize, anti: bool, allow: bool| {
        let mut out = 0;
        let status = unsafe { sgx_enumerate_count(n, anti, allow, &mut out) };
        (status, out)
    };
    for (n, iso, anti) in [(1, 1, 1), (2, 5, 4), (3, 24, 18), (4, 188, 126)] {
        assert_eq!(count(n, false, false), (SgxStatus::Ok, iso));
        assert_eq!(count(n, true, false), (SgxStatus::Ok, anti));
    }
    assert_eq!(count(5, false, false).0, SgxStatus::Domain);
}

#[test]
fn errors_are_thread_local() {
    assert_eq!(parse("garbage").unwrap_err(), SgxStatus::Parse);
    let other = std::thread::spawn(last_error).join().unwrap();
    assert_eq!(other, "");
    assert!(!last_error().is_empty());
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sgx.h")).unwrap();
    assert!(header.contains("#ifndef SGX_FFI_H"));
    assert!(header.contains("typedef struct SgxSemigroup SgxSemigroup;"));
    for name in [
        "sgx_semigroup_from_json",
        "sgx_semigroup_from_table",
        "sgx_semigroup_free",
        "sgx_semigroup_order",
        "sgx_semigroup_product",
        "sgx_semigroup_analyze_json",
        "sgx_semigroup_rees_quotient",
        "sgx_decide",
        "sgx_decide_family",
        "sgx_enumerate_count",
        "sgx_last_error",
        "sgx_string_free",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name}");
    }
    for constant in [
        "SGX_STATUS_OK = 0",
        "SGX_STATUS_PANIC = 10",
        "SGX_VERDICT_UNKNOWN = 2",
        "SGX_CLAIM_CENTER_NECESSARY = 3",
    ] {
        assert!(header.contains(constant), "{constant}");
    }
}
