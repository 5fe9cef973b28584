//! C ABI over the verification engine, so other languages can bind.
//!
//! Schemes travel as JSON strings in the same shape the core crate
//! serializes; certificates cross the boundary either as JSON or as opaque
//! handles.  Every function returns an [`LpStatus`] with `LP_STATUS_OK`
//! equal to zero; on failure a thread-local message is recorded and stays
//! readable through [`lp_last_error`] until the next call on the same
//! thread.  Strings handed out through out-parameters are NUL-terminated,
//! owned by the caller, and released with [`lp_string_free`]; certificate
//! handles with [`lp_certificate_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use linepost::model::Scheme;
use linepost::oracle::{verify_empty, OracleConfig, Verdict};
use linepost::search::{
    search_certificate, verify_certificate, Certificate, SearchError, SearchPolicy,
};

/// Result of every ABI call.  Zero is success; everything else leaves a
/// message in [`lp_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The scheme JSON did not describe a scheme, or the claim is hopeless
    /// (negative surplus).
    BadScheme = 3,
    /// The oracle ran out of attempts without certifying the claim.
    Inconclusive = 4,
    /// No reduction tree was found within the search bounds.
    SearchFailed = 5,
    /// The certificate did not parse or failed its re-check.
    BadCertificate = 6,
    /// The oracle could not run at all (bad modulus, sampling exhausted).
    OracleFailure = 7,
    /// An internal panic was caught at the boundary.
    Panic = 8,
}

/// Outcome of a verification run.  `verified` is 1 or 0; on success
/// `prime`/`seed` identify the successful attempt and `rank == cols`; on
/// an inconclusive run `rank` is the best rank seen and `attempts` counts
/// the tries consumed.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LpVerdict {
    pub verified: u8,
    pub prime: u64,
    pub seed: u64,
    pub rank: u64,
    pub cols: u64,
    pub attempts: u32,
}

/// Opaque certificate handle.
pub struct LpCertificate {
    inner: Certificate,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).expect("NUL bytes were stripped");
    });
}

fn guarded(f: impl FnOnce() -> LpStatus) -> LpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            LpStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be NULL or point to a NUL-terminated string.
unsafe fn read_cstr<'a>(p: *const c_char) -> Result<&'a str, LpStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(LpStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|e| {
        set_error(e);
        LpStatus::InvalidUtf8
    })
}

fn parse_scheme(text: &str) -> Result<Scheme, LpStatus> {
    serde_json::from_str(text).map_err(|e| {
        set_error(format!("scheme JSON: {e}"));
        LpStatus::BadScheme
    })
}

/// Version of the library, as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread.  The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn lp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Run the oracle on the scheme described by `scheme_json` and fill
/// `out`.  Returns `LP_STATUS_OK` when the claim was certified.
///
/// # Safety
/// `scheme_json` must be a NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_verify_empty_json(
    scheme_json: *const c_char,
    prime: u64,
    seed: u64,
    retries: u32,
    out: *mut LpVerdict,
) -> LpStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return LpStatus::NullPointer;
        }
        let text = match read_cstr(scheme_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let scheme = match parse_scheme(text) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let cfg = OracleConfig {
            prime,
            seed,
            retries,
        };
        match verify_empty(&scheme, &cfg) {
            Ok(Verdict::Verified {
                prime,
                seed,
                rank,
                cols,
            }) => {
                *out = LpVerdict {
                    verified: 1,
                    prime,
                    seed,
                    rank,
                    cols,
                    attempts: 0,
                };
                LpStatus::Ok
            }
            Ok(Verdict::Inconclusive {
                best_rank,
                cols,
                attempts,
            }) => {
                *out = LpVerdict {
                    verified: 0,
                    prime: 0,
                    seed: 0,
                    rank: best_rank,
                    cols,
                    attempts,
                };
                set_error(format!(
                    "inconclusive: best rank {best_rank} of {cols} after {attempts} attempts"
                ));
                LpStatus::Inconclusive
            }
            Err(e) => {
                set_error(e);
                LpStatus::OracleFailure
            }
        }
    })
}

/// Search for a reduction certificate for the scheme described by
/// `scheme_json` and hand it back as an opaque handle in `out`.
///
/// # Safety
/// `scheme_json` must be a NUL-terminated string and `out` a valid
/// pointer; the returned handle must be released with
/// `lp_certificate_free`.
#[no_mangle]
pub unsafe extern "C" fn lp_search_json(
    scheme_json: *const c_char,
    prime: u64,
    seed: u64,
    retries: u32,
    out: *mut *mut LpCertificate,
) -> LpStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return LpStatus::NullPointer;
        }
        let text = match read_cstr(scheme_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let scheme = match parse_scheme(text) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let policy = SearchPolicy {
            oracle: OracleConfig {
                prime,
                seed,
                retries,
            },
            ..SearchPolicy::default()
        };
        match search_certificate(&scheme, &policy) {
            Ok(cert) => {
                *out = Box::into_raw(Box::new(LpCertificate { inner: cert }));
                LpStatus::Ok
            }
            Err(e @ SearchError::NegativeSurplus { .. }) => {
                set_error(e);
                LpStatus::BadScheme
            }
            Err(e @ SearchError::Exhausted { .. }) => {
                set_error(e);
                LpStatus::SearchFailed
            }
            Err(SearchError::Oracle(e)) => {
                set_error(e);
                LpStatus::OracleFailure
            }
        }
    })
}

/// Parse a certificate from JSON into an opaque handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer; the
/// returned handle must be released with `lp_certificate_free`.
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_from_json(
    json: *const c_char,
    out: *mut *mut LpCertificate,
) -> LpStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return LpStatus::NullPointer;
        }
        let text = match read_cstr(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Certificate::from_json_str(text) {
            Ok(cert) => {
                *out = Box::into_raw(Box::new(LpCertificate { inner: cert }));
                LpStatus::Ok
            }
            Err(e) => {
                set_error(e);
                LpStatus::BadCertificate
            }
        }
    })
}

/// Serialize a certificate to its canonical JSON; the string is owned by
/// the caller and released with `lp_string_free`.
///
/// # Safety
/// `cert` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_to_json(
    cert: *const LpCertificate,
    out: *mut *mut c_char,
) -> LpStatus {
    guarded(|| {
        if cert.is_null() || out.is_null() {
            set_error("null pointer argument");
            return LpStatus::NullPointer;
        }
        let json = (*cert).inner.to_json_string();
        let c = CString::new(json).expect("JSON never contains NUL");
        *out = c.into_raw();
        LpStatus::Ok
    })
}

/// Re-check a certificate from scratch, replaying its oracle leaves.
///
/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_verify(cert: *const LpCertificate) -> LpStatus {
    guarded(|| {
        if cert.is_null() {
            set_error("null certificate handle");
            return LpStatus::NullPointer;
        }
        match verify_certificate(&(*cert).inner) {
            Ok(()) => LpStatus::Ok,
            Err(e) => {
                set_error(e);
                LpStatus::BadCertificate
            }
        }
    })
}

/// Number of nodes in the certificate; 0 for a NULL handle.
///
/// # Safety
/// `cert` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_node_count(cert: *const LpCertificate) -> u64 {
    if cert.is_null() {
        return 0;
    }
    (*cert).inner.nodes.len() as u64
}

/// Release a certificate handle.  NULL is a no-op.
///
/// # Safety
/// `cert` must be NULL or a handle produced by this library, and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_free(cert: *mut LpCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Release a string produced by this library.  NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string produced by this library, and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
