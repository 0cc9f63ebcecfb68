//! C interface: opaque instance and chain handles, JSON in and out, integer status codes.
//!
//! Every function returns a [`PotlineStatus`]. On failure the message is available from
//! [`potline_last_error`] on the same thread. Strings returned through out-pointers are owned
//! by the caller and must be released with [`potline_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use potline::cli::{default_algo, explain, generate_json, parse_instance, query, solve_instance, SolveArgs};
use potline::generators::{GenKind, GenSpec};
use potline::problems::{Certificate, Verdict};
use potline::reductions::chain::{parse_chain, Chain, Instance};
use potline::PotlineError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotlineStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Arith = 4,
    VariantMismatch = 5,
    OffGrid = 6,
    Dimension = 7,
    Exhausted = 8,
    BudgetExceeded = 9,
    BadChain = 10,
    TrivialInstance = 11,
    UnmappableCert = 12,
    NoKappa = 13,
    Io = 14,
    Rejected = 15,
    Panic = 16,
}

/// Opaque problem instance.
pub struct PotlineInstance {
    inner: Instance,
}

/// Opaque composition of reductions.
pub struct PotlineChain {
    inner: Chain,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &PotlineError) -> PotlineStatus {
    match e {
        PotlineError::Parse(_) => PotlineStatus::Parse,
        PotlineError::Arith(_) => PotlineStatus::Arith,
        PotlineError::VariantMismatch { .. } => PotlineStatus::VariantMismatch,
        PotlineError::OffGrid(_) => PotlineStatus::OffGrid,
        PotlineError::Dimension(_) => PotlineStatus::Dimension,
        PotlineError::Exhausted(_) => PotlineStatus::Exhausted,
        PotlineError::BudgetExceeded { .. } => PotlineStatus::BudgetExceeded,
        PotlineError::BadChain(_) => PotlineStatus::BadChain,
        PotlineError::TrivialInstance(_) => PotlineStatus::TrivialInstance,
        PotlineError::UnmappableCert(_) => PotlineStatus::UnmappableCert,
        PotlineError::NoKappa(_) => PotlineStatus::NoKappa,
        PotlineError::Io(_) => PotlineStatus::Io,
    }
}

struct Fail(PotlineStatus, String);

impl From<PotlineError> for Fail {
    fn from(e: PotlineError) -> Self {
        let msg = match &e {
            PotlineError::TrivialInstance(c) => serde_json::to_string(c).unwrap_or_else(|_| e.to_string()),
            _ => e.to_string(),
        };
        Fail(status_of(&e), msg)
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(PotlineStatus::Parse, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PotlineStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PotlineStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            PotlineStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(PotlineStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(PotlineStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(PotlineStatus::NullArgument, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(PotlineStatus::NullArgument, format!("{what} is null")))
}

fn owned(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(PotlineStatus::Parse, "interior NUL".into()))
}

/// Message of the last failed call on this thread; empty after a success. Owned by the library.
#[no_mangle]
pub extern "C" fn potline_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn potline_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses instance JSON. `problem` is `plcp`, `uso`, `contraction`, `opdc`, `line` or a line flavor.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn potline_instance_from_json(
    problem: *const c_char,
    json: *const c_char,
    out_instance: *mut *mut PotlineInstance,
) -> PotlineStatus {
    guard(|| {
        let problem = text(problem, "problem")?;
        let v: serde_json::Value = serde_json::from_str(text(json, "json")?)?;
        let slot = out(out_instance, "out_instance")?;
        let inner = parse_instance(problem, v)?;
        *slot = Box::into_raw(Box::new(PotlineInstance { inner }));
        Ok(())
    })
}

/// Releases an instance handle.
///
/// # Safety
/// `inst` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn potline_instance_free(inst: *mut PotlineInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Writes a seeded instance as JSON. `kind` is e.g. `p-matrix-lcp` or `explicit-line`.
///
/// # Safety
/// `kind` must be NUL-terminated; out-pointers must be writable. `out_problem` may be null.
#[no_mangle]
pub unsafe extern "C" fn potline_generate(
    kind: *const c_char,
    size: usize,
    seed: u64,
    broken: bool,
    out_problem: *mut *mut c_char,
    out_json: *mut *mut c_char,
) -> PotlineStatus {
    guard(|| {
        let kind = text(kind, "kind")?;
        let kind: GenKind = serde_json::from_value(serde_json::Value::String(kind.to_string()))
            .map_err(|_| Fail(PotlineStatus::Parse, format!("unknown kind {kind:?}")))?;
        let slot = out(out_json, "out_json")?;
        let mut spec = GenSpec::new(kind, size, seed);
        spec.broken = broken;
        let (problem, v) = generate_json(&spec)?;
        *slot = owned(serde_json::to_string(&v)?)?;
        if let Some(p) = out_problem.as_mut() {
            *p = owned(problem)?;
        }
        Ok(())
    })
}

/// Runs `algo` (`lemke`, `brute`, `follow`, `aldous`, `find_fp`, `approx`, or null for the default)
/// and writes the verified certificate as JSON.
///
/// # Safety
/// `inst` must be a live handle; `algo` null or NUL-terminated; `out_cert` writable.
#[no_mangle]
pub unsafe extern "C" fn potline_solve(
    inst: *mut PotlineInstance,
    algo: *const c_char,
    seed: u64,
    out_cert: *mut *mut c_char,
) -> PotlineStatus {
    guard(|| {
        let h = inst.as_mut().ok_or_else(|| Fail(PotlineStatus::NullArgument, "instance is null".into()))?;
        let slot = out(out_cert, "out_cert")?;
        let algo = if algo.is_null() { default_algo(&h.inner).to_string() } else { text(algo, "algo")?.to_string() };
        let opts = SolveArgs {
            file: PathBuf::new(),
            problem: String::new(),
            algo: Some(algo.clone()),
            p: None,
            eps: None,
            samples: 64,
            seed,
            max_steps: None,
            no_timing: true,
            output: None,
        };
        let solved = solve_instance(&mut h.inner, &algo, &opts)?;
        if let Verdict::Reject(why) = explain(&h.inner, &solved.cert)? {
            return Err(Fail(PotlineStatus::Rejected, why));
        }
        *slot = owned(serde_json::to_string(&solved.cert)?)?;
        Ok(())
    })
}

/// Checks a certificate. Returns `Ok` on acceptance and `Rejected` with the failed clause otherwise.
///
/// # Safety
/// `inst` must be a live handle and `cert_json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn potline_verify(inst: *const PotlineInstance, cert_json: *const c_char) -> PotlineStatus {
    guard(|| {
        let h = handle(inst, "instance")?;
        let cert: Certificate = serde_json::from_str(text(cert_json, "cert_json")?)?;
        match explain(&h.inner, &cert)? {
            Verdict::Accept => Ok(()),
            Verdict::Reject(why) => Err(Fail(PotlineStatus::Rejected, why)),
        }
    })
}

/// One oracle call, e.g. `"S 0101"`, `"V 0000"` or `"D 1 11"`.
///
/// # Safety
/// `inst` must be a live handle, `q` NUL-terminated and `out_answer` writable.
#[no_mangle]
pub unsafe extern "C" fn potline_query(
    inst: *const PotlineInstance,
    q: *const c_char,
    out_answer: *mut *mut c_char,
) -> PotlineStatus {
    guard(|| {
        let h = handle(inst, "instance")?;
        let words: Vec<String> = text(q, "query")?.split_whitespace().map(str::to_string).collect();
        if !(2..=3).contains(&words.len()) {
            return Err(Fail(PotlineStatus::Parse, "query needs an operation and one or two arguments".into()));
        }
        let slot = out(out_answer, "out_answer")?;
        *slot = owned(query(&h.inner, &words)?)?;
        Ok(())
    })
}

/// Applies the reductions of `chain` (e.g. `plcp:uso:opdc`) to a copy of `src`.
/// On `TrivialInstance` the last error holds the source certificate as JSON.
///
/// # Safety
/// `src` must be a live handle, `chain` NUL-terminated and `out_chain` writable.
#[no_mangle]
pub unsafe extern "C" fn potline_chain_build(
    src: *const PotlineInstance,
    chain: *const c_char,
    out_chain: *mut *mut PotlineChain,
) -> PotlineStatus {
    guard(|| {
        let h = handle(src, "source")?;
        let nodes = parse_chain(text(chain, "chain")?)?;
        let slot = out(out_chain, "out_chain")?;
        let inner = Chain::build(&nodes, h.inner.clone())?;
        *slot = Box::into_raw(Box::new(PotlineChain { inner }));
        Ok(())
    })
}

/// New instance handle for the last instance of the chain.
///
/// # Safety
/// `chain` must be a live handle and `out_instance` writable.
#[no_mangle]
pub unsafe extern "C" fn potline_chain_target(
    chain: *const PotlineChain,
    out_instance: *mut *mut PotlineInstance,
) -> PotlineStatus {
    guard(|| {
        let h = handle(chain, "chain")?;
        let slot = out(out_instance, "out_instance")?;
        *slot = Box::into_raw(Box::new(PotlineInstance { inner: h.inner.target().clone() }));
        Ok(())
    })
}

/// Maps a certificate of the chain target back to the chain source.
///
/// # Safety
/// `chain` must be a live handle, `cert_json` NUL-terminated and `out_cert` writable.
#[no_mangle]
pub unsafe extern "C" fn potline_chain_map_back(
    chain: *const PotlineChain,
    cert_json: *const c_char,
    out_cert: *mut *mut c_char,
) -> PotlineStatus {
    guard(|| {
        let h = handle(chain, "chain")?;
        let cert: Certificate = serde_json::from_str(text(cert_json, "cert_json")?)?;
        let slot = out(out_cert, "out_cert")?;
        let back = h.inner.map_back(&cert)?;
        *slot = owned(serde_json::to_string(&back)?)?;
        Ok(())
    })
}

/// Releases a chain handle.
///
/// # Safety
/// `chain` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn potline_chain_free(chain: *mut PotlineChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn potline_status_name(s: PotlineStatus) -> *const c_char {
    let name: &'static CStr = match s {
        PotlineStatus::Ok => c"ok",
        PotlineStatus::NullArgument => c"null argument",
        PotlineStatus::InvalidUtf8 => c"invalid utf-8",
        PotlineStatus::Parse => c"parse error",
        PotlineStatus::Arith => c"arithmetic error",
        PotlineStatus::VariantMismatch => c"variant mismatch",
        PotlineStatus::OffGrid => c"off grid",
        PotlineStatus::Dimension => c"dimension mismatch",
        PotlineStatus::Exhausted => c"step budget exhausted",
        PotlineStatus::BudgetExceeded => c"enumeration budget exceeded",
        PotlineStatus::BadChain => c"bad chain",
        PotlineStatus::TrivialInstance => c"trivial instance",
        PotlineStatus::UnmappableCert => c"unmappable certificate",
        PotlineStatus::NoKappa => c"no kappa",
        PotlineStatus::Io => c"i/o error",
        PotlineStatus::Rejected => c"rejected",
        PotlineStatus::Panic => c"panic",
    };
    name.as_ptr()
}
