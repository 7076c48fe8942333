//! C ABI over the `bistellar` library.
//!
//! Complexes cross the boundary as opaque [`BstComplex`] handles; moves,
//! sequences and geometric complexes cross as JSON strings in the library's
//! file formats. Every function returns a [`BstStatus`]; on failure the
//! message is available from [`bst_last_error`] on the same thread.
//! Strings returned through `char **` are owned by the caller and released
//! with [`bst_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bistellar::geometry::GeomComplex;
use bistellar::io::GeomComplexFile;
use bistellar::pachner::{apply_in_place, MoveSequence, PachnerMove};
use bistellar::reduction::{relate, ReduceOptions};
use bistellar::subdivision::{barycentric, DEFAULT_SIMPLEX_CAP};
use bistellar::{find_isomorphism, Complex, Error, ExitCode};

/// Result codes. The first four match the command line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BstStatus {
    Ok = 0,
    /// An invariant or verification check failed.
    Invariant = 1,
    /// Malformed or inconsistent input.
    Input = 2,
    ResourceCap = 3,
    NullPointer = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Opaque handle to a simplicial complex.
pub struct BstComplex {
    inner: Complex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BstStatus {
    match e.exit_code() {
        ExitCode::Success => BstStatus::Ok,
        ExitCode::Invariant => BstStatus::Invariant,
        ExitCode::Input => BstStatus::Input,
        ExitCode::ResourceCap => BstStatus::ResourceCap,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail::Lib(e.into())
    }
}

/// Runs `f`, translating errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BstStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BstStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("{what} is null"));
            BstStatus::NullPointer
        }
        Err(_) => {
            set_error("panic inside the library");
            BstStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Lib(Error::Input(format!("{what} is not UTF-8"))))
}

unsafe fn out<T>(p: *mut T, what: &'static str, value: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn out_string(p: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Lib(Error::Input("interior NUL in output".into())))?;
    out(p, "out", c.into_raw())
}

fn handle(k: Complex) -> *mut BstComplex {
    Box::into_raw(Box::new(BstComplex { inner: k }))
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bst_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bst_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a complex from the JSON complex format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_from_json(json: *const c_char, out_handle: *mut *mut BstComplex) -> BstStatus {
    guard(|| {
        let k: Complex = serde_json::from_str(text(json, "json")?)?;
        out(out_handle, "out", handle(k))
    })
}

/// # Safety
/// `k` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_free(k: *mut BstComplex) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_to_json(k: *const BstComplex, out_json: *mut *mut c_char) -> BstStatus {
    guard(|| {
        let k = borrow(k, "complex")?;
        out_string(out_json, serde_json::to_string(&k.inner)?)
    })
}

/// Hex SHA-256 of the canonical serialization.
///
/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_digest(k: *const BstComplex, out_hex: *mut *mut c_char) -> BstStatus {
    guard(|| out_string(out_hex, borrow(k, "complex")?.inner.digest()))
}

/// Dimension, or −1 for the empty complex.
///
/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_dimension(k: *const BstComplex, out_dim: *mut i32) -> BstStatus {
    guard(|| {
        let d = borrow(k, "complex")?.inner.dimension().map_or(-1, |d| d as i32);
        out(out_dim, "out", d)
    })
}

/// Writes up to `len` entries of the f-vector to `buf` and the full length
/// to `needed`.
///
/// # Safety
/// `k` must be a live handle; `buf` must hold `len` values (or be null when
/// `len` is 0); `needed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_f_vector(
    k: *const BstComplex,
    buf: *mut u64,
    len: usize,
    needed: *mut usize,
) -> BstStatus {
    guard(|| {
        let f = borrow(k, "complex")?.inner.f_vector();
        if len > 0 {
            if buf.is_null() {
                return Err(Fail::Null("buf"));
            }
            ptr::copy_nonoverlapping(f.as_ptr(), buf, len.min(f.len()));
        }
        out(needed, "needed", f.len())
    })
}

/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_euler_characteristic(k: *const BstComplex, out_chi: *mut i64) -> BstStatus {
    guard(|| out(out_chi, "out", borrow(k, "complex")?.inner.euler_characteristic()))
}

/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_complex_is_closed_pseudomanifold(k: *const BstComplex, out_flag: *mut bool) -> BstStatus {
    guard(|| out(out_flag, "out", borrow(k, "complex")?.inner.is_closed_pseudomanifold()))
}

/// Barycentric subdivision as a new handle.
///
/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_barycentric(k: *const BstComplex, out_handle: *mut *mut BstComplex) -> BstStatus {
    guard(|| {
        let b = barycentric(&borrow(k, "complex")?.inner).complex;
        out(out_handle, "out", handle(b))
    })
}

/// Applies one move `{"A": [...], "B": [...]}` in place. The complex is left
/// unchanged when the move is not applicable.
///
/// # Safety
/// `k` must be a live handle not shared with another thread; `move_json`
/// must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bst_apply_move(k: *mut BstComplex, move_json: *const c_char) -> BstStatus {
    guard(|| {
        let k = k.as_mut().ok_or(Fail::Null("complex"))?;
        let mv: PachnerMove = serde_json::from_str(text(move_json, "move")?)?;
        apply_in_place(&mut k.inner, &PachnerMove::new(mv.a, mv.b))?;
        Ok(())
    })
}

/// Replays a sequence file on `k`, checking both digests, and returns the
/// end complex as a new handle.
///
/// # Safety
/// `k` must be a live handle; `seq_json` a NUL-terminated string; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bst_replay_sequence(
    k: *const BstComplex,
    seq_json: *const c_char,
    out_handle: *mut *mut BstComplex,
) -> BstStatus {
    guard(|| {
        let seq: MoveSequence = serde_json::from_str(text(seq_json, "sequence")?)?;
        let end = seq.replay(&borrow(k, "complex")?.inner)?;
        out(out_handle, "out", handle(end))
    })
}

/// Whether the two complexes are isomorphic.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_isomorphic(a: *const BstComplex, b: *const BstComplex, out_flag: *mut bool) -> BstStatus {
    guard(|| {
        let iso = find_isomorphism(&borrow(a, "a")?.inner, &borrow(b, "b")?.inner);
        out(out_flag, "out", iso.is_some())
    })
}

/// Relates two triangulations of one flat torus, given in the geometric
/// complex format. Writes the verified sequence `βK1 → βK2` as JSON and the
/// start complex `βK1` as a new handle.
///
/// # Safety
/// `k1_json` and `k2_json` must be NUL-terminated strings; the outputs must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_relate(
    k1_json: *const c_char,
    k2_json: *const c_char,
    out_sequence: *mut *mut c_char,
    out_start: *mut *mut BstComplex,
) -> BstStatus {
    guard(|| {
        let read = |s: &str| -> Result<GeomComplex, Fail> {
            Ok(serde_json::from_str::<GeomComplexFile>(s)?.try_into()?)
        };
        let k1 = read(text(k1_json, "k1")?)?;
        let k2 = read(text(k2_json, "k2")?)?;
        if out_sequence.is_null() || out_start.is_null() {
            return Err(Fail::Null("out"));
        }
        let rel = relate(&k1, &k2, &ReduceOptions::default(), DEFAULT_SIMPLEX_CAP)?;
        out_string(out_sequence, serde_json::to_string(&rel.sequence)?)?;
        out(out_start, "out", handle(rel.start))
    })
}

/// `2^n (n+1)!^{4+3m′} p q (p+q)` as a decimal string.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bst_total_bound(n: u32, p: u64, q: u64, mprime: u64, out_decimal: *mut *mut c_char) -> BstStatus {
    guard(|| out_string(out_decimal, bistellar::bounds::total_bound(n as usize, p, q, mprime).to_string()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn bst_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
