//! C interface to `wtakit`.
//!
//! Automata live behind the opaque `WtakitWta` handle. Every fallible call
//! returns a `WtakitStatus`; on failure the message is available from
//! [`wtakit_last_error`] on the same thread until the next call. Weights,
//! trees and automata cross the boundary as NUL-terminated UTF-8 text and
//! strings handed out by the library are released with [`wtakit_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use wtakit::constructions::{hadamard_wta, sum_wta};
use wtakit::error::Error;
use wtakit::jointred::{decide_equiv, Verdict};
use wtakit::simulation::check_simulation;
use wtakit::text::{parse_matrix, parse_wta, print_wta};
use wtakit::{Tree, Wta};

/// Opaque weighted tree automaton.
pub struct WtakitWta {
    inner: Wta,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtakitStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Input = 4,
    Capability = 5,
    Precondition = 6,
    Shape = 7,
    Budget = 8,
    Failed = 9,
    Panic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> WtakitStatus {
    match e {
        Error::Parse { .. } => WtakitStatus::Parse,
        Error::Input(_) | Error::Tree(_) => WtakitStatus::Input,
        Error::Capability { .. } => WtakitStatus::Capability,
        Error::Precondition(_) => WtakitStatus::Precondition,
        Error::Shape(_) => WtakitStatus::Shape,
        Error::Budget(_) => WtakitStatus::Budget,
        _ => WtakitStatus::Failed,
    }
}

struct Fail(WtakitStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WtakitStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WtakitStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            set_error(format!("panic: {msg}"));
            WtakitStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(WtakitStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(WtakitStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn wta<'a>(p: *const WtakitWta, what: &str) -> Result<&'a Wta, Fail> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Fail(WtakitStatus::NullArgument, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail(WtakitStatus::NullArgument, format!("{what} is null")))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior NUL").into_raw()
}

fn handle(m: Wta) -> *mut WtakitWta {
    Box::into_raw(Box::new(WtakitWta { inner: m }))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn wtakit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wtakit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an automaton from its text format.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out_wta` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_parse(source: *const c_char, out_wta: *mut *mut WtakitWta) -> WtakitStatus {
    guard(|| {
        let slot = out(out_wta, "out_wta")?;
        *slot = ptr::null_mut();
        *slot = handle(parse_wta(text(source, "source")?)?);
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_free(m: *mut WtakitWta) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Canonical text of `m`; free with [`wtakit_string_free`].
///
/// # Safety
/// `m` must be a live handle and `out_text` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_print(m: *const WtakitWta, out_text: *mut *mut c_char) -> WtakitStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = owned(print_wta(wta(m, "m")?));
        Ok(())
    })
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_num_states(m: *const WtakitWta) -> usize {
    m.as_ref().map_or(0, |h| h.inner.num_states())
}

/// Weight of `tree` (written like `sigma(alpha, alpha)`), as text.
///
/// # Safety
/// `m` must be a live handle, `tree` a NUL-terminated string and
/// `out_weight` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_eval(
    m: *const WtakitWta,
    tree: *const c_char,
    out_weight: *mut *mut c_char,
) -> WtakitStatus {
    guard(|| {
        let slot = out(out_weight, "out_weight")?;
        let m = wta(m, "m")?;
        let t: Tree = text(tree, "tree")?.parse()?;
        *slot = owned(m.eval(&t)?.to_string());
        Ok(())
    })
}

unsafe fn binary(
    a: *const WtakitWta,
    b: *const WtakitWta,
    out_wta: *mut *mut WtakitWta,
    op: fn(&Wta, &Wta) -> wtakit::error::Result<Wta>,
) -> WtakitStatus {
    guard(|| {
        let slot = out(out_wta, "out_wta")?;
        *slot = ptr::null_mut();
        *slot = handle(op(wta(a, "a")?, wta(b, "b")?)?);
        Ok(())
    })
}

/// Disjoint sum; the result recognizes the pointwise sum of the series.
///
/// # Safety
/// `a`, `b` must be live handles and `out_wta` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_sum(
    a: *const WtakitWta,
    b: *const WtakitWta,
    out_wta: *mut *mut WtakitWta,
) -> WtakitStatus {
    binary(a, b, out_wta, sum_wta)
}

/// Product construction for the pointwise product of the series.
///
/// # Safety
/// `a`, `b` must be live handles and `out_wta` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_hadamard(
    a: *const WtakitWta,
    b: *const WtakitWta,
    out_wta: *mut *mut WtakitWta,
) -> WtakitStatus {
    binary(a, b, out_wta, hadamard_wta)
}

/// Removes states that are not both reachable and useful.
///
/// # Safety
/// `m` must be a live handle and `out_wta` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wtakit_wta_trim(m: *const WtakitWta, out_wta: *mut *mut WtakitWta) -> WtakitStatus {
    guard(|| {
        let slot = out(out_wta, "out_wta")?;
        *slot = ptr::null_mut();
        *slot = handle(wta(m, "m")?.trim().0);
        Ok(())
    })
}

/// Checks whether `matrix` (rows over the states of `m`, columns over those
/// of `n`) is a simulation of `m` by `n`.
///
/// # Safety
/// `m`, `n` must be live handles, `matrix` a NUL-terminated string and
/// `out_holds` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wtakit_check_simulation(
    m: *const WtakitWta,
    n: *const WtakitWta,
    matrix: *const c_char,
    out_holds: *mut bool,
) -> WtakitStatus {
    guard(|| {
        let slot = out(out_holds, "out_holds")?;
        let (m, n) = (wta(m, "m")?, wta(n, "n")?);
        let x = parse_matrix(text(matrix, "matrix")?, m.states(), n.states(), m.semiring())?;
        *slot = check_simulation(m, n, &x)?.holds();
        Ok(())
    })
}

/// Decides whether `a` and `b` recognize the same series. When they do not
/// and a distinguishing tree was found, `*out_witness` receives it
/// (free with [`wtakit_string_free`]); otherwise it is set to null.
/// `out_witness` itself may be null.
///
/// # Safety
/// `a`, `b` must be live handles, `out_equivalent` a writable pointer and
/// `out_witness` null or writable.
#[no_mangle]
pub unsafe extern "C" fn wtakit_equiv(
    a: *const WtakitWta,
    b: *const WtakitWta,
    out_equivalent: *mut bool,
    out_witness: *mut *mut c_char,
) -> WtakitStatus {
    guard(|| {
        if let Some(w) = out_witness.as_mut() {
            *w = ptr::null_mut();
        }
        let slot = out(out_equivalent, "out_equivalent")?;
        let result = decide_equiv(wta(a, "a")?, wta(b, "b")?)?;
        match result.verdict {
            Verdict::Equivalent => *slot = true,
            Verdict::NotEquivalent { witness } => {
                *slot = false;
                if let (Some(w), Some(t)) = (out_witness.as_mut(), witness) {
                    *w = owned(t.to_string());
                }
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: &str = "wta {\n semiring int\n symbol alpha 0\n symbol sigma 2\n state q\n final q : 1\n\
                     trans alpha -> q : 2\n trans sigma (q, q) -> q : 1\n}\n";

    unsafe fn parse(src: &str) -> *mut WtakitWta {
        let src = CString::new(src).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(wtakit_wta_parse(src.as_ptr(), &mut m), WtakitStatus::Ok);
        m
    }

    unsafe fn take(s: *mut c_char) -> String {
        let out = CStr::from_ptr(s).to_str().unwrap().to_string();
        wtakit_string_free(s);
        out
    }

    fn last_error() -> String {
        let p = wtakit_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
    }

    #[test]
    fn parse_print_eval() {
        unsafe {
            let m = parse(A);
            assert_eq!(wtakit_wta_num_states(m), 1);
            let mut s = ptr::null_mut();
            assert_eq!(wtakit_wta_print(m, &mut s), WtakitStatus::Ok);
            assert!(take(s).contains("trans sigma (q, q) -> q : 1"));
            let tree = CString::new("sigma(alpha, alpha)").unwrap();
            assert_eq!(wtakit_wta_eval(m, tree.as_ptr(), &mut s), WtakitStatus::Ok);
            assert_eq!(take(s), "4");
            assert!(wtakit_last_error().is_null());
            wtakit_wta_free(m);
        }
    }

    #[test]
    fn errors_carry_codes_and_messages() {
        unsafe {
            let bad = CString::new("wta {\nsemiring int\nsymbol alpha 0\ntrans alpha -> q : 1\n}\n").unwrap();
            let mut m = ptr::null_mut();
            assert_eq!(wtakit_wta_parse(bad.as_ptr(), &mut m), WtakitStatus::Parse);
            assert!(m.is_null());
            assert!(last_error().contains("line 4, column 16"));

            assert_eq!(wtakit_wta_parse(ptr::null(), &mut m), WtakitStatus::NullArgument);
            let m = parse(A);
            let tree = CString::new("gamma(alpha)").unwrap();
            let mut s = ptr::null_mut();
            assert_eq!(wtakit_wta_eval(m, tree.as_ptr(), &mut s), WtakitStatus::Input);
            let invalid = [0xffu8 as c_char, 0];
            assert_eq!(wtakit_wta_eval(m, invalid.as_ptr(), &mut s), WtakitStatus::InvalidUtf8);
            wtakit_wta_free(m);
            wtakit_wta_free(ptr::null_mut());
            wtakit_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn constructions_and_equivalence() {
        unsafe {
            let a = parse(A);
            let b = parse(&A.replace("alpha -> q : 2", "alpha -> q : 3"));
            let (mut sum, mut had, mut trimmed) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
            assert_eq!(wtakit_wta_sum(a, b, &mut sum), WtakitStatus::Ok);
            assert_eq!(wtakit_wta_hadamard(a, b, &mut had), WtakitStatus::Ok);
            assert_eq!(wtakit_wta_trim(sum, &mut trimmed), WtakitStatus::Ok);
            assert_eq!(wtakit_wta_num_states(sum), 2);
            assert_eq!(wtakit_wta_num_states(had), 1);
            assert_eq!(wtakit_wta_num_states(trimmed), 2);

            let tree = CString::new("alpha").unwrap();
            let mut s = ptr::null_mut();
            assert_eq!(wtakit_wta_eval(sum, tree.as_ptr(), &mut s), WtakitStatus::Ok);
            assert_eq!(take(s), "5");
            assert_eq!(wtakit_wta_eval(had, tree.as_ptr(), &mut s), WtakitStatus::Ok);
            assert_eq!(take(s), "6");

            let mut eq = false;
            let mut witness = ptr::null_mut();
            assert_eq!(wtakit_equiv(a, a, &mut eq, &mut witness), WtakitStatus::Ok);
            assert!(eq && witness.is_null());
            assert_eq!(wtakit_equiv(a, b, &mut eq, &mut witness), WtakitStatus::Ok);
            assert!(!eq);
            assert_eq!(take(witness), "alpha");
            assert_eq!(wtakit_equiv(a, b, &mut eq, ptr::null_mut()), WtakitStatus::Ok);

            for h in [a, b, sum, had, trimmed] {
                wtakit_wta_free(h);
            }
        }
    }

    #[test]
    fn simulation_check() {
        unsafe {
            let a = parse(A);
            let mut holds = false;
            let id = CString::new("matrix {\n row q : 1\n}\n").unwrap();
            assert_eq!(wtakit_check_simulation(a, a, id.as_ptr(), &mut holds), WtakitStatus::Ok);
            assert!(holds);
            let two = CString::new("matrix {\n row q : 2\n}\n").unwrap();
            assert_eq!(wtakit_check_simulation(a, a, two.as_ptr(), &mut holds), WtakitStatus::Ok);
            assert!(!holds);
            let bool_wta = parse("wta {\nsemiring bool\nsymbol alpha 0\nstate p\nfinal p : 1\ntrans alpha -> p : 1\n}\n");
            let mut eq = false;
            assert_eq!(wtakit_equiv(bool_wta, bool_wta, &mut eq, ptr::null_mut()), WtakitStatus::Capability);
            wtakit_wta_free(a);
            wtakit_wta_free(bool_wta);
        }
    }
}
