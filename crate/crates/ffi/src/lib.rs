//! C ABI for `ghnclab`.
//!
//! Objects are passed as opaque handles created by `*_new`/`*_from_*` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`GhnclabStatus`]; on failure the message is available from
//! [`ghnclab_last_error`] until the next failing call on the same thread.
//! Strings returned to the caller must be released with
//! [`ghnclab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ghnclab::ghnc::ghnc_check_graphs;
use ghnclab::gog::GraphOfGroups;
use ghnclab::hall::hall_completion;
use ghnclab::phi::classify;
use ghnclab::stallings::{intersection, StallingsGraph};
use ghnclab::words::Alphabet;
use ghnclab::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhnclabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Unsupported = 5,
    Panic = 6,
}

/// Opaque handle to a folded subgroup graph.
pub struct GhnclabSubgroup(StallingsGraph);

/// Opaque handle to a graph of free groups.
pub struct GhnclabGraphOfGroups(GraphOfGroups);

/// Summary of one inequality check.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GhnclabGhncResult {
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
    pub classical_lhs: usize,
    pub classical_rhs: usize,
    pub classical_holds: bool,
    pub components: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GhnclabStatus {
    match err {
        Error::Parse { .. } | Error::Json(_) => GhnclabStatus::Parse,
        Error::TrivialEdgeGroup(_) => GhnclabStatus::Unsupported,
        _ => GhnclabStatus::InvalidInput,
    }
}

struct Fail(GhnclabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GhnclabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GhnclabStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            GhnclabStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(GhnclabStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GhnclabStatus::InvalidUtf8, "argument is not valid UTF-8".into()))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn ghnclab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Folds the subgroup of F(rank) generated by `count` ASCII words.
///
/// # Safety
/// `generators` must point to `count` valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_subgroup_new(
    rank: usize,
    generators: *const *const c_char,
    count: usize,
    out_handle: *mut *mut GhnclabSubgroup,
) -> GhnclabStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let alphabet = Alphabet::new(rank)?;
        if generators.is_null() && count > 0 {
            return Err(null());
        }
        let mut words = Vec::with_capacity(count);
        for i in 0..count {
            words.push(alphabet.parse_word(str_arg(*generators.add(i))?)?);
        }
        let g = StallingsGraph::from_generators(&words, alphabet)?;
        *slot = Box::into_raw(Box::new(GhnclabSubgroup(g)));
        Ok(())
    })
}

/// Releases a subgroup handle.
///
/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_subgroup_free(h: *mut GhnclabSubgroup) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Rank of the subgroup.
///
/// # Safety
/// `h` must be a live handle; `out_rank` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_subgroup_rank(h: *const GhnclabSubgroup, out_rank: *mut usize) -> GhnclabStatus {
    guard(|| {
        *out(out_rank)? = handle(h)?.0.rank();
        Ok(())
    })
}

/// Number of vertices of the core graph.
///
/// # Safety
/// `h` must be a live handle; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_subgroup_vertices(
    h: *const GhnclabSubgroup,
    out_count: *mut usize,
) -> GhnclabStatus {
    guard(|| {
        *out(out_count)? = handle(h)?.0.num_vertices();
        Ok(())
    })
}

/// Index in the ambient free group; 0 means infinite index.
///
/// # Safety
/// `h` must be a live handle; `out_index` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_subgroup_index(h: *const GhnclabSubgroup, out_index: *mut usize) -> GhnclabStatus {
    guard(|| {
        *out(out_index)? = handle(h)?.0.index_in_ambient().finite().unwrap_or(0);
        Ok(())
    })
}

/// Tests whether an ASCII word lies in the subgroup.
///
/// # Safety
/// `h` must be a live handle, `word` a C string, `out_member` writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_subgroup_contains(
    h: *const GhnclabSubgroup,
    word: *const c_char,
    out_member: *mut bool,
) -> GhnclabStatus {
    guard(|| {
        let g = &handle(h)?.0;
        let w = g.alphabet().parse_word(str_arg(word)?)?;
        *out(out_member)? = g.membership(&w)?;
        Ok(())
    })
}

/// Graphviz rendering of the core graph.
///
/// # Safety
/// `h` must be a live handle; `out_dot` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_subgroup_dot(h: *const GhnclabSubgroup, out_dot: *mut *mut c_char) -> GhnclabStatus {
    guard(|| {
        let slot = out(out_dot)?;
        *slot = c_string(handle(h)?.0.to_dot());
        Ok(())
    })
}

/// Intersection of two subgroups of the same free group.
///
/// # Safety
/// `u`, `v` must be live handles; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_intersection(
    u: *const GhnclabSubgroup,
    v: *const GhnclabSubgroup,
    out_handle: *mut *mut GhnclabSubgroup,
) -> GhnclabStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let i = intersection(&handle(u)?.0, &handle(v)?.0)?;
        *slot = Box::into_raw(Box::new(GhnclabSubgroup(i)));
        Ok(())
    })
}

/// Runs the strengthened and classical Hanna Neumann checks.
///
/// # Safety
/// `u`, `v` must be live handles; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_ghnc_check(
    u: *const GhnclabSubgroup,
    v: *const GhnclabSubgroup,
    out_result: *mut GhnclabGhncResult,
) -> GhnclabStatus {
    guard(|| {
        let slot = out(out_result)?;
        let r = ghnc_check_graphs(&handle(u)?.0, &handle(v)?.0)?;
        *slot = GhnclabGhncResult {
            lhs: r.lhs,
            rhs: r.rhs,
            holds: r.holds,
            classical_lhs: r.classical_lhs,
            classical_rhs: r.classical_rhs,
            classical_holds: r.classical_holds,
            components: r.components.len(),
        };
        Ok(())
    })
}

/// Index of the Hall completion and the rank of the resulting cover.
///
/// # Safety
/// `h` must be a live handle; both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_hall_completion(
    h: *const GhnclabSubgroup,
    out_index: *mut usize,
    out_cover_rank: *mut usize,
) -> GhnclabStatus {
    guard(|| {
        let c = hall_completion(&handle(h)?.0);
        *out(out_index)? = c.index;
        *out(out_cover_rank)? = c.cover.rank();
        Ok(())
    })
}

/// Parses and validates a graph of groups from JSON.
///
/// # Safety
/// `json` must be a C string; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_gog_from_json(
    json: *const c_char,
    out_handle: *mut *mut GhnclabGraphOfGroups,
) -> GhnclabStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let g = GraphOfGroups::from_json(str_arg(json)?)?;
        g.validate().into_result()?;
        *slot = Box::into_raw(Box::new(GhnclabGraphOfGroups(g)));
        Ok(())
    })
}

/// Releases a graph-of-groups handle.
///
/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_gog_free(h: *mut GhnclabGraphOfGroups) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Euler characteristic of the fundamental group.
///
/// # Safety
/// `h` must be a live handle; `out_chi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_gog_euler(h: *const GhnclabGraphOfGroups, out_chi: *mut i64) -> GhnclabStatus {
    guard(|| {
        *out(out_chi)? = handle(h)?.0.euler_characteristic();
        Ok(())
    })
}

/// Classification report as a JSON string.
///
/// # Safety
/// `h` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghnclab_gog_classify_json(
    h: *const GhnclabGraphOfGroups,
    out_json: *mut *mut c_char,
) -> GhnclabStatus {
    guard(|| {
        let slot = out(out_json)?;
        let r = classify(&handle(h)?.0)?;
        let text = serde_json::to_string(&r).map_err(Error::from)?;
        *slot = c_string(text);
        Ok(())
    })
}
