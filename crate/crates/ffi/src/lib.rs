//! C ABI for geobst. Objects are opaque handles created and freed through
//! this interface. Every function returns a `GeobstStatus`; on failure the
//! message is available from `geobst_last_error` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use geobst::decomposition::{decompose, DecompositionTree};
use geobst::generators::gen_class;
use geobst::geometry::is_satisfied_set;
use geobst::greedy::{run_greedy, ExecutionTrace};
use geobst::opt::{search_opt, OptLimits};
use geobst::rgreedy::run_rgreedy;
use geobst::sequence::AccessSequence;
use geobst::tree::parse_initial_spec;
use geobst::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeobstStatus {
    Ok = 0,
    InvalidArgument = 1,
    ResourceLimit = 2,
    Parse = 3,
    NullPointer = 4,
    Panic = 5,
}

pub struct GeobstSequence(AccessSequence);
pub struct GeobstTrace(ExecutionTrace);
pub struct GeobstTree(DecompositionTree);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> GeobstStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GeobstStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            GeobstStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(&e.to_string());
            match e {
                Error::InvalidArgument(_) | Error::Io(_) => GeobstStatus::InvalidArgument,
                Error::ResourceLimit { .. } => GeobstStatus::ResourceLimit,
                Error::Parse(_) => GeobstStatus::Parse,
            }
        }
        Err(_) => {
            set_error("internal panic");
            GeobstStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Core(Error::Parse(format!("{what} is not UTF-8"))))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn geobst_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by a `*_to_text` function. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn geobst_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a sequence over keys `1..=n` from `m` keys.
///
/// # Safety
/// `keys` must point to `m` readable values; `out_seq` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_sequence_new(
    n: usize,
    keys: *const usize,
    m: usize,
    out_seq: *mut *mut GeobstSequence,
) -> GeobstStatus {
    guard(|| {
        let dst = out(out_seq, "out_seq")?;
        if keys.is_null() && m > 0 {
            return Err(Fail::Null("keys"));
        }
        let ks = if m == 0 { Vec::new() } else { std::slice::from_raw_parts(keys, m).to_vec() };
        let x = AccessSequence::new(n, ks)?;
        *dst = Box::into_raw(Box::new(GeobstSequence(x)));
        Ok(())
    })
}

/// Generates a sequence of the named class (as in the `gen` command).
///
/// # Safety
/// `class_name` must be a NUL-terminated string; `out_seq` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_generate(
    class_name: *const c_char,
    n: usize,
    k: usize,
    seed: u64,
    out_seq: *mut *mut GeobstSequence,
) -> GeobstStatus {
    guard(|| {
        let dst = out(out_seq, "out_seq")?;
        let (x, _) = gen_class(text(class_name, "class_name")?, n, k, seed)?;
        *dst = Box::into_raw(Box::new(GeobstSequence(x)));
        Ok(())
    })
}

/// # Safety
/// `s` must be a NUL-terminated string; `out_seq` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_sequence_from_text(s: *const c_char, out_seq: *mut *mut GeobstSequence) -> GeobstStatus {
    guard(|| {
        let dst = out(out_seq, "out_seq")?;
        let x = AccessSequence::from_text(text(s, "text")?)?;
        *dst = Box::into_raw(Box::new(GeobstSequence(x)));
        Ok(())
    })
}

/// # Safety
/// `seq` must be a live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_sequence_to_text(seq: *const GeobstSequence, out_text: *mut *mut c_char) -> GeobstStatus {
    guard(|| {
        let x = obj(seq, "seq")?;
        *out(out_text, "out_text")? = owned_string(x.0.to_text());
        Ok(())
    })
}

/// Number of accesses.
///
/// # Safety
/// `seq` must be a live handle; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_sequence_len(seq: *const GeobstSequence, out_len: *mut usize) -> GeobstStatus {
    guard(|| {
        *out(out_len, "out_len")? = obj(seq, "seq")?.0.m();
        Ok(())
    })
}

/// # Safety
/// `seq` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn geobst_sequence_free(seq: *mut GeobstSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Canonical decomposition tree of a permutation.
///
/// # Safety
/// `seq` must be a live handle; `out_tree` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_tree_decompose(seq: *const GeobstSequence, out_tree: *mut *mut GeobstTree) -> GeobstStatus {
    guard(|| {
        let x = obj(seq, "seq")?;
        let dst = out(out_tree, "out_tree")?;
        let t = decompose(x.0.keys())?;
        *dst = Box::into_raw(Box::new(GeobstTree(t)));
        Ok(())
    })
}

/// Parses the nested `(skeleton | child ...)` form.
///
/// # Safety
/// `s` must be a NUL-terminated string; `out_tree` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_tree_from_text(s: *const c_char, out_tree: *mut *mut GeobstTree) -> GeobstStatus {
    guard(|| {
        let dst = out(out_tree, "out_tree")?;
        let t = DecompositionTree::from_text(text(s, "text")?)?;
        *dst = Box::into_raw(Box::new(GeobstTree(t)));
        Ok(())
    })
}

/// # Safety
/// `tree` must be a live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_tree_to_text(tree: *const GeobstTree, out_text: *mut *mut c_char) -> GeobstStatus {
    guard(|| {
        let t = obj(tree, "tree")?;
        *out(out_text, "out_text")? = owned_string(t.0.to_text());
        Ok(())
    })
}

/// # Safety
/// `tree` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn geobst_tree_free(tree: *mut GeobstTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Runs Greedy. `initial` is `none`, `balanced`, `random:SEED` or
/// `preorder:LIST`; null means `none`.
///
/// # Safety
/// `seq` must be a live handle, `initial` null or NUL-terminated, and
/// `out_trace` writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_run_greedy(
    seq: *const GeobstSequence,
    initial: *const c_char,
    out_trace: *mut *mut GeobstTrace,
) -> GeobstStatus {
    guard(|| {
        let x = obj(seq, "seq")?;
        let dst = out(out_trace, "out_trace")?;
        let spec = if initial.is_null() { "none" } else { text(initial, "initial")? };
        let t = parse_initial_spec(spec, x.0.n())?;
        let tr = run_greedy(&x.0, t.as_ref())?;
        *dst = Box::into_raw(Box::new(GeobstTrace(tr)));
        Ok(())
    })
}

/// Runs RGreedy with `tree`, or the canonical tree when `tree` is null.
///
/// # Safety
/// `seq` must be a live handle, `tree` null or live, `out_trace` writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_run_rgreedy(
    seq: *const GeobstSequence,
    tree: *const GeobstTree,
    out_trace: *mut *mut GeobstTrace,
) -> GeobstStatus {
    guard(|| {
        let x = obj(seq, "seq")?;
        let dst = out(out_trace, "out_trace")?;
        let tr = match tree.as_ref() {
            Some(t) => run_rgreedy(&x.0, &t.0)?,
            None => run_rgreedy(&x.0, &decompose(x.0.keys())?)?,
        };
        *dst = Box::into_raw(Box::new(GeobstTrace(tr)));
        Ok(())
    })
}

/// Number of touch points, initial-tree stacks excluded.
///
/// # Safety
/// `trace` must be a live handle; `out_cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_trace_cost(trace: *const GeobstTrace, out_cost: *mut usize) -> GeobstStatus {
    guard(|| {
        *out(out_cost, "out_cost")? = obj(trace, "trace")?.0.cost();
        Ok(())
    })
}

/// Whether touch points plus initial stacks form a satisfied set.
///
/// # Safety
/// `trace` must be a live handle; `out_ok` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_trace_is_satisfied(trace: *const GeobstTrace, out_ok: *mut bool) -> GeobstStatus {
    guard(|| {
        *out(out_ok, "out_ok")? = is_satisfied_set(&obj(trace, "trace")?.0.combined_grid());
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_trace_to_text(trace: *const GeobstTrace, out_text: *mut *mut c_char) -> GeobstStatus {
    guard(|| {
        let t = obj(trace, "trace")?;
        *out(out_text, "out_text")? = owned_string(t.0.to_text());
        Ok(())
    })
}

/// # Safety
/// `trace` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn geobst_trace_free(trace: *mut GeobstTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Exact OPT for `n <= 8`. When the node cap stops the search, returns
/// `GEOBST_STATUS_RESOURCE_LIMIT` with the Greedy upper bound in
/// `out_cost` and `out_exact` set to false.
///
/// # Safety
/// `seq` must be a live handle; `out_cost` and `out_exact` writable.
#[no_mangle]
pub unsafe extern "C" fn geobst_opt(
    seq: *const GeobstSequence,
    node_cap: u64,
    out_cost: *mut usize,
    out_exact: *mut bool,
) -> GeobstStatus {
    guard(|| {
        let x = obj(seq, "seq")?;
        let cost = out(out_cost, "out_cost")?;
        let exact = out(out_exact, "out_exact")?;
        let r = search_opt(&x.0, &OptLimits { node_cap, ..Default::default() })?;
        *cost = r.cost;
        *exact = r.exact;
        if !r.exact {
            return Err(Fail::Core(Error::ResourceLimit {
                what: format!("OPT search stopped after {} nodes", r.nodes),
                upper_bound: Some(r.cost),
            }));
        }
        Ok(())
    })
}
