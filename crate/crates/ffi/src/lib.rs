//! C interface. Graphs and solutions are opaque heap handles owned by the
//! caller and released with their `_free` function. Every fallible call
//! returns an [`EfStatus`]; on failure [`ef_last_error`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use evenfactor_core::digraph::{validate_odd_cycle_symmetric, Symmetry};
use evenfactor_core::evenfactor::verify;
use evenfactor_core::{io, solve, Algorithm, Digraph, NodeId, SolveOptions};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EfStatus {
    Ok = 0,
    /// Null pointer, bad node id or undersized buffer.
    InvalidArgument = 1,
    /// Instance text could not be parsed.
    Parse = 2,
    /// The graph is not odd-cycle symmetric.
    Asymmetric = 3,
    /// The arc set is not an even factor of the graph.
    Rejected = 4,
    /// An internal consistency check failed.
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EfAlgorithm {
    Fast = 0,
    Pap = 1,
}

/// Opaque digraph handle.
pub struct EfGraph {
    g: Digraph,
}

/// Opaque solution handle: the arcs as `(tail, head)` pairs.
pub struct EfSolution {
    arcs: Vec<(u32, u32)>,
    deficiency: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: EfStatus, msg: impl Into<String>) -> EfStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn guard(f: impl FnOnce() -> EfStatus) -> EfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(EfStatus::Internal, "panic inside the solver"))
}

fn asymmetry(g: &Digraph) -> Option<EfStatus> {
    match validate_odd_cycle_symmetric(g) {
        Symmetry::Valid => None,
        Symmetry::PossiblyInvalid(a) => {
            let (u, v) = g.original_endpoints(a);
            Some(fail(
                EfStatus::Asymmetric,
                format!("arc {} -> {} lies on an odd closed walk and has no reverse", u.0, v.0),
            ))
        }
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ef_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// New graph with nodes `0..n` and no arcs.
#[no_mangle]
pub extern "C" fn ef_graph_new(n: u32) -> *mut EfGraph {
    Box::into_raw(Box::new(EfGraph {
        g: Digraph::with_nodes(n as usize),
    }))
}

/// # Safety
/// `g` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ef_graph_free(g: *mut EfGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ef_graph_add_arc(g: *mut EfGraph, tail: u32, head: u32) -> EfStatus {
    guard(|| {
        let Some(g) = g.as_mut() else {
            return fail(EfStatus::InvalidArgument, "null graph");
        };
        match g.g.add_arc(NodeId(tail), NodeId(head)) {
            Ok(_) => EfStatus::Ok,
            Err(e) => fail(EfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Parses instance text (`n m` then `m` lines `u v`) into `*out`.
///
/// # Safety
/// `text` is a NUL-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ef_graph_from_text(text: *const c_char, out: *mut *mut EfGraph) -> EfStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(EfStatus::InvalidArgument, "null argument");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(EfStatus::Parse, "text is not UTF-8");
        };
        match io::parse_instance(s) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(EfGraph { g }));
                EfStatus::Ok
            }
            Err(e) => fail(EfStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ef_graph_node_count(g: *const EfGraph) -> u32 {
    g.as_ref().map_or(0, |g| g.g.node_count() as u32)
}

/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ef_graph_arc_count(g: *const EfGraph) -> u32 {
    g.as_ref().map_or(0, |g| g.g.arc_count() as u32)
}

/// `Ok` when the graph is odd-cycle symmetric, `Asymmetric` otherwise.
///
/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ef_check(g: *const EfGraph) -> EfStatus {
    guard(|| match g.as_ref() {
        None => fail(EfStatus::InvalidArgument, "null graph"),
        Some(g) => asymmetry(&g.g).unwrap_or(EfStatus::Ok),
    })
}

/// Computes a maximum even factor into `*out`.
///
/// # Safety
/// `g` is a live graph handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ef_solve(g: *const EfGraph, algo: EfAlgorithm, out: *mut *mut EfSolution) -> EfStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return fail(EfStatus::InvalidArgument, "null argument");
        };
        if let Some(s) = asymmetry(&g.g) {
            return s;
        }
        let algo = match algo {
            EfAlgorithm::Fast => Algorithm::Fast,
            EfAlgorithm::Pap => Algorithm::Pap,
        };
        match solve(&g.g, algo, SolveOptions::default()) {
            Ok(s) => {
                let arcs = s
                    .factor
                    .arcs()
                    .into_iter()
                    .map(|a| {
                        let (u, v) = g.g.original_endpoints(a);
                        (u.0, v.0)
                    })
                    .collect();
                let deficiency = s.factor.deficiency(&g.g);
                *out = Box::into_raw(Box::new(EfSolution { arcs, deficiency }));
                EfStatus::Ok
            }
            Err(e) => fail(EfStatus::Internal, e.to_string()),
        }
    })
}

/// # Safety
/// `s` is null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn ef_solution_free(s: *mut EfSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of arcs in the solution.
///
/// # Safety
/// `s` is a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn ef_solution_size(s: *const EfSolution) -> usize {
    s.as_ref().map_or(0, |s| s.arcs.len())
}

/// # Safety
/// `s` is a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn ef_solution_deficiency(s: *const EfSolution) -> usize {
    s.as_ref().map_or(0, |s| s.deficiency)
}

/// Copies the solution arcs into `tails[i], heads[i]`; `cap` is the length of
/// both buffers and must be at least `ef_solution_size(s)`.
///
/// # Safety
/// `s` is a live solution handle; `tails` and `heads` hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn ef_solution_arcs(
    s: *const EfSolution,
    tails: *mut u32,
    heads: *mut u32,
    cap: usize,
) -> EfStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return fail(EfStatus::InvalidArgument, "null solution");
        };
        if s.arcs.is_empty() {
            return EfStatus::Ok;
        }
        if tails.is_null() || heads.is_null() || cap < s.arcs.len() {
            return fail(EfStatus::InvalidArgument, format!("buffers must hold {} arcs", s.arcs.len()));
        }
        for (i, &(u, v)) in s.arcs.iter().enumerate() {
            *tails.add(i) = u;
            *heads.add(i) = v;
        }
        EfStatus::Ok
    })
}

/// `Ok` when the arcs `(tails[i], heads[i])` form an even factor of `g`.
///
/// # Safety
/// `g` is a live graph handle; `tails` and `heads` hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn ef_verify(g: *const EfGraph, tails: *const u32, heads: *const u32, len: usize) -> EfStatus {
    guard(|| {
        let Some(g) = g.as_ref() else {
            return fail(EfStatus::InvalidArgument, "null graph");
        };
        if len > 0 && (tails.is_null() || heads.is_null()) {
            return fail(EfStatus::InvalidArgument, "null arc buffer");
        }
        let mut arcs = Vec::with_capacity(len);
        for i in 0..len {
            let (u, v) = (*tails.add(i), *heads.add(i));
            match g.g.arc_between(NodeId(u), NodeId(v)) {
                Some(a) => arcs.push(a),
                None => return fail(EfStatus::Rejected, format!("arc {u} -> {v} is not in the graph")),
            }
        }
        match verify(&g.g, arcs) {
            Ok(_) => EfStatus::Ok,
            Err(v) => fail(EfStatus::Rejected, v.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_error_is_cleared_on_success() {
        unsafe {
            let g = ef_graph_new(2);
            assert_eq!(ef_graph_add_arc(g, 0, 7), EfStatus::InvalidArgument);
            assert!(!ef_last_error().is_null());
            assert_eq!(ef_graph_add_arc(g, 0, 1), EfStatus::Ok);
            assert!(ef_last_error().is_null());
            ef_graph_free(g);
        }
    }
}
