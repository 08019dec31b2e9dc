//! C ABI over the analysis engine: opaque handles, integer status codes,
//! UTF-8 strings in, heap-allocated C strings out. The committed header
//! lives in `include/cfa.h` (regenerate with `cbindgen --crate cfa-capi`).
//!
//! Conventions: every function returning `CfaStatus` stores a message for
//! the calling thread on failure, retrievable via [`cfa_last_error`];
//! strings returned through out-parameters are owned by the caller and must
//! be released with [`cfa_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use cfa_core::cfg::{classify_cyclicity, generate_random_cfg, parse_cfg, Cfg, Cyclicity};
use cfa_core::dsl::{parse_program, value_to_json, Program};
use cfa_core::engine::{execute_analysis, ExecutionPlan, Strategy};
use cfa_core::props::extract_properties;
use cfa_core::selector::{explain_line, select_program};

/// Status codes for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    Unsupported = 4,
    Diverged = 5,
    Internal = 6,
}

/// Opaque graph handle.
pub struct CfaGraph {
    inner: Cfg,
}

/// Opaque analysis handle.
pub struct CfaProgram {
    code: String,
    inner: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(msg).unwrap_or_default();
    });
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated buffer outliving the call.
unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, CfaStatus> {
    if ptr.is_null() {
        set_error("null argument");
        return Err(CfaStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error("argument is not valid UTF-8");
            Err(CfaStatus::InvalidUtf8)
        }
    }
}

fn string_out(s: String, out: *mut *mut c_char) -> CfaStatus {
    if out.is_null() {
        set_error("null out-parameter");
        return CfaStatus::NullArgument;
    }
    match CString::new(s.replace('\0', " ")) {
        Ok(c) => {
            // SAFETY: out checked non-null above.
            unsafe { *out = c.into_raw() };
            CfaStatus::Ok
        }
        Err(_) => {
            set_error("output contained interior NUL");
            CfaStatus::Internal
        }
    }
}

/// Message for the most recent failure on this thread. Borrowed; valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cfa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned through an out-parameter.
///
/// # Safety
/// `s` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn cfa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the line-oriented graph format.
///
/// # Safety
/// `text` must be a valid NUL-terminated buffer; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfa_graph_parse(
    text: *const c_char,
    out: *mut *mut CfaGraph,
) -> CfaStatus {
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    if out.is_null() {
        set_error("null out-parameter");
        return CfaStatus::NullArgument;
    }
    match parse_cfg(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CfaGraph { inner }));
            CfaStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CfaStatus::ParseError
        }
    }
}

/// Deterministic random graph of the requested class; `class` uses the CLI
/// spelling (sequential, branch, loop-no-branch, loop-with-branch).
///
/// # Safety
/// `class` must be a valid NUL-terminated buffer; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfa_graph_generate(
    seed: u64,
    size: usize,
    class: *const c_char,
    out: *mut *mut CfaGraph,
) -> CfaStatus {
    let class = match utf8_arg(class) {
        Ok(c) => c,
        Err(s) => return s,
    };
    if out.is_null() {
        set_error("null out-parameter");
        return CfaStatus::NullArgument;
    }
    let class: Cyclicity = match class.parse() {
        Ok(c) => c,
        Err(e) => {
            set_error(e);
            return CfaStatus::Unsupported;
        }
    };
    match generate_random_cfg(seed, size, class) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CfaGraph { inner }));
            CfaStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CfaStatus::Unsupported
        }
    }
}

/// # Safety
/// `g` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfa_graph_free(g: *mut CfaGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn cfa_graph_node_count(g: *const CfaGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.len())
}

/// Static string naming the graph's cyclicity class.
///
/// # Safety
/// `g` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn cfa_graph_cyclicity(g: *const CfaGraph) -> *const c_char {
    match g.as_ref() {
        Some(g) => match classify_cyclicity(&g.inner) {
            Cyclicity::Sequential => c"Sequential".as_ptr(),
            Cyclicity::BranchOnly => c"BranchOnly".as_ptr(),
            Cyclicity::LoopNoBranch => c"LoopNoBranch".as_ptr(),
            Cyclicity::LoopWithBranch => c"LoopWithBranch".as_ptr(),
        },
        None => ptr::null(),
    }
}

fn build_program(code: &str, source: &str, out: *mut *mut CfaProgram) -> CfaStatus {
    if out.is_null() {
        set_error("null out-parameter");
        return CfaStatus::NullArgument;
    }
    match parse_program(source) {
        Ok(inner) => {
            let handle = CfaProgram {
                code: code.to_string(),
                inner,
            };
            // SAFETY: out checked non-null above.
            unsafe { *out = Box::into_raw(Box::new(handle)) };
            CfaStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CfaStatus::ParseError
        }
    }
}

/// Parses analysis source text.
///
/// # Safety
/// `text` must be a valid NUL-terminated buffer; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfa_program_parse(
    text: *const c_char,
    out: *mut *mut CfaProgram,
) -> CfaStatus {
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    build_program("custom", text, out)
}

/// Loads a shipped corpus analysis by code (PDOM, DOM, RD, LV, AE, VBE,
/// UDV, COL).
///
/// # Safety
/// `code` must be a valid NUL-terminated buffer; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfa_program_load(
    code: *const c_char,
    out: *mut *mut CfaProgram,
) -> CfaStatus {
    let code = match utf8_arg(code) {
        Ok(c) => c,
        Err(s) => return s,
    };
    match cfa_core::analyses::asset(code) {
        Some(asset) => build_program(asset.code, asset.source, out),
        None => {
            set_error(format!("unknown analysis code `{code}`"));
            CfaStatus::Unsupported
        }
    }
}

/// # Safety
/// `p` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfa_program_free(p: *mut CfaProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Static property lines, one per traversal (the `props` CLI format).
///
/// # Safety
/// `p` must be valid; `out` receives a string owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn cfa_props_lines(
    p: *const CfaProgram,
    out: *mut *mut c_char,
) -> CfaStatus {
    let Some(p) = p.as_ref() else {
        set_error("null program handle");
        return CfaStatus::NullArgument;
    };
    string_out(extract_properties(&p.inner).lines(), out)
}

/// Selection trace lines (the `explain` CLI format).
///
/// # Safety
/// `p` and `g` must be valid handles; `out` receives a caller-owned string.
#[no_mangle]
pub unsafe extern "C" fn cfa_explain(
    p: *const CfaProgram,
    g: *const CfaGraph,
    out: *mut *mut c_char,
) -> CfaStatus {
    let (Some(p), Some(g)) = (p.as_ref(), g.as_ref()) else {
        set_error("null handle");
        return CfaStatus::NullArgument;
    };
    let report = extract_properties(&p.inner);
    match select_program(&report, g.inner.cyclicity) {
        Ok(outcomes) => {
            let mut text = String::new();
            for (entry, outcome) in report.entries.iter().zip(&outcomes) {
                text.push_str(&explain_line(
                    &entry.traversal,
                    &entry.props,
                    g.inner.cyclicity,
                    outcome,
                ));
                text.push('\n');
            }
            string_out(text, out)
        }
        Err(e) => {
            set_error(e.to_string());
            CfaStatus::Unsupported
        }
    }
}

/// Runs the analysis under the selected plans (or one forced strategy when
/// `strategy` is non-null) and returns the same JSON document as
/// `cfa analyze --format json`.
///
/// # Safety
/// `p` and `g` must be valid handles; `strategy` may be null; `out`
/// receives a caller-owned string.
#[no_mangle]
pub unsafe extern "C" fn cfa_analyze_json(
    p: *const CfaProgram,
    g: *const CfaGraph,
    strategy: *const c_char,
    optimize: bool,
    out: *mut *mut c_char,
) -> CfaStatus {
    let (Some(p), Some(g)) = (p.as_ref(), g.as_ref()) else {
        set_error("null handle");
        return CfaStatus::NullArgument;
    };

    let forced: Option<Strategy> = if strategy.is_null() {
        None
    } else {
        let name = match utf8_arg(strategy) {
            Ok(n) => n,
            Err(s) => return s,
        };
        match name.parse() {
            Ok(s) => Some(s),
            Err(e) => {
                set_error(e);
                return CfaStatus::Unsupported;
            }
        }
    };

    let plans: Vec<ExecutionPlan> = match forced {
        Some(strategy) => p
            .inner
            .invocations
            .iter()
            .map(|inv| ExecutionPlan {
                strategy,
                single_pass: false,
                direction: inv.direction,
            })
            .collect(),
        None => {
            let report = extract_properties(&p.inner);
            match select_program(&report, g.inner.cyclicity) {
                Ok(outcomes) => outcomes
                    .into_iter()
                    .map(|o| ExecutionPlan {
                        single_pass: o.plan.single_pass && optimize,
                        ..o.plan
                    })
                    .collect(),
                Err(e) => {
                    set_error(e.to_string());
                    return CfaStatus::Unsupported;
                }
            }
        }
    };

    match execute_analysis(&p.inner, &g.inner, &plans, None) {
        Ok(run) => {
            let mut outputs = serde_json::Map::new();
            for (traversal, map) in &run.outputs {
                let mut nodes = serde_json::Map::new();
                for (node, value) in map {
                    nodes.insert(node.to_string(), value_to_json(value));
                }
                outputs.insert(traversal.clone(), serde_json::Value::Object(nodes));
            }
            let doc = serde_json::json!({
                "analysis": p.code,
                "graph": g.inner.name,
                "cyclicity": g.inner.cyclicity.to_string(),
                "outputs": outputs,
                "metrics": {
                    "visits": run.total.node_visits,
                    "passes": run.total.passes,
                    "checks": run.total.fixpoint_checks,
                    "pushes": run.total.worklist_pushes,
                },
            });
            string_out(doc.to_string(), out)
        }
        Err(e) => {
            set_error(e.to_string());
            match e {
                cfa_core::engine::EngineError::Diverged { .. } => CfaStatus::Diverged,
                _ => CfaStatus::Internal,
            }
        }
    }
}

#[cfg(test)]
mod tests;
