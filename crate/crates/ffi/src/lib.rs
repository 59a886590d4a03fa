//! C ABI over the `budgetwalk` library.
//!
//! Graphs are opaque `BwGraph` handles created by `bw_graph_generate` or
//! `bw_graph_load` and released with `bw_graph_free`. Every fallible call
//! returns a `BW_*` status code; on failure `bw_last_error` describes the
//! most recent error on the calling thread. Pointers passed in must be valid
//! for the duration of the call, and strings must be NUL-terminated UTF-8.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use budgetwalk::experiments::GraphModel;
use budgetwalk::graphgen::{read_graph, write_graph};
use budgetwalk::seeding::trial_rng;
use budgetwalk::walks::{default_step_cap, run_cover};
use budgetwalk::{theory, ColoredGraph, Error, WalkPolicy};

pub const BW_OK: i32 = 0;
pub const BW_NULL_POINTER: i32 = 1;
pub const BW_INVALID_PARAMETER: i32 = 2;
pub const BW_GENERATION: i32 = 3;
pub const BW_STRUCTURE: i32 = 4;
pub const BW_NUMERIC: i32 = 5;
pub const BW_INFEASIBLE: i32 = 6;
pub const BW_PARSE: i32 = 7;
pub const BW_IO: i32 = 8;
pub const BW_PANIC: i32 = 9;
pub const BW_INTERNAL: i32 = 10;

pub const BW_MODEL_REGULAR: i32 = 0;
pub const BW_MODEL_UNION: i32 = 1;
pub const BW_MODEL_HAMILTON: i32 = 2;
pub const BW_MODEL_TWOFACTOR: i32 = 3;

pub const BW_POLICY_SIMPLE: i32 = 0;
pub const BW_POLICY_OBLIVIOUS: i32 = 1;
pub const BW_POLICY_FLIP: i32 = 2;
pub const BW_POLICY_SMOOTH: i32 = 3;
pub const BW_POLICY_CONGESTION: i32 = 4;

/// Opaque graph handle.
pub struct BwGraph {
    inner: ColoredGraph,
}

/// Walk policy. Only the fields used by `kind` are read.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BwPolicy {
    /// One of `BW_POLICY_*`.
    pub kind: i32,
    /// Red-use budget (oblivious, smooth).
    pub budget: u64,
    pub rho_r: f64,
    pub rho_b: f64,
    pub alpha: f64,
    pub phase_length: u64,
    pub peak: u64,
    pub off_peak: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BwCoverResult {
    /// 1 if every vertex was visited, 0 if the walk failed.
    pub covered: u8,
    /// Valid when `covered` is 1.
    pub cover_time: u64,
    pub red_uses: u64,
    pub steps_taken: u64,
    pub start_vertex: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BwFlipSolution {
    pub psi_r: f64,
    pub psi_b: f64,
    pub f: f64,
    pub xi_r: f64,
    pub xi_b: f64,
    /// `1/(1-f)`, the cover-time constant.
    pub expected_returns: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => BW_INVALID_PARAMETER,
        Error::Generation(_) => BW_GENERATION,
        Error::Structure(_) => BW_STRUCTURE,
        Error::Numeric(_) => BW_NUMERIC,
        Error::Infeasible(_) => BW_INFEASIBLE,
        Error::Parse { .. } => BW_PARSE,
        Error::Io(_) => BW_IO,
        _ => BW_INTERNAL,
    }
}

/// Runs `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            BW_OK
        }
        Ok(Err((code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(_) => {
            set_last_error("panic inside budgetwalk");
            BW_PANIC
        }
    }
}

fn lib<T>(r: budgetwalk::Result<T>) -> Result<T, (i32, String)> {
    r.map_err(|e| (code_of(&e), e.to_string()))
}

fn null(what: &str) -> (i32, String) {
    (BW_NULL_POINTER, format!("{what} is null"))
}

unsafe fn path_arg(path: *const c_char) -> Result<String, (i32, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| (BW_INVALID_PARAMETER, "path is not valid UTF-8".into()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Samples a graph. For `BW_MODEL_REGULAR`, `r` is the degree; `b` is only
/// read by `BW_MODEL_UNION`.
#[no_mangle]
pub unsafe extern "C" fn bw_graph_generate(
    model: i32,
    n: usize,
    r: usize,
    b: usize,
    seed: u64,
    out: *mut *mut BwGraph,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let spec = match model {
            BW_MODEL_REGULAR => GraphModel::Regular { n, d: r },
            BW_MODEL_UNION => GraphModel::Union { n, r, b },
            BW_MODEL_HAMILTON => GraphModel::Hamilton { n, r },
            BW_MODEL_TWOFACTOR => GraphModel::TwoFactor { n, r },
            other => return Err((BW_INVALID_PARAMETER, format!("unknown graph model {other}"))),
        };
        let g = lib(spec.generate(seed))?;
        *out = Box::into_raw(Box::new(BwGraph { inner: g }));
        Ok(())
    })
}

/// Reads a graph in the text edge-list format.
#[no_mangle]
pub unsafe extern "C" fn bw_graph_load(path: *const c_char, out: *mut *mut BwGraph) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let g = lib(read_graph(path_arg(path)?))?;
        *out = Box::into_raw(Box::new(BwGraph { inner: g }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bw_graph_save(graph: *const BwGraph, path: *const c_char) -> i32 {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let path = path_arg(path)?;
        let file = lib(std::fs::File::create(&path).map_err(Error::from))?;
        lib(write_graph(&g.inner, std::io::BufWriter::new(file)))
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bw_graph_free(graph: *mut BwGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Vertex count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn bw_graph_n(graph: *const BwGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.n())
}

#[no_mangle]
pub unsafe extern "C" fn bw_graph_red_degree(graph: *const BwGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.red_degree())
}

#[no_mangle]
pub unsafe extern "C" fn bw_graph_blue_degree(graph: *const BwGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.blue_degree())
}

fn to_policy(p: &BwPolicy) -> Result<WalkPolicy, (i32, String)> {
    Ok(match p.kind {
        BW_POLICY_SIMPLE => WalkPolicy::Simple,
        BW_POLICY_OBLIVIOUS => WalkPolicy::Oblivious { budget: p.budget },
        BW_POLICY_FLIP => WalkPolicy::Flip { rho_r: p.rho_r, rho_b: p.rho_b },
        BW_POLICY_SMOOTH => WalkPolicy::Smooth { alpha: p.alpha, phase_length: p.phase_length, budget: p.budget },
        BW_POLICY_CONGESTION => WalkPolicy::Congestion { peak: p.peak, off_peak: p.off_peak },
        other => return Err((BW_INVALID_PARAMETER, format!("unknown policy {other}"))),
    })
}

/// Runs one trajectory from `start` with the stream of trial 0 under
/// master seed `seed`. `step_cap = 0` selects the default `100·n²`.
#[no_mangle]
pub unsafe extern "C" fn bw_run_cover(
    graph: *const BwGraph,
    policy: *const BwPolicy,
    start: usize,
    seed: u64,
    step_cap: u64,
    out: *mut BwCoverResult,
) -> i32 {
    guard(|| {
        let g = &graph.as_ref().ok_or_else(|| null("graph"))?.inner;
        let policy = to_policy(policy.as_ref().ok_or_else(|| null("policy"))?)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        lib(policy.validate(g))?;
        let cap = if step_cap == 0 { default_step_cap(g.n()) } else { step_cap };
        let res = lib(run_cover(g, &policy, start, &mut trial_rng(seed, 0), cap))?;
        *out = BwCoverResult {
            covered: res.cover_time.is_some() as u8,
            cover_time: res.cover_time.unwrap_or(0),
            red_uses: res.red_uses,
            steps_taken: res.steps_taken,
            start_vertex: res.start_vertex as u64,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bw_sigma_rb(r: usize, b: usize, out: *mut f64) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lib(theory::sigma_rb(r, b))?;
        Ok(())
    })
}

/// `θ(q)` for `r = 1, b = 2`; `+∞` at `q = 0` and `q = 1`.
#[no_mangle]
pub unsafe extern "C" fn bw_theta_flip(q: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lib(theory::theta_flip(q))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bw_flip_fixed_point(
    r: usize,
    b: usize,
    rho_r: f64,
    rho_b: f64,
    out: *mut BwFlipSolution,
) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let s = lib(theory::flip_fixed_point(r, b, rho_r, rho_b))?;
        *out = BwFlipSolution {
            psi_r: s.psi_r,
            psi_b: s.psi_b,
            f: s.f,
            xi_r: s.xi_r,
            xi_b: s.xi_b,
            expected_returns: s.expected_returns,
        };
        Ok(())
    })
}
