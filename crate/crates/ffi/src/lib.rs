//! C ABI over the `rhmember` engine.
//!
//! Every handle is opaque and released by its `*_free` function. Functions
//! return an [`RhmStatus`]; on failure [`rhm_last_error`] holds a message for
//! the calling thread. Strings returned to the caller are released with
//! [`rhm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use rhmember::autostruct::{builtin_from_spec, AutomaticStructure};
use rhmember::lstallings::{LStallingsGraph, LStallingsOutcome, LStallingsRun};
use rhmember::oracle::family_membership;
use rhmember::presentation::PresentationFile;
use rhmember::relhyp::{decide_membership, MembershipVerdict, RelHypInstance, Schedule, VerdictReport};
use rhmember::stallings::{stallings_graph, Index, StallingsGraph};
use rhmember::words::Alphabet;
use rhmember::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidStructure = 4,
    Panic = 5,
    NoOracle = 6,
    Uncertified = 7,
    Failed = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhmVerdict {
    Member = 0,
    NonMember = 1,
    BudgetExhausted = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhmSchedule {
    Diag = 0,
    Alt = 1,
}

/// Stallings graph of a subgroup of a free group.
pub struct RhmGraph {
    graph: StallingsGraph,
}

/// An automatic structure, loaded from a bundle or a builtin description.
pub struct RhmStructure {
    structure: Arc<AutomaticStructure>,
}

/// Outcome of a relative Stallings computation.
pub struct RhmLGraph {
    graph: Option<LStallingsGraph>,
}

/// A group with peripherals and an automatic structure.
pub struct RhmInstance {
    instance: RelHypInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RhmStatus {
    match e {
        Error::StructureInvalid(_) | Error::UnsupportedStructure(_) => RhmStatus::InvalidStructure,
        Error::NoOracle(_) => RhmStatus::NoOracle,
        Error::Uncertified => RhmStatus::Uncertified,
        Error::Parse { .. } | Error::Malformed(_) | Error::Json(_) | Error::AlphabetMismatch(_) => RhmStatus::Parse,
        _ => RhmStatus::Failed,
    }
}

struct Fail(RhmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RhmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RhmStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RhmStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid nul-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(RhmStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(RhmStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

/// # Safety
/// `p` is null or points to a live handle created by this library.
unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(RhmStatus::NullPointer, "null handle".into()))
}

fn out_ptr<T>(p: *mut T) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(RhmStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

fn load_structure(spec: &str) -> Result<AutomaticStructure, Error> {
    if spec.starts_with("builtin:") {
        builtin_from_spec(spec)
    } else {
        AutomaticStructure::load(Path::new(spec))
    }
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rhm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rhm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Folds `generators` (comma-separated words) over the generators named in
/// `alphabet` (comma-separated).
///
/// # Safety
/// String arguments are nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_fold(
    alphabet: *const c_char,
    generators: *const c_char,
    out: *mut *mut RhmGraph,
) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        let a = Alphabet::new(text(alphabet)?.split(',').map(str::trim).filter(|s| !s.is_empty()))?;
        let gens = a.parse_word_list(text(generators)?)?;
        let graph = stallings_graph(&a, &gens)?;
        *out = Box::into_raw(Box::new(RhmGraph { graph }));
        Ok(())
    })
}

/// # Safety
/// `g` is null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_free(g: *mut RhmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_num_vertices(g: *const RhmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.num_vertices())
}

/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_num_edges(g: *const RhmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.num_edges())
}

/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_rank(g: *const RhmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.rank_and_basis().0)
}

/// Index in the free group, or -1 when infinite.
///
/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_index(g: *const RhmGraph) -> i64 {
    match g.as_ref().map(|g| g.graph.index_free()) {
        Some(Index::Finite(n)) => n as i64,
        _ => -1,
    }
}

/// # Safety
/// `g` is a live graph handle, `word` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_contains(g: *const RhmGraph, word: *const c_char, out: *mut bool) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        let g = &handle(g)?.graph;
        let w = g.alphabet().parse_word(text(word)?)?;
        *out = g.membership_free(&w)?;
        Ok(())
    })
}

/// The graph as JSON; release with [`rhm_string_free`].
///
/// # Safety
/// `g` is a live graph handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_graph_to_json(g: *const RhmGraph, out: *mut *mut c_char) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        let json = serde_json::to_string(&handle(g)?.graph.to_json()).map_err(Error::from)?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// Loads a bundle (directory or manifest path) or a `builtin:...` description.
///
/// # Safety
/// `spec` is nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_structure_load(spec: *const c_char, out: *mut *mut RhmStructure) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        let structure = Arc::new(load_structure(text(spec)?)?);
        *out = Box::into_raw(Box::new(RhmStructure { structure }));
        Ok(())
    })
}

/// # Safety
/// `s` is null or a live structure handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_structure_free(s: *mut RhmStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Normal-form membership test; builtin structures only.
///
/// # Safety
/// `s` is a live structure handle, strings nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_oracle(
    s: *const RhmStructure,
    subgroup: *const c_char,
    element: *const c_char,
    out: *mut bool,
) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        let s = &handle(s)?.structure;
        let family = s.family().ok_or_else(|| Error::NoOracle("structure has no normal-form oracle".into()))?;
        let a = s.alphabet();
        *out = family_membership(family, &a.parse_word_list(text(subgroup)?)?, &a.parse_word(text(element)?)?)?;
        Ok(())
    })
}

/// Runs the relative Stallings computation for at most `budget` iterations.
/// `certified` tells whether the result answers membership queries.
///
/// # Safety
/// `s` is a live structure handle, strings nul-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_lgraph_compute(
    s: *const RhmStructure,
    subgroup: *const c_char,
    budget: usize,
    out: *mut *mut RhmLGraph,
    certified: *mut bool,
) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        out_ptr(certified)?;
        let s = handle(s)?.structure.clone();
        let gens = s.alphabet().parse_word_list(text(subgroup)?)?;
        let graph = match LStallingsRun::new(s, &gens)?.run(budget)? {
            LStallingsOutcome::Certified(g) => Some(g),
            LStallingsOutcome::BudgetExhausted { .. } => None,
        };
        *certified = graph.is_some();
        *out = Box::into_raw(Box::new(RhmLGraph { graph }));
        Ok(())
    })
}

/// # Safety
/// `g` is a live handle, `word` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_lgraph_contains(g: *const RhmLGraph, word: *const c_char, out: *mut bool) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        let g = handle(g)?.graph.as_ref().ok_or(Error::Uncertified)?;
        let w = g.structure().alphabet().parse_word(text(word)?)?;
        *out = g.membership(&w)?;
        Ok(())
    })
}

/// # Safety
/// `g` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_lgraph_free(g: *mut RhmLGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Builds an instance from presentation JSON text and a structure. The
/// structure handle stays owned by the caller.
///
/// # Safety
/// `presentation_json` nul-terminated, `s` a live structure handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_instance_new(
    presentation_json: *const c_char,
    s: *const RhmStructure,
    out: *mut *mut RhmInstance,
) -> RhmStatus {
    guard(|| {
        out_ptr(out)?;
        let (pres, peripherals) = PresentationFile::parse(text(presentation_json)?)?.build()?;
        let instance = RelHypInstance::new(pres, peripherals, handle(s)?.structure.clone())?;
        *out = Box::into_raw(Box::new(RhmInstance { instance }));
        Ok(())
    })
}

/// # Safety
/// `i` is null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn rhm_instance_free(i: *mut RhmInstance) {
    if !i.is_null() {
        drop(Box::from_raw(i));
    }
}

/// Decides membership of `element` in the subgroup generated by
/// `subgroup`. If `report` is non-null it receives the JSON report,
/// certificate included; release it with [`rhm_string_free`].
///
/// # Safety
/// `i` is a live instance handle, strings nul-terminated, `verdict` writable,
/// `report` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rhm_member(
    i: *const RhmInstance,
    subgroup: *const c_char,
    element: *const c_char,
    budget: usize,
    schedule: RhmSchedule,
    verdict: *mut RhmVerdict,
    report: *mut *mut c_char,
) -> RhmStatus {
    guard(|| {
        out_ptr(verdict)?;
        let inst = &handle(i)?.instance;
        let a = inst.presentation().alphabet();
        let gens = a.parse_word_list(text(subgroup)?)?;
        let g = a.parse_word(text(element)?)?;
        let schedule = match schedule {
            RhmSchedule::Diag => Schedule::Diag,
            RhmSchedule::Alt => Schedule::Alt,
        };
        let v = decide_membership(inst, &gens, &g, schedule, budget)?;
        *verdict = match v {
            MembershipVerdict::Member { .. } => RhmVerdict::Member,
            MembershipVerdict::NonMember { .. } => RhmVerdict::NonMember,
            MembershipVerdict::BudgetExhausted { .. } => RhmVerdict::BudgetExhausted,
        };
        if !report.is_null() {
            let r = VerdictReport::new(&v, inst, &gens, &g);
            *report = into_c_string(serde_json::to_string(&r).map_err(Error::from)?);
        }
        Ok(())
    })
}
