//! C ABI over `dea-frontier`.
//!
//! Every function returns a [`DfStatus`]; results go through out-pointers.
//! On failure the message is available from [`df_last_error`] until the
//! next call on the same thread. Handles are opaque and must be released
//! with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dea_frontier::dataset::Dataset;
use dea_frontier::dea::{self, Orientation, UnitClass};
use dea_frontier::error::Error;
use dea_frontier::improve::{self, ImproveParams, ImprovementResult};
use dea_frontier::{io, terminal};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    OutsidePps = 3,
    Numerical = 4,
    Convergence = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfOrientation {
    Input = 0,
    Output = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfClass {
    ExtremeEfficient = 0,
    EfficientNonextreme = 1,
    WeaklyEfficient = 2,
    Inefficient = 3,
}

/// Opaque dataset handle.
pub struct DfDataset {
    inner: Dataset,
}

/// Opaque handle to the outcome of an improvement run.
pub struct DfImprovement {
    inner: ImprovementResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> DfStatus {
    match err {
        Error::OutsidePps => DfStatus::OutsidePps,
        Error::Numerical { .. } => DfStatus::Numerical,
        Error::Convergence { .. } => DfStatus::Convergence,
        Error::Io { .. } => DfStatus::Io,
        _ => DfStatus::InvalidInput,
    }
}

fn fail(err: Error) -> DfStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn guard(f: impl FnOnce() -> DfStatus) -> DfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            DfStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("`", stringify!($p), "` is null"));
            return DfStatus::NullPointer;
        })+
    };
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn df_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a dataset from row-major `n × m` inputs and `n × r` outputs.
/// Units are named `u1`, `u2`, ….
///
/// # Safety
/// `inputs` must hold `n*m` doubles, `outputs` `n*r` doubles, and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_dataset_new(
    n: usize,
    m: usize,
    r: usize,
    inputs: *const f64,
    outputs: *const f64,
    out: *mut *mut DfDataset,
) -> DfStatus {
    guard(|| {
        non_null!(inputs, outputs, out);
        if m == 0 || r == 0 {
            set_error("need at least one input and one output");
            return DfStatus::InvalidInput;
        }
        let (Some(nx), Some(ny)) = (n.checked_mul(m), n.checked_mul(r)) else {
            set_error("dimensions overflow");
            return DfStatus::InvalidInput;
        };
        let xs = std::slice::from_raw_parts(inputs, nx);
        let ys = std::slice::from_raw_parts(outputs, ny);
        let ids = (1..=n).map(|j| format!("u{j}")).collect();
        let x = xs.chunks(m).map(<[f64]>::to_vec).collect();
        let y = ys.chunks(r).map(<[f64]>::to_vec).collect();
        match Dataset::new(ids, x, y) {
            Ok(ds) => {
                *out = Box::into_raw(Box::new(DfDataset { inner: ds }));
                DfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_dataset_load_csv(path: *const c_char, out: *mut *mut DfDataset) -> DfStatus {
    guard(|| {
        non_null!(path, out);
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            set_error("path is not valid UTF-8");
            return DfStatus::InvalidInput;
        };
        match io::load_csv(path) {
            Ok(ds) => {
                *out = Box::into_raw(Box::new(DfDataset { inner: ds }));
                DfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `ds` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn df_dataset_save_csv(ds: *const DfDataset, path: *const c_char) -> DfStatus {
    guard(|| {
        non_null!(ds, path);
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            set_error("path is not valid UTF-8");
            return DfStatus::InvalidInput;
        };
        match io::save_csv(&(*ds).inner, path, None) {
            Ok(()) => DfStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Releases a dataset handle. Null is ignored.
///
/// # Safety
/// `ds` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn df_dataset_free(ds: *mut DfDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Writes the number of units, inputs and outputs; any out-pointer may be
/// null.
///
/// # Safety
/// `ds` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_dataset_shape(ds: *const DfDataset, n: *mut usize, m: *mut usize, r: *mut usize) -> DfStatus {
    guard(|| {
        non_null!(ds);
        let d = &(*ds).inner;
        for (p, v) in [(n, d.len()), (m, d.num_inputs()), (r, d.num_outputs())] {
            if !p.is_null() {
                *p = v;
            }
        }
        DfStatus::Ok
    })
}

/// Copies unit `j`'s inputs and outputs into caller buffers of length m and r.
///
/// # Safety
/// `ds` must be a live handle; `inputs` and `outputs` must be writable for
/// m and r doubles.
#[no_mangle]
pub unsafe extern "C" fn df_dataset_unit(ds: *const DfDataset, j: usize, inputs: *mut f64, outputs: *mut f64) -> DfStatus {
    guard(|| {
        non_null!(ds, inputs, outputs);
        let d = &(*ds).inner;
        if j >= d.len() {
            set_error(format!("unit index {j} out of range"));
            return DfStatus::InvalidInput;
        }
        ptr::copy_nonoverlapping(d.input(j).as_ptr(), inputs, d.num_inputs());
        ptr::copy_nonoverlapping(d.output(j).as_ptr(), outputs, d.num_outputs());
        DfStatus::Ok
    })
}

/// BCC score of unit `j` (θ* for input, η* for output orientation).
///
/// # Safety
/// `ds` must be a live handle and `score` writable.
#[no_mangle]
pub unsafe extern "C" fn df_score(ds: *const DfDataset, j: usize, orientation: DfOrientation, score: *mut f64) -> DfStatus {
    guard(|| {
        non_null!(ds, score);
        let d = &(*ds).inner;
        if j >= d.len() {
            set_error(format!("unit index {j} out of range"));
            return DfStatus::InvalidInput;
        }
        let o = match orientation {
            DfOrientation::Input => Orientation::Input,
            DfOrientation::Output => Orientation::Output,
        };
        match dea::bcc_oriented(d, &d.point(j), o) {
            Ok(res) => {
                *score = res.score;
                DfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `ds` must be a live handle and `class` writable.
#[no_mangle]
pub unsafe extern "C" fn df_classify(ds: *const DfDataset, j: usize, class: *mut DfClass) -> DfStatus {
    guard(|| {
        non_null!(ds, class);
        let d = &(*ds).inner;
        if j >= d.len() {
            set_error(format!("unit index {j} out of range"));
            return DfStatus::InvalidInput;
        }
        match dea::classify(d, j) {
            Ok(c) => {
                *class = match c {
                    UnitClass::ExtremeEfficient => DfClass::ExtremeEfficient,
                    UnitClass::EfficientNonextreme => DfClass::EfficientNonextreme,
                    UnitClass::WeaklyEfficient => DfClass::WeaklyEfficient,
                    UnitClass::Inefficient => DfClass::Inefficient,
                };
                DfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of terminal directions of unit `j` (0 when it is not terminal).
///
/// # Safety
/// `ds` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn df_terminal_count(ds: *const DfDataset, j: usize, count: *mut usize) -> DfStatus {
    guard(|| {
        non_null!(ds, count);
        let d = &(*ds).inner;
        if j >= d.len() {
            set_error(format!("unit index {j} out of range"));
            return DfStatus::InvalidInput;
        }
        match terminal::terminal_directions(d, j) {
            Ok(dirs) => {
                *count = dirs.len();
                DfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs the improvement with default parameters. On `CONVERGENCE` the
/// partial result is still returned through `out` when available.
///
/// # Safety
/// `ds` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_improve(ds: *const DfDataset, out: *mut *mut DfImprovement) -> DfStatus {
    guard(|| {
        non_null!(ds, out);
        *out = ptr::null_mut();
        match improve::improve_frontier(&(*ds).inner, &ImproveParams::default()) {
            Ok(res) => {
                *out = Box::into_raw(Box::new(DfImprovement { inner: res }));
                DfStatus::Ok
            }
            Err(Error::Convergence { part, broken, partial }) => {
                set_error(format!("part {part} did not converge; still broken: {}", broken.join(",")));
                if let Some(p) = partial {
                    *out = Box::into_raw(Box::new(DfImprovement { inner: *p }));
                }
                DfStatus::Convergence
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `res` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn df_improvement_free(res: *mut DfImprovement) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Whether all guarantees hold, and how many artificial units were kept.
///
/// # Safety
/// `res` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_improvement_summary(res: *const DfImprovement, certified: *mut bool, kept: *mut usize) -> DfStatus {
    guard(|| {
        non_null!(res);
        let r = &(*res).inner;
        if !certified.is_null() {
            *certified = r.certificate.holds();
        }
        if !kept.is_null() {
            *kept = r.kept().count();
        }
        DfStatus::Ok
    })
}

/// New dataset handle holding the improved data (originals first).
///
/// # Safety
/// `res` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_improvement_dataset(res: *const DfImprovement, out: *mut *mut DfDataset) -> DfStatus {
    guard(|| {
        non_null!(res, out);
        *out = Box::into_raw(Box::new(DfDataset { inner: (*res).inner.improved.clone() }));
        DfStatus::Ok
    })
}
