//! C ABI for the ginisim scoring library.
//!
//! Handles are opaque pointers created and freed by this library; every
//! fallible call returns a [`GsStatus`] and stores a human-readable message
//! retrievable with [`gs_last_error`] on failure. Paths and returned strings
//! are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::PathBuf;
use std::ptr;

use ginisim::cli::{CliFailure, EXIT_PARSE};
use ginisim::dataset::{load_csv_vectors, load_idx_pair, VectorDataset};
use ginisim::gini::{gini_coefficient, score_dataset, write_scores_csv, GiniScoreSet};
use ginisim::sampling::emd_1d;
use ginisim::similarity::DEFAULT_BAND_ROWS;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input could not be read or parsed.
    ParseError = 3,
    /// Input parsed but failed validation.
    ValidationError = 4,
}

/// Opaque handle to a loaded vector dataset.
pub struct GsDataset {
    inner: VectorDataset,
}

/// Opaque handle to a computed score set. Id and class strings returned for
/// a score set stay valid until the handle is freed.
pub struct GsScores {
    inner: GiniScoreSet,
    ids: Vec<CString>,
    classes: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = CString::new(message.replace('\0', " "))
        .unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn fail(failure: CliFailure) -> GsStatus {
    set_error(&failure.message);
    if failure.code == EXIT_PARSE {
        GsStatus::ParseError
    } else {
        GsStatus::ValidationError
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// # Safety
/// `ptr` must be non-NULL and NUL-terminated.
unsafe fn path_arg(ptr: *const c_char) -> Result<PathBuf, GsStatus> {
    if ptr.is_null() {
        set_error("NULL path argument");
        return Err(GsStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(GsStatus::InvalidUtf8)
        }
    }
}

/// Load an IDX image/label pair (gzip accepted).
///
/// # Safety
/// `images_path` and `labels_path` must be NUL-terminated strings; `out`
/// must be a valid pointer. On success `*out` owns the dataset and must be
/// released with [`gs_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn gs_dataset_open_idx(
    images_path: *const c_char,
    labels_path: *const c_char,
    out: *mut *mut GsDataset,
) -> GsStatus {
    if out.is_null() {
        set_error("NULL out argument");
        return GsStatus::NullArgument;
    }
    let images = match path_arg(images_path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let labels = match path_arg(labels_path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match load_idx_pair(&images, &labels) {
        Ok(ds) => {
            *out = Box::into_raw(Box::new(GsDataset { inner: ds }));
            GsStatus::Ok
        }
        Err(e) => fail(e.into()),
    }
}

/// Load a CSV embedding file with header `id,label,x0,...`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
/// On success `*out` owns the dataset and must be released with
/// [`gs_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn gs_dataset_open_csv(
    path: *const c_char,
    out: *mut *mut GsDataset,
) -> GsStatus {
    if out.is_null() {
        set_error("NULL out argument");
        return GsStatus::NullArgument;
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match load_csv_vectors(&path) {
        Ok(ds) => {
            *out = Box::into_raw(Box::new(GsDataset { inner: ds }));
            GsStatus::Ok
        }
        Err(e) => fail(e.into()),
    }
}

/// Number of items, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle from a `gs_dataset_open_*` call.
#[no_mangle]
pub unsafe extern "C" fn gs_dataset_len(ds: *const GsDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.len())
}

/// Vector dimensionality, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle from a `gs_dataset_open_*` call.
#[no_mangle]
pub unsafe extern "C" fn gs_dataset_dim(ds: *const GsDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.dim())
}

/// # Safety
/// `ds` must be NULL (no-op) or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_dataset_free(ds: *mut GsDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Score a dataset: per-class dissimilarity Ginis plus MinMax normalization
/// (per class when `per_class`, else across the whole set). `band_rows = 0`
/// selects the default band size.
///
/// # Safety
/// `ds` must be a live dataset handle and `out` a valid pointer. On success
/// `*out` owns the scores and must be released with [`gs_scores_free`].
#[no_mangle]
pub unsafe extern "C" fn gs_scores_compute(
    ds: *const GsDataset,
    band_rows: usize,
    per_class: bool,
    out: *mut *mut GsScores,
) -> GsStatus {
    if ds.is_null() || out.is_null() {
        set_error("NULL argument");
        return GsStatus::NullArgument;
    }
    let band = if band_rows == 0 {
        DEFAULT_BAND_ROWS
    } else {
        band_rows
    };
    match score_dataset(&(*ds).inner, band, per_class) {
        Ok((scores, _warnings)) => {
            let ids = scores
                .ids
                .iter()
                .map(|s| CString::new(s.as_str()).unwrap_or_default())
                .collect();
            let classes = scores
                .class_tags
                .iter()
                .map(|s| CString::new(s.as_str()).unwrap_or_default())
                .collect();
            *out = Box::into_raw(Box::new(GsScores {
                inner: scores,
                ids,
                classes,
            }));
            GsStatus::Ok
        }
        Err(e) => fail(e.into()),
    }
}

/// Number of scored items, or 0 for NULL.
///
/// # Safety
/// `scores` must be NULL or a live handle from [`gs_scores_compute`].
#[no_mangle]
pub unsafe extern "C" fn gs_scores_len(scores: *const GsScores) -> usize {
    scores.as_ref().map_or(0, |s| s.inner.len())
}

/// Raw Gini coefficient of item `index`.
///
/// # Safety
/// `scores` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_scores_raw(
    scores: *const GsScores,
    index: usize,
    out: *mut f64,
) -> GsStatus {
    if scores.is_null() || out.is_null() {
        set_error("NULL argument");
        return GsStatus::NullArgument;
    }
    let s = &(*scores).inner;
    if index >= s.len() {
        set_error("index out of range");
        return GsStatus::ValidationError;
    }
    *out = s.raw[index];
    GsStatus::Ok
}

/// MinMax-normalized Gini coefficient of item `index`.
///
/// # Safety
/// `scores` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_scores_normalized(
    scores: *const GsScores,
    index: usize,
    out: *mut f64,
) -> GsStatus {
    if scores.is_null() || out.is_null() {
        set_error("NULL argument");
        return GsStatus::NullArgument;
    }
    let s = &(*scores).inner;
    match s.normalized() {
        Ok(values) if index < values.len() => {
            *out = values[index];
            GsStatus::Ok
        }
        Ok(_) => {
            set_error("index out of range");
            GsStatus::ValidationError
        }
        Err(e) => fail(e.into()),
    }
}

/// Item id of `index`; NULL when out of range. Valid until the handle is
/// freed.
///
/// # Safety
/// `scores` must be NULL or a live handle from [`gs_scores_compute`].
#[no_mangle]
pub unsafe extern "C" fn gs_scores_id(scores: *const GsScores, index: usize) -> *const c_char {
    match scores.as_ref() {
        Some(s) if index < s.ids.len() => s.ids[index].as_ptr(),
        _ => ptr::null(),
    }
}

/// Class tag of `index`; NULL when out of range. Valid until the handle is
/// freed.
///
/// # Safety
/// `scores` must be NULL or a live handle from [`gs_scores_compute`].
#[no_mangle]
pub unsafe extern "C" fn gs_scores_class(scores: *const GsScores, index: usize) -> *const c_char {
    match scores.as_ref() {
        Some(s) if index < s.classes.len() => s.classes[index].as_ptr(),
        _ => ptr::null(),
    }
}

/// Write the scores as `id,class,gini_raw,gini_norm` CSV.
///
/// # Safety
/// `scores` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gs_scores_write_csv(
    scores: *const GsScores,
    path: *const c_char,
) -> GsStatus {
    if scores.is_null() {
        set_error("NULL scores argument");
        return GsStatus::NullArgument;
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let file = match std::fs::File::create(&path) {
        Ok(f) => f,
        Err(e) => {
            set_error(&format!("{}: {e}", path.display()));
            return GsStatus::ParseError;
        }
    };
    match write_scores_csv(file, &(*scores).inner) {
        Ok(()) => GsStatus::Ok,
        Err(e) => fail(e.into()),
    }
}

/// # Safety
/// `scores` must be NULL (no-op) or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_scores_free(scores: *mut GsScores) {
    if !scores.is_null() {
        drop(Box::from_raw(scores));
    }
}

/// Gini coefficient of `len` nonnegative values.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gs_gini(values: *const f64, len: usize, out: *mut f64) -> GsStatus {
    if values.is_null() || out.is_null() {
        set_error("NULL argument");
        return GsStatus::NullArgument;
    }
    let slice = std::slice::from_raw_parts(values, len);
    match gini_coefficient(slice) {
        Ok(g) => {
            *out = g;
            GsStatus::Ok
        }
        Err(e) => fail(e.into()),
    }
}

/// First Wasserstein distance between two 1-D samples.
///
/// # Safety
/// `a` and `b` must point to `a_len` / `b_len` readable doubles; `out` must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn gs_emd(
    a: *const f64,
    a_len: usize,
    b: *const f64,
    b_len: usize,
    out: *mut f64,
) -> GsStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        set_error("NULL argument");
        return GsStatus::NullArgument;
    }
    if a_len == 0 || b_len == 0 {
        set_error("emd needs nonempty inputs");
        return GsStatus::ValidationError;
    }
    let a = std::slice::from_raw_parts(a, a_len);
    let b = std::slice::from_raw_parts(b, b_len);
    *out = emd_1d(a, b);
    GsStatus::Ok
}
