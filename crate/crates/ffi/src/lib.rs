//! C ABI for `sheafharm`.
//!
//! Every function returns an [`ShStatus`]. On failure a message is available
//! from [`sh_last_error_message`] on the same thread until the next failure.
//! Handles are opaque and must be released with their matching `_free`
//! function; strings returned by the library are released with
//! [`sh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sheafharm::attention::{gat_sheaf, GatTriple};
use sheafharm::filtration::{barcode, build_filtration, FiltrationMode};
use sheafharm::harmonic::edge_residuals;
use sheafharm::io::{parse_triple, write_barcode, BarcodeFormat};
use sheafharm::sheaf::{constant_sheaf, global_sections, laplacian_spectrum, CellularSheaf};
use sheafharm::Error;

/// Parsed and validated GAT triple.
pub struct ShTriple {
    inner: GatTriple,
}

/// Cellular sheaf on a triple's graph.
pub struct ShSheaf {
    inner: CellularSheaf,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Schema = 4,
    Validation = 5,
    Analysis = 6,
    InvalidArgument = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

pub const SH_MODE_FULL: u32 = 0;
pub const SH_MODE_EDGE_CLOSURE: u32 = 1;
pub const SH_MODE_NODES_ONLY: u32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: ShStatus, message: &str) -> ShStatus {
    set_error(message);
    status
}

fn status_of(e: &Error) -> ShStatus {
    match e {
        Error::Parse { .. } | Error::Io(_) => ShStatus::Parse,
        Error::Schema { .. } => ShStatus::Schema,
        Error::Validation(_) => ShStatus::Validation,
        Error::InvalidParameter(_) | Error::InvalidDimension(_) => ShStatus::InvalidArgument,
        _ => ShStatus::Analysis,
    }
}

/// Runs `body`, turning library errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), ShStatus>) -> ShStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ShStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(ShStatus::Panic, "internal panic"),
    }
}

fn check<T>(r: sheafharm::Result<T>) -> Result<T, ShStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, ShStatus> {
    p.as_ref()
        .ok_or_else(|| fail(ShStatus::NullPointer, "null pointer argument"))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, ShStatus> {
    p.as_mut()
        .ok_or_else(|| fail(ShStatus::NullPointer, "null output pointer"))
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn sh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a triple document of `len` bytes.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out_triple` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_triple_parse(
    data: *const u8,
    len: usize,
    out_triple: *mut *mut ShTriple,
) -> ShStatus {
    guard(|| {
        let slot = out(out_triple)?;
        *slot = ptr::null_mut();
        if data.is_null() {
            return Err(fail(ShStatus::NullPointer, "null data pointer"));
        }
        let bytes = std::slice::from_raw_parts(data, len);
        let inner = check(parse_triple(bytes))?;
        *slot = Box::into_raw(Box::new(ShTriple { inner }));
        Ok(())
    })
}

/// Parses a NUL-terminated document.
///
/// # Safety
/// `text` must be a valid C string; `out_triple` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_triple_parse_cstr(
    text: *const c_char,
    out_triple: *mut *mut ShTriple,
) -> ShStatus {
    if text.is_null() {
        return fail(ShStatus::NullPointer, "null string");
    }
    let bytes = CStr::from_ptr(text).to_bytes();
    if std::str::from_utf8(bytes).is_err() {
        return fail(ShStatus::InvalidUtf8, "document is not valid UTF-8");
    }
    sh_triple_parse(bytes.as_ptr(), bytes.len(), out_triple)
}

/// # Safety
/// `triple` must be null or a handle from [`sh_triple_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_triple_free(triple: *mut ShTriple) {
    if !triple.is_null() {
        drop(Box::from_raw(triple));
    }
}

/// # Safety
/// `triple` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_triple_node_count(
    triple: *const ShTriple,
    count: *mut usize,
) -> ShStatus {
    guard(|| {
        *out(count)? = deref(triple)?.inner.graph.node_count();
        Ok(())
    })
}

/// # Safety
/// `triple` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_triple_edge_count(
    triple: *const ShTriple,
    count: *mut usize,
) -> ShStatus {
    guard(|| {
        *out(count)? = deref(triple)?.inner.graph.edge_count();
        Ok(())
    })
}

/// Sheaf whose restrictions are the triple's attention weights times the identity.
///
/// # Safety
/// `triple` must be a live handle and `out_sheaf` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_sheaf_gat(
    triple: *const ShTriple,
    out_sheaf: *mut *mut ShSheaf,
) -> ShStatus {
    guard(|| {
        let slot = out(out_sheaf)?;
        *slot = ptr::null_mut();
        let inner = check(gat_sheaf(&deref(triple)?.inner))?;
        *slot = Box::into_raw(Box::new(ShSheaf { inner }));
        Ok(())
    })
}

/// Constant sheaf of stalk dimension `dim` on the triple's graph.
///
/// # Safety
/// `triple` must be a live handle and `out_sheaf` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_sheaf_constant(
    triple: *const ShTriple,
    dim: usize,
    out_sheaf: *mut *mut ShSheaf,
) -> ShStatus {
    guard(|| {
        let slot = out(out_sheaf)?;
        *slot = ptr::null_mut();
        let inner = check(constant_sheaf(&deref(triple)?.inner.graph, dim))?;
        *slot = Box::into_raw(Box::new(ShSheaf { inner }));
        Ok(())
    })
}

/// # Safety
/// `sheaf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sh_sheaf_free(sheaf: *mut ShSheaf) {
    if !sheaf.is_null() {
        drop(Box::from_raw(sheaf));
    }
}

/// Dimension of the global section space with relative rank cutoff `tol`.
///
/// # Safety
/// `sheaf` must be a live handle and `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_sheaf_section_dim(
    sheaf: *const ShSheaf,
    tol: f64,
    dim: *mut usize,
) -> ShStatus {
    guard(|| {
        let basis = check(global_sections(&deref(sheaf)?.inner, tol))?;
        *out(dim)? = basis.dimension();
        Ok(())
    })
}

/// Ascending Laplacian eigenvalues. `len` receives the number of values; if
/// `capacity` is too small nothing is copied and `BufferTooSmall` is returned.
/// `values` may be null when `capacity` is 0.
///
/// # Safety
/// `values` must have room for `capacity` doubles; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_sheaf_spectrum(
    sheaf: *const ShSheaf,
    values: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ShStatus {
    guard(|| {
        let spectrum = laplacian_spectrum(&deref(sheaf)?.inner);
        *out(len)? = spectrum.len();
        if spectrum.len() > capacity {
            return Err(fail(
                ShStatus::BufferTooSmall,
                &format!("spectrum needs {} values", spectrum.len()),
            ));
        }
        if !spectrum.is_empty() {
            if values.is_null() {
                return Err(fail(ShStatus::NullPointer, "null output buffer"));
            }
            ptr::copy_nonoverlapping(spectrum.as_ptr(), values, spectrum.len());
        }
        Ok(())
    })
}

/// Barcode of the residual filtration of the triple's features as JSON.
/// `sheaf` may be null to use the attention sheaf. `mode` is one of the
/// `SH_MODE_*` constants.
///
/// # Safety
/// `triple` must be a live handle, `sheaf` null or live, `json` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_barcode_json(
    triple: *const ShTriple,
    sheaf: *const ShSheaf,
    mode: u32,
    include_zero_bars: bool,
    json: *mut *mut c_char,
) -> ShStatus {
    guard(|| {
        let slot = out(json)?;
        *slot = ptr::null_mut();
        let t = &deref(triple)?.inner;
        let mode = match mode {
            SH_MODE_FULL => FiltrationMode::Full,
            SH_MODE_EDGE_CLOSURE => FiltrationMode::EdgeClosure,
            SH_MODE_NODES_ONLY => FiltrationMode::NodesOnly,
            other => {
                return Err(fail(
                    ShStatus::InvalidArgument,
                    &format!("unknown mode {other}"),
                ))
            }
        };
        let owned;
        let sh = match sheaf.as_ref() {
            Some(s) => &s.inner,
            None => {
                owned = check(gat_sheaf(t))?;
                &owned
            }
        };
        let residuals = check(edge_residuals(sh, &t.features))?;
        let f = check(build_filtration(&t.graph, &residuals, mode))?;
        let text = write_barcode(&check(barcode(&f, include_zero_bars))?, BarcodeFormat::Json);
        *slot = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
