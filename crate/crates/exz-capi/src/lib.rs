//! C ABI over the exz library: opaque handles, integer status codes, and a
//! per-thread error message. Every entry point catches panics, so the
//! boundary never unwinds into foreign frames.
//!
//! Conventions:
//! * constructors write a handle through an out-pointer and the caller frees
//!   it with the matching `*_free` function; `*_free` accepts null;
//! * scalar results go through out-pointers, arrays into caller-allocated
//!   buffers whose lengths are queried first;
//! * on any status other than `EXZ_STATUS_OK`, `exz_last_error` returns a
//!   message describing the failure on the calling thread.

use exz::error::Error;
use exz::geometry::Domain;
use exz::num::{Cx, PrecisionContext};
use exz::orthopoly::{bergman_arnoldi, faber_from_series, ExteriorMapSeries, OrthoSequence};
use exz::potential::{capacity_leja, cloud_from_zeros, leja_points, MeasureCloud};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExzStatus {
    /// Success.
    Ok = 0,
    /// Runtime failure (convergence, precision, sampling, I/O).
    RuntimeError = 1,
    /// Invalid input: geometry, configuration, or parse errors.
    InvalidInput = 2,
    /// Null handle or output pointer.
    NullPointer = 3,
    /// Internal panic; state may be inconsistent.
    Panic = 4,
}

/// Planar domain handle.
pub struct ExzDomain {
    inner: Domain,
}

/// Polynomial sequence handle (recurrence form).
pub struct ExzSequence {
    inner: OrthoSequence,
}

/// Weighted atomic measure handle.
pub struct ExzCloud {
    inner: MeasureCloud,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let clean: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> ExzStatus {
    set_error(&err.to_string());
    match err.exit_code() {
        2 => ExzStatus::InvalidInput,
        _ => ExzStatus::RuntimeError,
    }
}

fn guard(body: impl FnOnce() -> ExzStatus) -> ExzStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            ExzStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

fn null_status(what: &str) -> ExzStatus {
    set_error(&format!("{what} must not be null"));
    ExzStatus::NullPointer
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes) and returns the full message length in bytes,
/// excluding the NUL. `buf` may be null when only the length is wanted.
#[no_mangle]
pub unsafe extern "C" fn exz_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Frees a string returned by this library. Accepts null.
#[no_mangle]
pub unsafe extern "C" fn exz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a domain from its JSON description.
#[no_mangle]
pub unsafe extern "C" fn exz_domain_from_json(
    json: *const c_char,
    out: *mut *mut ExzDomain,
) -> ExzStatus {
    guard(|| {
        if out.is_null() {
            return null_status("out");
        }
        let Some(text) = read_str(json) else {
            return null_status("json (UTF-8)");
        };
        match exz::io::domain_from_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ExzDomain { inner }));
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Frees a domain handle. Accepts null.
#[no_mangle]
pub unsafe extern "C" fn exz_domain_free(d: *mut ExzDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Serializes a domain back to normalized JSON; free with `exz_string_free`.
#[no_mangle]
pub unsafe extern "C" fn exz_domain_to_json(
    d: *const ExzDomain,
    out: *mut *mut c_char,
) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if out.is_null() {
            return null_status("out");
        }
        let text = exz::io::domain_to_json(&(*d).inner);
        match CString::new(text) {
            Ok(c) => {
                *out = c.into_raw();
                ExzStatus::Ok
            }
            Err(_) => {
                set_error("serialized JSON contained an interior NUL");
                ExzStatus::RuntimeError
            }
        }
    })
}

/// Euclidean diameter of the domain.
#[no_mangle]
pub unsafe extern "C" fn exz_domain_diameter(d: *const ExzDomain, out: *mut f64) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if out.is_null() {
            return null_status("out");
        }
        *out = (*d).inner.diameter();
        ExzStatus::Ok
    })
}

/// Number of boundary corners.
#[no_mangle]
pub unsafe extern "C" fn exz_domain_corner_count(
    d: *const ExzDomain,
    out: *mut usize,
) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if out.is_null() {
            return null_status("out");
        }
        *out = (*d).inner.corner_scan().len();
        ExzStatus::Ok
    })
}

/// Writes 1 when the domain carries an inward corner on every hull
/// component, which predicts convergence of the full zero-counting
/// sequence; 0 otherwise.
#[no_mangle]
pub unsafe extern "C" fn exz_domain_full_sequence_predicted(
    d: *const ExzDomain,
    out: *mut i32,
) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if out.is_null() {
            return null_status("out");
        }
        let v = (*d).inner.theorem_verdict();
        *out = i32::from(v.full_sequence_convergence_predicted);
        ExzStatus::Ok
    })
}

/// Builds the area-orthonormal sequence up to degree `n_max` at the given
/// bit precision (minimum 128).
#[no_mangle]
pub unsafe extern "C" fn exz_bergman(
    d: *const ExzDomain,
    n_max: usize,
    precision_bits: u32,
    out: *mut *mut ExzSequence,
) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if out.is_null() {
            return null_status("out");
        }
        let r = PrecisionContext::for_degree(precision_bits, n_max)
            .and_then(|ctx| bergman_arnoldi(&(*d).inner, n_max, &ctx));
        match r {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ExzSequence { inner }));
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Builds the monic Faber-type sequence for the segment [-half, half];
/// `half` is a decimal or fraction string such as "2" or "5/2".
#[no_mangle]
pub unsafe extern "C" fn exz_faber_segment(
    half: *const c_char,
    n_max: usize,
    precision_bits: u32,
    out: *mut *mut ExzSequence,
) -> ExzStatus {
    guard(|| {
        if out.is_null() {
            return null_status("out");
        }
        let Some(text) = read_str(half) else {
            return null_status("half (UTF-8)");
        };
        let r = exz::io::parse_rational_string(text).and_then(|h| {
            let ctx = PrecisionContext::for_degree(precision_bits, n_max)?;
            let series = ExteriorMapSeries::segment(&h, n_max + 1, precision_bits)?;
            faber_from_series(&series, n_max, &ctx)
        });
        match r {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ExzSequence { inner }));
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Frees a sequence handle. Accepts null.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_free(s: *mut ExzSequence) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Highest degree the sequence carries.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_n_max(s: *const ExzSequence, out: *mut usize) -> ExzStatus {
    guard(|| {
        if s.is_null() {
            return null_status("sequence");
        }
        if out.is_null() {
            return null_status("out");
        }
        *out = (*s).inner.n_max();
        ExzStatus::Ok
    })
}

/// Recurrence entry h_{row,col} rounded to double precision.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_entry(
    s: *const ExzSequence,
    row: usize,
    col: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> ExzStatus {
    guard(|| {
        if s.is_null() {
            return null_status("sequence");
        }
        if out_re.is_null() || out_im.is_null() {
            return null_status("out");
        }
        let seq = &(*s).inner;
        if col >= seq.n_max() || row > seq.n_max() {
            set_error(&format!(
                "entry ({row}, {col}) outside the {}x{} recurrence matrix",
                seq.n_max() + 1,
                seq.n_max()
            ));
            return ExzStatus::InvalidInput;
        }
        let e = seq.hessenberg().get(row, col);
        *out_re = e.re.to_f64();
        *out_im = e.im.to_f64();
        ExzStatus::Ok
    })
}

/// Evaluates the degree-n polynomial at z = re + i*im, in double precision.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_evaluate(
    s: *const ExzSequence,
    re: f64,
    im: f64,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> ExzStatus {
    guard(|| {
        if s.is_null() {
            return null_status("sequence");
        }
        if out_re.is_null() || out_im.is_null() {
            return null_status("out");
        }
        let seq = &(*s).inner;
        let z = Cx::from_f64(re, im, seq.precision_bits());
        match seq.evaluate(&z, n) {
            Ok(v) => {
                let (a, b) = v.to_f64s();
                *out_re = a;
                *out_im = b;
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Zeros of the degree-n polynomial, rounded to double precision, written
/// into caller buffers of length n.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_zeros(
    s: *const ExzSequence,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> ExzStatus {
    guard(|| {
        if s.is_null() {
            return null_status("sequence");
        }
        if out_re.is_null() || out_im.is_null() {
            return null_status("out");
        }
        let seq = &(*s).inner;
        let r = PrecisionContext::for_degree(seq.precision_bits(), seq.n_max())
            .and_then(|ctx| seq.zeros(n, &ctx));
        match r {
            Ok(zs) => {
                for (i, z) in zs.iter().enumerate() {
                    let (a, b) = z.to_f64s();
                    *out_re.add(i) = a;
                    *out_im.add(i) = b;
                }
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Serializes the sequence (full precision) to JSON; free with
/// `exz_string_free`.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_to_json(
    s: *const ExzSequence,
    out: *mut *mut c_char,
) -> ExzStatus {
    guard(|| {
        if s.is_null() {
            return null_status("sequence");
        }
        if out.is_null() {
            return null_status("out");
        }
        let text = exz::io::sequence_to_json(&(*s).inner);
        match CString::new(text) {
            Ok(c) => {
                *out = c.into_raw();
                ExzStatus::Ok
            }
            Err(_) => {
                set_error("serialized JSON contained an interior NUL");
                ExzStatus::RuntimeError
            }
        }
    })
}

/// Restores a sequence from `exz_sequence_to_json` output.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_from_json(
    json: *const c_char,
    out: *mut *mut ExzSequence,
) -> ExzStatus {
    guard(|| {
        if out.is_null() {
            return null_status("out");
        }
        let Some(text) = read_str(json) else {
            return null_status("json (UTF-8)");
        };
        match exz::io::sequence_from_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ExzSequence { inner }));
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Normalized zero-counting measure of the degree-n polynomial.
#[no_mangle]
pub unsafe extern "C" fn exz_sequence_zero_cloud(
    s: *const ExzSequence,
    n: usize,
    out: *mut *mut ExzCloud,
) -> ExzStatus {
    guard(|| {
        if s.is_null() {
            return null_status("sequence");
        }
        if out.is_null() {
            return null_status("out");
        }
        let seq = &(*s).inner;
        let r = PrecisionContext::for_degree(seq.precision_bits(), seq.n_max())
            .and_then(|ctx| seq.zeros(n, &ctx))
            .and_then(|zs| cloud_from_zeros(&zs));
        match r {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ExzCloud { inner }));
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Greedy max-product boundary points with uniform weights, the surrogate
/// for the equilibrium measure.
#[no_mangle]
pub unsafe extern "C" fn exz_leja_points(
    d: *const ExzDomain,
    count: usize,
    boundary_mesh: usize,
    out: *mut *mut ExzCloud,
) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if out.is_null() {
            return null_status("out");
        }
        match leja_points(&(*d).inner, count, boundary_mesh) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ExzCloud { inner }));
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Logarithmic capacity estimate from a Leja cloud of `count` points.
#[no_mangle]
pub unsafe extern "C" fn exz_capacity(
    d: *const ExzDomain,
    count: usize,
    boundary_mesh: usize,
    out: *mut f64,
) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if out.is_null() {
            return null_status("out");
        }
        let r = leja_points(&(*d).inner, count, boundary_mesh).and_then(|c| capacity_leja(&c));
        match r {
            Ok(est) => {
                *out = est.value;
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Sweeps the interior part of a measure onto the domain boundary by
/// walk-on-spheres sampling; exterior mass is rejected with
/// `EXZ_STATUS_INVALID_INPUT`.
#[no_mangle]
pub unsafe extern "C" fn exz_balayage(
    d: *const ExzDomain,
    cloud: *const ExzCloud,
    samples_per_atom: usize,
    seed: u64,
    shell_epsilon: f64,
    out: *mut *mut ExzCloud,
) -> ExzStatus {
    guard(|| {
        if d.is_null() {
            return null_status("domain");
        }
        if cloud.is_null() {
            return null_status("cloud");
        }
        if out.is_null() {
            return null_status("out");
        }
        let cfg = exz::balayage::WosConfig {
            samples_per_atom,
            shell_epsilon,
            seed,
            ..exz::balayage::WosConfig::default()
        };
        match exz::balayage::balayage_out(&(*cloud).inner, &(*d).inner, &cfg) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ExzCloud { inner }));
                ExzStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Frees a measure handle. Accepts null.
#[no_mangle]
pub unsafe extern "C" fn exz_cloud_free(c: *mut ExzCloud) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of atoms in the measure.
#[no_mangle]
pub unsafe extern "C" fn exz_cloud_len(c: *const ExzCloud, out: *mut usize) -> ExzStatus {
    guard(|| {
        if c.is_null() {
            return null_status("cloud");
        }
        if out.is_null() {
            return null_status("out");
        }
        *out = (*c).inner.len();
        ExzStatus::Ok
    })
}

/// Atom `i`: position and weight (weight rounded to double precision).
#[no_mangle]
pub unsafe extern "C" fn exz_cloud_atom(
    c: *const ExzCloud,
    i: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    out_weight: *mut f64,
) -> ExzStatus {
    guard(|| {
        if c.is_null() {
            return null_status("cloud");
        }
        if out_re.is_null() || out_im.is_null() || out_weight.is_null() {
            return null_status("out");
        }
        let cloud = &(*c).inner;
        if i >= cloud.len() {
            set_error(&format!(
                "atom index {i} out of range ({} atoms)",
                cloud.len()
            ));
            return ExzStatus::InvalidInput;
        }
        let (x, y) = cloud.atoms()[i];
        *out_re = x;
        *out_im = y;
        *out_weight = cloud.weight_f64(i);
        ExzStatus::Ok
    })
}
