//! C ABI over the homotomo library.
//!
//! Every function returns an [`HtStatus`]; results travel through out-pointers.
//! On failure, `ht_last_error` gives a message for the calling thread.
//! Tomograms are opaque `HtTomogram` handles released with `ht_tomogram_free`.

use homotomo::pattern::{pattern_value, Representation};
use homotomo::radon::wigner_from_tomogram;
use homotomo::reconstruct::{
    density_from_tomogram, fock_element_from_tomogram, moment_angle_average, qfunction_from_tomogram, QuadratureSpec,
};
use homotomo::states::{GaussianState, RadonSource, Tomogram, TomogramGrid};
use homotomo::Error;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtStatus {
    Ok = 0,
    NullPointer = 1,
    /// Invalid argument or state parameters.
    Domain = 2,
    /// Evaluation outside the representable or accurate range.
    Range = 3,
    /// A numerical accuracy gate failed.
    Accuracy = 4,
    Io = 5,
    Parse = 6,
    /// Unexpected internal failure (caught panic).
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtRepresentation {
    Canonical = 0,
    HermiteSeries = 1,
    DerivProduct = 2,
    DerivProductSwapped = 3,
    Symmetrized = 4,
}

impl From<HtRepresentation> for Representation {
    fn from(r: HtRepresentation) -> Self {
        match r {
            HtRepresentation::Canonical => Representation::Canonical,
            HtRepresentation::HermiteSeries => Representation::HermiteSeries,
            HtRepresentation::DerivProduct => Representation::DerivProduct,
            HtRepresentation::DerivProductSwapped => Representation::DerivProductSwapped,
            HtRepresentation::Symmetrized => Representation::Symmetrized,
        }
    }
}

/// Opaque tomogram handle.
pub struct HtTomogram {
    inner: Tomogram,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HtStatus {
    match e {
        Error::Domain(_) | Error::Arity(_) | Error::SingularDivision(_) => HtStatus::Domain,
        Error::Range { .. } => HtStatus::Range,
        Error::Io(_) => HtStatus::Io,
        Error::Parse(_) | Error::Json(_) => HtStatus::Parse,
        _ if e.is_accuracy() => HtStatus::Accuracy,
        _ => HtStatus::Internal,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), (HtStatus, String)>>(f: F) -> HtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HtStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            HtStatus::Internal
        }
    }
}

fn lib<T>(r: homotomo::Result<T>) -> Result<T, (HtStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HtStatus, String) {
    (HtStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn tomogram_ref<'a>(t: *const HtTomogram) -> Result<&'a Tomogram, (HtStatus, String)> {
    t.as_ref().map(|h| &h.inner).ok_or_else(|| null("tomogram"))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (HtStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = v;
    Ok(())
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (HtStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (HtStatus::Parse, "path is not valid UTF-8".to_string()))
}

/// Message for the last failed call on this thread; empty if none. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn ht_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ht_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Sample a squeezed coherent state (q̄, p̄, ζ). `n_phi` or `n_q` of 0 selects the default grid.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ht_tomogram_gaussian(
    qbar: f64,
    pbar: f64,
    zeta_re: f64,
    zeta_im: f64,
    hbar: f64,
    n_phi: usize,
    n_q: usize,
    out: *mut *mut HtTomogram,
) -> HtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = lib(GaussianState::new(qbar, pbar, Complex64::new(zeta_re, zeta_im), hbar))?;
        let mut grid = TomogramGrid::default_for(&g);
        if n_phi > 0 {
            grid.n_phi = n_phi;
        }
        if n_q > 0 {
            grid.n_q = n_q;
        }
        let t = lib(Tomogram::from_source(&g, &grid))?;
        *out = Box::into_raw(Box::new(HtTomogram { inner: t }));
        Ok(())
    })
}

/// Read a tomogram from CSV or JSON.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_tomogram_read(path: *const c_char, out: *mut *mut HtTomogram) -> HtStatus {
    guard(|| {
        let p = path_arg(path)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = lib(Tomogram::read(p))?;
        *out = Box::into_raw(Box::new(HtTomogram { inner: t }));
        Ok(())
    })
}

/// Write `<path>` as CSV and its `.json` twin.
///
/// # Safety
/// `t` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ht_tomogram_write(t: *const HtTomogram, path: *const c_char) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        lib(t.write_pair(path_arg(path)?))
    })
}

/// Release a handle; NULL is ignored.
///
/// # Safety
/// `t` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ht_tomogram_free(t: *mut HtTomogram) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_tomogram_dims(t: *const HtTomogram, n_phi: *mut usize, n_q: *mut usize) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        put(n_phi, t.n_phi(), "n_phi")?;
        put(n_q, t.n_q(), "n_q")
    })
}

/// Interpolated marginal W̆(φ; q).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_tomogram_marginal(t: *const HtTomogram, phi: f64, q: f64, out: *mut f64) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        put(out, t.marginal(phi, q), "out")
    })
}

/// ⟨m|ρ|n⟩ with the canonical pattern function and default quadrature.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_fock_element(
    t: *const HtTomogram,
    m: usize,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        let v = lib(fock_element_from_tomogram(t, m, n, Representation::Canonical, &QuadratureSpec::default()))?;
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// ρ_{mn}, m, n ≤ nmax, written row-major as interleaved (re, im) pairs into `buf`,
/// which must hold `2·(nmax+1)²` doubles (`len` is checked).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ht_density(t: *const HtTomogram, nmax: usize, buf: *mut f64, len: usize) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let d = nmax + 1;
        if len < 2 * d * d {
            return Err((HtStatus::Domain, format!("buffer holds {len} doubles, need {}", 2 * d * d)));
        }
        let r = lib(density_from_tomogram(t, nmax, Representation::Canonical, &QuadratureSpec::default()))?;
        let out = std::slice::from_raw_parts_mut(buf, 2 * d * d);
        for m in 0..d {
            for n in 0..d {
                let z = r.density.get(m, n);
                out[2 * (m * d + n)] = z.re;
                out[2 * (m * d + n) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// Husimi Q(α).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_qfunction(t: *const HtTomogram, re: f64, im: f64, out: *mut f64) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        let v = lib(qfunction_from_tomogram(t, Complex64::new(re, im), &QuadratureSpec::default()))?;
        put(out, v, "out")
    })
}

/// ⟨a†ᵏaˡρ⟩ by angle averaging.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_moment(t: *const HtTomogram, k: usize, l: usize, re: *mut f64, im: *mut f64) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        let v = lib(moment_angle_average(t, k, l, &QuadratureSpec::default()))?;
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// W(q, p) by filtered back-projection.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_wigner(t: *const HtTomogram, q: f64, p: f64, out: *mut f64) -> HtStatus {
    guard(|| {
        let t = tomogram_ref(t)?;
        put(out, lib(wigner_from_tomogram(t, q, p))?, "out")
    })
}

/// Pattern function F_{m,n}(x) in the chosen representation.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_pattern_value(rep: HtRepresentation, m: usize, n: usize, x: f64, out: *mut f64) -> HtStatus {
    guard(|| put(out, lib(pattern_value(rep.into(), m, n, x))?, "out"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(ht_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::domain("x")), HtStatus::Domain);
        assert_eq!(status_of(&Error::Accuracy("x".into())), HtStatus::Accuracy);
        assert_eq!(status_of(&Error::Window("x".into())), HtStatus::Accuracy);
        assert_eq!(status_of(&Error::Parse("x".into())), HtStatus::Parse);
        assert_eq!(
            status_of(&Error::Range { what: "x".into(), max_safe: 1.0 }),
            HtStatus::Range
        );
    }

    #[test]
    fn null_handles_are_rejected() {
        let mut v = 0.0;
        let s = unsafe { ht_tomogram_marginal(ptr::null(), 0.0, 0.0, &mut v) };
        assert_eq!(s, HtStatus::NullPointer);
        assert!(last_error().contains("tomogram"));
        unsafe { ht_tomogram_free(ptr::null_mut()) };
        let s = unsafe { ht_pattern_value(HtRepresentation::Canonical, 0, 0, 0.0, ptr::null_mut()) };
        assert_eq!(s, HtStatus::NullPointer);
    }

    #[test]
    fn bad_squeeze_is_domain_error() {
        let mut h = ptr::null_mut();
        let s = unsafe { ht_tomogram_gaussian(0.0, 0.0, 1.5, 0.0, 1.0, 0, 0, &mut h) };
        assert_eq!(s, HtStatus::Domain);
        assert!(h.is_null());
        assert!(last_error().contains("|ζ|"));
    }

    #[test]
    fn version_is_terminated() {
        let v = unsafe { CStr::from_ptr(ht_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
