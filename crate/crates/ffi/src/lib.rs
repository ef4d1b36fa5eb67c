//! C ABI over `pdm_dirac`.
//!
//! Every function returns a [`PdmStatus`]. On failure a message is kept per
//! thread and can be read with [`pdm_last_error_message`]. Opaque handles
//! are released by the matching `*_free`, which accepts NULL.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pdm_dirac::dirac_system::{
    build_coupled_operator, decoupled_operator, linear_odd_extension, pt_symmetry_check, PtInvolution,
};
use pdm_dirac::discretization::{Boundary, Grid};
use pdm_dirac::foldy_wouthuysen::commutator_checks;
use pdm_dirac::harmonic::numeric_energies;
use pdm_dirac::heun::transmission;
use pdm_dirac::potentials::{effective_potential_general, schrodingerizing_potential};
use pdm_dirac::{MassProfile, PdmError};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Singular = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Io = 7,
    Panic = 8,
}

/// Spinor involution used by the PT check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdmInvolution {
    Identity = 0,
    Sigma3 = 1,
}

/// Which operator the PT check inspects.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdmOperator {
    /// The two-component Dirac operator.
    Coupled = 0,
    /// The scalar second-order operator for the upper component.
    Decoupled = 1,
}

/// Opaque mass profile.
pub struct PdmProfile(MassProfile);

/// Opaque list of energies.
pub struct PdmSpectrum(Vec<f64>);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PdmPtReport {
    pub dim: usize,
    pub delta: f64,
    pub n_real: usize,
    pub n_conjugate_pairs: usize,
    pub n_complex: usize,
    pub max_im_eig: f64,
    pub closure_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PdmFwReport {
    pub window_nodes: usize,
    pub c1_deviation: f64,
    pub c2_deviation: f64,
    pub c2_truncation: f64,
    pub full_h_residual: f64,
}

struct Failure(PdmStatus, String);

impl From<PdmError> for Failure {
    fn from(e: PdmError) -> Self {
        let status = match e {
            PdmError::Domain { .. } => PdmStatus::Domain,
            PdmError::Singular { .. } => PdmStatus::Singular,
            PdmError::Io(_) => PdmStatus::Io,
            ref other if other.is_configuration() => PdmStatus::InvalidArgument,
            _ => PdmStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, records any failure and converts panics into `Panic`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PdmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PdmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            PdmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PdmStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn profile_ref<'a>(p: *const PdmProfile) -> Result<&'a MassProfile, Failure> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null("profile"))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn store<T>(out: &mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pdm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// always NUL-terminated when `cap > 0`). Returns the length of the full
/// message excluding the terminator, or 0 if the last call succeeded.
///
/// # Safety
/// `buf` must be NULL or point to at least `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pdm_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && cap > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Linear mass m(x) = mu·x on [0, x_hi].
///
/// # Safety
/// `out` must be a valid pointer to a `PdmProfile*`.
#[no_mangle]
pub unsafe extern "C" fn pdm_profile_linear(mu: f64, x_hi: f64, out: *mut *mut PdmProfile) -> PdmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store(out, PdmProfile(MassProfile::linear(mu, x_hi)?));
        Ok(())
    })
}

/// Hyperbolic mass m0·sech(a·x)^(1/2) on [x_lo, x_hi].
///
/// # Safety
/// `out` must be a valid pointer to a `PdmProfile*`.
#[no_mangle]
pub unsafe extern "C" fn pdm_profile_hyperbolic(
    m0: f64,
    a: f64,
    x_lo: f64,
    x_hi: f64,
    out: *mut *mut PdmProfile,
) -> PdmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store(out, PdmProfile(MassProfile::hyperbolic_on(m0, a, x_lo, x_hi)?));
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle from a `pdm_profile_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pdm_profile_free(p: *mut PdmProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Mass and its first two derivatives at `x`. Any output pointer may be NULL.
///
/// # Safety
/// `p` must be a live profile handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdm_profile_mass(
    p: *const PdmProfile,
    x: f64,
    m: *mut f64,
    dm: *mut f64,
    d2m: *mut f64,
) -> PdmStatus {
    guard(|| {
        let prof = profile_ref(p)?;
        let vals = [prof.mass_at(x)?, prof.dmass_at(x)?, prof.d2mass_at(x)?];
        for (dst, v) in [m, dm, d2m].into_iter().zip(vals) {
            if let Some(d) = dst.as_mut() {
                *d = v;
            }
        }
        Ok(())
    })
}

/// Effective potential of the decoupled equation with V = i m'/(2m), sampled
/// at `n` uniform nodes on [x_lo, x_hi]. Writes `n` values to each of `re`
/// and `im`.
///
/// # Safety
/// `p` must be a live profile handle; `re` and `im` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn pdm_effective_potential(
    p: *const PdmProfile,
    x_lo: f64,
    x_hi: f64,
    n: usize,
    energy: f64,
    re: *mut f64,
    im: *mut f64,
) -> PdmStatus {
    guard(|| {
        let prof = profile_ref(p)?;
        let (re, im) = (out_slice(re, n, "re")?, out_slice(im, n, "im")?);
        let grid = Grid::new(x_lo, x_hi, n)?;
        let v = schrodingerizing_potential(prof, &grid)?;
        for (i, z) in effective_potential_general(prof, &v, energy)?.into_iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// The `k` lowest energies of the linear mass on [0, x_hi] with `n` interior nodes.
///
/// # Safety
/// `out` must be a valid pointer to a `PdmSpectrum*`.
#[no_mangle]
pub unsafe extern "C" fn pdm_linear_spectrum(
    mu: f64,
    x_hi: f64,
    n: usize,
    k: usize,
    out: *mut *mut PdmSpectrum,
) -> PdmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store(out, PdmSpectrum(numeric_energies(mu, x_hi, n, k)?.energies));
        Ok(())
    })
}

/// Number of energies held by `s`, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn pdm_spectrum_len(s: *const PdmSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the energies into `out`, which must hold `pdm_spectrum_len(s)` values.
///
/// # Safety
/// `s` must be a live spectrum handle; `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn pdm_spectrum_energies(s: *const PdmSpectrum, out: *mut f64, cap: usize) -> PdmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("spectrum"))?;
        if cap < s.0.len() {
            return Err(Failure(
                PdmStatus::BufferTooSmall,
                format!("buffer holds {cap} values, {} needed", s.0.len()),
            ));
        }
        out_slice(out, cap, "out")?[..s.0.len()].copy_from_slice(&s.0);
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a spectrum handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pdm_spectrum_free(s: *mut PdmSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Transmission and reflection probabilities of the hyperbolic barrier at energy E > 0.
///
/// # Safety
/// `t` and `r` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdm_transmission(m0: f64, a: f64, energy: f64, t: *mut f64, r: *mut f64) -> PdmStatus {
    guard(|| {
        let (t, r) = (out_ref(t, "t")?, out_ref(r, "r")?);
        let s = transmission(m0, a, energy)?;
        *t = s.transmission;
        *r = s.reflection;
        Ok(())
    })
}

/// PT diagnostics on an `n`-node grid over the profile's domain. Hyperbolic
/// profiles need a domain symmetric about 0. Linear profiles are extended
/// oddly to [−x_hi, x_hi] and only support the coupled operator.
///
/// # Safety
/// `p` must be a live profile handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdm_pt_check(
    p: *const PdmProfile,
    n: usize,
    op: PdmOperator,
    involution: PdmInvolution,
    out: *mut PdmPtReport,
) -> PdmStatus {
    guard(|| {
        let prof = profile_ref(p)?;
        let out = out_ref(out, "out")?;
        let gamma = match involution {
            PdmInvolution::Identity => PtInvolution::Identity,
            PdmInvolution::Sigma3 => PtInvolution::Sigma3,
        };
        let (lo, hi) = prof.domain();
        let h = match (prof, op) {
            (MassProfile::Linear { mu, .. }, PdmOperator::Coupled) => {
                linear_odd_extension(*mu, hi, n, Boundary::Dirichlet)?
            }
            (MassProfile::Linear { .. }, PdmOperator::Decoupled) => {
                return Err(Failure(
                    PdmStatus::InvalidArgument,
                    "the decoupled operator is singular at x = 0 for the linear mass".into(),
                ))
            }
            (_, PdmOperator::Coupled) => {
                let grid = Grid::new(lo, hi, n)?;
                let v = schrodingerizing_potential(prof, &grid)?;
                build_coupled_operator(prof, &v, &grid, Boundary::Dirichlet)?
            }
            (_, PdmOperator::Decoupled) => decoupled_operator(prof, &Grid::new(lo, hi, n)?, Boundary::Dirichlet)?,
        };
        let r = pt_symmetry_check(&h, gamma)?;
        *out = PdmPtReport {
            dim: r.dim,
            delta: r.delta,
            n_real: r.n_real,
            n_conjugate_pairs: r.n_conjugate_pairs,
            n_complex: r.n_complex,
            max_im_eig: r.max_im_eig,
            closure_error: r.closure_error,
        };
        Ok(())
    })
}

/// Foldy–Wouthuysen commutator deviations on [window_lo, window_hi], using
/// an `n`-node grid over the profile's domain.
///
/// # Safety
/// `p` must be a live profile handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdm_fw_check(
    p: *const PdmProfile,
    n: usize,
    window_lo: f64,
    window_hi: f64,
    out: *mut PdmFwReport,
) -> PdmStatus {
    guard(|| {
        let prof = profile_ref(p)?;
        let out = out_ref(out, "out")?;
        let (lo, hi) = prof.domain();
        let r = commutator_checks(prof, &Grid::new(lo, hi, n)?, (window_lo, window_hi))?;
        *out = PdmFwReport {
            window_nodes: r.window_nodes,
            c1_deviation: r.c1_deviation,
            c2_deviation: r.c2_deviation,
            c2_truncation: r.c2_truncation,
            full_h_residual: r.full_h_residual,
        };
        Ok(())
    })
}
