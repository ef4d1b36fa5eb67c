use std::ffi::CStr;
use std::ptr;

use pdm_dirac_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 512];
    unsafe {
        pdm_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn hyperbolic(m0: f64, lo: f64, hi: f64) -> *mut PdmProfile {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pdm_profile_hyperbolic(m0, 1.0, lo, hi, &mut p) }, PdmStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(pdm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn profile_values_and_errors() {
    let p = hyperbolic(1.0, -10.0, 10.0);
    let (mut m, mut dm, mut d2m) = (0.0, 1.0, 0.0);
    assert_eq!(unsafe { pdm_profile_mass(p, 0.0, &mut m, &mut dm, &mut d2m) }, PdmStatus::Ok);
    assert_eq!((m, dm, d2m), (1.0, 0.0, -0.5));
    assert_eq!(unsafe { pdm_profile_mass(p, 11.0, &mut m, ptr::null_mut(), ptr::null_mut()) }, PdmStatus::Domain);
    assert!(last_error().contains("outside"));
    unsafe { pdm_profile_free(p) };

    let mut q = ptr::null_mut();
    assert_eq!(unsafe { pdm_profile_linear(-1.0, 10.0, &mut q) }, PdmStatus::InvalidArgument);
    assert!(q.is_null());
    assert_eq!(unsafe { pdm_profile_linear(1.0, 10.0, ptr::null_mut()) }, PdmStatus::NullPointer);
    assert_eq!(unsafe { pdm_profile_mass(ptr::null(), 0.0, &mut m, ptr::null_mut(), ptr::null_mut()) }, PdmStatus::NullPointer);
    unsafe {
        pdm_profile_free(ptr::null_mut());
        pdm_spectrum_free(ptr::null_mut());
    }
}

#[test]
fn error_message_truncates_and_clears() {
    let mut q = ptr::null_mut();
    assert_ne!(unsafe { pdm_profile_linear(f64::NAN, 10.0, &mut q) }, PdmStatus::Ok);
    let full = unsafe { pdm_last_error_message(ptr::null_mut(), 0) };
    assert!(full > 4);
    let mut small = [1 as std::ffi::c_char; 4];
    assert_eq!(unsafe { pdm_last_error_message(small.as_mut_ptr(), 4) }, full);
    assert_eq!(small[3], 0);
    assert_eq!(unsafe { pdm_profile_linear(1.0, 10.0, &mut q) }, PdmStatus::Ok);
    assert_eq!(unsafe { pdm_last_error_message(ptr::null_mut(), 0) }, 0);
    unsafe { pdm_profile_free(q) };
}

#[test]
fn errors_are_thread_local() {
    let mut q = ptr::null_mut();
    assert_ne!(unsafe { pdm_profile_linear(-1.0, 10.0, &mut q) }, PdmStatus::Ok);
    let other = std::thread::spawn(|| unsafe { pdm_last_error_message(ptr::null_mut(), 0) }).join().unwrap();
    assert_eq!(other, 0);
    assert!(!last_error().is_empty());
}

#[test]
fn spectrum_round_trip() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pdm_linear_spectrum(1.0, 20.0, 4000, 4, &mut s) }, PdmStatus::Ok);
    assert_eq!(unsafe { pdm_spectrum_len(s) }, 4);
    let mut e = [0.0; 4];
    assert_eq!(unsafe { pdm_spectrum_energies(s, e.as_mut_ptr(), 3) }, PdmStatus::BufferTooSmall);
    assert_eq!(unsafe { pdm_spectrum_energies(s, e.as_mut_ptr(), 4) }, PdmStatus::Ok);
    for (got, n) in e.iter().zip([1.0f64, 3.0, 5.0, 7.0]) {
        assert!((got - (2.0 * n + 1.0).sqrt()).abs() < 1e-4);
    }
    unsafe { pdm_spectrum_free(s) };
    assert_eq!(unsafe { pdm_spectrum_len(ptr::null()) }, 0);
}

#[test]
fn effective_potential_is_mass_squared() {
    let p = hyperbolic(1.5, -6.0, 6.0);
    let n = 61;
    let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(unsafe { pdm_effective_potential(p, -6.0, 6.0, n, 2.0, re.as_mut_ptr(), im.as_mut_ptr()) }, PdmStatus::Ok);
    for i in 0..n {
        let x = -6.0 + 12.0 * i as f64 / (n - 1) as f64;
        let mut m = 0.0;
        unsafe { pdm_profile_mass(p, x, &mut m, ptr::null_mut(), ptr::null_mut()) };
        assert!((re[i] - m * m).abs() < 1e-12 && im[i].abs() < 1e-12);
    }
    assert_eq!(
        unsafe { pdm_effective_potential(p, -6.0, 6.0, n, 2.0, ptr::null_mut(), im.as_mut_ptr()) },
        PdmStatus::NullPointer
    );
    unsafe { pdm_profile_free(p) };
}

#[test]
fn scattering_conserves_flux() {
    let (mut t, mut r) = (0.0, 0.0);
    assert_eq!(unsafe { pdm_transmission(1.0, 1.0, 10f64.sqrt(), &mut t, &mut r) }, PdmStatus::Ok);
    assert!(t > 0.99 && (t + r - 1.0).abs() < 1e-6);
    assert_eq!(unsafe { pdm_transmission(1.0, 1.0, 0.0, &mut t, &mut r) }, PdmStatus::InvalidArgument);
    assert_eq!(unsafe { pdm_transmission(1e4, 1.0, 0.2, &mut t, &mut r) }, PdmStatus::Numerical);
}

#[test]
fn pt_checks() {
    let p = hyperbolic(1.0, -10.0, 10.0);
    let mut rep = PdmPtReport::default();
    assert_eq!(unsafe { pdm_pt_check(p, 100, PdmOperator::Coupled, PdmInvolution::Identity, &mut rep) }, PdmStatus::Ok);
    assert_eq!((rep.delta, rep.dim), (0.0, 200));
    assert_eq!(unsafe { pdm_pt_check(p, 100, PdmOperator::Decoupled, PdmInvolution::Identity, &mut rep) }, PdmStatus::Ok);
    assert_eq!(rep.n_real, rep.dim);
    unsafe { pdm_profile_free(p) };

    let skewed = hyperbolic(1.0, -5.0, 10.0);
    assert_eq!(
        unsafe { pdm_pt_check(skewed, 100, PdmOperator::Coupled, PdmInvolution::Identity, &mut rep) },
        PdmStatus::InvalidArgument
    );
    unsafe { pdm_profile_free(skewed) };

    let mut lin = ptr::null_mut();
    assert_eq!(unsafe { pdm_profile_linear(1.0, 6.0, &mut lin) }, PdmStatus::Ok);
    assert_eq!(unsafe { pdm_pt_check(lin, 100, PdmOperator::Coupled, PdmInvolution::Sigma3, &mut rep) }, PdmStatus::Ok);
    assert_eq!(rep.delta, 0.0);
    assert_eq!(
        unsafe { pdm_pt_check(lin, 100, PdmOperator::Decoupled, PdmInvolution::Sigma3, &mut rep) },
        PdmStatus::InvalidArgument
    );
    unsafe { pdm_profile_free(lin) };
}

#[test]
fn fw_check() {
    let p = hyperbolic(5.0, -8.0, 8.0);
    let mut rep = PdmFwReport::default();
    assert_eq!(unsafe { pdm_fw_check(p, 801, -2.0, 2.0, &mut rep) }, PdmStatus::Ok);
    assert!(rep.window_nodes > 100);
    assert!(rep.c1_deviation < 1e-2 && rep.c2_deviation < 1e-2);
    assert_eq!(unsafe { pdm_fw_check(p, 801, 2.0, -2.0, &mut rep) }, PdmStatus::InvalidArgument);
    unsafe { pdm_profile_free(p) };
}
