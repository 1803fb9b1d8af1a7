//! C ABI over the lattice workbench: opaque lattice handles, status codes,
//! and the channel/bound/error-rate entry points other languages need.
//!
//! Every function is panic-safe: failures surface as [`HadlatStatus`] codes,
//! never as unwinds across the boundary.

use std::ffi::CStr;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use hadlat::analysis;
use hadlat::channel::{vnr_to_sigma2, ChannelParams};
use hadlat::decoder::build_constellation;
use hadlat::lattice::{is_well_rounded, min_l1_norm, minimal_vectors, Lattice};
use hadlat::rng::{StreamId, SubstreamFamily};
use hadlat::rotations::{builtin_lattice, load_rotation, sylvester};
use hadlat::sweep::count_errors;

/// Result of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HadlatStatus {
    Ok = 0,
    /// A pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or malformed.
    InvalidArgument = 2,
    /// A matrix failed the orthogonality check.
    NotOrthogonal = 3,
    /// A rotation file could not be read or parsed.
    ParseError = 4,
    /// The request exceeds the supported dimension or size limits.
    TooLarge = 5,
    /// The operation is not available for these inputs.
    Unsupported = 6,
    /// An internal numerical failure.
    RuntimeError = 7,
}

/// Opaque lattice handle; create with `hadlat_lattice_builtin` or
/// `hadlat_lattice_load`, release with `hadlat_lattice_free`.
pub struct HadlatLattice {
    inner: Lattice,
}

fn status_of(err: &hadlat::Error) -> HadlatStatus {
    use hadlat::Error::*;
    match err {
        DimensionTooLarge(_) | OrderTooLarge(_) | TooManyPoints(_) => HadlatStatus::TooLarge,
        NotOrthogonal(_) => HadlatStatus::NotOrthogonal,
        ParseError(_) | Io(_) => HadlatStatus::ParseError,
        UnknownName(_) | UnsupportedDimension { .. } | UnsupportedOrder(_) => {
            HadlatStatus::Unsupported
        }
        NegativeK(_) | NegativeInput(_) | NonpositiveVariance(_) | NonpositiveVolume(_)
        | LengthMismatch(..) | InvalidQ(_) | ZeroVector | InvalidBound(..) | NoTrials
        | NonInvertibleGenerator(_) => HadlatStatus::InvalidArgument,
        ViolationFound { .. } => HadlatStatus::RuntimeError,
    }
}

/// Short static description of a status code.
#[no_mangle]
pub extern "C" fn hadlat_status_message(status: HadlatStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        HadlatStatus::Ok => b"ok\0",
        HadlatStatus::NullPointer => b"null pointer argument\0",
        HadlatStatus::InvalidArgument => b"invalid argument\0",
        HadlatStatus::NotOrthogonal => b"matrix is not orthogonal\0",
        HadlatStatus::ParseError => b"file could not be read or parsed\0",
        HadlatStatus::TooLarge => b"input exceeds supported size limits\0",
        HadlatStatus::Unsupported => b"operation unsupported for these inputs\0",
        HadlatStatus::RuntimeError => b"internal numerical failure\0",
    };
    msg.as_ptr() as *const c_char
}

fn guarded<F: FnOnce() -> HadlatStatus>(f: F) -> HadlatStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(HadlatStatus::RuntimeError)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> HadlatStatus {
    if out.is_null() {
        return HadlatStatus::NullPointer;
    }
    unsafe { out.write(value) };
    HadlatStatus::Ok
}

/// Builds a builtin lattice: `identity`, `hadamard` (power-of-two dimension)
/// or `bcc` (dimension 3).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_builtin(
    name: *const c_char,
    dim: usize,
    out: *mut *mut HadlatLattice,
) -> HadlatStatus {
    if name.is_null() || out.is_null() {
        return HadlatStatus::NullPointer;
    }
    let name = match unsafe { CStr::from_ptr(name) }.to_str() {
        Ok(s) => s,
        Err(_) => return HadlatStatus::InvalidArgument,
    };
    guarded(|| match builtin_lattice(name, dim) {
        Ok(lattice) => {
            let handle = Box::into_raw(Box::new(HadlatLattice { inner: lattice }));
            unsafe { write_out(out, handle) }
        }
        Err(e) => status_of(&e),
    })
}

/// Loads and validates a rotation file, yielding its unit-volume lattice.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_load(
    path: *const c_char,
    out: *mut *mut HadlatLattice,
) -> HadlatStatus {
    if path.is_null() || out.is_null() {
        return HadlatStatus::NullPointer;
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => s,
        Err(_) => return HadlatStatus::InvalidArgument,
    };
    guarded(|| match load_rotation(Path::new(path)) {
        Ok(rotation) => {
            let handle = Box::into_raw(Box::new(HadlatLattice {
                inner: rotation.lattice(),
            }));
            unsafe { write_out(out, handle) }
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a lattice handle. Null is accepted and ignored.
///
/// # Safety
/// `lattice` must be a pointer previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_free(lattice: *mut HadlatLattice) {
    if !lattice.is_null() {
        drop(unsafe { Box::from_raw(lattice) });
    }
}

/// Dimension of the lattice; zero for a null handle.
///
/// # Safety
/// `lattice` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_dim(lattice: *const HadlatLattice) -> usize {
    if lattice.is_null() {
        return 0;
    }
    unsafe { &*lattice }.inner.dim()
}

/// Covolume |det M| of the lattice.
///
/// # Safety
/// `lattice` must be a valid handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_volume(
    lattice: *const HadlatLattice,
    out: *mut f64,
) -> HadlatStatus {
    if lattice.is_null() {
        return HadlatStatus::NullPointer;
    }
    unsafe { write_out(out, (*lattice).inner.volume()) }
}

/// Minimal squared Euclidean norm over nonzero lattice vectors.
///
/// # Safety
/// `lattice` must be a valid handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_min_norm_sq(
    lattice: *const HadlatLattice,
    out: *mut f64,
) -> HadlatStatus {
    if lattice.is_null() || out.is_null() {
        return HadlatStatus::NullPointer;
    }
    let inner = &unsafe { &*lattice }.inner;
    guarded(|| match minimal_vectors(inner) {
        Ok(report) => unsafe { write_out(out, report.min_norm_sq) },
        Err(e) => status_of(&e),
    })
}

/// Minimal L1 norm over nonzero vectors with squared L2 norm within
/// `search_bound` (which must be at least the dimension).
///
/// # Safety
/// `lattice` must be a valid handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_min_l1_norm(
    lattice: *const HadlatLattice,
    search_bound: f64,
    out: *mut f64,
) -> HadlatStatus {
    if lattice.is_null() || out.is_null() {
        return HadlatStatus::NullPointer;
    }
    let inner = &unsafe { &*lattice }.inner;
    guarded(|| match min_l1_norm(inner, search_bound) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(e) => status_of(&e),
    })
}

/// Whether the minimal vectors span the ambient space.
///
/// # Safety
/// `lattice` must be a valid handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_lattice_is_well_rounded(
    lattice: *const HadlatLattice,
    out: *mut bool,
) -> HadlatStatus {
    if lattice.is_null() || out.is_null() {
        return HadlatStatus::NullPointer;
    }
    let inner = &unsafe { &*lattice }.inner;
    guarded(|| match is_well_rounded(inner) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(e) => status_of(&e),
    })
}

/// Mean and variance of the squared Rician fade (mean is always one).
///
/// # Safety
/// `out_mean` and `out_var` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hadlat_moments_h2(
    k: f64,
    out_mean: *mut f64,
    out_var: *mut f64,
) -> HadlatStatus {
    match hadlat::channel::moments_h2(k) {
        Ok((mean, var)) => {
            let s = unsafe { write_out(out_mean, mean) };
            if s != HadlatStatus::Ok {
                return s;
            }
            unsafe { write_out(out_var, var) }
        }
        Err(e) => status_of(&e),
    }
}

/// Rician fade density at `h` for factor `k`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_rician_pdf(h: f64, k: f64, out: *mut f64) -> HadlatStatus {
    match hadlat::channel::rician_pdf(h, k) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(e) => status_of(&e),
    }
}

/// Noise variance for a volume-to-noise ratio in dB.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_vnr_to_sigma2(
    vnr_db: f64,
    volume: f64,
    dim: usize,
    out: *mut f64,
) -> HadlatStatus {
    match vnr_to_sigma2(vnr_db, volume, dim) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(e) => status_of(&e),
    }
}

/// Monte Carlo vector error rate of the carved constellation (`q` points per
/// dimension) under Rician factor `k` at the given VNR. Deterministic in
/// `(seed, trials)` regardless of thread count.
///
/// # Safety
/// `lattice` must be a valid handle; `out_rate` and `out_stderr` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hadlat_error_rate(
    lattice: *const HadlatLattice,
    q: u32,
    k: f64,
    vnr_db: f64,
    trials: u64,
    seed: u64,
    out_rate: *mut f64,
    out_stderr: *mut f64,
) -> HadlatStatus {
    if lattice.is_null() || out_rate.is_null() || out_stderr.is_null() {
        return HadlatStatus::NullPointer;
    }
    let inner = &unsafe { &*lattice }.inner;
    guarded(|| {
        let run = || -> hadlat::Result<(f64, f64)> {
            let constellation = build_constellation(inner, q)?;
            let sigma2 = vnr_to_sigma2(vnr_db, inner.volume(), inner.dim())?;
            let params = ChannelParams::new(k, sigma2, inner.dim())?;
            let family = SubstreamFamily::new(seed, StreamId::SweepTrial);
            let errors = count_errors(&constellation, &params, trials, family, 0)?;
            let rate = errors as f64 / trials as f64;
            let stderr = (rate * (1.0 - rate) / trials as f64).sqrt();
            Ok((rate, stderr))
        };
        match run() {
            Ok((rate, stderr)) => {
                let s = unsafe { write_out(out_rate, rate) };
                if s != HadlatStatus::Ok {
                    return s;
                }
                unsafe { write_out(out_stderr, stderr) }
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Monte Carlo union bound on the pairwise error probability, truncated at
/// squared norm `bound` (pass zero to use four times the minimal norm).
///
/// # Safety
/// `lattice` must be a valid handle; `out_value` and `out_stderr` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hadlat_pep_bound_mc(
    lattice: *const HadlatLattice,
    k: f64,
    vnr_db: f64,
    bound: f64,
    trials: u64,
    seed: u64,
    out_value: *mut f64,
    out_stderr: *mut f64,
) -> HadlatStatus {
    if lattice.is_null() || out_value.is_null() || out_stderr.is_null() {
        return HadlatStatus::NullPointer;
    }
    let inner = &unsafe { &*lattice }.inner;
    guarded(|| {
        let run = || -> hadlat::Result<analysis::PepEstimate> {
            let bound = if bound > 0.0 {
                bound
            } else {
                4.0 * minimal_vectors(inner)?.min_norm_sq
            };
            let sigma2 = vnr_to_sigma2(vnr_db, inner.volume(), inner.dim())?;
            let family = SubstreamFamily::new(seed, StreamId::PepTrial);
            analysis::pep_bound_mc(inner, k, sigma2, bound, trials, family, 0)
        };
        match run() {
            Ok(est) => {
                let s = unsafe { write_out(out_value, est.value) };
                if s != HadlatStatus::Ok {
                    return s;
                }
                unsafe { write_out(out_stderr, est.stderr) }
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Small-fade-variance approximation of the same bound.
///
/// # Safety
/// `lattice` must be a valid handle; `out_value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hadlat_pep_bound_approx(
    lattice: *const HadlatLattice,
    k: f64,
    vnr_db: f64,
    bound: f64,
    out_value: *mut f64,
) -> HadlatStatus {
    if lattice.is_null() || out_value.is_null() {
        return HadlatStatus::NullPointer;
    }
    let inner = &unsafe { &*lattice }.inner;
    guarded(|| {
        let run = || -> hadlat::Result<analysis::PepEstimate> {
            let bound = if bound > 0.0 {
                bound
            } else {
                4.0 * minimal_vectors(inner)?.min_norm_sq
            };
            let sigma2 = vnr_to_sigma2(vnr_db, inner.volume(), inner.dim())?;
            analysis::pep_bound_approx(inner, k, sigma2, bound)
        };
        match run() {
            Ok(est) => unsafe { write_out(out_value, est.value) },
            Err(e) => status_of(&e),
        }
    })
}

/// Monte Carlo probability that the faded Sylvester Hadamard lattice of the
/// given power-of-two dimension is not well-rounded.
///
/// # Safety
/// `out_estimate` and `out_stderr` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hadlat_nonwr_probability_mc(
    dim: usize,
    k: f64,
    trials: u64,
    seed: u64,
    out_estimate: *mut f64,
    out_stderr: *mut f64,
) -> HadlatStatus {
    if out_estimate.is_null() || out_stderr.is_null() {
        return HadlatStatus::NullPointer;
    }
    guarded(|| {
        let run = || -> hadlat::Result<(f64, f64)> {
            if !dim.is_power_of_two() {
                return Err(hadlat::Error::UnsupportedDimension {
                    name: "hadamard".into(),
                    dim,
                });
            }
            let w = sylvester(dim.trailing_zeros())?;
            let family = SubstreamFamily::new(seed, StreamId::NonWrTrial);
            analysis::nonwr_probability_mc(&w, k, trials, family, 0)
        };
        match run() {
            Ok((estimate, stderr)) => {
                let s = unsafe { write_out(out_estimate, estimate) };
                if s != HadlatStatus::Ok {
                    return s;
                }
                unsafe { write_out(out_stderr, stderr) }
            }
            Err(e) => status_of(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn builtin(name: &str, dim: usize) -> *mut HadlatLattice {
        let name = CString::new(name).unwrap();
        let mut handle: *mut HadlatLattice = std::ptr::null_mut();
        let status = unsafe { hadlat_lattice_builtin(name.as_ptr(), dim, &mut handle) };
        assert_eq!(status, HadlatStatus::Ok);
        assert!(!handle.is_null());
        handle
    }

    #[test]
    fn builtin_audit_round_trip() {
        let lattice = builtin("hadamard", 4);
        unsafe {
            assert_eq!(hadlat_lattice_dim(lattice), 4);
            let mut volume = 0.0;
            assert_eq!(hadlat_lattice_volume(lattice, &mut volume), HadlatStatus::Ok);
            assert!((volume - 1.0).abs() < 1e-9);
            let mut min = 0.0;
            assert_eq!(hadlat_lattice_min_norm_sq(lattice, &mut min), HadlatStatus::Ok);
            assert!((min - 1.0).abs() < 1e-9);
            let mut l1 = 0.0;
            assert_eq!(hadlat_lattice_min_l1_norm(lattice, 4.0, &mut l1), HadlatStatus::Ok);
            assert!((l1 - 2.0).abs() < 1e-9);
            let mut wr = false;
            assert_eq!(hadlat_lattice_is_well_rounded(lattice, &mut wr), HadlatStatus::Ok);
            assert!(wr);
            hadlat_lattice_free(lattice);
        }
    }

    #[test]
    fn builtin_rejects_unknown_names_and_nulls() {
        let name = CString::new("leech").unwrap();
        let mut handle: *mut HadlatLattice = std::ptr::null_mut();
        let status = unsafe { hadlat_lattice_builtin(name.as_ptr(), 24, &mut handle) };
        assert_eq!(status, HadlatStatus::Unsupported);
        let status = unsafe { hadlat_lattice_builtin(std::ptr::null(), 4, &mut handle) };
        assert_eq!(status, HadlatStatus::NullPointer);
        unsafe { hadlat_lattice_free(std::ptr::null_mut()) };
    }

    #[test]
    fn load_missing_file_is_a_parse_error() {
        let path = CString::new("/no/such/rotation.txt").unwrap();
        let mut handle: *mut HadlatLattice = std::ptr::null_mut();
        let status = unsafe { hadlat_lattice_load(path.as_ptr(), &mut handle) };
        assert_eq!(status, HadlatStatus::ParseError);
        assert!(handle.is_null());
    }

    #[test]
    fn scalar_helpers() {
        unsafe {
            let (mut mean, mut var) = (0.0, 0.0);
            assert_eq!(hadlat_moments_h2(20.0, &mut mean, &mut var), HadlatStatus::Ok);
            assert_eq!(mean, 1.0);
            assert!((var - 41.0 / 441.0).abs() < 1e-12);
            assert_eq!(
                hadlat_moments_h2(-1.0, &mut mean, &mut var),
                HadlatStatus::InvalidArgument
            );

            let mut sigma2 = 0.0;
            assert_eq!(hadlat_vnr_to_sigma2(0.0, 1.0, 4, &mut sigma2), HadlatStatus::Ok);
            assert_eq!(sigma2, 0.125);

            let mut density = 0.0;
            assert_eq!(hadlat_rician_pdf(1.0, 0.0, &mut density), HadlatStatus::Ok);
            assert!((density - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn error_rate_is_deterministic() {
        let lattice = builtin("hadamard", 2);
        let run = || {
            let (mut rate, mut stderr) = (0.0, 0.0);
            let status = unsafe {
                hadlat_error_rate(lattice, 4, 20.0, 8.0, 5000, 11, &mut rate, &mut stderr)
            };
            assert_eq!(status, HadlatStatus::Ok);
            (rate, stderr)
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        assert!(a.0 > 0.0 && a.0 < 0.5);
        unsafe { hadlat_lattice_free(lattice) };
    }

    #[test]
    fn pep_bounds_agree_in_awgn_limit() {
        let lattice = builtin("hadamard", 4);
        unsafe {
            let (mut mc, mut stderr) = (0.0, 0.0);
            assert_eq!(
                hadlat_pep_bound_mc(lattice, 1e6, 8.0, 0.0, 2000, 7, &mut mc, &mut stderr),
                HadlatStatus::Ok
            );
            let mut approx = 0.0;
            assert_eq!(
                hadlat_pep_bound_approx(lattice, 1e6, 8.0, 0.0, &mut approx),
                HadlatStatus::Ok
            );
            assert!((mc - approx).abs() <= 3.0 * stderr + 1e-9);
            hadlat_lattice_free(lattice);
        }
    }

    #[test]
    fn nonwr_estimate_matches_reference() {
        let (mut estimate, mut stderr) = (0.0, 0.0);
        let status = unsafe {
            hadlat_nonwr_probability_mc(2, 0.0, 100_000, 3, &mut estimate, &mut stderr)
        };
        assert_eq!(status, HadlatStatus::Ok);
        assert!((estimate - 0.5).abs() < 3.0 * stderr);
        let status = unsafe {
            hadlat_nonwr_probability_mc(3, 0.0, 10, 3, &mut estimate, &mut stderr)
        };
        assert_eq!(status, HadlatStatus::Unsupported);
    }

    #[test]
    fn status_messages_are_static() {
        for status in [
            HadlatStatus::Ok,
            HadlatStatus::NullPointer,
            HadlatStatus::InvalidArgument,
            HadlatStatus::NotOrthogonal,
            HadlatStatus::ParseError,
            HadlatStatus::TooLarge,
            HadlatStatus::Unsupported,
            HadlatStatus::RuntimeError,
        ] {
            let ptr = hadlat_status_message(status);
            assert!(!ptr.is_null());
            let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap();
            assert!(!text.is_empty());
        }
    }

    #[test]
    fn generated_header_exists() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hadlat.h");
        let text = std::fs::read_to_string(header).unwrap();
        assert!(text.contains("HadlatStatus"));
        assert!(text.contains("hadlat_error_rate"));
        assert!(text.contains("struct HadlatLattice HadlatLattice"));
    }
}
