//! C ABI for the stark-lft solver.
//!
//! All handles are opaque; every function returns a `StarkStatus` and reports
//! detail through `stark_last_error`.  Pointers returned by `_new`/`_parse`
//! functions must be released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use stark_lft::config::{parse_config, RunConfig};
use stark_lft::run::{run, solve_dipole_chain, ChannelSolution};
use stark_lft::{Error, ProblemSpec};

/// Result codes mirrored from the library error kinds.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum StarkStatus {
    StarkOk = 0,
    StarkInvalidArgument = 1,
    StarkConfigError = 2,
    StarkDomainError = 3,
    StarkConvergenceError = 4,
    StarkLinalgError = 5,
    StarkUnsupported = 6,
    StarkIoError = 7,
    StarkInternalError = 8,
}

use StarkStatus::*;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &Error) -> StarkStatus {
    match err {
        Error::Config(_) => StarkConfigError,
        Error::Domain(_) | Error::Truncation(_) | Error::Overflow { .. } => StarkDomainError,
        Error::Convergence(_) => StarkConvergenceError,
        Error::Linalg(_) => StarkLinalgError,
        Error::Unsupported(_) => StarkUnsupported,
        Error::Io(_) => StarkIoError,
        Error::Json(_) => StarkConfigError,
    }
}

fn guarded<F: FnOnce() -> StarkStatus>(f: F) -> StarkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            StarkInternalError
        }
    }
}

/// Opaque parsed configuration.
pub struct StarkConfig {
    inner: RunConfig,
}

/// Opaque per-energy scattering solution (channels, frame transformation,
/// eta phases, dipole vectors).
pub struct StarkSolution {
    spec: ProblemSpec,
    omega: f64,
    inner: ChannelSolution,
}

/// Copy the most recent error message (UTF-8, NUL-terminated, truncated to
/// `len`).  Returns the full message length.
#[no_mangle]
pub extern "C" fn stark_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n - 1) = 0;
            }
        }
        bytes.len() - 1
    })
}

/// Parse a JSON configuration document.  On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stark_config_parse(
    json: *const c_char,
    out: *mut *mut StarkConfig,
) -> StarkStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return StarkInvalidArgument;
    }
    guarded(|| {
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config text is not valid UTF-8");
                return StarkInvalidArgument;
            }
        };
        match parse_config(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(StarkConfig { inner: cfg }));
                StarkOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `cfg` must come from `stark_config_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn stark_config_free(cfg: *mut StarkConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Execute the configured mode, writing CSV artifacts into `out_dir`.
///
/// # Safety
/// `cfg` must be a live handle; `out_dir` a valid NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn stark_run(
    cfg: *const StarkConfig,
    out_dir: *const c_char,
    threads: c_int,
) -> StarkStatus {
    if cfg.is_null() || out_dir.is_null() || threads < 1 {
        set_error("null pointer or non-positive thread count");
        return StarkInvalidArgument;
    }
    guarded(|| {
        let dir = match CStr::from_ptr(out_dir).to_str() {
            Ok(d) => d,
            Err(_) => {
                set_error("out_dir is not valid UTF-8");
                return StarkInvalidArgument;
            }
        };
        match run(&(*cfg).inner, Path::new(dir), threads as usize) {
            Ok(_) => StarkOk,
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Solve the scattering chain for one scan energy (`energy_index` into the
/// config's energy list).  On success `*out` owns a new handle.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stark_solve(
    cfg: *const StarkConfig,
    energy_index: usize,
    out: *mut *mut StarkSolution,
) -> StarkStatus {
    if cfg.is_null() || out.is_null() {
        set_error("null pointer argument");
        return StarkInvalidArgument;
    }
    guarded(|| {
        let rc = &(*cfg).inner;
        if energy_index >= rc.energies_au.len() {
            set_error("energy_index out of range");
            return StarkInvalidArgument;
        }
        let spec = ProblemSpec {
            energy: rc.energies_au[energy_index],
            field: rc.field_au,
            m: rc.m,
        };
        match solve_dipole_chain(&spec, rc) {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(StarkSolution {
                    spec,
                    omega: rc.photon_energies_au[energy_index],
                    inner: sol,
                }));
                StarkOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `sol` must come from `stark_solve` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn stark_solution_free(sol: *mut StarkSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of retained outgoing channels.
///
/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stark_solution_channel_count(sol: *const StarkSolution) -> usize {
    if sol.is_null() {
        return 0;
    }
    (*sol).inner.rows.len()
}

/// Separation constant beta of retained channel `i`.
///
/// # Safety
/// `sol` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stark_solution_beta(
    sol: *const StarkSolution,
    i: usize,
    out: *mut f64,
) -> StarkStatus {
    if sol.is_null() || out.is_null() {
        set_error("null pointer argument");
        return StarkInvalidArgument;
    }
    let s = &(*sol).inner;
    if i >= s.rows.len() {
        set_error("channel index out of range");
        return StarkInvalidArgument;
    }
    *out = s.lft.betas[s.rows[i]];
    StarkOk
}

/// Incoming-wave dipole amplitude D^- of retained channel `i`.
///
/// # Safety
/// `sol` must be a live handle; `re`/`im` writable.
#[no_mangle]
pub unsafe extern "C" fn stark_solution_dipole(
    sol: *const StarkSolution,
    i: usize,
    re: *mut f64,
    im: *mut f64,
) -> StarkStatus {
    if sol.is_null() || re.is_null() || im.is_null() {
        set_error("null pointer argument");
        return StarkInvalidArgument;
    }
    let s = &(*sol).inner;
    if i >= s.d_minus.len() {
        set_error("channel index out of range");
        return StarkInvalidArgument;
    }
    *re = s.d_minus[i].re;
    *im = s.d_minus[i].im;
    StarkOk
}

/// Total photoionization cross section (atomic units) at the configured
/// photon energy.
///
/// # Safety
/// `sol` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stark_solution_sigma_total(
    sol: *const StarkSolution,
    out: *mut f64,
) -> StarkStatus {
    if sol.is_null() || out.is_null() {
        set_error("null pointer argument");
        return StarkInvalidArgument;
    }
    let s = &*sol;
    let sum: f64 = s.inner.d_minus.iter().map(|d| d.norm_sqr()).sum();
    *out = 4.0 * std::f64::consts::PI.powi(2) * s.omega / stark_lft::constants::C_AU * sum;
    let _ = s.spec;
    StarkOk
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn parse_solve_and_query_roundtrip() {
        let json = CString::new(
            r#"{"mode":"spectrum","energies_cm":[135.8231],"field_vcm":640.0,
                "m":1,"ell_max":3,"n1_max":40,"defects":"sodium",
                "dipoles":[0.3,1.0,0.1]}"#,
        )
        .unwrap();
        let mut cfg: *mut StarkConfig = std::ptr::null_mut();
        unsafe {
            assert!(stark_config_parse(json.as_ptr(), &mut cfg) == StarkOk);
            let mut sol: *mut StarkSolution = std::ptr::null_mut();
            assert!(stark_solve(cfg, 0, &mut sol) == StarkOk);
            let n = stark_solution_channel_count(sol);
            assert!(n > 10);
            let mut beta = 0.0;
            assert!(stark_solution_beta(sol, 0, &mut beta) == StarkOk);
            assert!(beta.is_finite());
            let mut sigma = 0.0;
            assert!(stark_solution_sigma_total(sol, &mut sigma) == StarkOk);
            assert!(sigma > 0.0);
            stark_solution_free(sol);
            stark_config_free(cfg);
        }
    }

    #[test]
    fn bad_config_reports_error_message() {
        let json = CString::new(r#"{"mode":"lft-map","bogus":1}"#).unwrap();
        let mut cfg: *mut StarkConfig = std::ptr::null_mut();
        unsafe {
            assert!(stark_config_parse(json.as_ptr(), &mut cfg) == StarkConfigError);
        }
        let mut buf = vec![0i8; 256];
        let n = stark_last_error(buf.as_mut_ptr(), buf.len());
        assert!(n > 0);
        let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
        assert!(msg.contains("bogus"), "{msg}");
    }

    #[test]
    fn null_arguments_rejected() {
        unsafe {
            assert!(
                stark_config_parse(std::ptr::null(), std::ptr::null_mut())
                    == StarkInvalidArgument
            );
            assert!(stark_solution_channel_count(std::ptr::null()) == 0);
            stark_config_free(std::ptr::null_mut());
            stark_solution_free(std::ptr::null_mut());
        }
    }
}
