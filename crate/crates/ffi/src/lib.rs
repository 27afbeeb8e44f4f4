//! C ABI for the `cohom` bench simulator.
//!
//! Configurations and Monte Carlo counts are opaque handles created and freed
//! through this interface. Every fallible function returns a [`CohomStatus`];
//! on failure `cohom_last_error` describes the problem for the calling thread.
//! Strings returned by the library must be released with `cohom_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cohom::analytic;
use cohom::benchio::{self, BenchConfig, Format, Manifest, ResultRow, RunResult};
use cohom::montecarlo::{self, CountsAccumulator};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CohomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    IoError = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CohomFormat {
    Csv = 0,
    Json = 1,
}

/// Opaque parsed bench configuration.
pub struct CohomConfig {
    inner: BenchConfig,
}

/// Opaque Monte Carlo counts.
pub struct CohomCounts {
    inner: CountsAccumulator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (CohomStatus, String);

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CohomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CohomStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CohomStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (CohomStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(message: impl std::fmt::Display) -> Failure {
    (CohomStatus::InvalidArgument, message.to_string())
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn cohom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cohom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cohom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default configuration.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_config_default(out: *mut *mut CohomConfig) -> CohomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(CohomConfig {
            inner: BenchConfig::default(),
        }));
        Ok(())
    })
}

/// Parses configuration text. On failure `*out` is left untouched.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_config_parse(
    text: *const c_char,
    out: *mut *mut CohomConfig,
) -> CohomStatus {
    guard(|| {
        let text = in_ref(text, "text")?;
        let out = out_ref(out, "out")?;
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| invalid("config text is not UTF-8"))?;
        let inner =
            benchio::parse_config(text).map_err(|e| (CohomStatus::ConfigError, e.to_string()))?;
        *out = Box::into_raw(Box::new(CohomConfig { inner }));
        Ok(())
    })
}

/// Reads and parses a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_config_load(
    path: *const c_char,
    out: *mut *mut CohomConfig,
) -> CohomStatus {
    guard(|| {
        let path = in_ref(path, "path")?;
        let out = out_ref(out, "out")?;
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not UTF-8"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| (CohomStatus::IoError, format!("{path}: {e}")))?;
        let inner = benchio::parse_config(&text)
            .map_err(|e| (CohomStatus::ConfigError, format!("{path}: {e}")))?;
        *out = Box::into_raw(Box::new(CohomConfig { inner }));
        Ok(())
    })
}

/// Releases a configuration. NULL is ignored.
///
/// # Safety
/// `config` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cohom_config_free(config: *mut CohomConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cohom_config_set_seed(config: *mut CohomConfig, seed: u64) -> CohomStatus {
    guard(|| {
        out_ref(config, "config")?.inner.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cohom_config_set_n_pairs(
    config: *mut CohomConfig,
    n_pairs: u64,
) -> CohomStatus {
    guard(|| {
        if n_pairs == 0 {
            return Err(invalid("n_pairs must be at least 1"));
        }
        out_ref(config, "config")?.inner.n_pairs = n_pairs;
        Ok(())
    })
}

/// Canonical text of the configuration; free with `cohom_string_free`.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_config_render(
    config: *const CohomConfig,
    out: *mut *mut c_char,
) -> CohomStatus {
    guard(|| {
        let config = in_ref(config, "config")?;
        let out = out_ref(out, "out")?;
        *out = into_c_string(benchio::render_config(&config.inner));
        Ok(())
    })
}

fn analytic_value(
    out: *mut f64,
    f: impl FnOnce() -> Result<f64, analytic::AnalyticError>,
) -> CohomStatus {
    guard(|| {
        // SAFETY: callers pass either NULL or a valid pointer.
        let out = unsafe { out_ref(out, "out")? };
        *out = f().map_err(invalid)?;
        Ok(())
    })
}

/// Local intensity of detector `port` (1..4) at detuning `df` (rad/s).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_local_intensity(
    port: u8,
    df: f64,
    tau1: f64,
    tau2: f64,
    out: *mut f64,
) -> CohomStatus {
    analytic_value(out, || analytic::local_intensity(port, df, tau1, tau2))
}

/// Local intensity averaged over a Gaussian detuning spread `sigma_f` (rad/s).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_ensemble_intensity(
    port: u8,
    sigma_f: f64,
    tau1: f64,
    tau2: f64,
    out: *mut f64,
) -> CohomStatus {
    analytic_value(out, || {
        analytic::ensemble_intensity(port, sigma_f, tau1, tau2)
    })
}

/// Basis-selected D1-D3 coincidence at detuning `df`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_coincidence_r13(
    df: f64,
    tau1: f64,
    tau2: f64,
    out: *mut f64,
) -> CohomStatus {
    analytic_value(out, || Ok(analytic::coincidence_r13(df, tau1, tau2)))
}

/// Basis-selected D2-D4 coincidence at detuning `df`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_coincidence_r24(
    df: f64,
    tau1: f64,
    tau2: f64,
    out: *mut f64,
) -> CohomStatus {
    analytic_value(out, || Ok(analytic::coincidence_r24(df, tau1, tau2)))
}

/// Classical intensity-correlation baseline over `phase_samples` fringe
/// phases (at least 2).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_classical_baseline_g2(
    phase_samples: usize,
    out: *mut f64,
) -> CohomStatus {
    analytic_value(out, || analytic::classical_baseline_g2(phase_samples))
}

/// Runs the Monte Carlo engine for a single-point configuration.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_simulate(
    config: *const CohomConfig,
    out: *mut *mut CohomCounts,
) -> CohomStatus {
    guard(|| {
        let config = in_ref(config, "config")?;
        let out = out_ref(out, "out")?;
        if config.inner.scan().is_some() {
            return Err(invalid(
                "configuration describes a scan; simulate needs one point",
            ));
        }
        let (_, run) = config.inner.points().remove(0);
        let inner = montecarlo::simulate_run(&run).map_err(invalid)?;
        *out = Box::into_raw(Box::new(CohomCounts { inner }));
        Ok(())
    })
}

/// Releases counts. NULL is ignored.
///
/// # Safety
/// `counts` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cohom_counts_free(counts: *mut CohomCounts) {
    if !counts.is_null() {
        drop(Box::from_raw(counts));
    }
}

fn detector(d: u8) -> Result<u8, Failure> {
    if (1..=4).contains(&d) {
        Ok(d)
    } else {
        Err(invalid(format!("detector {d} is not in 1..4")))
    }
}

/// Singles count of detector `d` (1..4).
///
/// # Safety
/// `counts` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_counts_singles(
    counts: *const CohomCounts,
    d: u8,
    out: *mut u64,
) -> CohomStatus {
    guard(|| {
        let counts = in_ref(counts, "counts")?;
        *out_ref(out, "out")? = counts.inner.singles(detector(d)?);
        Ok(())
    })
}

/// Coincidence count between distinct detectors `i` and `j`.
///
/// # Safety
/// `counts` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_counts_coincidences(
    counts: *const CohomCounts,
    i: u8,
    j: u8,
    out: *mut u64,
) -> CohomStatus {
    guard(|| {
        let counts = in_ref(counts, "counts")?;
        let out = out_ref(out, "out")?;
        if detector(i)? == detector(j)? {
            return Err(invalid("coincidences need two distinct detectors"));
        }
        *out = counts.inner.coincidences(i, j);
        Ok(())
    })
}

/// Number of generated pair events.
///
/// # Safety
/// `counts` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_counts_n_generated(
    counts: *const CohomCounts,
    out: *mut u64,
) -> CohomStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(counts, "counts")?.inner.n_generated;
        Ok(())
    })
}

/// Normalized coincidence estimate and its standard error.
///
/// # Safety
/// `counts` must be a live handle; `value` and `std_error` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cohom_counts_g2(
    counts: *const CohomCounts,
    i: u8,
    j: u8,
    value: *mut f64,
    std_error: *mut f64,
) -> CohomStatus {
    guard(|| {
        let counts = in_ref(counts, "counts")?;
        let value = out_ref(value, "value")?;
        let std_error = out_ref(std_error, "std_error")?;
        let g = montecarlo::g2_estimate(&counts.inner, (detector(i)?, detector(j)?))
            .map_err(invalid)?;
        *value = g.value;
        *std_error = g.std_error;
        Ok(())
    })
}

/// Closed-form result table for every point of the configuration, rendered
/// as CSV or JSON. Free the string with `cohom_string_free`.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cohom_run_analytic(
    config: *const CohomConfig,
    format: CohomFormat,
    out: *mut *mut c_char,
) -> CohomStatus {
    guard(|| {
        let config = in_ref(config, "config")?;
        let out = out_ref(out, "out")?;
        let rows = config
            .inner
            .points()
            .iter()
            .map(|(tau21, run)| ResultRow::analytic(*tau21, run))
            .collect::<Result<Vec<_>, _>>()
            .map_err(invalid)?;
        let result = RunResult {
            manifest: Manifest {
                tool: "cohom".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: "analytic".into(),
                seed: config.inner.seed,
                config: benchio::render_config(&config.inner),
                started_unix_s: 0.0,
                wall_clock_s: 0.0,
            },
            rows,
        };
        let format = match format {
            CohomFormat::Csv => Format::Csv,
            CohomFormat::Json => Format::Json,
        };
        let text = benchio::render_results(&result, format)
            .map_err(|e| (CohomStatus::IoError, e.to_string()))?;
        *out = into_c_string(text);
        Ok(())
    })
}
