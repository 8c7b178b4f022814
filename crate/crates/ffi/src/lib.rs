//! C ABI for the tracker engine. Handles are opaque pointers created and
//! destroyed here; every call returns a status code and writes results
//! through out-pointers. The header `include/pmhll.h` is generated by the
//! build script.

use pmhll_core::{catch_range, Engine, EngineConfig};
use std::os::raw::c_char;

/// Status of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmhllStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArg = 1,
    /// The configuration failed validation.
    InvalidConfig = 2,
    /// A non-finite sample reached the engine.
    NonFinite = 3,
}

/// Engine settings, mirroring the Rust configuration field for field.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PmhllConfig {
    /// Sampling frequency, Hz.
    pub fs: f64,
    /// Initial oscillator frequency, Hz.
    pub fc0: f64,
    pub fc_min: f64,
    pub fc_max: f64,
    /// Assumed maximum harmonic number.
    pub np: u32,
    pub tau_si_mult: f64,
    pub tau_hnr_mult: f64,
    pub tau_hnr_post_mult: f64,
    pub tau_cs_mult: f64,
    pub adapt_periods: f64,
}

impl From<&PmhllConfig> for EngineConfig {
    fn from(c: &PmhllConfig) -> EngineConfig {
        EngineConfig {
            fs: c.fs,
            fc0: c.fc0,
            fc_min: c.fc_min,
            fc_max: c.fc_max,
            np: c.np,
            tau_si_mult: c.tau_si_mult,
            tau_hnr_mult: c.tau_hnr_mult,
            tau_hnr_post_mult: c.tau_hnr_post_mult,
            tau_cs_mult: c.tau_cs_mult,
            adapt_periods: c.adapt_periods,
        }
    }
}

/// Per-sample result.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PmhllOutput {
    /// Oscillator frequency after adaptation, Hz.
    pub fc_hz: f64,
    /// Smoothed harmonic-to-noise ratio, dB.
    pub hnr_db: f64,
    /// Smoothed control signal, radians per sample.
    pub cs: f64,
    /// 1 when the period phase wrapped on this sample.
    pub strobe: u8,
    /// 1 when `hnr_db` is above 0.
    pub locked: u8,
}

/// Opaque engine handle.
pub struct PmhllEngine {
    inner: Engine,
}

fn to_output(o: &pmhll_core::TickOutput) -> PmhllOutput {
    PmhllOutput {
        fc_hz: o.fc_hz,
        hnr_db: o.hnr_db,
        cs: o.cs,
        strobe: o.strobe as u8,
        locked: o.locked as u8,
    }
}

/// Default configuration for a sampling rate and starting frequency.
#[no_mangle]
pub extern "C" fn pmhll_config_default(fs: f64, fc0: f64) -> PmhllConfig {
    let c = EngineConfig::with_fs(fs, fc0);
    PmhllConfig {
        fs: c.fs,
        fc0: c.fc0,
        fc_min: c.fc_min,
        fc_max: c.fc_max,
        np: c.np,
        tau_si_mult: c.tau_si_mult,
        tau_hnr_mult: c.tau_hnr_mult,
        tau_hnr_post_mult: c.tau_hnr_post_mult,
        tau_cs_mult: c.tau_cs_mult,
        adapt_periods: c.adapt_periods,
    }
}

/// Create an engine. On success writes the handle to `out` and returns Ok.
///
/// # Safety
/// `cfg` must point to a valid `PmhllConfig` and `out` to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pmhll_engine_new(
    cfg: *const PmhllConfig,
    out: *mut *mut PmhllEngine,
) -> PmhllStatus {
    if cfg.is_null() || out.is_null() {
        return PmhllStatus::NullArg;
    }
    let rust_cfg: EngineConfig = (&*cfg).into();
    match Engine::new(rust_cfg) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(PmhllEngine { inner }));
            PmhllStatus::Ok
        }
        Err(_) => PmhllStatus::InvalidConfig,
    }
}

/// Process one sample and write the result to `out`.
///
/// # Safety
/// `engine` must be a live handle from `pmhll_engine_new`; `out` must point
/// to writable storage for one `PmhllOutput`.
#[no_mangle]
pub unsafe extern "C" fn pmhll_engine_tick(
    engine: *mut PmhllEngine,
    x: f64,
    out: *mut PmhllOutput,
) -> PmhllStatus {
    if engine.is_null() || out.is_null() {
        return PmhllStatus::NullArg;
    }
    match (*engine).inner.tick(x) {
        Ok(o) => {
            *out = to_output(&o);
            PmhllStatus::Ok
        }
        Err(_) => PmhllStatus::NonFinite,
    }
}

/// Process `n` samples. When `outs` is non-null it must hold `n` entries and
/// receives one result per sample. Stops at the first bad sample.
///
/// # Safety
/// `engine` must be a live handle; `xs` must point to `n` readable samples;
/// `outs` is either null or points to `n` writable `PmhllOutput` entries.
#[no_mangle]
pub unsafe extern "C" fn pmhll_engine_process(
    engine: *mut PmhllEngine,
    xs: *const f64,
    n: usize,
    outs: *mut PmhllOutput,
) -> PmhllStatus {
    if engine.is_null() || (xs.is_null() && n > 0) {
        return PmhllStatus::NullArg;
    }
    for i in 0..n {
        match (*engine).inner.tick(*xs.add(i)) {
            Ok(o) => {
                if !outs.is_null() {
                    *outs.add(i) = to_output(&o);
                }
            }
            Err(_) => return PmhllStatus::NonFinite,
        }
    }
    PmhllStatus::Ok
}

/// Current oscillator frequency, or NaN for a null handle.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pmhll_engine_fc(engine: *const PmhllEngine) -> f64 {
    if engine.is_null() {
        return f64::NAN;
    }
    (*engine).inner.fc()
}

/// Destroy a handle. Null is ignored.
///
/// # Safety
/// `engine` must be null or a handle from `pmhll_engine_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pmhll_engine_free(engine: *mut PmhllEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Interval of input fundamentals captured at oscillator frequency `fc`
/// with `np` assumed harmonics.
///
/// # Safety
/// `lo` and `hi` must point to writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pmhll_catch_range(
    fc: f64,
    np: u32,
    lo: *mut f64,
    hi: *mut f64,
) -> PmhllStatus {
    if lo.is_null() || hi.is_null() {
        return PmhllStatus::NullArg;
    }
    let (a, b) = catch_range(fc, np);
    *lo = a;
    *hi = b;
    PmhllStatus::Ok
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn pmhll_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
