//! Drives the C ABI from Rust and checks it against the native engine.

use pmhll_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn new_engine(cfg: &PmhllConfig) -> *mut PmhllEngine {
    let mut handle: *mut PmhllEngine = ptr::null_mut();
    let st = unsafe { pmhll_engine_new(cfg, &mut handle) };
    assert_eq!(st, PmhllStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn sine(f: f64, fs: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * f * (i + 1) as f64 / fs).sin())
        .collect()
}

#[test]
fn defaults_mirror_the_native_config() {
    let c = pmhll_config_default(5000.0, 99.5);
    let native = pmhll_core::EngineConfig::with_fs(5000.0, 99.5);
    assert_eq!(c.fs, native.fs);
    assert_eq!(c.fc0, native.fc0);
    assert_eq!(c.fc_min, native.fc_min);
    assert_eq!(c.fc_max, native.fc_max);
    assert_eq!(c.np, native.np);
    assert_eq!(c.adapt_periods, native.adapt_periods);
}

#[test]
fn tick_stream_matches_native_engine_bitwise() {
    let cfg = pmhll_config_default(5000.0, 99.5);
    let handle = new_engine(&cfg);
    let mut native =
        pmhll_core::Engine::new(pmhll_core::EngineConfig::with_fs(5000.0, 99.5)).unwrap();
    let xs = sine(101.0, 5000.0, 1500);
    for &x in &xs {
        let mut out = PmhllOutput {
            fc_hz: 0.0,
            hnr_db: 0.0,
            cs: 0.0,
            strobe: 0,
            locked: 0,
        };
        let st = unsafe { pmhll_engine_tick(handle, x, &mut out) };
        assert_eq!(st, PmhllStatus::Ok);
        let want = native.tick(x).unwrap();
        assert_eq!(out.fc_hz.to_bits(), want.fc_hz.to_bits());
        assert_eq!(out.hnr_db.to_bits(), want.hnr_db.to_bits());
        assert_eq!(out.cs.to_bits(), want.cs.to_bits());
        assert_eq!(out.strobe == 1, want.strobe);
        assert_eq!(out.locked == 1, want.locked);
    }
    let fc = unsafe { pmhll_engine_fc(handle) };
    assert_eq!(fc.to_bits(), native.fc().to_bits());
    unsafe { pmhll_engine_free(handle) };
}

#[test]
fn batch_process_equals_tick_loop() {
    let cfg = pmhll_config_default(5000.0, 99.5);
    let a = new_engine(&cfg);
    let b = new_engine(&cfg);
    let xs = sine(98.0, 5000.0, 800);
    let mut outs = vec![
        PmhllOutput {
            fc_hz: 0.0,
            hnr_db: 0.0,
            cs: 0.0,
            strobe: 0,
            locked: 0,
        };
        xs.len()
    ];
    let st = unsafe { pmhll_engine_process(a, xs.as_ptr(), xs.len(), outs.as_mut_ptr()) };
    assert_eq!(st, PmhllStatus::Ok);
    for (i, &x) in xs.iter().enumerate() {
        let mut o = outs[0];
        let st = unsafe { pmhll_engine_tick(b, x, &mut o) };
        assert_eq!(st, PmhllStatus::Ok);
        assert_eq!(o.fc_hz.to_bits(), outs[i].fc_hz.to_bits());
        assert_eq!(o.hnr_db.to_bits(), outs[i].hnr_db.to_bits());
    }
    // null outs pointer only advances the state
    let st = unsafe { pmhll_engine_process(a, xs.as_ptr(), xs.len(), ptr::null_mut()) };
    assert_eq!(st, PmhllStatus::Ok);
    unsafe {
        pmhll_engine_free(a);
        pmhll_engine_free(b);
    }
}

#[test]
fn error_statuses() {
    let cfg = pmhll_config_default(5000.0, 99.5);
    let mut handle: *mut PmhllEngine = ptr::null_mut();
    unsafe {
        assert_eq!(
            pmhll_engine_new(ptr::null(), &mut handle),
            PmhllStatus::NullArg
        );
        assert_eq!(
            pmhll_engine_new(&cfg, ptr::null_mut()),
            PmhllStatus::NullArg
        );
        let mut bad = cfg;
        bad.fc0 = 10.0;
        assert_eq!(
            pmhll_engine_new(&bad, &mut handle),
            PmhllStatus::InvalidConfig
        );

        let h = new_engine(&cfg);
        let mut out = PmhllOutput {
            fc_hz: 0.0,
            hnr_db: 0.0,
            cs: 0.0,
            strobe: 0,
            locked: 0,
        };
        assert_eq!(
            pmhll_engine_tick(ptr::null_mut(), 0.0, &mut out),
            PmhllStatus::NullArg
        );
        assert_eq!(
            pmhll_engine_tick(h, 0.0, ptr::null_mut()),
            PmhllStatus::NullArg
        );
        assert_eq!(
            pmhll_engine_tick(h, f64::NAN, &mut out),
            PmhllStatus::NonFinite
        );
        assert_eq!(
            pmhll_engine_process(h, ptr::null(), 3, ptr::null_mut()),
            PmhllStatus::NullArg
        );
        assert!(pmhll_engine_fc(ptr::null()).is_nan());
        pmhll_engine_free(h);
        pmhll_engine_free(ptr::null_mut());
    }
}

#[test]
fn catch_range_and_version() {
    let mut lo = 0.0;
    let mut hi = 0.0;
    let st = unsafe { pmhll_catch_range(99.5, 7, &mut lo, &mut hi) };
    assert_eq!(st, PmhllStatus::Ok);
    let (a, b) = pmhll_core::catch_range(99.5, 7);
    assert_eq!(lo, a);
    assert_eq!(hi, b);
    assert_eq!(
        unsafe { pmhll_catch_range(99.5, 7, ptr::null_mut(), &mut hi) },
        PmhllStatus::NullArg
    );

    let v = unsafe { CStr::from_ptr(pmhll_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_is_in_place() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("pmhll.h");
    let text = std::fs::read_to_string(&header).expect("header missing");
    assert!(text.contains("#ifndef PMHLL_H"));
    for name in [
        "typedef struct PmhllEngine PmhllEngine;",
        "PmhllConfig",
        "PmhllOutput",
        "PmhllStatus",
        "pmhll_engine_new",
        "pmhll_engine_tick",
        "pmhll_engine_process",
        "pmhll_engine_free",
        "pmhll_catch_range",
        "pmhll_version",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}
