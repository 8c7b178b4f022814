//! The PM-HLL loop: a sample-by-sample tracker for the fundamental frequency
//! and harmonic-to-noise ratio of a periodic component emerging in the input.
//!
//! Each tick pushes the new sample into a delay line and forms a
//! period-constructive and a period-suppressive comb output,
//! `y_p = x(t) + x(t - Tc)` and `y_m = x(t) - x(t - Tc)`, where `Tc = 1/fc`
//! is the current oscillator period read at a fractional delay. A phase
//! accumulator strobes once per period and anchors two stabilized images
//! that average the comb outputs at fixed period offsets. The ratio of the
//! smoothed image powers gives the HNR; the rotation of the complex pair
//! `y_p_si + i*y_m_si` gives a control signal whose sign says on which side
//! of the input period the oscillator sits. A positive control signal divides
//! `fc` by an adaptation factor, a negative one multiplies, closing one
//! semitone of mismatch in `adapt_periods` oscillator periods. All time
//! constants are multiples of the current `Tc` and are recomputed every
//! sample.

mod delay;
mod image;
mod smoother;
mod strobe;

pub use delay::DelayLine;
pub use image::StabilizedImage;
pub use smoother::Smoother;
pub use strobe::Strobe;

use crate::error::{Error, Result};
use serde::Serialize;

/// Magnitudes below this are treated as a null vector when forming the
/// rotation angle, since the phase of a null vector is undefined.
const EPS_MAG: f64 = 1e-12;
/// Absolute floor added to the suppressive power so the HNR ratio is total.
const EPS_POWER: f64 = 1e-20;
/// HNR values are clamped to this range in dB, before and after the
/// post-smoother, keeping the output bounded and plottable.
const HNR_CLAMP_DB: f64 = 60.0;

/// All tunable constants of one loop instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineConfig {
    /// Sampling frequency in Hz.
    pub fs: f64,
    /// Initial oscillator frequency in Hz.
    pub fc0: f64,
    /// Lower clamp for the oscillator frequency.
    pub fc_min: f64,
    /// Upper clamp for the oscillator frequency.
    pub fc_max: f64,
    /// Assumed maximum harmonic number; sets the catch range.
    pub np: u32,
    /// Stabilized-image time constant, in oscillator periods.
    pub tau_si_mult: f64,
    /// HNR power-averaging time constant, in oscillator periods.
    pub tau_hnr_mult: f64,
    /// HNR post-smoothing time constant, in oscillator periods.
    pub tau_hnr_post_mult: f64,
    /// Control-signal averaging time constant, in oscillator periods.
    pub tau_cs_mult: f64,
    /// Number of oscillator periods in which one semitone of frequency
    /// offset is closed by the bang-bang adaptation.
    pub adapt_periods: f64,
}

impl EngineConfig {
    /// Defaults at the reference sample rate of 5 kHz.
    pub fn new(fc0: f64) -> EngineConfig {
        EngineConfig::with_fs(5000.0, fc0)
    }

    pub fn with_fs(fs: f64, fc0: f64) -> EngineConfig {
        EngineConfig {
            fs,
            fc0,
            fc_min: 96.0,
            fc_max: fs / 4.0,
            np: 7,
            tau_si_mult: 1.0,
            tau_hnr_mult: 0.5,
            tau_hnr_post_mult: 0.05,
            tau_cs_mult: 0.1,
            adapt_periods: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return Err(Error::config(format!(
                "fs must be positive, got {}",
                self.fs
            )));
        }
        if !(self.fc_min > 0.0
            && self.fc_min <= self.fc0
            && self.fc0 <= self.fc_max
            && self.fc_max <= self.fs / 2.0)
        {
            return Err(Error::config(format!(
                "need 0 < fc_min <= fc0 <= fc_max <= fs/2, got fc_min {} fc0 {} fc_max {} fs {}",
                self.fc_min, self.fc0, self.fc_max, self.fs
            )));
        }
        if self.np < 1 {
            return Err(Error::config("np must be at least 1"));
        }
        let taus = [
            self.tau_si_mult,
            self.tau_hnr_mult,
            self.tau_hnr_post_mult,
            self.tau_cs_mult,
        ];
        if taus.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::config(
                "all time-constant multipliers must be positive",
            ));
        }
        if !(self.adapt_periods > 0.0) {
            return Err(Error::config("adapt_periods must be positive"));
        }
        Ok(())
    }
}

/// Per-sample emission of the loop.
#[derive(Debug, Clone, Copy)]
pub struct TickOutput {
    /// Oscillator frequency after this sample's adaptation, Hz.
    pub fc_hz: f64,
    /// Smoothed harmonic-to-noise ratio, dB, clamped to +-60.
    pub hnr_db: f64,
    /// Smoothed rotation angle of the image pair, radians per sample.
    pub cs: f64,
    /// True when the period phase wrapped on this sample.
    pub strobe: bool,
    /// True iff `hnr_db > 0`.
    pub locked: bool,
    /// Raw comb outputs, for diagnostics.
    pub y_p: f64,
    pub y_m: f64,
}

/// Mutable loop state without the delay line, so a bank can run many of
/// these against one shared line.
#[derive(Debug, Clone)]
pub(crate) struct LoopState {
    fc: f64,
    tc: f64,
    strobe: Strobe,
    si_p: StabilizedImage,
    si_m: StabilizedImage,
    p_p: Smoother,
    p_m: Smoother,
    hnr_post: Smoother,
    cs: Smoother,
    cp_re: f64,
    cp_im: f64,
}

impl LoopState {
    pub(crate) fn new(cfg: &EngineConfig, image_len: usize) -> LoopState {
        LoopState {
            fc: cfg.fc0,
            tc: 1.0 / cfg.fc0,
            strobe: Strobe::new(),
            si_p: StabilizedImage::new(image_len),
            si_m: StabilizedImage::new(image_len),
            p_p: Smoother::default(),
            p_m: Smoother::default(),
            hnr_post: Smoother::default(),
            cs: Smoother::default(),
            cp_re: 0.0,
            cp_im: 0.0,
        }
    }

    /// Delay, in samples, at which this loop reads the shared line.
    pub(crate) fn frac_delay(&self, fs: f64) -> f64 {
        self.tc * fs
    }

    pub(crate) fn fc(&self) -> f64 {
        self.fc
    }

    /// Clamp the oscillator into `[lo, hi]`, used for cell confinement.
    pub(crate) fn clamp_fc(&mut self, lo: f64, hi: f64) {
        self.fc = self.fc.clamp(lo, hi);
        self.tc = 1.0 / self.fc;
    }

    /// One loop update for an already-pushed input sample `x` and its
    /// period-delayed read `xd`. Runs comb, strobe, stabilized images, HNR,
    /// control and adaptation, in that order.
    pub(crate) fn process(&mut self, cfg: &EngineConfig, x: f64, xd: f64) -> TickOutput {
        let fs = cfg.fs;
        let y_p = x + xd;
        let y_m = x - xd;

        let strobe = self.strobe.step(self.fc, fs);
        let t_prime = self.strobe.samples_since();

        let y_p_si = self.si_p.update(y_p, t_prime, cfg.tau_si_mult);
        let y_m_si = self.si_m.update(y_m, t_prime, cfg.tau_si_mult);

        let tau_hnr = cfg.tau_hnr_mult * self.tc;
        let pp = self.p_p.step(y_p_si * y_p_si, tau_hnr, fs);
        let pm = self.p_m.step(y_m_si * y_m_si, tau_hnr, fs);
        let lin = pp / (pm + EPS_POWER);
        let raw = if lin > 0.0 {
            (10.0 * lin.log10()).clamp(-HNR_CLAMP_DB, HNR_CLAMP_DB)
        } else {
            -HNR_CLAMP_DB
        };
        let hnr_db = self
            .hnr_post
            .step(raw, cfg.tau_hnr_post_mult * self.tc, fs)
            .clamp(-HNR_CLAMP_DB, HNR_CLAMP_DB);

        // rotation of c = y_p_si + i*y_m_si against the previous sample
        let re = y_p_si * self.cp_re + y_m_si * self.cp_im;
        let im = y_m_si * self.cp_re - y_p_si * self.cp_im;
        let adc = if y_p_si.hypot(y_m_si) < EPS_MAG || self.cp_re.hypot(self.cp_im) < EPS_MAG {
            0.0
        } else {
            im.atan2(re)
        };
        let cs = self.cs.step(adc, cfg.tau_cs_mult * self.tc, fs);
        self.cp_re = y_p_si;
        self.cp_im = y_m_si;

        let g = 2f64.powf(self.fc / (12.0 * cfg.adapt_periods * fs));
        if cs > 0.0 {
            self.fc /= g;
        } else if cs < 0.0 {
            self.fc *= g;
        }
        self.fc = self.fc.clamp(cfg.fc_min, cfg.fc_max);
        self.tc = 1.0 / self.fc;

        TickOutput {
            fc_hz: self.fc,
            hnr_db,
            cs,
            strobe,
            locked: hnr_db > 0.0,
            y_p,
            y_m,
        }
    }
}

/// One self-contained tracker instance: loop state plus its own delay line.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: EngineConfig,
    state: LoopState,
    delay: DelayLine,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Engine> {
        let cap = (cfg.fs / cfg.fc_min).ceil() as usize + 2;
        Engine::with_delay_capacity(cfg, cap)
    }

    /// Like `new` but with an explicit delay capacity, so an engine can be
    /// compared slot-for-slot against a bank sharing a larger line.
    pub fn with_delay_capacity(cfg: EngineConfig, capacity: usize) -> Result<Engine> {
        cfg.validate()?;
        let need = (cfg.fs / cfg.fc_min).ceil() as usize + 2;
        if capacity < need {
            return Err(Error::config(format!(
                "delay capacity {capacity} below required {need} for fc_min {}",
                cfg.fc_min
            )));
        }
        let state = LoopState::new(&cfg, capacity);
        Ok(Engine {
            state,
            delay: DelayLine::with_capacity(capacity),
            cfg,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Current oscillator frequency, Hz.
    pub fn fc(&self) -> f64 {
        self.state.fc()
    }

    /// Sample indices of the strobes emitted so far.
    pub fn strobe_times(&self) -> &[usize] {
        self.state.strobe.times()
    }

    /// Process one input sample. Rejects non-finite input.
    pub fn tick(&mut self, x: f64) -> Result<TickOutput> {
        if !x.is_finite() {
            return Err(Error::numeric(format!("non-finite input sample {x}")));
        }
        self.delay.push(x);
        let xd = self.delay.read_frac(self.state.frac_delay(self.cfg.fs));
        Ok(self.state.process(&self.cfg, x, xd))
    }

    /// Process a whole buffer, collecting every tick.
    pub fn run(&mut self, xs: &[f64]) -> Result<Vec<TickOutput>> {
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            out.push(self.tick(x)?);
        }
        Ok(out)
    }
}

/// Interval of input fundamentals that will capture a loop at oscillator
/// frequency `fc` assuming at most `np` harmonics:
/// `[fc*(1 - 1/(2np)), fc*(1 + 1/(2np))]`.
pub fn catch_range(fc: f64, np: u32) -> (f64, f64) {
    let half = 1.0 / (2.0 * np as f64);
    (fc * (1.0 - half), fc * (1.0 + half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn frozen(fc: f64) -> Engine {
        // pin the oscillator by collapsing its clamp range
        let mut cfg = EngineConfig::new(fc);
        cfg.fc_min = fc;
        cfg.fc_max = fc;
        Engine::new(cfg).unwrap()
    }

    fn sine(f: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * PI * f * i as f64 / fs).sin())
            .collect()
    }

    #[test]
    fn config_validation_rejects_bad_bounds() {
        let mut cfg = EngineConfig::new(99.5);
        cfg.fc_min = 120.0;
        assert!(Engine::new(cfg).is_err());
        let mut cfg = EngineConfig::new(99.5);
        cfg.fc_max = 3000.0;
        assert!(Engine::new(cfg).is_err());
        let mut cfg = EngineConfig::new(99.5);
        cfg.adapt_periods = 0.0;
        assert!(Engine::new(cfg).is_err());
        let mut cfg = EngineConfig::new(99.5);
        cfg.tau_cs_mult = -1.0;
        assert!(Engine::new(cfg).is_err());
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut e = Engine::new(EngineConfig::new(99.5)).unwrap();
        assert!(e.tick(f64::NAN).is_err());
        assert!(e.tick(f64::INFINITY).is_err());
        assert!(e.tick(0.5).is_ok());
    }

    #[test]
    fn zero_input_is_inert() {
        let mut e = Engine::new(EngineConfig::new(99.5)).unwrap();
        for _ in 0..2000 {
            let o = e.tick(0.0).unwrap();
            assert_eq!(o.fc_hz, 99.5);
            assert!(!o.locked);
            assert!(o.hnr_db <= 0.0);
        }
    }

    #[test]
    fn comb_identities_hold_every_tick() {
        let mut e = Engine::new(EngineConfig::new(99.5)).unwrap();
        let mut delay_ref = DelayLine::for_fc_min(5000.0, 96.0);
        let xs = sine(99.5, 5000.0, 400);
        for &x in &xs {
            delay_ref.push(x);
            let xd = delay_ref.read_frac(e.state.frac_delay(5000.0));
            let o = e.tick(x).unwrap();
            assert!((o.y_p + o.y_m - 2.0 * x).abs() < 1e-14);
            assert!((o.y_p - o.y_m - 2.0 * xd).abs() < 1e-14);
        }
    }

    #[test]
    fn comb_outputs_match_closed_form_for_a_sine() {
        // matched-period read: y_p = 2cos(pi f Tc) sin(2pi f t - pi f Tc),
        // y_m = 2sin(pi f Tc) cos(2pi f t - pi f Tc), up to the linear
        // interpolation error bound 2*(pi f / fs)^2
        let (f, fs) = (99.5, 5000.0);
        let mut e = frozen(f);
        let tol = 2.0 * (PI * f / fs).powi(2) + 1e-9;
        let n = 2000;
        let cap = 55;
        for i in 0..n {
            let t = i as f64 / fs;
            let x = (2.0 * PI * f * t).sin();
            let o = e.tick(x).unwrap();
            if i < cap {
                continue; // delay line still warming up
            }
            let ph = 2.0 * PI * f * t - PI; // pi*f*Tc = pi at matched period
            let yp_ref = 2.0 * (PI).cos() * ph.sin();
            let ym_ref = 2.0 * (PI).sin() * ph.cos();
            assert!(
                (o.y_p - yp_ref).abs() < tol,
                "y_p off at {i}: {} vs {yp_ref}",
                o.y_p
            );
            assert!(
                (o.y_m - ym_ref).abs() < tol,
                "y_m off at {i}: {} vs {ym_ref}",
                o.y_m
            );
        }
    }

    #[test]
    fn clean_sine_at_fc0_locks_and_stays() {
        let mut e = Engine::new(EngineConfig::new(100.0)).unwrap();
        let xs = sine(100.0, 5000.0, 3000);
        let outs = e.run(&xs).unwrap();
        // the bang-bang servo settles into a limit cycle around the input
        // frequency; the dither amplitude is set by the control smoothing lag
        assert!(outs[2000..].iter().all(|o| (o.fc_hz - 100.0).abs() < 1.5));
        assert!(outs.last().unwrap().hnr_db > 30.0);
        assert!(outs[2500..].iter().all(|o| o.locked));
    }

    #[test]
    fn control_sign_follows_detuning_direction() {
        for (ratio, want) in [(0.97, 1.0), (1.03, -1.0)] {
            let mut e = frozen(100.0);
            let xs = sine(100.0 * ratio, 5000.0, 1000);
            let outs = e.run(&xs).unwrap();
            let mean_cs: f64 = outs[500..].iter().map(|o| o.cs).sum::<f64>() / 500.0;
            assert_eq!(mean_cs.signum(), want, "ratio {ratio}");
        }
    }

    #[test]
    fn adaptation_closes_a_semitone_in_adapt_periods() {
        // g^(ap*fs/fc) = 2^(1/12) for any ap; the identity the rate is
        // derived from uses ap = 3
        for ap in [3.0, 2.0] {
            let (fc, fs) = (100.0, 5000.0);
            let g = 2f64.powf(fc / (12.0 * ap * fs));
            let semitone = g.powf(ap * fs / fc);
            assert!((semitone - 2f64.powf(1.0 / 12.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn fc_pins_at_lower_clamp() {
        // a capturable tone below fc_min drags the oscillator onto the clamp
        let mut cfg = EngineConfig::new(97.0);
        cfg.fc_min = 96.0;
        let mut e = Engine::new(cfg).unwrap();
        let xs = sine(93.0, 5000.0, 4000);
        let outs = e.run(&xs).unwrap();
        assert_eq!(outs.last().unwrap().fc_hz, 96.0);
        assert!(outs[3000..].iter().all(|o| o.fc_hz == 96.0));
    }

    #[test]
    fn hnr_cot_law_spot_check() {
        // clean sine detuned by eps against a frozen oscillator settles at
        // 20*log10|cot(pi*eps)|; the image gains cancel in the ratio
        let eps = 0.05;
        let mut e = frozen(100.0);
        let xs = sine(100.0 * (1.0 + eps), 5000.0, 2000);
        let outs = e.run(&xs).unwrap();
        let meas: f64 = outs[1000..].iter().map(|o| o.hnr_db).sum::<f64>() / 1000.0;
        let pred = 20.0 * (1.0 / (PI * eps).tan()).abs().log10();
        assert!((pred - 16.0).abs() < 0.1);
        assert!(
            (meas - pred).abs() < 1.0,
            "measured {meas} predicted {pred}"
        );
    }

    #[test]
    fn perfect_lock_saturates_the_hnr_clamp() {
        // noiseless matched input drives the suppressive image to zero and
        // the ratio onto the +60 dB clamp
        let mut e = frozen(78.125); // exact integer period of 64 samples
        let wave: Vec<f64> = sine(78.125, 5000.0, 64);
        let mut last = 0.0;
        for _pass in 0..400 {
            for &w in &wave {
                last = e.tick(w).unwrap().hnr_db;
            }
        }
        assert!(last > 59.0);
    }

    #[test]
    fn catch_range_examples() {
        let (lo, hi) = catch_range(100.0, 7);
        assert!((lo - 92.857).abs() < 1e-3);
        assert!((hi - 107.143).abs() < 1e-3);
        assert_eq!(catch_range(100.0, 1), (50.0, 150.0));
        let (lo2, hi2) = catch_range(200.0, 7);
        assert_eq!(lo2, 2.0 * lo);
        assert_eq!(hi2, 2.0 * hi);
    }

    #[test]
    fn amplitude_scaling_leaves_the_trajectory_unchanged() {
        let xs = sine(99.0, 5000.0, 1500);
        let xs8: Vec<f64> = xs.iter().map(|&x| 8.0 * x).collect();
        let mut e1 = Engine::new(EngineConfig::new(99.5)).unwrap();
        let mut e2 = Engine::new(EngineConfig::new(99.5)).unwrap();
        let o1 = e1.run(&xs).unwrap();
        let o2 = e2.run(&xs8).unwrap();
        for (a, b) in o1.iter().zip(&o2) {
            assert_eq!(a.fc_hz, b.fc_hz);
            assert!((a.hnr_db - b.hnr_db).abs() < 1e-9);
        }
    }
}
