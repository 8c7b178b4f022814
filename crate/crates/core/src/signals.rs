//! Deterministic synthesis of the bundled test-signal families: harmonic
//! complexes with step, constant or swept fundamentals, optional mistuning,
//! additive Gaussian noise at a calibrated gain, iterated rippled noise, and
//! a three-tone chord.
//!
//! All randomness comes from ChaCha8 seeded with the run seed; independent
//! draws (starting phases, additive noise, the rippled-noise source) use
//! separate ChaCha8 streams so one run seed pins the whole stimulus.

use crate::error::{Error, Result};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::f64::consts::TAU;

/// Sub-stream for the harmonic starting phases.
pub const STREAM_PHASE: u64 = 0;
/// Sub-stream for additive noise.
pub const STREAM_NOISE: u64 = 1;
/// Sub-stream for the rippled-noise source.
pub const STREAM_IRN: u64 = 2;

/// A ChaCha8 generator for one (seed, stream) pair.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One partial of a harmonic complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Component {
    /// Harmonic number, 1 is the fundamental.
    pub n: u32,
    /// Linear amplitude.
    pub amp: f64,
    /// Starting phase in radians; `None` draws it from the run seed.
    pub phase: Option<f64>,
}

impl Component {
    pub fn new(n: u32, amp: f64) -> Component {
        Component {
            n,
            amp,
            phase: None,
        }
    }
}

/// A harmonic complex: which partials, at which amplitudes, plus a common
/// additive frequency shift applied to every partial (0 for harmonic
/// signals).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSpec {
    pub components: Vec<Component>,
    pub mistune_hz: f64,
}

impl HarmonicSpec {
    pub fn new(parts: &[(u32, f64)]) -> HarmonicSpec {
        HarmonicSpec {
            components: parts.iter().map(|&(n, a)| Component::new(n, a)).collect(),
            mistune_hz: 0.0,
        }
    }

    pub fn mistuned(parts: &[(u32, f64)], mistune_hz: f64) -> HarmonicSpec {
        let mut s = HarmonicSpec::new(parts);
        s.mistune_hz = mistune_hz;
        s
    }

    /// Analytic signal power, sum of `amp^2 / 2` over the partials.
    pub fn power(&self) -> f64 {
        self.components.iter().map(|c| c.amp * c.amp / 2.0).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::config("harmonic spec needs at least one component"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.components {
            if c.n < 1 {
                return Err(Error::config("harmonic numbers start at 1"));
            }
            if !(c.amp > 0.0) {
                return Err(Error::config("component amplitudes must be positive"));
            }
            if !seen.insert(c.n) {
                return Err(Error::config(format!("duplicate harmonic number {}", c.n)));
            }
        }
        Ok(())
    }
}

/// Ground-truth fundamental frequency as a function of time.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum F0Track {
    Constant {
        f0: f64,
    },
    /// `first` until `at_s`, `second` afterwards.
    Step {
        first: f64,
        second: f64,
        at_s: f64,
    },
    /// Linear ramp over `[0, duration_s]`, clamped outside.
    Sweep {
        from: f64,
        to: f64,
        duration_s: f64,
    },
}

impl F0Track {
    pub fn constant(f0: f64) -> F0Track {
        F0Track::Constant { f0 }
    }

    /// Step at half of the total duration, the layout of the bundled
    /// step-fundamental scenarios.
    pub fn step(first: f64, second: f64, total_duration_s: f64) -> F0Track {
        F0Track::Step {
            first,
            second,
            at_s: total_duration_s / 2.0,
        }
    }

    pub fn sweep(from: f64, to: f64, duration_s: f64) -> F0Track {
        F0Track::Sweep {
            from,
            to,
            duration_s,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match *self {
            F0Track::Constant { f0 } => f0,
            F0Track::Step {
                first,
                second,
                at_s,
            } => {
                if t < at_s {
                    first
                } else {
                    second
                }
            }
            F0Track::Sweep {
                from,
                to,
                duration_s,
            } => {
                if t <= 0.0 {
                    from
                } else if t >= duration_s {
                    to
                } else {
                    from + (to - from) * t / duration_s
                }
            }
        }
    }

    /// Per-sample trace of length `n`.
    pub fn trace(&self, fs: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.at(i as f64 / fs)).collect()
    }

    pub fn max_f0(&self) -> f64 {
        match *self {
            F0Track::Constant { f0 } => f0,
            F0Track::Step { first, second, .. } => first.max(second),
            F0Track::Sweep { from, to, .. } => from.max(to),
        }
    }

    pub fn min_f0(&self) -> f64 {
        match *self {
            F0Track::Constant { f0 } => f0,
            F0Track::Step { first, second, .. } => first.min(second),
            F0Track::Sweep { from, to, .. } => from.min(to),
        }
    }
}

/// Additive Gaussian noise drawn from `STREAM_NOISE` of `seed` and scaled by
/// `gain`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub gain: f64,
    pub seed: u64,
}

/// Iterated rippled noise: a Gaussian source summed with a circularly
/// shifted copy of itself, repeated `iterations` times; a centered segment
/// is cut out to avoid the wrap seam and normalized to unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IrnSpec {
    /// Ripple delay in seconds; rounded to the nearest whole sample.
    pub delay_s: f64,
    pub iterations: u32,
    pub source_duration_s: f64,
    pub segment_duration_s: f64,
    pub seed: u64,
}

impl IrnSpec {
    pub fn new(delay_s: f64, iterations: u32, segment_duration_s: f64, seed: u64) -> IrnSpec {
        IrnSpec {
            delay_s,
            iterations,
            source_duration_s: 4.0,
            segment_duration_s,
            seed,
        }
    }

    /// The periodicity actually realized after rounding the delay to whole
    /// samples, in Hz.
    pub fn realized_f0(&self, fs: f64) -> f64 {
        fs / (self.delay_s * fs).round()
    }
}

/// Render a harmonic complex along an f0 track. The fundamental phase is
/// accumulated per sample, so the instantaneous frequency follows the track
/// exactly; the mistune shift rides on a separate accumulator common to all
/// partials. Starting phases are drawn once per component, in order, from
/// `rng` for every component that does not pin one explicitly.
pub fn synth_harmonic(
    spec: &HarmonicSpec,
    track: &F0Track,
    fs: f64,
    duration_s: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if track.min_f0() <= 0.0 {
        return Err(Error::config("f0 track must stay positive"));
    }
    let n_max = spec.components.iter().map(|c| c.n).max().unwrap() as f64;
    let top = n_max * track.max_f0() + spec.mistune_hz.max(0.0);
    if top >= fs / 2.0 {
        return Err(Error::config(format!(
            "component at {top} Hz would alias at fs {fs}"
        )));
    }
    let phases: Vec<f64> = spec
        .components
        .iter()
        .map(|c| c.phase.unwrap_or_else(|| rng.random_range(0.0..TAU)))
        .collect();
    let n = (duration_s * fs).round() as usize;
    let mut x = vec![0.0; n];
    let mut phi = 0.0;
    let mut psi = 0.0;
    for (i, xi) in x.iter_mut().enumerate() {
        phi += TAU * track.at(i as f64 / fs) / fs;
        psi += TAU * spec.mistune_hz / fs;
        let mut s = 0.0;
        for (c, &p0) in spec.components.iter().zip(&phases) {
            s += c.amp * (c.n as f64 * phi + psi - p0).sin();
        }
        *xi = s;
    }
    Ok(x)
}

/// Add seeded Gaussian noise at `spec.gain`; returns the mix and the
/// realized SNR in dB measured over the whole duration (`+inf` for gain 0).
pub fn mix_noise(signal: &[f64], spec: &NoiseSpec) -> (Vec<f64>, f64) {
    if spec.gain == 0.0 {
        return (signal.to_vec(), f64::INFINITY);
    }
    let mut rng = rng_for(spec.seed, STREAM_NOISE);
    let noise: Vec<f64> = (0..signal.len())
        .map(|_| spec.gain * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let p_sig = mean_power(signal);
    let p_noise = mean_power(&noise);
    let snr_db = 10.0 * (p_sig / p_noise).log10();
    let mixed = signal.iter().zip(&noise).map(|(s, n)| s + n).collect();
    (mixed, snr_db)
}

fn mean_power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Generate iterated rippled noise. Each iteration adds a
/// circularly shifted copy of the running sum; a centered segment of the
/// requested duration is then normalized to unit variance.
pub fn synth_irn(spec: &IrnSpec, fs: f64) -> Result<Vec<f64>> {
    if spec.iterations < 1 {
        return Err(Error::config("irn needs at least one iteration"));
    }
    let shift = (spec.delay_s * fs).round() as usize;
    if shift == 0 {
        return Err(Error::config("irn delay rounds to zero samples"));
    }
    let n = (spec.source_duration_s * fs).round() as usize;
    let m = (spec.segment_duration_s * fs).round() as usize;
    if m > n {
        return Err(Error::config(format!(
            "segment of {m} samples exceeds the {n}-sample source"
        )));
    }
    if shift >= n {
        return Err(Error::config("irn delay exceeds the source length"));
    }
    let mut rng = rng_for(spec.seed, STREAM_IRN);
    let mut s: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    for _ in 0..spec.iterations {
        let prev = s.clone();
        for (i, v) in s.iter_mut().enumerate() {
            *v = prev[i] + prev[(i + n - shift) % n];
        }
    }
    let start = (n - m) / 2;
    let seg = &s[start..start + m];
    let mean = seg.iter().sum::<f64>() / m as f64;
    let var = seg.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m as f64;
    let std = var.sqrt();
    Ok(seg.iter().map(|v| v / std).collect())
}

/// A rendered chord: the equal-level sum, one ground-truth track per tone,
/// and the clean per-tone renders for level bookkeeping.
#[derive(Debug, Clone)]
pub struct ChordParts {
    pub mix: Vec<f64>,
    pub tracks: Vec<F0Track>,
    pub tones: Vec<Vec<f64>>,
}

/// Render a chord of tones at `base_f0 * 2^(k/12)` for each semitone offset,
/// all sharing the per-tone spec, summed at equal level. Starting phases are
/// drawn tone by tone from `rng`.
pub fn synth_chord(
    base_f0: f64,
    semitone_offsets: &[u32],
    per_tone: &HarmonicSpec,
    fs: f64,
    duration_s: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ChordParts> {
    let n = (duration_s * fs).round() as usize;
    let mut mix = vec![0.0; n];
    let mut tracks = Vec::new();
    let mut tones = Vec::new();
    for &k in semitone_offsets {
        let f0 = base_f0 * 2f64.powf(k as f64 / 12.0);
        let track = F0Track::constant(f0);
        let tone = synth_harmonic(per_tone, &track, fs, duration_s, rng)?;
        for (acc, v) in mix.iter_mut().zip(&tone) {
            *acc += v;
        }
        tracks.push(track);
        tones.push(tone);
    }
    Ok(ChordParts { mix, tracks, tones })
}

/// Empirical mean power helper exposed for calibration checks.
pub fn signal_power(x: &[f64]) -> f64 {
    mean_power(x)
}

/// Normalized circular autocorrelation of `x` at `lag`.
pub fn autocorr_at(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    let num: f64 = (0..n - lag)
        .map(|i| (x[i] - mean) * (x[i + lag] - mean))
        .sum::<f64>();
    num / var * n as f64 / (n - lag) as f64
}
