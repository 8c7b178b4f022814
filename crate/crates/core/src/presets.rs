//! The six bundled simulation presets: harmonic step tracks at three noise
//! gains, mistuned complexes, a missing-fundamental pair, a linear sweep,
//! iterated rippled noise, and a three-tone chord tracked by a small bank.

use crate::error::{Error, Result};
use crate::signals::{
    mix_noise, rng_for, synth_chord, synth_harmonic, synth_irn, F0Track, HarmonicSpec, IrnSpec,
    NoiseSpec, STREAM_PHASE,
};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Harmonic numbers and amplitudes of the five-partial complex used by the
/// step, mistune and sweep presets.
pub const FIVE_PARTIALS: [(u32, f64); 5] = [(1, 0.5), (3, 0.9), (4, 0.7), (6, 0.9), (7, 0.7)];
/// The missing-fundamental variant: only the top two partials.
pub const TOP_TWO_PARTIALS: [(u32, f64); 2] = [(6, 0.9), (7, 0.7)];
/// Per-tone partials of the chord preset.
pub const CHORD_PARTIALS: [(u32, f64); 4] = [(3, 0.9), (4, 0.7), (6, 0.9), (7, 0.7)];
/// Starting oscillator frequency for the single-instance presets.
pub const FC0_SINGLE: f64 = 99.5;
/// Starting oscillator frequencies for the chord bank, one per tone.
pub const FC0_CHORD: [f64; 3] = [183.6, 231.3, 275.1];
/// Chord base fundamental and semitone offsets.
pub const CHORD_BASE_F0: f64 = 170.0;
pub const CHORD_SEMITONES: [u32; 3] = [0, 4, 7];

/// Identifier of one bundled scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preset {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

pub const ALL_PRESETS: [Preset; 6] = [
    Preset::I,
    Preset::II,
    Preset::III,
    Preset::IV,
    Preset::V,
    Preset::VI,
];

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Preset::I => "I",
            Preset::II => "II",
            Preset::III => "III",
            Preset::IV => "IV",
            Preset::V => "V",
            Preset::VI => "VI",
        };
        f.write_str(s)
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Preset> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Preset::I),
            "II" | "2" => Ok(Preset::II),
            "III" | "3" => Ok(Preset::III),
            "IV" | "4" => Ok(Preset::IV),
            "V" | "5" => Ok(Preset::V),
            "VI" | "6" => Ok(Preset::VI),
            other => Err(Error::config(format!(
                "unknown preset {other:?}, expected I..VI"
            ))),
        }
    }
}

impl Preset {
    /// Human-readable one-liner.
    pub fn summary(&self) -> &'static str {
        match self {
            Preset::I => "step fundamental 98.5 to 101 Hz, five partials, noise gain by variant",
            Preset::II => "step fundamental with all partials shifted by a fixed offset",
            Preset::III => "step fundamental carried only by partials 6 and 7",
            Preset::IV => "linear sweep 96 to 103 Hz over 100 ms, noise gain by variant",
            Preset::V => "iterated rippled noise near 98 Hz, iteration count by variant",
            Preset::VI => "major chord of three complex tones in noise, three-instance bank",
        }
    }

    /// Labels of the selectable variants, indexed by `--variant`.
    pub fn variants(&self) -> Vec<String> {
        match self {
            Preset::I | Preset::IV => vec![
                "noise gain 0.1".into(),
                "noise gain 0.5".into(),
                "noise gain 1.0".into(),
            ],
            Preset::II => vec!["shift +6 Hz".into(), "shift -6 Hz".into()],
            Preset::III => vec!["noise gain 0.5".into()],
            Preset::V => vec![
                "5 iterations".into(),
                "3 iterations".into(),
                "1 iteration".into(),
            ],
            Preset::VI => vec!["noise gain 1.5".into()],
        }
    }
}

/// Resolved description of the synthesized stimulus, embedded in the run
/// manifest so a run is reconstructible from its summary alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SignalDesc {
    Harmonic {
        spec: HarmonicSpec,
        track: F0Track,
        noise: NoiseSpec,
        duration_s: f64,
    },
    RippledNoise {
        spec: IrnSpec,
    },
    Chord {
        base_f0: f64,
        semitone_offsets: Vec<u32>,
        per_tone: HarmonicSpec,
        noise: NoiseSpec,
        duration_s: f64,
    },
}

/// A fully synthesized preset instance ready to feed an engine or bank.
#[derive(Debug, Clone)]
pub struct BuiltPreset {
    pub preset: Preset,
    pub variant: usize,
    pub seed: u64,
    pub x: Vec<f64>,
    /// One ground-truth track per engine instance.
    pub tracks: Vec<F0Track>,
    /// One starting oscillator frequency per engine instance.
    pub fc0s: Vec<f64>,
    /// Realized whole-signal SNR in dB, infinite when no noise is added.
    pub snr_db: f64,
    pub duration_s: f64,
    pub desc: SignalDesc,
    /// Clean per-tone renders, present only for the chord preset.
    pub tones: Option<Vec<Vec<f64>>>,
}

const GAINS: [f64; 3] = [0.1, 0.5, 1.0];
const IRN_ITERS: [u32; 3] = [5, 3, 1];

/// Synthesize preset `preset`, variant index `variant`, at `fs` Hz.
pub fn build(preset: Preset, variant: usize, seed: u64, fs: f64) -> Result<BuiltPreset> {
    let n_variants = preset.variants().len();
    if variant >= n_variants {
        return Err(Error::config(format!(
            "preset {preset} has {n_variants} variants, got index {variant}"
        )));
    }
    let mut rng = rng_for(seed, STREAM_PHASE);
    match preset {
        Preset::I | Preset::II | Preset::III => {
            let duration_s = 0.4;
            let track = F0Track::step(98.5, 101.0, duration_s);
            let (spec, gain) = match preset {
                Preset::I => (HarmonicSpec::new(&FIVE_PARTIALS), GAINS[variant]),
                Preset::II => {
                    let fd = if variant == 0 { 6.0 } else { -6.0 };
                    (HarmonicSpec::mistuned(&FIVE_PARTIALS, fd), 0.5)
                }
                _ => (HarmonicSpec::new(&TOP_TWO_PARTIALS), 0.5),
            };
            let clean = synth_harmonic(&spec, &track, fs, duration_s, &mut rng)?;
            let noise = NoiseSpec { gain, seed };
            let (x, snr_db) = mix_noise(&clean, &noise);
            Ok(BuiltPreset {
                preset,
                variant,
                seed,
                x,
                tracks: vec![track.clone()],
                fc0s: vec![FC0_SINGLE],
                snr_db,
                duration_s,
                desc: SignalDesc::Harmonic {
                    spec,
                    track,
                    noise,
                    duration_s,
                },
                tones: None,
            })
        }
        Preset::IV => {
            let duration_s = 0.1;
            let track = F0Track::sweep(96.0, 103.0, duration_s);
            let spec = HarmonicSpec::new(&FIVE_PARTIALS);
            let clean = synth_harmonic(&spec, &track, fs, duration_s, &mut rng)?;
            let noise = NoiseSpec {
                gain: GAINS[variant],
                seed,
            };
            let (x, snr_db) = mix_noise(&clean, &noise);
            Ok(BuiltPreset {
                preset,
                variant,
                seed,
                x,
                tracks: vec![track.clone()],
                fc0s: vec![FC0_SINGLE],
                snr_db,
                duration_s,
                desc: SignalDesc::Harmonic {
                    spec,
                    track,
                    noise,
                    duration_s,
                },
                tones: None,
            })
        }
        Preset::V => {
            let duration_s = 0.2;
            let spec = IrnSpec::new(1.0 / 98.0, IRN_ITERS[variant], duration_s, seed);
            let x = synth_irn(&spec, fs)?;
            let track = F0Track::constant(spec.realized_f0(fs));
            Ok(BuiltPreset {
                preset,
                variant,
                seed,
                x,
                tracks: vec![track],
                fc0s: vec![FC0_SINGLE],
                snr_db: f64::INFINITY,
                duration_s,
                desc: SignalDesc::RippledNoise { spec },
                tones: None,
            })
        }
        Preset::VI => {
            let duration_s = 0.2;
            let per_tone = HarmonicSpec::new(&CHORD_PARTIALS);
            let chord = synth_chord(
                CHORD_BASE_F0,
                &CHORD_SEMITONES,
                &per_tone,
                fs,
                duration_s,
                &mut rng,
            )?;
            let noise = NoiseSpec { gain: 1.5, seed };
            let (x, snr_db) = mix_noise(&chord.mix, &noise);
            Ok(BuiltPreset {
                preset,
                variant,
                seed,
                x,
                tracks: chord.tracks,
                fc0s: FC0_CHORD.to_vec(),
                snr_db,
                duration_s,
                desc: SignalDesc::Chord {
                    base_f0: CHORD_BASE_F0,
                    semitone_offsets: CHORD_SEMITONES.to_vec(),
                    per_tone,
                    noise,
                    duration_s,
                },
                tones: Some(chord.tones),
            })
        }
    }
}
