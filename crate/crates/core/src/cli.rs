//! Command-line front end. Verbs: `sim` runs a bundled preset end to end,
//! `track` follows the fundamental of an audio file, `scan` sweeps a band
//! with a bank of confined instances, `list-presets` prints the catalog.
//!
//! Every run writes a trace CSV per instance and a summary JSON embedding
//! the full resolved manifest, so identical manifests reproduce the outputs
//! byte for byte. Exit codes: 0 success, 2 usage, 3 input or output format,
//! 4 non-finite data.

use crate::analysis::{self, TrackingReport, DEFAULT_EXCLUDE_FRACTION};
use crate::bank::{semitone_ratio, Bank, BankConfig};
use crate::engine::{Engine, EngineConfig, TickOutput};
use crate::error::{Error, Result};
use crate::io::{csv, svg, wav};
use crate::presets::{build, Preset, SignalDesc, ALL_PRESETS};
use crate::signals::signal_power;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const TOOL_NAME: &str = "pmhll";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = TOOL_NAME, version = TOOL_VERSION, about = "per-sample fundamental-frequency and HNR tracker")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a bundled preset and track it end to end.
    Sim(SimArgs),
    /// Track the fundamental of a mono WAV or raw float32 file.
    Track(TrackArgs),
    /// Scan a frequency band with one confined instance per cell.
    Scan(ScanArgs),
    /// List the bundled presets and their variants.
    ListPresets,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Preset id, I through VI.
    #[arg(long)]
    preset: String,
    /// Variant index within the preset.
    #[arg(long, default_value_t = 0)]
    variant: usize,
    /// Run seed for phases and noise.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Sampling rate in Hz.
    #[arg(long, default_value_t = 5000.0)]
    fs: f64,
    /// Override the preset's starting oscillator frequency.
    #[arg(long)]
    fc0: Option<f64>,
    /// Leading fraction excluded from the error statistics.
    #[arg(long, default_value_t = DEFAULT_EXCLUDE_FRACTION)]
    exclude_fraction: f64,
    /// Write the diagnostic plot.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, num_args = 0..=1, require_equals = false, default_missing_value = "true")]
    svg: bool,
    /// Skip the diagnostic plot.
    #[arg(long, conflicts_with = "svg")]
    no_svg: bool,
    /// Also export the stimulus as 32-bit float WAV.
    #[arg(long)]
    export_audio: bool,
}

#[derive(Args, Debug)]
struct TrackArgs {
    /// Input file: .wav (mono, 16-bit PCM or 32-bit float) or raw float32.
    input: PathBuf,
    /// Starting oscillator frequency in Hz.
    #[arg(long, default_value_t = 99.5)]
    fc0: f64,
    /// Engine sampling rate; required for raw input, must match WAV rate.
    #[arg(long)]
    fs: Option<f64>,
    /// Lower oscillator clamp.
    #[arg(long)]
    fc_min: Option<f64>,
    /// Upper oscillator clamp.
    #[arg(long)]
    fc_max: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, num_args = 0..=1, require_equals = false, default_missing_value = "true")]
    svg: bool,
    #[arg(long, conflicts_with = "svg")]
    no_svg: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Input file, as for `track`; mutually exclusive with --preset.
    input: Option<PathBuf>,
    /// Scan a bundled preset instead of a file.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = 0)]
    variant: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Lowest cell seed frequency in Hz.
    #[arg(long, default_value_t = 90.0)]
    f_low: f64,
    /// Upper bound for cell seeds in Hz.
    #[arg(long, default_value_t = 400.0)]
    f_high: f64,
    /// Ratio between adjacent cells; defaults to one semitone.
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, num_args = 0..=1, require_equals = false, default_missing_value = "true")]
    svg: bool,
    #[arg(long, conflicts_with = "svg")]
    no_svg: bool,
}

/// Parse `argv` and run; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Sim(a) => run_simulation(a),
        Command::Track(a) => run_track(a),
        Command::Scan(a) => run_scan(a),
        Command::ListPresets => {
            list_presets(&mut std::io::stdout()).ok();
            Ok(())
        }
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Everything that determines a run, embedded in the summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub fs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant_label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclude_fraction: Option<f64>,
    pub engine_configs: Vec<EngineConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalDesc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanManifest {
    pub f_low: f64,
    pub f_high: f64,
    pub spacing: f64,
    pub confine: bool,
}

/// Per-instance lock bookkeeping for summaries and the scan table.
#[derive(Debug, Clone, Serialize)]
pub struct LockStats {
    pub instance: usize,
    pub fc0_hz: f64,
    /// Fraction of samples with HNR above 0 dB.
    pub lock_fraction: f64,
    /// Mean HNR over the locked samples, absent if never locked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_hnr_db: Option<f64>,
    pub final_fc_hz: f64,
}

/// Both empirical per-tone level bookkeeping definitions for the chord run.
#[derive(Debug, Clone, Serialize)]
pub struct ChordSnr {
    /// Tone power against the additive noise alone, dB.
    pub tone_vs_noise_db: Vec<f64>,
    /// Tone power against everything else in the mix, dB.
    pub tone_vs_rest_db: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub manifest: RunManifest,
    /// Realized whole-signal SNR in dB, or the string "clean".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized_snr_db: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chord_snr: Option<ChordSnr>,
    pub reports: Vec<TrackingReport>,
    pub lock: Vec<LockStats>,
}

fn snr_value(snr_db: f64) -> serde_json::Value {
    if snr_db.is_finite() {
        serde_json::json!(snr_db)
    } else {
        serde_json::json!("clean")
    }
}

fn lock_stats(instance: usize, fc0: f64, outs: &[TickOutput]) -> LockStats {
    let locked: Vec<f64> = outs.iter().filter(|o| o.locked).map(|o| o.hnr_db).collect();
    LockStats {
        instance,
        fc0_hz: fc0,
        lock_fraction: locked.len() as f64 / outs.len().max(1) as f64,
        mean_hnr_db: if locked.is_empty() {
            None
        } else {
            Some(locked.iter().sum::<f64>() / locked.len() as f64)
        },
        final_fc_hz: outs.last().map(|o| o.fc_hz).unwrap_or(fc0),
    }
}

fn strobe_indices(outs: &[TickOutput]) -> Vec<usize> {
    outs.iter()
        .enumerate()
        .filter(|(_, o)| o.strobe)
        .map(|(i, _)| i)
        .collect()
}

fn write_trace_file(path: &Path, fs: f64, outs: &[TickOutput]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    csv::write_trace(&mut w, fs, outs)?;
    w.flush()?;
    Ok(())
}

fn write_summary_file(path: &Path, summary: &RunSummary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::format(format!("summary serialization: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn write_plot_file(
    path: &Path,
    title: &str,
    fs: f64,
    traces: &[Vec<TickOutput>],
    names: &[String],
    f0_refs: &[Option<Vec<f64>>],
) -> Result<()> {
    let series = traces
        .iter()
        .enumerate()
        .map(|(i, outs)| svg::Series {
            name: names[i].clone(),
            fc_hz: outs.iter().map(|o| o.fc_hz).collect(),
            hnr_db: outs.iter().map(|o| o.hnr_db).collect(),
            strobes: strobe_indices(outs),
            f0_ref: f0_refs[i].clone(),
        })
        .collect();
    let plot = svg::Plot {
        title: title.to_string(),
        fs,
        series,
    };
    let mut w = BufWriter::new(File::create(path)?);
    svg::write_plot(&mut w, &plot)?;
    w.flush()?;
    Ok(())
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

fn run_simulation(args: &SimArgs) -> Result<()> {
    let preset: Preset = args.preset.parse()?;
    if !(args.exclude_fraction >= 0.0 && args.exclude_fraction < 1.0) {
        return Err(Error::config("exclude fraction must be in [0, 1)"));
    }
    let built = build(preset, args.variant, args.seed, args.fs)?;
    let multi = built.fc0s.len() > 1;
    if multi && args.fc0.is_some() {
        return Err(Error::config(format!(
            "preset {preset} seeds {} instances; --fc0 does not apply",
            built.fc0s.len()
        )));
    }
    std::fs::create_dir_all(&args.out)?;

    let fc0s: Vec<f64> = if let Some(f) = args.fc0 {
        vec![f]
    } else {
        built.fc0s.clone()
    };
    let mut cfgs = Vec::new();
    let mut traces: Vec<Vec<TickOutput>> = Vec::new();
    if multi {
        let mut template = EngineConfig::with_fs(args.fs, fc0s[0]);
        template.fc_min = template
            .fc_min
            .min(fc0s.iter().cloned().fold(f64::MAX, f64::min));
        let mut bank = Bank::with_instances(&template, &fc0s)?;
        for &f in &fc0s {
            let mut c = template.clone();
            c.fc0 = f;
            cfgs.push(c);
        }
        traces = bank.run(&built.x)?;
    } else {
        let cfg = EngineConfig::with_fs(args.fs, fc0s[0]);
        let mut eng = Engine::new(cfg.clone())?;
        traces.push(eng.run(&built.x)?);
        cfgs.push(cfg);
    }

    let mut reports = Vec::new();
    let mut lock = Vec::new();
    let mut f0_refs = Vec::new();
    let mut names = Vec::new();
    for (i, outs) in traces.iter().enumerate() {
        let f0 = built.tracks[i].trace(args.fs, outs.len());
        reports.push(analysis::report(outs, &f0, args.fs, args.exclude_fraction)?);
        lock.push(lock_stats(i, fc0s[i], outs));
        f0_refs.push(Some(f0));
        names.push(if multi {
            format!("tone {i}")
        } else {
            "fc".to_string()
        });
    }

    let chord_snr = built.tones.as_ref().map(|tones| {
        let n = built.x.len();
        let rest_of = |k: usize| -> Vec<f64> { (0..n).map(|i| built.x[i] - tones[k][i]).collect() };
        let noise: Vec<f64> = (0..n)
            .map(|i| built.x[i] - tones.iter().map(|t| t[i]).sum::<f64>())
            .collect();
        let p_noise = signal_power(&noise);
        let tone_vs_noise_db = tones
            .iter()
            .map(|t| 10.0 * (signal_power(t) / p_noise).log10())
            .collect();
        let tone_vs_rest_db = (0..tones.len())
            .map(|k| 10.0 * (signal_power(&tones[k]) / signal_power(&rest_of(k))).log10())
            .collect();
        ChordSnr {
            tone_vs_noise_db,
            tone_vs_rest_db,
        }
    });

    let summary = RunSummary {
        manifest: RunManifest {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: "sim",
            fs: args.fs,
            preset: Some(preset.to_string()),
            variant: Some(args.variant),
            variant_label: Some(preset.variants()[args.variant].clone()),
            seed: Some(args.seed),
            input_path: None,
            exclude_fraction: Some(args.exclude_fraction),
            engine_configs: cfgs,
            scan: None,
            signal: Some(built.desc.clone()),
        },
        realized_snr_db: Some(snr_value(built.snr_db)),
        chord_snr,
        reports,
        lock,
    };

    for (i, outs) in traces.iter().enumerate() {
        let path = if multi {
            args.out.join(format!("trace_{i}.csv"))
        } else {
            args.out.join("trace.csv")
        };
        write_trace_file(&path, args.fs, outs)?;
        announce(&path);
    }
    let spath = args.out.join("summary.json");
    write_summary_file(&spath, &summary)?;
    announce(&spath);
    if args.svg && !args.no_svg {
        let ppath = args.out.join("plot.svg");
        let title = format!(
            "sim preset {preset} variant {} seed {}",
            args.variant, args.seed
        );
        write_plot_file(&ppath, &title, args.fs, &traces, &names, &f0_refs)?;
        announce(&ppath);
    }
    if args.export_audio {
        let apath = args.out.join("signal.wav");
        wav::write_wav_f32(&apath, args.fs.round() as u32, &built.x)?;
        announce(&apath);
    }
    Ok(())
}

/// Load track/scan input audio. WAV carries its own rate which must match
/// the engine rate; raw float32 requires an explicit --fs.
fn resolve_audio(input: &Path, fs_flag: Option<f64>) -> Result<(f64, Vec<f64>)> {
    let is_wav = input
        .extension()
        .map(|e| e.eq_ignore_ascii_case("wav"))
        .unwrap_or(false);
    if is_wav {
        let audio = wav::read_wav(input)?;
        let fs = fs_flag.unwrap_or(5000.0);
        if (audio.fs - fs).abs() > 1e-9 {
            return Err(Error::format(format!(
                "sample rate mismatch: file is {} Hz, engine runs at {} Hz and does not resample",
                audio.fs, fs
            )));
        }
        Ok((fs, audio.samples))
    } else {
        let fs = fs_flag.ok_or_else(|| Error::config("raw float32 input requires --fs"))?;
        Ok((fs, wav::read_raw_f32(input)?))
    }
}

fn run_track(args: &TrackArgs) -> Result<()> {
    let (fs, samples) = resolve_audio(&args.input, args.fs)?;
    if samples.is_empty() {
        return Err(Error::format("input file holds no samples"));
    }
    let mut cfg = EngineConfig::with_fs(fs, args.fc0);
    if let Some(m) = args.fc_min {
        cfg.fc_min = m;
    }
    if let Some(m) = args.fc_max {
        cfg.fc_max = m;
    }
    let mut eng = Engine::new(cfg.clone())?;
    let outs = eng.run(&samples)?;
    std::fs::create_dir_all(&args.out)?;

    let summary = RunSummary {
        manifest: RunManifest {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: "track",
            fs,
            preset: None,
            variant: None,
            variant_label: None,
            seed: None,
            input_path: Some(args.input.display().to_string()),
            exclude_fraction: None,
            engine_configs: vec![cfg],
            scan: None,
            signal: None,
        },
        realized_snr_db: None,
        chord_snr: None,
        reports: Vec::new(),
        lock: vec![lock_stats(0, args.fc0, &outs)],
    };

    let tpath = args.out.join("trace.csv");
    write_trace_file(&tpath, fs, &outs)?;
    announce(&tpath);
    let spath = args.out.join("summary.json");
    write_summary_file(&spath, &summary)?;
    announce(&spath);
    if args.svg && !args.no_svg {
        let ppath = args.out.join("plot.svg");
        let title = format!("track {}", args.input.display());
        write_plot_file(
            &ppath,
            &title,
            fs,
            std::slice::from_ref(&outs),
            &["fc".to_string()],
            &[None],
        )?;
        announce(&ppath);
    }
    Ok(())
}

fn run_scan(args: &ScanArgs) -> Result<()> {
    let spacing = args.spacing.unwrap_or_else(semitone_ratio);
    let (fs, samples, preset_info, desc) = match (&args.input, &args.preset) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "give either an input file or --preset, not both",
            ))
        }
        (None, None) => return Err(Error::config("scan needs an input file or --preset")),
        (Some(path), None) => {
            let (fs, samples) = resolve_audio(path, args.fs)?;
            (fs, samples, None, None)
        }
        (None, Some(p)) => {
            let preset: Preset = p.parse()?;
            let fs = args.fs.unwrap_or(5000.0);
            let built = build(preset, args.variant, args.seed, fs)?;
            (
                fs,
                built.x,
                Some((preset, args.variant, args.seed)),
                Some(built.desc),
            )
        }
    };
    if samples.is_empty() {
        return Err(Error::format("input holds no samples"));
    }
    if !(spacing > 1.0) {
        return Err(Error::config("cell spacing must exceed 1"));
    }

    let mut template = EngineConfig::with_fs(fs, args.f_low);
    template.fc_min = args.f_low / spacing.sqrt();
    template.fc_max = (args.f_high * spacing.sqrt()).min(fs / 2.0);
    let mut bank_cfg = BankConfig::new(args.f_low, args.f_high, template);
    bank_cfg.spacing = spacing;
    bank_cfg.confine = true;
    let mut bank = Bank::new(&bank_cfg)?;
    let fc0s = bank.fc0s();
    let traces = bank.run(&samples)?;
    std::fs::create_dir_all(&args.out)?;

    let lock: Vec<LockStats> = traces
        .iter()
        .enumerate()
        .map(|(i, outs)| lock_stats(i, fc0s[i], outs))
        .collect();
    let cfgs: Vec<EngineConfig> = fc0s
        .iter()
        .map(|&f| {
            let mut c = bank_cfg.template.clone();
            c.fc0 = f;
            c
        })
        .collect();

    let summary = RunSummary {
        manifest: RunManifest {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: "scan",
            fs,
            preset: preset_info.map(|(p, _, _)| p.to_string()),
            variant: preset_info.map(|(_, v, _)| v),
            variant_label: preset_info.map(|(p, v, _)| p.variants()[v].clone()),
            seed: preset_info.map(|(_, _, s)| s),
            input_path: args.input.as_ref().map(|p| p.display().to_string()),
            exclude_fraction: None,
            engine_configs: cfgs,
            scan: Some(ScanManifest {
                f_low: args.f_low,
                f_high: args.f_high,
                spacing,
                confine: true,
            }),
            signal: desc,
        },
        realized_snr_db: None,
        chord_snr: None,
        reports: Vec::new(),
        lock: lock.clone(),
    };

    for (i, outs) in traces.iter().enumerate() {
        let path = args.out.join(format!("trace_{i:02}.csv"));
        write_trace_file(&path, fs, outs)?;
        announce(&path);
    }
    let lpath = args.out.join("lock_summary.csv");
    {
        let mut w = BufWriter::new(File::create(&lpath)?);
        writeln!(w, "instance,fc0_hz,lock_fraction,mean_hnr_db,final_fc_hz")?;
        for s in &lock {
            let mean = s
                .mean_hnr_db
                .map(|m| format!("{m:.8e}"))
                .unwrap_or_default();
            writeln!(
                w,
                "{},{:.8e},{:.8e},{},{:.8e}",
                s.instance, s.fc0_hz, s.lock_fraction, mean, s.final_fc_hz
            )?;
        }
        w.flush()?;
    }
    announce(&lpath);
    let spath = args.out.join("summary.json");
    write_summary_file(&spath, &summary)?;
    announce(&spath);
    if args.svg && !args.no_svg {
        let ppath = args.out.join("plot.svg");
        let names: Vec<String> = fc0s.iter().map(|f| format!("{f:.1} Hz")).collect();
        let refs: Vec<Option<Vec<f64>>> = fc0s.iter().map(|_| None).collect();
        write_plot_file(&ppath, "scan", fs, &traces, &names, &refs)?;
        announce(&ppath);
    }
    Ok(())
}

/// Print the preset catalog.
pub fn list_presets<W: Write>(w: &mut W) -> Result<()> {
    for p in ALL_PRESETS {
        writeln!(w, "{p}: {}", p.summary())?;
        for (i, v) in p.variants().iter().enumerate() {
            writeln!(w, "  variant {i}: {v}")?;
        }
    }
    Ok(())
}
