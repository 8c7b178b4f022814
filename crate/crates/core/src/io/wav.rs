//! Mono RIFF WAV reading and writing, 16-bit integer or 32-bit float, plus
//! headerless little-endian float32. No resampling, no multichannel.

use crate::error::{Error, Result};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Audio loaded from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Audio {
    pub fs: f64,
    pub samples: Vec<f64>,
}

/// Write mono 16-bit PCM. Samples are clamped to [-1, 1] and scaled by
/// 32767.
pub fn write_wav_pcm16(path: &Path, fs: u32, samples: &[f64]) -> Result<()> {
    let data_len = samples.len() * 2;
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, fs, 1, 16, data_len)?;
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        w.write_all(&v.to_le_bytes())?;
    }
    pad_to_even(&mut w, data_len)?;
    Ok(())
}

/// Write mono 32-bit IEEE float.
pub fn write_wav_f32(path: &Path, fs: u32, samples: &[f64]) -> Result<()> {
    let data_len = samples.len() * 4;
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, fs, 3, 32, data_len)?;
    for &s in samples {
        w.write_all(&(s as f32).to_le_bytes())?;
    }
    Ok(())
}

fn write_header<W: Write>(
    w: &mut W,
    fs: u32,
    format: u16,
    bits: u16,
    data_len: usize,
) -> Result<()> {
    let block_align = bits as u32 / 8;
    let riff_len = 4 + 24 + 8 + data_len + data_len % 2;
    w.write_all(b"RIFF")?;
    w.write_all(&(riff_len as u32).to_le_bytes())?;
    w.write_all(b"WAVE")?;
    w.write_all(b"fmt ")?;
    w.write_all(&16u32.to_le_bytes())?;
    w.write_all(&format.to_le_bytes())?;
    w.write_all(&1u16.to_le_bytes())?;
    w.write_all(&fs.to_le_bytes())?;
    w.write_all(&(fs * block_align).to_le_bytes())?;
    w.write_all(&(block_align as u16).to_le_bytes())?;
    w.write_all(&bits.to_le_bytes())?;
    w.write_all(b"data")?;
    w.write_all(&(data_len as u32).to_le_bytes())?;
    Ok(())
}

fn pad_to_even<W: Write>(w: &mut W, data_len: usize) -> Result<()> {
    if data_len % 2 == 1 {
        w.write_all(&[0])?;
    }
    Ok(())
}

/// Read a mono WAV file, 16-bit PCM or 32-bit float.
pub fn read_wav(path: &Path) -> Result<Audio> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    parse_wav(&bytes)
}

fn parse_wav(bytes: &[u8]) -> Result<Audio> {
    let malformed = |what: &str| Error::format(format!("malformed wav: {what}"));
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE header"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        if body_start + size > bytes.len() {
            return Err(malformed("chunk overruns file"));
        }
        let body = &bytes[body_start..body_start + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(malformed("fmt chunk too short"));
                }
                let format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        pos = body_start + size + size % 2;
    }
    let (format, channels, rate, bits) = fmt.ok_or_else(|| malformed("no fmt chunk"))?;
    let data = data.ok_or_else(|| malformed("no data chunk"))?;
    if channels != 1 {
        return Err(Error::format(format!(
            "{channels}-channel input, only mono is supported"
        )));
    }
    let samples = match (format, bits) {
        (1, 16) => {
            if data.len() % 2 != 0 {
                return Err(malformed("odd pcm16 data length"));
            }
            data.chunks_exact(2)
                .map(|c| i16::from_le_bytes(c.try_into().unwrap()) as f64 / 32767.0)
                .collect()
        }
        (3, 32) => {
            if data.len() % 4 != 0 {
                return Err(malformed("float32 data length not a multiple of 4"));
            }
            data.chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                .collect()
        }
        (f, b) => {
            return Err(Error::format(format!(
                "unsupported wav encoding: format {f}, {b} bits"
            )))
        }
    };
    Ok(Audio {
        fs: rate as f64,
        samples,
    })
}

/// Read headerless little-endian float32 samples.
pub fn read_raw_f32(path: &Path) -> Result<Vec<f64>> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() % 4 != 0 {
        return Err(Error::format(format!(
            "raw float32 length {} is not a multiple of 4",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect())
}

/// Write headerless little-endian float32 samples.
pub fn write_raw_f32(path: &Path, samples: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for &s in samples {
        w.write_all(&(s as f32).to_le_bytes())?;
    }
    Ok(())
}
