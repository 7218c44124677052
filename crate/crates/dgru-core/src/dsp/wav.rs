//! WAV file I/O: RIFF, PCM 16-bit little-endian, mono, 16 kHz.
//!
//! Reads scale by 1/32768; writes clip to [-1, 1] and scale by 32767.

use std::path::Path;

use crate::dsp::{AudioBuffer, SAMPLE_RATE};
use crate::error::{Error, Result};

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let bytes = std::fs::read(path)?;
    decode_wav(&bytes)
}

pub fn write_wav(path: impl AsRef<Path>, audio: &AudioBuffer) -> Result<()> {
    std::fs::write(path, encode_wav(audio)?)?;
    Ok(())
}

fn u16_le(b: &[u8], at: usize) -> Result<u16> {
    b.get(at..at + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or_else(|| Error::WavFormat("truncated file".into()))
}

fn u32_le(b: &[u8], at: usize) -> Result<u32> {
    b.get(at..at + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| Error::WavFormat("truncated file".into()))
}

pub(crate) fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::WavFormat("not a RIFF/WAVE file".into()));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_le(bytes, pos + 4)? as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| Error::WavFormat("chunk overruns file".into()))?;
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::WavFormat("fmt chunk too small".into()));
                }
                fmt = Some((
                    u16_le(bytes, body_start)?,
                    u16_le(bytes, body_start + 2)?,
                    u32_le(bytes, body_start + 4)?,
                    u16_le(bytes, body_start + 14)?,
                ));
            }
            b"data" => data = Some(&bytes[body_start..body_end]),
            _ => {}
        }
        // Chunks are word-aligned.
        pos = body_end + (size & 1);
    }
    let (format, channels, rate, bits) =
        fmt.ok_or_else(|| Error::WavFormat("missing fmt chunk".into()))?;
    if format != 1 {
        return Err(Error::WavFormat(format!(
            "requires PCM (format 1), got format {format}"
        )));
    }
    if channels != 1 {
        return Err(Error::WavFormat(format!(
            "requires mono audio, got {channels} channels"
        )));
    }
    if bits != 16 {
        return Err(Error::WavFormat(format!(
            "requires 16-bit samples, got {bits}"
        )));
    }
    if rate != SAMPLE_RATE {
        return Err(Error::WavFormat(format!(
            "requires {SAMPLE_RATE} Hz, got {rate} Hz"
        )));
    }
    let data = data.ok_or_else(|| Error::WavFormat("missing data chunk".into()))?;
    let samples = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
        .collect();
    Ok(AudioBuffer::new(samples, rate))
}

pub(crate) fn encode_wav(audio: &AudioBuffer) -> Result<Vec<u8>> {
    if audio.sample_rate != SAMPLE_RATE {
        return Err(Error::Audio(format!(
            "wav writer requires {SAMPLE_RATE} Hz, got {} Hz",
            audio.sample_rate
        )));
    }
    let data_len = audio.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&SAMPLE_RATE.to_le_bytes());
    out.extend_from_slice(&(SAMPLE_RATE * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &audio.samples {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}
