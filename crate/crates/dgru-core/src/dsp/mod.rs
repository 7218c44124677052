//! Signal pipeline: framing, windowed STFT/iSTFT, magnitude features, ratio
//! masks, and SNR-controlled noisy-mixture synthesis.
//!
//! The standard configuration is 16 kHz audio, 320-point FFT, 20 ms frames
//! with a 10 ms hop (100 frames per second). Analysis uses a periodic Hann
//! window; synthesis is weighted overlap-add normalized by the summed
//! squared window, which reconstructs the fully overlapped interior exactly
//! up to FFT rounding.

pub mod synth;
pub mod wav;

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Sample rate every pipeline entry point requires.
pub const SAMPLE_RATE: u32 = 16_000;

/// Mono audio at a known sample rate. Samples are nominally in [-1, 1];
/// the WAV writer clips, intermediate buffers may exceed the range.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        AudioBuffer {
            samples,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean squared sample value.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|&s| s * s).sum::<f64>() / self.samples.len() as f64
    }

    fn require_rate(&self, op: &'static str) -> Result<()> {
        if self.sample_rate != SAMPLE_RATE {
            return Err(Error::Audio(format!(
                "{op} requires {SAMPLE_RATE} Hz mono input, got {} Hz",
                self.sample_rate
            )));
        }
        Ok(())
    }
}

/// Analysis/synthesis framing parameters. `frame_len` must equal `fft_size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StftConfig {
    pub fft_size: usize,
    pub frame_len: usize,
    pub hop: usize,
}

impl StftConfig {
    /// 320-point FFT, 20 ms frames, 10 ms hop at 16 kHz.
    pub fn paper_scale() -> Self {
        StftConfig {
            fft_size: 320,
            frame_len: 320,
            hop: 160,
        }
    }

    /// Framing whose spectrum has `feature_dim` bins at 50% overlap:
    /// `fft_size = (feature_dim - 1) * 2`.
    pub fn for_feature_dim(feature_dim: usize) -> Self {
        let fft_size = (feature_dim - 1) * 2;
        StftConfig {
            fft_size,
            frame_len: fft_size,
            hop: fft_size / 2,
        }
    }

    /// Number of retained spectrum bins, `fft_size/2 + 1`.
    pub fn feature_dim(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn frames_per_second(&self, sample_rate: u32) -> f64 {
        sample_rate as f64 / self.hop as f64
    }

    fn validate(&self) -> Result<()> {
        if self.fft_size == 0 || self.fft_size % 2 != 0 {
            return Err(Error::InvalidConfig {
                what: "stft config",
                details: format!("fft_size {} must be even and nonzero", self.fft_size),
            });
        }
        if self.frame_len != self.fft_size {
            return Err(Error::InvalidConfig {
                what: "stft config",
                details: format!(
                    "frame_len {} must equal fft_size {}",
                    self.frame_len, self.fft_size
                ),
            });
        }
        if self.hop == 0 || self.hop > self.frame_len {
            return Err(Error::InvalidConfig {
                what: "stft config",
                details: format!("hop {} must be in 1..={}", self.hop, self.frame_len),
            });
        }
        Ok(())
    }
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig::paper_scale()
    }
}

/// Complex time-frequency matrix with its framing metadata.
#[derive(Clone, Debug)]
pub struct Spectrogram {
    data: Vec<Complex<f64>>,
    frames: usize,
    bins: usize,
    pub config: StftConfig,
    pub sample_rate: u32,
}

impl Spectrogram {
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn at(&self, frame: usize, bin: usize) -> Complex<f64> {
        self.data[frame * self.bins + bin]
    }

    pub fn frame(&self, t: usize) -> &[Complex<f64>] {
        &self.data[t * self.bins..(t + 1) * self.bins]
    }
}

/// Periodic Hann window: `0.5 * (1 - cos(2 pi n / len))`.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos()))
        .collect()
}

/// Windowed short-time Fourier transform. Produces
/// `floor((len - frame)/hop) + 1` frames; trailing samples shorter than one
/// frame are dropped.
pub fn stft(x: &AudioBuffer, config: &StftConfig) -> Result<Spectrogram> {
    config.validate()?;
    x.require_rate("stft")?;
    if x.len() < config.frame_len {
        return Err(Error::Audio(format!(
            "input of {} samples is shorter than one {}-sample frame",
            x.len(),
            config.frame_len
        )));
    }
    let n = config.fft_size;
    let bins = config.feature_dim();
    let frames = (x.len() - config.frame_len) / config.hop + 1;
    let window = hann_window(config.frame_len);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut data = Vec::with_capacity(frames * bins);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for t in 0..frames {
        let start = t * config.hop;
        for i in 0..n {
            buf[i] = Complex::new(x.samples[start + i] * window[i], 0.0);
        }
        fft.process(&mut buf);
        data.extend_from_slice(&buf[..bins]);
    }
    Ok(Spectrogram {
        data,
        frames,
        bins,
        config: *config,
        sample_rate: x.sample_rate,
    })
}

/// Weighted overlap-add inverse STFT. Output length is
/// `(frames - 1) * hop + frame_len`; samples where the window energy is
/// (numerically) zero come out as silence.
pub fn istft(s: &Spectrogram) -> Result<AudioBuffer> {
    s.config.validate()?;
    let n = s.config.fft_size;
    if s.bins != s.config.feature_dim() {
        return Err(Error::dim(
            "istft",
            format!("{} bins", s.bins),
            format!("expected {}", s.config.feature_dim()),
        ));
    }
    if s.frames == 0 {
        return Ok(AudioBuffer::new(Vec::new(), s.sample_rate));
    }
    let window = hann_window(s.config.frame_len);
    let out_len = (s.frames - 1) * s.config.hop + s.config.frame_len;
    let mut num = vec![0.0f64; out_len];
    let mut den = vec![0.0f64; out_len];

    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let scale = 1.0 / n as f64;
    for t in 0..s.frames {
        let row = s.frame(t);
        buf[..s.bins].copy_from_slice(row);
        // Hermitian mirror for the negative frequencies.
        for k in 1..n / 2 {
            buf[n - k] = row[k].conj();
        }
        ifft.process(&mut buf);
        let start = t * s.config.hop;
        for i in 0..n {
            let v = buf[i].re * scale;
            num[start + i] += window[i] * v;
            den[start + i] += window[i] * window[i];
        }
    }
    let samples = num
        .iter()
        .zip(den.iter())
        .map(|(&nm, &d)| if d > 1e-12 { nm / d } else { 0.0 })
        .collect();
    Ok(AudioBuffer::new(samples, s.sample_rate))
}

/// Entrywise complex modulus as a `frames x bins` matrix.
pub fn magnitude(s: &Spectrogram) -> Matrix {
    Matrix::from_fn(s.frames, s.bins, |t, f| s.at(t, f).norm())
}

/// Scales each bin's magnitude by `mask` in [0, 1], keeping the phase.
pub fn apply_mask(s: &Spectrogram, mask: &Matrix) -> Result<Spectrogram> {
    if mask.rows() != s.frames || mask.cols() != s.bins {
        return Err(Error::dim(
            "apply_mask",
            format!("{}x{} spectrogram", s.frames, s.bins),
            format!("{}x{} mask", mask.rows(), mask.cols()),
        ));
    }
    for t in 0..mask.rows() {
        for f in 0..mask.cols() {
            let m = mask[(t, f)];
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::InvalidConfig {
                    what: "mask",
                    details: format!("mask[{t},{f}] = {m} not in [0, 1]"),
                });
            }
        }
    }
    let mut out = s.clone();
    for t in 0..s.frames {
        for f in 0..s.bins {
            out.data[t * s.bins + f] = s.at(t, f) * mask[(t, f)];
        }
    }
    Ok(out)
}

/// Ideal ratio mask `|S| / (|S| + |N|)` with 0/0 mapped to 0.
pub fn irm_target(clean_mag: &Matrix, noise_mag: &Matrix) -> Result<Matrix> {
    if clean_mag.rows() != noise_mag.rows() || clean_mag.cols() != noise_mag.cols() {
        return Err(Error::dim(
            "irm_target",
            format!("{}x{}", clean_mag.rows(), clean_mag.cols()),
            format!("{}x{}", noise_mag.rows(), noise_mag.cols()),
        ));
    }
    let mut out = Matrix::zeros(clean_mag.rows(), clean_mag.cols());
    for t in 0..clean_mag.rows() {
        for f in 0..clean_mag.cols() {
            let s = clean_mag[(t, f)];
            let n = noise_mag[(t, f)];
            if s < 0.0 || n < 0.0 {
                return Err(Error::InvalidConfig {
                    what: "irm input",
                    details: format!("negative magnitude at [{t},{f}]"),
                });
            }
            out[(t, f)] = if s + n > 0.0 { s / (s + n) } else { 0.0 };
        }
    }
    Ok(out)
}

/// Mixing request: target SNR in dB plus the seed that produced the pair.
#[derive(Clone, Copy, Debug)]
pub struct MixSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// Scales `noise` so that `10 log10(P_clean / P_noise)` equals
/// `spec.snr_db`, then adds it to `clean`. Returns `(noisy, scaled_noise)`.
pub fn mix_at_snr(
    clean: &AudioBuffer,
    noise: &AudioBuffer,
    spec: &MixSpec,
) -> Result<(AudioBuffer, AudioBuffer)> {
    clean.require_rate("mix_at_snr")?;
    noise.require_rate("mix_at_snr")?;
    if clean.len() != noise.len() {
        return Err(Error::dim(
            "mix_at_snr",
            format!("clean {} samples", clean.len()),
            format!("noise {} samples", noise.len()),
        ));
    }
    if !spec.snr_db.is_finite() {
        return Err(Error::NonFinite("snr_db"));
    }
    let p_clean = clean.power();
    let p_noise = noise.power();
    if p_clean == 0.0 {
        return Err(Error::SilentSignal("clean"));
    }
    if p_noise == 0.0 {
        return Err(Error::SilentSignal("noise"));
    }
    let gain = (p_clean / (p_noise * 10f64.powf(spec.snr_db / 10.0))).sqrt();
    let scaled: Vec<f64> = noise.samples.iter().map(|&s| s * gain).collect();
    let noisy: Vec<f64> = clean
        .samples
        .iter()
        .zip(scaled.iter())
        .map(|(&c, &n)| c + n)
        .collect();
    Ok((
        AudioBuffer::new(noisy, clean.sample_rate),
        AudioBuffer::new(scaled, clean.sample_rate),
    ))
}
