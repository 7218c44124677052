//! Seeded synthetic test signals: harmonic "clean" utterances and filtered
//! noise. Stands in for a speech corpus in the desk-scale suites; fully
//! determined by the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsp::{AudioBuffer, SAMPLE_RATE};

/// Sum of 2-4 harmonics of a random fundamental (80-300 Hz), each with a
/// slow random amplitude envelope. Peak-normalized to 0.3.
pub fn synth_clean(len: usize, rng: &mut impl Rng) -> AudioBuffer {
    let f0 = rng.gen_range(80.0..300.0);
    let num_harmonics = rng.gen_range(2..=4usize);
    let mut parts = Vec::with_capacity(num_harmonics);
    for k in 1..=num_harmonics {
        let amp = rng.gen_range(0.4..1.0) / k as f64;
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let env_freq = rng.gen_range(0.5..3.0);
        let env_phase = rng.gen_range(0.0..std::f64::consts::TAU);
        parts.push((k as f64 * f0, amp, phase, env_freq, env_phase));
    }
    let mut samples = vec![0.0f64; len];
    for (i, s) in samples.iter_mut().enumerate() {
        let t = i as f64 / SAMPLE_RATE as f64;
        for &(freq, amp, phase, env_freq, env_phase) in &parts {
            let env = 0.5 * (1.0 + (std::f64::consts::TAU * env_freq * t + env_phase).sin());
            *s += amp * env * (std::f64::consts::TAU * freq * t + phase).sin();
        }
    }
    normalize_peak(&mut samples, 0.3);
    AudioBuffer::new(samples, SAMPLE_RATE)
}

/// White noise through a one-pole lowpass with a random coefficient.
/// Peak-normalized to 0.3.
pub fn synth_noise(len: usize, rng: &mut impl Rng) -> AudioBuffer {
    let alpha = rng.gen_range(0.3..0.9);
    let mut samples = vec![0.0f64; len];
    let mut prev = 0.0;
    for s in samples.iter_mut() {
        let white: f64 = rng.gen_range(-1.0..1.0);
        prev = alpha * prev + (1.0 - alpha) * white;
        *s = prev;
    }
    normalize_peak(&mut samples, 0.3);
    AudioBuffer::new(samples, SAMPLE_RATE)
}

/// Clean/noise pair for utterance `index` under `seed`; each index draws
/// from its own stream so the dataset is order-independent.
pub fn synth_pair(len: usize, seed: u64, index: u64) -> (AudioBuffer, AudioBuffer) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let clean = synth_clean(len, &mut rng);
    let noise = synth_noise(len, &mut rng);
    (clean, noise)
}

fn normalize_peak(samples: &mut [f64], peak: f64) {
    let max = samples.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max > 0.0 {
        let g = peak / max;
        for s in samples {
            *s *= g;
        }
    }
}
