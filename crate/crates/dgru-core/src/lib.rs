//! Dynamic GRU (D-GRU) speech enhancement.
//!
//! A GRU variant that updates only the top-A neurons per step, ranked by the
//! update gate. Unselected neurons hold their previous state and skip their
//! reset-gate and candidate computations, cutting the recurrent compute to
//! `(1 + 2P/100)/3` of the dense cell at update percentage `P`.
//!
//! The crate provides:
//!
//! - [`tensor`]: minimal dense linear algebra with deterministic reductions;
//! - [`rnn`]: the conventional GRU cell, sequence runner, and BPTT;
//! - [`dgru`]: select gates (top-A and threshold) and the selective update;
//! - [`macmodel`]: exact multiply-accumulate accounting, analytic and counted;
//! - [`dsp`]: STFT/iSTFT, ratio masks, SNR-controlled mixing, WAV I/O;
//! - [`model`]: the FC -> GRU -> GRU -> FC mask-estimation network with
//!   training and weight-file serialization;
//! - [`eval`]: SISNR and the Mann-Whitney U test;
//! - [`oracle`]: brute-force equivalence suites;
//! - [`cli`]: the `dgru` command-line front end.

pub mod cli;
pub mod dgru;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod macmodel;
pub mod model;
pub mod oracle;
pub mod rnn;
pub mod tensor;

pub use error::{Error, Result};
