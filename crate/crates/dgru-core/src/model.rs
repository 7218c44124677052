//! Mask-estimation network: FC -> GRU -> GRU -> FC -> sigmoid.
//!
//! The network consumes the noisy magnitude spectrum frame by frame and
//! emits a ratio mask in (0, 1) per time-frequency bin. Inference runs the
//! recurrent layers either densely or with the selective update; training
//! minimizes the mean squared error between the masked noisy magnitude and
//! the clean magnitude with plain mini-batch SGD.
//!
//! The first FC layer is a bare affine map (no activation); the output FC
//! goes through a sigmoid so the mask lands in the ratio-mask range. Inputs
//! are raw magnitudes, no normalization.

use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dgru::{dgru_backward, dgru_run, SelectGateConfig, StepStats};
use crate::dsp::{istft, magnitude, mix_at_snr, stft, apply_mask, AudioBuffer, MixSpec, StftConfig};
use crate::error::{Error, Result};
use crate::macmodel::{self, MacReport, ModelCostConfig};
use crate::rnn::{GruTape, GruWeights, HiddenState};
use crate::tensor::{sigmoid, Matrix, Vector};

/// Construction parameters for [`EnhanceModel`].
#[derive(Clone, Debug)]
pub struct EnhanceModelConfig {
    pub feature_dim: usize,
    pub hidden_dim: usize,
    /// Gate used by default at inference; training picks its own.
    pub gate: SelectGateConfig,
    pub seed: u64,
}

impl EnhanceModelConfig {
    /// Full-scale published shape: 161 bins, 320 hidden units.
    pub fn paper_scale(seed: u64) -> Self {
        EnhanceModelConfig {
            feature_dim: 161,
            hidden_dim: 320,
            gate: SelectGateConfig::Dense,
            seed,
        }
    }

    /// Fast test shape: 33 bins (64-point FFT), 32 hidden units.
    pub fn desk_scale(seed: u64) -> Self {
        EnhanceModelConfig {
            feature_dim: 33,
            hidden_dim: 32,
            gate: SelectGateConfig::Dense,
            seed,
        }
    }
}

/// Number of recurrent layers; fixed by the architecture.
pub const NUM_GRU_LAYERS: usize = 2;

/// The enhancement network's parameters. Gradients reuse the same layout.
#[derive(Clone, Debug, PartialEq)]
pub struct EnhanceModel {
    pub fc_in_w: Matrix,  // hidden x feature
    pub fc_in_b: Vector,  // hidden
    pub gru1: GruWeights, // hidden -> hidden
    pub gru2: GruWeights, // hidden -> hidden
    pub fc_out_w: Matrix, // feature x hidden
    pub fc_out_b: Vector, // feature
}

impl EnhanceModel {
    pub fn zeros(feature_dim: usize, hidden_dim: usize) -> Self {
        EnhanceModel {
            fc_in_w: Matrix::zeros(hidden_dim, feature_dim),
            fc_in_b: Vector::zeros(hidden_dim),
            gru1: GruWeights::zeros(hidden_dim, hidden_dim),
            gru2: GruWeights::zeros(hidden_dim, hidden_dim),
            fc_out_w: Matrix::zeros(feature_dim, hidden_dim),
            fc_out_b: Vector::zeros(feature_dim),
        }
    }

    /// Seeded uniform initialization on `[-1/sqrt(J), +1/sqrt(J)]`.
    pub fn init(cfg: &EnhanceModelConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let s = 1.0 / (cfg.hidden_dim as f64).sqrt();
        let mut m = EnhanceModel::zeros(cfg.feature_dim, cfg.hidden_dim);
        for v in m.fc_in_w.as_mut_slice() {
            *v = rng.gen_range(-s..s);
        }
        for i in 0..m.fc_in_b.len() {
            m.fc_in_b[i] = rng.gen_range(-s..s);
        }
        m.gru1 = GruWeights::random(cfg.hidden_dim, cfg.hidden_dim, &mut rng);
        m.gru2 = GruWeights::random(cfg.hidden_dim, cfg.hidden_dim, &mut rng);
        for v in m.fc_out_w.as_mut_slice() {
            *v = rng.gen_range(-s..s);
        }
        for i in 0..m.fc_out_b.len() {
            m.fc_out_b[i] = rng.gen_range(-s..s);
        }
        m
    }

    pub fn feature_dim(&self) -> usize {
        self.fc_in_w.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.fc_in_w.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.feature_dim();
        let j = self.hidden_dim();
        self.gru1.validate()?;
        self.gru2.validate()?;
        if self.gru1.input_dim() != j
            || self.gru1.hidden_dim() != j
            || self.gru2.input_dim() != j
            || self.gru2.hidden_dim() != j
            || self.fc_in_b.len() != j
            || self.fc_out_w.rows() != f
            || self.fc_out_w.cols() != j
            || self.fc_out_b.len() != f
        {
            return Err(Error::dim(
                "enhance model",
                format!("feature {f}, hidden {j}"),
                "inconsistent layer shapes".to_string(),
            ));
        }
        if !self.fc_in_w.is_finite()
            || !self.fc_in_b.is_finite()
            || !self.fc_out_w.is_finite()
            || !self.fc_out_b.is_finite()
        {
            return Err(Error::NonFinite("enhance model"));
        }
        Ok(())
    }

    /// `self += alpha * other` across every parameter tensor.
    pub fn scaled_add(&mut self, alpha: f64, other: &EnhanceModel) -> Result<()> {
        self.fc_in_w.scaled_add(alpha, &other.fc_in_w)?;
        self.fc_in_b.axpy(alpha, &other.fc_in_b)?;
        self.gru1.scaled_add(alpha, &other.gru1)?;
        self.gru2.scaled_add(alpha, &other.gru2)?;
        self.fc_out_w.scaled_add(alpha, &other.fc_out_w)?;
        self.fc_out_b.axpy(alpha, &other.fc_out_b)?;
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &EnhanceModel) -> f64 {
        let mut m: f64 = 0.0;
        for (a, b) in self.tensor_entries().iter().zip(other.tensor_entries()) {
            for (x, y) in a.2.iter().zip(b.2.iter()) {
                m = m.max((x - y).abs());
            }
        }
        m
    }

    /// `(name, dims, data)` for every tensor, in serialization order.
    fn tensor_entries(&self) -> Vec<(&'static str, Vec<u32>, &[f64])> {
        let mut out: Vec<(&'static str, Vec<u32>, &[f64])> = Vec::with_capacity(28);
        let mat = |m: &Matrix| vec![m.rows() as u32, m.cols() as u32];
        let vec1 = |v: &Vector| vec![v.len() as u32];
        out.push(("fc_in.weight", mat(&self.fc_in_w), self.fc_in_w.as_slice()));
        out.push(("fc_in.bias", vec1(&self.fc_in_b), self.fc_in_b.as_slice()));
        for (prefix, g) in [("gru1", &self.gru1), ("gru2", &self.gru2)] {
            let names = gru_tensor_names(prefix);
            let tensors: [(&Vec<u32>, &[f64]); 0] = [];
            let _ = tensors;
            out.push((names[0], mat(&g.w_ir), g.w_ir.as_slice()));
            out.push((names[1], mat(&g.w_iz), g.w_iz.as_slice()));
            out.push((names[2], mat(&g.w_ic), g.w_ic.as_slice()));
            out.push((names[3], mat(&g.w_hr), g.w_hr.as_slice()));
            out.push((names[4], mat(&g.w_hz), g.w_hz.as_slice()));
            out.push((names[5], mat(&g.w_hc), g.w_hc.as_slice()));
            out.push((names[6], vec1(&g.b_ir), g.b_ir.as_slice()));
            out.push((names[7], vec1(&g.b_iz), g.b_iz.as_slice()));
            out.push((names[8], vec1(&g.b_ic), g.b_ic.as_slice()));
            out.push((names[9], vec1(&g.b_hr), g.b_hr.as_slice()));
            out.push((names[10], vec1(&g.b_hz), g.b_hz.as_slice()));
            out.push((names[11], vec1(&g.b_hc), g.b_hc.as_slice()));
        }
        out.push(("fc_out.weight", mat(&self.fc_out_w), self.fc_out_w.as_slice()));
        out.push(("fc_out.bias", vec1(&self.fc_out_b), self.fc_out_b.as_slice()));
        out
    }
}

fn gru_tensor_names(prefix: &str) -> [&'static str; 12] {
    match prefix {
        "gru1" => [
            "gru1.w_ir", "gru1.w_iz", "gru1.w_ic", "gru1.w_hr", "gru1.w_hz", "gru1.w_hc",
            "gru1.b_ir", "gru1.b_iz", "gru1.b_ic", "gru1.b_hr", "gru1.b_hz", "gru1.b_hc",
        ],
        "gru2" => [
            "gru2.w_ir", "gru2.w_iz", "gru2.w_ic", "gru2.w_hr", "gru2.w_hz", "gru2.w_hc",
            "gru2.b_ir", "gru2.b_iz", "gru2.b_ic", "gru2.b_hr", "gru2.b_hz", "gru2.b_hc",
        ],
        _ => unreachable!("unknown gru prefix"),
    }
}

/// Intermediates of one forward pass that training needs back.
pub(crate) struct TrainingForward {
    pub mask: Matrix,
    pub h2: Vec<Vector>,
    pub tape1: GruTape,
    pub tape2: GruTape,
    pub stats: Vec<Vec<StepStats>>,
}

pub(crate) fn forward_training(
    m: &EnhanceModel,
    noisy_mag: &Matrix,
    gate: &SelectGateConfig,
) -> Result<TrainingForward> {
    if noisy_mag.cols() != m.feature_dim() {
        return Err(Error::dim(
            "model forward",
            format!("{} feature columns", noisy_mag.cols()),
            format!("expected {}", m.feature_dim()),
        ));
    }
    let t_len = noisy_mag.rows();
    let j = m.hidden_dim();
    let mut vs = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let row = Vector::from_vec(noisy_mag.row(t).to_vec());
        let mut v = m.fc_in_w.matvec(&row)?;
        for i in 0..j {
            v[i] += m.fc_in_b[i];
        }
        vs.push(v);
    }
    let (states1, tape1, stats1) = dgru_run(&m.gru1, &vs, &HiddenState::zeros(j), gate)?;
    let h1: Vec<Vector> = states1.into_iter().map(|s| s.h).collect();
    let (states2, tape2, stats2) = dgru_run(&m.gru2, &h1, &HiddenState::zeros(j), gate)?;
    let h2: Vec<Vector> = states2.into_iter().map(|s| s.h).collect();

    let f_dim = m.feature_dim();
    let mut mask = Matrix::zeros(t_len, f_dim);
    for t in 0..t_len {
        let o = m.fc_out_w.matvec(&h2[t])?;
        for f in 0..f_dim {
            mask[(t, f)] = sigmoid(o[f] + m.fc_out_b[f]);
        }
    }
    Ok(TrainingForward {
        mask,
        h2,
        tape1,
        tape2,
        stats: vec![stats1, stats2],
    })
}

/// Frame-causal forward pass: mask row `t` depends only on input rows
/// `<= t`. Returns the mask and the per-step stats of each GRU layer.
pub fn forward(
    m: &EnhanceModel,
    noisy_mag: &Matrix,
    gate: &SelectGateConfig,
) -> Result<(Matrix, Vec<Vec<StepStats>>)> {
    let fwd = forward_training(m, noisy_mag, gate)?;
    Ok((fwd.mask, fwd.stats))
}

/// Mean over all T*F bins of `(mask * noisy_mag - clean_mag)^2`.
pub fn loss_mag_mse(mask: &Matrix, noisy_mag: &Matrix, clean_mag: &Matrix) -> Result<f64> {
    for (name, m2) in [("noisy magnitude", noisy_mag), ("clean magnitude", clean_mag)] {
        if m2.rows() != mask.rows() || m2.cols() != mask.cols() {
            return Err(Error::dim(
                "loss_mag_mse",
                format!("mask {}x{}", mask.rows(), mask.cols()),
                format!("{name} {}x{}", m2.rows(), m2.cols()),
            ));
        }
    }
    let n = mask.rows() * mask.cols();
    if n == 0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for t in 0..mask.rows() {
        for f in 0..mask.cols() {
            let d = mask[(t, f)] * noisy_mag[(t, f)] - clean_mag[(t, f)];
            sum += d * d;
        }
    }
    Ok(sum / n as f64)
}

/// Gradients of [`loss_mag_mse`] with respect to every model parameter,
/// chained through the output sigmoid, both GRU layers (selection pinned as
/// recorded), and the input FC.
pub(crate) fn backward_training(
    m: &EnhanceModel,
    fwd: &TrainingForward,
    noisy_mag: &Matrix,
    clean_mag: &Matrix,
) -> Result<EnhanceModel> {
    let t_len = fwd.mask.rows();
    let f_dim = fwd.mask.cols();
    let mut grads = EnhanceModel::zeros(m.feature_dim(), m.hidden_dim());
    if t_len == 0 {
        return Ok(grads);
    }
    let scale = 2.0 / (t_len * f_dim) as f64;
    let mut dh2 = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let mut dout = Vector::zeros(f_dim);
        for f in 0..f_dim {
            let mk = fwd.mask[(t, f)];
            let nm = noisy_mag[(t, f)];
            let dmask = scale * (mk * nm - clean_mag[(t, f)]) * nm;
            dout[f] = dmask * mk * (1.0 - mk);
        }
        grads.fc_out_w.add_outer(&dout, &fwd.h2[t])?;
        grads.fc_out_b.axpy(1.0, &dout)?;
        dh2.push(m.fc_out_w.matvec_t(&dout)?);
    }
    let (g2, dh1) = dgru_backward(&m.gru2, &fwd.tape2, &dh2)?;
    let (g1, dv) = dgru_backward(&m.gru1, &fwd.tape1, &dh1)?;
    grads.gru1 = g1;
    grads.gru2 = g2;
    for (t, dvt) in dv.iter().enumerate() {
        let row = Vector::from_vec(noisy_mag.row(t).to_vec());
        grads.fc_in_w.add_outer(dvt, &row)?;
        grads.fc_in_b.axpy(1.0, dvt)?;
    }
    Ok(grads)
}

/// Training hyperparameters. `gate` selects dense or selective updates
/// during training (the selection pattern is pinned per step for BPTT).
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub utterances: usize,
    pub utterance_len: usize,
    pub snr_range_db: (f64, f64),
    pub seed: u64,
    pub gate: SelectGateConfig,
}

impl TrainConfig {
    /// Defaults for the desk-scale model: 200 one-second utterances.
    pub fn desk_scale(seed: u64) -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 5,
            batch_size: 1,
            utterances: 200,
            utterance_len: 16_000,
            snr_range_db: (-5.0, 15.0),
            seed,
            gate: SelectGateConfig::Dense,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig {
                what: "learning rate",
                details: format!("{}", self.learning_rate),
            });
        }
        if self.batch_size == 0 || self.utterances == 0 {
            return Err(Error::InvalidConfig {
                what: "train config",
                details: "batch_size and utterances must be nonzero".into(),
            });
        }
        if self.snr_range_db.0 > self.snr_range_db.1 {
            return Err(Error::InvalidConfig {
                what: "snr range",
                details: format!("{:?}", self.snr_range_db),
            });
        }
        Ok(())
    }
}

/// Mini-batch SGD over a generated dataset. `gen(index)` supplies the
/// clean/noise pair for utterance `index`; mixing SNRs are drawn uniformly
/// from the configured range. Returns the per-epoch mean loss, measured
/// before each update. Deterministic given the seed.
pub fn train<G>(model: &mut EnhanceModel, tc: &TrainConfig, mut gen: G) -> Result<Vec<f64>>
where
    G: FnMut(u64) -> (AudioBuffer, AudioBuffer),
{
    tc.validate()?;
    model.validate()?;
    tc.gate.validate(model.hidden_dim())?;
    let stft_cfg = StftConfig::for_feature_dim(model.feature_dim());
    let mut curve = Vec::with_capacity(tc.epochs);
    for epoch in 0..tc.epochs {
        let mut epoch_loss = 0.0;
        let mut batch = EnhanceModel::zeros(model.feature_dim(), model.hidden_dim());
        let mut in_batch = 0usize;
        for utt in 0..tc.utterances {
            let (clean, noise) = gen(utt as u64);
            // Each utterance keeps its mixing SNR across epochs: epochs are
            // passes over one fixed dataset.
            let mut snr_rng = ChaCha8Rng::seed_from_u64(
                tc.seed ^ (utt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
            );
            let snr = snr_rng.gen_range(tc.snr_range_db.0..=tc.snr_range_db.1);
            let (noisy, _) = mix_at_snr(&clean, &noise, &MixSpec { snr_db: snr, seed: tc.seed })?;
            let noisy_mag = magnitude(&stft(&noisy, &stft_cfg)?);
            let clean_mag = magnitude(&stft(&clean, &stft_cfg)?);
            let fwd = forward_training(model, &noisy_mag, &tc.gate)?;
            let loss = loss_mag_mse(&fwd.mask, &noisy_mag, &clean_mag)?;
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch: epoch + 1 });
            }
            epoch_loss += loss;
            let grads = backward_training(model, &fwd, &noisy_mag, &clean_mag)?;
            batch.scaled_add(1.0, &grads)?;
            in_batch += 1;
            if in_batch == tc.batch_size || utt + 1 == tc.utterances {
                model.scaled_add(-tc.learning_rate / in_batch as f64, &batch)?;
                batch = EnhanceModel::zeros(model.feature_dim(), model.hidden_dim());
                in_batch = 0;
            }
        }
        curve.push(epoch_loss / tc.utterances as f64);
    }
    Ok(curve)
}

const WEIGHT_MAGIC: [u8; 4] = *b"DGRU";
const WEIGHT_VERSION: u16 = 1;
/// Guards against absurd allocations from corrupt files.
const MAX_TENSOR_ELEMS: u64 = 1 << 28;

/// Writes the model: magic `DGRU`, format version (u16 LE), tensor count
/// (u32 LE), then per tensor: name length (u32 LE), UTF-8 name, rank
/// (u32 LE), dims (u32 LE each), payload as f32 LE.
pub fn save(model: &EnhanceModel, path: impl AsRef<Path>) -> Result<()> {
    model.validate()?;
    let entries = model.tensor_entries();
    let mut out = Vec::new();
    out.extend_from_slice(&WEIGHT_MAGIC);
    out.extend_from_slice(&WEIGHT_VERSION.to_le_bytes());
    out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
    for (name, dims, data) in entries {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
        for d in &dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for &v in data {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::WeightFormat("unexpected end of file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Reads a model written by [`save`]. Malformed data, version mismatches,
/// and inconsistent tensor shapes are reported as distinct errors.
pub fn load(path: impl AsRef<Path>) -> Result<EnhanceModel> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    load_bytes(&bytes)
}

pub(crate) fn load_bytes(bytes: &[u8]) -> Result<EnhanceModel> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != WEIGHT_MAGIC {
        return Err(Error::WeightFormat("bad magic bytes".into()));
    }
    let version = cur.u16()?;
    if version != WEIGHT_VERSION {
        return Err(Error::WeightVersion {
            found: version,
            expected: WEIGHT_VERSION,
        });
    }
    let count = cur.u32()?;
    let mut tensors: Vec<(String, Vec<u32>, Vec<f64>)> = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let name_len = cur.u32()? as usize;
        if name_len > 256 {
            return Err(Error::WeightFormat(format!(
                "tensor name length {name_len} exceeds limit"
            )));
        }
        let name = std::str::from_utf8(cur.take(name_len)?)
            .map_err(|_| Error::WeightFormat("tensor name is not UTF-8".into()))?
            .to_string();
        let rank = cur.u32()?;
        if rank > 2 {
            return Err(Error::WeightFormat(format!(
                "tensor {name}: rank {rank} unsupported"
            )));
        }
        let mut dims = Vec::with_capacity(rank as usize);
        let mut elems: u64 = 1;
        for _ in 0..rank {
            let d = cur.u32()?;
            elems = elems.saturating_mul(d as u64);
            dims.push(d);
        }
        if elems > MAX_TENSOR_ELEMS {
            return Err(Error::WeightFormat(format!(
                "tensor {name}: {elems} elements exceeds limit"
            )));
        }
        let payload = cur.take(elems as usize * 4)?;
        let data = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        tensors.push((name, dims, data));
    }
    if cur.pos != bytes.len() {
        return Err(Error::WeightFormat("trailing bytes after tensors".into()));
    }

    let find = |name: &str| -> Result<&(String, Vec<u32>, Vec<f64>)> {
        tensors
            .iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| Error::WeightFormat(format!("missing tensor {name}")))
    };
    let (_, dims, _) = find("fc_in.weight")?;
    if dims.len() != 2 {
        return Err(Error::WeightShape {
            tensor: "fc_in.weight".into(),
            details: "expected rank 2".into(),
        });
    }
    let hidden = dims[0] as usize;
    let feature = dims[1] as usize;
    if hidden == 0 || feature == 0 {
        return Err(Error::WeightShape {
            tensor: "fc_in.weight".into(),
            details: "zero dimension".into(),
        });
    }

    let matrix = |name: &str, rows: usize, cols: usize| -> Result<Matrix> {
        let (_, dims, data) = find(name)?;
        if dims.len() != 2 || dims[0] as usize != rows || dims[1] as usize != cols {
            return Err(Error::WeightShape {
                tensor: name.into(),
                details: format!("dims {dims:?}, expected [{rows}, {cols}]"),
            });
        }
        Matrix::from_vec(data.clone(), rows, cols)
    };
    let vector = |name: &str, len: usize| -> Result<Vector> {
        let (_, dims, data) = find(name)?;
        if dims.len() != 1 || dims[0] as usize != len {
            return Err(Error::WeightShape {
                tensor: name.into(),
                details: format!("dims {dims:?}, expected [{len}]"),
            });
        }
        Ok(Vector::from_vec(data.clone()))
    };
    let gru = |prefix: &str| -> Result<GruWeights> {
        let names = gru_tensor_names(prefix);
        Ok(GruWeights {
            w_ir: matrix(names[0], hidden, hidden)?,
            w_iz: matrix(names[1], hidden, hidden)?,
            w_ic: matrix(names[2], hidden, hidden)?,
            w_hr: matrix(names[3], hidden, hidden)?,
            w_hz: matrix(names[4], hidden, hidden)?,
            w_hc: matrix(names[5], hidden, hidden)?,
            b_ir: vector(names[6], hidden)?,
            b_iz: vector(names[7], hidden)?,
            b_ic: vector(names[8], hidden)?,
            b_hr: vector(names[9], hidden)?,
            b_hz: vector(names[10], hidden)?,
            b_hc: vector(names[11], hidden)?,
        })
    };

    let model = EnhanceModel {
        fc_in_w: matrix("fc_in.weight", hidden, feature)?,
        fc_in_b: vector("fc_in.bias", hidden)?,
        gru1: gru("gru1")?,
        gru2: gru("gru2")?,
        fc_out_w: matrix("fc_out.weight", feature, hidden)?,
        fc_out_b: vector("fc_out.bias", feature)?,
    };
    model.validate()?;
    Ok(model)
}

/// Result of running the full enhancement pipeline.
#[derive(Clone, Debug)]
pub struct EnhanceResult {
    pub audio: AudioBuffer,
    pub mac_report: MacReport,
    /// Mean per-step update percentage across both GRU layers.
    pub mean_update_percent: f64,
}

/// End-to-end enhancement: STFT, magnitude, mask estimation, masking with
/// the noisy phase, and overlap-add resynthesis. The MAC report aggregates
/// the counted per-step statistics of the run.
pub fn enhance(
    m: &EnhanceModel,
    noisy: &AudioBuffer,
    gate: &SelectGateConfig,
) -> Result<EnhanceResult> {
    let stft_cfg = StftConfig::for_feature_dim(m.feature_dim());
    let spec = stft(noisy, &stft_cfg)?;
    let noisy_mag = magnitude(&spec);
    let (mask, stats) = forward(m, &noisy_mag, gate)?;
    let enhanced = apply_mask(&spec, &mask)?;
    let audio = istft(&enhanced)?;
    let cost_cfg = ModelCostConfig {
        feature_dim: m.feature_dim(),
        hidden_dim: m.hidden_dim(),
        num_gru_layers: NUM_GRU_LAYERS,
        frames_per_second: stft_cfg.frames_per_second(noisy.sample_rate),
    };
    let mac_report = macmodel::measure(&cost_cfg, &stats)?;
    let mean_update_percent = macmodel::mean_update_percent(&stats);
    Ok(EnhanceResult {
        audio,
        mac_report,
        mean_update_percent,
    })
}
