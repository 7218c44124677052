//! Conventional GRU cell, sequence runner, and backpropagation through time.
//!
//! The dense cell here is the correctness baseline for the selective-update
//! variant in [`crate::dgru`]; both are built from the same per-row kernels
//! so that a full selection reproduces the dense outputs bit for bit.
//!
//! Update equations (gates evaluated in the fixed order r, z, c, h):
//!
//! ```text
//! r = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//! z = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
//! c = tanh(W_ic x + b_ic + r * (W_hc h + b_hc))
//! h' = z * c + (1 - z) * h
//! ```

use rand::Rng;

use crate::dgru::SelectGate;
use crate::error::{Error, Result};
use crate::tensor::{dot_slices, sigmoid, Matrix, Vector};

/// The six weight matrices and six bias vectors of a GRU cell.
///
/// Input-side matrices are `hidden x input`, recurrent matrices are
/// `hidden x hidden`. The input and recurrent biases are kept as separate
/// vectors rather than pre-summed; the selective-update path skips them
/// independently per row.
///
/// Gradient tensors share this layout, see [`GruGrads`].
#[derive(Clone, Debug, PartialEq)]
pub struct GruWeights {
    pub w_ir: Matrix,
    pub w_iz: Matrix,
    pub w_ic: Matrix,
    pub w_hr: Matrix,
    pub w_hz: Matrix,
    pub w_hc: Matrix,
    pub b_ir: Vector,
    pub b_iz: Vector,
    pub b_ic: Vector,
    pub b_hr: Vector,
    pub b_hz: Vector,
    pub b_hc: Vector,
}

/// Gradients with respect to every tensor in [`GruWeights`], same layout.
pub type GruGrads = GruWeights;

impl GruWeights {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        GruWeights {
            w_ir: Matrix::zeros(hidden_dim, input_dim),
            w_iz: Matrix::zeros(hidden_dim, input_dim),
            w_ic: Matrix::zeros(hidden_dim, input_dim),
            w_hr: Matrix::zeros(hidden_dim, hidden_dim),
            w_hz: Matrix::zeros(hidden_dim, hidden_dim),
            w_hc: Matrix::zeros(hidden_dim, hidden_dim),
            b_ir: Vector::zeros(hidden_dim),
            b_iz: Vector::zeros(hidden_dim),
            b_ic: Vector::zeros(hidden_dim),
            b_hr: Vector::zeros(hidden_dim),
            b_hz: Vector::zeros(hidden_dim),
            b_hc: Vector::zeros(hidden_dim),
        }
    }

    /// Uniform init on `[-1/sqrt(J), +1/sqrt(J)]`, the common GRU default.
    /// Deterministic for a seeded `rng`; tensors are filled in declaration
    /// order, each row-major.
    pub fn random(input_dim: usize, hidden_dim: usize, rng: &mut impl Rng) -> Self {
        let s = 1.0 / (hidden_dim as f64).sqrt();
        let mut w = GruWeights::zeros(input_dim, hidden_dim);
        for i in 0..w.param_count() {
            w.param_set(i, rng.gen_range(-s..s));
        }
        w
    }

    pub fn input_dim(&self) -> usize {
        self.w_ir.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_ir.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let i = self.input_dim();
        let j = self.hidden_dim();
        let mats = [
            ("w_ir", &self.w_ir, i),
            ("w_iz", &self.w_iz, i),
            ("w_ic", &self.w_ic, i),
            ("w_hr", &self.w_hr, j),
            ("w_hz", &self.w_hz, j),
            ("w_hc", &self.w_hc, j),
        ];
        for (name, m, cols) in mats {
            if m.rows() != j || m.cols() != cols {
                return Err(Error::dim(
                    "gru weights",
                    format!("{name} {}x{}", m.rows(), m.cols()),
                    format!("expected {j}x{cols}"),
                ));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite("gru weights"));
            }
        }
        for (name, b) in self.biases() {
            if b.len() != j {
                return Err(Error::dim(
                    "gru weights",
                    format!("{name} len {}", b.len()),
                    format!("expected {j}"),
                ));
            }
            if !b.is_finite() {
                return Err(Error::NonFinite("gru weights"));
            }
        }
        Ok(())
    }

    fn biases(&self) -> [(&'static str, &Vector); 6] {
        [
            ("b_ir", &self.b_ir),
            ("b_iz", &self.b_iz),
            ("b_ic", &self.b_ic),
            ("b_hr", &self.b_hr),
            ("b_hz", &self.b_hz),
            ("b_hc", &self.b_hc),
        ]
    }

    fn tensors(&self) -> [&[f64]; 12] {
        [
            self.w_ir.as_slice(),
            self.w_iz.as_slice(),
            self.w_ic.as_slice(),
            self.w_hr.as_slice(),
            self.w_hz.as_slice(),
            self.w_hc.as_slice(),
            self.b_ir.as_slice(),
            self.b_iz.as_slice(),
            self.b_ic.as_slice(),
            self.b_hr.as_slice(),
            self.b_hz.as_slice(),
            self.b_hc.as_slice(),
        ]
    }

    fn tensors_mut(&mut self) -> [&mut [f64]; 12] {
        [
            self.w_ir.as_mut_slice(),
            self.w_iz.as_mut_slice(),
            self.w_ic.as_mut_slice(),
            self.w_hr.as_mut_slice(),
            self.w_hz.as_mut_slice(),
            self.w_hc.as_mut_slice(),
            self.b_ir.as_mut_slice(),
            self.b_iz.as_mut_slice(),
            self.b_ic.as_mut_slice(),
            self.b_hr.as_mut_slice(),
            self.b_hz.as_mut_slice(),
            self.b_hc.as_mut_slice(),
        ]
    }

    /// Total number of scalar parameters.
    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Read parameter `idx` in flat order (tensors in declaration order,
    /// each row-major). Used by the finite-difference oracles.
    pub fn param_get(&self, idx: usize) -> f64 {
        let mut rest = idx;
        for t in self.tensors() {
            if rest < t.len() {
                return t[rest];
            }
            rest -= t.len();
        }
        panic!("parameter index {idx} out of range");
    }

    /// Write parameter `idx` in the same flat order as [`param_get`].
    ///
    /// [`param_get`]: GruWeights::param_get
    pub fn param_set(&mut self, idx: usize, value: f64) {
        let mut rest = idx;
        for t in self.tensors_mut() {
            if rest < t.len() {
                t[rest] = value;
                return;
            }
            rest -= t.len();
        }
        panic!("parameter index {idx} out of range");
    }

    /// `self += alpha * other` over all twelve tensors.
    pub fn scaled_add(&mut self, alpha: f64, other: &GruWeights) -> Result<()> {
        self.w_ir.scaled_add(alpha, &other.w_ir)?;
        self.w_iz.scaled_add(alpha, &other.w_iz)?;
        self.w_ic.scaled_add(alpha, &other.w_ic)?;
        self.w_hr.scaled_add(alpha, &other.w_hr)?;
        self.w_hz.scaled_add(alpha, &other.w_hz)?;
        self.w_hc.scaled_add(alpha, &other.w_hc)?;
        self.b_ir.axpy(alpha, &other.b_ir)?;
        self.b_iz.axpy(alpha, &other.b_iz)?;
        self.b_ic.axpy(alpha, &other.b_ic)?;
        self.b_hr.axpy(alpha, &other.b_hr)?;
        self.b_hz.axpy(alpha, &other.b_hz)?;
        self.b_hc.axpy(alpha, &other.b_hc)?;
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Per-layer recurrent state: the neuron values plus the most recent
/// select-gate output (all ones for the dense cell).
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenState {
    pub h: Vector,
    pub g_last: SelectGate,
}

impl HiddenState {
    /// The zero initial state.
    pub fn zeros(hidden_dim: usize) -> Self {
        HiddenState {
            h: Vector::zeros(hidden_dim),
            g_last: SelectGate::ones(hidden_dim),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.h.len()
    }
}

/// One step's forward intermediates, kept for BPTT.
///
/// `r`, `c`, and `cand_rec` are only populated at coordinates the gate
/// selected; unselected coordinates hold 0 and are never read back.
#[derive(Clone, Debug)]
pub(crate) struct StepRecord {
    pub x: Vector,
    pub h_prev: Vector,
    pub r: Vector,
    pub z: Vector,
    pub c: Vector,
    /// Recurrent candidate preactivation `W_hc h_prev + b_hc`, per row.
    pub cand_rec: Vector,
    pub gate: SelectGate,
}

/// Recorded forward pass of [`gru_run`] / [`crate::dgru::dgru_run`]:
/// one record per consumed input step, in order.
#[derive(Clone, Debug, Default)]
pub struct GruTape {
    pub(crate) steps: Vec<StepRecord>,
}

impl GruTape {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Select gate recorded at step `t`.
    pub fn gate(&self, t: usize) -> &SelectGate {
        &self.steps[t].gate
    }

    /// Update-gate activations `z_t` recorded at step `t` (always dense).
    pub fn update_gate(&self, t: usize) -> &Vector {
        &self.steps[t].z
    }

    /// Clones of every step's select gate, in order.
    pub fn gates(&self) -> Vec<SelectGate> {
        self.steps.iter().map(|s| s.gate.clone()).collect()
    }
}

fn check_step_dims(w: &GruWeights, x: &Vector, state: &HiddenState) -> Result<()> {
    if x.len() != w.input_dim() {
        return Err(Error::dim(
            "gru step input",
            format!("len {}", x.len()),
            format!("expected {}", w.input_dim()),
        ));
    }
    if state.h.len() != w.hidden_dim() {
        return Err(Error::dim(
            "gru step state",
            format!("len {}", state.h.len()),
            format!("expected {}", w.hidden_dim()),
        ));
    }
    Ok(())
}

/// Reset- or update-gate preactivation for row `j`:
/// `(W_i x)_j + b_i[j] + (W_h h)_j + b_h[j]`, summed in that exact order.
#[inline]
pub(crate) fn gate_preact_row(
    w_i: &Matrix,
    b_i: &Vector,
    w_h: &Matrix,
    b_h: &Vector,
    x: &Vector,
    h: &Vector,
    j: usize,
) -> f64 {
    dot_slices(w_i.row(j), x.as_slice()) + b_i[j] + dot_slices(w_h.row(j), h.as_slice()) + b_h[j]
}

/// Candidate state for row `j`; returns `(u_j, c_j)` where
/// `u_j = (W_hc h)_j + b_hc[j]` and `c_j = tanh((W_ic x)_j + b_ic[j] + r_j * u_j)`.
#[inline]
pub(crate) fn candidate_row(w: &GruWeights, x: &Vector, h: &Vector, r_j: f64, j: usize) -> (f64, f64) {
    let u = dot_slices(w.w_hc.row(j), h.as_slice()) + w.b_hc[j];
    let c = (dot_slices(w.w_ic.row(j), x.as_slice()) + w.b_ic[j] + r_j * u).tanh();
    (u, c)
}

/// Convex blend `z_j * c_j + (1 - z_j) * h_j`.
#[inline]
pub(crate) fn blend_row(z_j: f64, c_j: f64, h_j: f64) -> f64 {
    z_j * c_j + (1.0 - z_j) * h_j
}

/// Dense update gate `z = sigmoid(W_iz x + b_iz + W_hz h + b_hz)`.
pub(crate) fn update_gate_dense(w: &GruWeights, x: &Vector, h: &Vector) -> Vector {
    Vector::from_fn(w.hidden_dim(), |j| {
        sigmoid(gate_preact_row(&w.w_iz, &w.b_iz, &w.w_hz, &w.b_hz, x, h, j))
    })
}

fn dense_step_record(w: &GruWeights, x: &Vector, h_prev: &Vector) -> (HiddenState, StepRecord) {
    let j_dim = w.hidden_dim();
    let r = Vector::from_fn(j_dim, |j| {
        sigmoid(gate_preact_row(&w.w_ir, &w.b_ir, &w.w_hr, &w.b_hr, x, h_prev, j))
    });
    let z = update_gate_dense(w, x, h_prev);
    let mut cand_rec = Vector::zeros(j_dim);
    let mut c = Vector::zeros(j_dim);
    for j in 0..j_dim {
        let (u_j, c_j) = candidate_row(w, x, h_prev, r[j], j);
        cand_rec[j] = u_j;
        c[j] = c_j;
    }
    let h = Vector::from_fn(j_dim, |j| blend_row(z[j], c[j], h_prev[j]));
    let state = HiddenState {
        h,
        g_last: SelectGate::ones(j_dim),
    };
    let record = StepRecord {
        x: x.clone(),
        h_prev: h_prev.clone(),
        r,
        z,
        c,
        cand_rec,
        gate: SelectGate::ones(j_dim),
    };
    (state, record)
}

/// One dense GRU step. The input state is unmodified; the returned state
/// carries an all-ones gate.
pub fn gru_step(w: &GruWeights, x: &Vector, state: &HiddenState) -> Result<HiddenState> {
    check_step_dims(w, x, state)?;
    Ok(dense_step_record(w, x, &state.h).0)
}

/// Runs the dense cell over a sequence, recording a tape for BPTT.
pub fn gru_run(
    w: &GruWeights,
    xs: &[Vector],
    h0: &HiddenState,
) -> Result<(Vec<HiddenState>, GruTape)> {
    let mut states = Vec::with_capacity(xs.len());
    let mut tape = GruTape::default();
    let mut h = h0.h.clone();
    if h.len() != w.hidden_dim() {
        return Err(Error::dim(
            "gru run state",
            format!("len {}", h.len()),
            format!("expected {}", w.hidden_dim()),
        ));
    }
    for x in xs {
        if x.len() != w.input_dim() {
            return Err(Error::dim(
                "gru run input",
                format!("len {}", x.len()),
                format!("expected {}", w.input_dim()),
            ));
        }
        let (state, record) = dense_step_record(w, x, &h);
        h = state.h.clone();
        states.push(state);
        tape.steps.push(record);
    }
    Ok((states, tape))
}

/// Reverse-mode differentiation over a recorded tape.
///
/// `grad_h[t]` is dL/dh_t as seen from outside the cell. Coordinates whose
/// recorded gate is 0 propagate identity into `h_{t-1}` and contribute no
/// weight gradients at that step; the recorded selection is treated as a
/// constant. Returns gradients for every weight tensor plus dL/dx_t per step.
pub(crate) fn backward_tape(
    w: &GruWeights,
    tape: &GruTape,
    grad_h: &[Vector],
) -> Result<(GruGrads, Vec<Vector>)> {
    if grad_h.len() != tape.len() {
        return Err(Error::dim(
            "gru backward",
            format!("tape len {}", tape.len()),
            format!("grad len {}", grad_h.len()),
        ));
    }
    let i_dim = w.input_dim();
    let j_dim = w.hidden_dim();
    let mut grads = GruGrads::zeros(i_dim, j_dim);
    let mut grad_x = vec![Vector::zeros(i_dim); tape.len()];
    let mut carry = Vector::zeros(j_dim);

    for t in (0..tape.len()).rev() {
        let rec = &tape.steps[t];
        if grad_h[t].len() != j_dim {
            return Err(Error::dim(
                "gru backward",
                format!("grad_h[{t}] len {}", grad_h[t].len()),
                format!("expected {j_dim}"),
            ));
        }
        let dh = grad_h[t].add(&carry)?;
        let mut dh_prev = Vector::zeros(j_dim);
        for j in 0..j_dim {
            if !rec.gate.is_set(j) {
                // Skipped coordinate: h_t[j] == h_{t-1}[j] exactly.
                dh_prev[j] += dh[j];
                continue;
            }
            let dz = dh[j] * (rec.c[j] - rec.h_prev[j]);
            let dpre_z = dz * rec.z[j] * (1.0 - rec.z[j]);
            let dc = dh[j] * rec.z[j];
            let dpre_c = dc * (1.0 - rec.c[j] * rec.c[j]);
            let dr = dpre_c * rec.cand_rec[j];
            let dpre_r = dr * rec.r[j] * (1.0 - rec.r[j]);
            let du = dpre_c * rec.r[j];
            dh_prev[j] += dh[j] * (1.0 - rec.z[j]);

            // Input-side weights and input gradient.
            for k in 0..i_dim {
                let xv = rec.x[k];
                grads.w_ir[(j, k)] += dpre_r * xv;
                grads.w_iz[(j, k)] += dpre_z * xv;
                grads.w_ic[(j, k)] += dpre_c * xv;
                grad_x[t][k] +=
                    w.w_ir[(j, k)] * dpre_r + w.w_iz[(j, k)] * dpre_z + w.w_ic[(j, k)] * dpre_c;
            }
            grads.b_ir[j] += dpre_r;
            grads.b_iz[j] += dpre_z;
            grads.b_ic[j] += dpre_c;

            // Recurrent-side weights and the carry into h_{t-1}.
            for k in 0..j_dim {
                let hv = rec.h_prev[k];
                grads.w_hr[(j, k)] += dpre_r * hv;
                grads.w_hz[(j, k)] += dpre_z * hv;
                grads.w_hc[(j, k)] += du * hv;
                dh_prev[k] +=
                    w.w_hr[(j, k)] * dpre_r + w.w_hz[(j, k)] * dpre_z + w.w_hc[(j, k)] * du;
            }
            grads.b_hr[j] += dpre_r;
            grads.b_hz[j] += dpre_z;
            grads.b_hc[j] += du;
        }
        carry = dh_prev;
    }
    Ok((grads, grad_x))
}

/// BPTT for the dense cell: `tape` from [`gru_run`], `grad_h[t]` = dL/dh_t.
pub fn gru_backward(
    w: &GruWeights,
    tape: &GruTape,
    grad_h: &[Vector],
) -> Result<(GruGrads, Vec<Vector>)> {
    backward_tape(w, tape, grad_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_setup(
        seed: u64,
        i_dim: usize,
        j_dim: usize,
        t_len: usize,
    ) -> (GruWeights, Vec<Vector>, HiddenState) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = GruWeights::random(i_dim, j_dim, &mut rng);
        let xs = (0..t_len)
            .map(|_| Vector::from_fn(i_dim, |_| rng.gen_range(-1.0..1.0)))
            .collect();
        (w, xs, HiddenState::zeros(j_dim))
    }

    #[test]
    fn zero_network_maps_zero_state_to_zero() {
        let w = GruWeights::zeros(3, 2);
        let x = Vector::from_vec(vec![0.4, -0.2, 1.0]);
        let out = gru_step(&w, &x, &HiddenState::zeros(2)).unwrap();
        assert_eq!(out.h, Vector::zeros(2));
        assert_eq!(out.g_last.count_ones(), 2);
    }

    #[test]
    fn saturated_update_gate_holds_state() {
        // z ~ 0 via a large negative update bias; all weights zero.
        let mut w = GruWeights::zeros(1, 1);
        w.b_iz[0] = -40.0;
        let state = HiddenState {
            h: Vector::from_vec(vec![0.7]),
            g_last: SelectGate::ones(1),
        };
        let out = gru_step(&w, &Vector::from_vec(vec![0.3]), &state).unwrap();
        assert!((out.h[0] - 0.7).abs() < 1e-12, "h' = {}", out.h[0]);
    }

    /// Independent step-by-step oracle: evaluates the four update equations
    /// with plain loops, no shared kernels.
    fn oracle_step(w: &GruWeights, x: &Vector, h: &Vector) -> Vector {
        let j_dim = w.hidden_dim();
        let mut out = Vector::zeros(j_dim);
        for j in 0..j_dim {
            let mut pre_r = w.b_ir[j] + w.b_hr[j];
            let mut pre_z = w.b_iz[j] + w.b_hz[j];
            let mut pre_ci = w.b_ic[j];
            let mut pre_ch = w.b_hc[j];
            for k in 0..w.input_dim() {
                pre_r += w.w_ir[(j, k)] * x[k];
                pre_z += w.w_iz[(j, k)] * x[k];
                pre_ci += w.w_ic[(j, k)] * x[k];
            }
            for k in 0..j_dim {
                pre_r += w.w_hr[(j, k)] * h[k];
                pre_z += w.w_hz[(j, k)] * h[k];
                pre_ch += w.w_hc[(j, k)] * h[k];
            }
            let r = sigmoid(pre_r);
            let z = sigmoid(pre_z);
            let c = (pre_ci + r * pre_ch).tanh();
            out[j] = z * c + (1.0 - z) * h[j];
        }
        out
    }

    #[test]
    fn step_matches_independent_oracle() {
        for seed in 0..20 {
            let (w, xs, h0) = random_setup(seed, 3, 4, 1);
            let got = gru_step(&w, &xs[0], &h0).unwrap();
            let want = oracle_step(&w, &xs[0], &h0.h);
            for j in 0..4 {
                assert!(
                    (got.h[j] - want[j]).abs() < 1e-12,
                    "seed {seed} j {j}: {} vs {}",
                    got.h[j],
                    want[j]
                );
            }
        }
    }

    #[test]
    fn run_empty_sequence() {
        let (w, _, h0) = random_setup(1, 2, 3, 0);
        let (states, tape) = gru_run(&w, &[], &h0).unwrap();
        assert!(states.is_empty());
        assert!(tape.is_empty());
    }

    #[test]
    fn run_equals_chained_steps() {
        let (w, xs, h0) = random_setup(7, 3, 5, 3);
        let (states, tape) = gru_run(&w, &xs, &h0).unwrap();
        assert_eq!(states.len(), 3);
        assert_eq!(tape.len(), 3);
        let mut state = h0;
        for (t, x) in xs.iter().enumerate() {
            state = gru_step(&w, x, &state).unwrap();
            assert_eq!(states[t].h, state.h, "step {t}");
        }
    }

    #[test]
    fn state_stays_inside_unit_interval() {
        for seed in 0..10 {
            let (w, xs, h0) = random_setup(100 + seed, 4, 6, 20);
            let (states, _) = gru_run(&w, &xs, &h0).unwrap();
            for s in &states {
                for j in 0..6 {
                    assert!(s.h[j] > -1.0 && s.h[j] < 1.0);
                }
            }
        }
    }

    #[test]
    fn determinism_bitwise() {
        let (w, xs, h0) = random_setup(42, 3, 4, 8);
        let (a, _) = gru_run(&w, &xs, &h0).unwrap();
        let (b, _) = gru_run(&w, &xs, &h0).unwrap();
        for (sa, sb) in a.iter().zip(b.iter()) {
            for j in 0..4 {
                assert_eq!(sa.h[j].to_bits(), sb.h[j].to_bits());
            }
        }
    }

    #[test]
    fn zero_output_gradient_gives_zero_gradients() {
        let (w, xs, h0) = random_setup(3, 2, 3, 4);
        let (_, tape) = gru_run(&w, &xs, &h0).unwrap();
        let grad_h = vec![Vector::zeros(3); 4];
        let (grads, grad_x) = gru_backward(&w, &tape, &grad_h).unwrap();
        assert_eq!(grads.max_abs(), 0.0);
        for g in grad_x {
            assert_eq!(g.max_abs(), 0.0);
        }
    }

    #[test]
    fn unused_input_coordinate_gets_zero_weight_gradient() {
        // Input coordinate 1 is always zero, so column 1 of every W_i* has
        // no influence on the loss.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = GruWeights::random(2, 3, &mut rng);
        let xs: Vec<Vector> = (0..4)
            .map(|_| Vector::from_vec(vec![rng.gen_range(-1.0..1.0), 0.0]))
            .collect();
        let (_, tape) = gru_run(&w, &xs, &HiddenState::zeros(3)).unwrap();
        let grad_h: Vec<Vector> = (0..4)
            .map(|_| Vector::from_fn(3, |_| rng.gen_range(-1.0..1.0)))
            .collect();
        let (grads, _) = gru_backward(&w, &tape, &grad_h).unwrap();
        for j in 0..3 {
            assert_eq!(grads.w_ir[(j, 1)], 0.0);
            assert_eq!(grads.w_iz[(j, 1)], 0.0);
            assert_eq!(grads.w_ic[(j, 1)], 0.0);
        }
    }

    #[test]
    fn backward_length_mismatch_is_an_error() {
        let (w, xs, h0) = random_setup(5, 2, 2, 3);
        let (_, tape) = gru_run(&w, &xs, &h0).unwrap();
        assert!(gru_backward(&w, &tape, &[Vector::zeros(2)]).is_err());
    }

    #[test]
    fn param_roundtrip_covers_all_tensors() {
        let (mut w, _, _) = random_setup(11, 3, 4, 0);
        let n = w.param_count();
        assert_eq!(n, 3 * (4 * 3) + 3 * (4 * 4) + 6 * 4);
        for i in 0..n {
            let v = w.param_get(i);
            w.param_set(i, v + 1.0);
            assert_eq!(w.param_get(i), v + 1.0);
            w.param_set(i, v);
        }
    }
}
