//! Dynamic GRU: select-gate computation and selective neuron update.
//!
//! Each step computes the update gate `z` densely, ranks neurons by it, and
//! runs the reset-gate/candidate/blend computations only for the selected
//! rows. Unselected neurons keep their previous value bit-exactly, and their
//! row computations never happen — that is where the compute saving comes
//! from. A full selection (`P = 100`) reproduces the dense cell bit for bit.

use crate::error::{Error, Result};
use crate::rnn::{
    backward_tape, blend_row, candidate_row, gate_preact_row, update_gate_dense, GruGrads,
    GruTape, GruWeights, HiddenState, StepRecord,
};
use crate::tensor::{sigmoid, Vector};

/// How the select gate is derived from the update gate each step.
#[derive(Clone, Debug, PartialEq)]
pub enum SelectGateConfig {
    /// Update every neuron; identical to the conventional GRU.
    Dense,
    /// Update the `A = round(P/100 * J)` neurons with the largest update-gate
    /// values; `update_percent` is `P` in `[0, 100]`.
    TopA { update_percent: f64 },
    /// Update neuron `j` iff `z[j] > theta[j]` (strict). The per-step update
    /// count varies, so hardware must still provision for the dense load.
    Threshold { theta: Vector },
}

impl SelectGateConfig {
    pub fn top_a(update_percent: f64) -> Self {
        SelectGateConfig::TopA { update_percent }
    }

    /// Threshold gate with the same `theta` for every neuron. The midpoint
    /// 0.5 is the default when nothing better is known.
    pub fn threshold_uniform(theta: f64, hidden_dim: usize) -> Self {
        SelectGateConfig::Threshold {
            theta: Vector::from_fn(hidden_dim, |_| theta),
        }
    }

    pub fn validate(&self, hidden_dim: usize) -> Result<()> {
        match self {
            SelectGateConfig::Dense => Ok(()),
            SelectGateConfig::TopA { update_percent } => {
                if !update_percent.is_finite() || !(0.0..=100.0).contains(update_percent) {
                    return Err(Error::InvalidConfig {
                        what: "update percent",
                        details: format!("{update_percent} not in [0, 100]"),
                    });
                }
                Ok(())
            }
            SelectGateConfig::Threshold { theta } => {
                if theta.len() != hidden_dim {
                    return Err(Error::dim(
                        "threshold gate",
                        format!("theta len {}", theta.len()),
                        format!("hidden {hidden_dim}"),
                    ));
                }
                for j in 0..theta.len() {
                    if !(0.0..=1.0).contains(&theta[j]) {
                        return Err(Error::InvalidConfig {
                            what: "threshold",
                            details: format!("theta[{j}] = {} not in [0, 1]", theta[j]),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Per-step update count for top-A mode: `round(P/100 * J)`, ties away
    /// from zero. `None` for the other modes.
    pub fn update_count(&self, hidden_dim: usize) -> Option<usize> {
        match self {
            SelectGateConfig::TopA { update_percent } => {
                Some((update_percent / 100.0 * hidden_dim as f64).round() as usize)
            }
            _ => None,
        }
    }
}

/// Binary select gate: 1 marks a neuron to update this step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectGate {
    bits: Vec<bool>,
}

impl SelectGate {
    pub fn zeros(len: usize) -> Self {
        SelectGate {
            bits: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        SelectGate {
            bits: vec![true; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        SelectGate { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_set(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize) {
        self.bits[j] = true;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of selected neurons, increasing.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
    }
}

/// Per-step update statistics and exact MAC counts.
///
/// `matvec_macs` counts one MAC per multiply inside matrix-vector rows: the
/// dense update gate costs `J*(I+J)` and each selected row adds `2*(I+J)`
/// for its reset-gate and candidate rows. `elementwise_macs` is the fixed
/// `3*J` per-step budget of the dense cell's Hadamard products.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepStats {
    pub updated_count: usize,
    pub update_percent: f64,
    pub matvec_macs: u64,
    pub elementwise_macs: u64,
}

impl StepStats {
    /// Total MACs charged to this step.
    pub fn macs_this_step(&self) -> u64 {
        self.matvec_macs + self.elementwise_macs
    }
}

/// Marks the `a` largest values of `z`; ties broken toward the lower index.
/// Average cost is linear in `z.len()` (selection, not a full sort).
pub fn select_top_a(z: &Vector, a: usize) -> Result<SelectGate> {
    let n = z.len();
    if a > n {
        return Err(Error::GateCountOutOfRange {
            requested: a,
            len: n,
        });
    }
    if !z.is_finite() {
        return Err(Error::NonFinite("select gate input"));
    }
    if a == 0 {
        return Ok(SelectGate::zeros(n));
    }
    if a == n {
        return Ok(SelectGate::ones(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    // "i before j" means z[i] larger, or equal with i the lower index.
    order.select_nth_unstable_by(a - 1, |&i, &j| {
        z[j].partial_cmp(&z[i])
            .expect("finite values")
            .then(i.cmp(&j))
    });
    let mut gate = SelectGate::zeros(n);
    for &i in &order[..a] {
        gate.set(i);
    }
    Ok(gate)
}

/// Marks neuron `j` iff `z[j] > theta[j]` (strict).
pub fn select_threshold(z: &Vector, theta: &Vector) -> Result<SelectGate> {
    if z.len() != theta.len() {
        return Err(Error::dim(
            "select_threshold",
            format!("z len {}", z.len()),
            format!("theta len {}", theta.len()),
        ));
    }
    Ok(SelectGate::from_bits(
        (0..z.len()).map(|j| z[j] > theta[j]).collect(),
    ))
}

/// Derives the select gate from the update-gate activations per `cfg`.
pub fn derive_gate(z: &Vector, cfg: &SelectGateConfig) -> Result<SelectGate> {
    match cfg {
        SelectGateConfig::Dense => Ok(SelectGate::ones(z.len())),
        SelectGateConfig::TopA { .. } => {
            let a = cfg.update_count(z.len()).expect("top-a mode");
            select_top_a(z, a)
        }
        SelectGateConfig::Threshold { theta } => select_threshold(z, theta),
    }
}

/// Selective update given an already-derived gate. `z` must be the dense
/// update gate for this step.
fn step_with_gate(
    w: &GruWeights,
    x: &Vector,
    h_prev: &Vector,
    z: Vector,
    gate: SelectGate,
) -> (HiddenState, StepRecord, StepStats) {
    let i_dim = w.input_dim();
    let j_dim = w.hidden_dim();
    let mut h = h_prev.clone();
    let mut r = Vector::zeros(j_dim);
    let mut c = Vector::zeros(j_dim);
    let mut cand_rec = Vector::zeros(j_dim);
    let mut updated = 0usize;
    for j in 0..j_dim {
        if !gate.is_set(j) {
            continue; // h[j] already holds h_prev[j]
        }
        let r_j = sigmoid(gate_preact_row(&w.w_ir, &w.b_ir, &w.w_hr, &w.b_hr, x, h_prev, j));
        let (u_j, c_j) = candidate_row(w, x, h_prev, r_j, j);
        r[j] = r_j;
        cand_rec[j] = u_j;
        c[j] = c_j;
        h[j] = blend_row(z[j], c_j, h_prev[j]);
        updated += 1;
    }
    let stats = StepStats {
        updated_count: updated,
        update_percent: updated as f64 / j_dim as f64 * 100.0,
        matvec_macs: ((j_dim + 2 * updated) * (i_dim + j_dim)) as u64,
        elementwise_macs: 3 * j_dim as u64,
    };
    let record = StepRecord {
        x: x.clone(),
        h_prev: h_prev.clone(),
        r,
        z,
        c,
        cand_rec,
        gate: gate.clone(),
    };
    let state = HiddenState { h, g_last: gate };
    (state, record, stats)
}

fn check_step(w: &GruWeights, x: &Vector, state: &HiddenState) -> Result<()> {
    if x.len() != w.input_dim() {
        return Err(Error::dim(
            "dgru step input",
            format!("len {}", x.len()),
            format!("expected {}", w.input_dim()),
        ));
    }
    if state.h.len() != w.hidden_dim() {
        return Err(Error::dim(
            "dgru step state",
            format!("len {}", state.h.len()),
            format!("expected {}", w.hidden_dim()),
        ));
    }
    Ok(())
}

/// One selective-update step: dense `z`, gate derived per `cfg`, then
/// row-wise updates only where the gate is set.
pub fn dgru_step(
    w: &GruWeights,
    x: &Vector,
    state: &HiddenState,
    cfg: &SelectGateConfig,
) -> Result<(HiddenState, StepStats)> {
    check_step(w, x, state)?;
    cfg.validate(w.hidden_dim())?;
    let z = update_gate_dense(w, x, &state.h);
    let gate = derive_gate(&z, cfg)?;
    let (next, _, stats) = step_with_gate(w, x, &state.h, z, gate);
    Ok((next, stats))
}

/// Like [`dgru_step`] but with an externally pinned gate; used to hold
/// the selection pattern fixed (finite-difference checks, replay).
pub fn dgru_step_pinned(
    w: &GruWeights,
    x: &Vector,
    state: &HiddenState,
    gate: &SelectGate,
) -> Result<(HiddenState, StepStats)> {
    check_step(w, x, state)?;
    if gate.len() != w.hidden_dim() {
        return Err(Error::dim(
            "dgru pinned gate",
            format!("len {}", gate.len()),
            format!("expected {}", w.hidden_dim()),
        ));
    }
    let z = update_gate_dense(w, x, &state.h);
    let (next, _, stats) = step_with_gate(w, x, &state.h, z, gate.clone());
    Ok((next, stats))
}

/// Runs the selective cell over a sequence. The tape records the dense `z`
/// and the derived gate for every step.
pub fn dgru_run(
    w: &GruWeights,
    xs: &[Vector],
    h0: &HiddenState,
    cfg: &SelectGateConfig,
) -> Result<(Vec<HiddenState>, GruTape, Vec<StepStats>)> {
    cfg.validate(w.hidden_dim())?;
    run_inner(w, xs, h0, |z| derive_gate(z, cfg))
}

/// Runs with one pre-chosen gate per step instead of deriving them from `z`.
pub fn dgru_run_pinned(
    w: &GruWeights,
    xs: &[Vector],
    h0: &HiddenState,
    gates: &[SelectGate],
) -> Result<(Vec<HiddenState>, GruTape, Vec<StepStats>)> {
    if gates.len() != xs.len() {
        return Err(Error::dim(
            "dgru pinned run",
            format!("{} inputs", xs.len()),
            format!("{} gates", gates.len()),
        ));
    }
    let mut t = 0usize;
    run_inner(w, xs, h0, |_| {
        let g = gates[t].clone();
        t += 1;
        Ok(g)
    })
}

fn run_inner(
    w: &GruWeights,
    xs: &[Vector],
    h0: &HiddenState,
    mut gate_for: impl FnMut(&Vector) -> Result<SelectGate>,
) -> Result<(Vec<HiddenState>, GruTape, Vec<StepStats>)> {
    if h0.h.len() != w.hidden_dim() {
        return Err(Error::dim(
            "dgru run state",
            format!("len {}", h0.h.len()),
            format!("expected {}", w.hidden_dim()),
        ));
    }
    let mut states = Vec::with_capacity(xs.len());
    let mut stats = Vec::with_capacity(xs.len());
    let mut tape = GruTape::default();
    let mut h = h0.h.clone();
    for x in xs {
        if x.len() != w.input_dim() {
            return Err(Error::dim(
                "dgru run input",
                format!("len {}", x.len()),
                format!("expected {}", w.input_dim()),
            ));
        }
        let z = update_gate_dense(w, x, &h);
        let gate = gate_for(&z)?;
        if gate.len() != w.hidden_dim() {
            return Err(Error::dim(
                "dgru run gate",
                format!("len {}", gate.len()),
                format!("expected {}", w.hidden_dim()),
            ));
        }
        let (state, record, s) = step_with_gate(w, x, &h, z, gate);
        h = state.h.clone();
        states.push(state);
        stats.push(s);
        tape.steps.push(record);
    }
    Ok((states, tape, stats))
}

/// BPTT over a selective-update tape. The recorded selection is treated as
/// a constant: selected coordinates differentiate through the full update,
/// unselected ones propagate identity and add no weight gradients.
pub fn dgru_backward(
    w: &GruWeights,
    tape: &GruTape,
    grad_h: &[Vector],
) -> Result<(GruGrads, Vec<Vector>)> {
    backward_tape(w, tape, grad_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rnn::{gru_run, gru_step};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
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

    /// Full-sort selection oracle with the same tie rule.
    fn top_a_by_sort(z: &Vector, a: usize) -> SelectGate {
        let mut idx: Vec<usize> = (0..z.len()).collect();
        idx.sort_by(|&i, &j| z[j].partial_cmp(&z[i]).unwrap().then(i.cmp(&j)));
        let mut gate = SelectGate::zeros(z.len());
        for &i in &idx[..a] {
            gate.set(i);
        }
        gate
    }

    #[test]
    fn top_a_tie_resolves_to_lower_index() {
        let z = Vector::from_vec(vec![0.9, 0.1, 0.5, 0.5]);
        let gate = select_top_a(&z, 2).unwrap();
        let bits: Vec<bool> = (0..4).map(|j| gate.is_set(j)).collect();
        assert_eq!(bits, vec![true, false, true, false]);
        assert_eq!(gate, top_a_by_sort(&z, 2));
    }

    #[test]
    fn top_a_extremes() {
        let z = Vector::from_vec(vec![0.2, 0.8, 0.5]);
        assert_eq!(select_top_a(&z, 3).unwrap(), SelectGate::ones(3));
        assert_eq!(select_top_a(&z, 0).unwrap(), SelectGate::zeros(3));
        assert!(select_top_a(&z, 4).is_err());
    }

    #[test]
    fn threshold_gate_strict_comparison() {
        let z = Vector::from_vec(vec![0.3, 0.7]);
        let theta = Vector::from_vec(vec![0.5, 0.5]);
        let g = select_threshold(&z, &theta).unwrap();
        assert!(!g.is_set(0) && g.is_set(1));

        // Sigmoid outputs never exceed 1, so theta = 1 selects nothing.
        let ones = Vector::from_vec(vec![1.0, 1.0]);
        assert_eq!(select_threshold(&z, &ones).unwrap().count_ones(), 0);
        let zeros_t = Vector::from_vec(vec![0.0, 0.0]);
        assert_eq!(select_threshold(&z, &zeros_t).unwrap().count_ones(), 2);
        // Equality does not select.
        let eq = select_threshold(&Vector::from_vec(vec![0.5]), &Vector::from_vec(vec![0.5]));
        assert_eq!(eq.unwrap().count_ones(), 0);
    }

    #[test]
    fn update_count_rounds_half_away_from_zero() {
        let cfg = SelectGateConfig::top_a(50.0);
        assert_eq!(cfg.update_count(4), Some(2));
        assert_eq!(cfg.update_count(5), Some(3)); // 2.5 rounds up
        assert_eq!(SelectGateConfig::top_a(100.0).update_count(7), Some(7));
        assert_eq!(SelectGateConfig::top_a(0.0).update_count(7), Some(0));
    }

    #[test]
    fn p100_step_is_bit_identical_to_dense() {
        for seed in 0..30 {
            let (w, xs, h0) = random_setup(seed, 3, 5, 1);
            let dense = gru_step(&w, &xs[0], &h0).unwrap();
            let (dyn_state, stats) =
                dgru_step(&w, &xs[0], &h0, &SelectGateConfig::top_a(100.0)).unwrap();
            for j in 0..5 {
                assert_eq!(dense.h[j].to_bits(), dyn_state.h[j].to_bits());
            }
            assert_eq!(stats.updated_count, 5);
            let (dense_mode, _) = dgru_step(&w, &xs[0], &h0, &SelectGateConfig::Dense).unwrap();
            for j in 0..5 {
                assert_eq!(dense.h[j].to_bits(), dense_mode.h[j].to_bits());
            }
        }
    }

    #[test]
    fn p0_holds_state_and_counts_zero_updates() {
        let (w, xs, h0) = random_setup(4, 2, 4, 1);
        let (state, stats) = dgru_step(&w, &xs[0], &h0, &SelectGateConfig::top_a(0.0)).unwrap();
        assert_eq!(state.h, h0.h);
        assert_eq!(stats.updated_count, 0);
        assert_eq!(stats.update_percent, 0.0);
        // Only the dense update-gate matvec is charged.
        assert_eq!(stats.matvec_macs, (4 * (2 + 4)) as u64);
    }

    #[test]
    fn half_selection_matches_dense_on_selected_coords() {
        for seed in 0..20 {
            let (w, xs, h0) = random_setup(200 + seed, 3, 4, 1);
            let dense = gru_step(&w, &xs[0], &h0).unwrap();
            let (state, stats) =
                dgru_step(&w, &xs[0], &h0, &SelectGateConfig::top_a(50.0)).unwrap();
            assert_eq!(stats.updated_count, 2);
            for j in 0..4 {
                if state.g_last.is_set(j) {
                    assert_eq!(state.h[j].to_bits(), dense.h[j].to_bits(), "seed {seed}");
                } else {
                    assert_eq!(state.h[j].to_bits(), h0.h[j].to_bits(), "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn run_p100_equals_dense_run() {
        let (w, xs, h0) = random_setup(77, 4, 6, 9);
        let (dense_states, _) = gru_run(&w, &xs, &h0).unwrap();
        let (dyn_states, _, _) =
            dgru_run(&w, &xs, &h0, &SelectGateConfig::top_a(100.0)).unwrap();
        for (a, b) in dense_states.iter().zip(dyn_states.iter()) {
            for j in 0..6 {
                assert_eq!(a.h[j].to_bits(), b.h[j].to_bits());
            }
        }
    }

    #[test]
    fn skipped_coordinates_constant_over_skip_intervals() {
        let (w, xs, h0) = random_setup(13, 3, 6, 5);
        let (states, tape, _) = dgru_run(&w, &xs, &h0, &SelectGateConfig::top_a(50.0)).unwrap();
        let mut prev = h0.h.clone();
        for (t, s) in states.iter().enumerate() {
            for j in 0..6 {
                if !tape.gate(t).is_set(j) {
                    assert_eq!(s.h[j].to_bits(), prev[j].to_bits(), "t {t} j {j}");
                }
            }
            prev = s.h.clone();
        }
    }

    #[test]
    fn empty_sequence_runs_empty() {
        let (w, _, h0) = random_setup(1, 2, 3, 0);
        let (states, tape, stats) =
            dgru_run(&w, &[], &h0, &SelectGateConfig::top_a(50.0)).unwrap();
        assert!(states.is_empty() && tape.is_empty() && stats.is_empty());
    }

    #[test]
    fn gate_recomputed_from_taped_z_matches_stored_gate() {
        let cfg = SelectGateConfig::top_a(50.0);
        let (w, xs, h0) = random_setup(21, 3, 8, 6);
        let (_, tape, _) = dgru_run(&w, &xs, &h0, &cfg).unwrap();
        for t in 0..tape.len() {
            let again = derive_gate(tape.update_gate(t), &cfg).unwrap();
            assert_eq!(&again, tape.gate(t), "step {t}");
        }
    }

    #[test]
    fn macs_strictly_increase_with_a() {
        let (w, xs, h0) = random_setup(2, 3, 6, 1);
        let mut last = 0u64;
        for a in 0..=6usize {
            let p = a as f64 / 6.0 * 100.0;
            let (_, stats) = dgru_step(&w, &xs[0], &h0, &SelectGateConfig::top_a(p)).unwrap();
            assert_eq!(stats.updated_count, a);
            if a > 0 {
                assert!(stats.macs_this_step() > last);
            }
            last = stats.macs_this_step();
        }
    }

    #[test]
    fn backward_p100_matches_dense_backward() {
        let (w, xs, h0) = random_setup(31, 3, 4, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let grad_h: Vec<Vector> = (0..5)
            .map(|_| Vector::from_fn(4, |_| rng.gen_range(-1.0..1.0)))
            .collect();
        let (_, dense_tape) = gru_run(&w, &xs, &h0).unwrap();
        let (dg, dx) = crate::rnn::gru_backward(&w, &dense_tape, &grad_h).unwrap();
        let (_, dyn_tape, _) = dgru_run(&w, &xs, &h0, &SelectGateConfig::top_a(100.0)).unwrap();
        let (gg, gx) = dgru_backward(&w, &dyn_tape, &grad_h).unwrap();
        for k in 0..dg.param_count() {
            assert_eq!(dg.param_get(k).to_bits(), gg.param_get(k).to_bits());
        }
        for (a, b) in dx.iter().zip(gx.iter()) {
            for k in 0..a.len() {
                assert_eq!(a[k].to_bits(), b[k].to_bits());
            }
        }
    }

    #[test]
    fn backward_p0_is_identity_with_zero_weight_grads() {
        let (w, xs, h0) = random_setup(41, 2, 3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let grad_h: Vec<Vector> = (0..4)
            .map(|_| Vector::from_fn(3, |_| rng.gen_range(-1.0..1.0)))
            .collect();
        let (_, tape, _) = dgru_run(&w, &xs, &h0, &SelectGateConfig::top_a(0.0)).unwrap();
        let (grads, grad_x) = dgru_backward(&w, &tape, &grad_h).unwrap();
        assert_eq!(grads.max_abs(), 0.0);
        for g in &grad_x {
            assert_eq!(g.max_abs(), 0.0);
        }
    }

    proptest! {
        /// Selection always matches the full-sort oracle, ties included.
        #[test]
        fn top_a_matches_sort_oracle(
            raw in proptest::collection::vec(0u8..=20, 1..24),
            frac in 0.0f64..=1.0,
        ) {
            // Coarse quantization forces plenty of duplicate values.
            let z = Vector::from_vec(raw.iter().map(|&v| v as f64 / 20.0).collect());
            let a = (frac * z.len() as f64).floor() as usize;
            let got = select_top_a(&z, a).unwrap();
            let want = top_a_by_sort(&z, a);
            prop_assert_eq!(got.count_ones(), a);
            prop_assert_eq!(got, want);
        }

        /// All-equal vectors select the lowest `a` indices.
        #[test]
        fn top_a_all_equal_prefers_low_indices(n in 1usize..16, a_frac in 0.0f64..=1.0) {
            let z = Vector::from_fn(n, |_| 0.5);
            let a = (a_frac * n as f64).floor() as usize;
            let gate = select_top_a(&z, a).unwrap();
            let selected: Vec<usize> = gate.selected().collect();
            let expect: Vec<usize> = (0..a).collect();
            prop_assert_eq!(selected, expect);
        }

        /// Cardinality is exact for every step of a top-A run.
        #[test]
        fn cardinality_exact_each_step(seed in 0u64..200, j_dim in 1usize..10, p in 0u8..=100) {
            let (w, xs, h0) = random_setup(seed, 2, j_dim, 4);
            let cfg = SelectGateConfig::top_a(p as f64);
            let a = cfg.update_count(j_dim).unwrap();
            let (_, tape, stats) = dgru_run(&w, &xs, &h0, &cfg).unwrap();
            for t in 0..tape.len() {
                prop_assert_eq!(tape.gate(t).count_ones(), a);
                prop_assert_eq!(stats[t].updated_count, a);
            }
        }
    }
}
