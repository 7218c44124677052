//! Evaluation metrics: scale-invariant SNR and the Mann-Whitney U test.

use crate::dsp::AudioBuffer;
use crate::error::{Error, Result};

/// A named metric value.
#[derive(Clone, Debug)]
pub struct MetricResult {
    pub name: String,
    pub value: f64,
    pub higher_is_better: bool,
}

/// SISNR value used when the projection residual is exactly zero.
pub const SISNR_CAP_DB: f64 = 100.0;

/// Scale-invariant signal-to-noise ratio in dB.
///
/// Both signals are mean-centered, the estimate is projected onto the
/// reference (`s_target = (<e,r>/<r,r>) r`), and the value is
/// `10 log10(|s_target|^2 / |e - s_target|^2)`, capped at +-100 dB so
/// aggregates stay finite.
pub fn sisnr(estimate: &AudioBuffer, reference: &AudioBuffer) -> Result<MetricResult> {
    if estimate.len() != reference.len() {
        return Err(Error::dim(
            "sisnr",
            format!("estimate {} samples", estimate.len()),
            format!("reference {} samples", reference.len()),
        ));
    }
    if reference.is_empty() {
        return Err(Error::Empty("reference signal"));
    }
    let center = |x: &AudioBuffer| {
        let mean = x.samples.iter().sum::<f64>() / x.len() as f64;
        x.samples.iter().map(|&v| v - mean).collect::<Vec<f64>>()
    };
    let e = center(estimate);
    let r = center(reference);
    let rr: f64 = r.iter().map(|&v| v * v).sum();
    if rr == 0.0 {
        return Err(Error::SilentSignal("reference"));
    }
    let er: f64 = e.iter().zip(r.iter()).map(|(&a, &b)| a * b).sum();
    let alpha = er / rr;
    let target_energy = alpha * alpha * rr;
    let residual_energy: f64 = e
        .iter()
        .zip(r.iter())
        .map(|(&ev, &rv)| {
            let d = ev - alpha * rv;
            d * d
        })
        .sum();
    let value = if residual_energy == 0.0 {
        SISNR_CAP_DB
    } else if target_energy == 0.0 {
        -SISNR_CAP_DB
    } else {
        (10.0 * (target_energy / residual_energy).log10()).clamp(-SISNR_CAP_DB, SISNR_CAP_DB)
    };
    Ok(MetricResult {
        name: "sisnr".into(),
        value,
        higher_is_better: true,
    })
}

/// How a U-test p-value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UTestMethod {
    /// Full enumeration of rank arrangements (small tie-free samples).
    Exact,
    /// Normal approximation with tie and continuity corrections.
    NormalApprox,
}

/// Two-sided Mann-Whitney U result. `u_statistic` is U of the first sample.
#[derive(Clone, Debug)]
pub struct UTestResult {
    pub u_statistic: f64,
    pub p_value: f64,
    pub method: UTestMethod,
}

/// Combined sample size at or below which the tie-free exact test is used.
pub const EXACT_CUTOFF: usize = 16;

/// Two-sided Mann-Whitney U test.
///
/// U comes from rank sums with average ranks for ties. The p-value is exact
/// (enumeration over all C(n, n1) rank arrangements) when the combined size
/// is at most [`EXACT_CUTOFF`] and there are no ties, otherwise a normal
/// approximation with tie correction and continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<UTestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("sample"));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("u-test sample"));
    }
    let n1 = a.len();
    let n2 = b.len();
    let n = n1 + n2;

    // Pool, sort, assign average ranks for ties.
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite values"));
    let mut rank_sum_a = 0.0;
    let mut tie_sizes: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1 ..= j
        for entry in &pooled[i..j] {
            if entry.1 {
                rank_sum_a += avg_rank;
            }
        }
        if j - i > 1 {
            tie_sizes.push(j - i);
        }
        i = j;
    }
    let u1 = rank_sum_a - (n1 * (n1 + 1)) as f64 / 2.0;

    if n <= EXACT_CUTOFF && tie_sizes.is_empty() {
        let p = exact_two_sided_p(n1, n2, u1);
        return Ok(UTestResult {
            u_statistic: u1,
            p_value: p,
            method: UTestMethod::Exact,
        });
    }

    let mu = (n1 * n2) as f64 / 2.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| (t * t * t - t) as f64)
        .sum::<f64>()
        / (n * (n - 1)) as f64;
    let sigma2 = (n1 * n2) as f64 / 12.0 * ((n + 1) as f64 - tie_term);
    let p = if sigma2 <= 0.0 {
        1.0 // all observations tied; the test cannot discriminate
    } else {
        let z = ((u1 - mu).abs() - 0.5).max(0.0) / sigma2.sqrt();
        (2.0 * (1.0 - normal_cdf(z))).clamp(0.0, 1.0)
    };
    Ok(UTestResult {
        u_statistic: u1,
        p_value: p,
        method: UTestMethod::NormalApprox,
    })
}

/// Two-sided exact p by enumerating every assignment of ranks to the first
/// sample: the fraction of arrangements whose U deviates from the null mean
/// at least as much as the observed one.
fn exact_two_sided_p(n1: usize, n2: usize, u_obs: f64) -> f64 {
    let n = n1 + n2;
    let mu = (n1 * n2) as f64 / 2.0;
    let dev = (u_obs - mu).abs();
    let base = (n1 * (n1 + 1)) as f64 / 2.0;
    let mut comb: Vec<usize> = (0..n1).collect();
    let mut hits = 0u64;
    let mut total = 0u64;
    loop {
        let rank_sum: usize = comb.iter().map(|&pos| pos + 1).sum();
        let u = rank_sum as f64 - base;
        if (u - mu).abs() >= dev - 1e-9 {
            hits += 1;
        }
        total += 1;
        // Next lexicographic combination of n1 positions out of n.
        let mut k = n1;
        loop {
            if k == 0 {
                return hits as f64 / total as f64;
            }
            k -= 1;
            if comb[k] != k + n - n1 {
                break;
            }
        }
        comb[k] += 1;
        for idx in k + 1..n1 {
            comb[idx] = comb[idx - 1] + 1;
        }
    }
}

/// Standard normal CDF.
fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// One experimental setup's metric samples.
#[derive(Clone, Debug)]
pub struct RunSamples {
    pub label: String,
    pub values: Vec<f64>,
}

impl RunSamples {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        RunSamples {
            label: label.into(),
            values,
        }
    }
}

/// Symmetric table of pairwise two-sided p-values.
#[derive(Clone, Debug)]
pub struct PValueTable {
    labels: Vec<String>,
    p: Vec<f64>, // n x n, row-major; diagonal is the self-comparison
}

impl PValueTable {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.labels.len() + j]
    }

    /// Unique unordered pairs `(i, j, p)` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                out.push((i, j, self.p(i, j)));
            }
        }
        out
    }
}

/// Pairwise two-sided U tests between every pair of setups. All setups must
/// carry the same number of trials.
pub fn compare_runs(runs: &[RunSamples]) -> Result<PValueTable> {
    if runs.len() < 2 {
        return Err(Error::InvalidConfig {
            what: "compare_runs",
            details: format!("need at least 2 setups, got {}", runs.len()),
        });
    }
    let count = runs[0].values.len();
    for r in runs {
        if r.values.len() != count {
            return Err(Error::dim(
                "compare_runs",
                format!("{} trials in {}", count, runs[0].label),
                format!("{} trials in {}", r.values.len(), r.label),
            ));
        }
    }
    let n = runs.len();
    let mut p = vec![1.0; n * n];
    for i in 0..n {
        for j in i..n {
            let val = mann_whitney_u(&runs[i].values, &runs[j].values)?.p_value;
            p[i * n + j] = val;
            p[j * n + i] = val;
        }
    }
    Ok(PValueTable {
        labels: runs.iter().map(|r| r.label.clone()).collect(),
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::SAMPLE_RATE;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn buf(v: Vec<f64>) -> AudioBuffer {
        AudioBuffer::new(v, SAMPLE_RATE)
    }

    fn noise(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn identical_signals_hit_the_cap() {
        let r = buf(noise(256, 1));
        let m = sisnr(&r, &r).unwrap();
        assert_eq!(m.value, SISNR_CAP_DB);
        assert!(m.higher_is_better);
    }

    #[test]
    fn scaling_the_estimate_changes_nothing() {
        let r = buf(noise(256, 2));
        let scaled = buf(r.samples.iter().map(|&v| 2.0 * v).collect());
        assert_eq!(sisnr(&scaled, &r).unwrap().value, SISNR_CAP_DB);

        let e = buf(noise(256, 3));
        let base = sisnr(&e, &r).unwrap().value;
        for c in [0.1, -1.0, 37.0] {
            let ce = buf(e.samples.iter().map(|&v| c * v).collect());
            assert!((sisnr(&ce, &r).unwrap().value - base).abs() < 1e-9, "c={c}");
        }
    }

    #[test]
    fn orthogonal_noise_of_equal_power_gives_zero_db() {
        // Build r zero-mean, then n orthogonal to r (Gram-Schmidt), scaled
        // to equal energy; the projection leaves exactly the noise behind.
        let raw = noise(512, 4);
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let r: Vec<f64> = raw.iter().map(|&v| v - mean).collect();
        let mut n = noise(512, 5);
        let nm = n.iter().sum::<f64>() / n.len() as f64;
        for v in n.iter_mut() {
            *v -= nm;
        }
        let rr: f64 = r.iter().map(|&v| v * v).sum();
        let nr: f64 = n.iter().zip(r.iter()).map(|(&a, &b)| a * b).sum();
        for (nv, &rv) in n.iter_mut().zip(r.iter()) {
            *nv -= nr / rr * rv;
        }
        let nn: f64 = n.iter().map(|&v| v * v).sum();
        let g = (rr / nn).sqrt();
        let e: Vec<f64> = r.iter().zip(n.iter()).map(|(&rv, &nv)| rv + g * nv).collect();
        let v = sisnr(&buf(e), &buf(r)).unwrap().value;
        assert!(v.abs() < 1e-9, "{v} dB");
    }

    #[test]
    fn constant_shift_of_both_signals_is_ignored() {
        let r = buf(noise(256, 6));
        let e = buf(noise(256, 7));
        let base = sisnr(&e, &r).unwrap().value;
        let shift = |x: &AudioBuffer| buf(x.samples.iter().map(|&v| v + 0.7).collect());
        assert!((sisnr(&shift(&e), &shift(&r)).unwrap().value - base).abs() < 1e-9);
    }

    #[test]
    fn silent_reference_is_an_error() {
        let r = buf(vec![0.0; 64]);
        let e = buf(noise(64, 8));
        assert!(sisnr(&e, &r).is_err());
        // Constant reference centers to zero: silent too.
        let c = buf(vec![0.5; 64]);
        assert!(sisnr(&e, &c).is_err());
    }

    #[test]
    fn disjoint_samples_exact_p() {
        let a = [1.0, 2.0, 3.0];
        let b = [10.0, 11.0, 12.0];
        let res = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(res.method, UTestMethod::Exact);
        assert_eq!(res.u_statistic, 0.0);
        assert!((res.p_value - 0.1).abs() < 1e-12, "p = {}", res.p_value);
        assert!(res.p_value >= 0.05); // 3 vs 3 can never reach significance
    }

    #[test]
    fn identical_multisets_are_not_significant() {
        let a = [5.0, 6.0, 7.0, 8.0];
        let res = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(res.method, UTestMethod::NormalApprox); // ties force approx
        assert!(res.p_value >= 0.9, "p = {}", res.p_value);
    }

    #[test]
    fn all_equal_values_give_p_one() {
        let a = [3.0; 5];
        let b = [3.0; 5];
        let res = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn clearly_separated_large_samples_are_significant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a: Vec<f64> = (0..60).map(|_| rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..60).map(|_| rng.gen_range(0.8..1.8)).collect();
        let res = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(res.method, UTestMethod::NormalApprox);
        assert!(res.p_value < 0.05, "p = {}", res.p_value);
    }

    #[test]
    fn swapping_samples_keeps_two_sided_p() {
        let a = [0.3, 1.9, 2.2, 0.1, 4.5];
        let b = [2.0, 2.1, 3.3, 0.9];
        let ab = mann_whitney_u(&a, &b).unwrap();
        let ba = mann_whitney_u(&b, &a).unwrap();
        assert!((ab.p_value - ba.p_value).abs() < 1e-12);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
        assert!(mann_whitney_u(&[1.0], &[]).is_err());
    }

    /// Brute-force enumeration over position bitmasks, computing U by direct
    /// pairwise comparison of the pooled values. Independent of the rank
    /// arithmetic in the implementation.
    fn brute_force_two_sided_p(a: &[f64], b: &[f64]) -> f64 {
        let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        pooled.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let n = pooled.len();
        let n1 = a.len();
        let u_of = |mask: u32| -> f64 {
            let mut u = 0.0;
            for i in 0..n {
                if mask & (1 << i) == 0 {
                    continue;
                }
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    if pooled[i] > pooled[j] {
                        u += 1.0;
                    }
                }
            }
            u
        };
        // Observed U from the actual samples.
        let mut u_obs = 0.0;
        for &x in a {
            for &y in b {
                if x > y {
                    u_obs += 1.0;
                }
            }
        }
        let mu = (a.len() * b.len()) as f64 / 2.0;
        let dev = (u_obs - mu).abs();
        let mut hits = 0u64;
        let mut total = 0u64;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n1 {
                continue;
            }
            total += 1;
            if (u_of(mask) - mu).abs() >= dev - 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    proptest! {
        /// Exact-mode p-values match the bitmask brute force for all splits
        /// with combined n <= 10 (tie-free by construction).
        #[test]
        fn exact_mode_matches_brute_force(
            n1 in 1usize..=9,
            n2 in 1usize..=9,
            seed in 0u64..500,
        ) {
            prop_assume!(n1 + n2 <= 10);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (0..n1).map(|_| rng.gen_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..n2).map(|_| rng.gen_range(0.0..1.0)).collect();
            let res = mann_whitney_u(&a, &b).unwrap();
            prop_assert_eq!(res.method, UTestMethod::Exact);
            let want = brute_force_two_sided_p(&a, &b);
            prop_assert!((res.p_value - want).abs() < 1e-12,
                "impl {} vs oracle {}", res.p_value, want);
        }
    }

    #[test]
    fn compare_runs_table_shape_and_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let runs: Vec<RunSamples> = (0..4)
            .map(|i| {
                RunSamples::new(
                    format!("P{}", 100 - 25 * i),
                    (0..30)
                        .map(|_| rng.gen_range(0.0..1.0) + i as f64 * 0.02)
                        .collect(),
                )
            })
            .collect();
        let table = compare_runs(&runs).unwrap();
        assert_eq!(table.pairs().len(), 6);
        for i in 0..4 {
            assert!(table.p(i, i) >= 0.9);
            for j in 0..4 {
                assert_eq!(table.p(i, j), table.p(j, i));
            }
        }
    }

    #[test]
    fn compare_runs_disjoint_ranges_significant() {
        let a = RunSamples::new("lo", (0..20).map(|i| i as f64 * 0.01).collect());
        let b = RunSamples::new("hi", (0..20).map(|i| 5.0 + i as f64 * 0.01).collect());
        let table = compare_runs(&[a, b]).unwrap();
        assert!(table.p(0, 1) < 0.05);
    }

    #[test]
    fn compare_runs_rejects_mismatched_counts() {
        let a = RunSamples::new("a", vec![1.0, 2.0]);
        let b = RunSamples::new("b", vec![1.0]);
        assert!(compare_runs(&[a, b]).is_err());
    }
}
