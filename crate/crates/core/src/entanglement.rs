//! Scott multipartite entanglement `Q_m` of pure states and its ensemble
//! statistics, with closed-form values for Haar-random (CUE) states.
//!
//! `Q_m(ψ) = 2^m/(2^m − 1) · (1 − mean_{|S|=m} Tr ρ_S²)` for `1 ≤ m ≤ ⌊n/2⌋`.
//! `Q_1` is the Meyer–Wallach measure.

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{compile, CircuitSpec};
use crate::error::{invalid, Result};
use crate::exec::{mean_and_std, pairwise_sum, Execution};
use crate::sampling::ParameterSampler;
use crate::state::StateVector;

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetPurity {
    pub subset: Vec<usize>,
    pub purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntanglementStats {
    pub m: usize,
    pub n_samples: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub cue_mean: f64,
    pub cue_std: Option<f64>,
}

impl EnsembleEntanglementStats {
    /// Statistics of already computed `Q_m` values for an `n`-qubit ensemble.
    pub fn from_values(values: &[f64], n: usize, m: usize) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("need at least 2 samples for ensemble statistics"));
        }
        let (mean, std_dev) = mean_and_std(values);
        Ok(Self {
            m,
            n_samples: values.len(),
            mean,
            std_dev,
            cue_mean: cue_mean(n, m)?,
            cue_std: if m == 1 { Some(cue_std_q1(n)?) } else { None },
        })
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.n_samples as f64).sqrt()
    }
}

fn check_order(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n / 2 {
        return Err(invalid(format!("Scott order m={m} outside 1..={} for n={n}", n / 2)));
    }
    Ok(())
}

fn check_subset(state: &StateVector, subset: &[usize]) -> Result<Vec<usize>> {
    let n = state.n_qubits();
    if subset.is_empty() {
        return Err(invalid("empty subset"));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid(format!("duplicate qubit in subset {subset:?}")));
    }
    if let Some(&q) = sorted.last().filter(|&&q| q >= n) {
        return Err(invalid(format!("qubit {q} out of range for {n} qubits")));
    }
    Ok(sorted)
}

/// `Tr ρ_S²` for the marginal of `state` on `subset`.
///
/// Amplitudes are regrouped into a `2^m × 2^(n−m)` matrix `M` (subset bits
/// by environment bits), so `ρ_S = M M†` and only `O(4^m)` memory is used.
pub fn reduced_purity(state: &StateVector, subset: &[usize]) -> Result<f64> {
    let subset = check_subset(state, subset)?;
    let n = state.n_qubits();
    let m = subset.len();
    let env_dim = 1usize << (n - m);
    let sub_dim = 1usize << m;

    let sub_masks: Vec<usize> = subset.iter().map(|&q| state.qubit_mask(q)).collect();
    let env_masks: Vec<usize> =
        (0..n).filter(|q| subset.binary_search(q).is_err()).map(|q| state.qubit_mask(q)).collect();
    let compress =
        |i: usize, masks: &[usize]| masks.iter().fold(0usize, |acc, &mask| (acc << 1) | usize::from(i & mask != 0));

    let mut grouped = vec![Complex64::new(0.0, 0.0); sub_dim * env_dim];
    for (i, amp) in state.amplitudes().iter().enumerate() {
        grouped[compress(i, &sub_masks) * env_dim + compress(i, &env_masks)] = *amp;
    }

    let row = |a: usize| &grouped[a * env_dim..(a + 1) * env_dim];
    let mut terms = Vec::with_capacity(sub_dim * (sub_dim + 1) / 2);
    for a in 0..sub_dim {
        let ra = row(a);
        let diag: f64 = ra.iter().map(|z| z.norm_sqr()).sum();
        terms.push(diag * diag);
        for b in a + 1..sub_dim {
            let rho_ab: Complex64 = ra.iter().zip(row(b)).map(|(x, y)| x * y.conj()).sum();
            terms.push(2.0 * rho_ab.norm_sqr());
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Purities of every size-`m` subset, in lexicographic subset order.
pub fn subset_purities(state: &StateVector, m: usize) -> Result<Vec<SubsetPurity>> {
    if m == 0 || m > state.n_qubits() {
        return Err(invalid(format!("subset size {m} outside 1..={}", state.n_qubits())));
    }
    (0..state.n_qubits())
        .combinations(m)
        .map(|subset| {
            let purity = reduced_purity(state, &subset)?;
            Ok(SubsetPurity { subset, purity })
        })
        .collect()
}

/// Mean linear entropies below this are rounding noise and reported as 0.
const LINEAR_ENTROPY_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Scott measure `Q_m`.
pub fn scott_q(state: &StateVector, m: usize) -> Result<f64> {
    check_order(state.n_qubits(), m)?;
    let purities: Vec<f64> = subset_purities(state, m)?.into_iter().map(|p| p.purity).collect();
    let linear_entropy = 1.0 - pairwise_sum(&purities) / purities.len() as f64;
    if linear_entropy < LINEAR_ENTROPY_FLOOR {
        return Ok(0.0);
    }
    let scale = 2f64.powi(m as i32);
    Ok(scale / (scale - 1.0) * linear_entropy)
}

/// `⟨Q_m⟩` over Haar-random `n`-qubit states: `(2^n − 2^m)/(2^n + 1)`.
pub fn cue_mean(n: usize, m: usize) -> Result<f64> {
    check_order(n, m)?;
    let d = 2f64.powi(n as i32);
    Ok((d - 2f64.powi(m as i32)) / (d + 1.0))
}

/// Standard deviation of `Q_1` over Haar-random `n`-qubit states.
pub fn cue_std_q1(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("CUE standard deviation needs n ≥ 2, got {n}")));
    }
    let d = 2f64.powi(n as i32);
    let common = (d + 3.0) * (d + 2.0) * (d + 1.0);
    let first = 6.0 * (d - 4.0) / (common * n as f64);
    let second = 18.0 * d / (common * (d + 1.0));
    Ok((first + second).sqrt())
}

/// `Q_m` of the circuit output for each of `n_samples` parameter draws,
/// in sample-index order.
pub fn sample_scott_q(
    spec: &CircuitSpec,
    m: usize,
    n_samples: usize,
    sampler: &ParameterSampler,
    exec: Execution,
) -> Result<Vec<f64>> {
    check_order(spec.n_qubits, m)?;
    let seq = compile(spec)?;
    exec.try_map(n_samples, |i| {
        let params = sampler.draw(i as u64, seq.n_params());
        scott_q(&seq.run(&params)?, m)
    })
}

pub fn ensemble_stats(
    spec: &CircuitSpec,
    m: usize,
    n_samples: usize,
    sampler: &ParameterSampler,
    exec: Execution,
) -> Result<EnsembleEntanglementStats> {
    if n_samples < 2 {
        return Err(invalid("need at least 2 samples for ensemble statistics"));
    }
    let values = sample_scott_q(spec, m, n_samples, sampler, exec)?;
    EnsembleEntanglementStats::from_values(&values, spec.n_qubits, m)
}
