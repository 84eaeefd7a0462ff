//! Fidelity-ensemble expressibility: the KL divergence between the binned
//! circuit fidelity distribution and the exact Haar one, plus the
//! frame-potential deviation `E[F^t] − E_Haar[F^t]`.
//!
//! For Haar-random states in dimension `d`, `P(F) = (d−1)(1−F)^(d−2)`, so the
//! mass of a bin `[lo, hi)` is `(1−lo)^(d−1) − (1−hi)^(d−1)`. At `d = 256`
//! the upper bins fall far below `f64::MIN_POSITIVE`, so masses are carried
//! as logarithms.

use serde::{Deserialize, Serialize};

use crate::circuit::{compile, CircuitSpec};
use crate::error::{invalid, Error, Result};
use crate::exec::{mean, pairwise_sum, Execution};
use crate::oracle::HaarSampler;
use crate::sampling::{Interval, ParameterSampler};

pub const DEFAULT_BINS: usize = 75;

/// Fidelities above `1 + FIDELITY_SLACK` are rejected as invalid data.
pub const FIDELITY_SLACK: f64 = 1e-9;

/// `E_Haar[F^t] = t!(d−1)!/(t+d−1)!`.
pub fn haar_fidelity_moment(d: usize, t: u32) -> f64 {
    (1..=t).fold(1.0, |acc, k| acc * k as f64 / ((d - 1) as f64 + k as f64))
}

/// Natural log of the Haar fidelity mass of each of `n_bins` uniform bins.
pub fn haar_bin_log_masses(d: usize, n_bins: usize) -> Vec<f64> {
    let power = (d - 1) as f64;
    (0..n_bins)
        .map(|k| {
            let lo = k as f64 / n_bins as f64;
            let hi = (k + 1) as f64 / n_bins as f64;
            let head = power * (1.0 - lo).ln();
            if k + 1 == n_bins {
                return head;
            }
            // ln(1 − r^(d−1)) with r = (1−hi)/(1−lo)
            let x = power * ((1.0 - hi) / (1.0 - lo)).ln();
            head + (-x.exp_m1()).ln()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityHistogram {
    pub dim: usize,
    pub counts: Vec<u64>,
    pub empirical_mass: Vec<f64>,
    /// May underflow to 0 at large `dim`; see `haar_log_mass`.
    pub haar_mass: Vec<f64>,
    pub haar_log_mass: Vec<f64>,
}

impl FidelityHistogram {
    pub fn from_fidelities(fidelities: &[f64], dim: usize, n_bins: usize) -> Result<Self> {
        if n_bins < 2 {
            return Err(invalid(format!("need at least 2 bins, got {n_bins}")));
        }
        if dim < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {dim}")));
        }
        if fidelities.is_empty() {
            return Err(Error::Data("no fidelities".into()));
        }
        let mut counts = vec![0u64; n_bins];
        for (i, &f) in fidelities.iter().enumerate() {
            if !(0.0..=1.0 + FIDELITY_SLACK).contains(&f) {
                return Err(Error::Data(format!("fidelity #{i} = {f} outside [0, 1]")));
            }
            let bin = ((f.min(1.0) * n_bins as f64) as usize).min(n_bins - 1);
            counts[bin] += 1;
        }
        let total = fidelities.len() as f64;
        let haar_log_mass = haar_bin_log_masses(dim, n_bins);
        Ok(Self {
            dim,
            empirical_mass: counts.iter().map(|&c| c as f64 / total).collect(),
            haar_mass: haar_log_mass.iter().map(|l| l.exp()).collect(),
            haar_log_mass,
            counts,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    /// `[lo, hi)` edges of bin `k` (the last bin includes 1).
    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        let b = self.n_bins() as f64;
        (k as f64 / b, (k + 1) as f64 / b)
    }

    /// `Σ p ln(p/q)` over bins with `p > 0`, in nats.
    pub fn kl_divergence(&self) -> f64 {
        let terms: Vec<f64> = self
            .empirical_mass
            .iter()
            .zip(&self.haar_log_mass)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, log_q)| p * (p.ln() - log_q))
            .collect();
        pairwise_sum(&terms).max(0.0)
    }
}

pub fn kl_expressibility(fidelities: &[f64], dim: usize, n_bins: usize) -> Result<f64> {
    Ok(FidelityHistogram::from_fidelities(fidelities, dim, n_bins)?.kl_divergence())
}

fn check_states(n_states: usize) -> Result<()> {
    if n_states < 2 || !n_states.is_multiple_of(2) {
        return Err(invalid(format!("state count must be even and ≥ 2, got {n_states}")));
    }
    Ok(())
}

/// Runs the circuit for `n_states` parameter draws and returns the
/// fidelities of the disjoint pairs `(2i, 2i+1)`.
pub fn sample_fidelities(
    spec: &CircuitSpec,
    n_states: usize,
    sampler: &ParameterSampler,
    exec: Execution,
) -> Result<Vec<f64>> {
    check_states(n_states)?;
    let seq = compile(spec)?;
    exec.try_map(n_states / 2, |i| {
        let i = i as u64;
        let a = seq.run(&sampler.draw(2 * i, seq.n_params()))?;
        let b = seq.run(&sampler.draw(2 * i + 1, seq.n_params()))?;
        a.fidelity(&b)
    })
}

/// Pair fidelities of `n_states` Haar-random states.
pub fn haar_sample_fidelities(sampler: &HaarSampler, n_states: usize, exec: Execution) -> Result<Vec<f64>> {
    check_states(n_states)?;
    exec.try_map(n_states / 2, |i| {
        let i = i as u64;
        sampler.state(2 * i).fidelity(&sampler.state(2 * i + 1))
    })
}

/// `mean(F^t) − E_Haar[F^t]` for fidelities sampled in dimension `dim`.
pub fn tdesign_deviation_from_fidelities(fidelities: &[f64], dim: usize, t: u32) -> Result<f64> {
    if t == 0 {
        return Err(invalid("t-design order must be ≥ 1"));
    }
    if fidelities.is_empty() {
        return Err(Error::Data("no fidelities".into()));
    }
    let powered: Vec<f64> = fidelities.iter().map(|f| f.powi(t as i32)).collect();
    Ok(mean(&powered) - haar_fidelity_moment(dim, t))
}

pub fn tdesign_deviation(
    spec: &CircuitSpec,
    t: u32,
    n_states: usize,
    sampler: &ParameterSampler,
    exec: Execution,
) -> Result<f64> {
    if t == 0 {
        return Err(invalid("t-design order must be ≥ 1"));
    }
    let fids = sample_fidelities(spec, n_states, sampler, exec)?;
    tdesign_deviation_from_fidelities(&fids, spec.dim(), t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpressibilityResult {
    pub spec: CircuitSpec,
    pub kl_nats: f64,
    pub n_states: usize,
    pub n_fidelities: usize,
    pub seed: u64,
}

impl ExpressibilityResult {
    pub fn compute(
        spec: &CircuitSpec,
        n_states: usize,
        n_bins: usize,
        seed: u64,
        interval: Interval,
        exec: Execution,
    ) -> Result<Self> {
        let sampler = ParameterSampler::for_spec(spec, seed, interval);
        let fids = sample_fidelities(spec, n_states, &sampler, exec)?;
        Ok(Self {
            spec: *spec,
            kl_nats: kl_expressibility(&fids, spec.dim(), n_bins)?,
            n_states,
            n_fidelities: fids.len(),
            seed,
        })
    }
}
