//! Independent reference generators: Haar-random pure states and an explicit
//! density-matrix partial trace.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::sampling::StreamKey;
use crate::state::StateVector;

/// Largest register accepted by [`brute_force_reduced_density`].
pub const BRUTE_FORCE_MAX_QUBITS: usize = 8;

/// Haar-random state from `2^(n+1)` standard normals, normalized.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits > crate::state::MAX_QUBITS {
        return Err(Error::Capacity { n_qubits, max: crate::state::MAX_QUBITS });
    }
    let amplitudes = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(amplitudes)
}

/// Indexed stream of Haar-random states; state `i` depends only on the seed
/// and `i`.
#[derive(Clone, Debug)]
pub struct HaarSampler {
    key: StreamKey,
    n_qubits: usize,
    next: u64,
}

impl HaarSampler {
    pub fn new(seed: u64, n_qubits: usize) -> Result<Self> {
        Self::with_key(StreamKey::derive(seed, &format!("haar:{n_qubits}")), n_qubits)
    }

    pub fn with_key(key: StreamKey, n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::state::MAX_QUBITS {
            return Err(Error::Capacity { n_qubits, max: crate::state::MAX_QUBITS });
        }
        Ok(Self { key, n_qubits, next: 0 })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn state(&self, index: u64) -> StateVector {
        haar_state(&mut self.key.rng(index), self.n_qubits).expect("capacity checked")
    }
}

impl Iterator for HaarSampler {
    type Item = StateVector;

    fn next(&mut self) -> Option<StateVector> {
        let s = self.state(self.next);
        self.next += 1;
        Some(s)
    }
}

pub type DenseMatrix = Vec<Vec<Complex64>>;

/// Explicit `ρ_S = Tr_{S'} |ψ⟩⟨ψ|` built from the full `2^n × 2^n` outer
/// product. Rows and columns of the result are indexed by the subset bits
/// with the lowest listed qubit most significant.
pub fn brute_force_reduced_density(state: &StateVector, subset: &[usize]) -> Result<DenseMatrix> {
    let n = state.n_qubits();
    if n > BRUTE_FORCE_MAX_QUBITS {
        return Err(Error::Capacity { n_qubits: n, max: BRUTE_FORCE_MAX_QUBITS });
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    let duplicated = subset.windows(2).any(|w| w[0] == w[1]);
    if subset.is_empty() || duplicated || subset.iter().any(|&q| q >= n) {
        return Err(invalid(format!("bad subset {subset:?} for {n} qubits")));
    }
    let env: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
    let amps = state.amplitudes();
    let d = amps.len();
    let rho: DenseMatrix = (0..d).map(|i| (0..d).map(|j| amps[i] * amps[j].conj()).collect()).collect();

    // Full index from subset bits `a` and environment bits `e`.
    let index = |a: usize, e: usize| {
        let mut bits = vec![0usize; n];
        for (k, &q) in subset.iter().enumerate() {
            bits[q] = (a >> (subset.len() - 1 - k)) & 1;
        }
        for (k, &q) in env.iter().enumerate() {
            bits[q] = (e >> (env.len() - 1 - k)) & 1;
        }
        bits.iter().fold(0, |acc, &b| acc * 2 + b)
    };

    let sd = 1usize << subset.len();
    let ed = 1usize << env.len();
    let mut reduced = vec![vec![Complex64::new(0.0, 0.0); sd]; sd];
    for (a, row) in reduced.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            for e in 0..ed {
                *cell += rho[index(a, e)][index(b, e)];
            }
        }
    }
    Ok(reduced)
}

/// `Tr ρ²` by explicit matrix multiplication.
#[allow(clippy::needless_range_loop)]
pub fn density_purity(rho: &DenseMatrix) -> f64 {
    let d = rho.len();
    let mut trace = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            trace += rho[i][k] * rho[k][i];
        }
    }
    trace.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_matrix(rho: &DenseMatrix, expected: &[&[f64]]) {
        for (row, exp) in rho.iter().zip(expected) {
            for (z, e) in row.iter().zip(*exp) {
                assert!((z - Complex64::new(*e, 0.0)).norm() < 1e-12, "{z} vs {e}");
            }
        }
    }

    #[test]
    fn reduced_density_examples() {
        let mut bell = StateVector::zero(2).unwrap();
        bell.apply_h(0).unwrap();
        bell.apply_cnot(0, 1).unwrap();
        assert_matrix(&brute_force_reduced_density(&bell, &[0]).unwrap(), &[&[0.5, 0.0], &[0.0, 0.5]]);

        let ket01 = StateVector::basis(2, 0b01).unwrap();
        assert_matrix(&brute_force_reduced_density(&ket01, &[1]).unwrap(), &[&[0.0, 0.0], &[0.0, 1.0]]);

        let mut ghz3 = StateVector::zero(3).unwrap();
        ghz3.apply_h(0).unwrap();
        ghz3.apply_cnot(0, 1).unwrap();
        ghz3.apply_cnot(0, 2).unwrap();
        assert_matrix(
            &brute_force_reduced_density(&ghz3, &[0, 1]).unwrap(),
            &[&[0.5, 0.0, 0.0, 0.0], &[0.0; 4], &[0.0; 4], &[0.0, 0.0, 0.0, 0.5]],
        );
    }

    #[test]
    fn reduced_density_capacity() {
        let s = StateVector::zero(9).unwrap();
        assert!(matches!(brute_force_reduced_density(&s, &[0]), Err(Error::Capacity { .. })));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn reduced_density_is_hermitian_with_unit_trace() {
        let haar = HaarSampler::new(3, 5).unwrap();
        for state in haar.take(10) {
            let rho = brute_force_reduced_density(&state, &[1, 3]).unwrap();
            let trace: Complex64 = (0..4).map(|i| rho[i][i]).sum();
            assert_abs_diff_eq!(trace.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(trace.im, 0.0, epsilon = 1e-12);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((rho[i][j] - rho[j][i].conj()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn haar_states_are_normalized_and_reproducible() {
        let haar = HaarSampler::new(42, 4).unwrap();
        for i in 0..50 {
            assert_abs_diff_eq!(haar.state(i).norm_sqr(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(haar.state(7), HaarSampler::new(42, 4).unwrap().state(7));
        assert_ne!(haar.state(7), haar.state(8));
    }

    #[test]
    fn haar_pair_fidelity_mean_is_one_over_d() {
        let haar = HaarSampler::new(8, 2).unwrap();
        let n_pairs = 10_000u64;
        let fids: Vec<f64> =
            (0..n_pairs).map(|i| haar.state(2 * i).fidelity(&haar.state(2 * i + 1)).unwrap()).collect();
        let (mean, std) = crate::exec::mean_and_std(&fids);
        assert!((mean - 0.25).abs() < 3.0 * std / (n_pairs as f64).sqrt(), "mean {mean}");
    }
}
