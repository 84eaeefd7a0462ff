//! Dense statevector and the gate kernels used by the circuit families.
//!
//! Qubit 0 is the most significant bit of the amplitude index, so for a
//! 3-qubit register the index `0b100` is `|100⟩` (qubit 0 set).
//!
//! Rotations follow `R_j(θ) = exp(-iθσ_j)` with no half-angle factor:
//! `RX(θ) = cos θ·I − i sin θ·X` and `RY(θ) = cos θ·I − i sin θ·Y`.

use num_complex::Complex64;
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Largest register handled by [`StateVector`].
pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => f.write_str("X"),
            Axis::Y => f.write_str("Y"),
        }
    }
}

/// A concrete gate. Rotations carry the index of the parameter they read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Rotation { axis: Axis, qubit: usize, slot: usize },
    Cnot { control: usize, target: usize },
    H { qubit: usize },
    X { qubit: usize },
}

impl Gate {
    pub fn rx(qubit: usize, slot: usize) -> Self {
        Gate::Rotation { axis: Axis::X, qubit, slot }
    }

    pub fn ry(qubit: usize, slot: usize) -> Self {
        Gate::Rotation { axis: Axis::Y, qubit, slot }
    }

    /// Builds a CNOT, rejecting `control == target`.
    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        if control == target {
            return Err(invalid(format!("CNOT control and target are both qubit {control}")));
        }
        Ok(Gate::Cnot { control, target })
    }

    pub fn param_slot(&self) -> Option<usize> {
        match *self {
            Gate::Rotation { slot, .. } => Some(slot),
            _ => None,
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Computational basis state; `index` uses the qubit-0-is-MSB ordering.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero(n_qubits)?;
        if index >= state.dim() {
            return Err(invalid(format!("basis index {index} out of range for dimension {}", state.dim())));
        }
        state.amplitudes[0] = ZERO;
        state.amplitudes[index] = ONE;
        Ok(state)
    }

    /// Wraps raw amplitudes. The length must be a power of two and the
    /// vector must be normalized to within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!("amplitude count {len} is not a power of two ≥ 2")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_capacity(n_qubits)?;
        let state = Self { n_qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("amplitudes have squared norm {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Normalizes and wraps an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Self::from_amplitudes(amplitudes)
    }

    /// Tensor product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n_qubits = self.n_qubits + other.n_qubits;
        check_capacity(n_qubits)?;
        let mut amplitudes = Vec::with_capacity(1 << n_qubits);
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    /// Bit mask selecting `qubit` in an amplitude index.
    #[inline]
    pub fn qubit_mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Applies the 2×2 matrix `[[a, b], [c, d]]` to `qubit`.
    fn apply_single(&mut self, qubit: usize, m: [Complex64; 4]) {
        let stride = self.qubit_mask(qubit);
        let [a, b, c, d] = m;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (v0, v1) = (*x0, *x1);
                *x0 = a * v0 + b * v1;
                *x1 = c * v0 + d * v1;
            }
        }
    }

    pub fn apply_rx(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.apply_rotation(Axis::X, qubit, theta)
    }

    pub fn apply_ry(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.apply_rotation(Axis::Y, qubit, theta)
    }

    pub fn apply_rotation(&mut self, axis: Axis, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        if !theta.is_finite() {
            return Err(invalid(format!("rotation angle {theta} is not finite")));
        }
        let (s, c) = theta.sin_cos();
        let stride = self.qubit_mask(qubit);
        match axis {
            // [[c, -i s], [-i s, c]]
            Axis::X => {
                for block in self.amplitudes.chunks_exact_mut(stride << 1) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (v0, v1) = (*x0, *x1);
                        *x0 = Complex64::new(c * v0.re + s * v1.im, c * v0.im - s * v1.re);
                        *x1 = Complex64::new(c * v1.re + s * v0.im, c * v1.im - s * v0.re);
                    }
                }
            }
            // [[c, -s], [s, c]]
            Axis::Y => {
                for block in self.amplitudes.chunks_exact_mut(stride << 1) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (v0, v1) = (*x0, *x1);
                        *x0 = v0 * c - v1 * s;
                        *x1 = v0 * s + v1 * c;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(invalid(format!("CNOT control and target are both qubit {control}")));
        }
        let cmask = self.qubit_mask(control);
        let tmask = self.qubit_mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    pub fn apply_h(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single(qubit, [r, r, r, -r]);
        Ok(())
    }

    pub fn apply_x(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let stride = self.qubit_mask(qubit);
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
        Ok(())
    }

    /// Applies `gate`, reading rotation angles from `params` by slot.
    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        match *gate {
            Gate::Rotation { axis, qubit, slot } => {
                let theta = *params
                    .get(slot)
                    .ok_or_else(|| invalid(format!("parameter slot {slot} missing (have {})", params.len())))?;
                self.apply_rotation(axis, qubit, theta)
            }
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
            Gate::H { qubit } => self.apply_h(qubit),
            Gate::X { qubit } => self.apply_x(qubit),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).fold(ZERO, |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|⟨self|other⟩|²`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().clamp(0.0, 1.0))
    }
}

/// Free-function form of [`StateVector::fidelity`].
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity { n_qubits, max: MAX_QUBITS });
    }
    Ok(())
}
