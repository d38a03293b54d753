use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::SimError;
use crate::gates::Mat2;

/// Norm tolerance held after every operation.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Amplitudes over `width` qubits. Qubit `j` carries weight `2^j` in the
/// basis-state index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `width` qubits.
    pub fn zero(width: usize) -> Self {
        Self::basis(width, 0)
    }

    /// Computational basis state `|index>`. Panics if `index >= 2^width`.
    pub fn basis(width: usize, index: usize) -> Self {
        assert!(index < 1 << width, "basis index {index} out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << width];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { width, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::InvalidState(format!(
                "length {len} is not a power of two"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::InvalidState(format!("norm^2 = {norm}")));
        }
        Ok(Self {
            width: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Normalizes the given amplitudes first.
    pub fn from_unnormalized(mut amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SimError::InvalidState("zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amplitudes)
    }

    /// Haar-like random state from normalized complex Gaussians.
    pub fn random<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Self {
        let amplitudes = (0..1usize << width)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        Self::from_unnormalized(amplitudes).expect("gaussian vector is nonzero")
    }

    /// `self ⊗ low`, with `low` occupying the least significant qubits.
    pub fn tensor(&self, low: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * low.amplitudes.len());
        for hi in &self.amplitudes {
            for lo in &low.amplitudes {
                amplitudes.push(hi * lo);
            }
        }
        StateVector {
            width: self.width + low.width,
            amplitudes,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.width {
            return Err(SimError::QubitOutOfRange {
                index: q,
                width: self.width,
            });
        }
        Ok(())
    }

    pub(crate) fn apply_single(&mut self, m: &Mat2, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub(crate) fn apply_cx(&mut self, control: usize, target: usize) {
        let c = 1usize << control;
        let t = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & c != 0 && i & t == 0 {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    /// Multiplies every amplitude whose index has all `mask` bits set.
    pub(crate) fn apply_phase_on_mask(&mut self, mask: usize, phase: Complex64) {
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    /// `|y>_targets -> |table[y]>_targets`, gated on `control` when given.
    pub(crate) fn apply_permutation(
        &mut self,
        control: Option<usize>,
        targets: &[usize],
        table: &[usize],
    ) {
        let cmask = control.map_or(0, |c| 1usize << c);
        let tmask: usize = targets.iter().map(|&q| 1usize << q).sum();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            if i & cmask != cmask {
                out[i] += a;
                continue;
            }
            let y = gather(i, targets);
            let j = (i & !tmask) | scatter(table[y], targets);
            out[j] += a;
        }
        self.amplitudes = out;
    }

    /// Loads `block` into `targets`, which must currently hold `|0...0>`.
    pub(crate) fn initialize(
        &mut self,
        targets: &[usize],
        block: &[Complex64],
    ) -> Result<(), SimError> {
        let tmask: usize = targets.iter().map(|&q| 1usize << q).sum();
        let dirty: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & tmask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if dirty > 1e-12 {
            return Err(SimError::DirtyInitialize);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            if i & tmask != 0 || a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (y, &b) in block.iter().enumerate() {
                out[i | scatter(y, targets)] = a * b;
            }
        }
        self.amplitudes = out;
        Ok(())
    }

    /// Born probabilities `(p0, p1)` of measuring qubit `q`.
    pub(crate) fn outcome_probabilities(&self, q: usize) -> (f64, f64) {
        let bit = 1usize << q;
        let mut p = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & bit == 0 {
                p.0 += a.norm_sqr();
            } else {
                p.1 += a.norm_sqr();
            }
        }
        p
    }

    /// Projects qubit `q` onto `outcome` and renormalizes by `probability`.
    pub(crate) fn project(&mut self, q: usize, outcome: bool, probability: f64) {
        let bit = 1usize << q;
        let scale = 1.0 / probability.sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Maps a qubit known to be `|1>` back to `|0>`.
    pub(crate) fn flip(&mut self, q: usize) {
        self.apply_single(&crate::gates::PAULI_X, q);
    }
}

/// Collects the bits of `index` at positions `qubits` into an integer,
/// `qubits[0]` least significant.
pub(crate) fn gather(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | ((index >> q) & 1) << k)
}

/// Inverse of [`gather`].
pub(crate) fn scatter(value: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | ((value >> k) & 1) << q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_places_low_factor_on_low_qubits() {
        let hi = StateVector::basis(1, 1);
        let lo = StateVector::basis(2, 2);
        assert_eq!(hi.tensor(&lo), StateVector::basis(3, 0b110));
    }

    #[test]
    fn gather_scatter_round_trip() {
        let qubits = [3, 0, 5];
        for v in 0..8 {
            assert_eq!(gather(scatter(v, &qubits), &qubits), v);
        }
    }

    #[test]
    fn rejects_bad_lengths_and_norms() {
        assert!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 2]).is_err());
    }
}
