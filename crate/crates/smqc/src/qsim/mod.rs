//! Deterministic state-vector simulation core.
//!
//! States are dense complex amplitude arrays over `n` qubits. Qubit 0 is the
//! leftmost ket symbol and the most significant bit of the amplitude index,
//! so `|01⟩` is index `0b01 = 1` and qubit 0 of a 3-qubit register selects
//! bit 2 of the index. All operations preserve the norm to 1e-12; measurement
//! projections renormalize explicitly.

mod bell;
mod density;
mod gates;
mod schmidt;

pub(crate) use bell::unmake_bell_mut;
pub use bell::{
    bell_measure, bell_probabilities, bell_state, resource_state, BellOutcome, BranchSelector,
};
pub use density::{hermitian_eigenvalues, partial_trace, DensityMatrix};
pub use gates::{Pauli, Unitary2, Unitary4};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};

use num_complex::Complex64;
use thiserror::Error;

use crate::rng::SimRng;
use crate::{TOL_ALGEBRAIC, TOL_PROTOCOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("basis index {index} out of range for dimension {dim}")]
    BasisOutOfRange { index: usize, dim: usize },
    #[error("matrix is not unitary within tolerance")]
    NonUnitary,
    #[error("qubit indices must be distinct")]
    DuplicateQubit,
    #[error("state dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("amplitude vector of length {len} is not a power-of-two state")]
    BadAmplitudeCount { len: usize },
    #[error("state norm {norm} too far from 1")]
    NotNormalized { norm: f64 },
    #[error("keep set must be nonempty")]
    EmptyKeepSet,
    #[error("forced branch has probability {probability:.3e}, below threshold")]
    ForcedBranchImpossible { probability: f64 },
    #[error("qubit {qubit} is not collapsed to a basis state (residual {residual:.3e})")]
    QubitNotCollapsed { qubit: usize, residual: f64 },
}

/// Pure state of `num_qubits` qubits as 2^n complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// Choice source for a computational-basis measurement.
pub enum BitSelector<'a> {
    Sample(&'a mut SimRng),
    Force(u8),
}

impl StateVector {
    /// Computational basis state `|index⟩` over `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self, QsimError> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(QsimError::BasisOutOfRange { index, dim });
        }
        let mut amps = vec![gates::ZERO; dim];
        amps[index] = gates::ONE;
        Ok(Self { num_qubits, amps })
    }

    /// Builds a state from raw amplitudes; the norm must already be within
    /// 1e-9 of 1 and is then normalized exactly.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QsimError::BadAmplitudeCount { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QsimError::NotNormalized { norm });
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { num_qubits, amps })
    }

    /// Haar-ish random state from normalized Gaussian amplitudes.
    pub fn random(num_qubits: usize, rng: &mut SimRng) -> Self {
        use rand::Rng;
        let dim = 1usize << num_qubits;
        let mut amps = Vec::with_capacity(dim);
        for _ in 0..dim {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            amps.push(Complex64::from_polar(r, 2.0 * std::f64::consts::PI * u2));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit of `index` addressing `qubit` under the MSB-first convention.
    #[inline]
    pub fn bit_of(&self, index: usize, qubit: usize) -> u8 {
        ((index >> (self.num_qubits - 1 - qubit)) & 1) as u8
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), QsimError> {
        if qubit >= self.num_qubits {
            return Err(QsimError::IndexOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// `self ⊗ other`, with `self`'s qubits first (leftmost).
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    /// Applies a single-qubit unitary in place.
    pub fn apply_1q_mut(&mut self, u: &Unitary2, qubit: usize) -> Result<(), QsimError> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let (u00, u01) = (u.entry(0, 0), u.entry(0, 1));
        let (u10, u11) = (u.entry(1, 0), u.entry(1, 1));
        for base in 0..self.dim() {
            if base & mask != 0 {
                continue;
            }
            let i1 = base | mask;
            let a0 = self.amps[base];
            let a1 = self.amps[i1];
            self.amps[base] = u00 * a0 + u01 * a1;
            self.amps[i1] = u10 * a0 + u11 * a1;
        }
        Ok(())
    }

    /// Single-qubit unitary on a copy.
    pub fn apply_1q(&self, u: &Unitary2, qubit: usize) -> Result<Self, QsimError> {
        let mut out = self.clone();
        out.apply_1q_mut(u, qubit)?;
        Ok(out)
    }

    /// Applies a two-qubit unitary in place, `q1` as the first tensor factor.
    pub fn apply_2q_mut(&mut self, u: &Unitary4, q1: usize, q2: usize) -> Result<(), QsimError> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(QsimError::DuplicateQubit);
        }
        let m1 = self.mask(q1);
        let m2 = self.mask(q2);
        for base in 0..self.dim() {
            if base & (m1 | m2) != 0 {
                continue;
            }
            let idx = [base, base | m2, base | m1, base | m1 | m2];
            let v = [
                self.amps[idx[0]],
                self.amps[idx[1]],
                self.amps[idx[2]],
                self.amps[idx[3]],
            ];
            for (r, &i) in idx.iter().enumerate() {
                let mut acc = gates::ZERO;
                for (c, &vc) in v.iter().enumerate() {
                    acc += u.entry(r, c) * vc;
                }
                self.amps[i] = acc;
            }
        }
        Ok(())
    }

    /// Two-qubit unitary on a copy.
    pub fn apply_2q(&self, u: &Unitary4, q1: usize, q2: usize) -> Result<Self, QsimError> {
        let mut out = self.clone();
        out.apply_2q_mut(u, q1, q2)?;
        Ok(out)
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, QsimError> {
        if self.dim() != other.dim() {
            return Err(QsimError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Overlap magnitude `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &Self) -> Result<f64, QsimError> {
        Ok(self.inner(other)?.norm())
    }

    /// Probability that `qubit` reads 1.
    pub fn probability_one(&self, qubit: usize) -> Result<f64, QsimError> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Computational-basis measurement of one qubit; projects and
    /// renormalizes in place. A forced bit with probability below 1e-12 is an
    /// error.
    pub fn measure_qubit_mut(&mut self, qubit: usize, sel: BitSelector) -> Result<u8, QsimError> {
        let p1 = self.probability_one(qubit)?;
        let bit = match sel {
            BitSelector::Sample(rng) => {
                use rand::Rng;
                u8::from(rng.gen_range(0.0..1.0) < p1)
            }
            BitSelector::Force(bit) => {
                let p = if bit == 1 { p1 } else { 1.0 - p1 };
                if p <= TOL_ALGEBRAIC {
                    return Err(QsimError::ForcedBranchImpossible { probability: p });
                }
                bit
            }
        };
        let mask = self.mask(qubit);
        let keep_set = bit == 1;
        let mut norm_sqr = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) == keep_set {
                norm_sqr += a.norm_sqr();
            } else {
                *a = gates::ZERO;
            }
        }
        let norm = norm_sqr.sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(bit)
    }

    /// Drops qubits that are collapsed to known basis values. Remaining
    /// qubits keep their relative order. Errors if any listed qubit still
    /// carries amplitude on the opposite branch.
    pub fn remove_qubits(&self, fixed: &[(usize, u8)]) -> Result<Self, QsimError> {
        let mut drop_mask = 0usize;
        let mut want = 0usize;
        for &(q, bit) in fixed {
            self.check_qubit(q)?;
            let m = self.mask(q);
            if drop_mask & m != 0 {
                return Err(QsimError::DuplicateQubit);
            }
            drop_mask |= m;
            if bit == 1 {
                want |= m;
            }
        }
        let mut residual = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & drop_mask != want {
                residual += a.norm_sqr();
            }
        }
        if residual > TOL_PROTOCOL {
            let q = fixed.first().map(|&(q, _)| q).unwrap_or(0);
            return Err(QsimError::QubitNotCollapsed { qubit: q, residual });
        }
        let kept: Vec<usize> = (0..self.num_qubits)
            .filter(|&q| self.mask(q) & drop_mask == 0)
            .collect();
        let new_n = kept.len();
        let mut amps = vec![gates::ZERO; 1 << new_n];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old_idx = want;
            for (pos, &q) in kept.iter().enumerate() {
                if (new_idx >> (new_n - 1 - pos)) & 1 == 1 {
                    old_idx |= self.mask(q);
                }
            }
            *slot = self.amps[old_idx];
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self {
            num_qubits: new_n,
            amps,
        })
    }

    /// Reorders qubits: new qubit `k` is old qubit `order[k]`. `order` must
    /// be a permutation of `0..num_qubits`.
    pub fn reorder(&self, order: &[usize]) -> Result<Self, QsimError> {
        if order.len() != self.num_qubits {
            return Err(QsimError::DimensionMismatch {
                left: order.len(),
                right: self.num_qubits,
            });
        }
        let mut seen = vec![false; self.num_qubits];
        for &q in order {
            self.check_qubit(q)?;
            if seen[q] {
                return Err(QsimError::DuplicateQubit);
            }
            seen[q] = true;
        }
        let n = self.num_qubits;
        let mut amps = vec![gates::ZERO; self.dim()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old_idx = 0usize;
            for (pos, &q) in order.iter().enumerate() {
                if (new_idx >> (n - 1 - pos)) & 1 == 1 {
                    old_idx |= self.mask(q);
                }
            }
            *slot = self.amps[old_idx];
        }
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }
}

/// Global-phase equivalence: true iff `|⟨a|b⟩| ≥ 1 − 1e-10`. Also returns
/// the overlap magnitude.
pub fn phase_equal(a: &StateVector, b: &StateVector) -> Result<(bool, f64), QsimError> {
    let mag = a.overlap(b)?;
    Ok((mag >= 1.0 - TOL_PROTOCOL, mag))
}
