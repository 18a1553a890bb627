//! Density matrices, partial traces, and a small Hermitian eigensolver.

use num_complex::Complex64;

use super::gates::ZERO;
use super::{QsimError, StateVector};

/// Dense density matrix over a 2^k-dimensional subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl DensityMatrix {
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    /// Projector |ψ⟩⟨ψ| of a pure state.
    pub fn from_pure(state: &StateVector) -> Self {
        let dim = state.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(state.amplitude(i) * state.amplitude(j).conj());
            }
        }
        Self { dim, entries }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if (self.entry(i, j) - self.entry(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Eigenvalues in ascending order (the matrix must be Hermitian).
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim, &self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Trace distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64, QsimError> {
        if self.dim != other.dim {
            return Err(QsimError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let diff: Vec<Complex64> = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a - b)
            .collect();
        let eigs = hermitian_eigenvalues(self.dim, &diff);
        Ok(0.5 * eigs.iter().map(|e| e.abs()).sum::<f64>())
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_entry_distance(&self, other: &Self) -> Result<f64, QsimError> {
        if self.dim != other.dim {
            return Err(QsimError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Reduced density matrix of `state` over the kept qubits (ascending order).
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix, QsimError> {
    if keep.is_empty() {
        return Err(QsimError::EmptyKeepSet);
    }
    let n = state.num_qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    for w in kept.windows(2) {
        if w[0] == w[1] {
            return Err(QsimError::DuplicateQubit);
        }
    }
    if *kept.last().unwrap() >= n {
        return Err(QsimError::IndexOutOfRange {
            index: *kept.last().unwrap(),
            num_qubits: n,
        });
    }
    let elim: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let k = kept.len();
    let dim = 1usize << k;
    let elim_dim = 1usize << elim.len();

    let compose = |keep_bits: usize, elim_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            if (keep_bits >> (k - 1 - pos)) & 1 == 1 {
                idx |= 1usize << (n - 1 - q);
            }
        }
        for (pos, &q) in elim.iter().enumerate() {
            if (elim_bits >> (elim.len().max(1) - 1 - pos)) & 1 == 1 {
                idx |= 1usize << (n - 1 - q);
            }
        }
        idx
    };

    let mut entries = vec![ZERO; dim * dim];
    for row in 0..dim {
        for col in 0..dim {
            let mut acc = ZERO;
            for e in 0..elim_dim {
                acc += state.amplitude(compose(row, e)) * state.amplitude(compose(col, e)).conj();
            }
            entries[row * dim + col] = acc;
        }
    }
    Ok(DensityMatrix { dim, entries })
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Ascending order. Intended for the small matrices produced by partial
/// traces, not for large systems.
pub fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    let mut a: Vec<Complex64> = entries.to_vec();
    let at = |a: &[Complex64], r: usize, c: usize| a[r * dim + c];

    for _sweep in 0..64 {
        let mut off = 0.0;
        for r in 0..dim {
            for c in (r + 1)..dim {
                off += at(&a, r, c).norm_sqr();
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = at(&a, p, q);
                if apq.norm() < 1e-30 {
                    continue;
                }
                // Phase-rotate column q so the pivot becomes real, then use
                // a real Jacobi rotation to zero it.
                let phase = apq / apq.norm();
                let app = at(&a, p, p).re;
                let aqq = at(&a, q, q).re;
                let b = apq.norm();
                let theta = 0.5 * (2.0 * b).atan2(app - aqq);
                let (cth, sth) = (theta.cos(), theta.sin());
                // Combined transform J = D·R with D = diag(1, conj(phase))
                // on (p, q) and R the real rotation by theta; A <- J† A J.
                // Update columns: A <- A J.
                for r in 0..dim {
                    let vp = at(&a, r, p);
                    let vq = at(&a, r, q);
                    a[r * dim + p] = vp * cth + vq * phase.conj() * sth;
                    a[r * dim + q] = -vp * sth + vq * phase.conj() * cth;
                }
                // Update rows: A <- J† A.
                for c in 0..dim {
                    let vp = at(&a, p, c);
                    let vq = at(&a, q, c);
                    a[p * dim + c] = vp * cth + vq * phase * sth;
                    a[q * dim + c] = -vp * sth + vq * phase * cth;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..dim).map(|i| at(&a, i, i).re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{bell_state, Unitary2, Unitary4};
    use crate::rng::seeded;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        // Pauli X: eigenvalues ±1.
        let x = vec![ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO];
        let eigs = hermitian_eigenvalues(2, &x);
        assert!((eigs[0] + 1.0).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);

        // Pauli Y (complex off-diagonal).
        let y = vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO];
        let eigs = hermitian_eigenvalues(2, &y);
        assert!((eigs[0] + 1.0).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);

        // A 3x3 with known spectrum {0, 1, 3}: diag(1,3,0) conjugated stays put.
        let d = vec![
            c(1.0, 0.0),
            ZERO,
            ZERO,
            ZERO,
            c(3.0, 0.0),
            ZERO,
            ZERO,
            ZERO,
            ZERO,
        ];
        let eigs = hermitian_eigenvalues(3, &d);
        assert!((eigs[0]).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);
        assert!((eigs[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state() {
        // tr over qubit 0 of |0⟩⊗|1⟩ leaves |1⟩⟨1|.
        let s = StateVector::basis_state(2, 0b01).unwrap();
        let rho = partial_trace(&s, &[1]).unwrap();
        assert!((rho.entry(1, 1) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(rho.entry(0, 0).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let b = bell_state(0, 0);
        let rho = partial_trace(&b, &[1]).unwrap();
        assert!(
            rho.max_entry_distance(&DensityMatrix::maximally_mixed(2))
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn partial_trace_cnot_on_plus_target_invariant() {
        // CNOT(|0⟩⊗|+⟩): target side reduces to |+⟩⟨+| because |+⟩ is the
        // X eigenstate the gate acts trivially on.
        let mut s = StateVector::basis_state(2, 0).unwrap();
        s.apply_1q_mut(&Unitary2::h(), 1).unwrap();
        s.apply_2q_mut(&Unitary4::cnot(), 0, 1).unwrap();
        let rho = partial_trace(&s, &[1]).unwrap();
        let plus = StateVector::basis_state(1, 0)
            .unwrap()
            .apply_1q(&Unitary2::h(), 0)
            .unwrap();
        let expect = DensityMatrix::from_pure(&plus);
        assert!(rho.max_entry_distance(&expect).unwrap() < 1e-14);
    }

    #[test]
    fn resource_state_inner_pair_is_maximally_mixed() {
        // Keeping qubits {1,2} of the four-qubit resource state gives I/4.
        let chi = crate::qsim::resource_state();
        let rho = partial_trace(&chi, &[1, 2]).unwrap();
        assert!(
            rho.max_entry_distance(&DensityMatrix::maximally_mixed(4))
                .unwrap()
                < 1e-14
        );

        // The first Bell pair (qubits {0,1}) is rank-2 instead.
        let rho01 = partial_trace(&chi, &[0, 1]).unwrap();
        assert!((rho01.entry(0, 0) - c(0.5, 0.0)).norm() < 1e-14);
        assert!(rho01.entry(1, 1).norm() < 1e-14);
        assert!(rho01.entry(2, 2).norm() < 1e-14);
        assert!((rho01.entry(3, 3) - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn reduced_states_are_valid_density_matrices() {
        let mut rng = seeded(41);
        for _ in 0..100 {
            let s = StateVector::random(4, &mut rng);
            let rho = partial_trace(&s, &[0, 2]).unwrap();
            assert!(rho.is_hermitian(1e-12));
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
            assert!(rho.min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn empty_keep_set_rejected() {
        let s = StateVector::basis_state(2, 0).unwrap();
        assert!(matches!(
            partial_trace(&s, &[]),
            Err(QsimError::EmptyKeepSet)
        ));
    }

    #[test]
    fn trace_distance_hand_values() {
        let zero = DensityMatrix::from_pure(&StateVector::basis_state(1, 0).unwrap());
        let mixed = DensityMatrix::maximally_mixed(2);
        let d = zero.trace_distance(&mixed).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let one = DensityMatrix::from_pure(&StateVector::basis_state(1, 1).unwrap());
        let d = zero.trace_distance(&one).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }
}
