//! Schmidt decomposition of two-qubit pure states.
//!
//! A two-qubit state with coefficient matrix `C` (row = first qubit, column
//! = second) factors as `Σ_k a_k |α_k⟩⊗|β_k⟩` where the `a_k` are the
//! singular values of `C`. Phases are gauge-fixed so that each left vector's
//! leading component is real and nonnegative, which makes the decomposition
//! deterministic; only the reconstruction property is contractual under
//! degeneracy.

use num_complex::Complex64;

use super::gates::ZERO;
use super::{QsimError, StateVector};

/// `Σ_k coefficients[k] · left_basis[k] ⊗ right_basis[k]` reconstructs the
/// decomposed state. Coefficients are nonnegative and descending.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: [f64; 2],
    pub left_basis: [[Complex64; 2]; 2],
    pub right_basis: [[Complex64; 2]; 2],
}

impl SchmidtDecomposition {
    /// The state this decomposition expands to.
    pub fn reconstruct(&self) -> StateVector {
        let mut amps = vec![ZERO; 4];
        for k in 0..2 {
            let a = Complex64::new(self.coefficients[k], 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    amps[i * 2 + j] += a * self.left_basis[k][i] * self.right_basis[k][j];
                }
            }
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::from_amplitudes(amps).expect("normalized above")
    }

    /// Largest amplitude deviation between the reconstruction and `state`.
    pub fn reconstruction_error(&self, state: &StateVector) -> f64 {
        let mut err: f64 = 0.0;
        for k in 0..4 {
            let mut amp = ZERO;
            for t in 0..2 {
                amp += Complex64::new(self.coefficients[t], 0.0)
                    * self.left_basis[t][k / 2]
                    * self.right_basis[t][k % 2];
            }
            err = err.max((amp - state.amplitude(k)).norm());
        }
        err
    }
}

/// Decomposes a normalized two-qubit state across the cut between qubit 0
/// and qubit 1.
pub fn schmidt_decompose(state: &StateVector) -> Result<SchmidtDecomposition, QsimError> {
    if state.num_qubits() != 2 {
        return Err(QsimError::DimensionMismatch {
            left: state.dim(),
            right: 4,
        });
    }
    let c = [
        [state.amplitude(0), state.amplitude(1)],
        [state.amplitude(2), state.amplitude(3)],
    ];

    // M = C†C, Hermitian PSD; its eigenvectors are the right singular
    // vectors of C.
    let m00: f64 = c[0][0].norm_sqr() + c[1][0].norm_sqr();
    let m11: f64 = c[0][1].norm_sqr() + c[1][1].norm_sqr();
    let m01 = c[0][0].conj() * c[0][1] + c[1][0].conj() * c[1][1];
    let (lam_hi, lam_lo, v_hi, v_lo) = eig2_hermitian(m00, m11, m01);

    let a0 = lam_hi.max(0.0).sqrt();
    let a1 = lam_lo.max(0.0).sqrt();

    let matvec = |v: [Complex64; 2]| {
        [
            c[0][0] * v[0] + c[0][1] * v[1],
            c[1][0] * v[0] + c[1][1] * v[1],
        ]
    };

    let mut left = [[ZERO; 2]; 2];
    let mut right_sv = [v_hi, v_lo]; // right singular vectors (pre-conjugation)

    // The leading left vector is well conditioned (a0 >= 1/sqrt(2) for a
    // normalized state); the second is its orthogonal complement with the
    // phase recovered from C·v_lo when that direction carries any weight.
    let u0 = matvec(v_hi);
    let n0 = (u0[0].norm_sqr() + u0[1].norm_sqr()).sqrt();
    left[0] = if n0 > 1e-13 {
        [u0[0] / n0, u0[1] / n0]
    } else {
        [Complex64::new(1.0, 0.0), ZERO]
    };
    left[1] = orth_complement(left[0]);
    let u1 = matvec(v_lo);
    let phase1 = left[1][0].conj() * u1[0] + left[1][1].conj() * u1[1];
    if phase1.norm() > 1e-13 {
        let w = phase1 / phase1.norm();
        left[1][0] *= w;
        left[1][1] *= w;
    }

    // Gauge: rotate each pair so the left vector's leading component is
    // real nonnegative; u v^H is invariant under the joint phase.
    for k in 0..2 {
        let lead = if left[k][0].norm() >= left[k][1].norm() {
            left[k][0]
        } else {
            left[k][1]
        };
        if lead.norm() > 0.0 {
            let w = lead.conj() / lead.norm();
            for i in 0..2 {
                left[k][i] *= w;
                right_sv[k][i] *= w;
            }
        }
    }

    // state = Σ a_k u_k v_k^H in matrix form, so β_k is conj(v_k).
    let right = [
        [right_sv[0][0].conj(), right_sv[0][1].conj()],
        [right_sv[1][0].conj(), right_sv[1][1].conj()],
    ];

    Ok(SchmidtDecomposition {
        coefficients: [a0, a1],
        left_basis: left,
        right_basis: right,
    })
}

/// Eigen-decomposition of the Hermitian matrix [[m00, m01], [m01*, m11]].
/// Returns (high eigenvalue, low eigenvalue, high vector, low vector).
fn eig2_hermitian(
    m00: f64,
    m11: f64,
    m01: Complex64,
) -> (f64, f64, [Complex64; 2], [Complex64; 2]) {
    let half_tr = 0.5 * (m00 + m11);
    let half_diff = 0.5 * (m00 - m11);
    let disc = (half_diff * half_diff + m01.norm_sqr()).sqrt();
    let lam_hi = half_tr + disc;
    let lam_lo = half_tr - disc;

    if m01.norm() < 1e-15 {
        return if m00 >= m11 {
            (
                m00,
                m11,
                [Complex64::new(1.0, 0.0), ZERO],
                [ZERO, Complex64::new(1.0, 0.0)],
            )
        } else {
            (
                m11,
                m00,
                [ZERO, Complex64::new(1.0, 0.0)],
                [Complex64::new(1.0, 0.0), ZERO],
            )
        };
    }

    let vec_for = |lam: f64| {
        let v = [m01, Complex64::new(lam - m00, 0.0)];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    (lam_hi, lam_lo, vec_for(lam_hi), vec_for(lam_lo))
}

/// Deterministic unit vector orthogonal to a unit vector.
fn orth_complement(v: [Complex64; 2]) -> [Complex64; 2] {
    [-v[1].conj(), v[0].conj()]
}
