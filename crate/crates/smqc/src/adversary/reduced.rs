//! The reduced-state vulnerability: when the target input is an X
//! eigenstate, the target-side reduced state of `CNOT(φ⊗ϕ)` does not depend
//! on the control input φ at all. The two outputs then share their Schmidt
//! spectrum and right-hand bases, so a purely local unitary on the control
//! side maps one output to the other: the control owner can swap its input
//! after the fact and the counterpart cannot tell.

use num_complex::Complex64;

use crate::qsim::{
    partial_trace, schmidt_decompose, DensityMatrix, QsimError, StateVector, Unitary2, Unitary4,
};

/// Which X eigenstate the target holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetSign {
    Plus,
    Minus,
}

impl TargetSign {
    pub fn ket(self) -> StateVector {
        let base = match self {
            TargetSign::Plus => StateVector::basis_state(1, 0),
            TargetSign::Minus => StateVector::basis_state(1, 1),
        };
        base.expect("index in range")
            .apply_1q(&Unitary2::h(), 0)
            .expect("single qubit")
    }
}

impl std::str::FromStr for TargetSign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" => Ok(TargetSign::Plus),
            "-" | "minus" => Ok(TargetSign::Minus),
            other => Err(format!("unknown sign `{other}` (use + or -)")),
        }
    }
}

/// Target-side reduced states of the two CNOT outputs and their distance.
#[derive(Clone, Debug)]
pub struct ReducedComparison {
    pub rho: DensityMatrix,
    pub rho_prime: DensityMatrix,
    pub trace_distance: f64,
}

fn cnot_output(control: &StateVector, target: &StateVector) -> Result<StateVector, QsimError> {
    control.tensor(target).apply_2q(&Unitary4::cnot(), 0, 1)
}

/// Compares the target-side reduced states of `CNOT(φ⊗ϕ)` and
/// `CNOT(φ′⊗ϕ)` for an arbitrary target state ϕ. The negative control for
/// the eigenstate condition passes ϕ = |0⟩ here.
pub fn reduced_target_comparison(
    phi: &StateVector,
    phi_prime: &StateVector,
    target: &StateVector,
) -> Result<ReducedComparison, QsimError> {
    let rho = partial_trace(&cnot_output(phi, target)?, &[1])?;
    let rho_prime = partial_trace(&cnot_output(phi_prime, target)?, &[1])?;
    let trace_distance = rho.trace_distance(&rho_prime)?;
    Ok(ReducedComparison {
        rho,
        rho_prime,
        trace_distance,
    })
}

/// [`reduced_target_comparison`] with the target fixed to an X eigenstate,
/// where the distance is zero for any pair of control inputs.
pub fn x_eigenstate_comparison(
    phi: &StateVector,
    phi_prime: &StateVector,
    sign: TargetSign,
) -> Result<ReducedComparison, QsimError> {
    reduced_target_comparison(phi, phi_prime, &sign.ket())
}

/// Builds the local control-side unitary with
/// `(U₁⊗I)·CNOT(φ⊗ϕ) = CNOT(φ′⊗ϕ)` up to global phase, for ϕ an X
/// eigenstate. Constructed by matching the Schmidt bases of the two
/// outputs, coefficient by coefficient.
pub fn recover_local_unitary(
    phi: &StateVector,
    phi_prime: &StateVector,
    sign: TargetSign,
) -> Result<Unitary2, QsimError> {
    let s = cnot_output(phi, &sign.ket())?;
    let s_prime = cnot_output(phi_prime, &sign.ket())?;
    local_left_unitary(&s, &s_prime)
}

/// The left-side unitary relating two two-qubit states with equal Schmidt
/// spectra and equal right-hand reduced states.
fn local_left_unitary(s: &StateVector, s_prime: &StateVector) -> Result<Unitary2, QsimError> {
    let d = schmidt_decompose(s)?;
    let dp = schmidt_decompose(s_prime)?;

    let degenerate = (d.coefficients[0] - d.coefficients[1]).abs() < 1e-9;
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];

    if degenerate {
        // Both states are maximally entangled: with coefficient matrices
        // C = M/√2, C′ = M′/√2 (M, M′ unitary), U₁ = M′ M† = 2 C′ C†.
        let c = |st: &StateVector, i: usize, j: usize| st.amplitude(i * 2 + j);
        for r in 0..2 {
            for col in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    acc += c(s_prime, r, k) * c(s, col, k).conj();
                }
                m[r][col] = acc * 2.0;
            }
        }
    } else {
        // Match each weighted Schmidt term; spare directions (zero
        // coefficient) map gauge complement to gauge complement.
        for k in 0..2 {
            let weighted = d.coefficients[k] > 1e-9;
            let omega = if weighted {
                let dot = d.right_basis[k][0].conj() * dp.right_basis[k][0]
                    + d.right_basis[k][1].conj() * dp.right_basis[k][1];
                dot / dot.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            for r in 0..2 {
                for col in 0..2 {
                    m[r][col] += omega * dp.left_basis[k][r] * d.left_basis[k][col].conj();
                }
            }
        }
    }

    // The construction is unitary up to rounding; re-orthonormalize the
    // columns before the checked wrap.
    let n0 = (m[0][0].norm_sqr() + m[1][0].norm_sqr()).sqrt();
    m[0][0] /= n0;
    m[1][0] /= n0;
    let overlap = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    m[0][1] -= overlap * m[0][0];
    m[1][1] -= overlap * m[1][0];
    let n1 = (m[0][1].norm_sqr() + m[1][1].norm_sqr()).sqrt();
    m[0][1] /= n1;
    m[1][1] /= n1;
    Unitary2::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::phase_equal;
    use crate::rng::seeded;

    fn plus() -> StateVector {
        TargetSign::Plus.ket()
    }

    #[test]
    fn basis_controls_give_identical_plus_reductions() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        let cmp = x_eigenstate_comparison(&zero, &one, TargetSign::Plus).unwrap();
        assert!(cmp.trace_distance <= 1e-10);
        // Both reduced states are |+⟩⟨+|.
        let plus_proj = DensityMatrix::from_pure(&plus());
        assert!(cmp.rho.max_entry_distance(&plus_proj).unwrap() < 1e-12);
        assert!(cmp.rho_prime.max_entry_distance(&plus_proj).unwrap() < 1e-12);
    }

    #[test]
    fn random_pairs_have_zero_distance_for_both_signs() {
        let mut rng = seeded(71);
        for sign in [TargetSign::Plus, TargetSign::Minus] {
            for _ in 0..100 {
                let phi = StateVector::random(1, &mut rng);
                let phi_prime = StateVector::random(1, &mut rng);
                let cmp = x_eigenstate_comparison(&phi, &phi_prime, sign).unwrap();
                assert!(
                    cmp.trace_distance <= 1e-10,
                    "distance {}",
                    cmp.trace_distance
                );
            }
        }
    }

    #[test]
    fn computational_target_is_a_negative_control() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let cmp = reduced_target_comparison(&zero, &plus(), &zero).unwrap();
        assert!(cmp.trace_distance > 0.1, "distance {}", cmp.trace_distance);
    }

    #[test]
    fn recovered_unitary_acts_like_h_on_zero_to_plus() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let patch = recover_local_unitary(&zero, &plus(), TargetSign::Plus).unwrap();
        assert!(patch.phase_relative_to(&Unitary2::h(), 1e-9).is_some());
    }

    #[test]
    fn recovered_unitary_is_identity_for_equal_inputs() {
        let mut rng = seeded(72);
        let phi = StateVector::random(1, &mut rng);
        let patch = recover_local_unitary(&phi, &phi, TargetSign::Minus).unwrap();
        assert!(patch
            .phase_relative_to(&Unitary2::identity(), 1e-9)
            .is_some());
    }

    #[test]
    fn recovery_achieves_contract_overlap_on_random_pairs() {
        let mut rng = seeded(73);
        for sign in [TargetSign::Plus, TargetSign::Minus] {
            for _ in 0..100 {
                let phi = StateVector::random(1, &mut rng);
                let phi_prime = StateVector::random(1, &mut rng);
                let patch = recover_local_unitary(&phi, &phi_prime, sign).unwrap();
                let mapped = cnot_output(&phi, &sign.ket())
                    .unwrap()
                    .apply_1q(&patch, 0)
                    .unwrap();
                let want = cnot_output(&phi_prime, &sign.ket()).unwrap();
                let (eq, mag) = phase_equal(&mapped, &want).unwrap();
                assert!(eq, "overlap {mag}");
            }
        }
    }
}
