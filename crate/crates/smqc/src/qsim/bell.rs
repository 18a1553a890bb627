//! Bell states, the four-qubit remote-CNOT resource state, and Bell
//! measurement.
//!
//! Bell states are indexed by bits (x, z) as
//! `(|0 x⟩ + (−1)^z |1 x̄⟩)/√2`. The outcome labels of [`bell_measure`] are
//! fixed so that measuring `(ψ, half of B00)` leaves the other half in
//! `X^x Z^z |ψ⟩` up to global phase, the convention under which the
//! gadget's Pauli corrections are valid.

use num_complex::Complex64;

use super::gates::{Unitary2, Unitary4, ZERO};
use super::{QsimError, StateVector};
use crate::rng::SimRng;
use crate::TOL_ALGEBRAIC;

/// Result of a Bell measurement: the (x, z) label of the observed Bell state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BellOutcome {
    pub x: u8,
    pub z: u8,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome { x: 0, z: 0 },
        BellOutcome { x: 0, z: 1 },
        BellOutcome { x: 1, z: 0 },
        BellOutcome { x: 1, z: 1 },
    ];

    pub fn new(x: u8, z: u8) -> Self {
        debug_assert!(x <= 1 && z <= 1);
        Self { x, z }
    }

    /// Position of this outcome in [`BellOutcome::ALL`].
    pub fn index(self) -> usize {
        (self.x as usize) << 1 | self.z as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self {
            x: ((i >> 1) & 1) as u8,
            z: (i & 1) as u8,
        }
    }
}

impl std::fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(x={}, z={})", self.x, self.z)
    }
}

/// The two-qubit Bell state `(|0 x⟩ + (−1)^z |1 x̄⟩)/√2`.
pub fn bell_state(x: u8, z: u8) -> StateVector {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![ZERO; 4];
    amps[x as usize] = r;
    amps[0b10 | (1 - x) as usize] = if z == 1 { -r } else { r };
    StateVector::from_amplitudes(amps).expect("unit norm by construction")
}

/// The four-qubit resource state consumed by one remote CNOT: two `B00`
/// pairs on qubits (0,1) and (2,3) with a CNOT applied from qubit 1 to
/// qubit 2. Amplitude 1/2 on |0000⟩, |0011⟩, |1110⟩, |1101⟩.
pub fn resource_state() -> StateVector {
    let mut state = bell_state(0, 0).tensor(&bell_state(0, 0));
    state
        .apply_2q_mut(&Unitary4::cnot(), 1, 2)
        .expect("indices in range");
    state
}

/// Branch choice for a Bell measurement.
pub enum BranchSelector<'a> {
    Sample(&'a mut SimRng),
    Force(BellOutcome),
}

/// Probabilities of the four Bell outcomes for a measurement on `(q1, q2)`,
/// `q1` taken as the first symbol of the Bell basis kets.
pub fn bell_probabilities(
    state: &StateVector,
    q1: usize,
    q2: usize,
) -> Result<[f64; 4], QsimError> {
    let branches = branch_amplitudes(state, q1, q2)?;
    let mut probs = [0.0; 4];
    for (p, amps) in probs.iter_mut().zip(branches.iter()) {
        *p = amps.iter().map(|a| a.norm_sqr()).sum();
    }
    Ok(probs)
}

/// Bell measurement on qubits `(q1, q2)`. Returns the outcome and the
/// post-measurement state: the renormalized projection, with the measured
/// qubits left in the observed Bell state. Forcing an outcome whose
/// probability is below 1e-12 is an error.
pub fn bell_measure(
    state: &StateVector,
    q1: usize,
    q2: usize,
    sel: BranchSelector,
) -> Result<(BellOutcome, StateVector), QsimError> {
    let branches = branch_amplitudes(state, q1, q2)?;
    let probs: Vec<f64> = branches
        .iter()
        .map(|amps| amps.iter().map(|a| a.norm_sqr()).sum())
        .collect();

    let outcome = match sel {
        BranchSelector::Sample(rng) => {
            use rand::Rng;
            let draw: f64 = rng.gen_range(0.0..1.0);
            // Fall back to the likeliest branch if rounding leaves the
            // cumulative sum a hair short of the draw.
            let mut chosen = probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).expect("probabilities are finite"))
                .map(|(i, _)| i)
                .expect("four branches");
            let mut acc = 0.0;
            for (i, &p) in probs.iter().enumerate() {
                acc += p;
                if draw < acc {
                    chosen = i;
                    break;
                }
            }
            BellOutcome::from_index(chosen)
        }
        BranchSelector::Force(outcome) => {
            if probs[outcome.index()] <= TOL_ALGEBRAIC {
                return Err(QsimError::ForcedBranchImpossible {
                    probability: probs[outcome.index()],
                });
            }
            outcome
        }
    };

    let p = probs[outcome.index()];
    let scale = 1.0 / p.sqrt();
    let branch = &branches[outcome.index()];

    // Rebuild the full register: measured pair in |B_xz⟩, rest from the
    // renormalized projection coefficients.
    let n = state.num_qubits();
    let m1 = 1usize << (n - 1 - q1);
    let m2 = 1usize << (n - 1 - q2);
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let sign = if outcome.z == 1 { -r } else { r };
    let mut amps = vec![ZERO; state.dim()];
    for (rest, &coeff) in branch.iter().enumerate() {
        let base = scatter_rest(rest, n, m1, m2);
        // Term |0 x⟩.
        let mut i = base;
        if outcome.x == 1 {
            i |= m2;
        }
        amps[i] = r * coeff * scale;
        // Term (−1)^z |1 x̄⟩.
        let mut j = base | m1;
        if outcome.x == 0 {
            j |= m2;
        }
        amps[j] = sign * coeff * scale;
    }
    let post = StateVector {
        num_qubits: n,
        amps,
    };
    Ok((outcome, post))
}

/// Maps the measured Bell pair `(q1, q2)` with known outcome to the
/// computational pair `|z⟩|x⟩` by applying CNOT(q1→q2) then H(q1). Used to
/// retire consumed qubits after a Bell measurement.
pub(crate) fn unmake_bell_mut(
    state: &mut StateVector,
    q1: usize,
    q2: usize,
) -> Result<(), QsimError> {
    state.apply_2q_mut(&Unitary4::cnot(), q1, q2)?;
    state.apply_1q_mut(&Unitary2::h(), q1)?;
    Ok(())
}

/// Projection coefficients of the state onto each Bell branch of `(q1, q2)`,
/// indexed by rest-register pattern.
fn branch_amplitudes(
    state: &StateVector,
    q1: usize,
    q2: usize,
) -> Result<[Vec<Complex64>; 4], QsimError> {
    if q1 >= state.num_qubits() || q2 >= state.num_qubits() {
        return Err(QsimError::IndexOutOfRange {
            index: q1.max(q2),
            num_qubits: state.num_qubits(),
        });
    }
    if q1 == q2 {
        return Err(QsimError::DuplicateQubit);
    }
    let n = state.num_qubits();
    let m1 = 1usize << (n - 1 - q1);
    let m2 = 1usize << (n - 1 - q2);
    let rest_dim = state.dim() >> 2;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut branches: [Vec<Complex64>; 4] = [
        vec![ZERO; rest_dim],
        vec![ZERO; rest_dim],
        vec![ZERO; rest_dim],
        vec![ZERO; rest_dim],
    ];
    for rest in 0..rest_dim {
        let base = scatter_rest(rest, n, m1, m2);
        for outcome in BellOutcome::ALL {
            let mut i = base;
            if outcome.x == 1 {
                i |= m2;
            }
            let mut j = base | m1;
            if outcome.x == 0 {
                j |= m2;
            }
            let term = if outcome.z == 1 {
                state.amplitude(i) - state.amplitude(j)
            } else {
                state.amplitude(i) + state.amplitude(j)
            };
            branches[outcome.index()][rest] = term * r;
        }
    }
    Ok(branches)
}

/// Expands a rest-register pattern into a full index with zeros at the two
/// measured qubit positions.
fn scatter_rest(rest: usize, n: usize, m1: usize, m2: usize) -> usize {
    let mut idx = 0usize;
    let mut src = n as i64 - 3; // highest bit position within `rest`
    for pos in 0..n {
        let bit_mask = 1usize << (n - 1 - pos);
        if bit_mask == m1 || bit_mask == m2 {
            continue;
        }
        if src >= 0 && (rest >> src) & 1 == 1 {
            idx |= bit_mask;
        }
        src -= 1;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::super::gates::ONE;
    use super::*;
    use crate::qsim::phase_equal;
    use crate::rng::seeded;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_state_amplitudes() {
        let b00 = bell_state(0, 0);
        assert!((b00.amplitude(0b00) - c(R, 0.0)).norm() < 1e-15);
        assert!((b00.amplitude(0b11) - c(R, 0.0)).norm() < 1e-15);

        let b11 = bell_state(1, 1);
        assert!((b11.amplitude(0b01) - c(R, 0.0)).norm() < 1e-15);
        assert!((b11.amplitude(0b10) - c(-R, 0.0)).norm() < 1e-15);

        let b01 = bell_state(0, 1);
        assert!((b01.amplitude(0b00) - c(R, 0.0)).norm() < 1e-15);
        assert!((b01.amplitude(0b11) - c(-R, 0.0)).norm() < 1e-15);
    }

    /// Plain Kronecker product of dense row-major matrices.
    fn kron_dense(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let (ar, ac) = (a.len(), a[0].len());
        let (br, bc) = (b.len(), b[0].len());
        let mut out = vec![vec![ZERO; ac * bc]; ar * br];
        for i in 0..ar {
            for j in 0..ac {
                for k in 0..br {
                    for l in 0..bc {
                        out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn resource_state_amplitudes_match_independent_construction() {
        // Independent oracle: build the full 16x16 operator I⊗CNOT⊗I by
        // Kronecker products and apply it to B00⊗B00 written out by hand.
        let eye = vec![vec![ONE, ZERO], vec![ZERO, ONE]];
        let cnot = vec![
            vec![ONE, ZERO, ZERO, ZERO],
            vec![ZERO, ONE, ZERO, ZERO],
            vec![ZERO, ZERO, ZERO, ONE],
            vec![ZERO, ZERO, ONE, ZERO],
        ];
        let op = kron_dense(&kron_dense(&eye, &cnot), &eye);

        let b = [c(R, 0.0), ZERO, ZERO, c(R, 0.0)];
        let mut pair = [ZERO; 16];
        for (i, bi) in b.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                pair[i * 4 + j] = bi * bj;
            }
        }
        let mut expect = [ZERO; 16];
        for (row, e) in expect.iter_mut().enumerate() {
            for (col, amp) in pair.iter().enumerate() {
                *e += op[row][col] * amp;
            }
        }

        let chi = resource_state();
        for (i, e) in expect.iter().enumerate() {
            assert!(
                (chi.amplitude(i) - e).norm() < 1e-14,
                "index {i}: {} vs {}",
                chi.amplitude(i),
                e
            );
        }
        // Frozen values: amplitude 1/2 at |0000⟩, |0011⟩, |1110⟩, |1101⟩.
        for i in [0b0000, 0b0011, 0b1110, 0b1101] {
            assert!((chi.amplitude(i) - c(0.5, 0.0)).norm() < 1e-14);
        }
        let support = [0b0000usize, 0b0011, 0b1110, 0b1101];
        for i in 0..16 {
            if !support.contains(&i) {
                assert!(chi.amplitude(i).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn resource_state_matches_reversed_ordering_expansion() {
        // The same state written with the tensor factors reversed has
        // coefficient 1/2 on |0000⟩, |1100⟩, |0111⟩, |1011⟩.
        let chi = resource_state();
        let reversed_support = [0b0000usize, 0b1100, 0b0111, 0b1011];
        for i in 0..16usize {
            let rev = ((i & 1) << 3) | ((i >> 1) & 1) << 2 | ((i >> 2) & 1) << 1 | (i >> 3);
            let expected = if reversed_support.contains(&i) {
                c(0.5, 0.0)
            } else {
                ZERO
            };
            assert!(
                (chi.amplitude(rev) - expected).norm() < 1e-14,
                "term {i:04b}"
            );
        }
    }

    #[test]
    fn measuring_a_bell_state_is_deterministic() {
        for outcome in BellOutcome::ALL {
            let s = bell_state(outcome.x, outcome.z);
            let probs = bell_probabilities(&s, 0, 1).unwrap();
            assert!((probs[outcome.index()] - 1.0).abs() < 1e-12);
            let mut rng = seeded(1);
            let (got, post) = bell_measure(&s, 0, 1, BranchSelector::Sample(&mut rng)).unwrap();
            assert_eq!(got, outcome);
            assert!(post.overlap(&s).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn product_zero_state_splits_between_two_branches() {
        // |00⟩ = (B00 + B01)/√2.
        let s = StateVector::basis_state(2, 0).unwrap();
        let probs = bell_probabilities(&s, 0, 1).unwrap();
        assert!((probs[BellOutcome::new(0, 0).index()] - 0.5).abs() < 1e-12);
        assert!((probs[BellOutcome::new(0, 1).index()] - 0.5).abs() < 1e-12);
        assert!(probs[BellOutcome::new(1, 0).index()] < 1e-12);
        assert!(probs[BellOutcome::new(1, 1).index()] < 1e-12);

        let (_, post) =
            bell_measure(&s, 0, 1, BranchSelector::Force(BellOutcome::new(0, 1))).unwrap();
        assert!(post.overlap(&bell_state(0, 1)).unwrap() > 1.0 - 1e-12);

        assert!(matches!(
            bell_measure(&s, 0, 1, BranchSelector::Force(BellOutcome::new(1, 0))),
            Err(QsimError::ForcedBranchImpossible { .. })
        ));
    }

    #[test]
    fn born_probabilities_sum_to_one() {
        let mut rng = seeded(23);
        for _ in 0..50 {
            let s = StateVector::random(3, &mut rng);
            let probs = bell_probabilities(&s, 0, 2).unwrap();
            let total: f64 = probs.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn teleportation_residual_is_x_then_z() {
        // ψ ⊗ B00 on qubits (0; 1,2): measuring (0,1) with outcome (x,z)
        // leaves qubit 2 in X^x Z^z ψ up to global phase, each branch with
        // probability 1/4.
        let mut rng = seeded(31);
        for _ in 0..100 {
            let psi = StateVector::random(1, &mut rng);
            let joint = psi.tensor(&bell_state(0, 0));
            for outcome in BellOutcome::ALL {
                let probs = bell_probabilities(&joint, 0, 1).unwrap();
                assert!((probs[outcome.index()] - 0.25).abs() < 1e-12);
                let (_, post) = bell_measure(&joint, 0, 1, BranchSelector::Force(outcome)).unwrap();
                let residual = post.remove_qubits_after_unmake(outcome);
                let mut expect = psi.clone();
                if outcome.z == 1 {
                    expect.apply_1q_mut(&Unitary2::z(), 0).unwrap();
                }
                if outcome.x == 1 {
                    expect.apply_1q_mut(&Unitary2::x(), 0).unwrap();
                }
                let (eq, mag) = phase_equal(&residual, &expect).unwrap();
                assert!(eq, "outcome {outcome}: overlap {mag}");
            }
        }
    }

    impl StateVector {
        /// Test helper: retire the measured pair (0,1) of a 3-qubit state.
        fn remove_qubits_after_unmake(mut self, outcome: BellOutcome) -> StateVector {
            unmake_bell_mut(&mut self, 0, 1).unwrap();
            self.remove_qubits(&[(0, outcome.z), (1, outcome.x)])
                .unwrap()
        }
    }

    #[test]
    fn unmake_bell_maps_outcome_to_bits() {
        for outcome in BellOutcome::ALL {
            let mut s = bell_state(outcome.x, outcome.z);
            unmake_bell_mut(&mut s, 0, 1).unwrap();
            let idx = ((outcome.z as usize) << 1) | outcome.x as usize;
            assert!(
                (s.amplitude(idx).norm() - 1.0).abs() < 1e-12,
                "outcome {outcome} should map to |{:02b}⟩",
                idx
            );
        }
    }
}
