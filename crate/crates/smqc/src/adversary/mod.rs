//! Adversary strategies against the nonlocal-CNOT gadget, verifiers for
//! their predicted effects, and the reduced-state vulnerability analysis.
//!
//! Three active deviations are modeled. A dishonest resource preparer can
//! apply a Clifford to the carrier qubit it hands over; the victim's output
//! is then off by that Clifford times an outcome-dependent Pauli, with
//! nothing observable locally. A dishonest measurer can rotate its Bell
//! basis, steering the gadget to evaluate CNOT on a rotated input. And a
//! party can flip the bit it exchanges, injecting a Pauli on the
//! counterpart's output. Passive (record-only) behavior is checked to leak
//! nothing: the exchanged bits are uniform regardless of the inputs.

mod attacks;
mod passive;
mod reduced;

pub use attacks::{
    run_bit_flip_attack, run_gadget_branches, run_resource_corruption_attack,
    run_rotated_basis_attack, AttackReport, BranchRecord,
};
pub use passive::{
    analyze_passive, exchanged_bits, synthetic_leaky_transcript, ClassStats, PassiveReport,
};
pub use reduced::{
    recover_local_unitary, reduced_target_comparison, x_eigenstate_comparison, ReducedComparison,
    TargetSign,
};

use thiserror::Error;

use crate::protocol::ProtocolError;
use crate::qsim::{Pauli, QsimError, Unitary2};
use crate::rng::SimRng;
use crate::TOL_PROTOCOL;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("operator is not a Clifford (conjugation does not preserve the Pauli group)")]
    NotClifford,
    #[error("class `{class}` has {got} transcripts, need at least {want}")]
    InsufficientSamples {
        class: String,
        got: usize,
        want: usize,
    },
    #[error("need at least two input classes, got {got}")]
    TooFewClasses { got: usize },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Which side of the gadget a strategy acts on: the control-qubit owner or
/// the target-qubit owner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetRole {
    Control,
    Target,
}

/// Which resource carrier a dishonest preparer corrupts. The control
/// carrier becomes the control owner's output, the target carrier the
/// target owner's output; in each case the victim is the receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorruptionTarget {
    ControlCarrier,
    TargetCarrier,
}

/// Per-party behavior during protocol runs.
#[derive(Clone, Debug, Default)]
pub enum AdversaryStrategy {
    #[default]
    Honest,
    /// Follows the protocol but keeps its full view for later analysis.
    PassiveRecorder,
    /// As resource preparer, applies a Clifford to one carrier before
    /// distributing the resource state.
    ResourceCorruption {
        clifford: Unitary2,
        target: CorruptionTarget,
    },
    /// Measures in the rotated Bell basis induced by `basis_change` on its
    /// own input qubit.
    RotatedBasis {
        basis_change: Unitary2,
        side: GadgetRole,
    },
    /// Flips the measurement bit it exchanges (commits to the complement
    /// and opens it consistently).
    BitFlip { side: GadgetRole },
}

impl AdversaryStrategy {
    /// Builds a resource-corruption strategy; non-Clifford operators are
    /// rejected.
    pub fn resource_corruption(
        clifford: Unitary2,
        target: CorruptionTarget,
    ) -> Result<Self, AttackError> {
        if !is_clifford(&clifford) {
            return Err(AttackError::NotClifford);
        }
        Ok(Self::ResourceCorruption { clifford, target })
    }

    /// True when the strategy never deviates from the honest message flow.
    pub fn follows_protocol(&self) -> bool {
        matches!(
            self,
            AdversaryStrategy::Honest | AdversaryStrategy::PassiveRecorder
        )
    }
}

/// True iff `u X u†` and `u Z u†` are each a Pauli up to phase within 1e-10.
pub fn is_clifford(u: &Unitary2) -> bool {
    conjugated_pauli(u, Pauli::X).is_some() && conjugated_pauli(u, Pauli::Z).is_some()
}

/// The Pauli (with phase) that `u P u†` equals, if any.
pub fn conjugated_pauli(u: &Unitary2, p: Pauli) -> Option<(Pauli, num_complex::Complex64)> {
    let m = u.mul(&p.matrix()).mul(&u.dagger());
    for candidate in Pauli::ALL {
        if let Some(phase) = m.phase_relative_to(&candidate.matrix(), TOL_PROTOCOL) {
            return Some((candidate, phase));
        }
    }
    None
}

/// The 24 single-qubit Cliffords (up to global phase), generated as the
/// closure of products of H and S. Deterministic order.
pub fn single_qubit_cliffords() -> Vec<Unitary2> {
    let gens = [Unitary2::h(), Unitary2::s()];
    let mut found: Vec<Unitary2> = vec![Unitary2::identity()];
    let mut frontier = found.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &gens {
            for f in &frontier {
                let candidate = g.mul(f);
                let seen = found
                    .iter()
                    .any(|k| candidate.phase_relative_to(k, 1e-9).is_some());
                if !seen {
                    found.push(candidate);
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    debug_assert_eq!(found.len(), 24);
    found
}

/// Uniformly random single-qubit Clifford.
pub fn random_clifford(rng: &mut SimRng) -> Unitary2 {
    use rand::Rng;
    let group = single_qubit_cliffords();
    group[rng.gen_range(0..group.len())]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_classification() {
        for u in [
            Unitary2::identity(),
            Unitary2::x(),
            Unitary2::y(),
            Unitary2::z(),
            Unitary2::h(),
            Unitary2::s(),
            Unitary2::s_dagger(),
        ] {
            assert!(is_clifford(&u));
        }
        assert!(!is_clifford(&Unitary2::t()));
        assert!(!is_clifford(&Unitary2::t_dagger()));
    }

    #[test]
    fn clifford_group_has_24_elements() {
        let group = single_qubit_cliffords();
        assert_eq!(group.len(), 24);
        for u in &group {
            assert!(is_clifford(u));
        }
        // Pairwise distinct up to phase.
        for (i, a) in group.iter().enumerate() {
            for b in group.iter().skip(i + 1) {
                assert!(a.phase_relative_to(b, 1e-9).is_none());
            }
        }
    }

    #[test]
    fn corruption_constructor_rejects_non_clifford() {
        assert!(matches!(
            AdversaryStrategy::resource_corruption(Unitary2::t(), CorruptionTarget::ControlCarrier),
            Err(AttackError::NotClifford)
        ));
        assert!(AdversaryStrategy::resource_corruption(
            Unitary2::h(),
            CorruptionTarget::TargetCarrier
        )
        .is_ok());
    }

    #[test]
    fn h_conjugates_x_to_z() {
        let (p, phase) = conjugated_pauli(&Unitary2::h(), Pauli::X).unwrap();
        assert_eq!(p, Pauli::Z);
        assert!((phase - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}
