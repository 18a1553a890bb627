//! Scheduling: splitting a circuit into local rounds and nonlocal-CNOT
//! rounds.
//!
//! Walking the circuit in order, local operations accumulate per party;
//! every nonlocal CNOT acts as a barrier that flushes the pending local
//! blocks (ordered by party id) and then emits one nonlocal round. Only the
//! per-qubit operation order is semantically constrained, and that order is
//! preserved exactly.

use super::{classify_cnot, CircuitOp, CnotKind, OwnershipMap};
use crate::PartyId;

/// One scheduled round: a party's local circuit block, or a two-party
/// nonlocal CNOT.
#[derive(Clone, Debug, PartialEq)]
pub enum Round {
    Local {
        party: PartyId,
        ops: Vec<CircuitOp>,
    },
    NonlocalCnot {
        control_party: PartyId,
        control_qubit: usize,
        target_party: PartyId,
        target_qubit: usize,
    },
}

/// Ordered rounds derived from a validated circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    rounds: Vec<Round>,
    num_qubits: usize,
    party_count: u16,
}

impl Schedule {
    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn party_count(&self) -> u16 {
        self.party_count
    }

    /// Number of nonlocal-CNOT rounds.
    pub fn nl_cnot_count(&self) -> usize {
        self.rounds
            .iter()
            .filter(|r| matches!(r, Round::NonlocalCnot { .. }))
            .count()
    }

    /// True if any round contains a measurement.
    pub fn has_measurements(&self) -> bool {
        self.rounds.iter().any(|r| match r {
            Round::Local { ops, .. } => {
                ops.iter().any(|op| matches!(op, CircuitOp::Measure { .. }))
            }
            Round::NonlocalCnot { .. } => false,
        })
    }

    /// The circuit operations in schedule order, nonlocal CNOTs restored as
    /// plain CNOT ops. Flattening preserves every per-qubit subsequence of
    /// the source circuit.
    pub fn flatten(&self) -> Vec<CircuitOp> {
        let mut out = Vec::new();
        for round in &self.rounds {
            match round {
                Round::Local { ops, .. } => out.extend(ops.iter().cloned()),
                Round::NonlocalCnot {
                    control_qubit,
                    target_qubit,
                    ..
                } => {
                    out.push(CircuitOp::Cnot {
                        control: *control_qubit,
                        target: *target_qubit,
                    });
                }
            }
        }
        out
    }
}

/// Builds the round schedule of a validated circuit.
pub fn build_schedule(ops: &[CircuitOp], ownership: &OwnershipMap) -> Schedule {
    let mut rounds = Vec::new();
    let mut pending: Vec<Vec<CircuitOp>> = vec![Vec::new(); ownership.party_count() as usize];

    let flush = |pending: &mut Vec<Vec<CircuitOp>>, rounds: &mut Vec<Round>| {
        for (p, ops) in pending.iter_mut().enumerate() {
            if !ops.is_empty() {
                rounds.push(Round::Local {
                    party: PartyId(p as u16),
                    ops: std::mem::take(ops),
                });
            }
        }
    };

    for op in ops {
        match op {
            CircuitOp::Cnot { control, target }
                if classify_cnot(*control, *target, ownership) == CnotKind::NonLocal =>
            {
                flush(&mut pending, &mut rounds);
                rounds.push(Round::NonlocalCnot {
                    control_party: ownership.owner(*control),
                    control_qubit: *control,
                    target_party: ownership.owner(*target),
                    target_qubit: *target,
                });
            }
            other => {
                let party = ownership.owner(other.qubits()[0]);
                pending[party.0 as usize].push(other.clone());
            }
        }
    }
    flush(&mut pending, &mut rounds);

    Schedule {
        rounds,
        num_qubits: ownership.num_qubits(),
        party_count: ownership.party_count(),
    }
}

/// Extracts the subsequence of operations touching `qubit`.
pub fn per_qubit_sequence(ops: &[CircuitOp], qubit: usize) -> Vec<CircuitOp> {
    ops.iter()
        .filter(|op| op.qubits().contains(&qubit))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateSpec;

    fn ownership_three() -> OwnershipMap {
        // q0 -> P0, q1 -> P1, q2 -> P1
        OwnershipMap::new(2, vec![PartyId(0), PartyId(1), PartyId(1)])
    }

    #[test]
    fn local_only_circuit_has_no_nonlocal_rounds() {
        let own = ownership_three();
        let ops = vec![
            CircuitOp::Single {
                gate: GateSpec::H,
                qubit: 0,
            },
            CircuitOp::Cnot {
                control: 1,
                target: 2,
            },
        ];
        let s = build_schedule(&ops, &own);
        assert_eq!(s.nl_cnot_count(), 0);
        assert!(s.rounds().iter().all(|r| matches!(r, Round::Local { .. })));
    }

    #[test]
    fn barrier_splits_rounds_as_derived_by_hand() {
        // H(q0 at P0), CNOT(q0 -> q1, P0 -> P1), X(q1 at P1)
        // gives Local(P0), NonlocalCnot, Local(P1).
        let own = ownership_three();
        let ops = vec![
            CircuitOp::Single {
                gate: GateSpec::H,
                qubit: 0,
            },
            CircuitOp::Cnot {
                control: 0,
                target: 1,
            },
            CircuitOp::Single {
                gate: GateSpec::X,
                qubit: 1,
            },
        ];
        let s = build_schedule(&ops, &own);
        assert_eq!(s.rounds().len(), 3);
        assert!(matches!(
            &s.rounds()[0],
            Round::Local { party: PartyId(0), ops } if ops.len() == 1
        ));
        assert!(matches!(
            &s.rounds()[1],
            Round::NonlocalCnot {
                control_party: PartyId(0),
                control_qubit: 0,
                target_party: PartyId(1),
                target_qubit: 1
            }
        ));
        assert!(matches!(
            &s.rounds()[2],
            Round::Local { party: PartyId(1), ops } if ops.len() == 1
        ));
    }

    #[test]
    fn nonlocal_count_matches_classification() {
        let own = ownership_three();
        let ops = vec![
            CircuitOp::Cnot {
                control: 0,
                target: 1,
            }, // nonlocal
            CircuitOp::Cnot {
                control: 2,
                target: 1,
            }, // local
            CircuitOp::Cnot {
                control: 1,
                target: 0,
            }, // nonlocal
        ];
        let s = build_schedule(&ops, &own);
        assert_eq!(s.nl_cnot_count(), 2);
    }

    #[test]
    fn flatten_preserves_per_qubit_order() {
        let own = ownership_three();
        let ops = vec![
            CircuitOp::Single {
                gate: GateSpec::H,
                qubit: 1,
            },
            CircuitOp::Single {
                gate: GateSpec::X,
                qubit: 0,
            },
            CircuitOp::Cnot {
                control: 0,
                target: 2,
            },
            CircuitOp::Single {
                gate: GateSpec::Z,
                qubit: 1,
            },
            CircuitOp::Measure { qubits: vec![1, 2] },
        ];
        let s = build_schedule(&ops, &own);
        let flat = s.flatten();
        for q in 0..3 {
            assert_eq!(
                per_qubit_sequence(&ops, q),
                per_qubit_sequence(&flat, q),
                "qubit {q}"
            );
        }
    }
}
