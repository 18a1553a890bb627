//! Circuit representation, the no-nonlocal-measurement model check,
//! CNOT classification, and round scheduling.
//!
//! Circuits consist of single-qubit gates, CNOTs, and computational-basis
//! measurements. A measurement is *local* when all measured qubits belong to
//! one party; circuits containing cross-owner measurements are rejected
//! before any schedule is produced. CNOTs whose endpoints are owned by two
//! different parties are the nonlocal rounds of the schedule.

pub mod gen;
mod oracle;
mod parse;
mod schedule;

pub use oracle::oracle_simulate;
pub use parse::{parse_circuit, ParseError};
pub use schedule::{build_schedule, per_qubit_sequence, Round, Schedule};

use num_complex::Complex64;
use thiserror::Error;

use crate::qsim::{QsimError, Unitary2};
use crate::{PartyId, TOL_ALGEBRAIC};

/// A named or explicit single-qubit gate as written in a circuit file.
/// Explicit matrices are validated for unitarity by [`validate`], not at
/// parse time.
#[derive(Clone, Debug, PartialEq)]
pub enum GateSpec {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Custom([[Complex64; 2]; 2]),
}

impl GateSpec {
    pub fn unitary(&self) -> Result<Unitary2, QsimError> {
        match self {
            GateSpec::X => Ok(Unitary2::x()),
            GateSpec::Y => Ok(Unitary2::y()),
            GateSpec::Z => Ok(Unitary2::z()),
            GateSpec::H => Ok(Unitary2::h()),
            GateSpec::S => Ok(Unitary2::s()),
            GateSpec::T => Ok(Unitary2::t()),
            GateSpec::Custom(m) => Unitary2::new(*m),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateSpec::X => "x",
            GateSpec::Y => "y",
            GateSpec::Z => "z",
            GateSpec::H => "h",
            GateSpec::S => "s",
            GateSpec::T => "t",
            GateSpec::Custom(_) => "u",
        }
    }
}

/// One operation of a circuit, in file order.
#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    Single { gate: GateSpec, qubit: usize },
    Cnot { control: usize, target: usize },
    Measure { qubits: Vec<usize> },
}

impl CircuitOp {
    /// Qubits the operation touches.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            CircuitOp::Single { qubit, .. } => vec![*qubit],
            CircuitOp::Cnot { control, target } => vec![*control, *target],
            CircuitOp::Measure { qubits } => qubits.clone(),
        }
    }
}

/// Assignment of every circuit qubit to exactly one party.
#[derive(Clone, Debug, PartialEq)]
pub struct OwnershipMap {
    party_count: u16,
    owner: Vec<PartyId>,
}

impl OwnershipMap {
    pub fn new(party_count: u16, owner: Vec<PartyId>) -> Self {
        assert!(owner.iter().all(|p| p.0 < party_count));
        Self { party_count, owner }
    }

    pub fn party_count(&self) -> u16 {
        self.party_count
    }

    pub fn num_qubits(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, qubit: usize) -> PartyId {
        self.owner[qubit]
    }

    /// Number of input qubits held by `party`.
    pub fn input_size(&self, party: PartyId) -> usize {
        self.owner.iter().filter(|&&p| p == party).count()
    }

    /// Ascending qubit indices owned by `party`.
    pub fn qubits_of(&self, party: PartyId) -> Vec<usize> {
        (0..self.owner.len())
            .filter(|&q| self.owner[q] == party)
            .collect()
    }
}

/// Whether a CNOT stays within one party or crosses two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnotKind {
    Local,
    NonLocal,
}

/// Classifies a CNOT by the ownership of its endpoints.
pub fn classify_cnot(control: usize, target: usize, ownership: &OwnershipMap) -> CnotKind {
    if ownership.owner(control) == ownership.owner(target) {
        CnotKind::Local
    } else {
        CnotKind::NonLocal
    }
}

/// Why an operation was rejected by [`validate`].
#[derive(Clone, Debug, PartialEq, Error)]
pub enum RejectionReason {
    #[error("nonlocal measurement rejected: qubits {qubits:?} span parties {parties:?}")]
    NonlocalMeasurement {
        qubits: Vec<usize>,
        parties: Vec<PartyId>,
    },
    #[error("gate matrix is not unitary within {TOL_ALGEBRAIC:.0e}")]
    NonUnitaryGate,
}

/// A rejected operation, by position in the circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub op_index: usize,
    pub reason: RejectionReason,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "op {}: {}", self.op_index, self.reason)
    }
}

/// Checks a parsed circuit against the computation model: measurements must
/// be single-owner and explicit gate matrices must be unitary. Returns all
/// rejections rather than stopping at the first.
pub fn validate(ops: &[CircuitOp], ownership: &OwnershipMap) -> Result<(), Vec<Rejection>> {
    let mut rejections = Vec::new();
    for (op_index, op) in ops.iter().enumerate() {
        match op {
            CircuitOp::Measure { qubits } => {
                let mut parties: Vec<PartyId> =
                    qubits.iter().map(|&q| ownership.owner(q)).collect();
                parties.sort_unstable();
                parties.dedup();
                if parties.len() > 1 {
                    rejections.push(Rejection {
                        op_index,
                        reason: RejectionReason::NonlocalMeasurement {
                            qubits: qubits.clone(),
                            parties,
                        },
                    });
                }
            }
            CircuitOp::Single { gate, .. } => {
                if gate.unitary().is_err() {
                    rejections.push(Rejection {
                        op_index,
                        reason: RejectionReason::NonUnitaryGate,
                    });
                }
            }
            CircuitOp::Cnot { .. } => {}
        }
    }
    if rejections.is_empty() {
        Ok(())
    } else {
        Err(rejections)
    }
}
