//! Monolithic ground-truth execution: the circuit applied in file order on
//! the joint state, as if a single machine held every qubit. Distributed
//! runs are compared against this.

use crate::qsim::{BitSelector, QsimError, StateVector, Unitary4};
use crate::rng::SimRng;

use super::CircuitOp;

/// Runs the circuit on `input` and returns the final state together with
/// all measured bits in operation order. Measurements sample the Born rule
/// from `rng` and collapse the state; later gates on measured qubits are
/// allowed.
pub fn oracle_simulate(
    ops: &[CircuitOp],
    input: &StateVector,
    rng: &mut SimRng,
) -> Result<(StateVector, Vec<u8>), QsimError> {
    let mut state = input.clone();
    let mut bits = Vec::new();
    for op in ops {
        match op {
            CircuitOp::Single { gate, qubit } => {
                state.apply_1q_mut(&gate.unitary()?, *qubit)?;
            }
            CircuitOp::Cnot { control, target } => {
                state.apply_2q_mut(&Unitary4::cnot(), *control, *target)?;
            }
            CircuitOp::Measure { qubits } => {
                for &q in qubits {
                    bits.push(state.measure_qubit_mut(q, BitSelector::Sample(rng))?);
                }
            }
        }
    }
    Ok((state, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateSpec;
    use crate::qsim::bell_state;
    use crate::rng::seeded;

    #[test]
    fn single_cnot_flips_target() {
        let input = StateVector::basis_state(2, 0b10).unwrap();
        let ops = vec![CircuitOp::Cnot {
            control: 0,
            target: 1,
        }];
        let mut rng = seeded(1);
        let (out, bits) = oracle_simulate(&ops, &input, &mut rng).unwrap();
        assert!(bits.is_empty());
        assert!((out.amplitude(0b11).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_preparation_circuit() {
        let input = StateVector::basis_state(2, 0).unwrap();
        let ops = vec![
            CircuitOp::Single {
                gate: GateSpec::H,
                qubit: 0,
            },
            CircuitOp::Cnot {
                control: 0,
                target: 1,
            },
        ];
        let mut rng = seeded(1);
        let (out, _) = oracle_simulate(&ops, &input, &mut rng).unwrap();
        assert!(out.overlap(&bell_state(0, 0)).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn measurement_collapses_joint_state() {
        // Measuring one half of a Bell pair determines the other half.
        let input = StateVector::basis_state(2, 0).unwrap();
        let ops = vec![
            CircuitOp::Single {
                gate: GateSpec::H,
                qubit: 0,
            },
            CircuitOp::Cnot {
                control: 0,
                target: 1,
            },
            CircuitOp::Measure { qubits: vec![0, 1] },
        ];
        for seed in 0..20 {
            let mut rng = seeded(seed);
            let (_, bits) = oracle_simulate(&ops, &input, &mut rng).unwrap();
            assert_eq!(bits[0], bits[1]);
        }
    }
}
