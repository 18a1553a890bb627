//! Random circuit instances for property checks and the verification
//! suites.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{CircuitOp, GateSpec, OwnershipMap};
use crate::qsim::Unitary2;
use crate::rng::SimRng;
use crate::PartyId;

/// Shape of a generated circuit.
#[derive(Clone, Copy, Debug)]
pub struct CircuitShape {
    pub parties: u16,
    pub qubits: usize,
    pub gates: usize,
    pub nonlocal_cnots: usize,
    pub with_measurements: bool,
}

/// Draws a circuit with exactly `nonlocal_cnots` cross-owner CNOTs and
/// `gates` operations in total, every party owning at least one qubit.
pub fn random_circuit(shape: &CircuitShape, rng: &mut SimRng) -> (Vec<CircuitOp>, OwnershipMap) {
    assert!(
        shape.qubits >= shape.parties as usize,
        "need one qubit per party"
    );
    assert!(shape.parties >= 2 || shape.nonlocal_cnots == 0);
    let total = shape.gates.max(shape.nonlocal_cnots);

    let mut owner: Vec<PartyId> = (0..shape.qubits)
        .map(|q| {
            if q < shape.parties as usize {
                PartyId(q as u16)
            } else {
                PartyId(rng.gen_range(0..shape.parties))
            }
        })
        .collect();
    owner.shuffle(rng);
    let ownership = OwnershipMap::new(shape.parties, owner);

    let mut nonlocal_slots: Vec<usize> = (0..total).collect();
    nonlocal_slots.shuffle(rng);
    nonlocal_slots.truncate(shape.nonlocal_cnots);
    nonlocal_slots.sort_unstable();

    // Parties with two or more qubits can host local CNOTs.
    let multi_qubit_parties: Vec<PartyId> = (0..shape.parties)
        .map(PartyId)
        .filter(|&p| ownership.input_size(p) >= 2)
        .collect();

    let mut ops = Vec::with_capacity(total);
    for slot in 0..total {
        if nonlocal_slots.binary_search(&slot).is_ok() {
            ops.push(random_nonlocal_cnot(&ownership, rng));
            continue;
        }
        let roll: f64 = rng.gen_range(0.0..1.0);
        if roll < 0.15 {
            let m = Unitary2::random(rng).rows();
            ops.push(CircuitOp::Single {
                gate: GateSpec::Custom(m),
                qubit: rng.gen_range(0..shape.qubits),
            });
        } else if roll < 0.75 || multi_qubit_parties.is_empty() {
            let gate = match rng.gen_range(0..6) {
                0 => GateSpec::X,
                1 => GateSpec::Y,
                2 => GateSpec::Z,
                3 => GateSpec::H,
                4 => GateSpec::S,
                _ => GateSpec::T,
            };
            ops.push(CircuitOp::Single {
                gate,
                qubit: rng.gen_range(0..shape.qubits),
            });
        } else if roll < 0.92 || !shape.with_measurements {
            let party = multi_qubit_parties[rng.gen_range(0..multi_qubit_parties.len())];
            let mut qs = ownership.qubits_of(party);
            qs.shuffle(rng);
            ops.push(CircuitOp::Cnot {
                control: qs[0],
                target: qs[1],
            });
        } else {
            let party = PartyId(rng.gen_range(0..shape.parties));
            let mut qs = ownership.qubits_of(party);
            qs.shuffle(rng);
            let count = rng.gen_range(1..=qs.len().min(2));
            qs.truncate(count);
            ops.push(CircuitOp::Measure { qubits: qs });
        }
    }
    (ops, ownership)
}

fn random_nonlocal_cnot(ownership: &OwnershipMap, rng: &mut SimRng) -> CircuitOp {
    loop {
        let control = rng.gen_range(0..ownership.num_qubits());
        let target = rng.gen_range(0..ownership.num_qubits());
        if control != target && ownership.owner(control) != ownership.owner(target) {
            return CircuitOp::Cnot { control, target };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{classify_cnot, validate, CnotKind};
    use crate::rng::seeded;

    #[test]
    fn generated_circuits_validate_and_hit_nonlocal_budget() {
        let mut rng = seeded(99);
        for k in 0..4usize {
            let shape = CircuitShape {
                parties: 3,
                qubits: 6,
                gates: 30,
                nonlocal_cnots: k,
                with_measurements: false,
            };
            let (ops, own) = random_circuit(&shape, &mut rng);
            assert!(validate(&ops, &own).is_ok());
            let nonlocal = ops
                .iter()
                .filter(|op| match op {
                    CircuitOp::Cnot { control, target } => {
                        classify_cnot(*control, *target, &own) == CnotKind::NonLocal
                    }
                    _ => false,
                })
                .count();
            assert_eq!(nonlocal, k);
            assert_eq!(ops.len(), 30);
        }
    }

    #[test]
    fn measured_circuits_stay_local() {
        let mut rng = seeded(7);
        let shape = CircuitShape {
            parties: 2,
            qubits: 4,
            gates: 40,
            nonlocal_cnots: 2,
            with_measurements: true,
        };
        for _ in 0..20 {
            let (ops, own) = random_circuit(&shape, &mut rng);
            assert!(validate(&ops, &own).is_ok());
        }
    }
}
