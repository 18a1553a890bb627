//! The two-party nonlocal-CNOT gadget, the one-time-pad TTP backend, and
//! the multi-party runtime.
//!
//! One gadget round consumes a four-qubit resource state: the preparer keeps
//! one Bell half pair and hands the other two qubits over. Both parties
//! Bell-measure (control input against resource qubit 1, resource qubit 4
//! against target input), exchange the two correction-relevant bits through
//! a commitment-based swap, and apply Pauli corrections to the two middle
//! resource qubits, which become the new control/target carriers. The
//! measured qubits are retired from the register and the carriers are
//! remapped to the original circuit positions, so the register layout is
//! stable across rounds. For every measurement branch the honest output
//! equals `CNOT(control ⊗ target)` up to global phase.
//!
//! The only party-to-party traffic in an honest round is one two-qubit
//! transfer and the four swap messages; local qubits never travel.

pub mod qotp;
mod transcript;

pub use transcript::{Actor, Event, EventKind, Transcript};

use thiserror::Error;

use crate::adversary::{AdversaryStrategy, CorruptionTarget, GadgetRole};
use crate::circuit::{CircuitOp, OwnershipMap, Round, Schedule};
use crate::commitment::{run_swap, SwapBehavior, SwapError, SwapMessage};
use crate::qsim::{
    bell_measure, bell_probabilities, resource_state, BellOutcome, BitSelector, BranchSelector,
    QsimError, StateVector, Unitary2, Unitary4,
};
use crate::rng::{substream, SimRng};
use crate::PartyId;

use qotp::{qotp_decrypt_mut, qotp_encrypt_mut, ttp_nl_cnot, QotpKey};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Swap(#[from] SwapError),
    #[error("input for party {party} has {got} qubits, expected {want}")]
    InputSizeMismatch {
        party: PartyId,
        got: usize,
        want: usize,
    },
    #[error("input list has {got} entries for {want} parties")]
    InputCountMismatch { got: usize, want: usize },
    #[error("strategy list has {got} entries for {want} parties")]
    StrategyCountMismatch { got: usize, want: usize },
    #[error("forced-branch list has {got} entries for {want} nonlocal rounds")]
    BranchCountMismatch { got: usize, want: usize },
    #[error("circuit measurements cannot run under forced branches; use sampled mode")]
    MeasurementInForcedMode,
    #[error("the TTP backend has no hook for strategy deviations; only honest/passive parties are supported")]
    StrategyUnsupportedByBackend,
}

/// Per-round gadget options.
#[derive(Clone, Debug)]
pub struct NlCnotOptions {
    /// Which side prepares the resource state. The preparer keeps its half
    /// and transfers the other two qubits.
    pub preparer: GadgetRole,
    /// Disabled only by fault-injection tests; honest runs always correct.
    pub apply_corrections: bool,
}

impl Default for NlCnotOptions {
    fn default() -> Self {
        Self {
            preparer: GadgetRole::Control,
            apply_corrections: true,
        }
    }
}

/// Branch selection for one gadget round.
#[derive(Clone, Copy, Debug)]
pub enum BranchChoice {
    Sample,
    Force {
        control: BellOutcome,
        target: BellOutcome,
    },
}

/// Where one nonlocal CNOT acts.
#[derive(Clone, Copy, Debug)]
pub struct NlCnotSpec {
    pub control_party: PartyId,
    pub control_qubit: usize,
    pub target_party: PartyId,
    pub target_qubit: usize,
}

/// Observables of one executed gadget round.
#[derive(Clone, Copy, Debug)]
pub struct NlCnotInfo {
    pub control_outcome: BellOutcome,
    pub target_outcome: BellOutcome,
    /// Bit committed by the control owner (after any flip hook).
    pub sent_x: u8,
    /// Bit committed by the target owner (after any flip hook).
    pub sent_z: u8,
    /// The control owner's bit as verified by the target owner.
    pub received_x: u8,
    /// The target owner's bit as verified by the control owner.
    pub received_z: u8,
    /// Joint probability of the observed/forced branch.
    pub branch_probability: f64,
}

/// Runs one nonlocal CNOT on the joint state. Consumes four fresh ancilla
/// positions internally and returns a state with the original register
/// layout: the new carriers sit at `control_qubit` and `target_qubit`.
pub fn nl_cnot(
    state: StateVector,
    spec: &NlCnotSpec,
    strategies: (&AdversaryStrategy, &AdversaryStrategy),
    options: &NlCnotOptions,
    choice: BranchChoice,
    rng: &mut SimRng,
    transcript: &mut Transcript,
) -> Result<(StateVector, NlCnotInfo), ProtocolError> {
    let n = state.num_qubits();
    let (e1, e2, e3, e4) = (n, n + 1, n + 2, n + 3);
    let mut state = state.tensor(&resource_state());

    // Resource preparation, with the preparer's corruption hook applied
    // before anything leaves its hands.
    let (preparer_party, receiver_party, sent_qubits) = match options.preparer {
        GadgetRole::Control => (spec.control_party, spec.target_party, [e3, e4]),
        GadgetRole::Target => (spec.target_party, spec.control_party, [e1, e2]),
    };
    let preparer_strategy = if preparer_party == spec.control_party {
        strategies.0
    } else {
        strategies.1
    };
    if let AdversaryStrategy::ResourceCorruption { clifford, target } = preparer_strategy {
        let corrupted = match target {
            CorruptionTarget::ControlCarrier => e2,
            CorruptionTarget::TargetCarrier => e3,
        };
        state.apply_1q_mut(clifford, corrupted)?;
    }
    transcript.record(EventKind::QubitTransfer {
        from: Actor::Party(preparer_party),
        to: Actor::Party(receiver_party),
        qubits: [sent_qubits[0] as u16, sent_qubits[1] as u16].to_vec(),
    });

    // Rotated-basis deviations: measuring in the basis {U†⊗I |B_xz⟩} is
    // applying U to the measurer's own input first.
    if let AdversaryStrategy::RotatedBasis {
        basis_change,
        side: GadgetRole::Control,
    } = strategies.0
    {
        state.apply_1q_mut(basis_change, spec.control_qubit)?;
    }
    if let AdversaryStrategy::RotatedBasis {
        basis_change,
        side: GadgetRole::Target,
    } = strategies.1
    {
        state.apply_1q_mut(basis_change, spec.target_qubit)?;
    }

    // Both Bell measurements.
    let (control_choice, target_choice) = match choice {
        BranchChoice::Sample => (None, None),
        BranchChoice::Force { control, target } => (Some(control), Some(target)),
    };
    let probs = bell_probabilities(&state, spec.control_qubit, e1)?;
    let (control_outcome, next) = bell_measure(
        &state,
        spec.control_qubit,
        e1,
        match control_choice {
            Some(o) => BranchSelector::Force(o),
            None => BranchSelector::Sample(rng),
        },
    )?;
    state = next;
    let mut branch_probability = probs[control_outcome.index()];
    transcript.record(EventKind::LocalMeasurement {
        party: spec.control_party,
        bits: vec![control_outcome.x, control_outcome.z],
    });

    let probs = bell_probabilities(&state, e4, spec.target_qubit)?;
    let (target_outcome, next) = bell_measure(
        &state,
        e4,
        spec.target_qubit,
        match target_choice {
            Some(o) => BranchSelector::Force(o),
            None => BranchSelector::Sample(rng),
        },
    )?;
    state = next;
    branch_probability *= probs[target_outcome.index()];
    transcript.record(EventKind::LocalMeasurement {
        party: spec.target_party,
        bits: vec![target_outcome.x, target_outcome.z],
    });

    // The sanctioned exchange of the two correction bits. A bit-flipping
    // party lies consistently: it commits to and opens the complement.
    let sent_x = match strategies.0 {
        AdversaryStrategy::BitFlip {
            side: GadgetRole::Control,
        } => 1 - control_outcome.x,
        _ => control_outcome.x,
    };
    let sent_z = match strategies.1 {
        AdversaryStrategy::BitFlip {
            side: GadgetRole::Target,
        } => 1 - target_outcome.z,
        _ => target_outcome.z,
    };
    let swap = run_swap(
        sent_x,
        sent_z,
        (spec.control_party.0, spec.target_party.0),
        (SwapBehavior::Honest, SwapBehavior::Honest),
        rng,
    )?;
    for msg in &swap.transcript.messages {
        let (from, to) = if msg.sender == spec.control_party.0 {
            (spec.control_party, spec.target_party)
        } else {
            (spec.target_party, spec.control_party)
        };
        transcript.record(EventKind::Commitment {
            from: Actor::Party(from),
            to: Actor::Party(to),
            payload: SwapMessage::to_bytes(msg),
        });
    }
    let received_x = swap.a_to_b;
    let received_z = swap.b_to_a;

    // Pauli corrections on the carriers, applied right-to-left as written:
    // control side Z^{recv z} X^{own x} Z^{own z}, target side
    // Z^{own z} X^{recv x} X^{own x}.
    if options.apply_corrections {
        if control_outcome.z == 1 {
            state.apply_1q_mut(&Unitary2::z(), e2)?;
        }
        if control_outcome.x == 1 {
            state.apply_1q_mut(&Unitary2::x(), e2)?;
        }
        if received_z == 1 {
            state.apply_1q_mut(&Unitary2::z(), e2)?;
        }
        if target_outcome.x == 1 {
            state.apply_1q_mut(&Unitary2::x(), e3)?;
        }
        if received_x == 1 {
            state.apply_1q_mut(&Unitary2::x(), e3)?;
        }
        if target_outcome.z == 1 {
            state.apply_1q_mut(&Unitary2::z(), e3)?;
        }
    }

    // Retire the measured pairs and put the carriers at the consumed
    // circuit positions.
    crate::qsim::unmake_bell_mut(&mut state, spec.control_qubit, e1)?;
    crate::qsim::unmake_bell_mut(&mut state, e4, spec.target_qubit)?;
    let state = state.remove_qubits(&[
        (spec.control_qubit, control_outcome.z),
        (e1, control_outcome.x),
        (e4, target_outcome.z),
        (spec.target_qubit, target_outcome.x),
    ])?;

    // Survivors in ascending old index: originals minus the two consumed
    // inputs, then e2, e3.
    let survivors: Vec<usize> = (0..n + 4)
        .filter(|&q| q != spec.control_qubit && q != spec.target_qubit && q != e1 && q != e4)
        .collect();
    let position_of = |old: usize| survivors.iter().position(|&s| s == old).expect("survivor");
    let order: Vec<usize> = (0..n)
        .map(|p| {
            if p == spec.control_qubit {
                position_of(e2)
            } else if p == spec.target_qubit {
                position_of(e3)
            } else {
                position_of(p)
            }
        })
        .collect();
    let state = state.reorder(&order)?;
    transcript.record(EventKind::RegisterRemap {
        moves: vec![
            (e2 as u16, spec.control_qubit as u16),
            (e3 as u16, spec.target_qubit as u16),
        ],
    });

    Ok((
        state,
        NlCnotInfo {
            control_outcome,
            target_outcome,
            sent_x,
            sent_z,
            received_x,
            received_z,
            branch_probability,
        },
    ))
}

/// Convenience wrapper for single-gadget analysis: runs one nonlocal CNOT
/// on `control ⊗ target` with party 0 as control owner and party 1 as
/// target owner, returning the two-qubit output.
pub fn run_gadget(
    control_in: &StateVector,
    target_in: &StateVector,
    strategies: (&AdversaryStrategy, &AdversaryStrategy),
    options: &NlCnotOptions,
    choice: BranchChoice,
    rng: &mut SimRng,
) -> Result<(StateVector, NlCnotInfo, Transcript), ProtocolError> {
    let spec = NlCnotSpec {
        control_party: PartyId(0),
        control_qubit: 0,
        target_party: PartyId(1),
        target_qubit: 1,
    };
    let joint = control_in.tensor(target_in);
    let mut transcript = Transcript::new();
    let (out, info) = nl_cnot(
        joint,
        &spec,
        strategies,
        options,
        choice,
        rng,
        &mut transcript,
    )?;
    Ok((out, info, transcript))
}

/// Execution backend for nonlocal rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// The two owners run the gadget between themselves.
    Peer,
    /// Both qubits travel one-time-pad encrypted to a trusted third party.
    Ttp,
}

/// Branch handling for a full run.
#[derive(Clone, Debug)]
pub enum ExecMode {
    Sampled,
    /// One `(control, target)` outcome pair per nonlocal round, in schedule
    /// order.
    Forced(Vec<(BellOutcome, BellOutcome)>),
}

/// Full-run configuration.
#[derive(Clone, Debug)]
pub struct SmqcConfig {
    pub backend: Backend,
    pub mode: ExecMode,
    /// Per-party strategies, indexed by party id.
    pub strategies: Vec<AdversaryStrategy>,
    pub options: NlCnotOptions,
    /// Seed material for the key streams preshared with the TTP role.
    pub ttp_seed: u64,
}

impl SmqcConfig {
    pub fn honest(parties: u16) -> Self {
        Self {
            backend: Backend::Peer,
            mode: ExecMode::Sampled,
            strategies: vec![AdversaryStrategy::Honest; parties as usize],
            options: NlCnotOptions::default(),
            ttp_seed: 0,
        }
    }
}

/// Per-party initial states, each over that party's own qubits in ascending
/// qubit order.
#[derive(Clone, Debug)]
pub struct PartyInputs {
    states: Vec<StateVector>,
}

impl PartyInputs {
    pub fn new(states: Vec<StateVector>) -> Self {
        Self { states }
    }

    /// Every party starts in |0...0⟩.
    pub fn all_zero(ownership: &OwnershipMap) -> Self {
        let states = (0..ownership.party_count())
            .map(|p| {
                let k = ownership.input_size(PartyId(p)).max(1);
                StateVector::basis_state(k, 0).expect("index 0 in range")
            })
            .collect();
        Self { states }
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    /// Embeds the per-party states into the joint register. Party p's k-th
    /// qubit (ascending order) lands on the k-th qubit owned by p.
    pub fn joint(&self, ownership: &OwnershipMap) -> Result<StateVector, ProtocolError> {
        let n = ownership.party_count() as usize;
        if self.states.len() != n {
            return Err(ProtocolError::InputCountMismatch {
                got: self.states.len(),
                want: n,
            });
        }
        for (p, s) in self.states.iter().enumerate() {
            let want = ownership.input_size(PartyId(p as u16));
            if s.num_qubits() != want {
                return Err(ProtocolError::InputSizeMismatch {
                    party: PartyId(p as u16),
                    got: s.num_qubits(),
                    want,
                });
            }
        }
        let m = ownership.num_qubits();
        let per_party_qubits: Vec<Vec<usize>> = (0..n)
            .map(|p| ownership.qubits_of(PartyId(p as u16)))
            .collect();
        let mut amps = Vec::with_capacity(1 << m);
        for index in 0..(1usize << m) {
            let mut amp = num_complex::Complex64::new(1.0, 0.0);
            for (p, qubits) in per_party_qubits.iter().enumerate() {
                let k = qubits.len();
                let mut local = 0usize;
                for (pos, &q) in qubits.iter().enumerate() {
                    if (index >> (m - 1 - q)) & 1 == 1 {
                        local |= 1 << (k - 1 - pos);
                    }
                }
                amp *= self.states[p].amplitude(local);
                if amp.norm_sqr() == 0.0 {
                    break;
                }
            }
            amps.push(amp);
        }
        Ok(StateVector::from_amplitudes(amps)?)
    }
}

/// Result of a full run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Joint final state over the circuit qubits; each party holds its own
    /// positions per the ownership map.
    pub state: StateVector,
    /// Measured bits per party, in execution order.
    pub measured: Vec<(PartyId, Vec<u8>)>,
    pub transcript: Transcript,
    /// Per nonlocal round observables, in schedule order (peer backend).
    pub rounds: Vec<NlCnotInfo>,
}

/// Executes a schedule: local rounds run directly on the joint state,
/// nonlocal rounds go through the gadget or the TTP call.
pub fn run_smqc(
    schedule: &Schedule,
    ownership: &OwnershipMap,
    inputs: &PartyInputs,
    cfg: &SmqcConfig,
    rng: &mut SimRng,
) -> Result<RunOutcome, ProtocolError> {
    let parties = ownership.party_count() as usize;
    if cfg.strategies.len() != parties {
        return Err(ProtocolError::StrategyCountMismatch {
            got: cfg.strategies.len(),
            want: parties,
        });
    }
    if let ExecMode::Forced(branches) = &cfg.mode {
        // TTP rounds have no measurement branches; the forced list only
        // drives the peer gadget.
        let want = if cfg.backend == Backend::Peer {
            schedule.nl_cnot_count()
        } else {
            0
        };
        if branches.len() != want {
            return Err(ProtocolError::BranchCountMismatch {
                got: branches.len(),
                want,
            });
        }
        if schedule.has_measurements() {
            return Err(ProtocolError::MeasurementInForcedMode);
        }
    }
    if cfg.backend == Backend::Ttp && !cfg.strategies.iter().all(|s| s.follows_protocol()) {
        return Err(ProtocolError::StrategyUnsupportedByBackend);
    }

    let mut state = inputs.joint(ownership)?;
    let mut transcript = Transcript::new();
    let mut measured: Vec<(PartyId, Vec<u8>)> = (0..parties)
        .map(|p| (PartyId(p as u16), Vec::new()))
        .collect();
    let mut rounds_info = Vec::new();
    let mut ttp_streams: Vec<SimRng> = (0..parties)
        .map(|p| substream(cfg.ttp_seed, p as u64))
        .collect();
    let mut nl_index = 0usize;

    for round in schedule.rounds() {
        match round {
            Round::Local { party, ops } => {
                run_local_ops(&mut state, *party, ops, &mut transcript, &mut measured, rng)?;
            }
            Round::NonlocalCnot {
                control_party,
                control_qubit,
                target_party,
                target_qubit,
            } => {
                let spec = NlCnotSpec {
                    control_party: *control_party,
                    control_qubit: *control_qubit,
                    target_party: *target_party,
                    target_qubit: *target_qubit,
                };
                match cfg.backend {
                    Backend::Peer => {
                        let choice = match &cfg.mode {
                            ExecMode::Sampled => BranchChoice::Sample,
                            ExecMode::Forced(branches) => {
                                let (c, t) = branches[nl_index];
                                BranchChoice::Force {
                                    control: c,
                                    target: t,
                                }
                            }
                        };
                        let strategies = (
                            &cfg.strategies[control_party.0 as usize],
                            &cfg.strategies[target_party.0 as usize],
                        );
                        let (next, info) = nl_cnot(
                            state,
                            &spec,
                            strategies,
                            &cfg.options,
                            choice,
                            rng,
                            &mut transcript,
                        )?;
                        state = next;
                        rounds_info.push(info);
                    }
                    Backend::Ttp => {
                        run_ttp_round(&mut state, &spec, &mut ttp_streams, &mut transcript)?;
                    }
                }
                nl_index += 1;
            }
        }
    }

    Ok(RunOutcome {
        state,
        measured,
        transcript,
        rounds: rounds_info,
    })
}

fn run_local_ops(
    state: &mut StateVector,
    party: PartyId,
    ops: &[CircuitOp],
    transcript: &mut Transcript,
    measured: &mut [(PartyId, Vec<u8>)],
    rng: &mut SimRng,
) -> Result<(), ProtocolError> {
    for op in ops {
        match op {
            CircuitOp::Single { gate, qubit } => {
                state.apply_1q_mut(&gate.unitary()?, *qubit)?;
            }
            CircuitOp::Cnot { control, target } => {
                state.apply_2q_mut(&Unitary4::cnot(), *control, *target)?;
            }
            CircuitOp::Measure { qubits } => {
                let mut bits = Vec::with_capacity(qubits.len());
                for &q in qubits {
                    bits.push(state.measure_qubit_mut(q, BitSelector::Sample(rng))?);
                }
                transcript.record(EventKind::LocalMeasurement {
                    party,
                    bits: bits.clone(),
                });
                measured[party.0 as usize].1.extend_from_slice(&bits);
            }
        }
    }
    Ok(())
}

fn run_ttp_round(
    state: &mut StateVector,
    spec: &NlCnotSpec,
    streams: &mut [SimRng],
    transcript: &mut Transcript,
) -> Result<(), ProtocolError> {
    use rand::Rng;
    let draw_key =
        |stream: &mut SimRng| QotpKey::new(stream.gen_range(0..2), stream.gen_range(0..2));
    let control_key = draw_key(&mut streams[spec.control_party.0 as usize]);
    let target_key = draw_key(&mut streams[spec.target_party.0 as usize]);

    qotp_encrypt_mut(state, spec.control_qubit, control_key)?;
    qotp_encrypt_mut(state, spec.target_qubit, target_key)?;
    transcript.record(EventKind::QubitTransfer {
        from: Actor::Party(spec.control_party),
        to: Actor::Ttp,
        qubits: vec![spec.control_qubit as u16],
    });
    transcript.record(EventKind::QubitTransfer {
        from: Actor::Party(spec.target_party),
        to: Actor::Ttp,
        qubits: vec![spec.target_qubit as u16],
    });

    let (control_updated, target_updated) = ttp_nl_cnot(
        state,
        spec.control_qubit,
        spec.target_qubit,
        control_key,
        target_key,
    )?;

    transcript.record(EventKind::QubitTransfer {
        from: Actor::Ttp,
        to: Actor::Party(spec.control_party),
        qubits: vec![spec.control_qubit as u16],
    });
    transcript.record(EventKind::QubitTransfer {
        from: Actor::Ttp,
        to: Actor::Party(spec.target_party),
        qubits: vec![spec.target_qubit as u16],
    });
    qotp_decrypt_mut(state, spec.control_qubit, control_updated)?;
    qotp_decrypt_mut(state, spec.target_qubit, target_updated)?;
    Ok(())
}

/// All `16^rounds` forced-branch assignments, in a fixed order.
pub fn branch_space(rounds: usize) -> impl Iterator<Item = Vec<(BellOutcome, BellOutcome)>> {
    let total = 16u64.pow(rounds as u32);
    (0..total).map(move |mut code| {
        let mut branches = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let pair = (code % 16) as usize;
            branches.push((
                BellOutcome::from_index(pair / 4),
                BellOutcome::from_index(pair % 4),
            ));
            code /= 16;
        }
        branches
    })
}

/// The 16 forced branches of a single gadget round.
pub fn single_round_branches() -> impl Iterator<Item = (BellOutcome, BellOutcome)> {
    branch_space(1).map(|mut v| v.pop().expect("one round"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_schedule, oracle_simulate, validate, CircuitOp, GateSpec};
    use crate::qsim::phase_equal;
    use crate::rng::seeded;

    fn honest() -> AdversaryStrategy {
        AdversaryStrategy::Honest
    }

    #[test]
    fn gadget_computes_cnot_on_basis_inputs_every_branch() {
        let control = StateVector::basis_state(1, 1).unwrap();
        let target = StateVector::basis_state(1, 0).unwrap();
        let expect = StateVector::basis_state(2, 0b11).unwrap();
        let mut rng = seeded(100);
        for (c, t) in single_round_branches() {
            let (out, info, _) = run_gadget(
                &control,
                &target,
                (&honest(), &honest()),
                &NlCnotOptions::default(),
                BranchChoice::Force {
                    control: c,
                    target: t,
                },
                &mut rng,
            )
            .unwrap();
            let (eq, mag) = phase_equal(&out, &expect).unwrap();
            assert!(eq, "branch {c},{t}: overlap {mag}");
            assert!((info.branch_probability - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gadget_entangles_plus_control_with_target() {
        let control = StateVector::basis_state(1, 0)
            .unwrap()
            .apply_1q(&Unitary2::h(), 0)
            .unwrap();
        let target = StateVector::basis_state(1, 0).unwrap();
        let expect = crate::qsim::bell_state(0, 0);
        let mut rng = seeded(101);
        for (c, t) in single_round_branches() {
            let (out, _, _) = run_gadget(
                &control,
                &target,
                (&honest(), &honest()),
                &NlCnotOptions::default(),
                BranchChoice::Force {
                    control: c,
                    target: t,
                },
                &mut rng,
            )
            .unwrap();
            let (eq, mag) = phase_equal(&out, &expect).unwrap();
            assert!(eq, "branch {c},{t}: overlap {mag}");
        }
    }

    #[test]
    fn gadget_works_with_entangled_bystanders() {
        // Joint 3-qubit state: bystander entangled with the control qubit.
        // Register: q0 bystander (P0), q1 control (P0), q2 target (P1).
        let mut joint = StateVector::basis_state(3, 0).unwrap();
        joint.apply_1q_mut(&Unitary2::h(), 0).unwrap();
        joint.apply_2q_mut(&Unitary4::cnot(), 0, 1).unwrap();
        joint.apply_1q_mut(&Unitary2::h(), 2).unwrap();

        let expect = joint.apply_2q(&Unitary4::cnot(), 1, 2).unwrap();
        let spec = NlCnotSpec {
            control_party: PartyId(0),
            control_qubit: 1,
            target_party: PartyId(1),
            target_qubit: 2,
        };
        let mut rng = seeded(102);
        for (c, t) in single_round_branches() {
            let mut transcript = Transcript::new();
            let (out, _) = nl_cnot(
                joint.clone(),
                &spec,
                (&honest(), &honest()),
                &NlCnotOptions::default(),
                BranchChoice::Force {
                    control: c,
                    target: t,
                },
                &mut rng,
                &mut transcript,
            )
            .unwrap();
            assert_eq!(out.num_qubits(), 3);
            let (eq, mag) = phase_equal(&out, &expect).unwrap();
            assert!(eq, "branch {c},{t}: overlap {mag}");
        }
    }

    #[test]
    fn gadget_with_reversed_qubit_positions() {
        // Control at a higher register index than target.
        let mut joint = StateVector::basis_state(2, 0b01).unwrap(); // q1 = 1 (control)
        joint.apply_1q_mut(&Unitary2::h(), 0).unwrap();
        let expect = joint.apply_2q(&Unitary4::cnot(), 1, 0).unwrap();
        let spec = NlCnotSpec {
            control_party: PartyId(1),
            control_qubit: 1,
            target_party: PartyId(0),
            target_qubit: 0,
        };
        let mut rng = seeded(103);
        for (c, t) in single_round_branches() {
            let mut transcript = Transcript::new();
            let (out, _) = nl_cnot(
                joint.clone(),
                &spec,
                (&honest(), &honest()),
                &NlCnotOptions::default(),
                BranchChoice::Force {
                    control: c,
                    target: t,
                },
                &mut rng,
                &mut transcript,
            )
            .unwrap();
            let (eq, mag) = phase_equal(&out, &expect).unwrap();
            assert!(eq, "branch {c},{t}: overlap {mag}");
        }
    }

    #[test]
    fn sampled_gadget_matches_oracle() {
        let mut rng = seeded(104);
        for _ in 0..50 {
            let control = StateVector::random(1, &mut rng);
            let target = StateVector::random(1, &mut rng);
            let expect = control
                .tensor(&target)
                .apply_2q(&Unitary4::cnot(), 0, 1)
                .unwrap();
            let (out, _, _) = run_gadget(
                &control,
                &target,
                (&honest(), &honest()),
                &NlCnotOptions::default(),
                BranchChoice::Sample,
                &mut rng,
            )
            .unwrap();
            let (eq, mag) = phase_equal(&out, &expect).unwrap();
            assert!(eq, "overlap {mag}");
        }
    }

    #[test]
    fn target_side_preparer_is_equivalent() {
        let mut rng = seeded(105);
        let control = StateVector::random(1, &mut rng);
        let target = StateVector::random(1, &mut rng);
        let expect = control
            .tensor(&target)
            .apply_2q(&Unitary4::cnot(), 0, 1)
            .unwrap();
        let options = NlCnotOptions {
            preparer: GadgetRole::Target,
            ..Default::default()
        };
        for (c, t) in single_round_branches() {
            let (out, _, transcript) = run_gadget(
                &control,
                &target,
                (&honest(), &honest()),
                &options,
                BranchChoice::Force {
                    control: c,
                    target: t,
                },
                &mut rng,
            )
            .unwrap();
            let (eq, mag) = phase_equal(&out, &expect).unwrap();
            assert!(eq, "overlap {mag}");
            // Transfer goes target owner -> control owner.
            let transfer = transcript
                .events()
                .iter()
                .find_map(|e| match &e.kind {
                    EventKind::QubitTransfer { from, to, qubits } => {
                        Some((*from, *to, qubits.clone()))
                    }
                    _ => None,
                })
                .unwrap();
            assert_eq!(transfer.0, Actor::Party(PartyId(1)));
            assert_eq!(transfer.1, Actor::Party(PartyId(0)));
            assert_eq!(transfer.2, vec![2, 3]);
        }
    }

    #[test]
    fn disabled_corrections_break_most_branches() {
        let control = StateVector::basis_state(1, 1).unwrap();
        let target = StateVector::basis_state(1, 0).unwrap();
        let expect = StateVector::basis_state(2, 0b11).unwrap();
        let options = NlCnotOptions {
            apply_corrections: false,
            ..Default::default()
        };
        let mut rng = seeded(106);
        let mut failures = 0;
        for (c, t) in single_round_branches() {
            let (out, _, _) = run_gadget(
                &control,
                &target,
                (&honest(), &honest()),
                &options,
                BranchChoice::Force {
                    control: c,
                    target: t,
                },
                &mut rng,
            )
            .unwrap();
            if !phase_equal(&out, &expect).unwrap().0 {
                failures += 1;
            }
        }
        assert!(failures >= 8, "only {failures} branches failed");
    }

    #[test]
    fn transcript_of_one_honest_round_is_minimal() {
        let control = StateVector::basis_state(1, 0).unwrap();
        let target = StateVector::basis_state(1, 0).unwrap();
        let mut rng = seeded(107);
        let (_, _, transcript) = run_gadget(
            &control,
            &target,
            (&honest(), &honest()),
            &NlCnotOptions::default(),
            BranchChoice::Sample,
            &mut rng,
        )
        .unwrap();
        let commitments = transcript.count(|k| matches!(k, EventKind::Commitment { .. }));
        let classical = transcript.count(|k| matches!(k, EventKind::Classical { .. }));
        let transfers = transcript.count(|k| matches!(k, EventKind::QubitTransfer { .. }));
        assert_eq!(commitments, 4);
        assert_eq!(classical, 0);
        assert_eq!(transfers, 1);
        match &transcript.events()[0].kind {
            EventKind::QubitTransfer { qubits, .. } => assert_eq!(qubits.len(), 2),
            other => panic!("first event should be the resource transfer, got {other:?}"),
        }
    }

    fn bell_circuit() -> (Vec<CircuitOp>, crate::circuit::OwnershipMap) {
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
        let own = crate::circuit::OwnershipMap::new(2, vec![PartyId(0), PartyId(1)]);
        (ops, own)
    }

    #[test]
    fn run_smqc_matches_oracle_on_bell_circuit_every_branch() {
        let (ops, own) = bell_circuit();
        validate(&ops, &own).unwrap();
        let schedule = build_schedule(&ops, &own);
        assert_eq!(schedule.nl_cnot_count(), 1);
        let inputs = PartyInputs::all_zero(&own);
        let joint = inputs.joint(&own).unwrap();
        let mut oracle_rng = seeded(1);
        let (expect, _) = oracle_simulate(&ops, &joint, &mut oracle_rng).unwrap();

        for branches in branch_space(schedule.nl_cnot_count()) {
            let cfg = SmqcConfig {
                mode: ExecMode::Forced(branches),
                ..SmqcConfig::honest(2)
            };
            let mut rng = seeded(200);
            let out = run_smqc(&schedule, &own, &inputs, &cfg, &mut rng).unwrap();
            let (eq, mag) = phase_equal(&out.state, &expect).unwrap();
            assert!(eq, "overlap {mag}");
        }
    }

    #[test]
    fn ttp_backend_matches_peer_backend() {
        let (ops, own) = bell_circuit();
        let schedule = build_schedule(&ops, &own);
        let inputs = PartyInputs::all_zero(&own);
        let joint = inputs.joint(&own).unwrap();
        let mut oracle_rng = seeded(1);
        let (expect, _) = oracle_simulate(&ops, &joint, &mut oracle_rng).unwrap();

        let cfg = SmqcConfig {
            backend: Backend::Ttp,
            ttp_seed: 911,
            ..SmqcConfig::honest(2)
        };
        let mut rng = seeded(201);
        let out = run_smqc(&schedule, &own, &inputs, &cfg, &mut rng).unwrap();
        let (eq, mag) = phase_equal(&out.state, &expect).unwrap();
        assert!(eq, "overlap {mag}");
        // TTP rounds move the data qubits to the TTP role and back.
        let to_ttp = out
            .transcript
            .count(|k| matches!(k, EventKind::QubitTransfer { to: Actor::Ttp, .. }));
        assert_eq!(to_ttp, 2);
        assert_eq!(out.transcript.classical_event_count(), 0);
    }

    #[test]
    fn local_only_schedule_produces_no_classical_traffic() {
        let ops = vec![
            CircuitOp::Single {
                gate: GateSpec::H,
                qubit: 0,
            },
            CircuitOp::Single {
                gate: GateSpec::X,
                qubit: 1,
            },
        ];
        let own = crate::circuit::OwnershipMap::new(2, vec![PartyId(0), PartyId(1)]);
        let schedule = build_schedule(&ops, &own);
        let inputs = PartyInputs::all_zero(&own);
        let mut rng = seeded(202);
        let out = run_smqc(&schedule, &own, &inputs, &SmqcConfig::honest(2), &mut rng).unwrap();
        assert_eq!(out.transcript.classical_event_count(), 0);
    }

    #[test]
    fn measured_circuit_records_bits_per_party() {
        let ops = vec![
            CircuitOp::Single {
                gate: GateSpec::X,
                qubit: 1,
            },
            CircuitOp::Measure { qubits: vec![1] },
        ];
        let own = crate::circuit::OwnershipMap::new(2, vec![PartyId(0), PartyId(1)]);
        let schedule = build_schedule(&ops, &own);
        let inputs = PartyInputs::all_zero(&own);
        let mut rng = seeded(203);
        let out = run_smqc(&schedule, &own, &inputs, &SmqcConfig::honest(2), &mut rng).unwrap();
        assert_eq!(out.measured[1].1, vec![1]);
        assert!(out.measured[0].1.is_empty());
    }

    #[test]
    fn forced_mode_rejects_measurements_and_bad_branch_counts() {
        let ops = vec![CircuitOp::Measure { qubits: vec![0] }];
        let own = crate::circuit::OwnershipMap::new(2, vec![PartyId(0), PartyId(1)]);
        let schedule = build_schedule(&ops, &own);
        let inputs = PartyInputs::all_zero(&own);
        let cfg = SmqcConfig {
            mode: ExecMode::Forced(vec![]),
            ..SmqcConfig::honest(2)
        };
        let mut rng = seeded(204);
        assert!(matches!(
            run_smqc(&schedule, &own, &inputs, &cfg, &mut rng),
            Err(ProtocolError::MeasurementInForcedMode)
        ));

        let (ops, own) = bell_circuit();
        let schedule = build_schedule(&ops, &own);
        let inputs = PartyInputs::all_zero(&own);
        let cfg = SmqcConfig {
            mode: ExecMode::Forced(vec![]),
            ..SmqcConfig::honest(2)
        };
        assert!(matches!(
            run_smqc(&schedule, &own, &inputs, &cfg, &mut rng),
            Err(ProtocolError::BranchCountMismatch { .. })
        ));
    }

    #[test]
    fn ttp_backend_rejects_active_strategies() {
        let (ops, own) = bell_circuit();
        let schedule = build_schedule(&ops, &own);
        let inputs = PartyInputs::all_zero(&own);
        let mut cfg = SmqcConfig::honest(2);
        cfg.backend = Backend::Ttp;
        cfg.strategies[0] = AdversaryStrategy::BitFlip {
            side: GadgetRole::Control,
        };
        let mut rng = seeded(205);
        assert!(matches!(
            run_smqc(&schedule, &own, &inputs, &cfg, &mut rng),
            Err(ProtocolError::StrategyUnsupportedByBackend)
        ));
    }

    #[test]
    fn party_inputs_embed_interleaved_ownership() {
        // q0 -> P0, q1 -> P1, q2 -> P0: P0 holds |10⟩, P1 holds |1⟩.
        let own = crate::circuit::OwnershipMap::new(2, vec![PartyId(0), PartyId(1), PartyId(0)]);
        let inputs = PartyInputs::new(vec![
            StateVector::basis_state(2, 0b10).unwrap(),
            StateVector::basis_state(1, 1).unwrap(),
        ]);
        let joint = inputs.joint(&own).unwrap();
        // P0's first qubit (q0) = 1, second (q2) = 0; P1's qubit (q1) = 1.
        assert!((joint.amplitude(0b110).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branch_space_covers_all_combinations() {
        assert_eq!(branch_space(0).count(), 1);
        assert_eq!(branch_space(1).count(), 16);
        assert_eq!(branch_space(2).count(), 256);
        let all: std::collections::HashSet<Vec<(u8, u8, u8, u8)>> = branch_space(2)
            .map(|v| v.iter().map(|(a, b)| (a.x, a.z, b.x, b.z)).collect())
            .collect();
        assert_eq!(all.len(), 256);
    }
}
