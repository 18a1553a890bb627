//! Runnable property suites.
//!
//! Each suite exercises one contract of the system at full scale and
//! returns a pass/fail outcome with a measured detail line. The `verify`
//! CLI command runs them all; the acceptance test target asserts them
//! individually. Everything is deterministic in the seed.

use crate::adversary::{
    analyze_passive, is_clifford, random_clifford, recover_local_unitary,
    reduced_target_comparison, run_bit_flip_attack, run_gadget_branches,
    run_resource_corruption_attack, run_rotated_basis_attack, synthetic_leaky_transcript,
    x_eigenstate_comparison, AdversaryStrategy, CorruptionTarget, GadgetRole, TargetSign,
};
use crate::circuit::gen::{random_circuit, CircuitShape};
use crate::circuit::{build_schedule, oracle_simulate, parse_circuit, validate, OwnershipMap};
use crate::commitment::{commit, open_verify, run_swap, Nonce, Opening, SwapBehavior, SwapError};
use crate::protocol::{
    branch_space, run_gadget, run_smqc, Backend, BranchChoice, EventKind, ExecMode, NlCnotOptions,
    PartyInputs, SmqcConfig, Transcript,
};
use crate::qsim::{
    bell_probabilities, bell_state, partial_trace, phase_equal, schmidt_decompose, BellOutcome,
    StateVector, Unitary2, Unitary4,
};
use crate::rng::{substream, SimRng};
use crate::{PartyId, TOL_ALGEBRAIC, TOL_END_TO_END, TOL_PROTOCOL};

/// Result of one property suite.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: true,
            detail,
        }
    }

    fn check(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

impl std::fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<24} {}", self.name, self.detail)
    }
}

/// Runs every suite. With `inject_fault` the gadget corrections are
/// disabled, which must make the gadget suites fail; that negative control
/// shows the checks are not vacuous.
pub fn run_all(seed: u64, inject_fault: bool) -> Vec<SuiteOutcome> {
    let options = NlCnotOptions {
        apply_corrections: !inject_fault,
        ..Default::default()
    };
    vec![
        suite_state_core(substream(seed, 1)),
        suite_schmidt_and_traces(substream(seed, 2)),
        suite_nl_cnot(substream(seed, 3), &options),
        suite_end_to_end(substream(seed, 4)),
        suite_uniformity(substream(seed, 5)),
        suite_passive_security(substream(seed, 6)),
        suite_attack_formulas(substream(seed, 7)),
        suite_resource_corruption(substream(seed, 8)),
        suite_reduced_invariance(substream(seed, 9)),
        suite_commitment(substream(seed, 10)),
        suite_key_update(),
        suite_model_enforcement(substream(seed, 11)),
        suite_transcript_minimality(substream(seed, 12)),
    ]
}

/// Norm preservation, Born completeness, and the teleportation residual
/// convention.
pub fn suite_state_core(mut rng: SimRng) -> SuiteOutcome {
    let name = "state-core";
    let mut worst_norm: f64 = 0.0;
    for _ in 0..1000 {
        let mut s = StateVector::random(3, &mut rng);
        let u = Unitary2::random(&mut rng);
        use rand::Rng;
        let q = rng.gen_range(0..3);
        s.apply_1q_mut(&u, q).expect("in range");
        worst_norm = worst_norm.max((s.norm_sqr() - 1.0).abs());
    }
    if worst_norm > TOL_ALGEBRAIC {
        return SuiteOutcome::check(name, false, format!("norm drift {worst_norm:.2e}"));
    }

    let mut worst_born: f64 = 0.0;
    for _ in 0..200 {
        let s = StateVector::random(3, &mut rng);
        let probs = bell_probabilities(&s, 0, 2).expect("valid qubits");
        worst_born = worst_born.max((probs.iter().sum::<f64>() - 1.0).abs());
    }
    if worst_born > TOL_ALGEBRAIC {
        return SuiteOutcome::check(name, false, format!("Born sum drift {worst_born:.2e}"));
    }

    let mut worst_residual: f64 = 0.0;
    for _ in 0..100 {
        let psi = StateVector::random(1, &mut rng);
        let joint = psi.tensor(&bell_state(0, 0));
        for outcome in BellOutcome::ALL {
            let (_, post) = crate::qsim::bell_measure(
                &joint,
                0,
                1,
                crate::qsim::BranchSelector::Force(outcome),
            )
            .expect("uniform branches");
            // Residual qubit to the front; measured pair stays in B_xz.
            let rearranged = post.reorder(&[2, 0, 1]).expect("permutation");
            let mut expect = psi.clone();
            if outcome.z == 1 {
                expect.apply_1q_mut(&Unitary2::z(), 0).expect("one qubit");
            }
            if outcome.x == 1 {
                expect.apply_1q_mut(&Unitary2::x(), 0).expect("one qubit");
            }
            let expect_joint = expect.tensor(&bell_state(outcome.x, outcome.z));
            let (_, mag) = phase_equal(&rearranged, &expect_joint).expect("same dims");
            worst_residual = worst_residual.max(1.0 - mag);
        }
    }
    SuiteOutcome::check(
        name,
        worst_residual <= TOL_PROTOCOL,
        format!(
            "norm drift {worst_norm:.1e}, Born drift {worst_born:.1e}, residual deviation {worst_residual:.1e}"
        ),
    )
}

/// Schmidt reconstruction and partial-trace validity on random states.
pub fn suite_schmidt_and_traces(mut rng: SimRng) -> SuiteOutcome {
    let name = "schmidt-and-traces";
    let mut worst_rec: f64 = 0.0;
    for _ in 0..200 {
        let s = StateVector::random(2, &mut rng);
        let d = schmidt_decompose(&s).expect("two qubits");
        worst_rec = worst_rec.max(d.reconstruction_error(&s));
        let sq: f64 = d.coefficients.iter().map(|a| a * a).sum();
        if (sq - 1.0).abs() > TOL_ALGEBRAIC || d.coefficients[1] < 0.0 {
            return SuiteOutcome::check(name, false, "bad Schmidt spectrum".to_string());
        }
    }
    if worst_rec > TOL_PROTOCOL {
        return SuiteOutcome::check(name, false, format!("reconstruction error {worst_rec:.2e}"));
    }

    for _ in 0..100 {
        let s = StateVector::random(4, &mut rng);
        let rho = partial_trace(&s, &[1, 3]).expect("valid keep set");
        let herm = rho.is_hermitian(TOL_ALGEBRAIC);
        let trace_ok = (rho.trace() - num_complex::Complex64::new(1.0, 0.0)).norm() < TOL_ALGEBRAIC;
        let psd = rho.min_eigenvalue() >= -TOL_ALGEBRAIC;
        if !(herm && trace_ok && psd) {
            return SuiteOutcome::check(
                name,
                false,
                format!("invalid reduced state (herm={herm}, trace={trace_ok}, psd={psd})"),
            );
        }
    }
    SuiteOutcome::pass(
        name,
        format!("reconstruction error {worst_rec:.1e}, 100 reduced states valid"),
    )
}

/// Gadget correctness: 100 random input pairs, all 16 branches each,
/// overlap >= 1 - 1e-10 against the CNOT of the inputs.
pub fn suite_nl_cnot(mut rng: SimRng, options: &NlCnotOptions) -> SuiteOutcome {
    let name = "nl-cnot";
    let honest = AdversaryStrategy::Honest;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let control = StateVector::random(1, &mut rng);
        let target = StateVector::random(1, &mut rng);
        let expect = control
            .tensor(&target)
            .apply_2q(&Unitary4::cnot(), 0, 1)
            .expect("product state");
        let records =
            match run_gadget_branches(&control, &target, (&honest, &honest), options, &mut rng) {
                Ok(r) => r,
                Err(e) => return SuiteOutcome::check(name, false, format!("gadget error: {e}")),
            };
        for rec in records {
            let (_, mag) = phase_equal(&rec.output, &expect).expect("two qubits");
            worst = worst.max(1.0 - mag);
        }
    }
    SuiteOutcome::check(
        name,
        worst <= TOL_PROTOCOL,
        format!("1600 branches, max deviation {worst:.2e}"),
    )
}

fn end_to_end_shapes(rng: &mut SimRng) -> Vec<CircuitShape> {
    use rand::Rng;
    let mut shapes = Vec::with_capacity(50);
    // Nonlocal-round counts weighted so the 16^k branch spaces stay inside
    // the time budget while still covering the maximum.
    let plan: [(usize, usize); 4] = [(0, 8), (1, 18), (2, 16), (3, 8)];
    for (nonlocal, count) in plan {
        for _ in 0..count {
            let qubits = if nonlocal == 3 {
                rng.gen_range(3..=6)
            } else {
                rng.gen_range(3..=8)
            };
            let gates = if nonlocal == 3 {
                rng.gen_range(10..=30)
            } else {
                rng.gen_range(10..=50)
            };
            shapes.push(CircuitShape {
                parties: 3,
                qubits,
                gates,
                nonlocal_cnots: nonlocal,
                with_measurements: false,
            });
        }
    }
    shapes
}

fn random_inputs(own: &OwnershipMap, rng: &mut SimRng) -> PartyInputs {
    let states = (0..own.party_count())
        .map(|p| StateVector::random(own.input_size(PartyId(p)).max(1), rng))
        .collect();
    PartyInputs::new(states)
}

/// End-to-end distributed-vs-monolithic equivalence on 50 random
/// measurement-free circuits, every branch enumerated, plus TTP-backend
/// agreement.
pub fn suite_end_to_end(mut rng: SimRng) -> SuiteOutcome {
    let name = "end-to-end";
    let shapes = end_to_end_shapes(&mut rng);
    let mut worst_peer: f64 = 0.0;
    let mut worst_ttp: f64 = 0.0;
    let mut branches_total = 0usize;
    for (i, shape) in shapes.iter().enumerate() {
        let (ops, own) = random_circuit(shape, &mut rng);
        if let Err(rejections) = validate(&ops, &own) {
            return SuiteOutcome::check(name, false, format!("generator invalid: {rejections:?}"));
        }
        let schedule = build_schedule(&ops, &own);
        let inputs = random_inputs(&own, &mut rng);
        let joint = inputs.joint(&own).expect("sizes match");
        let mut oracle_rng = substream(1000, i as u64);
        let (expect, _) = oracle_simulate(&ops, &joint, &mut oracle_rng).expect("valid ops");

        for branches in branch_space(schedule.nl_cnot_count()) {
            let cfg = SmqcConfig {
                mode: ExecMode::Forced(branches),
                ..SmqcConfig::honest(own.party_count())
            };
            let out = match run_smqc(&schedule, &own, &inputs, &cfg, &mut rng) {
                Ok(o) => o,
                Err(e) => return SuiteOutcome::check(name, false, format!("run failed: {e}")),
            };
            let (_, mag) = phase_equal(&out.state, &expect).expect("same register");
            worst_peer = worst_peer.max(1.0 - mag);
            branches_total += 1;
            // Locality: peer rounds only ever move resource ancillas, which
            // always sit above the circuit register.
            for event in out.transcript.events() {
                if let EventKind::QubitTransfer { qubits, .. } = &event.kind {
                    if qubits.iter().any(|&q| (q as usize) < own.num_qubits()) {
                        return SuiteOutcome::check(
                            name,
                            false,
                            "a party's own qubit was transferred".to_string(),
                        );
                    }
                }
            }
        }

        let cfg = SmqcConfig {
            backend: Backend::Ttp,
            ttp_seed: 7000 + i as u64,
            ..SmqcConfig::honest(own.party_count())
        };
        let out = match run_smqc(&schedule, &own, &inputs, &cfg, &mut rng) {
            Ok(o) => o,
            Err(e) => return SuiteOutcome::check(name, false, format!("ttp run failed: {e}")),
        };
        let (_, mag) = phase_equal(&out.state, &expect).expect("same register");
        worst_ttp = worst_ttp.max(1.0 - mag);
    }
    SuiteOutcome::check(
        name,
        worst_peer <= TOL_END_TO_END && worst_ttp <= TOL_END_TO_END,
        format!(
            "{} circuits, {branches_total} branches, peer deviation {worst_peer:.2e}, ttp deviation {worst_ttp:.2e}",
            shapes.len()
        ),
    )
}

/// Bell outcome uniformity over sampled gadget runs: every outcome of both
/// measurers lands in 0.25 ± 0.02.
pub fn suite_uniformity(mut rng: SimRng) -> SuiteOutcome {
    let name = "uniformity";
    let honest = AdversaryStrategy::Honest;
    let options = NlCnotOptions::default();
    let control = StateVector::random(1, &mut rng);
    let target = StateVector::random(1, &mut rng);
    let shots = 10_000usize;
    let mut control_counts = [0usize; 4];
    let mut target_counts = [0usize; 4];
    for _ in 0..shots {
        let (_, info, _) = run_gadget(
            &control,
            &target,
            (&honest, &honest),
            &options,
            BranchChoice::Sample,
            &mut rng,
        )
        .expect("honest run");
        control_counts[info.control_outcome.index()] += 1;
        target_counts[info.target_outcome.index()] += 1;
    }
    let mut worst: f64 = 0.0;
    for counts in [&control_counts, &target_counts] {
        for &c in counts.iter() {
            worst = worst.max((c as f64 / shots as f64 - 0.25).abs());
        }
    }
    SuiteOutcome::check(
        name,
        worst <= 0.02,
        format!("{shots} runs, max |freq - 0.25| = {worst:.4}"),
    )
}

/// Passive security: exchanged-bit distributions for two fixed distinct
/// inputs stay within total variation 0.02 at 10^4 samples per class, and
/// the synthetic leaky counterexample is flagged.
pub fn suite_passive_security(mut rng: SimRng) -> SuiteOutcome {
    let name = "passive-security";
    let honest = AdversaryStrategy::Honest;
    let options = NlCnotOptions::default();
    let shots = 10_000usize;

    let zero = StateVector::basis_state(1, 0).expect("in range");
    let one = StateVector::basis_state(1, 1).expect("in range");
    let plus = zero.apply_1q(&Unitary2::h(), 0).expect("one qubit");
    let class_inputs = [("zero-zero", (&zero, &zero)), ("plus-one", (&plus, &one))];

    let mut classes = Vec::new();
    for (label, (c_in, t_in)) in class_inputs {
        let mut transcripts = Vec::with_capacity(shots);
        for _ in 0..shots {
            let (_, _, transcript) = run_gadget(
                c_in,
                t_in,
                (&honest, &honest),
                &options,
                BranchChoice::Sample,
                &mut rng,
            )
            .expect("honest run");
            transcripts.push(transcript);
        }
        classes.push((label.to_string(), transcripts));
    }
    let report = match analyze_passive(&classes, 0.02, 1000) {
        Ok(r) => r,
        Err(e) => return SuiteOutcome::check(name, false, format!("analyzer error: {e}")),
    };
    if report.flagged {
        return SuiteOutcome::check(
            name,
            false,
            format!(
                "honest classes flagged, max TV {:.4}",
                report.max_distance()
            ),
        );
    }
    let honest_tv = report.max_distance();

    // The leaky counterexample: the exchanged bit copies an input bit.
    let leaky_a: Vec<Transcript> = (0..1500)
        .map(|_| synthetic_leaky_transcript(0, 0, &mut rng))
        .collect();
    let leaky_b: Vec<Transcript> = (0..1500)
        .map(|_| synthetic_leaky_transcript(1, 0, &mut rng))
        .collect();
    let leaky = match analyze_passive(
        &[
            ("input0".to_string(), leaky_a),
            ("input1".to_string(), leaky_b),
        ],
        0.02,
        1000,
    ) {
        Ok(r) => r,
        Err(e) => return SuiteOutcome::check(name, false, format!("analyzer error: {e}")),
    };
    SuiteOutcome::check(
        name,
        leaky.flagged,
        format!(
            "honest max TV {honest_tv:.4} (<= 0.02), leaky counterexample flagged: {}",
            leaky.flagged
        ),
    )
}

/// Rotated-basis and bit-flip effect formulas, branch-exhaustively.
pub fn suite_attack_formulas(mut rng: SimRng) -> SuiteOutcome {
    let name = "attack-formulas";
    let mut worst: f64 = 0.0;
    let mut branches = 0usize;
    for _ in 0..50 {
        let control = StateVector::random(1, &mut rng);
        let target = StateVector::random(1, &mut rng);
        for _ in 0..10 {
            let u = Unitary2::random(&mut rng);
            let (records, report) = match run_rotated_basis_attack(
                &u,
                GadgetRole::Control,
                &control,
                &target,
                &mut rng,
            ) {
                Ok(x) => x,
                Err(e) => return SuiteOutcome::check(name, false, format!("attack error: {e}")),
            };
            branches += records.len();
            worst = worst.max(report.max_deviation);
        }
        let (records, report) =
            match run_bit_flip_attack(GadgetRole::Control, &control, &target, &mut rng) {
                Ok(x) => x,
                Err(e) => return SuiteOutcome::check(name, false, format!("attack error: {e}")),
            };
        branches += records.len();
        worst = worst.max(report.max_deviation);
    }
    SuiteOutcome::check(
        name,
        worst <= TOL_PROTOCOL,
        format!("{branches} attack branches, max deviation {worst:.2e}"),
    )
}

/// Clifford resource corruption: the per-branch Pauli search succeeds on
/// every branch for random Cliffords and inputs, with uniform branch
/// statistics.
pub fn suite_resource_corruption(mut rng: SimRng) -> SuiteOutcome {
    let name = "resource-corruption";
    let mut worst: f64 = 0.0;
    let mut branches = 0usize;
    for i in 0..10 {
        let c = random_clifford(&mut rng);
        if !is_clifford(&c) {
            return SuiteOutcome::check(name, false, "sampler gave non-Clifford".to_string());
        }
        let carrier = if i % 2 == 0 {
            CorruptionTarget::ControlCarrier
        } else {
            CorruptionTarget::TargetCarrier
        };
        for _ in 0..20 {
            let control = StateVector::random(1, &mut rng);
            let target = StateVector::random(1, &mut rng);
            let (records, _, report) =
                match run_resource_corruption_attack(&c, carrier, &control, &target, &mut rng) {
                    Ok(x) => x,
                    Err(e) => {
                        return SuiteOutcome::check(name, false, format!("attack error: {e}"))
                    }
                };
            branches += records.len();
            worst = worst.max(report.max_deviation);
            if !report.verdict {
                return SuiteOutcome::check(
                    name,
                    false,
                    format!("verdict failed: {}", report.params),
                );
            }
        }
    }
    SuiteOutcome::check(
        name,
        worst <= TOL_PROTOCOL,
        format!("{branches} corrupted branches, max deviation {worst:.2e}"),
    )
}

/// The reduced-state invariance, its negative control, and the recovery of
/// the local patch unitary.
pub fn suite_reduced_invariance(mut rng: SimRng) -> SuiteOutcome {
    let name = "reduced-invariance";
    let mut worst_distance: f64 = 0.0;
    for sign in [TargetSign::Plus, TargetSign::Minus] {
        for _ in 0..50 {
            let phi = StateVector::random(1, &mut rng);
            let phi_prime = StateVector::random(1, &mut rng);
            let cmp = match x_eigenstate_comparison(&phi, &phi_prime, sign) {
                Ok(c) => c,
                Err(e) => {
                    return SuiteOutcome::check(name, false, format!("comparison error: {e}"))
                }
            };
            worst_distance = worst_distance.max(cmp.trace_distance);
        }
    }
    if worst_distance > TOL_PROTOCOL {
        return SuiteOutcome::check(
            name,
            false,
            format!("eigenstate distance {worst_distance:.2e}"),
        );
    }

    let zero = StateVector::basis_state(1, 0).expect("in range");
    let plus = TargetSign::Plus.ket();
    let negative = match reduced_target_comparison(&zero, &plus, &zero) {
        Ok(c) => c,
        Err(e) => return SuiteOutcome::check(name, false, format!("comparison error: {e}")),
    };
    if negative.trace_distance <= 0.1 {
        return SuiteOutcome::check(
            name,
            false,
            format!("negative control too small: {:.3}", negative.trace_distance),
        );
    }

    let mut worst_overlap_dev: f64 = 0.0;
    for sign in [TargetSign::Plus, TargetSign::Minus] {
        for _ in 0..50 {
            let phi = StateVector::random(1, &mut rng);
            let phi_prime = StateVector::random(1, &mut rng);
            let patch = match recover_local_unitary(&phi, &phi_prime, sign) {
                Ok(u) => u,
                Err(e) => return SuiteOutcome::check(name, false, format!("recovery error: {e}")),
            };
            let s = phi
                .tensor(&sign.ket())
                .apply_2q(&Unitary4::cnot(), 0, 1)
                .expect("product");
            let s_prime = phi_prime
                .tensor(&sign.ket())
                .apply_2q(&Unitary4::cnot(), 0, 1)
                .expect("product");
            let mapped = s.apply_1q(&patch, 0).expect("one qubit");
            let (_, mag) = phase_equal(&mapped, &s_prime).expect("same dims");
            worst_overlap_dev = worst_overlap_dev.max(1.0 - mag);
        }
    }
    SuiteOutcome::check(
        name,
        worst_overlap_dev <= TOL_PROTOCOL,
        format!(
            "100 pairs: distance {worst_distance:.1e}, negative control {:.3}, recovery deviation {worst_overlap_dev:.1e}",
            negative.trace_distance
        ),
    )
}

/// Commitment layer: two-phase ordering on honest transcripts, statistical
/// binding against forged openings, and cheat attribution.
pub fn suite_commitment(mut rng: SimRng) -> SuiteOutcome {
    let name = "commitment";
    use rand::Rng;
    for _ in 0..200 {
        let a = rng.gen_range(0..2);
        let b = rng.gen_range(0..2);
        let out = match crate::commitment::swap_protocol(a, b, (0, 1), &mut rng) {
            Ok(o) => o,
            Err(e) => return SuiteOutcome::check(name, false, format!("honest swap failed: {e}")),
        };
        if !out.transcript.commits_precede_opens() {
            return SuiteOutcome::check(name, false, "ordering invariant violated".to_string());
        }
        if out.a_to_b != a || out.b_to_a != b {
            return SuiteOutcome::check(name, false, "delivered bits wrong".to_string());
        }
    }

    let nonce = Nonce::random(&mut rng);
    let token = commit(1, &nonce);
    let mut accepts = 0usize;
    let trials = 100_000usize;
    for _ in 0..trials {
        let forged = Opening {
            bit: rng.gen_range(0..2),
            nonce: Nonce::random(&mut rng),
        };
        if forged.bit == 1 && forged.nonce == nonce {
            continue; // the genuine opening, not a forgery
        }
        if open_verify(&token, &forged) {
            accepts += 1;
        }
    }
    if accepts != 0 {
        return SuiteOutcome::check(name, false, format!("{accepts} forged openings accepted"));
    }

    let cheat = run_swap(
        1,
        0,
        (4, 9),
        (SwapBehavior::Honest, SwapBehavior::OpenFlippedBit),
        &mut rng,
    );
    if cheat.err() != Some(SwapError::CheatDetected { party: 9 }) {
        return SuiteOutcome::check(
            name,
            false,
            "cheat attribution wrong (expected party 9)".to_string(),
        );
    }
    let cheat = run_swap(
        1,
        0,
        (4, 9),
        (SwapBehavior::OpenWrongNonce, SwapBehavior::Honest),
        &mut rng,
    );
    if cheat.err() != Some(SwapError::CheatDetected { party: 4 }) {
        return SuiteOutcome::check(
            name,
            false,
            "cheat attribution wrong (expected party 4)".to_string(),
        );
    }
    let early = run_swap(
        1,
        0,
        (4, 9),
        (SwapBehavior::OpenEarly, SwapBehavior::Honest),
        &mut rng,
    );
    if !matches!(early.err(), Some(SwapError::ProtocolViolation { .. })) {
        return SuiteOutcome::check(name, false, "early open not flagged".to_string());
    }
    let abort = run_swap(
        1,
        0,
        (4, 9),
        (SwapBehavior::Honest, SwapBehavior::AbortAfterPeerOpens),
        &mut rng,
    );
    if abort.err() != Some(SwapError::Abort { party: 9 }) {
        return SuiteOutcome::check(name, false, "abort not reported".to_string());
    }

    SuiteOutcome::pass(
        name,
        format!("200 honest swaps ordered, 0/{trials} forgeries accepted, cheats attributed"),
    )
}

/// The one-time-pad CNOT key-update identity over all sixteen key pairs.
pub fn suite_key_update() -> SuiteOutcome {
    let name = "key-update";
    let dev = crate::protocol::qotp::key_update_identity_deviation();
    SuiteOutcome::check(
        name,
        dev <= TOL_ALGEBRAIC,
        format!("16 key pairs, max entry deviation {dev:.2e}"),
    )
}

/// Model enforcement: cross-owner measurements never reach scheduling, and
/// the schedule's nonlocal round count equals the nonlocal CNOT count on
/// 1000 random circuits, with per-qubit order preserved.
pub fn suite_model_enforcement(mut rng: SimRng) -> SuiteOutcome {
    let name = "model-enforcement";
    use rand::Rng;

    let bad = "parties 2\nqubits 2\nowner 0 0\nowner 1 1\nmeasure 0 1\n";
    let (ops, own) = match parse_circuit(bad) {
        Ok(x) => x,
        Err(e) => return SuiteOutcome::check(name, false, format!("parse failed: {e}")),
    };
    if validate(&ops, &own).is_ok() {
        return SuiteOutcome::check(name, false, "cross-owner measurement accepted".to_string());
    }

    // Random circuits with one injected cross-owner measurement must all be
    // rejected too.
    for _ in 0..100 {
        let shape = CircuitShape {
            parties: rng.gen_range(2..=4u16),
            qubits: 5,
            gates: rng.gen_range(3..=20),
            nonlocal_cnots: rng.gen_range(0..=2),
            with_measurements: false,
        };
        let (mut ops, own) = random_circuit(&shape, &mut rng);
        let q0 = rng.gen_range(0..own.num_qubits());
        let q1 = (0..own.num_qubits())
            .find(|&q| own.owner(q) != own.owner(q0))
            .expect("two parties present");
        let position = rng.gen_range(0..=ops.len());
        ops.insert(
            position,
            crate::circuit::CircuitOp::Measure {
                qubits: vec![q0, q1],
            },
        );
        if validate(&ops, &own).is_ok() {
            return SuiteOutcome::check(
                name,
                false,
                "injected cross-owner measurement accepted".to_string(),
            );
        }
    }

    let mut checked = 0usize;
    for _ in 0..1000 {
        let parties = rng.gen_range(2..=4u16);
        let qubits = rng.gen_range(parties as usize..=7);
        let shape = CircuitShape {
            parties,
            qubits,
            gates: rng.gen_range(5..=40),
            nonlocal_cnots: rng.gen_range(0..=4),
            with_measurements: true,
        };
        let (ops, own) = random_circuit(&shape, &mut rng);
        if validate(&ops, &own).is_err() {
            return SuiteOutcome::check(
                name,
                false,
                "generator produced invalid circuit".to_string(),
            );
        }
        let schedule = build_schedule(&ops, &own);
        if schedule.nl_cnot_count() != shape.nonlocal_cnots {
            return SuiteOutcome::check(
                name,
                false,
                format!(
                    "round count {} != nonlocal CNOT count {}",
                    schedule.nl_cnot_count(),
                    shape.nonlocal_cnots
                ),
            );
        }
        let flat = schedule.flatten();
        for q in 0..own.num_qubits() {
            if crate::circuit::per_qubit_sequence(&ops, q)
                != crate::circuit::per_qubit_sequence(&flat, q)
            {
                return SuiteOutcome::check(name, false, format!("qubit {q} order broken"));
            }
        }
        checked += 1;
    }
    SuiteOutcome::pass(
        name,
        format!("rejection enforced; {checked} schedules match counts and per-qubit order"),
    )
}

/// Transcript minimality and locality of one honest peer round: exactly
/// four commitment messages and one two-qubit resource transfer, and no
/// data qubit ever travels.
pub fn suite_transcript_minimality(mut rng: SimRng) -> SuiteOutcome {
    let name = "transcript-minimality";
    let honest = AdversaryStrategy::Honest;
    for _ in 0..50 {
        let control = StateVector::random(1, &mut rng);
        let target = StateVector::random(1, &mut rng);
        let (_, _, transcript) = match run_gadget(
            &control,
            &target,
            (&honest, &honest),
            &NlCnotOptions::default(),
            BranchChoice::Sample,
            &mut rng,
        ) {
            Ok(x) => x,
            Err(e) => return SuiteOutcome::check(name, false, format!("gadget error: {e}")),
        };
        let commitments = transcript.count(|k| matches!(k, EventKind::Commitment { .. }));
        let classical = transcript.count(|k| matches!(k, EventKind::Classical { .. }));
        let transfers: Vec<Vec<u16>> = transcript
            .events()
            .iter()
            .filter_map(|e| match &e.kind {
                EventKind::QubitTransfer { qubits, .. } => Some(qubits.clone()),
                _ => None,
            })
            .collect();
        if commitments != 4 || classical != 0 || transfers.len() != 1 || transfers[0].len() != 2 {
            return SuiteOutcome::check(
                name,
                false,
                format!(
                    "events: {commitments} commitment, {classical} classical, transfers {transfers:?}"
                ),
            );
        }
        // Locality: only the designated resource halves ever travel; the
        // two data qubits sit at register positions 0 and 1.
        if transfers[0].iter().any(|&q| (q as usize) < 2) {
            return SuiteOutcome::check(name, false, "data qubit transferred".to_string());
        }
    }
    SuiteOutcome::pass(
        name,
        "50 honest rounds: 4 commitment messages + 1 resource transfer each".to_string(),
    )
}
