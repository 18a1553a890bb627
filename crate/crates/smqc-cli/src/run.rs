//! `smqc run`: execute a circuit through the distributed protocol, compare
//! against the monolithic oracle, and emit transcript/report files.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;

use smqc::adversary::{AdversaryStrategy, GadgetRole};
use smqc::circuit::{
    build_schedule, classify_cnot, oracle_simulate, CircuitOp, CnotKind, GateSpec, OwnershipMap,
};
use smqc::protocol::{branch_space, run_smqc, Backend, ExecMode, SmqcConfig};
use smqc::qsim::{phase_equal, StateVector};
use smqc::rng::{seeded, substream};
use smqc::PartyId;

use crate::parse::{parse_inputs, parse_strategy};
use crate::{load_circuit, CliError};

#[derive(Args)]
pub struct RunArgs {
    /// Circuit file path.
    #[arg(long)]
    pub circuit: PathBuf,
    /// Per-party initial states, e.g. "0=|+>;1=[0.6,0,0.8,0]".
    #[arg(long)]
    pub inputs: Option<String>,
    /// Seed for all sampling (measurements, nonces, key streams).
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Branch handling: auto picks exhaustive for <= 3 nonlocal rounds on
    /// measurement-free circuits, sampled otherwise.
    #[arg(long, default_value = "auto")]
    pub mode: String,
    /// Nonlocal-round backend.
    #[arg(long, default_value = "peer")]
    pub backend: String,
    /// Per-party strategy, repeatable: "<party>=<name>[:<params>]".
    #[arg(long = "strategy")]
    pub strategies: Vec<String>,
    /// Number of sampled runs (sampled mode).
    #[arg(long, default_value_t = 1)]
    pub shots: usize,
    /// Most nonlocal rounds auto mode will enumerate exhaustively (16^k
    /// branches).
    #[arg(long, default_value_t = 3)]
    pub exhaustive_threshold: usize,
    /// Output directory for report.json and transcript.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let (ops, ownership) = load_circuit(&args.circuit)?;
    let schedule = build_schedule(&ops, &ownership);
    let inputs = parse_inputs(args.inputs.as_deref(), &ownership)?;
    let joint_input = inputs.joint(&ownership)?;

    let mut strategy_rng = substream(args.seed, 0x57);
    let mut strategies = vec![AdversaryStrategy::Honest; ownership.party_count() as usize];
    for text in &args.strategies {
        let (party, strategy) = parse_strategy(text, &ownership, &mut strategy_rng)?;
        strategies[party.0 as usize] = strategy;
    }

    let backend = match args.backend.as_str() {
        "peer" => Backend::Peer,
        "ttp" => Backend::Ttp,
        other => return Err(CliError::config(format!("unknown backend `{other}`"))),
    };

    let exhaustive = match args.mode.as_str() {
        "sampled" => false,
        "exhaustive" => {
            if schedule.has_measurements() {
                return Err(CliError::config(
                    "exhaustive mode requires a measurement-free circuit".to_string(),
                ));
            }
            if schedule.nl_cnot_count() > 4 {
                return Err(CliError::config(format!(
                    "{} nonlocal rounds exceed the exhaustive cap of 4 (16^k branches)",
                    schedule.nl_cnot_count()
                )));
            }
            true
        }
        "auto" => {
            !schedule.has_measurements() && schedule.nl_cnot_count() <= args.exhaustive_threshold
        }
        other => return Err(CliError::config(format!("unknown mode `{other}`"))),
    };
    let predicted_ops = attack_adjusted_ops(&ops, &ownership, &strategies);
    let mut report = BTreeMap::<String, serde_json::Value>::new();
    report.insert("circuit".into(), args.circuit.display().to_string().into());
    report.insert("backend".into(), args.backend.clone().into());
    report.insert("seed".into(), args.seed.into());
    report.insert("strategies".into(), args.strategies.clone().into());
    report.insert("nl_cnot_rounds".into(), schedule.nl_cnot_count().into());

    let mut first_transcript: Option<smqc::protocol::Transcript> = None;

    if exhaustive {
        let honest_expect = oracle_state(&ops, &joint_input, args.seed)?;
        let predicted_expect = predicted_ops
            .as_ref()
            .map(|p| oracle_state(p, &joint_input, args.seed))
            .transpose()?;

        let mut min_honest: f64 = 1.0;
        let mut min_predicted: f64 = 1.0;
        let mut branches = 0usize;
        for assignment in branch_space(if backend == Backend::Peer {
            schedule.nl_cnot_count()
        } else {
            0
        }) {
            let cfg = SmqcConfig {
                backend,
                mode: ExecMode::Forced(if backend == Backend::Peer {
                    assignment
                } else {
                    Vec::new()
                }),
                strategies: strategies.clone(),
                options: Default::default(),
                ttp_seed: args.seed,
            };
            let mut rng = seeded(args.seed);
            let out = run_smqc(&schedule, &ownership, &inputs, &cfg, &mut rng)?;
            let (_, mag) = phase_equal(&out.state, &honest_expect)?;
            min_honest = min_honest.min(mag);
            if let Some(expect) = &predicted_expect {
                let (_, mag) = phase_equal(&out.state, expect)?;
                min_predicted = min_predicted.min(mag);
            }
            if first_transcript.is_none() {
                first_transcript = Some(out.transcript);
            }
            branches += 1;
        }
        report.insert("mode".into(), "exhaustive".into());
        report.insert("branches".into(), branches.into());
        report.insert("min_overlap_vs_oracle".into(), min_honest.into());
        println!(
            "mode: exhaustive over {branches} branches ({})",
            args.backend
        );
        println!("min overlap vs honest oracle: {min_honest:.12}");
        if predicted_expect.is_some() {
            report.insert("min_overlap_vs_predicted".into(), min_predicted.into());
            println!("min overlap vs attack-predicted output: {min_predicted:.12}");
        }
    } else {
        // Sampled: with measurements, tally per-party outcome strings over
        // the shots and put the oracle's table beside them.
        let shots = args.shots.max(1);
        let mut protocol_table: BTreeMap<String, usize> = BTreeMap::new();
        let mut oracle_table: BTreeMap<String, usize> = BTreeMap::new();
        let mut last_overlap = None;
        for shot in 0..shots {
            let cfg = SmqcConfig {
                backend,
                mode: ExecMode::Sampled,
                strategies: strategies.clone(),
                options: Default::default(),
                ttp_seed: args.seed,
            };
            let mut rng = substream(args.seed, shot as u64);
            let out = run_smqc(&schedule, &ownership, &inputs, &cfg, &mut rng)?;
            *protocol_table
                .entry(outcome_key(&out.measured))
                .or_default() += 1;

            let mut oracle_rng = substream(args.seed ^ ORACLE_STREAM, shot as u64);
            let (oracle_out, oracle_bits) = oracle_simulate(&ops, &joint_input, &mut oracle_rng)?;
            *oracle_table
                .entry(oracle_outcome_key(&ops, &ownership, &oracle_bits))
                .or_default() += 1;

            if !schedule.has_measurements() {
                let (_, mag) = phase_equal(&out.state, &oracle_out)?;
                last_overlap = Some(mag);
            }
            if first_transcript.is_none() {
                first_transcript = Some(out.transcript);
            }
        }
        report.insert("mode".into(), "sampled".into());
        report.insert("shots".into(), shots.into());
        println!("mode: sampled, {shots} shot(s) ({})", args.backend);
        if schedule.has_measurements() {
            println!("measured outcome tables (protocol vs oracle):");
            let keys: std::collections::BTreeSet<String> = protocol_table
                .keys()
                .chain(oracle_table.keys())
                .cloned()
                .collect();
            for key in &keys {
                let p = protocol_table.get(key).copied().unwrap_or(0);
                let o = oracle_table.get(key).copied().unwrap_or(0);
                println!("  {key:<24} protocol {p:>6}  oracle {o:>6}");
            }
            report.insert(
                "protocol_outcomes".into(),
                serde_json::to_value(&protocol_table).expect("table serializes"),
            );
            report.insert(
                "oracle_outcomes".into(),
                serde_json::to_value(&oracle_table).expect("table serializes"),
            );
        } else if let Some(mag) = last_overlap {
            report.insert("overlap_vs_oracle".into(), mag.into());
            println!("overlap vs honest oracle: {mag:.12}");
            if let Some(p) = &predicted_ops {
                let expect = oracle_state(p, &joint_input, args.seed)?;
                let cfg = SmqcConfig {
                    backend,
                    mode: ExecMode::Sampled,
                    strategies: strategies.clone(),
                    options: Default::default(),
                    ttp_seed: args.seed,
                };
                let mut rng = substream(args.seed, 0);
                let out = run_smqc(&schedule, &ownership, &inputs, &cfg, &mut rng)?;
                let (_, mag) = phase_equal(&out.state, &expect)?;
                report.insert("overlap_vs_predicted".into(), mag.into());
                println!("overlap vs attack-predicted output: {mag:.12}");
            }
        }
    }

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let report_json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(dir.join("report.json"), report_json)?;
        if let Some(t) = &first_transcript {
            std::fs::write(dir.join("transcript.json"), t.to_json_string())?;
        }
        println!("wrote {}", dir.join("report.json").display());
        println!("wrote {}", dir.join("transcript.json").display());
    }
    Ok(())
}

/// Key for a run's measured bits: per-party bit strings in party order.
fn outcome_key(measured: &[(PartyId, Vec<u8>)]) -> String {
    let parts: Vec<String> = measured
        .iter()
        .map(|(p, bits)| {
            let s: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
            format!("{p}:{s}")
        })
        .collect();
    parts.join("|")
}

/// Reassembles the oracle's flat bit list into the same per-party key.
fn oracle_outcome_key(ops: &[CircuitOp], ownership: &OwnershipMap, bits: &[u8]) -> String {
    let mut per_party: Vec<(PartyId, Vec<u8>)> = (0..ownership.party_count())
        .map(|p| (PartyId(p), Vec::new()))
        .collect();
    let mut cursor = 0usize;
    for op in ops {
        if let CircuitOp::Measure { qubits } = op {
            for &q in qubits {
                per_party[ownership.owner(q).0 as usize]
                    .1
                    .push(bits[cursor]);
                cursor += 1;
            }
        }
    }
    outcome_key(&per_party)
}

fn oracle_state(
    ops: &[CircuitOp],
    input: &StateVector,
    seed: u64,
) -> Result<StateVector, CliError> {
    let mut rng = substream(seed, 0xC1);
    let (state, _) = oracle_simulate(ops, input, &mut rng)?;
    Ok(state)
}

/// Separates the oracle's sampling stream from the protocol's.
const ORACLE_STREAM: u64 = 0x5eed_0bad_cafe_f00d;

/// The predicted effect of rotated-basis and bit-flip strategies as a
/// transformed circuit: the deviation inserts a fixed single-qubit gate in
/// front of each nonlocal CNOT the strategist participates in. Returns None
/// when every strategy is honest/passive (or has no such closed form).
fn attack_adjusted_ops(
    ops: &[CircuitOp],
    ownership: &OwnershipMap,
    strategies: &[AdversaryStrategy],
) -> Option<Vec<CircuitOp>> {
    let mut changed = false;
    let mut out = Vec::with_capacity(ops.len());
    for op in ops {
        if let CircuitOp::Cnot { control, target } = op {
            if classify_cnot(*control, *target, ownership) == CnotKind::NonLocal {
                let control_strategy = &strategies[ownership.owner(*control).0 as usize];
                let target_strategy = &strategies[ownership.owner(*target).0 as usize];
                match control_strategy {
                    AdversaryStrategy::RotatedBasis {
                        basis_change,
                        side: GadgetRole::Control,
                    } => {
                        out.push(CircuitOp::Single {
                            gate: GateSpec::Custom(basis_change.rows()),
                            qubit: *control,
                        });
                        changed = true;
                    }
                    AdversaryStrategy::BitFlip {
                        side: GadgetRole::Control,
                    } => {
                        out.push(CircuitOp::Single {
                            gate: GateSpec::X,
                            qubit: *target,
                        });
                        changed = true;
                    }
                    _ => {}
                }
                match target_strategy {
                    AdversaryStrategy::RotatedBasis {
                        basis_change,
                        side: GadgetRole::Target,
                    } => {
                        out.push(CircuitOp::Single {
                            gate: GateSpec::Custom(basis_change.rows()),
                            qubit: *target,
                        });
                        changed = true;
                    }
                    AdversaryStrategy::BitFlip {
                        side: GadgetRole::Target,
                    } => {
                        out.push(CircuitOp::Single {
                            gate: GateSpec::Z,
                            qubit: *control,
                        });
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        out.push(op.clone());
    }
    if changed {
        Some(out)
    } else {
        None
    }
}
