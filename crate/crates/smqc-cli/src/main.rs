//! Command-line harness: scheduling, protocol runs against the monolithic
//! oracle, attack demonstrations, and the property-suite runner.
//!
//! Exit codes: 0 success, 2 parse/validation/config errors, 3 protocol
//! errors, 4 property or verdict failures.

mod attack;
mod parse;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smqc::circuit::{build_schedule, parse_circuit, validate, Round};
use smqc::verify::run_all;

#[derive(Parser)]
#[command(
    name = "smqc",
    about = "Simulator for secure multiparty quantum computation built on a commitment-backed nonlocal CNOT",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a circuit, print its round schedule.
    Schedule {
        /// Circuit file path.
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Execute a circuit through the distributed protocol and compare with
    /// the monolithic oracle.
    Run(run::RunArgs),
    /// Run one attack demonstration branch-exhaustively and print the
    /// verdict.
    AttackDemo(attack::AttackArgs),
    /// Run all property suites.
    Verify {
        /// Seed for the deterministic suites.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Disable the gadget's Pauli corrections (negative control); the
        /// gadget suites must then fail.
        #[arg(long, default_value_t = false)]
        inject_fault: bool,
    },
}

/// Failure with its process exit code.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn protocol(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn property(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<smqc::protocol::ProtocolError> for CliError {
    fn from(e: smqc::protocol::ProtocolError) -> Self {
        CliError::protocol(e.to_string())
    }
}

impl From<smqc::qsim::QsimError> for CliError {
    fn from(e: smqc::qsim::QsimError) -> Self {
        CliError::protocol(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Schedule { circuit } => cmd_schedule(&circuit),
        Command::Run(args) => run::cmd_run(&args),
        Command::AttackDemo(args) => attack::cmd_attack_demo(&args),
        Command::Verify { seed, inject_fault } => cmd_verify(seed, inject_fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

/// Reads, parses, and validates a circuit file.
pub fn load_circuit(
    path: &PathBuf,
) -> Result<(Vec<smqc::circuit::CircuitOp>, smqc::circuit::OwnershipMap), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let (ops, ownership) =
        parse_circuit(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if let Err(rejections) = validate(&ops, &ownership) {
        let lines: Vec<String> = rejections.iter().map(|r| format!("  {r}")).collect();
        return Err(CliError::config(format!(
            "{} rejected by the computation model:\n{}",
            path.display(),
            lines.join("\n")
        )));
    }
    Ok((ops, ownership))
}

fn cmd_schedule(path: &PathBuf) -> Result<(), CliError> {
    let (ops, ownership) = load_circuit(path)?;
    let schedule = build_schedule(&ops, &ownership);
    println!(
        "circuit: {} parties, {} qubits, {} operations",
        ownership.party_count(),
        ownership.num_qubits(),
        ops.len()
    );
    for (i, round) in schedule.rounds().iter().enumerate() {
        match round {
            Round::Local { party, ops } => {
                let listing: Vec<String> = ops.iter().map(describe_op).collect();
                println!("round {i:>3}: LQC {party}: {}", listing.join("; "));
            }
            Round::NonlocalCnot {
                control_party,
                control_qubit,
                target_party,
                target_qubit,
            } => {
                println!(
                    "round {i:>3}: NL-CNOT control q{control_qubit} ({control_party}) -> target q{target_qubit} ({target_party})"
                );
            }
        }
    }
    println!("{} NL-CNOT rounds", schedule.nl_cnot_count());
    Ok(())
}

fn describe_op(op: &smqc::circuit::CircuitOp) -> String {
    use smqc::circuit::CircuitOp;
    match op {
        CircuitOp::Single { gate, qubit } => format!("{} q{qubit}", gate.name()),
        CircuitOp::Cnot { control, target } => format!("cnot q{control} q{target}"),
        CircuitOp::Measure { qubits } => {
            let qs: Vec<String> = qubits.iter().map(|q| format!("q{q}")).collect();
            format!("measure {}", qs.join(" "))
        }
    }
}

fn cmd_verify(seed: u64, inject_fault: bool) -> Result<(), CliError> {
    if inject_fault {
        println!("fault injection: gadget corrections disabled (suites must fail)");
    }
    let outcomes = run_all(seed, inject_fault);
    let mut failures = 0;
    for outcome in &outcomes {
        println!("{outcome}");
        if !outcome.passed {
            failures += 1;
        }
    }
    println!("---");
    println!(
        "{} suites, {} failed (seed {seed})",
        outcomes.len(),
        failures
    );
    if failures > 0 {
        return Err(CliError::property(format!("{failures} suites failed")));
    }
    Ok(())
}
