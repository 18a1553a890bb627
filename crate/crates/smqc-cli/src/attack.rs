//! `smqc attack-demo`: run one attack verifier branch-exhaustively over a
//! batch of input pairs and print the verdict.

use std::path::PathBuf;

use clap::Args;

use smqc::adversary::{
    recover_local_unitary, reduced_target_comparison, run_bit_flip_attack,
    run_resource_corruption_attack, run_rotated_basis_attack, x_eigenstate_comparison,
    AttackReport, CorruptionTarget, GadgetRole, TargetSign,
};
use smqc::qsim::{phase_equal, StateVector, Unitary4};
use smqc::rng::substream;

use crate::parse::{parse_clifford, parse_gate};
use crate::CliError;

#[derive(Args)]
pub struct AttackArgs {
    /// One of: rotated-basis, bit-flip, resource-corruption,
    /// reduced-invariance.
    pub name: String,
    /// Basis-change unitary for rotated-basis.
    #[arg(long, default_value = "h")]
    pub u: String,
    /// Clifford operator for resource-corruption.
    #[arg(long, default_value = "z")]
    pub c: String,
    /// Corrupted carrier for resource-corruption: control-carrier or
    /// target-carrier.
    #[arg(long, default_value = "control-carrier")]
    pub carrier: String,
    /// Attacking side for rotated-basis/bit-flip: control or target.
    #[arg(long, default_value = "control")]
    pub side: String,
    /// Target eigenstate sign for reduced-invariance: + or -.
    #[arg(long, default_value = "+")]
    pub sign: String,
    /// Random input pairs to test.
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    #[arg(long, default_value_t = 99)]
    pub seed: u64,
    /// Output directory for the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_attack_demo(args: &AttackArgs) -> Result<(), CliError> {
    let mut rng = substream(args.seed, 0xA7);
    let side = match args.side.as_str() {
        "control" => GadgetRole::Control,
        "target" => GadgetRole::Target,
        other => return Err(CliError::config(format!("unknown side `{other}`"))),
    };

    let report = match args.name.as_str() {
        "rotated-basis" => {
            let u = parse_gate(&args.u, &mut rng)?;
            let mut merged: Option<AttackReport> = None;
            for _ in 0..args.pairs.max(1) {
                let control = StateVector::random(1, &mut rng);
                let target = StateVector::random(1, &mut rng);
                let (_, report) = run_rotated_basis_attack(&u, side, &control, &target, &mut rng)
                    .map_err(|e| CliError::protocol(e.to_string()))?;
                merged = Some(merge(merged, report));
            }
            merged.expect("at least one pair")
        }
        "bit-flip" => {
            let mut merged: Option<AttackReport> = None;
            for _ in 0..args.pairs.max(1) {
                let control = StateVector::random(1, &mut rng);
                let target = StateVector::random(1, &mut rng);
                let (_, report) = run_bit_flip_attack(side, &control, &target, &mut rng)
                    .map_err(|e| CliError::protocol(e.to_string()))?;
                merged = Some(merge(merged, report));
            }
            merged.expect("at least one pair")
        }
        "resource-corruption" => {
            let c = parse_clifford(&args.c, &mut rng)?;
            let carrier = match args.carrier.as_str() {
                "control-carrier" => CorruptionTarget::ControlCarrier,
                "target-carrier" => CorruptionTarget::TargetCarrier,
                other => return Err(CliError::config(format!("unknown carrier `{other}`"))),
            };
            let mut merged: Option<AttackReport> = None;
            for _ in 0..args.pairs.max(1) {
                let control = StateVector::random(1, &mut rng);
                let target = StateVector::random(1, &mut rng);
                let (_, _, report) =
                    run_resource_corruption_attack(&c, carrier, &control, &target, &mut rng)
                        .map_err(|e| CliError::protocol(e.to_string()))?;
                merged = Some(merge(merged, report));
            }
            merged.expect("at least one pair")
        }
        "reduced-invariance" => reduced_invariance_report(args, &mut rng)?,
        other => {
            return Err(CliError::config(format!(
                "unknown strategy `{other}` (rotated-basis, bit-flip, resource-corruption, reduced-invariance)"
            )))
        }
    };

    let verdict = if report.verdict { "PASS" } else { "FAIL" };
    println!(
        "{}: {verdict} - {} branches, max deviation {:.2e} ({})",
        report.strategy, report.branches_checked, report.max_deviation, report.params
    );
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("attack-report.json");
        std::fs::write(&path, report.to_json_string())?;
        println!("wrote {}", path.display());
    }
    if !report.verdict {
        return Err(CliError::property(format!(
            "{} verdict failed",
            report.strategy
        )));
    }
    Ok(())
}

fn merge(acc: Option<AttackReport>, next: AttackReport) -> AttackReport {
    match acc {
        None => next,
        Some(mut merged) => {
            merged.branches_checked += next.branches_checked;
            merged.max_deviation = merged.max_deviation.max(next.max_deviation);
            merged.verdict = merged.verdict && next.verdict;
            merged
        }
    }
}

/// Distance table over random control pairs for an X-eigenstate target,
/// the computational-basis negative control, and the patch-unitary
/// recovery.
fn reduced_invariance_report(
    args: &AttackArgs,
    rng: &mut smqc::rng::SimRng,
) -> Result<AttackReport, CliError> {
    let sign: TargetSign = args.sign.parse().map_err(|e: String| CliError::config(e))?;
    let pairs = args.pairs.max(1) * 10;
    let mut max_distance: f64 = 0.0;
    let mut max_recovery_dev: f64 = 0.0;
    for _ in 0..pairs {
        let phi = StateVector::random(1, rng);
        let phi_prime = StateVector::random(1, rng);
        let cmp = x_eigenstate_comparison(&phi, &phi_prime, sign)?;
        max_distance = max_distance.max(cmp.trace_distance);

        let patch = recover_local_unitary(&phi, &phi_prime, sign)?;
        let s = phi.tensor(&sign.ket()).apply_2q(&Unitary4::cnot(), 0, 1)?;
        let s_prime = phi_prime
            .tensor(&sign.ket())
            .apply_2q(&Unitary4::cnot(), 0, 1)?;
        let (_, mag) = phase_equal(&s.apply_1q(&patch, 0)?, &s_prime)?;
        max_recovery_dev = max_recovery_dev.max(1.0 - mag);
    }
    let zero = StateVector::basis_state(1, 0)?;
    let negative = reduced_target_comparison(&zero, &TargetSign::Plus.ket(), &zero)?.trace_distance;

    println!("reduced-state distance over {pairs} pairs: max {max_distance:.2e}");
    println!("negative control (computational target): {negative:.3}");
    println!("patch-unitary recovery deviation: max {max_recovery_dev:.2e}");
    let verdict = max_distance <= 1e-10 && negative > 0.1 && max_recovery_dev <= 1e-10;
    Ok(AttackReport {
        strategy: "reduced-invariance".to_string(),
        params: format!("sign={}, negative_control={negative:.3}", args.sign),
        branches_checked: pairs,
        max_deviation: max_distance.max(max_recovery_dev),
        verdict,
    })
}
