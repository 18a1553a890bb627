//! Value parsers for CLI flags: named gates, per-party input states, and
//! per-party strategies.

use num_complex::Complex64;

use smqc::adversary::{
    is_clifford, random_clifford, AdversaryStrategy, CorruptionTarget, GadgetRole,
};
use smqc::circuit::OwnershipMap;
use smqc::protocol::PartyInputs;
use smqc::qsim::{StateVector, Unitary2};
use smqc::rng::SimRng;
use smqc::PartyId;

use crate::CliError;

/// Parses a gate argument: a named gate, `random`, `random-clifford`, or
/// eight comma-separated numbers (re, im pairs, row-major).
pub fn parse_gate(text: &str, rng: &mut SimRng) -> Result<Unitary2, CliError> {
    match text.to_ascii_lowercase().as_str() {
        "i" | "id" => return Ok(Unitary2::identity()),
        "x" => return Ok(Unitary2::x()),
        "y" => return Ok(Unitary2::y()),
        "z" => return Ok(Unitary2::z()),
        "h" => return Ok(Unitary2::h()),
        "s" => return Ok(Unitary2::s()),
        "sdg" => return Ok(Unitary2::s_dagger()),
        "t" => return Ok(Unitary2::t()),
        "tdg" => return Ok(Unitary2::t_dagger()),
        "random" => return Ok(Unitary2::random(rng)),
        "random-clifford" => return Ok(random_clifford(rng)),
        _ => {}
    }
    let nums: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|_| CliError::config(format!("cannot parse gate `{text}`")))?;
    if nums.len() != 8 {
        return Err(CliError::config(format!(
            "explicit gate needs 8 numbers (re/im pairs), got {}",
            nums.len()
        )));
    }
    let m = [
        [
            Complex64::new(nums[0], nums[1]),
            Complex64::new(nums[2], nums[3]),
        ],
        [
            Complex64::new(nums[4], nums[5]),
            Complex64::new(nums[6], nums[7]),
        ],
    ];
    Unitary2::new(m).map_err(|_| CliError::config(format!("matrix `{text}` is not unitary")))
}

/// Requires the parsed gate to be a Clifford.
pub fn parse_clifford(text: &str, rng: &mut SimRng) -> Result<Unitary2, CliError> {
    let u = parse_gate(text, rng)?;
    if !is_clifford(&u) {
        return Err(CliError::config(format!("`{text}` is not Clifford")));
    }
    Ok(u)
}

/// Parses a single-qubit ket token: `|0>`, `|1>`, `|+>`, `|->`.
fn parse_ket(token: &str) -> Result<StateVector, CliError> {
    let zero = StateVector::basis_state(1, 0).expect("in range");
    let one = StateVector::basis_state(1, 1).expect("in range");
    match token {
        "|0>" => Ok(zero),
        "|1>" => Ok(one),
        "|+>" => Ok(zero.apply_1q(&Unitary2::h(), 0).expect("one qubit")),
        "|->" => Ok(one.apply_1q(&Unitary2::h(), 0).expect("one qubit")),
        other => Err(CliError::config(format!(
            "unknown ket `{other}` (use |0>, |1>, |+>, |->)"
        ))),
    }
}

/// Parses one party's state: a ket product like `|0>|+>` or an amplitude
/// list `[re,im,re,im,...]` of length 2^k · 2.
fn parse_party_state(text: &str) -> Result<StateVector, CliError> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let nums: Result<Vec<f64>, _> = inner.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let nums =
            nums.map_err(|_| CliError::config(format!("cannot parse amplitudes `{text}`")))?;
        if nums.len() % 2 != 0 || !(nums.len() / 2).is_power_of_two() {
            return Err(CliError::config(
                "amplitude list must hold 2^k complex numbers as re,im pairs".to_string(),
            ));
        }
        let amps: Vec<Complex64> = nums
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-9 {
            return Err(CliError::config("amplitude list has zero norm".to_string()));
        }
        let normalized: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
        return StateVector::from_amplitudes(normalized)
            .map_err(|e| CliError::config(format!("bad amplitude list: {e}")));
    }

    let mut kets = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let end = rest
            .find('>')
            .ok_or_else(|| CliError::config(format!("malformed ket string `{text}`")))?;
        kets.push(parse_ket(&rest[..=end])?);
        rest = &rest[end + 1..];
    }
    if kets.is_empty() {
        return Err(CliError::config("empty state specification".to_string()));
    }
    let mut joint = kets[0].clone();
    for ket in &kets[1..] {
        joint = joint.tensor(ket);
    }
    Ok(joint)
}

/// Parses `--inputs "<party>=<state>;<party>=<state>"`. Unmentioned parties
/// default to |0...0>.
pub fn parse_inputs(spec: Option<&str>, ownership: &OwnershipMap) -> Result<PartyInputs, CliError> {
    let mut states: Vec<StateVector> = (0..ownership.party_count())
        .map(|p| {
            StateVector::basis_state(ownership.input_size(PartyId(p)).max(1), 0).expect("in range")
        })
        .collect();
    if let Some(spec) = spec {
        for part in spec.split(';').filter(|s| !s.trim().is_empty()) {
            let (party_text, state_text) = part
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("input `{part}` is not party=state")))?;
            let party: u16 = party_text
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("bad party id `{party_text}`")))?;
            if party >= ownership.party_count() {
                return Err(CliError::config(format!(
                    "party {party} out of range ({} parties)",
                    ownership.party_count()
                )));
            }
            let state = parse_party_state(state_text)?;
            let want = ownership.input_size(PartyId(party));
            if state.num_qubits() != want {
                return Err(CliError::config(format!(
                    "party {party} owns {want} qubits but the state has {}",
                    state.num_qubits()
                )));
            }
            states[party as usize] = state;
        }
    }
    Ok(PartyInputs::new(states))
}

/// Parses one `--strategy <party>=<name>[:<params>]` occurrence.
pub fn parse_strategy(
    text: &str,
    ownership: &OwnershipMap,
    rng: &mut SimRng,
) -> Result<(PartyId, AdversaryStrategy), CliError> {
    let (party_text, rest) = text
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("strategy `{text}` is not party=name")))?;
    let party: u16 = party_text
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("bad party id `{party_text}`")))?;
    if party >= ownership.party_count() {
        return Err(CliError::config(format!(
            "party {party} out of range ({} parties)",
            ownership.party_count()
        )));
    }
    let (name, params) = match rest.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p.trim())),
        None => (rest.trim(), None),
    };
    let side = |params: Option<&str>| -> Result<GadgetRole, CliError> {
        match params.unwrap_or("control") {
            "control" => Ok(GadgetRole::Control),
            "target" => Ok(GadgetRole::Target),
            other => Err(CliError::config(format!("unknown side `{other}`"))),
        }
    };
    let strategy = match name {
        "honest" => AdversaryStrategy::Honest,
        "passive" => AdversaryStrategy::PassiveRecorder,
        "bitflip" | "bit-flip" => AdversaryStrategy::BitFlip { side: side(params)? },
        "rotated-basis" => {
            let mut parts = params.unwrap_or("h").splitn(2, ',');
            let gate = parse_gate(parts.next().unwrap_or("h"), rng)?;
            let side = side(parts.next())?;
            AdversaryStrategy::RotatedBasis { basis_change: gate, side }
        }
        "resource-corruption" => {
            let mut parts = params.unwrap_or("z,control-carrier").splitn(2, ',');
            let gate = parse_clifford(parts.next().unwrap_or("z"), rng)?;
            let carrier = match parts.next().unwrap_or("control-carrier") {
                "control-carrier" => CorruptionTarget::ControlCarrier,
                "target-carrier" => CorruptionTarget::TargetCarrier,
                other => return Err(CliError::config(format!("unknown carrier `{other}`"))),
            };
            AdversaryStrategy::resource_corruption(gate, carrier)
                .map_err(|e| CliError::config(e.to_string()))?
        }
        other => {
            return Err(CliError::config(format!(
                "unknown strategy `{other}` (honest, passive, bitflip, rotated-basis, resource-corruption)"
            )))
        }
    };
    Ok((PartyId(party), strategy))
}
