//! Line-oriented circuit file parser.
//!
//! Grammar (UTF-8, `#` starts a comment, tokens whitespace-separated):
//!
//! ```text
//! parties <n>
//! qubits <m>
//! owner <qubit> <party>          # one line per qubit
//! x|y|z|h|s|t <q>
//! u <q> <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
//! cnot <control> <target>
//! measure <q> [<q> ...]
//! ```
//!
//! Gate lines execute in file order. Parsing checks structure and index
//! ranges; the model check (cross-owner measurements, unitarity of `u`
//! matrices) is [`super::validate`]'s job.

use num_complex::Complex64;
use thiserror::Error;

use super::{CircuitOp, GateSpec, OwnershipMap};
use crate::PartyId;

/// Parse failure with its 1-based source line.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// Parses a circuit file into its operations and ownership map.
pub fn parse_circuit(text: &str) -> Result<(Vec<CircuitOp>, OwnershipMap), ParseError> {
    let mut parties: Option<u16> = None;
    let mut qubits: Option<usize> = None;
    let mut qubits_line = 0usize;
    let mut owners: Vec<Option<PartyId>> = Vec::new();
    let mut ops = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let word = tokens[0];

        match word {
            "parties" => {
                if parties.is_some() {
                    return Err(ParseError::new(line_no, "duplicate `parties` declaration"));
                }
                let n: u16 = parse_num(&tokens, 1, line_no, "party count")?;
                if n == 0 {
                    return Err(ParseError::new(line_no, "party count must be positive"));
                }
                expect_len(&tokens, 2, line_no)?;
                parties = Some(n);
            }
            "qubits" => {
                if qubits.is_some() {
                    return Err(ParseError::new(line_no, "duplicate `qubits` declaration"));
                }
                let m: usize = parse_num(&tokens, 1, line_no, "qubit count")?;
                if m == 0 {
                    return Err(ParseError::new(line_no, "qubit count must be positive"));
                }
                expect_len(&tokens, 2, line_no)?;
                qubits = Some(m);
                qubits_line = line_no;
                owners = vec![None; m];
            }
            "owner" => {
                let m =
                    qubits.ok_or_else(|| ParseError::new(line_no, "`owner` before `qubits`"))?;
                let n =
                    parties.ok_or_else(|| ParseError::new(line_no, "`owner` before `parties`"))?;
                expect_len(&tokens, 3, line_no)?;
                let q: usize = parse_num(&tokens, 1, line_no, "qubit index")?;
                let p: u16 = parse_num(&tokens, 2, line_no, "party index")?;
                if q >= m {
                    return Err(ParseError::new(
                        line_no,
                        format!("qubit {q} out of range (m={m})"),
                    ));
                }
                if p >= n {
                    return Err(ParseError::new(
                        line_no,
                        format!("party {p} out of range (n={n})"),
                    ));
                }
                if owners[q].is_some() {
                    return Err(ParseError::new(
                        line_no,
                        format!("duplicate owner for qubit {q}"),
                    ));
                }
                owners[q] = Some(PartyId(p));
            }
            "x" | "y" | "z" | "h" | "s" | "t" => {
                let m = require_header(qubits, line_no)?;
                expect_len(&tokens, 2, line_no)?;
                let q = parse_qubit(&tokens, 1, m, line_no)?;
                let gate = match word {
                    "x" => GateSpec::X,
                    "y" => GateSpec::Y,
                    "z" => GateSpec::Z,
                    "h" => GateSpec::H,
                    "s" => GateSpec::S,
                    _ => GateSpec::T,
                };
                ops.push(CircuitOp::Single { gate, qubit: q });
            }
            "u" => {
                let m = require_header(qubits, line_no)?;
                expect_len(&tokens, 10, line_no)?;
                let q = parse_qubit(&tokens, 1, m, line_no)?;
                let mut vals = [0.0f64; 8];
                for (i, v) in vals.iter_mut().enumerate() {
                    *v = parse_num(&tokens, 2 + i, line_no, "matrix entry")?;
                }
                let mat = [
                    [
                        Complex64::new(vals[0], vals[1]),
                        Complex64::new(vals[2], vals[3]),
                    ],
                    [
                        Complex64::new(vals[4], vals[5]),
                        Complex64::new(vals[6], vals[7]),
                    ],
                ];
                ops.push(CircuitOp::Single {
                    gate: GateSpec::Custom(mat),
                    qubit: q,
                });
            }
            "cnot" => {
                let m = require_header(qubits, line_no)?;
                expect_len(&tokens, 3, line_no)?;
                let control = parse_qubit(&tokens, 1, m, line_no)?;
                let target = parse_qubit(&tokens, 2, m, line_no)?;
                if control == target {
                    return Err(ParseError::new(line_no, "cnot control equals target"));
                }
                ops.push(CircuitOp::Cnot { control, target });
            }
            "measure" => {
                let m = require_header(qubits, line_no)?;
                if tokens.len() < 2 {
                    return Err(ParseError::new(line_no, "measure needs at least one qubit"));
                }
                let mut qs = Vec::with_capacity(tokens.len() - 1);
                for i in 1..tokens.len() {
                    let q = parse_qubit(&tokens, i, m, line_no)?;
                    if qs.contains(&q) {
                        return Err(ParseError::new(
                            line_no,
                            format!("qubit {q} measured twice"),
                        ));
                    }
                    qs.push(q);
                }
                ops.push(CircuitOp::Measure { qubits: qs });
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    format!("unknown gate or directive `{other}`"),
                ));
            }
        }
    }

    let parties = parties.ok_or_else(|| ParseError::new(0, "missing `parties` declaration"))?;
    let _ = qubits.ok_or_else(|| ParseError::new(0, "missing `qubits` declaration"))?;
    let mut owner = Vec::with_capacity(owners.len());
    for (q, o) in owners.iter().enumerate() {
        match o {
            Some(p) => owner.push(*p),
            None => {
                return Err(ParseError::new(
                    qubits_line,
                    format!("qubit {q} without owner"),
                ));
            }
        }
    }
    Ok((ops, OwnershipMap::new(parties, owner)))
}

fn require_header(qubits: Option<usize>, line: usize) -> Result<usize, ParseError> {
    qubits.ok_or_else(|| ParseError::new(line, "gate line before `qubits` declaration"))
}

fn expect_len(tokens: &[&str], want: usize, line: usize) -> Result<(), ParseError> {
    if tokens.len() != want {
        return Err(ParseError::new(
            line,
            format!("expected {} tokens, found {}", want, tokens.len()),
        ));
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(
    tokens: &[&str],
    pos: usize,
    line: usize,
    what: &str,
) -> Result<T, ParseError> {
    let tok = tokens
        .get(pos)
        .ok_or_else(|| ParseError::new(line, format!("missing {what}")))?;
    tok.parse::<T>()
        .map_err(|_| ParseError::new(line, format!("invalid {what} `{tok}`")))
}

fn parse_qubit(tokens: &[&str], pos: usize, m: usize, line: usize) -> Result<usize, ParseError> {
    let q: usize = parse_num(tokens, pos, line, "qubit index")?;
    if q >= m {
        return Err(ParseError::new(
            line,
            format!("qubit {q} out of range (m={m})"),
        ));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate;

    #[test]
    fn minimal_two_party_circuit() {
        let text = "parties 2\nqubits 2\nowner 0 0\nowner 1 1\ncnot 0 1\n";
        let (ops, own) = parse_circuit(text).unwrap();
        assert_eq!(
            ops,
            vec![CircuitOp::Cnot {
                control: 0,
                target: 1
            }]
        );
        assert_eq!(own.owner(0), PartyId(0));
        assert_eq!(own.owner(1), PartyId(1));
        assert_eq!(own.party_count(), 2);
    }

    #[test]
    fn cross_owner_measure_parses_then_fails_validation() {
        let text = "parties 2\nqubits 2\nowner 0 0\nowner 1 1\nmeasure 0 1\n";
        let (ops, own) = parse_circuit(text).unwrap();
        assert_eq!(ops.len(), 1);
        assert!(validate(&ops, &own).is_err());
    }

    #[test]
    fn custom_gate_line() {
        let text = "parties 1\nqubits 1\nowner 0 0\nu 0 0 0 1 0 1 0 0 0\n";
        let (ops, _) = parse_circuit(text).unwrap();
        match &ops[0] {
            CircuitOp::Single {
                gate: GateSpec::Custom(m),
                qubit: 0,
            } => {
                assert_eq!(m[0][1], Complex64::new(1.0, 0.0));
                assert_eq!(m[1][0], Complex64::new(1.0, 0.0));
            }
            other => panic!("unexpected op {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "parties 2\nqubits 2\nowner 0 0\nowner 1 1\nfrobnicate 0\n";
        let err = parse_circuit(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("unknown gate"));

        let text = "parties 2\nqubits 2\nowner 0 0\ncnot 0 1\n";
        let err = parse_circuit(text).unwrap_err();
        assert!(err.message.contains("without owner"));

        let text = "parties 2\nqubits 2\nowner 0 0\nowner 1 1\ncnot 0 7\n";
        let err = parse_circuit(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("out of range"));
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "# a circuit\nparties 1\n\nqubits 1  # one qubit\nowner 0 0\nh 0\n";
        let (ops, _) = parse_circuit(text).unwrap();
        assert_eq!(ops.len(), 1);
    }
}
