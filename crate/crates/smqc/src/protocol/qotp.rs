//! Quantum one-time pad and its CNOT homomorphism.
//!
//! A qubit is encrypted by `X^a Z^b` under key bits `(a, b)`; averaging over
//! all four keys leaves the maximally mixed state, so the ciphertext reveals
//! nothing. CNOT commutes with the pad under the public key-update rule
//!
//! ```text
//! CNOT · (X^a Z^b ⊗ X^c Z^d) ∝ (X^a Z^{b⊕d} ⊗ X^{a⊕c} Z^d) · CNOT
//! ```
//!
//! which lets a third party apply CNOT to two encrypted qubits without
//! learning the plaintexts: decryption with the updated keys yields the
//! CNOT of the original inputs.

use crate::qsim::{QsimError, StateVector, Unitary2, Unitary4};

/// Per-qubit one-time-pad key: `x` selects the X factor, `z` the Z factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QotpKey {
    pub x: u8,
    pub z: u8,
}

impl QotpKey {
    pub fn new(x: u8, z: u8) -> Self {
        debug_assert!(x <= 1 && z <= 1);
        Self { x, z }
    }
}

/// Applies `X^x Z^z` to one qubit (Z first, then X).
pub fn qotp_encrypt_mut(
    state: &mut StateVector,
    qubit: usize,
    key: QotpKey,
) -> Result<(), QsimError> {
    if key.z == 1 {
        state.apply_1q_mut(&Unitary2::z(), qubit)?;
    }
    if key.x == 1 {
        state.apply_1q_mut(&Unitary2::x(), qubit)?;
    }
    Ok(())
}

/// Applies `Z^z X^x`, the exact inverse of [`qotp_encrypt_mut`].
pub fn qotp_decrypt_mut(
    state: &mut StateVector,
    qubit: usize,
    key: QotpKey,
) -> Result<(), QsimError> {
    if key.x == 1 {
        state.apply_1q_mut(&Unitary2::x(), qubit)?;
    }
    if key.z == 1 {
        state.apply_1q_mut(&Unitary2::z(), qubit)?;
    }
    Ok(())
}

/// The public key-update rule for CNOT: control `(a, b) -> (a, b⊕d)`,
/// target `(c, d) -> (a⊕c, d)`.
pub fn cnot_key_update(control: QotpKey, target: QotpKey) -> (QotpKey, QotpKey) {
    (
        QotpKey::new(control.x, control.z ^ target.z),
        QotpKey::new(control.x ^ target.x, target.z),
    )
}

/// The TTP role's action in one nonlocal-CNOT call: applies CNOT directly to
/// the two encrypted qubits and returns the updated keys. Keys are the ones
/// preshared with the TTP; a key mismatch is not detectable in-band and
/// surfaces only as wrong end-to-end output.
pub fn ttp_nl_cnot(
    state: &mut StateVector,
    control_qubit: usize,
    target_qubit: usize,
    control_key: QotpKey,
    target_key: QotpKey,
) -> Result<(QotpKey, QotpKey), QsimError> {
    state.apply_2q_mut(&Unitary4::cnot(), control_qubit, target_qubit)?;
    Ok(cnot_key_update(control_key, target_key))
}

/// All sixteen `(control, target)` key pairs.
pub fn all_key_pairs() -> Vec<(QotpKey, QotpKey)> {
    let mut out = Vec::with_capacity(16);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out.push((QotpKey::new(a, b), QotpKey::new(c, d)));
                }
            }
        }
    }
    out
}

/// Checks the key-update identity as a 4x4 operator equation up to global
/// phase; returns the largest entrywise deviation over all key pairs.
pub fn key_update_identity_deviation() -> f64 {
    let cnot = Unitary4::cnot();
    let mut max_dev: f64 = 0.0;
    for (ck, tk) in all_key_pairs() {
        let pad = |k: QotpKey| {
            let mut m = Unitary2::identity();
            if k.z == 1 {
                m = Unitary2::z().mul(&m);
            }
            if k.x == 1 {
                m = Unitary2::x().mul(&m);
            }
            m
        };
        let lhs = cnot.mul(&Unitary4::kron(&pad(ck), &pad(tk)));
        let (ck2, tk2) = cnot_key_update(ck, tk);
        let rhs = Unitary4::kron(&pad(ck2), &pad(tk2)).mul(&cnot);
        match lhs.phase_relative_to(&rhs, 1e-9) {
            Some(phase) => {
                let mut dev: f64 = 0.0;
                for r in 0..4 {
                    for c in 0..4 {
                        dev = dev.max((lhs.entry(r, c) - phase * rhs.entry(r, c)).norm());
                    }
                }
                max_dev = max_dev.max(dev);
            }
            None => return f64::INFINITY,
        }
    }
    max_dev
}
