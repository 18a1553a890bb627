//! Hash-based bit commitment and the fair two-bit swap.
//!
//! A commitment is a SHA-256 digest over the fixed serialization
//! `1 bit-byte || 16 nonce-bytes`, making it computationally binding and
//! hiding, and reproducible bit-for-bit across implementations. The swap of
//! two bits runs in two phases (both commits delivered, then both
//! openings) so that neither party can learn the counterpart's bit before
//! its own bit is fixed. The ordering rule is enforced on every delivery: an opening
//! observed before both commitments is a protocol violation.
//!
//! [`swap_protocol`] runs the honest exchange. Misbehaving endpoints
//! (opening a different bit, opening early, stopping after receiving the
//! peer's opening) are scripted through [`run_swap`], which is how the
//! detection paths are exercised.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rng::SimRng;

pub const NONCE_LEN: usize = 16;
pub const DIGEST_LEN: usize = 32;

/// Commit-phase wire tag.
pub const TAG_COMMIT: u8 = 0x01;
/// Open-phase wire tag.
pub const TAG_OPEN: u8 = 0x02;

/// Random blinding value bound into a commitment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Nonce(pub [u8; NONCE_LEN]);

impl Nonce {
    pub fn random(rng: &mut SimRng) -> Self {
        use rand::RngCore;
        let mut bytes = [0u8; NONCE_LEN];
        rng.fill_bytes(&mut bytes);
        Self(bytes)
    }
}

/// Digest binding a party to one bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommitmentToken(pub [u8; DIGEST_LEN]);

/// The values revealed in the open phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Opening {
    pub bit: u8,
    pub nonce: Nonce,
}

impl Opening {
    /// Fixed serialization: 1 bit-byte followed by the 16 nonce bytes.
    pub fn to_bytes(&self) -> [u8; 1 + NONCE_LEN] {
        let mut out = [0u8; 1 + NONCE_LEN];
        out[0] = self.bit;
        out[1..].copy_from_slice(&self.nonce.0);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        if bytes.len() != 1 + NONCE_LEN || bytes[0] > 1 {
            return None;
        }
        let mut nonce = [0u8; NONCE_LEN];
        nonce.copy_from_slice(&bytes[1..]);
        Some(Self {
            bit: bytes[0],
            nonce: Nonce(nonce),
        })
    }
}

/// Commits to a bit under a nonce.
pub fn commit(bit: u8, nonce: &Nonce) -> CommitmentToken {
    debug_assert!(bit <= 1);
    let opening = Opening { bit, nonce: *nonce };
    let digest = Sha256::digest(opening.to_bytes());
    let mut out = [0u8; DIGEST_LEN];
    out.copy_from_slice(&digest);
    CommitmentToken(out)
}

/// Accepts iff the opening reproduces the token.
pub fn open_verify(token: &CommitmentToken, opening: &Opening) -> bool {
    commit(opening.bit, &opening.nonce) == *token
}

/// Swap failure modes. Rejected openings and broken message ordering are
/// detected; a post-open abort is reported, not prevented.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum SwapError {
    #[error("party {party} opened a value that does not match its commitment")]
    CheatDetected { party: u16 },
    #[error("protocol violation: {detail}")]
    ProtocolViolation { detail: String },
    #[error("party {party} aborted after receiving the counterpart's opening")]
    Abort { party: u16 },
}

/// One message of the swap subprotocol.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapMessage {
    pub sender: u16,
    pub body: SwapBody,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SwapBody {
    Commit(CommitmentToken),
    Open(Opening),
}

impl SwapMessage {
    /// Wire encoding: type tag byte, sender id (2 bytes big-endian), payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match &self.body {
            SwapBody::Commit(token) => {
                out.push(TAG_COMMIT);
                out.extend_from_slice(&self.sender.to_be_bytes());
                out.extend_from_slice(&token.0);
            }
            SwapBody::Open(opening) => {
                out.push(TAG_OPEN);
                out.extend_from_slice(&self.sender.to_be_bytes());
                out.extend_from_slice(&opening.to_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        if bytes.len() < 3 {
            return None;
        }
        let sender = u16::from_be_bytes([bytes[1], bytes[2]]);
        match bytes[0] {
            TAG_COMMIT => {
                if bytes.len() != 3 + DIGEST_LEN {
                    return None;
                }
                let mut digest = [0u8; DIGEST_LEN];
                digest.copy_from_slice(&bytes[3..]);
                Some(Self {
                    sender,
                    body: SwapBody::Commit(CommitmentToken(digest)),
                })
            }
            TAG_OPEN => {
                let opening = Opening::from_bytes(&bytes[3..])?;
                Some(Self {
                    sender,
                    body: SwapBody::Open(opening),
                })
            }
            _ => None,
        }
    }
}

/// Ordered record of the four swap messages.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SwapTranscript {
    pub messages: Vec<SwapMessage>,
}

impl SwapTranscript {
    /// The two-phase ordering invariant: every commit precedes every open.
    pub fn commits_precede_opens(&self) -> bool {
        let last_commit = self
            .messages
            .iter()
            .rposition(|m| matches!(m.body, SwapBody::Commit(_)));
        let first_open = self
            .messages
            .iter()
            .position(|m| matches!(m.body, SwapBody::Open(_)));
        match (last_commit, first_open) {
            (Some(c), Some(o)) => c < o,
            _ => true,
        }
    }
}

/// Delivered bits of a completed swap, with its transcript.
#[derive(Clone, Debug)]
pub struct SwapOutcome {
    /// The first party's bit, as verified by the second party.
    pub a_to_b: u8,
    /// The second party's bit, as verified by the first party.
    pub b_to_a: u8,
    pub transcript: SwapTranscript,
}

/// Scripted endpoint behavior for exercising the failure paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SwapBehavior {
    #[default]
    Honest,
    /// Commits to the bit, then opens its complement.
    OpenFlippedBit,
    /// Commits to the bit, then opens under a fresh nonce.
    OpenWrongNonce,
    /// Sends its opening immediately after its own commit, without waiting
    /// for the peer's commit. Only deviates for the first mover; the second
    /// mover already holds the peer's commitment.
    OpenEarly,
    /// Stops after receiving the peer's opening, never sending its own.
    AbortAfterPeerOpens,
}

struct Endpoint {
    id: u16,
    bit: u8,
    nonce: Nonce,
    behavior: SwapBehavior,
    peer_token: Option<CommitmentToken>,
    peer_bit: Option<u8>,
}

impl Endpoint {
    fn new(id: u16, bit: u8, behavior: SwapBehavior, rng: &mut SimRng) -> Self {
        Self {
            id,
            bit,
            nonce: Nonce::random(rng),
            behavior,
            peer_token: None,
            peer_bit: None,
        }
    }

    fn commit_message(&self) -> SwapMessage {
        SwapMessage {
            sender: self.id,
            body: SwapBody::Commit(commit(self.bit, &self.nonce)),
        }
    }

    fn open_message(&self, rng: &mut SimRng) -> SwapMessage {
        let opening = match self.behavior {
            SwapBehavior::OpenFlippedBit => Opening {
                bit: 1 - self.bit,
                nonce: self.nonce,
            },
            SwapBehavior::OpenWrongNonce => Opening {
                bit: self.bit,
                nonce: Nonce::random(rng),
            },
            _ => Opening {
                bit: self.bit,
                nonce: self.nonce,
            },
        };
        SwapMessage {
            sender: self.id,
            body: SwapBody::Open(opening),
        }
    }

    fn receive(&mut self, msg: &SwapMessage) -> Result<(), SwapError> {
        match &msg.body {
            SwapBody::Commit(token) => {
                self.peer_token = Some(*token);
                Ok(())
            }
            SwapBody::Open(opening) => {
                let token = self
                    .peer_token
                    .ok_or_else(|| SwapError::ProtocolViolation {
                        detail: format!(
                            "party {} received an opening before the counterpart's commitment",
                            self.id
                        ),
                    })?;
                if !open_verify(&token, opening) {
                    return Err(SwapError::CheatDetected { party: msg.sender });
                }
                self.peer_bit = Some(opening.bit);
                Ok(())
            }
        }
    }
}

/// Exchanges two bits through commitments, with scripted behaviors.
/// `parties` are the endpoint ids of the bit-`a` holder and the bit-`b`
/// holder, in that order.
pub fn run_swap(
    a: u8,
    b: u8,
    parties: (u16, u16),
    behaviors: (SwapBehavior, SwapBehavior),
    rng: &mut SimRng,
) -> Result<SwapOutcome, SwapError> {
    let mut alice = Endpoint::new(parties.0, a, behaviors.0, rng);
    let mut bob = Endpoint::new(parties.1, b, behaviors.1, rng);
    let mut transcript = SwapTranscript::default();
    let mut commits_seen = 0usize;

    let deliver = |transcript: &mut SwapTranscript,
                   commits_seen: &mut usize,
                   receiver: &mut Endpoint,
                   msg: SwapMessage|
     -> Result<(), SwapError> {
        match msg.body {
            SwapBody::Commit(_) => *commits_seen += 1,
            SwapBody::Open(_) => {
                // Scheduler-level check of the two-phase rule.
                if *commits_seen < 2 {
                    transcript.messages.push(msg.clone());
                    return Err(SwapError::ProtocolViolation {
                        detail: format!(
                            "opening from party {} observed before both commitments",
                            msg.sender
                        ),
                    });
                }
            }
        }
        transcript.messages.push(msg.clone());
        receiver.receive(&msg)
    };

    // Phase 1: both commits. An `OpenEarly` first mover injects its opening
    // before the peer's commit has arrived; the scheduler flags it.
    deliver(
        &mut transcript,
        &mut commits_seen,
        &mut bob,
        alice.commit_message(),
    )?;
    if alice.behavior == SwapBehavior::OpenEarly {
        deliver(
            &mut transcript,
            &mut commits_seen,
            &mut bob,
            alice.open_message(rng),
        )?;
    }
    deliver(
        &mut transcript,
        &mut commits_seen,
        &mut alice,
        bob.commit_message(),
    )?;

    // Phase 2: both openings.
    deliver(
        &mut transcript,
        &mut commits_seen,
        &mut bob,
        alice.open_message(rng),
    )?;
    if bob.behavior == SwapBehavior::AbortAfterPeerOpens {
        return Err(SwapError::Abort { party: bob.id });
    }
    deliver(
        &mut transcript,
        &mut commits_seen,
        &mut alice,
        bob.open_message(rng),
    )?;
    if alice.behavior == SwapBehavior::AbortAfterPeerOpens {
        return Err(SwapError::Abort { party: alice.id });
    }

    Ok(SwapOutcome {
        a_to_b: bob.peer_bit.expect("set by verified opening"),
        b_to_a: alice.peer_bit.expect("set by verified opening"),
        transcript,
    })
}

/// The honest two-phase exchange of bits `a` and `b`.
pub fn swap_protocol(
    a: u8,
    b: u8,
    parties: (u16, u16),
    rng: &mut SimRng,
) -> Result<SwapOutcome, SwapError> {
    run_swap(
        a,
        b,
        parties,
        (SwapBehavior::Honest, SwapBehavior::Honest),
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn commit_is_deterministic_and_separating() {
        let mut rng = seeded(2);
        let nonce = Nonce::random(&mut rng);
        assert_eq!(commit(1, &nonce), commit(1, &nonce));

        let other = Nonce::random(&mut rng);
        assert_ne!(commit(1, &nonce), commit(1, &other));
        assert_ne!(commit(0, &nonce), commit(1, &nonce));
    }

    #[test]
    fn open_verify_accepts_honest_rejects_forged() {
        let mut rng = seeded(3);
        let nonce = Nonce::random(&mut rng);
        let token = commit(1, &nonce);
        assert!(open_verify(&token, &Opening { bit: 1, nonce }));
        assert!(!open_verify(&token, &Opening { bit: 0, nonce }));
        let altered = Nonce::random(&mut rng);
        assert!(!open_verify(
            &token,
            &Opening {
                bit: 1,
                nonce: altered
            }
        ));
    }

    #[test]
    fn honest_swap_delivers_both_bits() {
        let mut rng = seeded(4);
        let out = swap_protocol(1, 0, (0, 1), &mut rng).unwrap();
        assert_eq!(out.a_to_b, 1);
        assert_eq!(out.b_to_a, 0);
        assert_eq!(out.transcript.messages.len(), 4);
        assert!(out.transcript.commits_precede_opens());
    }

    #[test]
    fn flipped_opening_names_the_culprit() {
        let mut rng = seeded(5);
        let err = run_swap(
            1,
            0,
            (0, 1),
            (SwapBehavior::Honest, SwapBehavior::OpenFlippedBit),
            &mut rng,
        )
        .unwrap_err();
        assert_eq!(err, SwapError::CheatDetected { party: 1 });

        let mut rng = seeded(6);
        let err = run_swap(
            1,
            0,
            (0, 1),
            (SwapBehavior::OpenFlippedBit, SwapBehavior::Honest),
            &mut rng,
        )
        .unwrap_err();
        assert_eq!(err, SwapError::CheatDetected { party: 0 });
    }

    #[test]
    fn early_open_is_a_protocol_violation() {
        let mut rng = seeded(7);
        let err = run_swap(
            1,
            1,
            (0, 1),
            (SwapBehavior::OpenEarly, SwapBehavior::Honest),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, SwapError::ProtocolViolation { .. }));
    }

    #[test]
    fn abort_after_peer_opens_is_reported() {
        let mut rng = seeded(8);
        let err = run_swap(
            0,
            1,
            (0, 1),
            (SwapBehavior::Honest, SwapBehavior::AbortAfterPeerOpens),
            &mut rng,
        )
        .unwrap_err();
        assert_eq!(err, SwapError::Abort { party: 1 });
    }

    #[test]
    fn swap_is_symmetric_in_roles() {
        let mut rng_ab = seeded(9);
        let out_ab = swap_protocol(1, 0, (3, 7), &mut rng_ab).unwrap();
        let mut rng_ba = seeded(9);
        let out_ba = swap_protocol(0, 1, (7, 3), &mut rng_ba).unwrap();
        assert_eq!(out_ab.a_to_b, out_ba.b_to_a);
        assert_eq!(out_ab.b_to_a, out_ba.a_to_b);
        // Mirrored transcripts: same message kinds in the same phase order,
        // with the sender roles exchanged.
        for (m_ab, m_ba) in out_ab
            .transcript
            .messages
            .iter()
            .zip(&out_ba.transcript.messages)
        {
            let mirrored = match m_ab.sender {
                3 => 7,
                _ => 3,
            };
            assert_eq!(m_ba.sender, mirrored);
            assert_eq!(
                std::mem::discriminant(&m_ab.body),
                std::mem::discriminant(&m_ba.body)
            );
        }
    }

    #[test]
    fn wire_roundtrip() {
        let mut rng = seeded(10);
        let nonce = Nonce::random(&mut rng);
        let msgs = [
            SwapMessage {
                sender: 2,
                body: SwapBody::Commit(commit(0, &nonce)),
            },
            SwapMessage {
                sender: 5,
                body: SwapBody::Open(Opening { bit: 1, nonce }),
            },
        ];
        for msg in msgs {
            let bytes = msg.to_bytes();
            assert_eq!(SwapMessage::from_bytes(&bytes), Some(msg));
        }
        assert_eq!(SwapMessage::from_bytes(&[0xff, 0, 0]), None);
    }
}
