//! Simulator for secure multiparty quantum computation (SMQC) of circuits
//! that contain no nonlocal measurements.
//!
//! A joint circuit over `n` parties is decomposed into local quantum circuits
//! and nonlocal CNOT gates (control and target owned by different parties).
//! Each nonlocal CNOT is evaluated by a two-party teleportation gadget: a
//! four-qubit resource state is shared, both parties Bell-measure, and the two
//! correction-relevant bits are exchanged through a commit-then-open fair
//! swap. A trusted-third-party backend based on quantum-one-time-pad
//! encrypted CNOT is provided as a cross-check, and an adversary layer
//! reproduces the known active attacks on the gadget together with the
//! passive-security statistics of honest runs.
//!
//! Module map:
//! - [`qsim`]: deterministic state-vector core with gates, Bell machinery,
//!   measurements, density-matrix and Schmidt analysis.
//! - [`circuit`]: circuit files, validation against the
//!   no-nonlocal-measurement model, scheduling, and the monolithic oracle.
//! - [`commitment`]: hash-based bit commitment and the fair two-bit swap.
//! - [`protocol`]: the nonlocal-CNOT gadget, the one-time-pad TTP variant,
//!   the multi-party runtime, and transcripts.
//! - [`adversary`]: attack strategies, their effect verifiers, and the
//!   reduced-state vulnerability analysis.
//! - [`verify`]: runnable property suites backing `smqc verify`.

pub mod adversary;
pub mod circuit;
pub mod commitment;
pub mod protocol;
pub mod qsim;
pub mod rng;
pub mod verify;

use serde::{Deserialize, Serialize};

/// Identifies one of the `n` computation parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartyId(pub u16);

impl std::fmt::Display for PartyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// Tolerance for exact algebraic identities (unitarity, norms, traces).
pub const TOL_ALGEBRAIC: f64 = 1e-12;
/// Tolerance for composed protocol outputs compared up to global phase.
pub const TOL_PROTOCOL: f64 = 1e-10;
/// Tolerance for full end-to-end circuit runs against the oracle.
pub const TOL_END_TO_END: f64 = 1e-9;
