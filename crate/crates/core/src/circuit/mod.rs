//! The per-checkpoint attestation relation.
//!
//! C1 checks `k` sampled chain links (SHA-256 in-circuit, Poseidon-Merkle
//! openings against the public root), C2 keeps each feature inside its
//! population bounds, C3 enforces the minimum checkpoint gap and ties the
//! public duration to the private timestamp, and C4 recomputes the
//! checkpoint hash over the aggregate feature commitment.

pub mod config;
pub mod fixed_point;
pub mod inputs;
pub mod predicate;
pub mod synthesis;
pub mod synthetic;

pub use config::CircuitConfig;
pub use fixed_point::{decode_fixed_point, encode_fixed_point};
pub use inputs::{assemble, PrivateWitness, PublicInputs, SampleWitness};
pub use synthesis::{constraint_count, AttestationCircuit, ConstraintReport};
