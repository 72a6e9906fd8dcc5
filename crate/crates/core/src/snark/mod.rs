//! Groth16 over BN254: seeded setup, proving with cached constraint
//! matrices, single and batched verification, proof encoding.

pub mod keys;
pub mod msm;
pub mod proof;
pub mod prover;
pub mod verifier;

pub use keys::{setup, setup_with_mode, ProverKey, SetupArtifacts, SetupMode, VerifierKey, CURVE};
pub use proof::{proof_from_bytes, proof_to_bytes, AttestationProof, ProofBundle, CORE_PROOF_BYTES};
pub use prover::prove_core;
pub use verifier::{batch_verify, verify};
