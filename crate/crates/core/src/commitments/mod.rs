//! Pedersen commitments on the embedded curve and range proofs over them.

pub mod pedersen;
pub mod point;
pub mod range_proof;

pub use pedersen::{aggregate, aggregate_openings, commit, delta_commitment, Commitment, CommitmentParams, Opening};
pub use range_proof::{range_prove, range_verify, RangeProof, RangeStatement};
