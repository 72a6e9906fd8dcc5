//! Raw evidence: sequential work chains, their Poseidon-Merkle commitments,
//! sampled positions and chained checkpoints.

pub mod checkpoint;
pub mod merkle;
pub mod sampling;
pub mod swf;

pub use checkpoint::{binding_hash, build_checkpoint, genesis_hash, Checkpoint, CheckpointRecord};
pub use merkle::{digest_limbs, link_leaf, merkle_commit, MerklePath, MerkleTree};
pub use sampling::{sample_positions, SamplePlan};
pub use swf::{swf_extend, swf_init, SwfChain, SwfParams};
