//! Session pipeline: event stream in, chained checkpoints and proofs out,
//! and the verifier's side of the same.

pub mod attest;
pub mod events;
pub mod transcript;
pub mod verify;

use ark_ed_on_bn254::Fr as Scalar;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitConfig;
use crate::evidence::swf::SwfParams;
use crate::{Error, Result};
use crate::commitments::{commit, Commitment, CommitmentParams, Opening, RangeStatement};

pub use attest::{attest, Session};
pub use events::{synthetic_stream, EventRecord, EventStream};
pub use transcript::SessionTranscript;
pub use verify::{verify_bundle, verify_transcript, CheckpointVerdict, SessionReport, VerifyOptions};

/// Circuit shape plus chain parameters; the two chain lengths must agree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub circuit: CircuitConfig,
    pub swf: SwfParams,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        self.circuit.validate()?;
        self.swf.validate()?;
        if self.circuit.chain_length != self.swf.chain_length {
            return Err(Error::Config(format!(
                "circuit chain_length {} differs from swf chain_length {}",
                self.circuit.chain_length, self.swf.chain_length
            )));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: SessionConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

pub fn timestamp_commitment(tau_ms: u64, r: Scalar) -> Commitment {
    commit(
        &Opening {
            value: Scalar::from(tau_ms),
            randomness: r,
        },
        CommitmentParams::standard(),
    )
}

/// Bits needed for the temporal range proof over `[d_min, d_max]`.
pub fn temporal_bits(config: &CircuitConfig) -> usize {
    let w = config.d_max_ms - config.d_min_ms;
    (64 - w.leading_zeros() as usize).max(1)
}

/// `d_min <= tau_i - tau_{i-1} <= d_max` on the commitment difference.
pub fn temporal_statement(config: &CircuitConfig, delta: Commitment) -> RangeStatement {
    RangeStatement {
        commitments: vec![delta],
        bounds: vec![(config.d_min_ms, config.d_max_ms)],
        n_bits: temporal_bits(config),
    }
}
