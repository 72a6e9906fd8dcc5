use ark_bn254::Fr;
use ark_ed_on_bn254::Fr as Scalar;
use ark_ff::{BigInteger, PrimeField};
use sha2::{Digest, Sha256};

use crate::codec::{Reader, Writer};
use crate::commitments::{aggregate, commit, Commitment, CommitmentParams, Opening};
use crate::{Error, Result};

pub const GENESIS_TAG: &[u8] = b"ZKPOP-GENESIS";

/// Largest encodable feature value (16-bit fixed point).
pub const FEATURE_MAX: u64 = u16::MAX as u64;

pub fn genesis_hash(session_nonce: &[u8; 32]) -> [u8; 32] {
    Sha256::new()
        .chain_update(GENESIS_TAG)
        .chain_update(session_nonce)
        .finalize()
        .into()
}

/// `SHA256(h_{i-1} || delta_i || C_session)` over 96 bytes.
pub fn binding_hash(prev: &[u8; 32], delta: &[u8; 32], session: &Commitment) -> [u8; 32] {
    Sha256::new()
        .chain_update(prev)
        .chain_update(delta)
        .chain_update(session.to_bytes())
        .finalize()
        .into()
}

pub fn fr_to_bytes(x: &Fr) -> [u8; 32] {
    x.into_bigint().to_bytes_le().try_into().expect("32 bytes")
}

pub fn fr_from_bytes(b: &[u8; 32]) -> Result<Fr> {
    let x = Fr::from_le_bytes_mod_order(b);
    if fr_to_bytes(&x) != *b {
        return Err(Error::Encoding("non-canonical field element".into()));
    }
    Ok(x)
}

/// One evidence unit with its private witness material.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub index: u64,
    pub hash: [u8; 32],
    pub prev_hash: [u8; 32],
    pub swf_root: Fr,
    /// Claimed elapsed session time in whole seconds.
    pub duration: u64,
    pub content_delta: [u8; 32],
    /// Milliseconds since session start.
    pub timestamp_ms: u64,
    pub features: Vec<u64>,
    pub randomness: Vec<Scalar>,
    pub commitments: Vec<Commitment>,
}

impl Checkpoint {
    pub fn openings(&self) -> Vec<Opening> {
        self.features
            .iter()
            .zip(&self.randomness)
            .map(|(f, r)| Opening {
                value: Scalar::from(*f),
                randomness: *r,
            })
            .collect()
    }

    pub fn session_commitment(&self) -> Commitment {
        aggregate(&self.commitments)
    }

    pub fn record(&self) -> CheckpointRecord {
        CheckpointRecord {
            index: self.index,
            prev_hash: self.prev_hash,
            hash: self.hash,
            swf_root: self.swf_root,
            duration: self.duration,
            commitments: self.commitments.clone(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn build_checkpoint(
    index: u64,
    prev: [u8; 32],
    delta: [u8; 32],
    features: &[u64],
    randomness: &[Scalar],
    swf_root: Fr,
    timestamp_ms: u64,
    duration: u64,
    m: usize,
    params: &CommitmentParams,
) -> Result<Checkpoint> {
    if features.len() != m || randomness.len() != m {
        return Err(Error::Schema(format!(
            "expected {m} features and randomness values, got {} and {}",
            features.len(),
            randomness.len()
        )));
    }
    if let Some((j, f)) = features.iter().enumerate().find(|(_, f)| **f > FEATURE_MAX) {
        return Err(Error::Domain(format!("feature {j} = {f} exceeds {FEATURE_MAX}")));
    }
    let commitments: Vec<Commitment> = features
        .iter()
        .zip(randomness)
        .map(|(f, r)| {
            commit(
                &Opening {
                    value: Scalar::from(*f),
                    randomness: *r,
                },
                params,
            )
        })
        .collect();
    let hash = binding_hash(&prev, &delta, &aggregate(&commitments));
    Ok(Checkpoint {
        index,
        hash,
        prev_hash: prev,
        swf_root,
        duration,
        content_delta: delta,
        timestamp_ms,
        features: features.to_vec(),
        randomness: randomness.to_vec(),
        commitments,
    })
}

/// The public part of a checkpoint.
///
/// Layout: `index u64 | prev_hash [32] | hash [32] | swf_root [32, LE] |
/// duration u64 | count u32 | count x commitment [32]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointRecord {
    pub index: u64,
    pub prev_hash: [u8; 32],
    pub hash: [u8; 32],
    pub swf_root: Fr,
    pub duration: u64,
    pub commitments: Vec<Commitment>,
}

impl CheckpointRecord {
    pub fn write(&self, w: &mut Writer) {
        w.u64(self.index)
            .raw(&self.prev_hash)
            .raw(&self.hash)
            .raw(&fr_to_bytes(&self.swf_root))
            .u64(self.duration)
            .u32(self.commitments.len() as u32);
        for c in &self.commitments {
            w.raw(&c.to_bytes());
        }
    }

    pub fn read(r: &mut Reader) -> Result<Self> {
        let index = r.u64()?;
        let prev_hash = r.array()?;
        let hash = r.array()?;
        let swf_root = fr_from_bytes(&r.array()?)?;
        let duration = r.u64()?;
        let n = r.u32()? as usize;
        if n > 1024 {
            return Err(Error::Encoding("too many commitments".into()));
        }
        let commitments = (0..n)
            .map(|_| Commitment::from_bytes(&r.array()?))
            .collect::<Result<_>>()?;
        Ok(CheckpointRecord {
            index,
            prev_hash,
            hash,
            swf_root,
            duration,
            commitments,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.finish()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let mut r = Reader::new(b);
        let out = Self::read(&mut r)?;
        r.expect_end()?;
        Ok(out)
    }
}
