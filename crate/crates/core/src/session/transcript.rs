//! Binary session transcript: the public checkpoint records in order.
//!
//! Layout: `magic [8] | version u32 | circuit digest [32] | session nonce
//! [32] | hash parameters (u32 length + bytes) | count u32 | count x
//! (u32 length + record)`.

use crate::codec::{Reader, Writer};
use crate::evidence::checkpoint::CheckpointRecord;
use crate::poseidon::PARAMS_ID;
use crate::{Error, Result};

pub const TRANSCRIPT_MAGIC: &[u8; 8] = b"ZKATTRNS";
pub const TRANSCRIPT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionTranscript {
    pub circuit_digest: [u8; 32],
    pub session_nonce: [u8; 32],
    /// Identifies the Poseidon instance behind the Merkle roots.
    pub hash_params: String,
    pub records: Vec<CheckpointRecord>,
}

impl SessionTranscript {
    pub fn new(circuit_digest: [u8; 32], session_nonce: [u8; 32], records: Vec<CheckpointRecord>) -> Self {
        SessionTranscript {
            circuit_digest,
            session_nonce,
            hash_params: PARAMS_ID.into(),
            records,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(TRANSCRIPT_MAGIC)
            .u32(TRANSCRIPT_VERSION)
            .raw(&self.circuit_digest)
            .raw(&self.session_nonce)
            .bytes(self.hash_params.as_bytes())
            .u32(self.records.len() as u32);
        for r in &self.records {
            w.bytes(&r.to_bytes());
        }
        w.finish()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let mut r = Reader::new(b);
        if &r.array::<8>()? != TRANSCRIPT_MAGIC {
            return Err(Error::Encoding("not a session transcript".into()));
        }
        let version = r.u32()?;
        if version != TRANSCRIPT_VERSION {
            return Err(Error::Encoding(format!("unsupported transcript version {version}")));
        }
        let circuit_digest = r.array()?;
        let session_nonce = r.array()?;
        let hash_params = String::from_utf8(r.bytes()?.to_vec())
            .map_err(|_| Error::Encoding("hash parameter id is not UTF-8".into()))?;
        let n = r.u32()? as usize;
        let records = (0..n)
            .map(|_| CheckpointRecord::from_bytes(r.bytes()?))
            .collect::<Result<Vec<_>>>()?;
        r.expect_end()?;
        Ok(SessionTranscript {
            circuit_digest,
            session_nonce,
            hash_params,
            records,
        })
    }
}
