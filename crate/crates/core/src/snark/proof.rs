use ark_bn254::Bn254;
use ark_groth16::Proof;
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};

use crate::circuit::PublicInputs;
use crate::codec::{Reader, Writer};
use crate::commitments::{Commitment, RangeProof};
use crate::{Error, Result};

/// Compressed `A || B || C`: 32 + 64 + 32 bytes on BN254.
pub const CORE_PROOF_BYTES: usize = 128;

pub fn proof_to_bytes(p: &Proof<Bn254>) -> Vec<u8> {
    let mut out = Vec::with_capacity(CORE_PROOF_BYTES);
    p.serialize_compressed(&mut out).expect("in-memory write");
    out
}

/// Strict decoding: exact length, canonical points, subgroup checks.
pub fn proof_from_bytes(b: &[u8]) -> Result<Proof<Bn254>> {
    if b.len() != CORE_PROOF_BYTES {
        return Err(Error::Encoding(format!("core proof must be {CORE_PROOF_BYTES} bytes, got {}", b.len())));
    }
    Proof::<Bn254>::deserialize_compressed(b).map_err(|e| Error::Encoding(format!("core proof: {e}")))
}

/// Everything a verifier needs for one checkpoint.
///
/// `commitments` holds the `m` feature commitments followed by the
/// timestamp commitment; `range_proofs` holds the aggregated feature proof
/// and the proof on the timestamp delta to the previous checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct AttestationProof {
    pub index: u64,
    pub public: PublicInputs,
    pub proof: Proof<Bn254>,
    pub commitments: Vec<Commitment>,
    pub range_proofs: Vec<RangeProof>,
}

impl AttestationProof {
    pub fn write(&self, w: &mut Writer) {
        w.u64(self.index);
        let mut p = Writer::new();
        self.public.write(&mut p);
        w.bytes(&p.finish());
        w.bytes(&proof_to_bytes(&self.proof));
        w.u32(self.commitments.len() as u32);
        for c in &self.commitments {
            w.raw(&c.to_bytes());
        }
        w.u32(self.range_proofs.len() as u32);
        for rp in &self.range_proofs {
            w.bytes(&rp.to_bytes());
        }
    }

    pub fn read(r: &mut Reader) -> Result<Self> {
        let index = r.u64()?;
        let mut pr = Reader::new(r.bytes()?);
        let public = PublicInputs::read(&mut pr)?;
        pr.expect_end()?;
        let proof = proof_from_bytes(r.bytes()?)?;
        let n = r.u32()? as usize;
        if n > 1024 {
            return Err(Error::Encoding(format!("implausible commitment count {n}")));
        }
        let commitments = (0..n)
            .map(|_| Commitment::from_bytes(&r.array::<32>()?))
            .collect::<Result<Vec<_>>>()?;
        let n = r.u32()? as usize;
        if n > 16 {
            return Err(Error::Encoding(format!("implausible range proof count {n}")));
        }
        let range_proofs = (0..n)
            .map(|_| RangeProof::from_bytes(r.bytes()?))
            .collect::<Result<Vec<_>>>()?;
        Ok(AttestationProof {
            index,
            public,
            proof,
            commitments,
            range_proofs,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.finish()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let mut r = Reader::new(b);
        let p = Self::read(&mut r)?;
        r.expect_end()?;
        Ok(p)
    }
}

pub const BUNDLE_MAGIC: &[u8; 8] = b"ZKATBNDL";
pub const BUNDLE_VERSION: u32 = 1;

/// All checkpoint proofs of one session.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofBundle {
    pub circuit_digest: [u8; 32],
    pub session_nonce: [u8; 32],
    pub proofs: Vec<AttestationProof>,
}

impl ProofBundle {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(BUNDLE_MAGIC);
        w.u32(BUNDLE_VERSION);
        w.raw(&self.circuit_digest);
        w.raw(&self.session_nonce);
        w.u32(self.proofs.len() as u32);
        for p in &self.proofs {
            w.bytes(&p.to_bytes());
        }
        w.finish()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let mut r = Reader::new(b);
        if &r.array::<8>()? != BUNDLE_MAGIC {
            return Err(Error::Encoding("not a proof bundle".into()));
        }
        let version = r.u32()?;
        if version != BUNDLE_VERSION {
            return Err(Error::Encoding(format!("unsupported bundle version {version}")));
        }
        let circuit_digest = r.array::<32>()?;
        let session_nonce = r.array::<32>()?;
        let n = r.u32()? as usize;
        let proofs = (0..n)
            .map(|_| AttestationProof::from_bytes(r.bytes()?))
            .collect::<Result<Vec<_>>>()?;
        r.expect_end()?;
        Ok(ProofBundle {
            circuit_digest,
            session_nonce,
            proofs,
        })
    }
}
