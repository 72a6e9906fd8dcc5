use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zkattest_core::circuit::CircuitConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

impl Artifact {
    pub fn new(path: &Path, bytes: &[u8]) -> Self {
        Artifact {
            path: path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned()),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// The one human-readable artifact of an attestation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionManifest {
    /// First 16 bytes of `SHA256(session nonce)`, hex.
    pub session_id: String,
    pub circuit_digest: String,
    pub checkpoints: usize,
    pub transcript: Artifact,
    pub bundle: Artifact,
    pub population_sha256: String,
    pub config: CircuitConfig,
    pub created_by: String,
}

pub fn session_id(nonce: &[u8; 32]) -> String {
    hex::encode(&Sha256::digest(nonce)[..16])
}
