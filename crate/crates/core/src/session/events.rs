//! Pre-featurized input to the attestation pipeline: one record per
//! checkpoint window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::fixed_point::encode_fixed_point;
use crate::privacy::PopulationParams;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// Milliseconds since session start.
    pub timestamp_ms: u64,
    pub features_ms: Vec<f64>,
    /// Digest of the document change in this window.
    #[serde(with = "hex::serde")]
    pub content_delta: [u8; 32],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventStream {
    pub records: Vec<EventRecord>,
}

impl EventStream {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Schema(format!("event stream: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("event stream serializes")
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Checks ordering and shape, then encodes every feature. Checkpoint
    /// indices in errors are 1-based.
    pub fn encode(&self, m: usize) -> Result<Vec<Vec<u64>>> {
        if self.records.is_empty() {
            return Err(Error::InvalidInput("no checkpoints".into()));
        }
        let mut prev = 0;
        let mut out = Vec::with_capacity(self.records.len());
        for (i, r) in self.records.iter().enumerate() {
            let idx = i + 1;
            if r.timestamp_ms < prev {
                return Err(Error::InvalidInput(format!(
                    "checkpoint {idx}: timestamp {} precedes {prev}",
                    r.timestamp_ms
                )));
            }
            prev = r.timestamp_ms;
            if r.features_ms.len() != m {
                return Err(Error::Schema(format!(
                    "checkpoint {idx}: {} features, expected {m}",
                    r.features_ms.len()
                )));
            }
            let enc = r
                .features_ms
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    encode_fixed_point(x).map_err(|_| {
                        Error::Domain(format!("checkpoint {idx}: feature {j} = {x} ms outside [0, 1000]"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(enc);
        }
        Ok(out)
    }
}

/// An honest stream: features well inside the population bounds and gaps of
/// 28 to 32 seconds.
pub fn synthetic_stream(population: &PopulationParams, n: usize, seed: u64) -> EventStream {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let bounds = population.bounds_ms();
    let mut t = 0;
    let records = (0..n)
        .map(|i| {
            t += rng.gen_range(28_000..=32_000u64);
            let features_ms = bounds
                .iter()
                .map(|&(a, b)| {
                    let pad = 0.02 * (b - a);
                    rng.gen_range(a + pad..=b - pad)
                })
                .collect();
            EventRecord {
                timestamp_ms: t,
                features_ms,
                content_delta: Sha256::new()
                    .chain_update(seed.to_le_bytes())
                    .chain_update((i as u64).to_le_bytes())
                    .finalize()
                    .into(),
            }
        })
        .collect();
    EventStream { records }
}
