use ark_bn254::Fr;
use ark_ed_on_bn254::Fr as Scalar;
use ark_ff::{PrimeField, Zero};

use super::config::CircuitConfig;
use crate::codec::{Reader, Writer};
use crate::evidence::checkpoint::{fr_from_bytes, fr_to_bytes, Checkpoint, FEATURE_MAX};
use crate::evidence::merkle::{digest_limbs, MerklePath, MerkleTree};
use crate::evidence::sampling::sample_positions;
use crate::evidence::swf::SwfChain;
use crate::{Error, Result};

/// Statement of one checkpoint proof.
///
/// Field order is `h_{i-1}` (two limbs), `h_i` (two limbs), `R_i`, `d_i`,
/// `mu_1..mu_m`, `sigma_1..sigma_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicInputs {
    pub prev_hash: [u8; 32],
    pub hash: [u8; 32],
    pub swf_root: Fr,
    /// Whole seconds since session start.
    pub duration: u64,
    pub mu: Vec<u64>,
    pub sigma: Vec<u64>,
}

impl PublicInputs {
    pub fn m(&self) -> usize {
        self.mu.len()
    }

    pub fn to_field_elements(&self) -> Vec<Fr> {
        let mut out = Vec::with_capacity(6 + 2 * self.m());
        out.extend(digest_limbs(&self.prev_hash));
        out.extend(digest_limbs(&self.hash));
        out.push(self.swf_root);
        out.push(Fr::from(self.duration));
        out.extend(self.mu.iter().map(|&v| Fr::from(v)));
        out.extend(self.sigma.iter().map(|&v| Fr::from(v)));
        out
    }

    /// `[max(0, mu - k sigma), min(65535, mu + k sigma)]` per feature.
    pub fn bounds(&self, mult: u64) -> Vec<(u64, u64)> {
        self.mu
            .iter()
            .zip(&self.sigma)
            .map(|(&mu, &s)| (mu.saturating_sub(mult * s), (mu + mult * s).min(FEATURE_MAX)))
            .collect()
    }

    pub fn check_shape(&self, config: &CircuitConfig) -> Result<()> {
        if self.mu.len() != config.m || self.sigma.len() != config.m {
            return Err(Error::Schema(format!(
                "expected {} population entries, got {} mu and {} sigma",
                config.m,
                self.mu.len(),
                self.sigma.len()
            )));
        }
        Ok(())
    }

    pub fn write(&self, w: &mut Writer) {
        w.raw(&self.prev_hash);
        w.raw(&self.hash);
        w.raw(&fr_to_bytes(&self.swf_root));
        w.u64(self.duration);
        w.u32(self.mu.len() as u32);
        for v in self.mu.iter().chain(&self.sigma) {
            w.u64(*v);
        }
    }

    pub fn read(r: &mut Reader) -> Result<Self> {
        let prev_hash = r.array::<32>()?;
        let hash = r.array::<32>()?;
        let swf_root = fr_from_bytes(&r.array::<32>()?)?;
        let duration = r.u64()?;
        let m = r.u32()? as usize;
        if m > 1024 {
            return Err(Error::Encoding(format!("implausible feature count {m}")));
        }
        let mu = (0..m).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let sigma = (0..m).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        Ok(PublicInputs {
            prev_hash,
            hash,
            swf_root,
            duration,
            mu,
            sigma,
        })
    }
}

/// One sampled link `s_{j-1} -> s_j` with its Merkle opening at leaf `j - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleWitness {
    pub position: usize,
    pub prev_state: [u8; 32],
    pub state: [u8; 32],
    pub path: MerklePath,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateWitness {
    pub features: Vec<u64>,
    pub randomness: Vec<Scalar>,
    pub samples: Vec<SampleWitness>,
    pub tau_prev: u64,
    pub tau: u64,
    pub content_delta: [u8; 32],
}

impl PrivateWitness {
    pub fn check_shape(&self, config: &CircuitConfig) -> Result<()> {
        if self.features.len() != config.m || self.randomness.len() != config.m {
            return Err(Error::Schema(format!(
                "expected {} features and randomness values, got {} and {}",
                config.m,
                self.features.len(),
                self.randomness.len()
            )));
        }
        if self.samples.len() != config.k {
            return Err(Error::Schema(format!("expected {} samples, got {}", config.k, self.samples.len())));
        }
        if let Some(s) = self.samples.iter().find(|s| s.path.siblings.len() != config.depth()) {
            return Err(Error::Schema(format!(
                "Merkle path of depth {} where {} is required",
                s.path.siblings.len(),
                config.depth()
            )));
        }
        Ok(())
    }

    /// Aggregate opening `(sum f, sum r)` over the embedded curve's scalar
    /// field.
    pub fn aggregate_randomness(&self) -> Scalar {
        self.randomness.iter().fold(Scalar::zero(), |a, r| a + r)
    }
}

pub fn scalar_to_fr(s: &Scalar) -> Fr {
    Fr::from_bigint(s.into_bigint()).expect("embedded scalar field is smaller than the base field")
}

/// Statement and witness for one checkpoint of an honestly built chain.
pub fn assemble(
    config: &CircuitConfig,
    checkpoint: &Checkpoint,
    chain: &SwfChain,
    tree: &MerkleTree,
    tau_prev: u64,
    mu: &[u64],
    sigma: &[u64],
) -> Result<(PublicInputs, PrivateWitness)> {
    if chain.steps() != config.chain_length {
        return Err(Error::Schema(format!(
            "chain has {} steps, circuit expects {}",
            chain.steps(),
            config.chain_length
        )));
    }
    let plan = sample_positions(checkpoint.swf_root, config.k, config.chain_length)?;
    let samples = plan
        .indices
        .iter()
        .map(|&j| {
            let path = tree
                .path(j - 1)
                .ok_or_else(|| Error::InvalidInput(format!("no Merkle leaf for position {j}")))?;
            Ok(SampleWitness {
                position: j,
                prev_state: *chain.state(j - 1).expect("position within chain"),
                state: *chain.state(j).expect("position within chain"),
                path,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let public = PublicInputs {
        prev_hash: checkpoint.prev_hash,
        hash: checkpoint.hash,
        swf_root: checkpoint.swf_root,
        duration: checkpoint.duration,
        mu: mu.to_vec(),
        sigma: sigma.to_vec(),
    };
    let witness = PrivateWitness {
        features: checkpoint.features.clone(),
        randomness: checkpoint.randomness.clone(),
        samples,
        tau_prev,
        tau: checkpoint.timestamp_ms,
        content_delta: checkpoint.content_delta,
    };
    public.check_shape(config)?;
    witness.check_shape(config)?;
    Ok((public, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PublicInputs {
        PublicInputs {
            prev_hash: [1; 32],
            hash: [2; 32],
            swf_root: Fr::from(99u64),
            duration: 30,
            mu: vec![100, 60000],
            sigma: vec![50, 3000],
        }
    }

    #[test]
    fn field_order_and_roundtrip() {
        let p = sample();
        let f = p.to_field_elements();
        assert_eq!(f.len(), 6 + 4);
        assert_eq!(&f[0..2], &digest_limbs(&[1; 32]));
        assert_eq!(&f[2..4], &digest_limbs(&[2; 32]));
        assert_eq!(f[4], Fr::from(99u64));
        assert_eq!(f[5], Fr::from(30u64));
        assert_eq!(f[6], Fr::from(100u64));
        assert_eq!(f[9], Fr::from(3000u64));
        let mut w = Writer::new();
        p.write(&mut w);
        let bytes = w.finish();
        let mut r = Reader::new(&bytes);
        assert_eq!(PublicInputs::read(&mut r).unwrap(), p);
        r.expect_end().unwrap();
    }

    #[test]
    fn bounds_are_clipped() {
        assert_eq!(sample().bounds(3), vec![(0, 250), (51000, 65535)]);
    }
}
