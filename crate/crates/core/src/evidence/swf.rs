use argon2::{Algorithm, Argon2, Params, Version};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const MIB: u64 = 1024 * 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwfParams {
    /// Argon2id memory in bytes.
    pub memory_cost: u64,
    pub time_cost: u32,
    pub parallelism: u32,
    /// SHA-256 steps per checkpoint; a power of two so sampled indices map
    /// directly onto Merkle leaf positions.
    pub chain_length: usize,
    #[serde(with = "hex::serde")]
    pub salt: [u8; 16],
}

impl Default for SwfParams {
    fn default() -> Self {
        SwfParams {
            memory_cost: 64 * MIB,
            time_cost: 3,
            parallelism: 1,
            chain_length: 4096,
            salt: *b"zkattest-swf-v1\0",
        }
    }
}

impl SwfParams {
    pub fn validate(&self) -> Result<()> {
        if self.memory_cost < 8 * MIB {
            return Err(Error::Config("memory_cost must be at least 8 MiB".into()));
        }
        if !self.memory_cost.is_multiple_of(1024) || self.memory_cost / 1024 > u32::MAX as u64 {
            return Err(Error::Config("memory_cost must be a whole number of KiB".into()));
        }
        if self.time_cost == 0 {
            return Err(Error::Config("time_cost must be positive".into()));
        }
        if self.parallelism != 1 {
            return Err(Error::Config("parallelism must be 1".into()));
        }
        if self.chain_length < 2 || !self.chain_length.is_power_of_two() || self.chain_length > 1 << 20 {
            return Err(Error::Config("chain_length must be a power of two in [2, 2^20]".into()));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.chain_length.trailing_zeros() as usize
    }
}

/// States `s_0..s_N` of one checkpoint's chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwfChain {
    states: Vec<[u8; 32]>,
}

impl SwfChain {
    pub fn from_seed(s0: [u8; 32]) -> Self {
        SwfChain { states: vec![s0] }
    }

    pub fn seed(&self) -> &[u8; 32] {
        &self.states[0]
    }

    pub fn states(&self) -> &[[u8; 32]] {
        &self.states
    }

    /// Number of SHA-256 steps taken so far.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn state(&self, j: usize) -> Option<&[u8; 32]> {
        self.states.get(j)
    }

    pub fn extend(&mut self, steps: usize) {
        self.states.reserve(steps);
        let mut cur = *self.states.last().expect("seed present");
        for _ in 0..steps {
            cur = Sha256::digest(cur).into();
            self.states.push(cur);
        }
    }

    /// Re-derives every state from `s_0`.
    pub fn is_consistent(&self) -> bool {
        self.states
            .windows(2)
            .all(|w| <[u8; 32]>::from(Sha256::digest(w[0])) == w[1])
    }
}

/// `s_0 = Argon2id(seed, salt)` under the given cost parameters.
pub fn swf_init(session_seed: &[u8], params: &SwfParams) -> Result<SwfChain> {
    params.validate()?;
    let p = Params::new(
        (params.memory_cost / 1024) as u32,
        params.time_cost,
        params.parallelism,
        Some(32),
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let mut out = [0u8; 32];
    Argon2::new(Algorithm::Argon2id, Version::V0x13, p)
        .hash_password_into(session_seed, &params.salt, &mut out)
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(SwfChain::from_seed(out))
}

pub fn swf_extend(mut chain: SwfChain, steps: usize) -> Result<SwfChain> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    chain.extend(steps);
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SwfParams {
        SwfParams {
            memory_cost: 8 * MIB,
            time_cost: 1,
            salt: *b"zkattest-salt-16",
            ..SwfParams::default()
        }
    }

    fn hex32(h: &str) -> [u8; 32] {
        hex::decode(h).unwrap().try_into().unwrap()
    }

    #[test]
    fn argon2id_reference_vector() {
        // argon2-cffi hash_secret_raw, type ID, m=8192 KiB, t=1, p=1
        let c = swf_init(b"session-seed", &small()).unwrap();
        assert_eq!(
            *c.seed(),
            hex32("e0be549db3e7ef582abcdf81dcfcebfe76ebc8965d7196380a16fc8ea2defcb5")
        );
    }

    #[test]
    fn deterministic_and_salt_separated() {
        let a = swf_init(b"x", &small()).unwrap();
        assert_eq!(a, swf_init(b"x", &small()).unwrap());
        let mut other = small();
        other.salt[0] ^= 1;
        assert_ne!(a.seed(), swf_init(b"x", &other).unwrap().seed());
    }

    #[test]
    fn chain_states_match_reference() {
        let s0 = hex32("e0be549db3e7ef582abcdf81dcfcebfe76ebc8965d7196380a16fc8ea2defcb5");
        let c = swf_extend(SwfChain::from_seed(s0), 4096).unwrap();
        assert_eq!(
            *c.state(1).unwrap(),
            hex32("a2a8ccbeb4be12d9b051d6b17d50b96f736b53641d70a850a98701ec3ba3107e")
        );
        assert_eq!(
            *c.state(4096).unwrap(),
            hex32("5f51e8e50e3b6ae3106bbc64716d11c20cfd49b323bd8d8cdcc2b22fb4ba6459")
        );
        assert!(c.is_consistent());
    }

    #[test]
    fn extension_composes() {
        let s0 = [9u8; 32];
        let a = swf_extend(swf_extend(SwfChain::from_seed(s0), 1).unwrap(), 1).unwrap();
        let b = swf_extend(SwfChain::from_seed(s0), 2).unwrap();
        assert_eq!(a, b);
        assert!(swf_extend(b, 0).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = [
            SwfParams { memory_cost: 4 * MIB, ..small() },
            SwfParams { parallelism: 2, ..small() },
            SwfParams { chain_length: 1, ..small() },
            SwfParams { chain_length: 1000, ..small() },
        ];
        for p in bad {
            assert!(matches!(swf_init(b"x", &p), Err(Error::Config(_))));
        }
    }
}
