use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const CIRCUIT_VERSION: &str = "zkattest-circuit-v1";

/// Shape of the per-checkpoint attestation circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitConfig {
    /// Behavioral features per checkpoint.
    pub m: usize,
    /// Sampled chain links per checkpoint.
    pub k: usize,
    /// Bit width of a fixed-point feature.
    pub n_bits: usize,
    /// Bounds are `mu -/+ bounds_mult * sigma`.
    pub bounds_mult: u64,
    pub chain_length: usize,
    pub d_min_ms: u64,
    pub d_max_ms: u64,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        CircuitConfig {
            m: 12,
            k: 2,
            n_bits: 16,
            bounds_mult: 3,
            chain_length: 4096,
            d_min_ms: 25_000,
            d_max_ms: 120_000,
        }
    }
}

/// Width of the slack decompositions in the feature range check; fits
/// `f + 4 * sigma` for 16-bit values.
pub const SLACK_BITS: usize = 19;
/// Width of timestamps and gaps in milliseconds.
pub const TIME_BITS: usize = 40;

impl CircuitConfig {
    pub fn basic() -> Self {
        Self::default()
    }

    pub fn extended() -> Self {
        CircuitConfig {
            m: 24,
            k: 8,
            ..Self::default()
        }
    }

    pub fn with_m(m: usize) -> Self {
        CircuitConfig { m, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if ![6, 12, 24].contains(&self.m) {
            return Err(Error::Config(format!("m must be 6, 12 or 24, got {}", self.m)));
        }
        if self.k == 0 || self.k > self.chain_length {
            return Err(Error::Config("k must be in [1, chain_length]".into()));
        }
        if self.n_bits != 16 {
            return Err(Error::Config("n_bits must be 16 (fixed-point width)".into()));
        }
        if !(1..=4).contains(&self.bounds_mult) {
            return Err(Error::Config("bounds_mult must be in 1..=4".into()));
        }
        if self.chain_length < 2 || !self.chain_length.is_power_of_two() || self.chain_length > 1 << 20 {
            return Err(Error::Config("chain_length must be a power of two in [2, 2^20]".into()));
        }
        if self.d_min_ms == 0 || self.d_min_ms > self.d_max_ms || self.d_max_ms >= 1 << 30 {
            return Err(Error::Config("need 0 < d_min_ms <= d_max_ms < 2^30".into()));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.chain_length.trailing_zeros() as usize
    }

    pub fn num_public_inputs(&self) -> usize {
        6 + 2 * self.m
    }

    /// Binds keys and bundles to this exact circuit shape, hash choices and
    /// curves.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(CIRCUIT_VERSION);
        h.update(b"|groth16-bn254|babyjubjub|poseidon-bn254-x5-t3-rf8-rp57|sha256|");
        for v in [
            self.m as u64,
            self.k as u64,
            self.n_bits as u64,
            self.bounds_mult,
            self.chain_length as u64,
            self.d_min_ms,
            self.d_max_ms,
        ] {
            h.update(v.to_le_bytes());
        }
        h.finalize().into()
    }
}
