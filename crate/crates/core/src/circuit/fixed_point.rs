//! 16-bit fixed point over the `[0, 1000]` ms feature domain.

use crate::{Error, Result};

pub const DOMAIN_MS: f64 = 1000.0;
pub const SCALE_MAX: u64 = 65535;

/// `round(ms * 65535 / 1000)` with ties to even.
pub fn encode_fixed_point(ms: f64) -> Result<u64> {
    if !(0.0..=DOMAIN_MS).contains(&ms) {
        return Err(Error::Domain(format!("{ms} ms outside [0, {DOMAIN_MS}]")));
    }
    Ok((ms * SCALE_MAX as f64 / DOMAIN_MS).round_ties_even() as u64)
}

pub fn decode_fixed_point(v: u64) -> f64 {
    v as f64 * DOMAIN_MS / SCALE_MAX as f64
}

/// Half of one quantization step, in ms.
pub fn half_step_ms() -> f64 {
    DOMAIN_MS / SCALE_MAX as f64 / 2.0
}

/// Encodes a non-negative spread (such as a standard deviation) on the same
/// scale, saturating at the top of the domain.
pub fn encode_spread(ms: f64) -> Result<u64> {
    if !ms.is_finite() || ms < 0.0 {
        return Err(Error::Domain(format!("spread {ms} ms must be finite and non-negative")));
    }
    encode_fixed_point(ms.min(DOMAIN_MS))
}
