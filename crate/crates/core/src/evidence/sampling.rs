use ark_bn254::Fr;
use ark_ff::PrimeField;

use crate::poseidon::hash2;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePlan {
    pub k: usize,
    /// Step indices in `1..=N`; duplicates are allowed.
    pub indices: Vec<usize>,
}

/// `H(R, l) mod N` reduced over the canonical integer.
pub fn residue(root: Fr, l: u64, n: usize) -> usize {
    let e = hash2(root, Fr::from(l)).into_bigint();
    let n = n as u128;
    e.0.iter()
        .rev()
        .fold(0u128, |acc, limb| ((acc << 64) | *limb as u128) % n) as usize
}

/// `j_l = (H(R, l) mod N) + 1` for `l = 1..=k`.
pub fn sample_positions(root: Fr, k: usize, n: usize) -> Result<SamplePlan> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= N, got k={k}, N={n}")));
    }
    let indices = (1..=k as u64).map(|l| residue(root, l, n) + 1).collect();
    Ok(SamplePlan { k, indices })
}
