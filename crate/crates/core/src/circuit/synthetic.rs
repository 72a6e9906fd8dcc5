//! Random honest statements for tests, benchmarks and simulations.

use ark_ed_on_bn254::Fr as Scalar;
use ark_std::UniformRand;
use rand::{CryptoRng, Rng, RngCore};

use super::config::CircuitConfig;
use super::inputs::{assemble, PrivateWitness, PublicInputs, SampleWitness};
use crate::commitments::CommitmentParams;
use crate::evidence::checkpoint::{build_checkpoint, FEATURE_MAX};
use crate::evidence::merkle::{link_leaf, merkle_commit, MerkleTree};
use crate::evidence::sampling::sample_positions;
use crate::evidence::swf::SwfChain;
use crate::Result;

/// A satisfying instance whose features sit anywhere inside their bounds.
pub fn honest_instance<R: RngCore + CryptoRng>(
    config: &CircuitConfig,
    rng: &mut R,
) -> Result<(PublicInputs, PrivateWitness)> {
    let mu: Vec<u64> = (0..config.m).map(|_| rng.gen_range(20_000..45_000)).collect();
    let sigma: Vec<u64> = (0..config.m).map(|_| rng.gen_range(1_000..9_000)).collect();
    let features: Vec<u64> = mu
        .iter()
        .zip(&sigma)
        .map(|(&u, &s)| {
            let k = config.bounds_mult * s;
            rng.gen_range(u.saturating_sub(k)..=(u + k).min(FEATURE_MAX))
        })
        .collect();
    let tau_prev = rng.gen_range(0..10_000_000u64);
    let tau = tau_prev + rng.gen_range(config.d_min_ms..=config.d_max_ms);
    instance_with(config, rng, &mu, &sigma, &features, tau_prev, tau)
}

/// Builds chain, tree and checkpoint around the given values. The result
/// only satisfies the relation if the values do.
pub fn instance_with<R: RngCore + CryptoRng>(
    config: &CircuitConfig,
    rng: &mut R,
    mu: &[u64],
    sigma: &[u64],
    features: &[u64],
    tau_prev: u64,
    tau: u64,
) -> Result<(PublicInputs, PrivateWitness)> {
    let mut chain = SwfChain::from_seed(rng.gen());
    chain.extend(config.chain_length);
    let tree = merkle_commit(&chain)?;
    let randomness: Vec<Scalar> = (0..config.m).map(|_| Scalar::rand(rng)).collect();
    let cp = build_checkpoint(
        rng.gen_range(1..1000),
        rng.gen(),
        rng.gen(),
        features,
        &randomness,
        tree.root(),
        tau,
        tau / 1000,
        config.m,
        CommitmentParams::standard(),
    )?;
    assemble(config, &cp, &chain, &tree, tau_prev, mu, sigma)
}

/// Replaces the statement's chain with `N + 1` unrelated random states:
/// every link is fabricated, but the Merkle openings are internally
/// consistent with the new root.
pub fn fabricate_chain<R: RngCore + CryptoRng>(
    config: &CircuitConfig,
    public: &mut PublicInputs,
    witness: &mut PrivateWitness,
    rng: &mut R,
) -> Result<()> {
    let states: Vec<[u8; 32]> = (0..=config.chain_length).map(|_| rng.gen()).collect();
    let leaves = states.windows(2).map(|w| link_leaf(&w[0], &w[1])).collect();
    let tree = MerkleTree::from_leaves(leaves)?;
    public.swf_root = tree.root();
    let plan = sample_positions(public.swf_root, config.k, config.chain_length)?;
    witness.samples = plan
        .indices
        .iter()
        .map(|&j| SampleWitness {
            position: j,
            prev_state: states[j - 1],
            state: states[j],
            path: tree.path(j - 1).expect("leaf in range"),
        })
        .collect();
    Ok(())
}
