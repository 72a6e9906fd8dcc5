use ark_ed_on_bn254::Fr as Scalar;
use ark_std::UniformRand;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::events::EventStream;
use super::transcript::SessionTranscript;
use super::{temporal_statement, timestamp_commitment};
use crate::circuit::assemble;
use crate::commitments::{
    aggregate, commit, delta_commitment, range_prove, Commitment, CommitmentParams, Opening, RangeStatement,
};
use crate::evidence::checkpoint::{binding_hash, build_checkpoint, genesis_hash};
use crate::evidence::merkle::merkle_commit;
use crate::evidence::swf::{swf_init, SwfParams};
use crate::privacy::PopulationParams;
use crate::snark::{prove_core, AttestationProof, ProofBundle, ProverKey};
use crate::{Error, Result};

/// Everything one attestation run produces.
#[derive(Clone, Debug)]
pub struct Session {
    pub bundle: ProofBundle,
    pub transcript: SessionTranscript,
}

fn derive(seed: &[u8], tag: &[u8], i: u64) -> [u8; 32] {
    Sha256::new()
        .chain_update(tag)
        .chain_update((seed.len() as u64).to_le_bytes())
        .chain_update(seed)
        .chain_update(i.to_le_bytes())
        .finalize()
        .into()
}

/// Per-checkpoint values fixed before any chain is computed.
struct Plan {
    index: u64,
    prev: [u8; 32],
    features: Vec<u64>,
    randomness: Vec<Scalar>,
    tau_prev: u64,
    tau: u64,
    r_prev: Scalar,
    r_tau: Scalar,
    rng: ChaCha20Rng,
}

/// Builds, proves and range-proves one checkpoint per stream record.
///
/// All randomness derives from `seed`, so a run is reproducible. The chain
/// seed of checkpoint `i` is `Argon2id(swf_seed || i || h_{i-1})`. Hashes
/// only depend on commitments, so the chain is fixed up front and the
/// expensive per-checkpoint work runs in parallel.
pub fn attest(
    key: &ProverKey,
    swf: &SwfParams,
    population: &PopulationParams,
    stream: &EventStream,
    seed: &[u8],
) -> Result<Session> {
    let config = &key.config;
    population.validate()?;
    if population.m() != config.m || population.bounds_mult != config.bounds_mult {
        return Err(Error::Config(format!(
            "population has m={}, mult={}; circuit expects m={}, mult={}",
            population.m(),
            population.bounds_mult,
            config.m,
            config.bounds_mult
        )));
    }
    if swf.chain_length != config.chain_length {
        return Err(Error::Config(format!(
            "chain length {} differs from the circuit's {}",
            swf.chain_length, config.chain_length
        )));
    }
    swf.validate()?;
    let features = stream.encode(config.m)?;
    let params = CommitmentParams::standard();
    let nonce = derive(seed, b"zkattest-session-nonce", 0);
    let swf_seed = derive(seed, b"zkattest-session-swf", 0);

    let mut plans = Vec::with_capacity(features.len());
    let mut prev = genesis_hash(&nonce);
    let (mut tau_prev, mut r_prev) = (0u64, Scalar::from(0u64));
    for (i, (f, rec)) in features.into_iter().zip(&stream.records).enumerate() {
        let index = i as u64 + 1;
        let mut rng = ChaCha20Rng::from_seed(derive(seed, b"zkattest-checkpoint", index));
        let randomness: Vec<Scalar> = (0..config.m).map(|_| Scalar::rand(&mut rng)).collect();
        let r_tau = Scalar::rand(&mut rng);
        let commitments: Vec<Commitment> = f
            .iter()
            .zip(&randomness)
            .map(|(&v, &r)| commit(&Opening { value: Scalar::from(v), randomness: r }, params))
            .collect();
        let hash = binding_hash(&prev, &rec.content_delta, &aggregate(&commitments));
        plans.push(Plan {
            index,
            prev,
            features: f,
            randomness,
            tau_prev,
            tau: rec.timestamp_ms,
            r_prev,
            r_tau,
            rng,
        });
        prev = hash;
        tau_prev = rec.timestamp_ms;
        r_prev = r_tau;
    }

    let proofs = plans
        .into_par_iter()
        .zip(stream.records.par_iter())
        .map(|(mut p, rec)| {
            let at = |e: Error| Error::Proving(format!("checkpoint {}: {e}", p.index));
            let mut input = swf_seed.to_vec();
            input.extend_from_slice(&p.index.to_le_bytes());
            input.extend_from_slice(&p.prev);
            let mut chain = swf_init(&input, swf)?;
            chain.extend(swf.chain_length);
            let tree = merkle_commit(&chain)?;
            let cp = build_checkpoint(
                p.index,
                p.prev,
                rec.content_delta,
                &p.features,
                &p.randomness,
                tree.root(),
                p.tau,
                p.tau / 1000,
                config.m,
                params,
            )?;
            let (public, witness) = assemble(config, &cp, &chain, &tree, p.tau_prev, &population.mu, &population.sigma)?;
            drop((chain, tree));
            let proof = prove_core(key, &public, &witness, &mut p.rng).map_err(at)?;

            let features_stmt = RangeStatement {
                commitments: cp.commitments.clone(),
                bounds: public.bounds(config.bounds_mult),
                n_bits: config.n_bits,
            };
            let feature_proof = range_prove(&features_stmt, &cp.openings(), params, &mut p.rng).map_err(at)?;

            let c_tau = timestamp_commitment(p.tau, p.r_tau);
            let c_prev = if p.index == 1 {
                Commitment::identity()
            } else {
                timestamp_commitment(p.tau_prev, p.r_prev)
            };
            let gap = Opening {
                value: Scalar::from(p.tau) - Scalar::from(p.tau_prev),
                randomness: p.r_tau - p.r_prev,
            };
            let temporal = temporal_statement(config, delta_commitment(&c_tau, &c_prev));
            let temporal_proof = range_prove(&temporal, &[gap], params, &mut p.rng).map_err(at)?;

            let mut commitments = cp.commitments.clone();
            commitments.push(c_tau);
            Ok((
                AttestationProof {
                    index: p.index,
                    public,
                    proof,
                    commitments,
                    range_proofs: vec![feature_proof, temporal_proof],
                },
                cp.record(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let (proofs, records): (Vec<_>, Vec<_>) = proofs.into_iter().unzip();
    let digest = key.digest;
    Ok(Session {
        bundle: ProofBundle {
            circuit_digest: digest,
            session_nonce: nonce,
            proofs,
        },
        transcript: SessionTranscript::new(digest, nonce, records),
    })
}
