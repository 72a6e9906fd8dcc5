use serde::Serialize;

use super::temporal_statement;
use super::transcript::SessionTranscript;
use crate::commitments::{delta_commitment, range_verify, Commitment, CommitmentParams, RangeStatement};
use crate::evidence::checkpoint::genesis_hash;
use crate::privacy::PopulationParams;
use crate::snark::{batch_verify, verify, AttestationProof, ProofBundle, VerifierKey};
use crate::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions<'a> {
    /// Check all SNARKs with one batched pairing equation; on failure fall
    /// back to single checks to find the culprits.
    pub batch: bool,
    /// Published parameters every checkpoint must use. Without them the
    /// checkpoints only have to agree with each other.
    pub population: Option<&'a PopulationParams>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckpointVerdict {
    pub index: u64,
    pub accepted: bool,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionReport {
    pub accepted: bool,
    pub batch: bool,
    pub population_pinned: bool,
    pub checkpoints: Vec<CheckpointVerdict>,
}

impl SessionReport {
    pub fn rejected_indices(&self) -> Vec<u64> {
        self.checkpoints.iter().filter(|c| !c.accepted).map(|c| c.index).collect()
    }
}

/// Whole-second duration steps allowed between consecutive checkpoints.
fn duration_steps(key: &VerifierKey) -> (u64, u64) {
    (key.config.d_min_ms / 1000, key.config.d_max_ms.div_ceil(1000))
}

fn structural(
    key: &VerifierKey,
    bundle: &ProofBundle,
    pos: usize,
    population: Option<&PopulationParams>,
) -> Vec<String> {
    let cfg = &key.config;
    let p = &bundle.proofs[pos];
    let prev = pos.checked_sub(1).map(|q| &bundle.proofs[q]);
    let mut why = vec![];
    if p.index != pos as u64 + 1 {
        why.push(format!("index {} out of sequence, expected {}", p.index, pos + 1));
    }
    if let Err(e) = p.public.check_shape(cfg) {
        why.push(e.to_string());
        return why;
    }
    let expected_prev = prev.map_or_else(|| genesis_hash(&bundle.session_nonce), |q| q.public.hash);
    if p.public.prev_hash != expected_prev {
        why.push("previous hash does not link to the preceding checkpoint".into());
    }
    let d_prev = prev.map_or(0, |q| q.public.duration);
    let (lo, hi) = duration_steps(key);
    match p.public.duration.checked_sub(d_prev) {
        Some(step) if (lo..=hi).contains(&step) => {}
        _ => why.push(format!(
            "duration {}s after {}s is not a step in [{lo}, {hi}]",
            p.public.duration, d_prev
        )),
    }
    let (mu, sigma) = match population {
        Some(pop) => (&pop.mu, &pop.sigma),
        None => (&bundle.proofs[0].public.mu, &bundle.proofs[0].public.sigma),
    };
    if &p.public.mu != mu || &p.public.sigma != sigma {
        why.push("population parameters differ from the published ones".into());
    }
    why.extend(range_checks(cfg, p, prev));
    why
}

fn range_checks(cfg: &crate::circuit::CircuitConfig, p: &AttestationProof, prev: Option<&AttestationProof>) -> Vec<String> {
    let m = cfg.m;
    if p.commitments.len() != m + 1 || p.range_proofs.len() != 2 {
        return vec![format!(
            "expected {} commitments and 2 range proofs, got {} and {}",
            m + 1,
            p.commitments.len(),
            p.range_proofs.len()
        )];
    }
    let params = CommitmentParams::standard();
    let mut why = vec![];
    let features = RangeStatement {
        commitments: p.commitments[..m].to_vec(),
        bounds: p.public.bounds(cfg.bounds_mult),
        n_bits: cfg.n_bits,
    };
    if !range_verify(&features, &p.range_proofs[0], params) {
        why.push("feature range proof rejected".into());
    }
    let c_prev = match prev {
        None => Commitment::identity(),
        Some(q) => match q.commitments.get(m) {
            Some(c) => *c,
            None => {
                why.push("previous checkpoint lacks a timestamp commitment".into());
                return why;
            }
        },
    };
    let temporal = temporal_statement(cfg, delta_commitment(&p.commitments[m], &c_prev));
    if !range_verify(&temporal, &p.range_proofs[1], params) {
        why.push("temporal range proof rejected".into());
    }
    why
}

/// Checks every checkpoint of a bundle: linkage from the genesis hash,
/// duration steps, population parameters, both range proofs and the SNARK.
///
/// Refuses outright (an error, not a report) when the bundle was made for a
/// different circuit.
pub fn verify_bundle(key: &VerifierKey, bundle: &ProofBundle, opts: &VerifyOptions) -> Result<SessionReport> {
    if bundle.circuit_digest != key.digest {
        return Err(Error::Config(format!(
            "circuit digest mismatch: bundle {}, key {}",
            hex::encode(bundle.circuit_digest),
            hex::encode(key.digest)
        )));
    }
    if let Some(pop) = opts.population {
        pop.validate()?;
    }
    let mut reasons: Vec<Vec<String>> = (0..bundle.proofs.len())
        .map(|i| structural(key, bundle, i, opts.population))
        .collect();

    let shaped: Vec<usize> = (0..bundle.proofs.len())
        .filter(|&i| bundle.proofs[i].public.check_shape(&key.config).is_ok())
        .collect();
    let single = |i: usize| verify(key, &bundle.proofs[i].public, &bundle.proofs[i].proof);
    let batch_ok = opts.batch && !shaped.is_empty() && {
        let items: Vec<_> = shaped
            .iter()
            .map(|&i| (bundle.proofs[i].public.clone(), bundle.proofs[i].proof.clone()))
            .collect();
        batch_verify(key, &items, &bundle.session_nonce)?
    };
    for &i in &shaped {
        if !batch_ok && !single(i) {
            reasons[i].push("SNARK proof rejected".into());
        }
    }

    let checkpoints: Vec<CheckpointVerdict> = bundle
        .proofs
        .iter()
        .zip(reasons)
        .map(|(p, why)| CheckpointVerdict {
            index: p.index,
            accepted: why.is_empty(),
            reasons: why,
        })
        .collect();
    Ok(SessionReport {
        accepted: !checkpoints.is_empty() && checkpoints.iter().all(|c| c.accepted),
        batch: opts.batch,
        population_pinned: opts.population.is_some(),
        checkpoints,
    })
}

/// Differences between a transcript and the bundle it claims to describe.
pub fn verify_transcript(transcript: &SessionTranscript, bundle: &ProofBundle) -> Vec<String> {
    let mut out = vec![];
    if transcript.circuit_digest != bundle.circuit_digest || transcript.session_nonce != bundle.session_nonce {
        out.push("transcript header does not match the bundle".into());
    }
    if transcript.records.len() != bundle.proofs.len() {
        out.push(format!(
            "transcript has {} records, bundle has {} proofs",
            transcript.records.len(),
            bundle.proofs.len()
        ));
        return out;
    }
    for (r, p) in transcript.records.iter().zip(&bundle.proofs) {
        let m = p.public.m();
        let same = r.index == p.index
            && r.prev_hash == p.public.prev_hash
            && r.hash == p.public.hash
            && r.swf_root == p.public.swf_root
            && r.duration == p.public.duration
            && p.commitments.get(..m) == Some(&r.commitments[..]);
        if !same {
            out.push(format!("checkpoint {}: transcript record differs from the proof", r.index));
        }
    }
    out
}
