//! Native evaluation of the attestation relation, family by family. Used
//! for diagnostics before proving and by the simulator.

use std::fmt;

use ark_ed_on_bn254::Fr as Scalar;
use sha2::{Digest, Sha256};

use super::config::{CircuitConfig, TIME_BITS};
use super::inputs::{PrivateWitness, PublicInputs};
use crate::commitments::{commit, CommitmentParams, Opening};
use crate::evidence::checkpoint::{binding_hash, FEATURE_MAX};
use crate::evidence::merkle::link_leaf;
use crate::evidence::sampling::sample_positions;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    C1,
    C2,
    C3,
    C4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub family: Family,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.family, self.detail)
    }
}

fn fail(family: Family, detail: String) -> Result<(), Violation> {
    Err(Violation { family, detail })
}

/// True iff every feature lies in its inclusive bounds.
pub fn features_accept(bounds: &[(u64, u64)], features: &[u64]) -> bool {
    bounds.len() == features.len() && bounds.iter().zip(features).all(|(&(a, b), &f)| a <= f && f <= b)
}

pub fn gap_accept(config: &CircuitConfig, gap_ms: u64) -> bool {
    (config.d_min_ms..=config.d_max_ms).contains(&gap_ms)
}

/// Checks C1 to C4 in order and reports the first violated family.
pub fn check(config: &CircuitConfig, public: &PublicInputs, witness: &PrivateWitness) -> Result<(), Violation> {
    if let Err(e) = public.check_shape(config).and(witness.check_shape(config)) {
        return fail(Family::C1, e.to_string());
    }

    let plan = sample_positions(public.swf_root, config.k, config.chain_length)
        .map_err(|e| Violation { family: Family::C1, detail: e.to_string() })?;
    for (l, (s, &j)) in witness.samples.iter().zip(&plan.indices).enumerate() {
        if s.path.index != j - 1 {
            return fail(Family::C1, format!("sample {l} opens leaf {} instead of {}", s.path.index, j - 1));
        }
        let next: [u8; 32] = Sha256::digest(s.prev_state).into();
        if next != s.state {
            return fail(Family::C1, format!("sample {l}: state {j} is not the hash of state {}", j - 1));
        }
        if !s.path.verify(public.swf_root, link_leaf(&s.prev_state, &s.state)) {
            return fail(Family::C1, format!("sample {l}: Merkle opening does not match the root"));
        }
    }

    for (j, ((&mu, &sigma), &f)) in public.mu.iter().zip(&public.sigma).zip(&witness.features).enumerate() {
        if mu > FEATURE_MAX || sigma > FEATURE_MAX || f > FEATURE_MAX {
            return fail(Family::C2, format!("feature {j}: value outside 16 bits"));
        }
        let spread = config.bounds_mult * sigma;
        if f + spread < mu || f > mu + spread {
            return fail(Family::C2, format!("feature {j} = {f} outside {mu} -/+ {spread}"));
        }
    }

    let (tp, t) = (witness.tau_prev, witness.tau);
    if tp >> TIME_BITS != 0 || t >> TIME_BITS != 0 {
        return fail(Family::C3, "timestamp exceeds 40 bits".into());
    }
    if t < tp || t - tp < config.d_min_ms {
        return fail(Family::C3, format!("gap {}ms below {}ms", t as i128 - tp as i128, config.d_min_ms));
    }
    if public.duration != t / 1000 {
        return fail(Family::C3, format!("duration {}s does not match timestamp {t}ms", public.duration));
    }

    let sum_f: u64 = witness.features.iter().sum();
    let session = commit(
        &Opening {
            value: Scalar::from(sum_f),
            randomness: witness.aggregate_randomness(),
        },
        CommitmentParams::standard(),
    );
    if binding_hash(&public.prev_hash, &witness.content_delta, &session) != public.hash {
        return fail(Family::C4, "checkpoint hash does not bind the committed features".into());
    }
    Ok(())
}
