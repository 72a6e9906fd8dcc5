use ark_bn254::Fr;
use ark_relations::r1cs::{
    ConstraintSynthesizer, ConstraintSystem, ConstraintSystemRef, OptimizationGoal, SynthesisError, SynthesisMode,
};
use serde::{Deserialize, Serialize};

use super::config::{CircuitConfig, SLACK_BITS, TIME_BITS};
use super::inputs::{scalar_to_fr, PrivateWitness, PublicInputs};
use crate::commitments::CommitmentParams;
use crate::gadgets::curve::fixed_base_msm;
use crate::gadgets::{poseidon, sha256::sha256, Bit, Num};
use crate::Result;

/// Bits needed for the sum of up to 24 sixteen-bit features.
const SUM_BITS: usize = 21;
/// The embedded scalar field order is below 2^251.
const SCALAR_BITS: usize = 251;
const MS_PER_S: u64 = 1000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub c4: usize,
    pub total: usize,
}

/// One checkpoint's attestation relation. Without a statement and witness
/// it only fixes the constraint shape (for setup and counting).
#[derive(Clone, Debug)]
pub struct AttestationCircuit {
    pub config: CircuitConfig,
    pub public: Option<PublicInputs>,
    pub witness: Option<PrivateWitness>,
}

impl AttestationCircuit {
    pub fn blank(config: &CircuitConfig) -> Self {
        AttestationCircuit {
            config: config.clone(),
            public: None,
            witness: None,
        }
    }

    pub fn new(config: &CircuitConfig, public: PublicInputs, witness: PrivateWitness) -> Result<Self> {
        config.validate()?;
        public.check_shape(config)?;
        witness.check_shape(config)?;
        Ok(AttestationCircuit {
            config: config.clone(),
            public: Some(public),
            witness: Some(witness),
        })
    }

    /// Emits all constraints into `cs`, returning per-family counts.
    pub fn generate(&self, cs: &ConstraintSystemRef<Fr>) -> std::result::Result<ConstraintReport, SynthesisError> {
        let cfg = &self.config;
        let p = self.public.as_ref();
        let w = self.witness.as_ref();
        let params = CommitmentParams::standard();

        // Public inputs, in the normative order.
        let fields = p.map(|p| p.to_field_elements());
        let field = |i: usize| fields.as_ref().map(|f| f[i]);
        let prev_limbs = [Num::input(cs, field(0))?, Num::input(cs, field(1))?];
        let hash_limbs = [Num::input(cs, field(2))?, Num::input(cs, field(3))?];
        let root = Num::input(cs, field(4))?;
        let duration = Num::input(cs, field(5))?;
        let mu = (0..cfg.m)
            .map(|j| Num::input(cs, field(6 + j)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let sigma = (0..cfg.m)
            .map(|j| Num::input(cs, field(6 + cfg.m + j)))
            .collect::<std::result::Result<Vec<_>, _>>()?;

        let mut report = ConstraintReport::default();
        let mut mark = cs.num_constraints();
        let mut take = |cs: &ConstraintSystemRef<Fr>| {
            let n = cs.num_constraints();
            let d = n - mark;
            mark = n;
            d
        };

        // C1: sampled chain links, authenticated against R.
        let depth = cfg.depth();
        for l in 0..cfg.k {
            let s = w.map(|w| &w.samples[l]);
            let e = poseidon::hash2(cs, &root, &Num::constant(Fr::from(l as u64 + 1)))?;
            let e_bits = e.to_bits_strict(cs)?;
            let index_bits = &e_bits[..depth];

            let prev_bits = alloc_digest(cs, s.map(|s| &s.prev_state))?;
            let cur_bits = sha256(cs, &prev_bits)?;
            let [plo, phi] = pack_digest(&prev_bits);
            let [clo, chi] = pack_digest(&cur_bits);
            let prev_node = poseidon::hash2(cs, &plo, &phi)?;
            let cur_node = poseidon::hash2(cs, &clo, &chi)?;
            let mut node = poseidon::hash2(cs, &prev_node, &cur_node)?;
            for (t, bit) in index_bits.iter().enumerate() {
                let sib = Num::witness(cs, s.map(|s| s.path.siblings[t]))?;
                // bit = 1: node is a right child
                let left = Bit::select(cs, bit, &sib, &node)?;
                let right = node.add(&sib).sub(&left);
                node = poseidon::hash2(cs, &left, &right)?;
            }
            node.enforce_equal(cs, &root)?;
        }
        report.c1 = take(cs);

        // C2: each feature within [mu - k sigma, mu + k sigma], clipped to
        // 16 bits by its own decomposition.
        let mult = Fr::from(cfg.bounds_mult);
        let mut features = Vec::with_capacity(cfg.m);
        for j in 0..cfg.m {
            let f = Num::witness(cs, w.map(|w| Fr::from(w.features[j])))?;
            mu[j].to_bits(cs, cfg.n_bits)?;
            sigma[j].to_bits(cs, cfg.n_bits)?;
            f.to_bits(cs, cfg.n_bits)?;
            let spread = sigma[j].scale(mult);
            f.add(&spread).sub(&mu[j]).to_bits(cs, SLACK_BITS)?;
            mu[j].add(&spread).sub(&f).to_bits(cs, SLACK_BITS)?;
            features.push(f);
        }
        report.c2 = take(cs);

        // C3: tau - tau_prev >= d_min, and d = floor(tau / 1000).
        let tau_prev = Num::witness(cs, w.map(|w| Fr::from(w.tau_prev)))?;
        let tau = Num::witness(cs, w.map(|w| Fr::from(w.tau)))?;
        tau_prev.to_bits(cs, TIME_BITS)?;
        tau.to_bits(cs, TIME_BITS)?;
        tau.sub(&tau_prev)
            .add_const(-Fr::from(cfg.d_min_ms))
            .to_bits(cs, TIME_BITS)?;
        let rem = tau.sub(&duration.scale(Fr::from(MS_PER_S)));
        rem.to_bits(cs, 10)?;
        rem.scale(-Fr::from(1u64))
            .add_const(Fr::from(MS_PER_S - 1))
            .to_bits(cs, 10)?;
        report.c3 = take(cs);

        // C4: h = SHA256(h_prev || delta || ser(g^{sum f} h^{sum r})).
        let prev_bits = alloc_digest(cs, p.map(|p| &p.prev_hash))?;
        let [lo, hi] = pack_digest(&prev_bits);
        lo.enforce_equal(cs, &prev_limbs[0])?;
        hi.enforce_equal(cs, &prev_limbs[1])?;
        let delta_bits = alloc_digest(cs, w.map(|w| &w.content_delta))?;
        let sum_f = features.iter().fold(Num::zero(), |a, f| a.add(f));
        let sum_f_bits = sum_f.to_bits(cs, SUM_BITS)?;
        let r_agg = Num::witness(cs, w.map(|w| scalar_to_fr(&w.aggregate_randomness())))?;
        let r_bits = r_agg.to_bits(cs, SCALAR_BITS)?;
        let point = fixed_base_msm(
            cs,
            &[
                (&sum_f_bits, params.g.into()),
                (&r_bits, params.h.into()),
            ],
        )?;
        let point_bits = point.serialize_bits(cs)?;
        let mut preimage = prev_bits;
        preimage.extend(delta_bits);
        preimage.extend(point_bits);
        let out = sha256(cs, &preimage)?;
        let [lo, hi] = pack_digest(&out);
        lo.enforce_equal(cs, &hash_limbs[0])?;
        hi.enforce_equal(cs, &hash_limbs[1])?;
        report.c4 = take(cs);

        report.total = report.c1 + report.c2 + report.c3 + report.c4;
        debug_assert_eq!(report.total, cs.num_constraints());
        Ok(report)
    }

    /// Synthesizes into a fresh prover-mode system and reports whether every
    /// constraint holds.
    pub fn is_satisfied(&self) -> Result<bool> {
        let cs = ConstraintSystem::<Fr>::new_ref();
        cs.set_optimization_goal(OptimizationGoal::None);
        self.generate(&cs)?;
        Ok(cs.is_satisfied()?)
    }
}

impl ConstraintSynthesizer<Fr> for AttestationCircuit {
    fn generate_constraints(self, cs: ConstraintSystemRef<Fr>) -> std::result::Result<(), SynthesisError> {
        self.generate(&cs).map(|_| ())
    }
}

/// 256 boolean witnesses in byte-stream order (MSB first within a byte).
fn alloc_digest(cs: &ConstraintSystemRef<Fr>, d: Option<&[u8; 32]>) -> std::result::Result<Vec<Bit>, SynthesisError> {
    (0..256)
        .map(|i| Bit::alloc(cs, d.map(|d| (d[i / 8] >> (7 - i % 8)) & 1 == 1)))
        .collect()
}

/// Little-endian 128-bit limbs of a digest given in byte-stream order.
fn pack_digest(bits: &[Bit]) -> [Num; 2] {
    assert_eq!(bits.len(), 256);
    let le: Vec<Bit> = bits
        .chunks(8)
        .flat_map(|byte| byte.iter().rev().cloned().collect::<Vec<_>>())
        .collect();
    [Num::pack(&le[..128]), Num::pack(&le[128..])]
}

/// Counts constraints per family for `config`.
pub fn constraint_count(config: &CircuitConfig) -> Result<ConstraintReport> {
    config.validate()?;
    let cs = ConstraintSystem::<Fr>::new_ref();
    cs.set_optimization_goal(OptimizationGoal::None);
    cs.set_mode(SynthesisMode::Setup);
    Ok(AttestationCircuit::blank(config).generate(&cs)?)
}
