use ark_bn254::{Bn254, Fr, G1Projective, G2Projective};
use ark_ec::{CurveGroup, VariableBaseMSM};
use ark_ff::{FftField, Field, PrimeField, UniformRand, Zero};
use ark_groth16::Proof;
use ark_poly::{EvaluationDomain, GeneralEvaluationDomain};
use ark_relations::r1cs::{ConstraintSystem, OptimizationGoal, SynthesisMode};
use rand::{CryptoRng, RngCore};

use super::keys::ProverKey;
use super::msm::msm_g1;
use crate::circuit::{predicate, AttestationCircuit, PrivateWitness, PublicInputs};
use crate::{Error, Result};

/// Groth16 proof for one checkpoint. Refuses (and emits nothing) if the
/// witness does not satisfy every constraint.
pub fn prove_core<R: RngCore + CryptoRng>(
    key: &ProverKey,
    public: &PublicInputs,
    witness: &PrivateWitness,
    rng: &mut R,
) -> Result<Proof<Bn254>> {
    let circuit = AttestationCircuit::new(&key.config, public.clone(), witness.clone())?;
    let cs = ConstraintSystem::<Fr>::new_ref();
    cs.set_optimization_goal(OptimizationGoal::Constraints);
    cs.set_mode(SynthesisMode::Prove {
        construct_matrices: false,
    });
    circuit.generate(&cs)?;
    let cs = cs
        .into_inner()
        .ok_or_else(|| Error::Proving("constraint system still shared".into()))?;

    let m = &key.matrices;
    if cs.instance_assignment.len() != m.num_instance_variables
        || cs.witness_assignment.len() != m.num_witness_variables
        || cs.num_constraints != m.num_constraints
    {
        return Err(Error::Proving("assignment shape differs from the proving key".into()));
    }
    let full: Vec<Fr> = [cs.instance_assignment.as_slice(), cs.witness_assignment.as_slice()].concat();
    let h = match witness_map(key, &full) {
        Ok(h) => h,
        Err(row) => {
            let why = predicate::check(&key.config, public, witness)
                .err()
                .map(|v| v.to_string())
                .unwrap_or_else(|| "no family-level diagnosis".into());
            return Err(Error::Proving(format!("witness violates constraint {row}: {why}")));
        }
    };
    let r = Fr::rand(rng);
    let s = Fr::rand(rng);
    Ok(assemble_proof(key, r, s, &h, &full, m.num_instance_variables))
}

fn dot(row: &[(Fr, usize)], z: &[Fr]) -> Fr {
    row.iter().fold(Fr::zero(), |acc, (c, i)| acc + z[*i] * c)
}

/// Coefficients of `(A(X) B(X) - C(X)) / Z(X)`, or the first unsatisfied
/// row.
fn witness_map(key: &ProverKey, z: &[Fr]) -> std::result::Result<Vec<Fr>, usize> {
    let m = &key.matrices;
    let n = m.num_constraints;
    let domain = GeneralEvaluationDomain::<Fr>::new(n + m.num_instance_variables).expect("domain fits");
    let size = domain.size();
    let mut a = vec![Fr::zero(); size];
    let mut b = vec![Fr::zero(); size];
    let mut c = vec![Fr::zero(); size];
    for i in 0..n {
        a[i] = dot(&m.a[i], z);
        b[i] = dot(&m.b[i], z);
        c[i] = dot(&m.c[i], z);
        if a[i] * b[i] != c[i] {
            return Err(i);
        }
    }
    a[n..n + m.num_instance_variables].copy_from_slice(&z[..m.num_instance_variables]);

    let coset = domain.get_coset(Fr::GENERATOR).expect("coset");
    for v in [&mut a, &mut b, &mut c] {
        domain.ifft_in_place(v);
        coset.fft_in_place(v);
    }
    let zinv = domain
        .evaluate_vanishing_polynomial(Fr::GENERATOR)
        .inverse()
        .expect("generator outside the domain");
    for i in 0..size {
        a[i] = (a[i] * b[i] - c[i]) * zinv;
    }
    coset.ifft_in_place(&mut a);
    Ok(a)
}

fn assemble_proof(key: &ProverKey, r: Fr, s: Fr, h: &[Fr], full: &[Fr], num_inputs: usize) -> Proof<Bn254> {
    let pk = &key.pk;
    let h: Vec<_> = h.iter().map(|x| x.into_bigint()).collect();
    let z: Vec<_> = full[1..].iter().map(|x| x.into_bigint()).collect();
    let aux = &z[num_inputs - 1..];

    let h_acc = msm_g1(&pk.h_query, &h);
    let l_acc = msm_g1(&pk.l_query, aux);

    let g_a = pk.delta_g1 * r + pk.a_query[0] + msm_g1(&pk.a_query[1..], &z) + pk.vk.alpha_g1;
    let g1_b = pk.delta_g1 * s + pk.b_g1_query[0] + msm_g1(&pk.b_g1_query[1..], &z) + pk.beta_g1;
    let g2_b = pk.vk.delta_g2 * s
        + pk.b_g2_query[0]
        + G2Projective::msm_bigint(&pk.b_g2_query[1..], &z)
        + pk.vk.beta_g2;

    let mut g_c: G1Projective = g_a * s;
    g_c += g1_b * r;
    g_c -= pk.delta_g1 * (r * s);
    g_c += l_acc;
    g_c += h_acc;

    Proof {
        a: g_a.into_affine(),
        b: g2_b.into_affine(),
        c: g_c.into_affine(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::synthetic::honest_instance;
    use crate::circuit::CircuitConfig;
    use ark_groth16::Groth16;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn matches_reference_prover() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let cfg = CircuitConfig::basic();
        let keys = crate::snark::setup(&cfg, b"x").unwrap();
        let key = &keys.prover;
        let (p, w) = honest_instance(&cfg, &mut rng).unwrap();
        let circuit = AttestationCircuit::new(&cfg, p, w).unwrap();
        let cs = ConstraintSystem::<Fr>::new_ref();
        cs.set_optimization_goal(OptimizationGoal::Constraints);
        cs.set_mode(SynthesisMode::Prove { construct_matrices: false });
        circuit.generate(&cs).unwrap();
        let cs = cs.into_inner().unwrap();
        let full: Vec<Fr> = [cs.instance_assignment.as_slice(), cs.witness_assignment.as_slice()].concat();
        let m = &key.matrices;
        let ni = m.num_instance_variables;
        let (r, s) = (Fr::from(5u64), Fr::from(7u64));
        let ours = assemble_proof(key, r, s, &witness_map(key, &full).unwrap(), &full, ni);
        let theirs = Groth16::<Bn254>::create_proof_with_reduction_and_matrices(
            &key.pk, r, s, m, ni, m.num_constraints, &full,
        )
        .unwrap();
        let h_theirs = <ark_groth16::r1cs_to_qap::LibsnarkReduction as ark_groth16::r1cs_to_qap::R1CSToQAP>::witness_map_from_matrices::<Fr, GeneralEvaluationDomain<Fr>>(m, ni, m.num_constraints, &full).unwrap();
        let h_ours = witness_map(key, &full).unwrap();
        assert_eq!(h_theirs, h_ours);
        assert_eq!(ours, theirs);
    }
}
