use ark_bn254::{Bn254, Fr, G1Affine, G1Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, VariableBaseMSM};
use ark_ff::{PrimeField, Zero};
use ark_groth16::{Groth16, Proof};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::keys::VerifierKey;
use super::proof::proof_to_bytes;
use crate::circuit::PublicInputs;
use crate::codec::Writer;
use crate::{Error, Result};

/// True iff `proof` is valid for exactly these public inputs.
pub fn verify(key: &VerifierKey, public: &PublicInputs, proof: &Proof<Bn254>) -> bool {
    if public.check_shape(&key.config).is_err() {
        return false;
    }
    Groth16::<Bn254>::verify_proof(&key.pvk, proof, &public.to_field_elements()).unwrap_or(false)
}

/// Checks all items with one multi-pairing over a random linear
/// combination: `b + 3` Miller loops instead of `4b`.
///
/// The 128-bit coefficients come from ChaCha20 keyed by a hash of the seed
/// and every (statement, proof) pair, so results are reproducible while a
/// prover who does not control the seed cannot predict them.
pub fn batch_verify(key: &VerifierKey, items: &[(PublicInputs, Proof<Bn254>)], rng_seed: &[u8]) -> Result<bool> {
    if items.is_empty() {
        return Err(Error::InvalidInput("batch verification needs at least one proof".into()));
    }
    if items.iter().any(|(p, _)| p.check_shape(&key.config).is_err()) {
        return Ok(false);
    }

    let mut t = Sha256::new();
    t.update(b"zkattest-batch-v1");
    t.update(key.digest);
    t.update((rng_seed.len() as u64).to_le_bytes());
    t.update(rng_seed);
    for (p, proof) in items {
        let mut w = Writer::new();
        p.write(&mut w);
        t.update(w.finish());
        t.update(proof_to_bytes(proof));
    }
    let mut rng = ChaCha20Rng::from_seed(t.finalize().into());
    let coeffs: Vec<Fr> = items
        .iter()
        .map(|_| Fr::from(rng.gen::<u128>() | 1))
        .collect();

    let ic = &key.vk.gamma_abc_g1;
    let mut ic_scalars = vec![Fr::zero(); ic.len()];
    let mut c_acc = G1Projective::zero();
    let mut r_sum = Fr::zero();
    let mut g1 = Vec::with_capacity(items.len() + 2);
    let mut g2 = Vec::with_capacity(items.len() + 2);
    for ((p, proof), r) in items.iter().zip(&coeffs) {
        ic_scalars[0] += r;
        for (acc, x) in ic_scalars[1..].iter_mut().zip(p.to_field_elements()) {
            *acc += *r * x;
        }
        c_acc += proof.c * r;
        r_sum += r;
        g1.push((proof.a * r).into_affine());
        g2.push(proof.b);
    }
    let ic_reprs: Vec<_> = ic_scalars.iter().map(|s| s.into_bigint()).collect();
    let ic_acc = G1Projective::msm_bigint(ic, &ic_reprs);

    let mut prepared_g1: Vec<<Bn254 as Pairing>::G1Prepared> = g1.into_iter().map(Into::into).collect();
    let mut prepared_g2: Vec<<Bn254 as Pairing>::G2Prepared> = g2.into_iter().map(Into::into).collect();
    let tail: [G1Affine; 2] = [ic_acc.into_affine(), c_acc.into_affine()];
    prepared_g1.extend(tail.into_iter().map(Into::into));
    prepared_g2.push(key.pvk.gamma_g2_neg_pc.clone());
    prepared_g2.push(key.pvk.delta_g2_neg_pc.clone());

    let lhs = Bn254::final_exponentiation(Bn254::multi_miller_loop(prepared_g1, prepared_g2));
    let rhs = PairingOutput::<Bn254>(key.pvk.alpha_g1_beta_g2) * r_sum;
    Ok(lhs == Some(rhs))
}
