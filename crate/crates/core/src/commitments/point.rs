//! Canonical 32-byte point encoding and hash-to-curve for the embedded
//! curve.
//!
//! Encoding: the affine `y` coordinate as a little-endian integer in bits
//! 0..254, bit 254 clear, bit 255 set iff the canonical `x` is odd.

use ark_ec::twisted_edwards::TECurveConfig;
use ark_ec::{AffineRepr, CurveGroup};
use ark_ed_on_bn254::{EdwardsAffine, EdwardsConfig, Fq};
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use sha2::{Digest, Sha256};

pub fn compress(p: &EdwardsAffine) -> [u8; 32] {
    let (x, y) = p.xy().unwrap_or((Fq::zero(), Fq::one()));
    let mut out = [0u8; 32];
    out.copy_from_slice(&y.into_bigint().to_bytes_le());
    if x.into_bigint().is_odd() {
        out[31] |= 0x80;
    }
    out
}

/// Recovers `x` from `y` and the requested parity, without a subgroup check.
fn recover(y: Fq, odd: bool) -> Option<EdwardsAffine> {
    let a = EdwardsConfig::COEFF_A;
    let d = EdwardsConfig::COEFF_D;
    let y2 = y.square();
    // a x^2 + y^2 = 1 + d x^2 y^2  =>  x^2 = (1 - y^2) / (a - d y^2)
    let den = a - d * y2;
    let x2 = (Fq::one() - y2) * den.inverse()?;
    let mut x = x2.sqrt()?;
    if x.into_bigint().is_odd() != odd {
        x = -x;
    }
    if x.is_zero() && odd {
        return None;
    }
    let p = EdwardsAffine::new_unchecked(x, y);
    p.is_on_curve().then_some(p)
}

/// Strict decoding: rejects non-canonical `y`, a set bit 254, points off the
/// curve and points outside the prime-order subgroup.
pub fn decompress(bytes: &[u8; 32]) -> Option<EdwardsAffine> {
    if bytes[31] & 0x40 != 0 {
        return None;
    }
    let odd = bytes[31] & 0x80 != 0;
    let mut b = *bytes;
    b[31] &= 0x3f;
    let y = Fq::from_bigint(num_from_le(&b))?;
    let p = recover(y, odd)?;
    p.is_in_correct_subgroup_assuming_on_curve().then_some(p)
}

fn num_from_le(b: &[u8; 32]) -> ark_ff::BigInt<4> {
    let mut limbs = [0u64; 4];
    for (i, l) in limbs.iter_mut().enumerate() {
        *l = u64::from_le_bytes(b[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    }
    ark_ff::BigInt(limbs)
}

/// Try-and-increment hash to the prime-order subgroup.
pub fn hash_to_curve(tag: &[u8]) -> EdwardsAffine {
    for ctr in 0u32.. {
        let digest = Sha256::new()
            .chain_update(tag)
            .chain_update(ctr.to_le_bytes())
            .finalize();
        let y = Fq::from_le_bytes_mod_order(&digest);
        if let Some(p) = recover(y, digest[31] & 0x80 != 0) {
            let q = p.mul_by_cofactor_to_group().into_affine();
            if !q.is_zero() {
                return q;
            }
        }
    }
    unreachable!("counter space exhausted")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ec::PrimeGroup;
    use ark_ed_on_bn254::{EdwardsProjective, Fr};
    use ark_std::UniformRand;

    #[test]
    fn roundtrip_random_points() {
        let mut rng = ark_std::test_rng();
        for _ in 0..200 {
            let p = (EdwardsProjective::generator() * Fr::rand(&mut rng)).into_affine();
            assert_eq!(decompress(&compress(&p)), Some(p));
        }
        let id = EdwardsAffine::zero();
        assert_eq!(decompress(&compress(&id)), Some(id));
    }

    #[test]
    fn rejects_small_order_and_bad_bits() {
        // (0, -1) has order two
        let mut b = compress(&EdwardsAffine::new_unchecked(Fq::zero(), -Fq::one()));
        assert_eq!(decompress(&b), None);
        b = compress(&hash_to_curve(b"t"));
        b[31] |= 0x40;
        assert_eq!(decompress(&b), None);
        assert_eq!(decompress(&[0xffu8; 32]), None);
    }

    #[test]
    fn hash_to_curve_is_deterministic_and_separated() {
        let a = hash_to_curve(b"one");
        assert_eq!(a, hash_to_curve(b"one"));
        assert_ne!(a, hash_to_curve(b"two"));
        assert!(a.is_in_correct_subgroup_assuming_on_curve());
    }
}
