use ark_ec::{AffineRepr, CurveGroup, VariableBaseMSM};
use ark_ed_on_bn254::{EdwardsAffine, EdwardsProjective, Fr as Scalar};
use ark_std::Zero;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use super::point::{compress, decompress, hash_to_curve};
use crate::{Error, Result};

pub const TAG_G: &[u8] = b"zkattest/pedersen/g";
pub const TAG_H: &[u8] = b"zkattest/pedersen/h";

/// Generators with no known discrete-log relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentParams {
    pub g: EdwardsAffine,
    pub h: EdwardsAffine,
}

impl CommitmentParams {
    pub fn standard() -> &'static CommitmentParams {
        static P: OnceLock<CommitmentParams> = OnceLock::new();
        P.get_or_init(|| {
            let g = hash_to_curve(TAG_G);
            let mut tag = TAG_H.to_vec();
            tag.extend_from_slice(&compress(&g));
            CommitmentParams {
                g,
                h: hash_to_curve(&tag),
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Opening {
    pub value: Scalar,
    pub randomness: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Commitment(pub EdwardsAffine);

impl Commitment {
    pub fn identity() -> Self {
        Commitment(EdwardsAffine::zero())
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        compress(&self.0)
    }

    pub fn from_bytes(b: &[u8; 32]) -> Result<Self> {
        decompress(b)
            .map(Commitment)
            .ok_or_else(|| Error::Encoding("point not in prime-order subgroup".into()))
    }
}

impl From<Commitment> for String {
    fn from(c: Commitment) -> String {
        hex::encode(c.to_bytes())
    }
}

impl TryFrom<String> for Commitment {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        let v = hex::decode(s).map_err(|e| Error::Encoding(e.to_string()))?;
        let b: [u8; 32] = v
            .try_into()
            .map_err(|_| Error::Encoding("commitment must be 32 bytes".into()))?;
        Commitment::from_bytes(&b)
    }
}

/// `g^value h^randomness`.
pub fn commit(opening: &Opening, params: &CommitmentParams) -> Commitment {
    let p = EdwardsProjective::msm(&[params.g, params.h], &[opening.value, opening.randomness])
        .expect("equal lengths");
    Commitment(p.into_affine())
}

/// Product of commitments; the empty product is the identity.
pub fn aggregate(commitments: &[Commitment]) -> Commitment {
    let sum: EdwardsProjective = commitments.iter().map(|c| c.0.into_group()).sum();
    Commitment(sum.into_affine())
}

/// `next / prev`, a commitment to the difference of the openings.
pub fn delta_commitment(next: &Commitment, prev: &Commitment) -> Commitment {
    Commitment((next.0.into_group() - prev.0).into_affine())
}

pub fn aggregate_openings(openings: &[Opening]) -> Opening {
    openings.iter().fold(
        Opening {
            value: Scalar::zero(),
            randomness: Scalar::zero(),
        },
        |acc, o| Opening {
            value: acc.value + o.value,
            randomness: acc.randomness + o.randomness,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ec::PrimeGroup;
    use ark_std::UniformRand;
    use proptest::prelude::*;

    fn params() -> &'static CommitmentParams {
        CommitmentParams::standard()
    }

    #[test]
    fn zero_opening_is_identity() {
        let o = Opening {
            value: Scalar::zero(),
            randomness: Scalar::zero(),
        };
        assert_eq!(commit(&o, params()), Commitment::identity());
    }

    #[test]
    fn generators_are_distinct_and_not_the_default() {
        let p = params();
        assert_ne!(p.g, p.h);
        assert_ne!(p.g, EdwardsAffine::generator());
        assert!(!p.g.is_zero() && !p.h.is_zero());
    }

    #[test]
    fn matches_double_and_add_oracle() {
        let mut rng = ark_std::test_rng();
        for _ in 0..20 {
            let o = Opening {
                value: Scalar::rand(&mut rng),
                randomness: Scalar::rand(&mut rng),
            };
            let oracle = params().g.mul_bigint(ark_ff::PrimeField::into_bigint(o.value))
                + params().h.mul_bigint(ark_ff::PrimeField::into_bigint(o.randomness));
            assert_eq!(commit(&o, params()).0, oracle.into_affine());
        }
    }

    #[test]
    fn randomness_changes_commitment() {
        let v = Scalar::from(42u64);
        let a = commit(&Opening { value: v, randomness: Scalar::from(1u64) }, params());
        let b = commit(&Opening { value: v, randomness: Scalar::from(2u64) }, params());
        assert_ne!(a, b);
    }

    #[test]
    fn aggregate_of_twelve_opens_to_sums() {
        let mut rng = ark_std::test_rng();
        let openings: Vec<Opening> = (0..12)
            .map(|_| Opening {
                value: Scalar::from(u16::rand(&mut rng)),
                randomness: Scalar::rand(&mut rng),
            })
            .collect();
        let cs: Vec<Commitment> = openings.iter().map(|o| commit(o, params())).collect();
        assert_eq!(aggregate(&cs), commit(&aggregate_openings(&openings), params()));
        assert_eq!(aggregate(&cs[..1]), cs[0]);
        assert_eq!(aggregate(&[]), Commitment::identity());
    }

    #[test]
    fn delta_of_self_is_identity() {
        let c = Commitment(EdwardsProjective::generator().into_affine());
        assert_eq!(delta_commitment(&c, &c), Commitment::identity());
    }

    #[test]
    fn serde_roundtrip() {
        let c = commit(&Opening { value: Scalar::from(5u64), randomness: Scalar::from(9u64) }, params());
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Commitment>(&s).unwrap(), c);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn homomorphism(a: u64, b: u64, r: [u8; 32], s: [u8; 32]) {
            use ark_ff::PrimeField;
            let r = Scalar::from_le_bytes_mod_order(&r);
            let s = Scalar::from_le_bytes_mod_order(&s);
            let ca = commit(&Opening { value: Scalar::from(a), randomness: r }, params());
            let cb = commit(&Opening { value: Scalar::from(b), randomness: s }, params());
            let sum = commit(&Opening { value: Scalar::from(a) + Scalar::from(b), randomness: r + s }, params());
            prop_assert_eq!(aggregate(&[ca, cb]), sum);
            let d = delta_commitment(&cb, &ca);
            let expect = commit(&Opening { value: Scalar::from(b) - Scalar::from(a), randomness: s - r }, params());
            prop_assert_eq!(d, expect);
        }
    }
}
