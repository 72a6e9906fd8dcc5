//! Twisted Edwards arithmetic on the embedded curve and in-circuit point
//! serialization.

use ark_bn254::Fr;
use ark_ec::twisted_edwards::TECurveConfig;
use ark_ec::{AdditiveGroup, AffineRepr, CurveGroup};
use ark_ed_on_bn254::{EdwardsAffine, EdwardsConfig, EdwardsProjective};
use ark_ff::{Field, One, Zero};
use ark_relations::r1cs::{ConstraintSystemRef, SynthesisError};

use super::bits::Bit;
use super::num::Num;

#[derive(Clone, Debug)]
pub struct PointVar {
    pub x: Num,
    pub y: Num,
}

impl PointVar {
    pub fn constant(p: &EdwardsAffine) -> Self {
        let (x, y) = p.xy().unwrap_or((Fr::zero(), Fr::one()));
        PointVar {
            x: Num::constant(x),
            y: Num::constant(y),
        }
    }

    pub fn value(&self) -> Option<EdwardsAffine> {
        Some(EdwardsAffine::new_unchecked(self.x.value?, self.y.value?))
    }

    /// Complete addition, six constraints.
    pub fn add(&self, cs: &ConstraintSystemRef<Fr>, other: &PointVar) -> Result<PointVar, SynthesisError> {
        let a = EdwardsConfig::COEFF_A;
        let d = EdwardsConfig::COEFF_D;
        let t0 = self.x.mul(cs, &other.x)?;
        let t1 = self.y.mul(cs, &other.y)?;
        let u = self.x.add(&self.y).mul(cs, &other.x.add(&other.y))?;
        let t2 = t0.scale(d).mul(cs, &t1)?;
        let xnum = u.sub(&t0).sub(&t1);
        let ynum = t1.sub(&t0.scale(a));
        let xden = t2.add_const(Fr::one());
        let yden = Num::constant(Fr::one()).sub(&t2);
        let x3 = Num::witness(cs, div(xnum.value, xden.value))?;
        let y3 = Num::witness(cs, div(ynum.value, yden.value))?;
        cs.enforce_constraint(x3.lc.clone(), xden.lc, xnum.lc)?;
        cs.enforce_constraint(y3.lc.clone(), yden.lc, ynum.lc)?;
        Ok(PointVar { x: x3, y: y3 })
    }

    /// Canonical 32-byte encoding as bits in byte-stream order (MSB first
    /// within each byte): little-endian `y` with the parity of `x` in bit 255.
    pub fn serialize_bits(&self, cs: &ConstraintSystemRef<Fr>) -> Result<Vec<Bit>, SynthesisError> {
        let ybits = self.y.to_bits_strict(cs)?;
        let xbits = self.x.to_bits_strict(cs)?;
        let mut le = ybits;
        le.push(Bit::Const(false));
        le.push(xbits[0].clone());
        assert_eq!(le.len(), 256);
        Ok(le
            .chunks(8)
            .flat_map(|byte| byte.iter().rev().cloned().collect::<Vec<_>>())
            .collect())
    }
}

fn div(n: Option<Fr>, d: Option<Fr>) -> Option<Fr> {
    let (n, d) = (n?, d?);
    d.inverse().map(|inv| n * inv)
}

/// `sum_i [scalar_i] base_i` for constant bases and little-endian scalar
/// bits, using 2-bit windows over precomputed multiples.
pub fn fixed_base_msm(
    cs: &ConstraintSystemRef<Fr>,
    terms: &[(&[Bit], EdwardsProjective)],
) -> Result<PointVar, SynthesisError> {
    let mut acc: Option<PointVar> = None;
    for (bits, base) in terms {
        let mut power = *base;
        for window in bits.chunks(2) {
            let b0 = &window[0];
            let b1 = window.get(1).cloned().unwrap_or(Bit::Const(false));
            let table = EdwardsProjective::normalize_batch(&[
                EdwardsProjective::zero(),
                power,
                power.double(),
                power.double() + power,
            ]);
            let xs: Vec<Fr> = table.iter().map(|p| p.x).collect();
            let ys: Vec<Fr> = table.iter().map(|p| p.y).collect();
            let b01 = Bit::and(cs, b0, &b1)?;
            let pick = |c: &[Fr]| -> Num {
                Num::constant(c[0])
                    .add(&b0.num().scale(c[1] - c[0]))
                    .add(&b1.num().scale(c[2] - c[0]))
                    .add(&b01.num().scale(c[3] - c[2] - c[1] + c[0]))
            };
            let sel = PointVar {
                x: pick(&xs),
                y: pick(&ys),
            };
            acc = Some(match acc {
                None => sel,
                Some(a) => a.add(cs, &sel)?,
            });
            power = power.double().double();
        }
    }
    Ok(acc.unwrap_or_else(|| PointVar::constant(&EdwardsAffine::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ec::PrimeGroup;
    use ark_ed_on_bn254::Fr as Scalar;
    use ark_ff::{BigInteger, PrimeField};
    use ark_relations::r1cs::ConstraintSystem;
    use ark_std::UniformRand;

    #[test]
    fn msm_matches_native() {
        let mut rng = ark_std::test_rng();
        let g = EdwardsProjective::generator();
        let h = g * Scalar::from(7919u64);
        for _ in 0..3 {
            let cs = ConstraintSystem::<Fr>::new_ref();
            let s1 = Scalar::from(u64::rand(&mut rng) % 2_000_000);
            let s2 = Scalar::rand(&mut rng);
            let alloc = |s: Scalar, n: usize| -> Vec<Bit> {
                let r = s.into_bigint();
                (0..n).map(|i| Bit::alloc(&cs, Some(r.get_bit(i))).unwrap()).collect()
            };
            let b1 = alloc(s1, 21);
            let b2 = alloc(s2, 251);
            let p = fixed_base_msm(&cs, &[(&b1, g), (&b2, h)]).unwrap();
            assert!(cs.is_satisfied().unwrap());
            assert_eq!(p.value().unwrap(), (g * s1 + h * s2).into_affine());
        }
    }
}
