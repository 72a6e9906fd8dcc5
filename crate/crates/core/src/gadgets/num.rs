use ark_bn254::Fr;
use ark_ff::{AdditiveGroup, BigInteger, One, PrimeField, Zero};
use ark_relations::lc;
use ark_relations::r1cs::{ConstraintSystemRef, LinearCombination, SynthesisError, Variable};

use super::bits::Bit;

/// A linear combination with its (optional) assigned value.
#[derive(Clone, Debug)]
pub struct Num {
    pub lc: LinearCombination<Fr>,
    pub value: Option<Fr>,
}

pub(crate) fn get<T: Copy>(v: Option<T>) -> Result<T, SynthesisError> {
    v.ok_or(SynthesisError::AssignmentMissing)
}

impl Num {
    pub fn constant(v: Fr) -> Self {
        Num {
            lc: lc!() + (v, Variable::One),
            value: Some(v),
        }
    }

    pub fn zero() -> Self {
        Num {
            lc: LinearCombination::zero(),
            value: Some(Fr::zero()),
        }
    }

    pub fn witness(cs: &ConstraintSystemRef<Fr>, value: Option<Fr>) -> Result<Self, SynthesisError> {
        let var = cs.new_witness_variable(|| get(value))?;
        Ok(Num { lc: lc!() + var, value })
    }

    pub fn input(cs: &ConstraintSystemRef<Fr>, value: Option<Fr>) -> Result<Self, SynthesisError> {
        let var = cs.new_input_variable(|| get(value))?;
        Ok(Num { lc: lc!() + var, value })
    }

    pub fn add(&self, other: &Num) -> Num {
        Num {
            lc: &self.lc + &other.lc,
            value: self.value.zip(other.value).map(|(a, b)| a + b),
        }
    }

    pub fn sub(&self, other: &Num) -> Num {
        Num {
            lc: &self.lc - &other.lc,
            value: self.value.zip(other.value).map(|(a, b)| a - b),
        }
    }

    pub fn scale(&self, k: Fr) -> Num {
        Num {
            lc: &self.lc * k,
            value: self.value.map(|v| v * k),
        }
    }

    pub fn add_const(&self, k: Fr) -> Num {
        Num {
            lc: self.lc.clone() + (k, Variable::One),
            value: self.value.map(|v| v + k),
        }
    }

    /// Allocates `self * other`.
    pub fn mul(&self, cs: &ConstraintSystemRef<Fr>, other: &Num) -> Result<Num, SynthesisError> {
        let value = self.value.zip(other.value).map(|(a, b)| a * b);
        let out = Num::witness(cs, value)?;
        cs.enforce_constraint(self.lc.clone(), other.lc.clone(), out.lc.clone())?;
        Ok(out)
    }

    pub fn square(&self, cs: &ConstraintSystemRef<Fr>) -> Result<Num, SynthesisError> {
        self.mul(cs, self)
    }

    pub fn enforce_equal(&self, cs: &ConstraintSystemRef<Fr>, other: &Num) -> Result<(), SynthesisError> {
        cs.enforce_constraint(&self.lc - &other.lc, lc!() + Variable::One, lc!())
    }

    /// Sum of `bits[i] * 2^i`.
    pub fn pack(bits: &[Bit]) -> Num {
        let mut out = Num::zero();
        let mut coeff = Fr::one();
        for b in bits {
            out = out.add(&b.num().scale(coeff));
            coeff.double_in_place();
        }
        out
    }

    /// Little-endian decomposition into exactly `n` bits; unsatisfiable if
    /// the value does not fit.
    pub fn to_bits(&self, cs: &ConstraintSystemRef<Fr>, n: usize) -> Result<Vec<Bit>, SynthesisError> {
        assert!(n < Fr::MODULUS_BIT_SIZE as usize);
        let repr = self.value.map(|v| v.into_bigint());
        let bits = (0..n)
            .map(|i| Bit::alloc(cs, repr.map(|r| r.get_bit(i))))
            .collect::<Result<Vec<_>, _>>()?;
        Num::pack(&bits).enforce_equal(cs, self)?;
        Ok(bits)
    }

    /// Canonical little-endian decomposition into 254 bits, with the packed
    /// integer constrained to be below the field modulus.
    pub fn to_bits_strict(&self, cs: &ConstraintSystemRef<Fr>) -> Result<Vec<Bit>, SynthesisError> {
        let n = Fr::MODULUS_BIT_SIZE as usize;
        let repr = self.value.map(|v| v.into_bigint());
        let bits = (0..n)
            .map(|i| Bit::alloc(cs, repr.map(|r| r.get_bit(i))))
            .collect::<Result<Vec<_>, _>>()?;
        enforce_below_modulus(cs, &bits)?;
        Num::pack(&bits).enforce_equal(cs, self)?;
        Ok(bits)
    }
}

/// Enforces that the little-endian bit string is at most `p - 1`.
///
/// Walks from the most significant bit keeping a running "equal so far"
/// flag over the ones of `p - 1`; wherever `p - 1` has a zero the candidate
/// bit must be zero while the prefix still matches.
fn enforce_below_modulus(cs: &ConstraintSystemRef<Fr>, bits: &[Bit]) -> Result<(), SynthesisError> {
    let bound = {
        let mut m = Fr::MODULUS;
        m.sub_with_borrow(&<Fr as PrimeField>::BigInt::from(1u64));
        m
    };

    let mut run: Option<Bit> = None;
    let mut last_run: Option<Bit> = None;
    let mut started = false;
    for i in (0..bits.len()).rev() {
        let b = &bits[i];
        if bound.get_bit(i) {
            if !started {
                started = true;
                run = Some(b.clone());
            } else {
                let r = run.take().expect("run");
                run = Some(Bit::and(cs, &r, b)?);
            }
            last_run = run.clone();
        } else if started {
            // run * b = 0
            let r = last_run.as_ref().expect("run");
            cs.enforce_constraint(r.lc(), b.lc(), lc!())?;
        } else {
            // leading zeros of the bound force zero bits
            cs.enforce_constraint(b.lc(), lc!() + Variable::One, lc!())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_relations::r1cs::ConstraintSystem;
    use ark_std::UniformRand;

    #[test]
    fn strict_bits_accept_max_and_reject_noncanonical() {
        let cs = ConstraintSystem::<Fr>::new_ref();
        let v = -Fr::one();
        let n = Num::witness(&cs, Some(v)).unwrap();
        n.to_bits_strict(&cs).unwrap();
        assert!(cs.is_satisfied().unwrap());

        let mut rng = ark_std::test_rng();
        for _ in 0..20 {
            let cs = ConstraintSystem::<Fr>::new_ref();
            let v = Fr::rand(&mut rng);
            let n = Num::witness(&cs, Some(v)).unwrap();
            let bits = n.to_bits_strict(&cs).unwrap();
            assert!(cs.is_satisfied().unwrap());
            let back = bits.iter().rev().fold(Fr::zero(), |acc, b| {
                acc.double() + if b.value().unwrap() { Fr::one() } else { Fr::zero() }
            });
            assert_eq!(back, v);
        }
    }

    #[test]
    fn strict_bits_reject_value_plus_modulus() {
        // v + p still fits in 254 bits for small v; the bound check must fail.
        use ark_ff::BigInteger;
        let cs = ConstraintSystem::<Fr>::new_ref();
        let v = Fr::from(5u64);
        let n = Num::witness(&cs, Some(v)).unwrap();
        let mut alt = Fr::MODULUS;
        alt.add_with_carry(&<Fr as PrimeField>::BigInt::from(5u64));
        let bits = (0..254)
            .map(|i| Bit::alloc(&cs, Some(alt.get_bit(i))))
            .collect::<Result<Vec<_>, _>>()
            .unwrap();
        enforce_below_modulus(&cs, &bits).unwrap();
        Num::pack(&bits).enforce_equal(&cs, &n).unwrap();
        assert!(!cs.is_satisfied().unwrap());
    }

    #[test]
    fn range_decomposition() {
        let cs = ConstraintSystem::<Fr>::new_ref();
        Num::witness(&cs, Some(Fr::from(65535u64))).unwrap().to_bits(&cs, 16).unwrap();
        assert!(cs.is_satisfied().unwrap());
        let cs = ConstraintSystem::<Fr>::new_ref();
        Num::witness(&cs, Some(Fr::from(65536u64))).unwrap().to_bits(&cs, 16).unwrap();
        assert!(!cs.is_satisfied().unwrap());
    }
}
