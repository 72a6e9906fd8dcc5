use ark_bn254::Fr;
use ark_relations::r1cs::{ConstraintSystemRef, SynthesisError};

use super::num::Num;
use crate::poseidon::{constants, FULL_ROUNDS, PARTIAL_ROUNDS, WIDTH};

fn pow5(cs: &ConstraintSystemRef<Fr>, x: &Num) -> Result<Num, SynthesisError> {
    let x2 = x.square(cs)?;
    let x4 = x2.square(cs)?;
    x4.mul(cs, x)
}

/// In-circuit counterpart of [`crate::poseidon::hash2`]; 243 constraints.
pub fn hash2(cs: &ConstraintSystemRef<Fr>, a: &Num, b: &Num) -> Result<Num, SynthesisError> {
    let c = constants();
    let half = FULL_ROUNDS / 2;
    let mut state = [Num::zero(), a.clone(), b.clone()];
    for r in 0..FULL_ROUNDS + PARTIAL_ROUNDS {
        for i in 0..WIDTH {
            state[i] = state[i].add_const(c.ark[r][i]);
        }
        if r < half || r >= half + PARTIAL_ROUNDS {
            for s in state.iter_mut() {
                *s = pow5(cs, s)?;
            }
        } else {
            state[0] = pow5(cs, &state[0])?;
        }
        let s = state.clone();
        for i in 0..WIDTH {
            state[i] = s[0]
                .scale(c.mds[i][0])
                .add(&s[1].scale(c.mds[i][1]))
                .add(&s[2].scale(c.mds[i][2]));
        }
    }
    let [out, _, _] = state;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_relations::r1cs::ConstraintSystem;
    use ark_std::UniformRand;

    #[test]
    fn gadget_matches_native() {
        let mut rng = ark_std::test_rng();
        for _ in 0..4 {
            let cs = ConstraintSystem::<Fr>::new_ref();
            let (x, y) = (Fr::rand(&mut rng), Fr::rand(&mut rng));
            let a = Num::witness(&cs, Some(x)).unwrap();
            let b = Num::witness(&cs, Some(y)).unwrap();
            let before = cs.num_constraints();
            let out = hash2(&cs, &a, &b).unwrap();
            assert_eq!(cs.num_constraints() - before, 243);
            let o = Num::witness(&cs, out.value).unwrap();
            out.enforce_equal(&cs, &o).unwrap();
            assert!(cs.is_satisfied().unwrap());
            assert_eq!(out.value.unwrap(), crate::poseidon::hash2(x, y));
        }
    }
}
