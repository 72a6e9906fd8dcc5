//! Native Poseidon over the BN254 scalar field.
//!
//! Width 3, x^5 S-box, 8 full and 57 partial rounds, circomlib constants.
//! The state is `[0, a, b]` and the output is `state[0]`.

use ark_bn254::Fr;
use ark_ff::Field;
use std::sync::OnceLock;

pub const WIDTH: usize = 3;
pub const FULL_ROUNDS: usize = 8;
pub const PARTIAL_ROUNDS: usize = 57;
/// Recorded in transcripts and folded into the circuit digest.
pub const PARAMS_ID: &str = "poseidon-bn254-x5-t3-rf8-rp57";

pub struct Constants {
    pub ark: Vec<[Fr; WIDTH]>,
    pub mds: [[Fr; WIDTH]; WIDTH],
}

pub fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| {
        let p = light_poseidon::parameters::bn254_x5::get_poseidon_parameters::<Fr>(WIDTH as u8)
            .expect("width 3 parameters exist");
        assert_eq!(p.full_rounds, FULL_ROUNDS);
        assert_eq!(p.partial_rounds, PARTIAL_ROUNDS);
        assert_eq!(p.alpha, 5);
        let ark = p
            .ark
            .chunks(WIDTH)
            .map(|c| [c[0], c[1], c[2]])
            .collect::<Vec<_>>();
        let mut mds = [[Fr::from(0u64); WIDTH]; WIDTH];
        for (i, row) in p.mds.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                mds[i][j] = *v;
            }
        }
        Constants { ark, mds }
    })
}

#[inline(always)]
fn pow5(x: Fr) -> Fr {
    let x2 = x.square();
    x2.square() * x
}

pub fn permute(state: &mut [Fr; WIDTH]) {
    let c = constants();
    let half = FULL_ROUNDS / 2;
    for r in 0..FULL_ROUNDS + PARTIAL_ROUNDS {
        for i in 0..WIDTH {
            state[i] += c.ark[r][i];
        }
        if r < half || r >= half + PARTIAL_ROUNDS {
            for s in state.iter_mut() {
                *s = pow5(*s);
            }
        } else {
            state[0] = pow5(state[0]);
        }
        let s = *state;
        for i in 0..WIDTH {
            state[i] = c.mds[i][0] * s[0] + c.mds[i][1] * s[1] + c.mds[i][2] * s[2];
        }
    }
}

/// Two-to-one compression.
pub fn hash2(a: Fr, b: Fr) -> Fr {
    let mut s = [Fr::from(0u64), a, b];
    permute(&mut s);
    s[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ff::{BigInteger, PrimeField};
    use light_poseidon::{Poseidon, PoseidonHasher};
    use proptest::prelude::*;

    #[test]
    fn circomlib_vector() {
        let out = hash2(Fr::from(1u64), Fr::from(2u64));
        let hex: String = out
            .into_bigint()
            .to_bytes_be()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(
            hex,
            "115cc0f5e7d690413df64c6b9662e9cf2a3617f2743245519e19607a4417189a"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_reference(a in any::<[u8; 32]>(), b in any::<u64>()) {
            let x = Fr::from_le_bytes_mod_order(&a);
            let y = Fr::from(b);
            let mut reference = Poseidon::<Fr>::new_circom(2).unwrap();
            prop_assert_eq!(hash2(x, y), reference.hash(&[x, y]).unwrap());
        }
    }
}
