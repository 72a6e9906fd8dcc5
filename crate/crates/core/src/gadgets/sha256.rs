//! SHA-256 over bit vectors. Bits are big-endian within each byte, bytes in
//! message order, matching the native byte stream.

use ark_bn254::Fr;
use ark_relations::r1cs::{ConstraintSystemRef, SynthesisError};

use super::bits::{Bit, MultiEq, UInt32};

#[rustfmt::skip]
const K: [u32; 64] = [
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
];

const IV: [u32; 8] = [
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
];

/// Hashes a whole number of bytes (given as bits) with standard padding.
pub fn sha256(cs: &ConstraintSystemRef<Fr>, input: &[Bit]) -> Result<Vec<Bit>, SynthesisError> {
    assert!(input.len().is_multiple_of(8));
    let len = input.len() as u64;
    let mut padded = input.to_vec();
    padded.push(Bit::Const(true));
    while !(padded.len() + 64).is_multiple_of(512) {
        padded.push(Bit::Const(false));
    }
    for i in (0..64).rev() {
        padded.push(Bit::Const((len >> i) & 1 == 1));
    }
    let mut eq = MultiEq::new();
    let mut state: Vec<UInt32> = IV.iter().map(|&v| UInt32::constant(v)).collect();
    for block in padded.chunks(512) {
        state = compress(cs, &mut eq, block, &state)?;
    }
    eq.flush(cs)?;
    Ok(state.into_iter().flat_map(|w| w.into_bits_be()).collect())
}

enum Lazy {
    Ready(UInt32),
    Sum(Vec<UInt32>),
}

impl Lazy {
    fn force(self, cs: &ConstraintSystemRef<Fr>, eq: &mut MultiEq, extra: &[UInt32]) -> Result<UInt32, SynthesisError> {
        match self {
            Lazy::Ready(w) if extra.is_empty() => Ok(w),
            Lazy::Ready(w) => {
                let mut ops = vec![w];
                ops.extend_from_slice(extra);
                UInt32::addmany(cs, eq, &ops)
            }
            Lazy::Sum(mut ops) => {
                ops.extend_from_slice(extra);
                UInt32::addmany(cs, eq, &ops)
            }
        }
    }
}

fn big_sigma(cs: &ConstraintSystemRef<Fr>, x: &UInt32, r: [usize; 3]) -> Result<UInt32, SynthesisError> {
    x.rotr(r[0]).xor(cs, &x.rotr(r[1]))?.xor(cs, &x.rotr(r[2]))
}

fn small_sigma(cs: &ConstraintSystemRef<Fr>, x: &UInt32, r: [usize; 2], s: usize) -> Result<UInt32, SynthesisError> {
    x.rotr(r[0]).xor(cs, &x.rotr(r[1]))?.xor(cs, &x.shr(s))
}

fn compress(
    cs: &ConstraintSystemRef<Fr>,
    eq: &mut MultiEq,
    block: &[Bit],
    h: &[UInt32],
) -> Result<Vec<UInt32>, SynthesisError> {
    let mut w: Vec<UInt32> = block.chunks(32).map(UInt32::from_bits_be).collect();
    for i in 16..64 {
        let s0 = small_sigma(cs, &w[i - 15], [7, 18], 3)?;
        let s1 = small_sigma(cs, &w[i - 2], [17, 19], 10)?;
        let t = UInt32::addmany(cs, eq, &[w[i - 16].clone(), s0, w[i - 7].clone(), s1])?;
        w.push(t);
    }

    let mut a = Lazy::Ready(h[0].clone());
    let (mut b, mut c, mut d) = (h[1].clone(), h[2].clone(), h[3].clone());
    let mut e = Lazy::Ready(h[4].clone());
    let (mut f, mut g, mut hh) = (h[5].clone(), h[6].clone(), h[7].clone());

    for i in 0..64 {
        let e_now = e.force(cs, eq, &[])?;
        let s1 = big_sigma(cs, &e_now, [6, 11, 25])?;
        let ch = UInt32::ch(cs, &e_now, &f, &g)?;
        let temp1 = vec![hh, s1, ch, UInt32::constant(K[i]), w[i].clone()];

        let a_now = a.force(cs, eq, &[])?;
        let s0 = big_sigma(cs, &a_now, [2, 13, 22])?;
        let maj = UInt32::maj(cs, &a_now, &b, &c)?;

        hh = g;
        g = f;
        f = e_now;
        e = Lazy::Sum(temp1.iter().cloned().chain(Some(d)).collect());
        d = c;
        c = b;
        b = a_now;
        a = Lazy::Sum(temp1.into_iter().chain([s0, maj]).collect());
    }

    Ok(vec![
        a.force(cs, eq, &[h[0].clone()])?,
        UInt32::addmany(cs, eq, &[h[1].clone(), b])?,
        UInt32::addmany(cs, eq, &[h[2].clone(), c])?,
        UInt32::addmany(cs, eq, &[h[3].clone(), d])?,
        e.force(cs, eq, &[h[4].clone()])?,
        UInt32::addmany(cs, eq, &[h[5].clone(), f])?,
        UInt32::addmany(cs, eq, &[h[6].clone(), g])?,
        UInt32::addmany(cs, eq, &[h[7].clone(), hh])?,
    ])
}

/// Bits of a byte string, most significant bit of each byte first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
        .collect()
}

pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_relations::r1cs::ConstraintSystem;
    use sha2::{Digest, Sha256};

    fn run(msg: &[u8]) -> (Vec<u8>, usize, bool) {
        let cs = ConstraintSystem::<Fr>::new_ref();
        let bits: Vec<Bit> = bytes_to_bits(msg)
            .into_iter()
            .map(|b| Bit::alloc(&cs, Some(b)).unwrap())
            .collect();
        let out = sha256(&cs, &bits).unwrap();
        let vals: Vec<bool> = out.iter().map(|b| b.value().unwrap()).collect();
        (bits_to_bytes(&vals), cs.num_constraints(), cs.is_satisfied().unwrap())
    }

    #[test]
    fn matches_native_digest() {
        for len in [0usize, 3, 32, 55, 56, 64, 96] {
            let msg: Vec<u8> = (0..len).map(|i| (i * 37 + 11) as u8).collect();
            let (out, _, ok) = run(&msg);
            assert!(ok);
            assert_eq!(out, Sha256::digest(&msg).to_vec(), "len {len}");
        }
    }

    #[test]
    fn abc_vector() {
        let (out, _, _) = run(b"abc");
        assert_eq!(
            hex_str(&out),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn one_block_cost_is_bounded() {
        let (_, n, _) = run(&[7u8; 32]);
        // 256 input booleanity constraints plus one compression
        assert!(n < 27_500, "{n}");
    }

    fn hex_str(b: &[u8]) -> String {
        b.iter().map(|x| format!("{x:02x}")).collect()
    }
}
