//! G1 multi-scalar multiplication tuned for Groth16 witnesses.
//!
//! Zero and one scalars (the bulk of a bit-heavy witness) are handled
//! directly. The rest go through signed-digit Pippenger whose bucket
//! accumulation is done in affine coordinates with one shared inversion
//! per batch.

use ark_bn254::{Fq, Fr, G1Affine, G1Projective};
use ark_ec::{AdditiveGroup, VariableBaseMSM};
use ark_ff::{batch_inversion, BigInt, BigInteger, Field, One, PrimeField, Zero};

type Repr = BigInt<4>;

const BATCH: usize = 512;
const SCALAR_BITS: usize = 254;

pub fn msm_g1(bases: &[G1Affine], scalars: &[Repr]) -> G1Projective {
    let n = bases.len().min(scalars.len());
    let one = Fr::one().into_bigint();
    let mut acc = G1Projective::zero();
    let mut rest = Vec::new();
    for i in 0..n {
        let s = &scalars[i];
        if s.is_zero() || bases[i].infinity {
            continue;
        }
        if *s == one {
            acc += bases[i];
        } else {
            rest.push(i);
        }
    }
    if rest.len() < 256 {
        let b: Vec<G1Affine> = rest.iter().map(|&i| bases[i]).collect();
        let s: Vec<Repr> = rest.iter().map(|&i| scalars[i]).collect();
        return acc + G1Projective::msm_bigint(&b, &s);
    }
    acc + pippenger(bases, scalars, &rest)
}

fn window_bits(n: usize) -> usize {
    match n {
        0..=4_095 => 9,
        4_096..=32_767 => 11,
        32_768..=262_143 => 12,
        _ => 15,
    }
}

fn bits_at(s: &Repr, start: usize, c: usize) -> u64 {
    let limb = start / 64;
    let off = start % 64;
    if limb >= 4 {
        return 0;
    }
    let mut v = s.0[limb] >> off;
    if off + c > 64 && limb + 1 < 4 {
        v |= s.0[limb + 1] << (64 - off);
    }
    v & ((1u64 << c) - 1)
}

fn pippenger(bases: &[G1Affine], scalars: &[Repr], idx: &[usize]) -> G1Projective {
    let c = window_bits(idx.len());
    let windows = (SCALAR_BITS + 1).div_ceil(c);
    let half = 1i64 << (c - 1);
    let full = 1i64 << c;
    let n = idx.len();

    let mut digits = vec![0i32; n * windows];
    for (k, &i) in idx.iter().enumerate() {
        let s = &scalars[i];
        debug_assert!(s.num_bits() as usize <= SCALAR_BITS);
        let mut carry = 0i64;
        for w in 0..windows {
            let mut d = bits_at(s, w * c, c) as i64 + carry;
            carry = 0;
            if d >= half {
                d -= full;
                carry = 1;
            }
            digits[w * n + k] = d as i32;
        }
        debug_assert_eq!(carry, 0);
    }

    let mut acc = Buckets::new(1 << (c - 1));
    let mut total = G1Projective::zero();
    for w in (0..windows).rev() {
        for _ in 0..c {
            total.double_in_place();
        }
        let window = &digits[w * n..(w + 1) * n];
        // The top window spans only the last few scalar bits; with that
        // few buckets the affine batches would mostly collide.
        let live_bits = (SCALAR_BITS + 1 - w * c).min(c);
        if (1usize << live_bits) < 4 * BATCH {
            total += projective_window(bases, idx, window, 1 << live_bits);
            continue;
        }
        acc.reset();
        for (k, &d) in window.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let p = bases[idx[k]];
            if d > 0 {
                acc.add(d as usize - 1, p);
            } else {
                acc.add((-d) as usize - 1, -p);
            }
        }
        total += acc.sum();
    }
    total
}

fn projective_window(bases: &[G1Affine], idx: &[usize], digits: &[i32], size: usize) -> G1Projective {
    let mut buckets = vec![G1Projective::zero(); size];
    for (k, &d) in digits.iter().enumerate() {
        if d > 0 {
            buckets[d as usize - 1] += bases[idx[k]];
        } else if d < 0 {
            buckets[(-d) as usize - 1] -= bases[idx[k]];
        }
    }
    let mut running = G1Projective::zero();
    let mut res = G1Projective::zero();
    for b in buckets.into_iter().rev() {
        running += b;
        res += running;
    }
    res
}

struct Buckets {
    points: Vec<G1Affine>,
    busy: Vec<bool>,
    ops: Vec<(usize, G1Affine)>,
    queue: Vec<(usize, G1Affine)>,
    dens: Vec<Fq>,
}

impl Buckets {
    fn new(n: usize) -> Self {
        Buckets {
            points: vec![G1Affine::identity(); n],
            busy: vec![false; n],
            ops: Vec::with_capacity(BATCH),
            queue: Vec::new(),
            dens: Vec::with_capacity(BATCH),
        }
    }

    fn reset(&mut self) {
        self.points.fill(G1Affine::identity());
    }

    fn add(&mut self, b: usize, p: G1Affine) {
        self.schedule(b, p);
        if self.ops.len() >= BATCH {
            self.flush();
            self.drain_queue();
        }
    }

    fn schedule(&mut self, b: usize, p: G1Affine) {
        if self.busy[b] {
            self.queue.push((b, p));
        } else if self.points[b].infinity {
            self.points[b] = p;
        } else {
            self.busy[b] = true;
            self.ops.push((b, p));
        }
    }

    fn drain_queue(&mut self) {
        let q = std::mem::take(&mut self.queue);
        for (b, p) in q {
            self.schedule(b, p);
        }
    }

    fn flush(&mut self) {
        self.dens.clear();
        for &(b, p) in &self.ops {
            let q = &self.points[b];
            self.dens.push(if q.x != p.x {
                p.x - q.x
            } else if q.y == p.y {
                q.y.double()
            } else {
                Fq::one()
            });
        }
        batch_inversion(&mut self.dens);
        for (&(b, p), inv) in self.ops.iter().zip(&self.dens) {
            let q = self.points[b];
            let lambda = if q.x != p.x {
                (p.y - q.y) * inv
            } else if q.y == p.y {
                let xx = q.x.square();
                (xx.double() + xx) * inv
            } else {
                self.points[b] = G1Affine::identity();
                self.busy[b] = false;
                continue;
            };
            let x3 = lambda.square() - q.x - p.x;
            let y3 = lambda * (q.x - x3) - q.y;
            self.points[b] = G1Affine::new_unchecked(x3, y3);
            self.busy[b] = false;
        }
        self.ops.clear();
    }

    fn sum(&mut self) -> G1Projective {
        while !self.ops.is_empty() || !self.queue.is_empty() {
            self.flush();
            self.drain_queue();
        }
        let mut running = G1Projective::zero();
        let mut res = G1Projective::zero();
        for p in self.points.iter().rev() {
            if !p.infinity {
                running += p;
            }
            res += running;
        }
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ec::{CurveGroup, PrimeGroup};
    use ark_std::UniformRand;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn check(bases: &[G1Affine], scalars: &[Fr]) {
        let reprs: Vec<Repr> = scalars.iter().map(|s| s.into_bigint()).collect();
        let expect = G1Projective::msm_bigint(bases, &reprs);
        assert_eq!(msm_g1(bases, &reprs).into_affine(), expect.into_affine());
    }

    #[test]
    fn matches_reference_on_mixed_scalars() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let g = G1Projective::generator();
        for n in [0usize, 1, 300, 5000] {
            let bases: Vec<G1Affine> = (0..n).map(|_| (g * Fr::rand(&mut rng)).into_affine()).collect();
            let scalars: Vec<Fr> = (0..n)
                .map(|i| match i % 5 {
                    0 => Fr::zero(),
                    1 => Fr::one(),
                    2 => Fr::from(rng.gen::<u32>()),
                    3 => -Fr::from(rng.gen::<u16>()),
                    _ => Fr::rand(&mut rng),
                })
                .collect();
            check(&bases, &scalars);
        }
    }

    #[test]
    fn repeated_and_opposite_points_hit_doubling_and_cancellation() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let p = (G1Projective::generator() * Fr::from(77u64)).into_affine();
        let q = (G1Projective::generator() * Fr::from(91u64)).into_affine();
        let bases: Vec<G1Affine> = (0..3000).map(|i| if i % 3 == 0 { q } else { p }).collect();
        let mut scalars: Vec<Fr> = (0..3000).map(|i| Fr::from((i % 7 + 2) as u64)).collect();
        for s in scalars.iter_mut().step_by(4) {
            *s = -*s;
        }
        check(&bases, &scalars);
        let scalars: Vec<Fr> = (0..3000).map(|_| Fr::rand(&mut rng)).collect();
        check(&bases, &scalars);
        let max = vec![-Fr::one(); 3000];
        check(&bases, &max);
        // proving keys carry identity entries for unused variables
        let mut with_zero = bases.clone();
        for b in with_zero.iter_mut().step_by(5) {
            *b = G1Affine::identity();
        }
        check(&with_zero, &scalars);
    }
}
