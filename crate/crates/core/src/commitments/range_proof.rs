//! Aggregated logarithmic range proofs for Pedersen commitments.
//!
//! Each party proves `a_j <= v_j <= b_j` for its commitment `V_j`. The
//! verifier shifts `V_j` by `g^{-a_j}` and checks `w_j = v_j - a_j` against
//! a public coefficient vector `c_j` with `{<c_j, x> : x in {0,1}^n} =
//! [0, b_j - a_j]`; the top coefficient absorbs the slack so the interval
//! is exact for any width, not only powers of two. Positions past `n * m`
//! up to the next power of two carry zero coefficients.

use ark_ec::{AffineRepr, CurveGroup, VariableBaseMSM};
use ark_ed_on_bn254::{EdwardsAffine, EdwardsProjective, Fr as Scalar};
use ark_ff::{BigInteger, Field, One, PrimeField, UniformRand, Zero};
use merlin::Transcript;
use rand::{CryptoRng, RngCore};
use std::sync::OnceLock;

use super::pedersen::{Commitment, CommitmentParams, Opening};
use super::point::{compress, decompress, hash_to_curve};
use crate::{Error, Result};

const MAX_POSITIONS: usize = 1024;

fn generators() -> &'static (Vec<EdwardsAffine>, Vec<EdwardsAffine>, EdwardsAffine) {
    static G: OnceLock<(Vec<EdwardsAffine>, Vec<EdwardsAffine>, EdwardsAffine)> = OnceLock::new();
    G.get_or_init(|| {
        let make = |tag: &str| {
            (0..MAX_POSITIONS as u32)
                .map(|i| {
                    let mut t = tag.as_bytes().to_vec();
                    t.extend_from_slice(&i.to_le_bytes());
                    hash_to_curve(&t)
                })
                .collect::<Vec<_>>()
        };
        (make("zkattest/range/G"), make("zkattest/range/H"), hash_to_curve(b"zkattest/range/Q"))
    })
}

/// Public side of an aggregated range proof.
#[derive(Clone, Debug)]
pub struct RangeStatement {
    pub commitments: Vec<Commitment>,
    /// Inclusive `(a_j, b_j)` per commitment.
    pub bounds: Vec<(u64, u64)>,
    pub n_bits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeProof {
    a: EdwardsAffine,
    s: EdwardsAffine,
    t1: EdwardsAffine,
    t2: EdwardsAffine,
    tau_x: Scalar,
    mu: Scalar,
    t_hat: Scalar,
    l: Vec<EdwardsAffine>,
    r: Vec<EdwardsAffine>,
    a_final: Scalar,
    b_final: Scalar,
}

/// Coefficients covering exactly `[0, width]` with `n` slots.
pub fn coefficients(width: u64, n: usize) -> Result<Vec<u64>> {
    if n == 0 || n > 63 || width >= (1u64 << n) {
        return Err(Error::InvalidInput(format!("width {width} does not fit in {n} bits")));
    }
    let k = (64 - width.leading_zeros() as usize).max(1);
    let mut c = vec![0u64; n];
    for (i, ci) in c.iter_mut().enumerate().take(k - 1) {
        *ci = 1 << i;
    }
    c[k - 1] = width + 1 - (1 << (k - 1));
    Ok(c)
}

fn decompose(w: u64, c: &[u64]) -> Vec<bool> {
    let k = c.iter().rposition(|&x| x != 0).map_or(1, |p| p + 1);
    let low_max = (1u64 << (k - 1)) - 1;
    let (top, low) = if w <= low_max { (false, w) } else { (true, w - c[k - 1]) };
    (0..c.len())
        .map(|i| {
            if i + 1 < k {
                (low >> i) & 1 == 1
            } else {
                i + 1 == k && top
            }
        })
        .collect()
}

struct Layout {
    n: usize,
    m: usize,
    padded: usize,
    coeffs: Vec<Vec<u64>>,
}

impl RangeStatement {
    fn layout(&self) -> Result<Layout> {
        let m = self.commitments.len();
        if m == 0 || self.bounds.len() != m {
            return Err(Error::InvalidInput("statement needs matching commitments and bounds".into()));
        }
        let coeffs = self
            .bounds
            .iter()
            .map(|&(a, b)| {
                if a > b {
                    return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
                }
                coefficients(b - a, self.n_bits)
            })
            .collect::<Result<Vec<_>>>()?;
        let padded = (self.n_bits * m).next_power_of_two().max(2);
        if padded > MAX_POSITIONS {
            return Err(Error::InvalidInput("too many range positions".into()));
        }
        Ok(Layout { n: self.n_bits, m, padded, coeffs })
    }

    fn shifted(&self, params: &CommitmentParams) -> Vec<EdwardsAffine> {
        let g = params.g.into_group();
        let shifted: Vec<EdwardsProjective> = self
            .commitments
            .iter()
            .zip(&self.bounds)
            .map(|(c, &(a, _))| c.0.into_group() - g * Scalar::from(a))
            .collect();
        EdwardsProjective::normalize_batch(&shifted)
    }

    fn transcript(&self, shifted: &[EdwardsAffine]) -> Transcript {
        let mut t = Transcript::new(b"zkattest-range-v1");
        t.append_u64(b"n", self.n_bits as u64);
        t.append_u64(b"m", self.commitments.len() as u64);
        for (v, &(a, b)) in shifted.iter().zip(&self.bounds) {
            t.append_message(b"V", &compress(v));
            t.append_u64(b"a", a);
            t.append_u64(b"b", b);
        }
        t
    }
}

fn append_point(t: &mut Transcript, label: &'static [u8], p: &EdwardsAffine) {
    t.append_message(label, &compress(p));
}

fn append_scalar(t: &mut Transcript, label: &'static [u8], s: &Scalar) {
    t.append_message(label, &s.into_bigint().to_bytes_le());
}

fn challenge(t: &mut Transcript, label: &'static [u8]) -> Scalar {
    let mut buf = [0u8; 64];
    t.challenge_bytes(label, &mut buf);
    Scalar::from_le_bytes_mod_order(&buf)
}

fn powers(x: Scalar, n: usize) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(n);
    let mut cur = Scalar::one();
    for _ in 0..n {
        out.push(cur);
        cur *= x;
    }
    out
}

fn inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| *x * y).sum()
}

fn msm(bases: &[EdwardsAffine], scalars: &[Scalar]) -> EdwardsProjective {
    EdwardsProjective::msm(bases, scalars).expect("equal lengths")
}

/// The per-position public weight `sum_j z^{2+j} c_j[i]`.
fn coefficient_weights(layout: &Layout, z: Scalar) -> Vec<Scalar> {
    let mut w = vec![Scalar::zero(); layout.padded];
    let mut zj = z;
    for (j, c) in layout.coeffs.iter().enumerate() {
        zj *= z;
        for (i, &ci) in c.iter().enumerate() {
            w[j * layout.n + i] = zj * Scalar::from(ci);
        }
    }
    w
}

fn delta(layout: &Layout, y: Scalar, z: Scalar) -> Scalar {
    let sum_y: Scalar = powers(y, layout.padded).iter().sum();
    let mut d = (z - z.square()) * sum_y;
    let mut zj = z.square();
    for c in &layout.coeffs {
        zj *= z;
        d -= zj * Scalar::from(c.iter().sum::<u64>());
    }
    d
}

fn value_u64(s: &Scalar) -> Option<u64> {
    let b = s.into_bigint();
    (b.0[1] == 0 && b.0[2] == 0 && b.0[3] == 0).then_some(b.0[0])
}

/// Proves every opening lies in its interval. Refuses (returns an error)
/// rather than emitting a proof when any value is out of range.
pub fn range_prove<R: RngCore + CryptoRng>(
    statement: &RangeStatement,
    openings: &[Opening],
    params: &CommitmentParams,
    rng: &mut R,
) -> Result<RangeProof> {
    let layout = statement.layout()?;
    if openings.len() != layout.m {
        return Err(Error::InvalidInput("one opening per commitment".into()));
    }
    let mut bits = vec![false; layout.padded];
    for (j, (o, &(a, b))) in openings.iter().zip(&statement.bounds).enumerate() {
        let v = value_u64(&o.value).filter(|v| (a..=b).contains(v)).ok_or_else(|| {
            Error::Proving(format!("value of commitment {j} is outside [{a}, {b}]"))
        })?;
        let x = decompose(v - a, &layout.coeffs[j]);
        bits[j * layout.n..(j + 1) * layout.n].copy_from_slice(&x);
    }
    Ok(prove_bits(statement, &layout, &bits, openings, params, rng))
}

fn prove_bits<R: RngCore + CryptoRng>(
    statement: &RangeStatement,
    layout: &Layout,
    bits: &[bool],
    openings: &[Opening],
    params: &CommitmentParams,
    rng: &mut R,
) -> RangeProof {
    let (gs, hs, q) = generators();
    let n = layout.padded;
    let (gs, hs) = (&gs[..n], &hs[..n]);
    let shifted = statement.shifted(params);
    let mut t = statement.transcript(&shifted);

    let a_l: Vec<Scalar> = bits.iter().map(|&b| Scalar::from(b as u64)).collect();
    let a_r: Vec<Scalar> = a_l.iter().map(|x| *x - Scalar::one()).collect();
    let alpha = Scalar::rand(rng);
    let rho = Scalar::rand(rng);
    let s_l: Vec<Scalar> = (0..n).map(|_| Scalar::rand(rng)).collect();
    let s_r: Vec<Scalar> = (0..n).map(|_| Scalar::rand(rng)).collect();

    let bases: Vec<EdwardsAffine> = gs.iter().chain(hs).chain([&params.h]).copied().collect();
    let sc = |l: &[Scalar], r: &[Scalar], blind: Scalar| -> EdwardsAffine {
        let s: Vec<Scalar> = l.iter().chain(r).copied().chain([blind]).collect();
        msm(&bases, &s).into_affine()
    };
    let a_pt = sc(&a_l, &a_r, alpha);
    let s_pt = sc(&s_l, &s_r, rho);
    append_point(&mut t, b"A", &a_pt);
    append_point(&mut t, b"S", &s_pt);
    let y = challenge(&mut t, b"y");
    let z = challenge(&mut t, b"z");

    let yp = powers(y, n);
    let cw = coefficient_weights(layout, z);
    let l0: Vec<Scalar> = a_l.iter().map(|x| *x - z).collect();
    let l1 = s_l.clone();
    let r0: Vec<Scalar> = (0..n).map(|i| yp[i] * (a_r[i] + z) + cw[i]).collect();
    let r1: Vec<Scalar> = (0..n).map(|i| yp[i] * s_r[i]).collect();
    let t1 = inner(&l0, &r1) + inner(&l1, &r0);
    let t2 = inner(&l1, &r1);
    let tau1 = Scalar::rand(rng);
    let tau2 = Scalar::rand(rng);
    let t1_pt = msm(&[params.g, params.h], &[t1, tau1]).into_affine();
    let t2_pt = msm(&[params.g, params.h], &[t2, tau2]).into_affine();
    append_point(&mut t, b"T1", &t1_pt);
    append_point(&mut t, b"T2", &t2_pt);
    let x = challenge(&mut t, b"x");

    let l: Vec<Scalar> = (0..n).map(|i| l0[i] + l1[i] * x).collect();
    let r: Vec<Scalar> = (0..n).map(|i| r0[i] + r1[i] * x).collect();
    let t_hat = inner(&l, &r);
    let mut tau_x = tau2 * x.square() + tau1 * x;
    let mut zj = z;
    for o in openings {
        zj *= z;
        tau_x += zj * o.randomness;
    }
    let mu = alpha + rho * x;
    append_scalar(&mut t, b"tau_x", &tau_x);
    append_scalar(&mut t, b"mu", &mu);
    append_scalar(&mut t, b"t_hat", &t_hat);
    let w = challenge(&mut t, b"w");
    let qw = (q.into_group() * w).into_affine();

    // Inner-product argument over G and H' = y^{-i} H.
    let yinv = y.inverse().expect("nonzero challenge");
    let yinvp = powers(yinv, n);
    let mut g_vec: Vec<EdwardsProjective> = gs.iter().map(|p| p.into_group()).collect();
    let mut h_vec: Vec<EdwardsProjective> = hs.iter().zip(&yinvp).map(|(p, s)| *p * s).collect();
    let (mut a, mut b) = (l, r);
    let (mut ls, mut rs) = (Vec::new(), Vec::new());
    while a.len() > 1 {
        let half = a.len() / 2;
        let (a_lo, a_hi) = a.split_at(half);
        let (b_lo, b_hi) = b.split_at(half);
        let ga = EdwardsProjective::normalize_batch(&g_vec);
        let ha = EdwardsProjective::normalize_batch(&h_vec);
        let c_l = inner(a_lo, b_hi);
        let c_r = inner(a_hi, b_lo);
        let lb: Vec<EdwardsAffine> = ga[half..].iter().chain(&ha[..half]).chain([&qw]).copied().collect();
        let ls_: Vec<Scalar> = a_lo.iter().chain(b_hi).copied().chain([c_l]).collect();
        let rb: Vec<EdwardsAffine> = ga[..half].iter().chain(&ha[half..]).chain([&qw]).copied().collect();
        let rs_: Vec<Scalar> = a_hi.iter().chain(b_lo).copied().chain([c_r]).collect();
        let lp = msm(&lb, &ls_).into_affine();
        let rp = msm(&rb, &rs_).into_affine();
        append_point(&mut t, b"L", &lp);
        append_point(&mut t, b"R", &rp);
        ls.push(lp);
        rs.push(rp);
        let u = challenge(&mut t, b"u");
        let ui = u.inverse().expect("nonzero challenge");
        a = (0..half).map(|i| a_lo[i] * u + a_hi[i] * ui).collect();
        b = (0..half).map(|i| b_lo[i] * ui + b_hi[i] * u).collect();
        g_vec = (0..half).map(|i| g_vec[i] * ui + g_vec[half + i] * u).collect();
        h_vec = (0..half).map(|i| h_vec[i] * u + h_vec[half + i] * ui).collect();
    }

    RangeProof {
        a: a_pt,
        s: s_pt,
        t1: t1_pt,
        t2: t2_pt,
        tau_x,
        mu,
        t_hat,
        l: ls,
        r: rs,
        a_final: a[0],
        b_final: b[0],
    }
}

pub fn range_verify(statement: &RangeStatement, proof: &RangeProof, params: &CommitmentParams) -> bool {
    verify_inner(statement, proof, params).unwrap_or(false)
}

fn verify_inner(statement: &RangeStatement, proof: &RangeProof, params: &CommitmentParams) -> Result<bool> {
    let layout = statement.layout()?;
    let n = layout.padded;
    let rounds = n.trailing_zeros() as usize;
    if proof.l.len() != rounds || proof.r.len() != rounds {
        return Ok(false);
    }
    let (gs, hs, q) = generators();
    let shifted = statement.shifted(params);
    let mut t = statement.transcript(&shifted);
    append_point(&mut t, b"A", &proof.a);
    append_point(&mut t, b"S", &proof.s);
    let y = challenge(&mut t, b"y");
    let z = challenge(&mut t, b"z");
    append_point(&mut t, b"T1", &proof.t1);
    append_point(&mut t, b"T2", &proof.t2);
    let x = challenge(&mut t, b"x");
    append_scalar(&mut t, b"tau_x", &proof.tau_x);
    append_scalar(&mut t, b"mu", &proof.mu);
    append_scalar(&mut t, b"t_hat", &proof.t_hat);
    let w = challenge(&mut t, b"w");
    let mut us = Vec::with_capacity(rounds);
    for (l, r) in proof.l.iter().zip(&proof.r) {
        append_point(&mut t, b"L", l);
        append_point(&mut t, b"R", r);
        us.push(challenge(&mut t, b"u"));
    }

    // Polynomial identity: g^t_hat h^tau_x = prod V_j^{z^{1+j}} g^delta T1^x T2^{x^2}
    let mut bases = vec![params.g, params.h, proof.t1, proof.t2];
    let mut scalars = vec![proof.t_hat - delta(&layout, y, z), proof.tau_x, -x, -x.square()];
    let mut zj = z;
    for v in &shifted {
        zj *= z;
        bases.push(*v);
        scalars.push(-zj);
    }
    if !msm(&bases, &scalars).is_zero() {
        return Ok(false);
    }

    // Inner-product argument, folded into one multi-exponentiation.
    let mut uinv = us.clone();
    ark_ff::batch_inversion(&mut uinv);
    let yinv = y.inverse().ok_or_else(|| Error::InvalidInput("zero challenge".into()))?;
    let yinvp = powers(yinv, n);
    let yp = powers(y, n);
    let cw = coefficient_weights(&layout, z);
    let s: Vec<Scalar> = (0..n)
        .map(|i| {
            (0..rounds).fold(Scalar::one(), |acc, k| {
                if (i >> (rounds - 1 - k)) & 1 == 1 {
                    acc * us[k]
                } else {
                    acc * uinv[k]
                }
            })
        })
        .collect();
    let mut sinv = s.clone();
    ark_ff::batch_inversion(&mut sinv);

    let (a, b) = (proof.a_final, proof.b_final);
    let mut bases: Vec<EdwardsAffine> = Vec::with_capacity(2 * n + 2 * rounds + 4);
    let mut scalars: Vec<Scalar> = Vec::with_capacity(2 * n + 2 * rounds + 4);
    // P = A + xS - z G + sum (z y^i + cw_i) y^{-i} H_i, then
    // P - mu h + t_hat w Q + sum(u^2 L + u^-2 R) = a s G + b s^-1 y^-i H + a b w Q
    bases.extend_from_slice(&[proof.a, proof.s, params.h, *q]);
    scalars.extend_from_slice(&[Scalar::one(), x, -proof.mu, w * (proof.t_hat - a * b)]);
    for i in 0..n {
        bases.push(gs[i]);
        scalars.push(-z - a * s[i]);
        bases.push(hs[i]);
        scalars.push((z * yp[i] + cw[i] - b * sinv[i]) * yinvp[i]);
    }
    for k in 0..rounds {
        bases.push(proof.l[k]);
        scalars.push(us[k].square());
        bases.push(proof.r[k]);
        scalars.push(uinv[k].square());
    }
    Ok(msm(&bases, &scalars).is_zero())
}

impl RangeProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 * (9 + 2 * self.l.len()));
        for p in [&self.a, &self.s, &self.t1, &self.t2] {
            out.extend_from_slice(&compress(p));
        }
        for s in [&self.tau_x, &self.mu, &self.t_hat] {
            out.extend_from_slice(&s.into_bigint().to_bytes_le());
        }
        for (l, r) in self.l.iter().zip(&self.r) {
            out.extend_from_slice(&compress(l));
            out.extend_from_slice(&compress(r));
        }
        out.extend_from_slice(&self.a_final.into_bigint().to_bytes_le());
        out.extend_from_slice(&self.b_final.into_bigint().to_bytes_le());
        out
    }

    /// Strict parsing: canonical scalars and subgroup points only.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = || Error::Encoding("malformed range proof".into());
        if !bytes.len().is_multiple_of(32) || bytes.len() < 32 * 9 || !(bytes.len() / 32 - 9).is_multiple_of(2) {
            return Err(bad());
        }
        let chunk = |i: usize| -> [u8; 32] { bytes[32 * i..32 * i + 32].try_into().expect("32") };
        let pt = |i: usize| decompress(&chunk(i)).ok_or_else(bad);
        let sc = |i: usize| {
            let c = chunk(i);
            let s = Scalar::from_le_bytes_mod_order(&c);
            (s.into_bigint().to_bytes_le() == c).then_some(s).ok_or_else(bad)
        };
        let rounds = (bytes.len() / 32 - 9) / 2;
        let mut l = Vec::with_capacity(rounds);
        let mut r = Vec::with_capacity(rounds);
        for k in 0..rounds {
            l.push(pt(7 + 2 * k)?);
            r.push(pt(8 + 2 * k)?);
        }
        let end = 7 + 2 * rounds;
        Ok(RangeProof {
            a: pt(0)?,
            s: pt(1)?,
            t1: pt(2)?,
            t2: pt(3)?,
            tau_x: sc(4)?,
            mu: sc(5)?,
            t_hat: sc(6)?,
            l,
            r,
            a_final: sc(end)?,
            b_final: sc(end + 1)?,
        })
    }
}

/// Builds a proof from arbitrary bit assignments, ignoring the committed
/// values. Used to check that the verifier rejects inconsistent witnesses.
#[doc(hidden)]
pub fn forge_with_bits<R: RngCore + CryptoRng>(
    statement: &RangeStatement,
    bits: &[bool],
    openings: &[Opening],
    params: &CommitmentParams,
    rng: &mut R,
) -> Result<RangeProof> {
    let layout = statement.layout()?;
    let mut padded = bits.to_vec();
    padded.resize(layout.padded, false);
    Ok(prove_bits(statement, &layout, &padded, openings, params, rng))
}
