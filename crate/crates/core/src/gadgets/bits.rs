use ark_bn254::Fr;
use ark_ff::{AdditiveGroup, Field, One, PrimeField, Zero};
use ark_relations::lc;
use ark_relations::r1cs::{ConstraintSystemRef, LinearCombination, SynthesisError, Variable};

use super::num::{get, Num};

/// A boolean that is either a constant or a (possibly negated) allocated
/// variable constrained to {0, 1}.
#[derive(Clone, Debug)]
pub enum Bit {
    Const(bool),
    Is(Variable, Option<bool>),
    Not(Variable, Option<bool>),
}

fn fr(b: bool) -> Fr {
    if b {
        Fr::one()
    } else {
        Fr::zero()
    }
}

impl Bit {
    pub fn alloc(cs: &ConstraintSystemRef<Fr>, value: Option<bool>) -> Result<Bit, SynthesisError> {
        let v = cs.new_witness_variable(|| get(value).map(fr))?;
        // v * (1 - v) = 0
        cs.enforce_constraint(lc!() + v, lc!() + Variable::One - v, lc!())?;
        Ok(Bit::Is(v, value))
    }

    /// Allocates without a booleanity constraint; only for values that are
    /// already forced to {0, 1} by the caller's constraint.
    fn alloc_unchecked(cs: &ConstraintSystemRef<Fr>, value: Option<bool>) -> Result<Bit, SynthesisError> {
        let v = cs.new_witness_variable(|| get(value).map(fr))?;
        Ok(Bit::Is(v, value))
    }

    pub fn value(&self) -> Option<bool> {
        match self {
            Bit::Const(b) => Some(*b),
            Bit::Is(_, v) => *v,
            Bit::Not(_, v) => v.map(|b| !b),
        }
    }

    pub fn lc(&self) -> LinearCombination<Fr> {
        match self {
            Bit::Const(true) => lc!() + Variable::One,
            Bit::Const(false) => lc!(),
            Bit::Is(v, _) => lc!() + *v,
            Bit::Not(v, _) => lc!() + Variable::One - *v,
        }
    }

    pub fn num(&self) -> Num {
        Num {
            lc: self.lc(),
            value: self.value().map(fr),
        }
    }

    pub fn not(&self) -> Bit {
        match self {
            Bit::Const(b) => Bit::Const(!b),
            Bit::Is(v, x) => Bit::Not(*v, *x),
            Bit::Not(v, x) => Bit::Is(*v, *x),
        }
    }

    pub fn xor(cs: &ConstraintSystemRef<Fr>, a: &Bit, b: &Bit) -> Result<Bit, SynthesisError> {
        match (a, b) {
            (Bit::Const(false), x) | (x, Bit::Const(false)) => Ok(x.clone()),
            (Bit::Const(true), x) | (x, Bit::Const(true)) => Ok(x.not()),
            _ => {
                let value = a.value().zip(b.value()).map(|(x, y)| x ^ y);
                let c = Bit::alloc_unchecked(cs, value)?;
                // 2a * b = a + b - c
                cs.enforce_constraint(
                    a.lc() * Fr::from(2u64),
                    b.lc(),
                    a.lc() + &b.lc() - &c.lc(),
                )?;
                Ok(c)
            }
        }
    }

    pub fn and(cs: &ConstraintSystemRef<Fr>, a: &Bit, b: &Bit) -> Result<Bit, SynthesisError> {
        match (a, b) {
            (Bit::Const(false), _) | (_, Bit::Const(false)) => Ok(Bit::Const(false)),
            (Bit::Const(true), x) | (x, Bit::Const(true)) => Ok(x.clone()),
            _ => {
                let value = a.value().zip(b.value()).map(|(x, y)| x & y);
                let c = Bit::alloc_unchecked(cs, value)?;
                cs.enforce_constraint(a.lc(), b.lc(), c.lc())?;
                Ok(c)
            }
        }
    }

    /// `(a and b) xor (not a and c)`, one constraint.
    pub fn ch(cs: &ConstraintSystemRef<Fr>, a: &Bit, b: &Bit, c: &Bit) -> Result<Bit, SynthesisError> {
        if let Bit::Const(x) = a {
            return Ok(if *x { b.clone() } else { c.clone() });
        }
        if let (Bit::Const(x), Bit::Const(y)) = (b, c) {
            return Ok(match (x, y) {
                (true, true) => Bit::Const(true),
                (false, false) => Bit::Const(false),
                (true, false) => a.clone(),
                (false, true) => a.not(),
            });
        }
        let value = match (a.value(), b.value(), c.value()) {
            (Some(a), Some(b), Some(c)) => Some((a & b) ^ (!a & c)),
            _ => None,
        };
        let out = Bit::alloc_unchecked(cs, value)?;
        // a * (b - c) = out - c
        cs.enforce_constraint(a.lc(), b.lc() - &c.lc(), out.lc() - &c.lc())?;
        Ok(out)
    }

    /// Majority of three, two constraints.
    pub fn maj(cs: &ConstraintSystemRef<Fr>, a: &Bit, b: &Bit, c: &Bit) -> Result<Bit, SynthesisError> {
        let value = match (a.value(), b.value(), c.value()) {
            (Some(a), Some(b), Some(c)) => Some((a & b) ^ (a & c) ^ (b & c)),
            _ => None,
        };
        if let (Bit::Const(_), Bit::Const(_), Bit::Const(_)) = (a, b, c) {
            return Ok(Bit::Const(value.expect("constants")));
        }
        let bc = Bit::and(cs, b, c)?;
        let out = Bit::alloc_unchecked(cs, value)?;
        // a * (b + c - 2bc) = out - bc
        cs.enforce_constraint(
            a.lc(),
            b.lc() + &c.lc() - &(bc.lc() * Fr::from(2u64)),
            out.lc() - &bc.lc(),
        )?;
        Ok(out)
    }

    /// Returns `if cond { a } else { b }` as a number.
    pub fn select(cs: &ConstraintSystemRef<Fr>, cond: &Bit, a: &Num, b: &Num) -> Result<Num, SynthesisError> {
        // cond * (a - b) = out - b
        let value = match cond.value() {
            Some(true) => a.value,
            Some(false) => b.value,
            None => None,
        };
        let out = Num::witness(cs, value)?;
        cs.enforce_constraint(cond.lc(), &a.lc - &b.lc, &out.lc - &b.lc)?;
        Ok(out)
    }
}

/// A 32-bit word as little-endian bits.
#[derive(Clone, Debug)]
pub struct UInt32 {
    pub bits: Vec<Bit>,
    pub value: Option<u32>,
}

impl UInt32 {
    pub fn constant(v: u32) -> Self {
        UInt32 {
            bits: (0..32).map(|i| Bit::Const((v >> i) & 1 == 1)).collect(),
            value: Some(v),
        }
    }

    /// From 32 big-endian bits.
    pub fn from_bits_be(bits: &[Bit]) -> Self {
        assert_eq!(bits.len(), 32);
        let le: Vec<Bit> = bits.iter().rev().cloned().collect();
        let value = le.iter().enumerate().try_fold(0u32, |acc, (i, b)| {
            b.value().map(|x| acc | ((x as u32) << i))
        });
        UInt32 { bits: le, value }
    }

    pub fn into_bits_be(self) -> Vec<Bit> {
        self.bits.into_iter().rev().collect()
    }

    pub fn rotr(&self, by: usize) -> Self {
        let by = by % 32;
        let bits = (0..32).map(|i| self.bits[(i + by) % 32].clone()).collect();
        UInt32 {
            bits,
            value: self.value.map(|v| v.rotate_right(by as u32)),
        }
    }

    pub fn shr(&self, by: usize) -> Self {
        let bits = (0..32)
            .map(|i| {
                if i + by < 32 {
                    self.bits[i + by].clone()
                } else {
                    Bit::Const(false)
                }
            })
            .collect();
        UInt32 {
            bits,
            value: self.value.map(|v| v >> by),
        }
    }

    pub fn xor(&self, cs: &ConstraintSystemRef<Fr>, other: &Self) -> Result<Self, SynthesisError> {
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| Bit::xor(cs, a, b))
            .collect::<Result<_, _>>()?;
        Ok(UInt32 {
            bits,
            value: self.value.zip(other.value).map(|(a, b)| a ^ b),
        })
    }

    fn triop(
        cs: &ConstraintSystemRef<Fr>,
        a: &Self,
        b: &Self,
        c: &Self,
        f: fn(u32, u32, u32) -> u32,
        g: fn(&ConstraintSystemRef<Fr>, &Bit, &Bit, &Bit) -> Result<Bit, SynthesisError>,
    ) -> Result<Self, SynthesisError> {
        let bits = (0..32)
            .map(|i| g(cs, &a.bits[i], &b.bits[i], &c.bits[i]))
            .collect::<Result<_, _>>()?;
        let value = match (a.value, b.value, c.value) {
            (Some(x), Some(y), Some(z)) => Some(f(x, y, z)),
            _ => None,
        };
        Ok(UInt32 { bits, value })
    }

    pub fn ch(cs: &ConstraintSystemRef<Fr>, a: &Self, b: &Self, c: &Self) -> Result<Self, SynthesisError> {
        Self::triop(cs, a, b, c, |a, b, c| (a & b) ^ (!a & c), Bit::ch)
    }

    pub fn maj(cs: &ConstraintSystemRef<Fr>, a: &Self, b: &Self, c: &Self) -> Result<Self, SynthesisError> {
        Self::triop(cs, a, b, c, |a, b, c| (a & b) ^ (a & c) ^ (b & c), Bit::maj)
    }

    /// Modular sum of several words. The carry-inclusive result is
    /// decomposed into fresh bits and tied to the operands through `eq`.
    pub fn addmany(cs: &ConstraintSystemRef<Fr>, eq: &mut MultiEq, operands: &[Self]) -> Result<Self, SynthesisError> {
        assert!(operands.len() >= 2 && operands.len() <= 10);
        let max = (operands.len() as u64) * (u32::MAX as u64);
        let mut total: Option<u64> = Some(0);
        let mut all_const = true;
        let mut lhs = LinearCombination::<Fr>::zero();
        for op in operands {
            total = total.zip(op.value).map(|(t, v)| t + v as u64);
            let mut coeff = Fr::one();
            for b in &op.bits {
                match b {
                    Bit::Const(true) => lhs += (coeff, Variable::One),
                    Bit::Const(false) => {}
                    _ => {
                        all_const = false;
                        lhs = lhs + &(b.lc() * coeff);
                    }
                }
                coeff.double_in_place();
            }
        }
        if all_const {
            return Ok(UInt32::constant(total.expect("constants") as u32));
        }
        let n = 64 - max.leading_zeros() as usize;
        let mut rhs = LinearCombination::<Fr>::zero();
        let mut bits = Vec::with_capacity(32);
        let mut coeff = Fr::one();
        for i in 0..n {
            let b = Bit::alloc(cs, total.map(|t| (t >> i) & 1 == 1))?;
            rhs = rhs + &(b.lc() * coeff);
            if i < 32 {
                bits.push(b);
            }
            coeff.double_in_place();
        }
        eq.enforce_equal(cs, n, lhs, rhs)?;
        Ok(UInt32 {
            bits,
            value: total.map(|t| t as u32),
        })
    }
}

/// Packs several small equalities into one constraint while the combined
/// width stays under the field capacity.
#[derive(Default)]
pub struct MultiEq {
    lhs: LinearCombination<Fr>,
    rhs: LinearCombination<Fr>,
    used: usize,
}

impl MultiEq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enforce_equal(
        &mut self,
        cs: &ConstraintSystemRef<Fr>,
        width: usize,
        lhs: LinearCombination<Fr>,
        rhs: LinearCombination<Fr>,
    ) -> Result<(), SynthesisError> {
        let capacity = Fr::MODULUS_BIT_SIZE as usize - 1;
        if self.used + width > capacity {
            self.flush(cs)?;
        }
        let shift = Fr::from(2u64).pow([self.used as u64]);
        self.lhs = &self.lhs + &(lhs * shift);
        self.rhs = &self.rhs + &(rhs * shift);
        self.used += width;
        Ok(())
    }

    pub fn flush(&mut self, cs: &ConstraintSystemRef<Fr>) -> Result<(), SynthesisError> {
        if self.used > 0 {
            let lhs = std::mem::take(&mut self.lhs);
            let rhs = std::mem::take(&mut self.rhs);
            cs.enforce_constraint(lhs, lc!() + Variable::One, rhs)?;
            self.used = 0;
        }
        Ok(())
    }
}
