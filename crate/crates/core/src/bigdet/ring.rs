//! Coefficient rings for the division-free determinant.
//!
//! Berkowitz only adds, negates and multiplies, so it runs unchanged over any
//! commutative ring. Two are provided: the integers (exact) and `Z / 2^K`
//! (truncated two-adic), the latter with matrix entries restricted to signed
//! powers of two so that every product with an entry is a shift.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

pub trait Ring: Sync {
    type Elem: Clone + Send + Sync + PartialEq + Debug;
    /// Matrix entry type. Products `Elem * Entry` may be cheaper than `Elem * Elem`.
    type Entry: Clone + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn lift(&self, e: &Self::Entry) -> Self::Elem;
    fn entry_is_zero(&self, e: &Self::Entry) -> bool;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem);
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// `acc += a * b`.
    fn mul_acc(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let p = self.mul(a, b);
        self.add_assign(acc, &p);
    }

    /// `acc += x * e`.
    fn mul_entry_acc(&self, acc: &mut Self::Elem, x: &Self::Elem, e: &Self::Entry);
}

/// Exact integer arithmetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;
    type Entry = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn lift(&self, e: &BigInt) -> BigInt {
        e.clone()
    }

    fn entry_is_zero(&self, e: &BigInt) -> bool {
        e.is_zero()
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn add_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a += b;
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn mul_acc(&self, acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        if !a.is_zero() && !b.is_zero() {
            *acc += a * b;
        }
    }

    fn mul_entry_acc(&self, acc: &mut BigInt, x: &BigInt, e: &BigInt) {
        self.mul_acc(acc, x, e);
    }
}

/// A signed power of two, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pow2 {
    Zero,
    Pos(u64),
    Neg(u64),
}

impl Pow2 {
    pub fn to_bigint(self) -> BigInt {
        match self {
            Pow2::Zero => BigInt::zero(),
            Pow2::Pos(e) => BigInt::one() << e,
            Pow2::Neg(e) => -(BigInt::one() << e),
        }
    }

    pub fn negated(self) -> Pow2 {
        match self {
            Pow2::Zero => Pow2::Zero,
            Pow2::Pos(e) => Pow2::Neg(e),
            Pow2::Neg(e) => Pow2::Pos(e),
        }
    }
}

/// `Z / 2^(64 * limbs)`, elements as little-endian `u64` limbs.
#[derive(Debug, Clone, Copy)]
pub struct TwoAdic {
    limbs: usize,
}

/// Above this many limbs, general products go through num-bigint's
/// sub-quadratic multiplication.
const SCHOOLBOOK_LIMIT: usize = 40;

impl TwoAdic {
    /// Smallest ring of this family with at least `bits` bits of precision.
    pub fn with_bits(bits: u64) -> Self {
        TwoAdic { limbs: (bits.max(1).div_ceil(64)) as usize }
    }

    pub fn bits(&self) -> u64 {
        64 * self.limbs as u64
    }

    pub fn limbs(&self) -> usize {
        self.limbs
    }

    /// Two-adic valuation, `None` for zero.
    pub fn trailing_zeros(&self, a: &[u64]) -> Option<u64> {
        a.iter()
            .position(|&w| w != 0)
            .map(|i| 64 * i as u64 + a[i].trailing_zeros() as u64)
    }

    pub fn from_bigint(&self, x: &BigInt) -> Vec<u64> {
        let mag = self.truncate_digits(x.magnitude().to_u64_digits());
        if x.sign() == num_bigint::Sign::Minus {
            self.neg(&mag)
        } else {
            mag
        }
    }

    pub fn to_biguint(&self, a: &[u64]) -> BigUint {
        let digits: Vec<u32> = a.iter().flat_map(|&w| [w as u32, (w >> 32) as u32]).collect();
        BigUint::new(digits)
    }

    fn truncate_digits(&self, mut d: Vec<u64>) -> Vec<u64> {
        d.resize(self.limbs, 0);
        d
    }

    fn add_shifted(&self, acc: &mut [u64], x: &[u64], shift: u64, subtract: bool) {
        let l = self.limbs;
        let ws = (shift / 64) as usize;
        if ws >= l {
            return;
        }
        let bs = (shift % 64) as u32;
        // a - y == a + !y + 1. The low `ws` limbs of `!y` are all ones, which
        // together with the +1 only carry a one into limb `ws`.
        let mut carry = subtract as u64;
        for i in ws..l {
            let j = i - ws;
            let mut w = x[j] << bs;
            if bs > 0 && j > 0 {
                w |= x[j - 1] >> (64 - bs);
            }
            if subtract {
                w = !w;
            }
            let (s1, c1) = acc[i].overflowing_add(w);
            let (s2, c2) = s1.overflowing_add(carry);
            acc[i] = s2;
            carry = (c1 | c2) as u64;
        }
    }

    fn mul_schoolbook(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let l = self.limbs;
        let mut out = vec![0u64; l];
        for i in 0..l {
            if a[i] == 0 {
                continue;
            }
            let mut carry = 0u128;
            for j in 0..l - i {
                let t = out[i + j] as u128 + (a[i] as u128) * (b[j] as u128) + carry;
                out[i + j] = t as u64;
                carry = t >> 64;
            }
        }
        out
    }
}

impl Ring for TwoAdic {
    type Elem = Vec<u64>;
    type Entry = Pow2;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.limbs]
    }

    fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    fn lift(&self, e: &Pow2) -> Vec<u64> {
        let mut v = self.zero();
        match *e {
            Pow2::Zero => {}
            Pow2::Pos(k) | Pow2::Neg(k) => {
                if k < self.bits() {
                    v[(k / 64) as usize] = 1 << (k % 64);
                }
            }
        }
        if matches!(e, Pow2::Neg(_)) {
            self.neg(&v)
        } else {
            v
        }
    }

    fn entry_is_zero(&self, e: &Pow2) -> bool {
        match *e {
            Pow2::Zero => true,
            Pow2::Pos(k) | Pow2::Neg(k) => k >= self.bits(),
        }
    }

    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&w| w == 0)
    }

    fn add_assign(&self, a: &mut Vec<u64>, b: &Vec<u64>) {
        let mut carry = false;
        for (x, &y) in a.iter_mut().zip(b) {
            let (s1, c1) = x.overflowing_add(y);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *x = s2;
            carry = c1 | c2;
        }
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().map(|&w| !w).collect();
        for w in out.iter_mut() {
            let (s, c) = w.overflowing_add(1);
            *w = s;
            if !c {
                break;
            }
        }
        out
    }

    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        if self.limbs <= SCHOOLBOOK_LIMIT {
            return self.mul_schoolbook(a, b);
        }
        let p = self.to_biguint(a) * self.to_biguint(b);
        let mut d = p.to_u64_digits();
        d.truncate(self.limbs);
        self.truncate_digits(d)
    }

    fn mul_entry_acc(&self, acc: &mut Vec<u64>, x: &Vec<u64>, e: &Pow2) {
        match *e {
            Pow2::Zero => {}
            Pow2::Pos(k) => self.add_shifted(acc, x, k, false),
            Pow2::Neg(k) => self.add_shifted(acc, x, k, true),
        }
    }
}
