//! Polynomials over GF(2).
//!
//! A [`BinPoly`] packs its coefficients into 64-bit words, bit `i` of the
//! packed sequence being the coefficient of `x^i`. The representation is kept
//! normalized: there is never a zero word above the leading term, and the zero
//! polynomial is the empty word sequence. Equality and hashing therefore
//! coincide with mathematical equality.
//!
//! ```text
//! 0b1011  ->  1 + x + x^3
//! "1101"  ->  1 + x + x^3      (bit-string form, lowest degree first)
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use smallvec::SmallVec;

use crate::error::ParseError;

type Words = SmallVec<[u64; 2]>;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BinPoly {
    words: Words,
}

impl BinPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `x^exp`.
    pub fn monomial(exp: usize) -> Self {
        let mut p = Self::zero();
        p.flip(exp);
        p
    }

    /// Polynomial whose bit `i` (as an integer) is the coefficient of `x^i`.
    pub fn from_u64(bits: u64) -> Self {
        let mut p = BinPoly {
            words: SmallVec::from_slice(&[bits]),
        };
        p.normalize();
        p
    }

    /// Sum of `x^e` over the given exponents. Repeated exponents cancel.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut p = Self::zero();
        for e in exps {
            p.flip(e);
        }
        p
    }

    /// Parses a low-degree-first string of `'0'`/`'1'` characters.
    pub fn from_bitstring(s: &str) -> Result<Self, ParseError> {
        let mut p = Self::zero();
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => p.flip(i),
                other => return Err(ParseError::BadBit(other)),
            }
        }
        Ok(p)
    }

    /// Low-degree-first bit string, padded with zeros to at least `width`.
    pub fn to_bitstring(&self, width: usize) -> String {
        let len = self.degree().map_or(0, |d| d + 1).max(width);
        (0..len)
            .map(|i| if self.coeff(i) { '1' } else { '0' })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    /// Toggles the coefficient of `x^i`.
    pub fn flip(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1 << (i % 64);
        self.normalize();
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exponents with a nonzero coefficient, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    fn xor_shifted(&mut self, other: &BinPoly, shift: usize) {
        if other.is_zero() {
            return;
        }
        let ws = shift / 64;
        let bs = shift % 64;
        let need = other.words.len() + ws + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[i + ws] ^= w << bs;
            if bs != 0 {
                self.words[i + ws + 1] ^= w >> (64 - bs);
            }
        }
        self.normalize();
    }

    /// Quotient and remainder of division by `divisor`.
    ///
    /// Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &BinPoly) -> (BinPoly, BinPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = BinPoly::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot.flip(shift);
            rem.xor_shifted(divisor, shift);
        }
        (quot, rem)
    }

    pub fn rem(&self, divisor: &BinPoly) -> BinPoly {
        self.div_rem(divisor).1
    }

    pub fn gcd(&self, other: &BinPoly) -> BinPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Inverse of `self` modulo `modulus`, if `gcd(self, modulus) = 1`.
    pub fn inverse_mod(&self, modulus: &BinPoly) -> Option<BinPoly> {
        // Extended Euclid tracking only the coefficient of `self`.
        let (mut r0, mut r1) = (modulus.clone(), self.rem(modulus));
        let (mut s0, mut s1) = (BinPoly::zero(), BinPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 + &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        r0.is_one().then(|| s0.rem(modulus))
    }

    pub fn mul_mod(&self, other: &BinPoly, modulus: &BinPoly) -> BinPoly {
        (self * other).rem(modulus)
    }

    /// `self^exp mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut exp: u64, modulus: &BinPoly) -> BinPoly {
        let mut base = self.rem(modulus);
        let mut acc = BinPoly::one().rem(modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            base = base.mul_mod(&base, modulus);
            exp >>= 1;
        }
        acc
    }

    /// Reduction modulo `x^len + 1`: exponents are folded mod `len`.
    pub fn reduce_cyclic(&self, len: usize) -> BinPoly {
        if self.degree().is_none_or(|d| d < len) {
            return self.clone();
        }
        BinPoly::from_exponents(self.exponents().map(|e| e % len))
    }

    /// Product modulo `x^len + 1` of two already-reduced polynomials.
    pub fn mul_cyclic(&self, other: &BinPoly, len: usize) -> BinPoly {
        (self * other).reduce_cyclic(len)
    }

    /// Distinct-degree irreducibility test: `f` of degree `n` is irreducible
    /// iff `gcd(f, x^(2^i) - x) = 1` for every `1 <= i <= n/2`.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else {
            return false;
        };
        if n == 0 {
            return false;
        }
        let x = BinPoly::monomial(1).rem(self);
        let mut frob = x.clone();
        for _ in 1..=n / 2 {
            frob = frob.mul_mod(&frob, self);
            let g = self.gcd(&(&frob + &x));
            if !g.is_one() {
                return false;
            }
        }
        true
    }

    pub fn derivative(&self) -> BinPoly {
        BinPoly::from_exponents(self.exponents().filter(|e| e % 2 == 1).map(|e| e - 1))
    }
}

impl Ord for BinPoly {
    /// Numeric order of the packed coefficient word (degree first, then the
    /// highest differing coefficient).
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BinPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &BinPoly {
    type Output = BinPoly;

    fn add(self, rhs: &BinPoly) -> BinPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&BinPoly> for BinPoly {
    fn add_assign(&mut self, rhs: &BinPoly) {
        self.xor_shifted(rhs, 0);
    }
}

impl Mul for &BinPoly {
    type Output = BinPoly;

    fn mul(self, rhs: &BinPoly) -> BinPoly {
        let (short, long) = if self.weight() <= rhs.weight() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = BinPoly::zero();
        for e in short.exponents() {
            out.xor_shifted(long, e);
        }
        out
    }
}

impl fmt::Display for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for e in self.exponents() {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match e {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_canonical() {
        let mut p = BinPoly::monomial(70);
        p.flip(70);
        assert_eq!(p, BinPoly::zero());
        assert_eq!(p.degree(), None);
        assert_eq!(BinPoly::from_u64(0), BinPoly::zero());
    }

    #[test]
    fn bitstring_is_low_degree_first() {
        let p = BinPoly::from_bitstring("1101").unwrap();
        assert_eq!(p, BinPoly::from_exponents([0, 1, 3]));
        assert_eq!(p.to_bitstring(6), "110100");
        assert!(BinPoly::from_bitstring("10a").is_err());
    }

    #[test]
    fn numeric_order() {
        let a = BinPoly::from_exponents([0, 1, 3]); // 11
        let b = BinPoly::from_exponents([0, 2, 3]); // 13
        assert!(a < b);
        assert!(BinPoly::monomial(64) > BinPoly::from_u64(u64::MAX));
    }

    #[test]
    fn small_irreducibles() {
        let irreducible: Vec<u64> = (2u64..64)
            .filter(|&v| BinPoly::from_u64(v).is_irreducible())
            .collect();
        // x, x+1, x^2+x+1, two cubics, three quartics, six quintics
        assert_eq!(irreducible, vec![2, 3, 7, 11, 13, 19, 25, 31, 37, 41, 47, 55, 59, 61]);
    }

    #[test]
    fn inverse_mod_known() {
        let f = BinPoly::from_u64(0b1011);
        let x = BinPoly::monomial(1);
        let inv = x.inverse_mod(&f).unwrap();
        assert!(inv.mul_mod(&x, &f).is_one());
        assert!(BinPoly::from_u64(0b11).inverse_mod(&BinPoly::from_u64(0b101)).is_none());
    }

    #[test]
    fn cyclic_reduction() {
        assert_eq!(
            BinPoly::from_exponents([0, 9, 18]).reduce_cyclic(9),
            BinPoly::one()
        );
        assert_eq!(
            BinPoly::from_exponents([3]).mul_cyclic(&BinPoly::from_exponents([6, 7]), 9),
            BinPoly::from_exponents([0, 1])
        );
    }

    fn arb_poly() -> impl Strategy<Value = BinPoly> {
        proptest::collection::vec(0usize..150, 0..12).prop_map(BinPoly::from_exponents)
    }

    proptest! {
        #[test]
        fn division_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b);
            prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
            prop_assert_eq!(&(&q * &b) + &r, a);
        }

        #[test]
        fn product_degree_and_commutation(a in arb_poly(), b in arb_poly()) {
            let ab = &a * &b;
            prop_assert_eq!(&ab, &(&b * &a));
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!(ab.degree(), Some(da + db));
            }
        }
    }
}
