//! The field GF(2^m) generated by a primitive `L`-th root of unity.
//!
//! For odd `L`, `m` is the multiplicative order of 2 modulo `L`, and the
//! field is realized as GF(2)[x] modulo an irreducible factor of the `L`-th
//! cyclotomic polynomial. The residue class of `x` is then a primitive
//! `L`-th root of unity `alpha`. Among the admissible factors we always pick
//! the numerically smallest one, so that every derived matrix is reproducible
//! bit for bit.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::FieldError;
use crate::poly::BinPoly;

/// Smallest `m >= 1` with `2^m = 1 (mod l)`.
pub fn multiplicative_order_of_two(l: usize) -> Result<usize, FieldError> {
    check_block_length(l)?;
    let mut m = 1;
    let mut p = 2 % l;
    while p != 1 {
        p = (p * 2) % l;
        m += 1;
    }
    Ok(m)
}

pub(crate) fn check_block_length(l: usize) -> Result<(), FieldError> {
    if l < 3 || l.is_multiple_of(2) {
        Err(FieldError::InvalidBlockLength(l))
    } else {
        Ok(())
    }
}

/// Prime factors of `n` with multiplicity, by trial division.
pub fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn euler_phi(n: usize) -> usize {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Partition of `{0, .., l-1}` into orbits of doubling mod `l`.
///
/// Each block starts at its smallest member and lists the orbit in doubling
/// order; blocks are sorted by that smallest member.
pub fn cyclotomic_cosets(l: usize) -> Result<Vec<Vec<usize>>, FieldError> {
    check_block_length(l)?;
    let mut seen = vec![false; l];
    let mut cosets = Vec::new();
    for start in 0..l {
        if seen[start] {
            continue;
        }
        let mut block = Vec::new();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            block.push(j);
            j = (2 * j) % l;
        }
        cosets.push(block);
    }
    Ok(cosets)
}

/// The `n`-th cyclotomic polynomial over GF(2).
pub fn cyclotomic_polynomial(n: usize) -> BinPoly {
    let divisors: Vec<usize> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut known: Vec<(usize, BinPoly)> = Vec::with_capacity(divisors.len());
    for &d in &divisors {
        let mut num = BinPoly::from_exponents([0, d]);
        for (e, q) in &known {
            if d % e == 0 {
                num = num.div_rem(q).0;
            }
        }
        known.push((d, num));
    }
    known.pop().expect("n has itself as a divisor").1
}

/// Splits a squarefree product of irreducibles, all of degree `degree`, into
/// its factors (sorted ascending).
pub fn equal_degree_factors(f: &BinPoly, degree: usize) -> Vec<BinPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00c1_4c5b);
    let mut pending = vec![f.clone()];
    let mut done = Vec::new();
    while let Some(g) = pending.pop() {
        let n = g.degree().unwrap_or(0);
        if n <= degree {
            done.push(g);
            continue;
        }
        loop {
            let a = random_below(&mut rng, n);
            let mut term = a.clone();
            let mut trace = a;
            for _ in 1..degree {
                term = term.mul_mod(&term, &g);
                trace += &term;
            }
            let h = g.gcd(&trace);
            let hd = h.degree().unwrap_or(0);
            if hd > 0 && hd < n {
                let rest = g.div_rem(&h).0;
                pending.push(h);
                pending.push(rest);
                break;
            }
        }
    }
    done.sort();
    done
}

fn random_below(rng: &mut ChaCha8Rng, degree: usize) -> BinPoly {
    BinPoly::from_exponents((0..degree).filter(|_| rng.gen::<bool>()))
}

/// An element of GF(2^m), stored by its coordinates in the polynomial basis
/// `1, alpha, .., alpha^(m-1)`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(BinPoly);

impl FieldElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        FieldElement(BinPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Polynomial-basis coordinates as a polynomial in `alpha`.
    pub fn as_poly(&self) -> &BinPoly {
        &self.0
    }

    /// The element lies in the prime field.
    pub fn is_bit(&self) -> bool {
        self.is_zero() || self.is_one()
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

/// Everything derived from an odd block length `L`.
#[derive(Clone, Debug)]
pub struct FieldContext {
    l: usize,
    m: usize,
    phi: usize,
    modulus: BinPoly,
    alpha_pows: Vec<FieldElement>,
    cosets: Vec<Vec<usize>>,
    coprime: Vec<usize>,
}

impl FieldContext {
    /// Field for block length `l` with the smallest admissible modulus.
    pub fn new(l: usize) -> Result<Self, FieldError> {
        let m = multiplicative_order_of_two(l)?;
        let q = cyclotomic_polynomial(l);
        let modulus = equal_degree_factors(&q, m)
            .into_iter()
            .next()
            .expect("cyclotomic polynomial has at least one factor");
        Self::with_modulus(l, modulus)
    }

    /// Field for block length `l` using the given modulus, which must be an
    /// irreducible factor of the `l`-th cyclotomic polynomial.
    pub fn with_modulus(l: usize, modulus: BinPoly) -> Result<Self, FieldError> {
        let m = multiplicative_order_of_two(l)?;
        let reject = |why: &'static str| FieldError::BadModulus {
            modulus: modulus.to_string(),
            why,
        };
        if modulus.degree() != Some(m) {
            return Err(reject("degree differs from the order of 2 modulo L"));
        }
        if !modulus.is_irreducible() {
            return Err(reject("not irreducible"));
        }
        let x = BinPoly::monomial(1);
        if !x.pow_mod(l as u64, &modulus).is_one() {
            return Err(reject("x^L is not 1"));
        }
        for (p, _) in factorize(l) {
            if x.pow_mod((l / p) as u64, &modulus).is_one() {
                return Err(reject("x has order smaller than L"));
            }
        }
        let mut alpha_pows = Vec::with_capacity(l);
        let mut cur = BinPoly::one();
        for _ in 0..l {
            alpha_pows.push(FieldElement(cur.clone()));
            cur = cur.mul_mod(&x, &modulus);
        }
        let coprime = (1..l).filter(|&r| gcd(r, l) == 1).collect();
        Ok(FieldContext {
            l,
            m,
            phi: euler_phi(l),
            alpha_pows,
            cosets: cyclotomic_cosets(l)?,
            coprime,
            modulus,
        })
    }

    pub fn block_length(&self) -> usize {
        self.l
    }

    /// Extension degree `m_L`.
    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    pub fn modulus(&self) -> &BinPoly {
        &self.modulus
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha_pows[1 % self.l]
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    /// Smallest member of every coset, ascending.
    pub fn representatives(&self) -> Vec<usize> {
        self.cosets.iter().map(|c| c[0]).collect()
    }

    /// Integers in `[1, L-1]` coprime to `L`.
    pub fn coprime(&self) -> &[usize] {
        &self.coprime
    }

    /// Cosets contained in the coprime set, in representative order.
    pub fn coprime_cosets(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.cosets.iter().filter(|c| gcd(c[0], self.l) == 1)
    }

    /// Coset representatives inside the coprime set.
    pub fn coprime_representatives(&self) -> Vec<usize> {
        self.coprime_cosets().map(|c| c[0]).collect()
    }

    /// `alpha^k` for any integer exponent.
    pub fn alpha_pow(&self, k: i64) -> &FieldElement {
        &self.alpha_pows[k.rem_euclid(self.l as i64) as usize]
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(&a.0 + &b.0)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::zero();
        }
        FieldElement(a.0.mul_mod(&b.0, &self.modulus))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        a.0.inverse_mod(&self.modulus)
            .map(FieldElement)
            .ok_or(FieldError::ZeroInverse)
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, exp: u64) -> FieldElement {
        FieldElement(a.0.pow_mod(exp, &self.modulus))
    }

    /// `a^(2^j)`.
    pub fn frobenius(&self, a: &FieldElement, j: usize) -> FieldElement {
        let mut out = a.clone();
        for _ in 0..j % self.m {
            out = self.mul(&out, &out);
        }
        out
    }

    /// Field element with the given polynomial-basis coordinates, reduced.
    pub fn element(&self, coords: &BinPoly) -> FieldElement {
        FieldElement(coords.rem(&self.modulus))
    }

    pub fn from_bit(&self, bit: bool) -> FieldElement {
        if bit {
            FieldElement::one()
        } else {
            FieldElement::zero()
        }
    }

    /// `k(alpha^j)`; `k` need not be reduced modulo `x^L + 1`.
    pub fn eval_at_alpha_power(&self, k: &BinPoly, j: usize) -> FieldElement {
        let mut acc = BinPoly::zero();
        for i in k.exponents() {
            acc += &self.alpha_pows[(i % self.l) * (j % self.l) % self.l].0;
        }
        FieldElement(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order_by_doubling(l: usize) -> usize {
        // independent of the library loop: first m with 2^m - 1 divisible by l
        (1..=l).find(|&m| ((1u128 << m) - 1).is_multiple_of(l as u128)).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order_of_two(7).unwrap(), 3);
        assert_eq!(multiplicative_order_of_two(9).unwrap(), 6);
        assert_eq!(multiplicative_order_of_two(15).unwrap(), 4);
        for l in (3..=101).step_by(2) {
            assert_eq!(multiplicative_order_of_two(l).unwrap(), order_by_doubling(l));
        }
    }

    #[test]
    fn rejects_bad_block_lengths() {
        for l in [0, 1, 2, 8, 100] {
            assert!(matches!(
                multiplicative_order_of_two(l),
                Err(FieldError::InvalidBlockLength(_))
            ));
        }
    }

    #[test]
    fn totients() {
        assert_eq!(euler_phi(7), 6);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(15), 8);
        assert_eq!(euler_phi(1), 1);
        for n in 1..200 {
            let brute = (1..=n).filter(|&k| gcd(k, n) == 1).count();
            assert_eq!(euler_phi(n), brute, "n = {n}");
        }
    }

    #[test]
    fn order_divides_totient() {
        for l in (3..=101).step_by(2) {
            let m = multiplicative_order_of_two(l).unwrap();
            assert_eq!(euler_phi(l) % m, 0, "L = {l}");
        }
    }

    #[test]
    fn cosets_small() {
        assert_eq!(
            cyclotomic_cosets(7).unwrap(),
            vec![vec![0], vec![1, 2, 4], vec![3, 6, 5]]
        );
        assert_eq!(
            cyclotomic_cosets(9).unwrap(),
            vec![vec![0], vec![1, 2, 4, 8, 7, 5], vec![3, 6]]
        );
        assert_eq!(
            cyclotomic_cosets(15).unwrap(),
            vec![
                vec![0],
                vec![1, 2, 4, 8],
                vec![3, 6, 12, 9],
                vec![5, 10],
                vec![7, 14, 13, 11]
            ]
        );
    }

    #[test]
    fn cosets_partition_and_close() {
        for l in (3..=101).step_by(2) {
            let cosets = cyclotomic_cosets(l).unwrap();
            let mut all: Vec<usize> = cosets.iter().flatten().copied().collect();
            all.sort();
            assert_eq!(all, (0..l).collect::<Vec<_>>());
            for c in &cosets {
                assert!(c.iter().all(|j| c.contains(&(2 * j % l))));
                assert_eq!(c[0], *c.iter().min().unwrap());
            }
        }
    }

    /// Smallest degree-m polynomial (numeric order) that is irreducible and in
    /// which x has order exactly L, found by exhaustive search.
    fn brute_force_modulus(l: usize) -> BinPoly {
        let m = multiplicative_order_of_two(l).unwrap();
        (1u64 << m..1u64 << (m + 1))
            .map(BinPoly::from_u64)
            .find(|f| {
                f.is_irreducible() && {
                    let x = BinPoly::monomial(1);
                    x.pow_mod(l as u64, f).is_one()
                        && (1..l).all(|i| !x.pow_mod(i as u64, f).is_one())
                }
            })
            .unwrap()
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(FieldContext::new(9).unwrap().modulus(), &BinPoly::from_exponents([0, 3, 6]));
        assert_eq!(FieldContext::new(7).unwrap().modulus(), &BinPoly::from_exponents([0, 1, 3]));
        assert_eq!(FieldContext::new(3).unwrap().modulus(), &BinPoly::from_exponents([0, 1, 2]));
        assert_eq!(FieldContext::new(15).unwrap().modulus(), &BinPoly::from_exponents([0, 1, 4]));
    }

    #[test]
    fn modulus_matches_exhaustive_search() {
        for l in (3..=41).step_by(2) {
            if multiplicative_order_of_two(l).unwrap() > 12 {
                continue;
            }
            assert_eq!(FieldContext::new(l).unwrap().modulus(), &brute_force_modulus(l), "L = {l}");
        }
    }

    #[test]
    fn l7_root_relations() {
        let ctx = FieldContext::new(7).unwrap();
        let s1 = [1, 2, 4].iter().fold(FieldElement::zero(), |acc, &k| {
            ctx.add(&acc, ctx.alpha_pow(k))
        });
        let s2 = [0, 3, 5, 6].iter().fold(FieldElement::zero(), |acc, &k| {
            ctx.add(&acc, ctx.alpha_pow(k))
        });
        assert!(s1.is_zero());
        assert!(s2.is_zero());
    }

    #[test]
    fn context_invariants() {
        for l in (3..=63).step_by(2) {
            let ctx = FieldContext::new(l).unwrap();
            let m = ctx.degree();
            assert_eq!(ctx.coprime().len(), ctx.phi());
            let mut from_cosets: Vec<usize> = ctx.coprime_cosets().flatten().copied().collect();
            from_cosets.sort();
            assert_eq!(from_cosets, ctx.coprime());
            assert_eq!(ctx.coprime_cosets().count(), ctx.phi() / m);
            assert!(ctx.coprime_cosets().all(|c| c.len() == m));
            // alpha has order exactly L
            let a = ctx.alpha();
            assert!(ctx.pow(a, l as u64).is_one());
            assert!((1..l).all(|i| !ctx.pow(a, i as u64).is_one()));
            assert!(ctx.modulus().is_irreducible());
        }
    }

    /// Minimal polynomial of alpha^j: product of (x - alpha^i) over j's coset,
    /// computed with coefficients in the field.
    fn minimal_polynomial(ctx: &FieldContext, coset: &[usize]) -> BinPoly {
        let mut coeffs = vec![FieldElement::one()];
        for &i in coset {
            let root = ctx.alpha_pow(i as i64).clone();
            let mut next = vec![FieldElement::zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = ctx.add(&next[k + 1], c);
                next[k] = ctx.add(&next[k], &ctx.mul(c, &root));
            }
            coeffs = next;
        }
        BinPoly::from_exponents(coeffs.iter().enumerate().filter_map(|(k, c)| {
            assert!(c.is_bit(), "minimal polynomial must have binary coefficients");
            c.is_one().then_some(k)
        }))
    }

    #[test]
    fn coset_minimal_polynomials_factor_cyclotomics() {
        for l in (3..=45).step_by(2) {
            let ctx = FieldContext::new(l).unwrap();
            let mut all = BinPoly::one();
            let mut coprime = BinPoly::one();
            for c in ctx.cosets() {
                let mp = minimal_polynomial(&ctx, c);
                all = &all * &mp;
                if gcd(c[0], l) == 1 {
                    coprime = &coprime * &mp;
                }
            }
            assert_eq!(all, BinPoly::from_exponents([0, l]), "L = {l}");
            assert_eq!(coprime, cyclotomic_polynomial(l), "L = {l}");
        }
    }

    #[test]
    fn field_arithmetic_examples() {
        let ctx = FieldContext::new(9).unwrap();
        assert!(ctx.inv(&FieldElement::one()).unwrap().is_one());
        assert!(ctx.add(ctx.alpha_pow(6), ctx.alpha_pow(3)).is_one());
        for l in [3, 5, 7, 9, 15, 21] {
            let ctx = FieldContext::new(l).unwrap();
            assert!(ctx.mul(ctx.alpha(), ctx.alpha_pow(l as i64 - 1)).is_one());
        }
        assert!(matches!(ctx.inv(&FieldElement::zero()), Err(FieldError::ZeroInverse)));
    }

    #[test]
    fn eval_examples() {
        let ctx = FieldContext::new(9).unwrap();
        assert!(ctx.eval_at_alpha_power(&BinPoly::from_exponents([0, 3]), 3).is_zero());
        assert!(ctx.eval_at_alpha_power(&BinPoly::from_exponents([0, 6]), 3).is_zero());
        let k = BinPoly::from_exponents([0, 2, 5]);
        assert!(ctx.eval_at_alpha_power(&k, 0).is_one());
        assert!(ctx.eval_at_alpha_power(&BinPoly::from_exponents([1, 4]), 0).is_zero());
    }

    #[test]
    fn with_modulus_rejects_wrong_polynomials() {
        // x^4+x^3+x^2+x+1 has roots of order 5, not 15
        assert!(FieldContext::with_modulus(15, BinPoly::from_u64(0b11111)).is_err());
        assert!(FieldContext::with_modulus(15, BinPoly::from_u64(0b11001)).is_ok());
        assert!(FieldContext::with_modulus(7, BinPoly::from_u64(0b1111)).is_err());
    }

    fn ctx_and_poly() -> impl Strategy<Value = (usize, BinPoly, usize)> {
        (prop::sample::select(vec![3usize, 5, 7, 9, 11, 15, 17, 21, 23]))
            .prop_flat_map(|l| {
                (
                    Just(l),
                    prop::collection::vec(0usize..3 * l, 0..8).prop_map(BinPoly::from_exponents),
                    0..l,
                )
            })
    }

    proptest! {
        #[test]
        fn frobenius_has_order_m((l, k, _r) in ctx_and_poly()) {
            let ctx = FieldContext::new(l).unwrap();
            let e = ctx.element(&k);
            prop_assert_eq!(ctx.frobenius(&e, ctx.degree()), e.clone());
            prop_assert_eq!(ctx.frobenius(&e, 1), ctx.mul(&e, &e));
        }

        #[test]
        fn evaluation_commutes_with_frobenius((l, k, r) in ctx_and_poly()) {
            let ctx = FieldContext::new(l).unwrap();
            let lhs = ctx.eval_at_alpha_power(&k, 2 * r % l);
            let rhs = ctx.frobenius(&ctx.eval_at_alpha_power(&k, r), 1);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_round_trip((l, k, _r) in ctx_and_poly()) {
            let ctx = FieldContext::new(l).unwrap();
            let e = ctx.element(&k);
            prop_assume!(!e.is_zero());
            prop_assert!(ctx.mul(&e, &ctx.inv(&e).unwrap()).is_one());
        }
    }
}
