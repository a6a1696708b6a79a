//! Scalar codes whose local kernels are GF(2) polynomials evaluated at
//! powers of the primitive root.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::CodeError;
use crate::field::{FieldContext, FieldElement};
use crate::linalg::FieldMatrix;
use crate::netmodel::MulticastNetwork;
use crate::poly::BinPoly;

/// Local kernels `k_{d,e}(x)` keyed by adjacent pair. Missing pairs are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarCode {
    l: usize,
    delta: Option<usize>,
    kernels: BTreeMap<(usize, usize), BinPoly>,
}

/// `f_e(alpha^j)` for every edge, indexed by edge id minus one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalKernelTable {
    pub j: usize,
    vectors: Vec<Vec<FieldElement>>,
}

/// Indices `j` at which the evaluated code is a linear solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    indices: Vec<usize>,
}

impl ScalarCode {
    /// Validates each kernel against the network: the pair must be adjacent,
    /// the degree below `l`, and the weight at most `delta` when declared.
    pub fn new(
        net: &MulticastNetwork,
        l: usize,
        delta: Option<usize>,
        kernels: BTreeMap<(usize, usize), BinPoly>,
    ) -> Result<Self, CodeError> {
        let mut kept = BTreeMap::new();
        for ((d, e), k) in kernels {
            if !net.is_adjacent(d, e) {
                return Err(CodeError::NotAdjacent { d, e });
            }
            if let Some(deg) = k.degree() {
                if deg >= l {
                    return Err(CodeError::DegreeTooLarge { d, e, degree: deg });
                }
            }
            if let Some(delta) = delta {
                if k.weight() > delta {
                    return Err(CodeError::WeightAboveDelta {
                        d,
                        e,
                        weight: k.weight(),
                        delta,
                    });
                }
            }
            if !k.is_zero() {
                kept.insert((d, e), k);
            }
        }
        Ok(ScalarCode {
            l,
            delta,
            kernels: kept,
        })
    }

    /// Builds a code from `(d, e, exponents)` triples.
    pub fn from_terms(
        net: &MulticastNetwork,
        l: usize,
        delta: Option<usize>,
        terms: &[(usize, usize, &[usize])],
    ) -> Result<Self, CodeError> {
        let kernels = terms
            .iter()
            .map(|&(d, e, exps)| ((d, e), BinPoly::from_exponents(exps.iter().copied())))
            .collect();
        Self::new(net, l, delta, kernels)
    }

    pub fn block_length(&self) -> usize {
        self.l
    }

    pub fn delta(&self) -> Option<usize> {
        self.delta
    }

    /// Nonzero kernels, ordered by `(d, e)`.
    pub fn kernels(&self) -> &BTreeMap<(usize, usize), BinPoly> {
        &self.kernels
    }

    pub fn kernel(&self, d: usize, e: usize) -> BinPoly {
        self.kernels.get(&(d, e)).cloned().unwrap_or_default()
    }

    /// Largest kernel weight, the smallest degree bound the code meets.
    pub fn max_weight(&self) -> usize {
        self.kernels.values().map(BinPoly::weight).max().unwrap_or(0)
    }

    fn check_context(&self, ctx: &FieldContext) -> Result<(), CodeError> {
        if ctx.block_length() != self.l {
            return Err(CodeError::BlockLength {
                code: self.l,
                context: ctx.block_length(),
            });
        }
        Ok(())
    }

    /// Evaluates every kernel at `alpha^j` first, then propagates the
    /// resulting scalars in topological order.
    pub fn global_kernels(
        &self,
        net: &MulticastNetwork,
        ctx: &FieldContext,
        j: usize,
    ) -> Result<GlobalKernelTable, CodeError> {
        self.check_context(ctx)?;
        if j >= self.l {
            return Err(CodeError::IndexOutOfRange(j));
        }
        let omega = net.omega();
        let mut vectors = vec![vec![FieldElement::zero(); omega]; net.num_edges()];
        for &e in net.edge_order() {
            if let Some(slot) = net.source_slot(e) {
                vectors[e - 1][slot] = FieldElement::one();
                continue;
            }
            let tail = net.edge(e).tail;
            let mut acc = vec![FieldElement::zero(); omega];
            for &d in net.in_edges(tail) {
                let Some(k) = self.kernels.get(&(d, e)) else {
                    continue;
                };
                let kv = ctx.eval_at_alpha_power(k, j);
                if kv.is_zero() {
                    continue;
                }
                for (a, fd) in acc.iter_mut().zip(&vectors[d - 1]) {
                    *a = ctx.add(a, &ctx.mul(&kv, fd));
                }
            }
            vectors[e - 1] = acc;
        }
        Ok(GlobalKernelTable { j, vectors })
    }

    /// Global kernels as polynomial vectors modulo `x^L + 1`.
    pub fn symbolic_global_kernels(&self, net: &MulticastNetwork) -> Vec<Vec<BinPoly>> {
        let omega = net.omega();
        let mut out = vec![vec![BinPoly::zero(); omega]; net.num_edges()];
        for &e in net.edge_order() {
            if let Some(slot) = net.source_slot(e) {
                out[e - 1][slot] = BinPoly::one();
                continue;
            }
            let mut acc = vec![BinPoly::zero(); omega];
            for &d in net.in_edges(net.edge(e).tail) {
                let Some(k) = self.kernels.get(&(d, e)) else {
                    continue;
                };
                for (a, fd) in acc.iter_mut().zip(&out[d - 1]) {
                    *a += &k.mul_cyclic(fd, self.l);
                }
            }
            out[e - 1] = acc;
        }
        out
    }

    /// Rank of `[f_e(alpha^j)]` over `In(t)` at receiver node `t`.
    pub fn receiver_rank(
        &self,
        net: &MulticastNetwork,
        ctx: &FieldContext,
        t: usize,
        j: usize,
    ) -> Result<usize, CodeError> {
        Ok(self
            .global_kernels(net, ctx, j)?
            .receiver_matrix(net, t)
            .rank(ctx))
    }

    pub fn is_solution_at(
        &self,
        net: &MulticastNetwork,
        ctx: &FieldContext,
        j: usize,
    ) -> Result<bool, CodeError> {
        let table = self.global_kernels(net, ctx, j)?;
        Ok(net
            .receivers()
            .iter()
            .all(|&t| table.receiver_matrix(net, t).rank(ctx) == net.omega()))
    }

    /// Tests one representative per coset and takes the whole coset when it
    /// passes.
    pub fn solution_set(
        &self,
        net: &MulticastNetwork,
        ctx: &FieldContext,
    ) -> Result<SolutionSet, CodeError> {
        let mut indices = Vec::new();
        for coset in ctx.cosets() {
            if self.is_solution_at(net, ctx, coset[0])? {
                indices.extend_from_slice(coset);
            }
        }
        indices.sort_unstable();
        Ok(SolutionSet { indices })
    }

    /// Checks `det[f_e(alpha^(r 2^l))] = det[f_e(alpha^r)]^(2^l)` at every
    /// receiver.
    pub fn frobenius_shift(
        &self,
        net: &MulticastNetwork,
        ctx: &FieldContext,
        r: usize,
        l: usize,
    ) -> Result<bool, CodeError> {
        let shifted = (r * pow2_mod(l, self.l)) % self.l;
        let base = self.global_kernels(net, ctx, r % self.l)?;
        let image = self.global_kernels(net, ctx, shifted)?;
        Ok(net.receivers().iter().all(|&t| {
            let lhs = image.receiver_matrix(net, t).determinant(ctx);
            let rhs = ctx.frobenius(&base.receiver_matrix(net, t).determinant(ctx), l);
            lhs == rhs
        }))
    }
}

fn pow2_mod(l: usize, modulus: usize) -> usize {
    let mut out = 1 % modulus;
    for _ in 0..l {
        out = out * 2 % modulus;
    }
    out
}

impl GlobalKernelTable {
    /// `f_e(alpha^j)` for edge id `e`.
    pub fn get(&self, e: usize) -> &[FieldElement] {
        &self.vectors[e - 1]
    }

    /// `omega x omega` matrix whose columns are `f_e` for `e` in `In(t)`,
    /// by ascending edge id.
    pub fn receiver_matrix(&self, net: &MulticastNetwork, t: usize) -> FieldMatrix {
        let cols: Vec<&[FieldElement]> = net.in_edges(t).iter().map(|&e| self.get(e)).collect();
        FieldMatrix::from_columns(net.omega(), &cols)
    }
}

impl SolutionSet {
    /// Validates a hand-written index set: nonempty, in range and closed
    /// under doubling modulo `l`.
    pub fn new(indices: impl IntoIterator<Item = usize>, l: usize) -> Result<Self, CodeError> {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        if set.is_empty() {
            return Err(CodeError::EmptySolutionSet);
        }
        for &j in &set {
            if j >= l {
                return Err(CodeError::IndexOutOfRange(j));
            }
            if !set.contains(&(2 * j % l)) {
                return Err(CodeError::NotDoublingClosed(j));
            }
        }
        Ok(SolutionSet {
            indices: set.into_iter().collect(),
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1_mixed_code, fig1_monomial_code, two_hop_code, two_hop_network};
    use crate::networks;
    use proptest::prelude::*;

    fn fe(ctx: &FieldContext, exps: &[i64]) -> FieldElement {
        exps.iter()
            .fold(FieldElement::zero(), |acc, &k| ctx.add(&acc, ctx.alpha_pow(k)))
    }

    #[test]
    fn fig1_receiver_matrices() {
        let net = networks::fig1();
        let ctx = FieldContext::new(9).unwrap();
        let code = fig1_mixed_code(&net);
        let t = net.receivers()[0];

        let at1 = code.global_kernels(&net, &ctx, 1).unwrap().receiver_matrix(&net, t);
        let want = FieldMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => FieldElement::one(),
            (0, 1) => fe(&ctx, &[0, 6]),
            (1, 0) => FieldElement::zero(),
            _ => FieldElement::one(),
        });
        assert_eq!(at1, want);

        let at3 = code.global_kernels(&net, &ctx, 3).unwrap().receiver_matrix(&net, t);
        let want3 = FieldMatrix::from_fn(2, 2, |r, c| ctx.from_bit(r == 0 && c == 0));
        assert_eq!(at3, want3);

        assert!(code.is_solution_at(&net, &ctx, 1).unwrap());
        assert!(!code.is_solution_at(&net, &ctx, 3).unwrap());
    }

    #[test]
    fn fig1_solution_sets() {
        let net = networks::fig1();
        let ctx = FieldContext::new(9).unwrap();
        assert_eq!(
            fig1_mixed_code(&net).solution_set(&net, &ctx).unwrap().indices(),
            &[1, 2, 4, 5, 7, 8]
        );
        let re = fig1_monomial_code(&net);
        assert!(re.is_solution_at(&net, &ctx, 0).unwrap());
        assert_eq!(re.solution_set(&net, &ctx).unwrap().indices(), &(0..9).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn two_hop_solution_set() {
        let net = two_hop_network();
        let ctx = FieldContext::new(7).unwrap();
        let code = two_hop_code(&net);
        let sol = code.solution_set(&net, &ctx).unwrap();
        assert_eq!(sol.indices(), &[1, 2, 4]);
        assert!(code.frobenius_shift(&net, &ctx, 1, 1).unwrap());
        for l in 0..4 {
            assert!(code.frobenius_shift(&net, &ctx, 0, l).unwrap());
        }
    }

    #[test]
    fn zero_code_solves_nothing() {
        let net = networks::butterfly();
        let ctx = FieldContext::new(7).unwrap();
        let code = ScalarCode::new(&net, 7, Some(1), BTreeMap::new()).unwrap();
        assert!(code.solution_set(&net, &ctx).unwrap().is_empty());
    }

    #[test]
    fn identity_code_yields_unit_vectors() {
        let net = networks::fig1();
        let ctx = FieldContext::new(5).unwrap();
        let code =
            ScalarCode::from_terms(&net, 5, Some(1), &[(1, 3, &[0]), (2, 4, &[0]), (3, 5, &[0]), (4, 6, &[0])])
                .unwrap();
        let t = net.receivers()[0];
        for j in 0..5 {
            let m = code.global_kernels(&net, &ctx, j).unwrap().receiver_matrix(&net, t);
            assert_eq!(m, FieldMatrix::identity(2));
        }
    }

    #[test]
    fn construction_rejects_bad_kernels() {
        let net = networks::fig1();
        assert_eq!(
            ScalarCode::from_terms(&net, 9, None, &[(1, 5, &[0])]).unwrap_err(),
            CodeError::NotAdjacent { d: 1, e: 5 }
        );
        assert!(matches!(
            ScalarCode::from_terms(&net, 9, Some(1), &[(2, 4, &[0, 3])]),
            Err(CodeError::WeightAboveDelta { weight: 2, delta: 1, .. })
        ));
        assert!(matches!(
            ScalarCode::from_terms(&net, 9, None, &[(2, 4, &[9])]),
            Err(CodeError::DegreeTooLarge { degree: 9, .. })
        ));
        let code = fig1_mixed_code(&net);
        let ctx = FieldContext::new(7).unwrap();
        assert!(matches!(
            code.global_kernels(&net, &ctx, 1),
            Err(CodeError::BlockLength { code: 9, context: 7 })
        ));
    }

    #[test]
    fn solution_set_validation() {
        assert!(SolutionSet::new([1, 2, 4], 7).is_ok());
        assert_eq!(SolutionSet::new([1, 2], 7), Err(CodeError::NotDoublingClosed(2)));
        assert_eq!(SolutionSet::new([], 7), Err(CodeError::EmptySolutionSet));
        assert_eq!(SolutionSet::new([7], 7), Err(CodeError::IndexOutOfRange(7)));
    }

    fn random_butterfly_code(l: usize, seed: &[u64]) -> (MulticastNetwork, ScalarCode) {
        let net = networks::butterfly();
        let pairs = net.adjacent_pairs();
        let kernels = pairs
            .iter()
            .zip(seed.iter().cycle())
            .map(|(&p, &s)| (p, BinPoly::from_u64(s & ((1 << l) - 1))))
            .collect();
        let code = ScalarCode::new(&net, l, None, kernels).unwrap();
        (net, code)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn evaluation_routes_agree(l in prop::sample::select(vec![3usize, 5, 7, 9, 15]),
                                   seed in prop::collection::vec(any::<u64>(), 6)) {
            let (net, code) = random_butterfly_code(l, &seed);
            let ctx = FieldContext::new(l).unwrap();
            let symbolic = code.symbolic_global_kernels(&net);
            for j in 0..l {
                let table = code.global_kernels(&net, &ctx, j).unwrap();
                for e in 1..=net.num_edges() {
                    let via_poly: Vec<_> = symbolic[e - 1]
                        .iter()
                        .map(|p| ctx.eval_at_alpha_power(p, j))
                        .collect();
                    prop_assert_eq!(table.get(e), &via_poly[..]);
                }
            }
        }

        #[test]
        fn solution_sets_are_doubling_closed(l in prop::sample::select(vec![5usize, 7, 9, 15]),
                                             seed in prop::collection::vec(any::<u64>(), 6)) {
            let (net, code) = random_butterfly_code(l, &seed);
            let ctx = FieldContext::new(l).unwrap();
            let sol = code.solution_set(&net, &ctx).unwrap();
            for &j in sol.indices() {
                prop_assert!(sol.contains(2 * j % l));
            }
            // exhaustive agreement with the representative shortcut
            for j in 0..l {
                prop_assert_eq!(sol.contains(j), code.is_solution_at(&net, &ctx, j).unwrap());
            }
        }

        #[test]
        fn frobenius_shift_holds(l in prop::sample::select(vec![7usize, 9, 15]),
                                 seed in prop::collection::vec(any::<u64>(), 6),
                                 r in 0usize..15, k in 0usize..6) {
            let (net, code) = random_butterfly_code(l, &seed);
            let ctx = FieldContext::new(l).unwrap();
            prop_assert!(code.frobenius_shift(&net, &ctx, r % l, k).unwrap());
        }
    }
}
