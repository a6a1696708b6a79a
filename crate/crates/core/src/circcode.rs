//! Circular-shift codes induced from polynomial scalar codes, with the
//! source encoding matrix and per-receiver decoders.

use std::collections::BTreeMap;

use crate::error::CodeError;
use crate::field::FieldContext;
use crate::linalg::{circulant_of_poly, BinMatrix, FieldMatrix};
use crate::netmodel::MulticastNetwork;
use crate::poly::BinPoly;
use crate::scalarcode::{ScalarCode, SolutionSet};

/// Vector code over `L`-bit units. Kernels are sums of cyclic permutation
/// matrices, one per nonzero term of the defining polynomial.
#[derive(Clone, Debug)]
pub struct CircularShiftCode {
    l: usize,
    delta: Option<usize>,
    omega: usize,
    polys: BTreeMap<(usize, usize), BinPoly>,
    kernels: BTreeMap<(usize, usize), BinMatrix>,
    global: Vec<BinMatrix>,
    j_set: Vec<usize>,
    g: Option<BinMatrix>,
    gs: Option<BinMatrix>,
    decoders: BTreeMap<usize, BinMatrix>,
}

impl CircularShiftCode {
    /// Replaces `x` by `C_L` in every kernel and derives `F_e` and the
    /// solution set. No source matrix or decoders yet.
    pub fn induce(
        code: &ScalarCode,
        net: &MulticastNetwork,
        ctx: &FieldContext,
    ) -> Result<Self, CodeError> {
        let l = code.block_length();
        let j_set = code.solution_set(net, ctx)?.indices().to_vec();
        let kernels = code
            .kernels()
            .iter()
            .map(|(&k, p)| (k, circulant_of_poly(p, l)))
            .collect();
        let omega = net.omega();
        let global = code
            .symbolic_global_kernels(net)
            .iter()
            .map(|f| {
                let mut m = BinMatrix::zeros(omega * l, l);
                for (i, p) in f.iter().enumerate() {
                    m.set_block(i * l, 0, &circulant_of_poly(p, l));
                }
                m
            })
            .collect();
        Ok(CircularShiftCode {
            l,
            delta: code.delta(),
            omega,
            polys: code.kernels().clone(),
            kernels,
            global,
            j_set,
            g: None,
            gs: None,
            decoders: BTreeMap::new(),
        })
    }

    /// `induce`, then the source matrix and all decoders.
    pub fn build(
        code: &ScalarCode,
        net: &MulticastNetwork,
        ctx: &FieldContext,
    ) -> Result<Self, CodeError> {
        let mut c = Self::induce(code, net, ctx)?;
        c.attach_source_matrix(ctx)?;
        c.attach_decoders(net)?;
        Ok(c)
    }

    /// Computes `G` and `G_s` from the current solution set.
    pub fn attach_source_matrix(&mut self, ctx: &FieldContext) -> Result<(), CodeError> {
        let (g, gs) = source_matrix(&self.j_set, ctx, self.omega)?;
        self.g = Some(g);
        self.gs = Some(gs);
        self.decoders.clear();
        Ok(())
    }

    /// Shrinks the solution set to a doubling-closed subset and recomputes
    /// `G`.
    pub fn restrict_solution_set(&mut self, j_set: &[usize], ctx: &FieldContext) -> Result<(), CodeError> {
        let js = SolutionSet::new(j_set.iter().copied(), self.l)?;
        if let Some(&j) = js.indices().iter().find(|j| !self.j_set.contains(j)) {
            return Err(CodeError::NotASolution(j));
        }
        self.j_set = js.indices().to_vec();
        self.attach_source_matrix(ctx)
    }

    /// Uses a given source matrix instead of the computed one.
    pub fn set_source_matrix(&mut self, j_set: Vec<usize>, g: BinMatrix) {
        self.gs = Some(BinMatrix::identity(self.omega).kron(&g));
        self.g = Some(g);
        self.j_set = j_set;
        self.decoders.clear();
    }

    /// `D_t` as a right inverse of `G_s [F_e]_{In(t)}` for every receiver.
    pub fn attach_decoders(&mut self, net: &MulticastNetwork) -> Result<(), CodeError> {
        let gs = self.require_gs()?;
        let mut out = BTreeMap::new();
        for &t in net.receivers() {
            let m = gs.mul(&self.receiver_matrix(net, t));
            out.insert(t, m.right_inverse()?);
        }
        self.decoders = out;
        Ok(())
    }

    /// Installs a decoder read from elsewhere, replacing any computed one.
    pub fn set_decoder(&mut self, t: usize, d: BinMatrix) {
        self.decoders.insert(t, d);
    }

    fn require_gs(&self) -> Result<&BinMatrix, CodeError> {
        self.gs.as_ref().ok_or(CodeError::EmptySolutionSet)
    }

    pub fn block_length(&self) -> usize {
        self.l
    }

    pub fn delta(&self) -> Option<usize> {
        self.delta
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn kernel_polys(&self) -> &BTreeMap<(usize, usize), BinPoly> {
        &self.polys
    }

    /// `K_{d,e}`; absent pairs are zero.
    pub fn kernel(&self, d: usize, e: usize) -> Option<&BinMatrix> {
        self.kernels.get(&(d, e))
    }

    /// `F_e`, an `omega L x L` matrix.
    pub fn global_kernel(&self, e: usize) -> &BinMatrix {
        &self.global[e - 1]
    }

    pub fn solution_indices(&self) -> &[usize] {
        &self.j_set
    }

    /// `(J, L)`.
    pub fn rate(&self) -> (usize, usize) {
        (self.j_set.len(), self.l)
    }

    pub fn g(&self) -> Option<&BinMatrix> {
        self.g.as_ref()
    }

    pub fn gs(&self) -> Option<&BinMatrix> {
        self.gs.as_ref()
    }

    pub fn decoder(&self, t: usize) -> Option<&BinMatrix> {
        self.decoders.get(&t)
    }

    pub fn decoders(&self) -> &BTreeMap<usize, BinMatrix> {
        &self.decoders
    }

    /// `[F_e]_{e in In(t)}`, columns by ascending edge id.
    pub fn receiver_matrix(&self, net: &MulticastNetwork, t: usize) -> BinMatrix {
        let parts: Vec<&BinMatrix> = net.in_edges(t).iter().map(|&e| self.global_kernel(e)).collect();
        BinMatrix::hstack(&parts)
    }

    /// Propagates `F_e` through the circulant kernels instead of the
    /// symbolic route. Used to cross-check `induce`.
    pub fn propagate_global_kernels(&self, net: &MulticastNetwork) -> Vec<BinMatrix> {
        let (l, omega) = (self.l, self.omega);
        let mut out = vec![BinMatrix::zeros(omega * l, l); net.num_edges()];
        for &e in net.edge_order() {
            if let Some(slot) = net.source_slot(e) {
                out[e - 1].set_block(slot * l, 0, &BinMatrix::identity(l));
                continue;
            }
            let mut acc = BinMatrix::zeros(omega * l, l);
            for &d in net.in_edges(net.edge(e).tail) {
                if let Some(k) = self.kernels.get(&(d, e)) {
                    acc = acc.add(&out[d - 1].mul(k));
                }
            }
            out[e - 1] = acc;
        }
        out
    }

    /// Both sides of the rank relation at receiver `t`: the GF(2) rank of
    /// `[F_e]` and the sum over all `j` of the field rank at `alpha^j`.
    pub fn rank_relation_check(
        &self,
        code: &ScalarCode,
        net: &MulticastNetwork,
        ctx: &FieldContext,
        t: usize,
    ) -> Result<(usize, usize), CodeError> {
        let lhs = self.receiver_matrix(net, t).rank();
        let mut rhs = 0;
        for j in 0..self.l {
            rhs += code.receiver_rank(net, ctx, t, j)?;
        }
        Ok((lhs, rhs))
    }

    /// `rank(G_s [F_e]_{In(t)})` against its target `omega J`.
    pub fn solution_rank_check(&self, net: &MulticastNetwork, t: usize) -> Result<(usize, usize), CodeError> {
        let gs = self.require_gs()?;
        Ok((self.rank_with_source(gs, net, t), self.omega * self.j_set.len()))
    }

    /// `rank(S [F_e]_{In(t)})` for an arbitrary candidate source matrix `S`.
    pub fn rank_with_source(&self, source: &BinMatrix, net: &MulticastNetwork, t: usize) -> usize {
        source.mul(&self.receiver_matrix(net, t)).rank()
    }

    /// Whether `G_s [F_e]_{In(t)} D_t` is the identity.
    pub fn decoder_identity_holds(&self, net: &MulticastNetwork, t: usize) -> bool {
        match (self.gs.as_ref(), self.decoders.get(&t)) {
            (Some(gs), Some(d)) => {
                let m = gs.mul(&self.receiver_matrix(net, t));
                m.cols() == d.rows() && m.mul(d).is_identity()
            }
            _ => false,
        }
    }
}

/// `G = Vt^{-1} I_J V_L^{-1}` and `G_s = I_omega (x) G`, where `I_J` keeps
/// the rows of `j_set` in ascending order and `Vt` is the first `J` columns
/// of `I_J V_L`.
pub fn source_matrix(
    j_set: &[usize],
    ctx: &FieldContext,
    omega: usize,
) -> Result<(BinMatrix, BinMatrix), CodeError> {
    let l = ctx.block_length();
    let js = SolutionSet::new(j_set.iter().copied(), l)?;
    let js = js.indices();
    let n = js.len();
    let vt = FieldMatrix::from_fn(n, n, |r, c| ctx.alpha_pow((js[r] * c) as i64).clone());
    let vt_inv = vt.inverse(ctx)?;
    let sel = FieldMatrix::from_fn(n, l, |r, c| ctx.alpha_pow(-((js[r] * c) as i64)).clone());
    let g = vt_inv.mul(ctx, &sel).to_binary()?;
    let gs = BinMatrix::identity(omega).kron(&g);
    Ok((g, gs))
}

/// Rows `j_set` of the identity, the naive alternative to `G`.
pub fn selection_matrix(j_set: &[usize], l: usize) -> BinMatrix {
    BinMatrix::from_fn(j_set.len(), l, |r, c| j_set[r] == c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1_mixed_code, fig1_monomial_code, two_hop_code, two_hop_network};
    use crate::linalg::{cyclic_perm_power, vandermonde, vandermonde_inverse};
    use crate::networks;
    use crate::field::FieldElement;

    fn bits(rows: &[&str]) -> BinMatrix {
        BinMatrix::from_bitstrings(rows).unwrap()
    }

    #[test]
    fn fig1_circulant_ranks() {
        let net = networks::fig1();
        let ctx = FieldContext::new(9).unwrap();
        let t = net.receivers()[0];
        let i9 = BinMatrix::identity(9);
        let c = |j| cyclic_perm_power(9, j);

        let cc = CircularShiftCode::induce(&fig1_mixed_code(&net), &net, &ctx).unwrap();
        let mut want = BinMatrix::zeros(18, 18);
        want.set_block(0, 0, &i9);
        want.set_block(0, 9, &i9.add(&c(6)));
        want.set_block(9, 9, &i9.add(&c(3)).mul(&i9.add(&c(6))));
        assert_eq!(cc.receiver_matrix(&net, t), want);
        assert_eq!(cc.rank_relation_check(&fig1_mixed_code(&net), &net, &ctx, t).unwrap(), (15, 15));
        assert_eq!(cc.solution_indices(), &[1, 2, 4, 5, 7, 8]);

        let code = fig1_monomial_code(&net);
        let cc = CircularShiftCode::induce(&code, &net, &ctx).unwrap();
        let mut want = BinMatrix::zeros(18, 18);
        want.set_block(0, 0, &i9);
        want.set_block(0, 9, &c(3));
        want.set_block(9, 9, &i9);
        assert_eq!(cc.receiver_matrix(&net, t), want);
        assert_eq!(cc.rank_relation_check(&code, &net, &ctx, t).unwrap(), (18, 18));
    }

    #[test]
    fn propagation_routes_agree() {
        let net = networks::fig1();
        let ctx = FieldContext::new(9).unwrap();
        let cc = CircularShiftCode::induce(&fig1_mixed_code(&net), &net, &ctx).unwrap();
        let via_kernels = cc.propagate_global_kernels(&net);
        for e in 1..=net.num_edges() {
            assert_eq!(&via_kernels[e - 1], cc.global_kernel(e));
        }
    }

    #[test]
    fn two_hop_source_matrix() {
        let ctx = FieldContext::new(7).unwrap();
        let (g, gs) = source_matrix(&[1, 2, 4], &ctx, 2).unwrap();
        assert_eq!(g, bits(&["1110100", "0011101", "0111010"]));
        assert_eq!((gs.rows(), gs.cols()), (6, 14));

        let net = two_hop_network();
        let code = two_hop_code(&net);
        let mut cc = CircularShiftCode::build(&code, &net, &ctx).unwrap();
        let t = net.receivers()[0];
        assert_eq!(cc.solution_rank_check(&net, t).unwrap(), (6, 6));
        let naive = BinMatrix::identity(2).kron(&selection_matrix(&[1, 2, 4], 7));
        assert_eq!(cc.rank_with_source(&naive, &net, t), 5);
        assert!(cc.decoder_identity_holds(&net, t));

        cc.set_source_matrix(vec![1, 2, 4], selection_matrix(&[1, 2, 4], 7));
        assert!(cc.attach_decoders(&net).is_err());
    }

    #[test]
    fn l15_source_matrix() {
        let ctx = FieldContext::new(15).unwrap();
        let (g, _) = source_matrix(&[1, 2, 4, 8], &ctx, 1).unwrap();
        assert_eq!(
            g,
            bits(&[
                "111101011001000",
                "000111101011001",
                "001111010110010",
                "011110101100100",
            ])
        );
    }

    #[test]
    fn source_matrix_rejects_bad_sets() {
        let ctx = FieldContext::new(7).unwrap();
        assert!(matches!(source_matrix(&[1, 2], &ctx, 1), Err(CodeError::NotDoublingClosed(2))));
        assert!(matches!(source_matrix(&[], &ctx, 1), Err(CodeError::EmptySolutionSet)));
    }

    #[test]
    fn zero_coset_gives_all_ones_row() {
        for l in [3usize, 7, 9, 15] {
            let ctx = FieldContext::new(l).unwrap();
            let (g, _) = source_matrix(&[0], &ctx, 1).unwrap();
            assert_eq!(g.rows(), 1);
            assert_eq!(g.row_weight(0), l);
            // G picks out the j = 0 column of V_L and kills the others
            let v = vandermonde(&ctx);
            let gf = FieldMatrix::from_binary(&g).mul(&ctx, &v);
            for j in 0..l {
                assert_eq!(gf.get(0, j).is_one(), j == 0);
                assert!(j == 0 || gf.get(0, j).is_zero());
            }
        }
    }

    /// Every union of cosets for odd L up to 15.
    fn coset_unions(ctx: &FieldContext) -> Vec<Vec<usize>> {
        let cosets = ctx.cosets();
        (1u32..1 << cosets.len())
            .map(|mask| {
                let mut js: Vec<usize> = (0..cosets.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| cosets[i].iter().copied())
                    .collect();
                js.sort_unstable();
                js
            })
            .collect()
    }

    #[test]
    fn bit_valued_for_every_coset_union() {
        for l in (3..=15).step_by(2) {
            let ctx = FieldContext::new(l).unwrap();
            for js in coset_unions(&ctx) {
                let (g, _) = source_matrix(&js, &ctx, 1).unwrap();
                // G V_L vanishes off j_set and equals Vt^{-1} on it
                let gv = FieldMatrix::from_binary(&g).mul(&ctx, &vandermonde(&ctx));
                let n = js.len();
                for r in 0..n {
                    for c in (0..l).filter(|c| !js.contains(c)) {
                        assert!(gv.get(r, c).is_zero(), "L={l} J={js:?}");
                    }
                }
                let on = FieldMatrix::from_fn(n, n, |r, c| gv.get(r, js[c]).clone());
                let vt = FieldMatrix::from_fn(n, n, |r, c| ctx.alpha_pow((js[r] * c) as i64).clone());
                assert_eq!(on.mul(&ctx, &vt), FieldMatrix::identity(n));
            }
        }
    }

    /// The proof route: `Vt^{-1} = (I + U2)^{-1} U1` with `U2` over GF(2).
    #[test]
    fn projection_route_agrees() {
        for l in [7usize, 9, 15] {
            let ctx = FieldContext::new(l).unwrap();
            let v = vandermonde(&ctx);
            let vi = vandermonde_inverse(&ctx);
            for js in coset_unions(&ctx) {
                let n = js.len();
                let comp: Vec<usize> = (0..l).filter(|j| !js.contains(j)).collect();
                let u1 = FieldMatrix::from_fn(n, n, |r, c| vi.get(r, js[c]).clone());
                let mut proj = FieldMatrix::zeros(l, l);
                for a in 0..l {
                    for b in 0..l {
                        let mut acc = FieldElement::zero();
                        for &j in &comp {
                            acc = ctx.add(&acc, &ctx.mul(vi.get(a, j), v.get(j, b)));
                        }
                        proj.set(a, b, acc);
                    }
                }
                assert!(proj.to_binary().is_ok());
                let u2 = FieldMatrix::from_fn(n, n, |r, c| proj.get(r, c).clone());
                let u2b = u2.to_binary().expect("U2 is over GF(2)");
                let lhs = BinMatrix::identity(n).add(&u2b).inverse().unwrap();
                let vt_inv = FieldMatrix::from_binary(&lhs).mul(&ctx, &u1);
                let sel = FieldMatrix::from_fn(n, l, |r, c| vi.get(js[r], c).clone());
                let g_alt = vt_inv.mul(&ctx, &sel).to_binary().unwrap();
                let (g, _) = source_matrix(&js, &ctx, 1).unwrap();
                assert_eq!(g, g_alt, "L={l} J={js:?}");
            }
        }
    }

    #[test]
    fn identity_code_has_full_rank() {
        let net = networks::fig1();
        let ctx = FieldContext::new(7).unwrap();
        let code = ScalarCode::from_terms(&net, 7, Some(1), &[(1, 3, &[0]), (2, 4, &[0]), (3, 5, &[0]), (4, 6, &[0])])
            .unwrap();
        let cc = CircularShiftCode::build(&code, &net, &ctx).unwrap();
        let t = net.receivers()[0];
        assert_eq!(cc.receiver_matrix(&net, t), BinMatrix::identity(14));
        assert_eq!(cc.rank_relation_check(&code, &net, &ctx, t).unwrap(), (14, 14));
        assert_eq!(cc.solution_rank_check(&net, t).unwrap(), (14, 14));
        assert!(cc.decoder_identity_holds(&net, t));
        assert_eq!(cc.rate(), (7, 7));
    }

    #[test]
    fn restriction_to_coprime_indices() {
        let net = networks::fig1();
        let ctx = FieldContext::new(7).unwrap();
        let code = ScalarCode::from_terms(&net, 7, Some(1), &[(1, 3, &[0]), (2, 4, &[0]), (3, 5, &[0]), (4, 6, &[0])])
            .unwrap();
        let mut cc = CircularShiftCode::build(&code, &net, &ctx).unwrap();
        cc.restrict_solution_set(ctx.coprime(), &ctx).unwrap();
        cc.attach_decoders(&net).unwrap();
        let t = net.receivers()[0];
        assert_eq!(cc.rate(), (6, 7));
        assert!(cc.decoder_identity_holds(&net, t));
        assert_eq!(cc.restrict_solution_set(&[1, 2], &ctx), Err(CodeError::NotDoublingClosed(2)));
    }

    #[test]
    fn reference_matrices_pin_the_modulus() {
        let other = FieldContext::with_modulus(7, BinPoly::from_exponents([0, 2, 3])).unwrap();
        let (g, _) = source_matrix(&[1, 2, 4], &other, 1).unwrap();
        assert_ne!(g, bits(&["1110100", "0011101", "0111010"]));
        let other = FieldContext::with_modulus(15, BinPoly::from_exponents([0, 3, 4])).unwrap();
        let (g, _) = source_matrix(&[1, 2, 4, 8], &other, 1).unwrap();
        assert_ne!(g.to_bitstrings()[0], "111101011001000");
    }
}
