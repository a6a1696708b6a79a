//! Flow-path construction of polynomial kernels of bounded weight that form
//! a scalar solution at every coprime power of the primitive root.

use std::collections::{BTreeMap, HashSet};

use crate::error::BuildError;
use crate::field::{FieldContext, FieldElement};
use crate::linalg::FieldMatrix;
use crate::netmodel::{MulticastNetwork, PathSet};
use crate::poly::BinPoly;
use crate::scalarcode::ScalarCode;

pub const DEFAULT_POOL_CAP: u128 = 1 << 20;

/// All polynomials of degree below `L` with at most `delta` terms.
#[derive(Clone, Debug)]
pub struct CandidatePool {
    delta: usize,
    polys: Vec<BinPoly>,
    classes: BTreeMap<FieldElement, BinPoly>,
}

impl CandidatePool {
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Graded-lex order: by weight, then lexicographically by support.
    pub fn polys(&self) -> &[BinPoly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Number of distinct values at `alpha`, zero included.
    pub fn k_delta(&self) -> usize {
        self.classes.len()
    }

    /// Each value at `alpha` mapped to the first pool member reaching it.
    pub fn classes(&self) -> &BTreeMap<FieldElement, BinPoly> {
        &self.classes
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `sum_{i <= delta} C(L, i)`.
pub fn pool_size(l: usize, delta: usize) -> u128 {
    (0..=delta.min(l)).map(|i| binomial(l, i)).sum()
}

fn check_delta(l: usize, delta: usize) -> Result<(), BuildError> {
    if delta == 0 || delta >= l {
        return Err(BuildError::BadDelta(delta));
    }
    Ok(())
}

pub fn enumerate_pool(
    ctx: &FieldContext,
    delta: usize,
    cap: u128,
) -> Result<CandidatePool, BuildError> {
    let l = ctx.block_length();
    check_delta(l, delta)?;
    let size = pool_size(l, delta);
    if size > cap {
        return Err(BuildError::PoolTooLarge { size, cap });
    }
    let mut polys = Vec::with_capacity(size as usize);
    for w in 0..=delta {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            polys.push(BinPoly::from_exponents(support.iter().copied()));
            // next w-subset of 0..l in lexicographic order
            let Some(i) = (0..w).rev().find(|&i| support[i] < l - w + i) else {
                break;
            };
            support[i] += 1;
            for k in i + 1..w {
                support[k] = support[k - 1] + 1;
            }
        }
    }
    let mut classes = BTreeMap::new();
    for p in &polys {
        classes
            .entry(ctx.eval_at_alpha_power(p, 1))
            .or_insert_with(|| p.clone());
    }
    Ok(CandidatePool {
        delta,
        polys,
        classes,
    })
}

/// `K_delta` without materialising the pool: repeated sumsets of the
/// powers of `alpha`. Falls back on `2^m` once `delta >= m`, since the first
/// `m` powers already form a basis.
pub fn k_delta(ctx: &FieldContext, delta: usize, cap: u128) -> Result<u128, BuildError> {
    let l = ctx.block_length();
    check_delta(l, delta)?;
    let m = ctx.degree();
    if delta >= m {
        return Ok(if m >= 127 { u128::MAX } else { 1u128 << m });
    }
    let size = pool_size(l, delta);
    if size > cap {
        return Err(BuildError::PoolTooLarge { size, cap });
    }
    let powers: Vec<FieldElement> = (0..l).map(|i| ctx.alpha_pow(i as i64).clone()).collect();
    let mut seen: HashSet<FieldElement> = HashSet::from([FieldElement::zero()]);
    let mut frontier = vec![FieldElement::zero()];
    for _ in 0..delta {
        let mut next = Vec::new();
        for a in &frontier {
            for p in &powers {
                let s = ctx.add(a, p);
                if seen.insert(s.clone()) {
                    next.push(s);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.len() as u128)
}

/// Verdict of the sufficient condition `floor(m K / phi) > |T|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub m: usize,
    pub phi: usize,
    pub k_delta: u128,
    pub receivers: usize,
    pub bound: u128,
    pub guaranteed: bool,
}

pub fn feasibility_from(m: usize, phi: usize, k_delta: u128, receivers: usize) -> Feasibility {
    let bound = (m as u128).saturating_mul(k_delta) / phi as u128;
    Feasibility {
        m,
        phi,
        k_delta,
        receivers,
        bound,
        guaranteed: bound > receivers as u128,
    }
}

pub fn feasibility(
    ctx: &FieldContext,
    delta: usize,
    receivers: usize,
) -> Result<Feasibility, BuildError> {
    let k = k_delta(ctx, delta, DEFAULT_POOL_CAP)?;
    Ok(feasibility_from(ctx.degree(), ctx.phi(), k, receivers))
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub delta: usize,
    pub cap: u128,
    /// One path set per receiver; derived by max-flow when absent.
    pub paths: Option<Vec<PathSet>>,
    /// Re-verify the rank and duality invariants after every edge.
    pub check_invariants: bool,
}

impl BuildOptions {
    pub fn new(delta: usize) -> Self {
        BuildOptions {
            delta,
            cap: DEFAULT_POOL_CAP,
            paths: None,
            check_invariants: cfg!(debug_assertions),
        }
    }
}

/// What happened to one input edge during an edge iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputTrace {
    pub input: usize,
    /// Receiver node ids whose paths use `(input, edge)`.
    pub receivers: Vec<usize>,
    pub kernel: BinPoly,
    /// Forbidden sets per representative, when they had to be formed.
    pub forbidden: Option<Vec<Vec<FieldElement>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepTrace {
    pub edge: usize,
    pub inputs: Vec<InputTrace>,
}

/// Working memory of the construction, advanced one edge at a time.
pub struct Builder<'a> {
    net: &'a MulticastNetwork,
    ctx: &'a FieldContext,
    delta: usize,
    check: bool,
    pool: CandidatePool,
    /// Pool indices in the order tried for a second or later input.
    scan: Vec<usize>,
    /// `evals[p][j]`: pool member `p` at `alpha^(r_j)`.
    evals: Vec<Vec<FieldElement>>,
    reps: Vec<usize>,
    paths: Vec<PathSet>,
    next: Vec<BTreeMap<usize, usize>>,
    frontier: Vec<Vec<usize>>,
    /// `w[t][slot][j]`, an omega-vector.
    w: Vec<Vec<Vec<Vec<FieldElement>>>>,
    f_sym: Vec<Vec<BinPoly>>,
    /// `f_val[e][j]`, an omega-vector.
    f_val: Vec<Vec<Vec<FieldElement>>>,
    kernels: BTreeMap<(usize, usize), BinPoly>,
    cursor: usize,
    trace: Vec<StepTrace>,
}

impl<'a> Builder<'a> {
    pub fn new(
        net: &'a MulticastNetwork,
        ctx: &'a FieldContext,
        opts: &BuildOptions,
    ) -> Result<Self, BuildError> {
        let pool = enumerate_pool(ctx, opts.delta, opts.cap)?;
        let reps = ctx.coprime_representatives();
        let evals: Vec<Vec<FieldElement>> = pool
            .polys
            .iter()
            .map(|p| reps.iter().map(|&r| ctx.eval_at_alpha_power(p, r)).collect())
            .collect();
        // Zero never qualifies. The constant 1 is tried last: it is already
        // the kernel of the first input, so shifts are preferred for the rest.
        let mut scan: Vec<usize> = (0..pool.len())
            .filter(|&p| !pool.polys[p].is_zero() && !pool.polys[p].is_one())
            .collect();
        scan.extend((0..pool.len()).filter(|&p| pool.polys[p].is_one()));

        let paths = match &opts.paths {
            Some(given) => {
                for &t in net.receivers() {
                    let n = given.iter().filter(|p| p.receiver == t).count();
                    if n != 1 {
                        return Err(crate::error::NetworkError::BadPathSet {
                            receiver: net.node_name(t).to_string(),
                            why: format!("{n} path sets supplied"),
                        }
                        .into());
                    }
                }
                let mut ordered = Vec::new();
                for &t in net.receivers() {
                    let ps = given.iter().find(|p| p.receiver == t).expect("counted above");
                    ps.check(net)?;
                    ordered.push(ps.clone());
                }
                ordered
            }
            None => net.all_path_sets(),
        };
        let next = paths
            .iter()
            .map(|ps| {
                let mut m = BTreeMap::new();
                for p in &ps.paths {
                    for pair in p.windows(2) {
                        m.insert(pair[0], pair[1]);
                    }
                }
                m
            })
            .collect();

        let omega = net.omega();
        let nr = reps.len();
        let unit = |i: usize| -> Vec<FieldElement> {
            (0..omega).map(|c| ctx.from_bit(c == i)).collect()
        };
        let frontier = vec![net.source_edges().to_vec(); paths.len()];
        let w = vec![(0..omega).map(|i| vec![unit(i); nr]).collect(); paths.len()];
        let mut f_sym = vec![vec![BinPoly::zero(); omega]; net.num_edges()];
        let mut f_val = vec![vec![vec![FieldElement::zero(); omega]; nr]; net.num_edges()];
        for (i, &e) in net.source_edges().iter().enumerate() {
            f_sym[e - 1][i] = BinPoly::one();
            f_val[e - 1] = vec![unit(i); nr];
        }
        Ok(Builder {
            net,
            ctx,
            delta: opts.delta,
            check: opts.check_invariants,
            pool,
            scan,
            evals,
            reps,
            paths,
            next,
            frontier,
            w,
            f_sym,
            f_val,
            kernels: BTreeMap::new(),
            cursor: net.omega(),
            trace: Vec::new(),
        })
    }

    pub fn pool(&self) -> &CandidatePool {
        &self.pool
    }

    /// Coset representatives `r_j` of the coprime set, ascending.
    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    pub fn path_sets(&self) -> &[PathSet] {
        &self.paths
    }

    pub fn trace(&self) -> &[StepTrace] {
        &self.trace
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.net.edge_order().len()
    }

    /// Next edge to be processed.
    pub fn pending_edge(&self) -> Option<usize> {
        self.net.edge_order().get(self.cursor).copied()
    }

    /// Symbolic global kernel of an edge processed so far.
    pub fn global_kernel(&self, e: usize) -> &[BinPoly] {
        &self.f_sym[e - 1]
    }

    fn receiver_pos(&self, t: usize) -> usize {
        self.net
            .receivers()
            .iter()
            .position(|&x| x == t)
            .expect("receiver node id")
    }

    /// Current frontier `I_t` of receiver node `t`, one edge per path.
    pub fn frontier(&self, t: usize) -> &[usize] {
        &self.frontier[self.receiver_pos(t)]
    }

    /// `w_{t,e,j}` for frontier edge `e`, with `j` indexing the
    /// representatives.
    pub fn dual(&self, t: usize, e: usize, j: usize) -> Option<&[FieldElement]> {
        let tp = self.receiver_pos(t);
        let slot = self.frontier[tp].iter().position(|&x| x == e)?;
        Some(&self.w[tp][slot][j])
    }

    fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        a.iter()
            .zip(b)
            .fold(FieldElement::zero(), |acc, (x, y)| self.ctx.add(&acc, &self.ctx.mul(x, y)))
    }

    fn slot(&self, tp: usize, d: usize) -> Result<usize, BuildError> {
        self.frontier[tp]
            .iter()
            .position(|&x| x == d)
            .ok_or_else(|| BuildError::Invariant(format!("e{d} missing from a receiver frontier")))
    }

    /// Processes the next edge in topological order. Returns `None` once
    /// every edge has been handled.
    pub fn step(&mut self) -> Result<Option<StepTrace>, BuildError> {
        let Some(e) = self.pending_edge() else {
            return Ok(None);
        };
        let ctx = self.ctx;
        let nr = self.reps.len();
        let omega = self.net.omega();
        let tail = self.net.edge(e).tail;

        // step 1 and 2: receivers per input, and the inputs that matter
        let mut inputs: Vec<(usize, Vec<usize>)> = Vec::new();
        for &d in self.net.in_edges(tail) {
            let ts: Vec<usize> = (0..self.paths.len())
                .filter(|&tp| self.next[tp].get(&d) == Some(&e))
                .collect();
            if !ts.is_empty() {
                inputs.push((d, ts));
            }
        }

        let mut report = StepTrace {
            edge: e,
            inputs: Vec::new(),
        };
        let mut f_sym = vec![BinPoly::zero(); omega];
        let mut f_val = vec![vec![FieldElement::zero(); omega]; nr];

        // step 3
        for (i, (d, ts)) in inputs.iter().enumerate() {
            let (d, ts) = (*d, ts);
            let receivers = ts.iter().map(|&tp| self.paths[tp].receiver).collect();
            if i == 0 {
                f_sym = self.f_sym[d - 1].clone();
                f_val = self.f_val[d - 1].clone();
                self.kernels.insert((d, e), BinPoly::one());
                report.inputs.push(InputTrace {
                    input: d,
                    receivers,
                    kernel: BinPoly::one(),
                    forbidden: None,
                });
                continue;
            }

            let mut all_nonzero = true;
            for &tp in ts {
                let s = self.slot(tp, d)?;
                for j in 0..nr {
                    if self.dot(&f_val[j], &self.w[tp][s][j]).is_zero() {
                        all_nonzero = false;
                    }
                }
            }
            if all_nonzero {
                report.inputs.push(InputTrace {
                    input: d,
                    receivers,
                    kernel: BinPoly::zero(),
                    forbidden: None,
                });
                continue;
            }

            let fd = &self.f_val[d - 1];
            let mut forbidden: Vec<Vec<FieldElement>> = vec![Vec::new(); nr];
            for (earlier, ets) in &inputs[..i] {
                for &tp in ets {
                    let s = self.slot(tp, *earlier)?;
                    for j in 0..nr {
                        let wv = &self.w[tp][s][j];
                        let den = self.dot(&f_val[j], wv);
                        let num = self.dot(&fd[j], wv);
                        let q = ctx.div(&num, &den).map_err(|_| {
                            BuildError::Invariant(format!(
                                "zero denominator for earlier input e{earlier} at edge e{e}"
                            ))
                        })?;
                        forbidden[j].push(q);
                    }
                }
            }
            for &tp in ts {
                let s = self.slot(tp, d)?;
                for j in 0..nr {
                    let wv = &self.w[tp][s][j];
                    let den = self.dot(&f_val[j], wv);
                    if !den.is_zero() {
                        let num = self.dot(&fd[j], wv);
                        forbidden[j].push(ctx.div(&num, &den).expect("nonzero"));
                    }
                }
            }
            for set in &mut forbidden {
                set.sort();
                set.dedup();
            }

            let pick = self.scan.iter().copied().find(|&p| {
                (0..nr).all(|j| {
                    let v = &self.evals[p][j];
                    !v.is_zero()
                        && !forbidden[j].contains(&ctx.inv(v).expect("nonzero"))
                })
            });
            let Some(p) = pick else {
                return Err(BuildError::SelectionExhausted {
                    edge: e,
                    input: d,
                    forbidden: forbidden
                        .iter()
                        .map(|set| set.iter().map(|x| x.as_poly().to_string()).collect())
                        .collect(),
                });
            };
            let k = self.pool.polys[p].clone();
            for (acc, fdi) in f_sym.iter_mut().zip(&self.f_sym[d - 1]) {
                *acc += &k.mul_cyclic(fdi, ctx.block_length());
            }
            for j in 0..nr {
                let kv = &self.evals[p][j];
                for c in 0..omega {
                    let add = ctx.mul(kv, &fd[j][c]);
                    f_val[j][c] = ctx.add(&f_val[j][c], &add);
                }
            }
            self.kernels.insert((d, e), k.clone());
            report.inputs.push(InputTrace {
                input: d,
                receivers,
                kernel: k,
                forbidden: Some(forbidden),
            });
        }

        // step 4
        for (d, ts) in &inputs {
            for &tp in ts {
                let s = self.slot(tp, *d)?;
                self.frontier[tp][s] = e;
                for j in 0..nr {
                    let c = self.dot(&f_val[j], &self.w[tp][s][j]);
                    let inv = ctx.inv(&c).map_err(|_| {
                        BuildError::Invariant(format!("new edge e{e} orthogonal to its dual vector"))
                    })?;
                    let we: Vec<FieldElement> =
                        self.w[tp][s][j].iter().map(|x| ctx.mul(&inv, x)).collect();
                    for other in 0..omega {
                        if other == s {
                            continue;
                        }
                        let c2 = self.dot(&f_val[j], &self.w[tp][other][j]);
                        if c2.is_zero() {
                            continue;
                        }
                        for (x, y) in self.w[tp][other][j].iter_mut().zip(&we) {
                            *x = ctx.add(x, &ctx.mul(&c2, y));
                        }
                    }
                    self.w[tp][s][j] = we;
                }
            }
        }
        self.f_sym[e - 1] = f_sym;
        self.f_val[e - 1] = f_val;
        self.cursor += 1;
        self.trace.push(report.clone());

        if self.check {
            let violations = self.check_invariants();
            if !violations.is_empty() {
                return Err(BuildError::Invariant(violations.join("; ")));
            }
        }
        Ok(Some(report))
    }

    /// Recomputes the rank and duality invariants from the symbolic global
    /// kernels. Returns one line per violation.
    pub fn check_invariants(&self) -> Vec<String> {
        let ctx = self.ctx;
        let omega = self.net.omega();
        let mut out = Vec::new();
        for (tp, ps) in self.paths.iter().enumerate() {
            let tname = self.net.node_name(ps.receiver);
            for (j, &r) in self.reps.iter().enumerate() {
                let cols: Vec<Vec<FieldElement>> = self.frontier[tp]
                    .iter()
                    .map(|&e| {
                        self.f_sym[e - 1]
                            .iter()
                            .map(|p| ctx.eval_at_alpha_power(p, r))
                            .collect()
                    })
                    .collect();
                let refs: Vec<&[FieldElement]> = cols.iter().map(Vec::as_slice).collect();
                let rank = FieldMatrix::from_columns(omega, &refs).rank(ctx);
                if rank != omega {
                    out.push(format!("{tname}: rank {rank} at r={r}"));
                }
                for (s, col) in cols.iter().enumerate() {
                    for (s2, wv) in self.w[tp].iter().enumerate() {
                        let v = self.dot(col, &wv[j]);
                        let want_one = s == s2;
                        if (want_one && !v.is_one()) || (!want_one && !v.is_zero()) {
                            out.push(format!(
                                "{tname}: f(e{})^T w(e{}) = {v:?} at r={r}",
                                self.frontier[tp][s], self.frontier[tp][s2]
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    /// Runs the remaining edges and returns the finished code.
    pub fn finish(mut self) -> Result<ScalarCode, BuildError> {
        while self.step()?.is_some() {}
        for (tp, ps) in self.paths.iter().enumerate() {
            let mut got = self.frontier[tp].clone();
            got.sort_unstable();
            if got != self.net.in_edges(ps.receiver) {
                return Err(BuildError::Invariant(format!(
                    "frontier of {} ended at {got:?}",
                    self.net.node_name(ps.receiver)
                )));
            }
        }
        ScalarCode::new(
            self.net,
            self.ctx.block_length(),
            Some(self.delta),
            self.kernels,
        )
        .map_err(|e| BuildError::Invariant(e.to_string()))
    }
}

pub fn construct(
    net: &MulticastNetwork,
    ctx: &FieldContext,
    delta: usize,
) -> Result<ScalarCode, BuildError> {
    construct_with(net, ctx, &BuildOptions::new(delta))
}

pub fn construct_with(
    net: &MulticastNetwork,
    ctx: &FieldContext,
    opts: &BuildOptions,
) -> Result<ScalarCode, BuildError> {
    Builder::new(net, ctx, opts)?.finish()
}
