//! Bit-exact data plane: encode with `G_s`, forward `L`-bit units using
//! only circular shifts and XOR, decode with `D_t`.

use rand::Rng;

use crate::circcode::CircularShiftCode;
use crate::error::SimError;
use crate::linalg::BinMatrix;
use crate::netmodel::MulticastNetwork;

/// A row vector of `len` bits packed into 64-bit words, bit `i` of the
/// vector at bit `i % 64` of word `i / 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DataUnit {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl DataUnit {
    pub fn zeros(len: usize) -> Self {
        DataUnit {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut u = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            u.set(i, b);
        }
        u
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut u = DataUnit {
            len,
            words: (0..words_for(len)).map(|_| rng.gen()).collect(),
        };
        u.mask_tail();
        u
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn xor_assign(&mut self, other: &DataUnit) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// `self * C_L^j`: bit `p` of the result is bit `p - j (mod L)` here.
    pub fn rotated(&self, j: usize) -> DataUnit {
        let j = j % self.len.max(1);
        if j == 0 {
            return self.clone();
        }
        let mut out = self.shifted_up(j);
        let wrap = self.shifted_down(self.len - j);
        for (a, b) in out.words.iter_mut().zip(&wrap.words) {
            *a |= b;
        }
        out
    }

    /// Moves bit `i` to `i + s`, dropping bits past the end.
    fn shifted_up(&self, s: usize) -> DataUnit {
        let n = self.words.len();
        let (ws, bs) = (s / 64, s % 64);
        let mut out = vec![0u64; n];
        for i in (ws..n).rev() {
            let src = i - ws;
            let mut v = self.words[src] << bs;
            if bs != 0 && src > 0 {
                v |= self.words[src - 1] >> (64 - bs);
            }
            out[i] = v;
        }
        let mut u = DataUnit { len: self.len, words: out };
        u.mask_tail();
        u
    }

    /// Moves bit `i` to `i - s`, dropping bits below zero.
    fn shifted_down(&self, s: usize) -> DataUnit {
        let n = self.words.len();
        let (ws, bs) = (s / 64, s % 64);
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate().take(n.saturating_sub(ws)) {
            let src = i + ws;
            let mut v = self.words[src] >> bs;
            if bs != 0 && src + 1 < n {
                v |= self.words[src + 1] << (64 - bs);
            }
            *slot = v;
        }
        DataUnit { len: self.len, words: out }
    }

    fn as_row(&self) -> BinMatrix {
        let mut m = BinMatrix::zeros(1, self.len);
        m.set_row_words(0, &self.words);
        m
    }

    fn from_row(m: &BinMatrix, start: usize, len: usize) -> DataUnit {
        let mut u = DataUnit::zeros(len);
        for i in 0..len {
            u.set(i, m.get(0, start + i));
        }
        u
    }
}

impl std::fmt::Debug for DataUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DataUnit({})", self.to_bitstring())
    }
}

/// `omega` source rows of `J` bits each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceMessage {
    rows: Vec<DataUnit>,
}

impl SourceMessage {
    pub fn new(rows: Vec<DataUnit>) -> Result<Self, SimError> {
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(SimError::Dimension("source rows differ in length".into()));
            }
        }
        Ok(SourceMessage { rows })
    }

    pub fn zeros(omega: usize, j: usize) -> Self {
        SourceMessage {
            rows: vec![DataUnit::zeros(j); omega],
        }
    }

    pub fn random<R: Rng + ?Sized>(omega: usize, j: usize, rng: &mut R) -> Self {
        SourceMessage {
            rows: (0..omega).map(|_| DataUnit::random(j, rng)).collect(),
        }
    }

    pub fn rows(&self) -> &[DataUnit] {
        &self.rows
    }

    pub fn omega(&self) -> usize {
        self.rows.len()
    }

    pub fn unit_len(&self) -> usize {
        self.rows.first().map_or(0, DataUnit::len)
    }

    fn concatenated(&self) -> DataUnit {
        let j = self.unit_len();
        let mut out = DataUnit::zeros(j * self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for i in 0..j {
                out.set(r * j + i, row.get(i));
            }
        }
        out
    }
}

/// Shift and XOR tallies. `word_xors` counts 64-bit XOR instructions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub shifts: usize,
    pub unit_xors: usize,
    pub word_xors: usize,
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, o: OpCounts) {
        self.shifts += o.shifts;
        self.unit_xors += o.unit_xors;
        self.word_xors += o.word_xors;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpReport {
    /// `(edge id, counts)` for every non-source edge, by id.
    pub per_edge: Vec<(usize, OpCounts)>,
    pub total: OpCounts,
}

/// Units on every edge plus the operations spent computing them.
#[derive(Clone, Debug)]
pub struct Propagation {
    units: Vec<DataUnit>,
    pub ops: OpCounts,
}

impl Propagation {
    pub fn unit(&self, e: usize) -> &DataUnit {
        &self.units[e - 1]
    }

    pub fn units(&self) -> &[DataUnit] {
        &self.units
    }

    /// Units on `In(t)`, by ascending edge id.
    pub fn received(&self, net: &MulticastNetwork, t: usize) -> Vec<DataUnit> {
        net.in_edges(t).iter().map(|&e| self.unit(e).clone()).collect()
    }
}

/// `[m'_i] G_s`, split into one `L`-bit unit per edge of `Out(s)`.
pub fn encode_source(msg: &SourceMessage, gs: &BinMatrix, l: usize) -> Result<Vec<DataUnit>, SimError> {
    let flat = msg.concatenated();
    if gs.rows() != flat.len() || gs.cols() != msg.omega() * l {
        return Err(SimError::Dimension(format!(
            "message of {} bits against a {}x{} source matrix",
            flat.len(),
            gs.rows(),
            gs.cols()
        )));
    }
    let coded = flat.as_row().mul(gs);
    Ok((0..msg.omega())
        .map(|i| DataUnit::from_row(&coded, i * l, l))
        .collect())
}

fn check_source_units(net: &MulticastNetwork, code: &CircularShiftCode, source: &[DataUnit]) -> Result<(), SimError> {
    if source.len() != net.omega() || source.iter().any(|u| u.len() != code.block_length()) {
        return Err(SimError::Dimension(format!(
            "expected {} source units of {} bits",
            net.omega(),
            code.block_length()
        )));
    }
    Ok(())
}

/// Forwards units in topological order, each kernel applied as one
/// rotation per nonzero term followed by XOR accumulation.
pub fn propagate(
    net: &MulticastNetwork,
    code: &CircularShiftCode,
    source: &[DataUnit],
) -> Result<Propagation, SimError> {
    check_source_units(net, code, source)?;
    let l = code.block_length();
    let mut units = vec![DataUnit::zeros(l); net.num_edges()];
    let mut ops = OpCounts::default();
    for &e in net.edge_order() {
        if let Some(slot) = net.source_slot(e) {
            units[e - 1] = source[slot].clone();
            continue;
        }
        let mut acc: Option<DataUnit> = None;
        for &d in net.in_edges(net.edge(e).tail) {
            let Some(k) = code.kernel_polys().get(&(d, e)) else {
                continue;
            };
            for j in k.exponents() {
                let term = if j == 0 {
                    units[d - 1].clone()
                } else {
                    ops.shifts += 1;
                    units[d - 1].rotated(j)
                };
                match acc.as_mut() {
                    None => acc = Some(term),
                    Some(a) => {
                        a.xor_assign(&term);
                        ops.unit_xors += 1;
                        ops.word_xors += a.words.len();
                    }
                }
            }
        }
        units[e - 1] = acc.unwrap_or_else(|| DataUnit::zeros(l));
    }
    Ok(Propagation { units, ops })
}

/// Reference propagation by dense products `m_d K_{d,e}`.
pub fn propagate_dense(
    net: &MulticastNetwork,
    code: &CircularShiftCode,
    source: &[DataUnit],
) -> Result<Vec<DataUnit>, SimError> {
    check_source_units(net, code, source)?;
    let l = code.block_length();
    let mut rows = vec![BinMatrix::zeros(1, l); net.num_edges()];
    for &e in net.edge_order() {
        if let Some(slot) = net.source_slot(e) {
            rows[e - 1] = source[slot].as_row();
            continue;
        }
        let mut acc = BinMatrix::zeros(1, l);
        for &d in net.in_edges(net.edge(e).tail) {
            if let Some(k) = code.kernel(d, e) {
                acc = acc.add(&rows[d - 1].mul(k));
            }
        }
        rows[e - 1] = acc;
    }
    Ok(rows.iter().map(|r| DataUnit::from_row(r, 0, l)).collect())
}

/// `[m_e]_{In(t)} D_t`, reshaped into `omega` rows of `J` bits.
pub fn decode(received: &[DataUnit], decoder: &BinMatrix, omega: usize) -> Result<SourceMessage, SimError> {
    let l = received.first().map_or(0, DataUnit::len);
    if decoder.rows() != received.len() * l || omega == 0 || !decoder.cols().is_multiple_of(omega) {
        return Err(SimError::Dimension(format!(
            "{} units of {l} bits against a {}x{} decoder",
            received.len(),
            decoder.rows(),
            decoder.cols()
        )));
    }
    let mut flat = DataUnit::zeros(received.len() * l);
    for (k, u) in received.iter().enumerate() {
        for i in 0..l {
            flat.set(k * l + i, u.get(i));
        }
    }
    let out = flat.as_row().mul(decoder);
    let j = decoder.cols() / omega;
    SourceMessage::new((0..omega).map(|i| DataUnit::from_row(&out, i * j, j)).collect())
}

/// Static tally from the kernel polynomials: one rotation per term with a
/// nonzero exponent and one XOR per term beyond the first on each edge.
pub fn shift_op_count(net: &MulticastNetwork, code: &CircularShiftCode) -> OpReport {
    let words = words_for(code.block_length());
    let mut per_edge = Vec::new();
    let mut total = OpCounts::default();
    for edge in net.edges() {
        if edge.tail == net.source() {
            continue;
        }
        let mut terms = 0;
        let mut shifts = 0;
        for &d in net.in_edges(edge.tail) {
            if let Some(k) = code.kernel_polys().get(&(d, edge.id)) {
                terms += k.weight();
                shifts += k.exponents().filter(|&j| j != 0).count();
            }
        }
        let unit_xors = terms.saturating_sub(1);
        let c = OpCounts {
            shifts,
            unit_xors,
            word_xors: unit_xors * words,
        };
        total += c;
        per_edge.push((edge.id, c));
    }
    OpReport { per_edge, total }
}

/// Encode, forward and decode one message; returns the decoded message at
/// each receiver, in receiver order.
pub fn round_trip(
    net: &MulticastNetwork,
    code: &CircularShiftCode,
    msg: &SourceMessage,
) -> Result<(Vec<SourceMessage>, OpCounts), SimError> {
    let gs = code
        .gs()
        .ok_or_else(|| SimError::Dimension("code has no source matrix".into()))?;
    let source = encode_source(msg, gs, code.block_length())?;
    let prop = propagate(net, code, &source)?;
    let mut out = Vec::new();
    for &t in net.receivers() {
        let d = code
            .decoder(t)
            .ok_or_else(|| SimError::Dimension(format!("no decoder for {}", net.node_name(t))))?;
        out.push(decode(&prop.received(net, t), d, net.omega())?);
    }
    Ok((out, prop.ops))
}
