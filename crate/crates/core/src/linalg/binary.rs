use std::fmt;

use crate::error::LinalgError;
use crate::poly::BinPoly;

/// Dense matrix over GF(2); rows are packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BinMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Parses rows written as `'0'`/`'1'` strings; all rows must have equal length.
    pub fn from_bitstrings<S: AsRef<str>>(rows: &[S]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, s) in rows.iter().enumerate() {
            let s = s.as_ref();
            if s.len() != cols {
                return Err(LinalgError::Dimension(format!(
                    "row {r} has {} bits, expected {cols}",
                    s.len()
                )));
            }
            for (c, ch) in s.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    _ => {
                        return Err(LinalgError::Dimension(format!(
                            "row {r} contains non-bit character {ch:?}"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn to_bitstrings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| if self.get(r, c) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        if bit {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// Replaces row `r` with the given packed words (extra high bits must be zero).
    pub fn set_row_words(&mut self, r: usize, words: &[u64]) {
        self.row_words_mut(r).copy_from_slice(words);
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (s, d) = (src * self.stride, dst * self.stride);
        for k in 0..self.stride {
            self.data[d + k] ^= self.data[s + k];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Matrix product. Panics on a dimension mismatch.
    pub fn mul(&self, rhs: &BinMatrix) -> BinMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "product of {}x{} and {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = BinMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let base = r * out.stride;
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut rest = w;
                while rest != 0 {
                    let k = wi * 64 + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    for (o, x) in out.data[base..base + out.stride]
                        .iter_mut()
                        .zip(rhs.row_words(k))
                    {
                        *o ^= x;
                    }
                }
            }
        }
        out
    }

    /// Entrywise sum. Panics on a dimension mismatch.
    pub fn add(&self, rhs: &BinMatrix) -> BinMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, x) in out.data.iter_mut().zip(&rhs.data) {
            *o ^= x;
        }
        out
    }

    pub fn transpose(&self) -> BinMatrix {
        BinMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Copies `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &BinMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> BinMatrix {
        BinMatrix::from_fn(rows, cols, |r, c| self.get(r0 + r, c0 + c))
    }

    /// Column-wise juxtaposition `[A_1 A_2 ...]`.
    pub fn hstack(parts: &[&BinMatrix]) -> BinMatrix {
        let rows = parts.first().map_or(0, |p| p.rows);
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = BinMatrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack of matrices with different heights");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    pub fn vstack(parts: &[&BinMatrix]) -> BinMatrix {
        let cols = parts.first().map_or(0, |p| p.cols);
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = BinMatrix::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack of matrices with different widths");
            for r in 0..p.rows {
                out.set_row_words(r0 + r, p.row_words(r));
            }
            r0 += p.rows;
        }
        out
    }

    pub fn kron(&self, rhs: &BinMatrix) -> BinMatrix {
        let mut out = BinMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set_block(i * rhs.rows, j * rhs.cols, rhs);
                }
            }
        }
        out
    }

    /// Row rank by elimination on a copy.
    pub fn rank(&self) -> usize {
        self.clone().eliminate(None).len()
    }

    /// Reduced row echelon form in place; returns pivot columns. Row operations
    /// are mirrored onto `track` when given.
    fn eliminate(&mut self, mut track: Option<&mut BinMatrix>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(rank, p);
            if let Some(t) = track.as_deref_mut() {
                t.swap_rows(rank, p);
            }
            for r in 0..self.rows {
                if r != rank && self.get(r, col) {
                    self.xor_row_into(rank, r);
                    if let Some(t) = track.as_deref_mut() {
                        t.xor_row_into(rank, r);
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    /// A matrix `X` with `self * X = I`. Requires full row rank.
    pub fn right_inverse(&self) -> Result<BinMatrix, LinalgError> {
        let mut reduced = self.clone();
        let mut ops = BinMatrix::identity(self.rows);
        let pivots = reduced.eliminate(Some(&mut ops));
        if pivots.len() < self.rows {
            return Err(LinalgError::RankDeficient {
                rank: pivots.len(),
                needed: self.rows,
            });
        }
        // ops * self = reduced, and reduced restricted to the pivot columns is I.
        let mut x = BinMatrix::zeros(self.cols, self.rows);
        for (i, &p) in pivots.iter().enumerate() {
            x.set_row_words(p, ops.row_words(i));
        }
        Ok(x)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<BinMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Dimension(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        self.right_inverse()
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        for row in self.to_bitstrings() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// `C_L^j`: row `i` has its single one at column `(i + j) mod L`.
pub fn cyclic_perm_power(l: usize, j: i64) -> BinMatrix {
    let shift = j.rem_euclid(l as i64) as usize;
    BinMatrix::from_fn(l, l, |r, c| c == (r + shift) % l)
}

/// `k(C_L)`, the circulant obtained by substituting the cyclic permutation
/// matrix for `x`.
pub fn circulant_of_poly(k: &BinPoly, l: usize) -> BinMatrix {
    let k = k.reduce_cyclic(l);
    let mut out = BinMatrix::zeros(l, l);
    for e in k.exponents() {
        for r in 0..l {
            let c = (r + e) % l;
            let cur = out.get(r, c);
            out.set(r, c, !cur);
        }
    }
    out
}
