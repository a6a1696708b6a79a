use crate::error::LinalgError;
use crate::field::{FieldContext, FieldElement};
use crate::linalg::BinMatrix;

/// Dense matrix over GF(2^m). Arithmetic takes the owning [`FieldContext`]
/// explicitly; all entries must come from that context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![FieldElement::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                FieldElement::one()
            } else {
                FieldElement::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        FieldMatrix { rows, cols, data }
    }

    /// Builds a matrix whose column `c` is `columns[c]`.
    pub fn from_columns(rows: usize, columns: &[&[FieldElement]]) -> Self {
        Self::from_fn(rows, columns.len(), |r, c| columns[c][r].clone())
    }

    pub fn from_binary(m: &BinMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |r, c| {
            if m.get(r, c) {
                FieldElement::one()
            } else {
                FieldElement::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn map(&self, mut f: impl FnMut(&FieldElement) -> FieldElement) -> Self {
        FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |r, c| self.get(rows[r], c).clone())
    }

    pub fn leading_columns(&self, n: usize) -> Self {
        Self::from_fn(self.rows, n, |r, c| self.get(r, c).clone())
    }

    pub fn mul(&self, ctx: &FieldContext, rhs: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = FieldMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.data[idx] = ctx.add(&out.data[idx], &ctx.mul(a, b));
                    }
                }
            }
        }
        out
    }

    /// Downcasts to GF(2), failing on the first entry outside `{0, 1}`.
    pub fn to_binary(&self) -> Result<BinMatrix, LinalgError> {
        let mut out = BinMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if !v.is_bit() {
                    return Err(LinalgError::NotBinary { row: r, col: c });
                }
                out.set(r, c, v.is_one());
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan elimination with first-nonzero pivoting. Returns pivot
    /// columns and the product of pivots (the determinant up to row swaps,
    /// which do not change sign in characteristic 2).
    fn eliminate(&mut self, ctx: &FieldContext, mut track: Option<&mut FieldMatrix>) -> (Vec<usize>, FieldElement) {
        let mut pivots = Vec::new();
        let mut det = FieldElement::one();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(rank, p);
            if let Some(t) = track.as_deref_mut() {
                t.swap_rows(rank, p);
            }
            let piv = self.get(rank, col).clone();
            det = ctx.mul(&det, &piv);
            let inv = ctx.inv(&piv).expect("pivot is nonzero");
            self.scale_row(ctx, rank, &inv);
            if let Some(t) = track.as_deref_mut() {
                t.scale_row(ctx, rank, &inv);
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                self.add_scaled_row(ctx, rank, r, &factor);
                if let Some(t) = track.as_deref_mut() {
                    t.add_scaled_row(ctx, rank, r, &factor);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        (pivots, det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, ctx: &FieldContext, r: usize, s: &FieldElement) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            self.data[idx] = ctx.mul(&self.data[idx], s);
        }
    }

    fn add_scaled_row(&mut self, ctx: &FieldContext, src: usize, dst: usize, s: &FieldElement) {
        for c in 0..self.cols {
            let v = ctx.mul(self.get(src, c), s);
            let idx = dst * self.cols + c;
            self.data[idx] = ctx.add(&self.data[idx], &v);
        }
    }

    pub fn rank(&self, ctx: &FieldContext) -> usize {
        self.clone().eliminate(ctx, None).0.len()
    }

    pub fn determinant(&self, ctx: &FieldContext) -> FieldElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let (pivots, det) = self.clone().eliminate(ctx, None);
        if pivots.len() < self.rows {
            FieldElement::zero()
        } else {
            det
        }
    }

    pub fn inverse(&self, ctx: &FieldContext) -> Result<FieldMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Dimension(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut ops = FieldMatrix::identity(self.rows);
        let (pivots, _) = self.clone().eliminate(ctx, Some(&mut ops));
        if pivots.len() < self.rows {
            return Err(LinalgError::RankDeficient {
                rank: pivots.len(),
                needed: self.rows,
            });
        }
        Ok(ops)
    }
}

/// `V_L`, entry `(i, j)` equal to `alpha^(i j)`.
pub fn vandermonde(ctx: &FieldContext) -> FieldMatrix {
    let l = ctx.block_length();
    FieldMatrix::from_fn(l, l, |i, j| ctx.alpha_pow((i * j) as i64).clone())
}

/// `V_L^{-1}` in closed form, entry `(i, j)` equal to `alpha^(-i j)`.
pub fn vandermonde_inverse(ctx: &FieldContext) -> FieldMatrix {
    let l = ctx.block_length();
    FieldMatrix::from_fn(l, l, |i, j| ctx.alpha_pow(-((i * j) as i64)).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cyclic_perm_power;

    #[test]
    fn vandermonde_pair_is_inverse() {
        for l in [3, 5, 7, 9, 15] {
            let ctx = FieldContext::new(l).unwrap();
            let v = vandermonde(&ctx);
            assert!((0..l).all(|c| v.get(0, c).is_one()));
            let prod = v.mul(&ctx, &vandermonde_inverse(&ctx));
            assert_eq!(prod, FieldMatrix::identity(l));
            assert_eq!(v.inverse(&ctx).unwrap(), vandermonde_inverse(&ctx));
        }
    }

    /// `C_L^j = V_L Lambda^j V_L^{-1}` with `Lambda` diagonal in `alpha^i`.
    #[test]
    fn cyclic_permutations_diagonalize() {
        for l in (3..=15).step_by(2) {
            let ctx = FieldContext::new(l).unwrap();
            let v = vandermonde(&ctx);
            let vi = vandermonde_inverse(&ctx);
            for j in 0..l {
                let lambda = FieldMatrix::from_fn(l, l, |r, c| {
                    if r == c {
                        ctx.alpha_pow((r * j) as i64).clone()
                    } else {
                        FieldElement::zero()
                    }
                });
                let prod = v.mul(&ctx, &lambda).mul(&ctx, &vi).to_binary().unwrap();
                assert_eq!(prod, cyclic_perm_power(l, j as i64), "L = {l}, j = {j}");
            }
        }
    }

    #[test]
    fn rank_and_determinant() {
        let ctx = FieldContext::new(9).unwrap();
        let a = ctx.alpha().clone();
        let m = FieldMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => FieldElement::one(),
            (0, 1) => ctx.add(&FieldElement::one(), ctx.alpha_pow(6)),
            (1, 0) => FieldElement::zero(),
            _ => a.clone(),
        });
        assert_eq!(m.rank(&ctx), 2);
        assert_eq!(m.determinant(&ctx), a);
        let singular = FieldMatrix::from_fn(2, 2, |_, c| ctx.alpha_pow(c as i64).clone());
        assert_eq!(singular.rank(&ctx), 1);
        assert!(singular.determinant(&ctx).is_zero());
        assert!(singular.inverse(&ctx).is_err());
    }

    #[test]
    fn rank_invariant_under_frobenius() {
        let ctx = FieldContext::new(15).unwrap();
        let m = FieldMatrix::from_fn(3, 4, |r, c| {
            ctx.add(ctx.alpha_pow((r * c + r) as i64), ctx.alpha_pow((3 * c) as i64))
        });
        for j in 0..4 {
            let f = m.map(|e| ctx.frobenius(e, j));
            assert_eq!(f.rank(&ctx), m.rank(&ctx));
        }
    }

    #[test]
    fn downcast_rejects_field_entries() {
        let ctx = FieldContext::new(7).unwrap();
        let m = FieldMatrix::from_fn(1, 2, |_, c| ctx.alpha_pow(c as i64).clone());
        assert_eq!(m.to_binary(), Err(LinalgError::NotBinary { row: 0, col: 1 }));
    }
}
