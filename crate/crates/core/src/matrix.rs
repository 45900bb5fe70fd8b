//! Dense matrices over a field context. Matrices are plain data; every
//! operation takes the context explicitly.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::poly::PolyFq;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![FieldElem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if let Some(bad) = rows.iter().find(|x| x.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, got: bad.len() });
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(ctx: &FieldCtx, rows: &[&[i64]]) -> Result<Matrix> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| ctx.from_int(x)).collect()).collect())
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(cols: &[Vec<FieldElem>]) -> Matrix {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: FieldElem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.value()).collect()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(FieldElem) -> FieldElem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = ctx.add(out.get(i, j), ctx.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, ctx: &FieldCtx, v: &[FieldElem]) -> Vec<FieldElem> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(FieldElem::ZERO, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b))))
            .collect()
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(piv) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(piv, rank);
            let inv = ctx.inv(m.get(rank, col)).unwrap();
            for r in 0..m.rows {
                if r != rank && !m.get(r, col).is_zero() {
                    let f = ctx.mul(m.get(r, col), inv);
                    for c in col..m.cols {
                        let v = ctx.sub(m.get(r, c), ctx.mul(f, m.get(rank, c)));
                        m.set(r, c, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, ctx: &FieldCtx) -> bool {
        self.is_square() && self.rank(ctx) == self.rows
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Companion matrix of a monic polynomial (last column holds `-a_i`).
    pub fn companion(f: &PolyFq) -> Result<Matrix> {
        if !f.is_monic() {
            return Err(Error::NotMonic);
        }
        let ctx = f.ctx();
        let n = f.deg();
        let mut m = Matrix::zeros(n, n);
        for i in 1..n {
            m.set(i, i - 1, FieldElem::ONE);
        }
        for i in 0..n {
            m.set(i, n - 1, ctx.neg(f.coeff(i)));
        }
        Ok(m)
    }
}

/// `det(tI - M)`, via reduction to upper Hessenberg form.
pub fn char_poly(ctx: &Arc<FieldCtx>, m: &Matrix) -> Result<PolyFq> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let f = ctx.as_ref();
    let mut h = m.clone();
    for col in 0..n.saturating_sub(2) {
        let Some(piv) = (col + 1..n).find(|&r| !h.get(r, col).is_zero()) else {
            continue;
        };
        if piv != col + 1 {
            h.swap_rows(piv, col + 1);
            h.swap_cols(piv, col + 1);
        }
        let inv = f.inv(h.get(col + 1, col)).unwrap();
        for r in col + 2..n {
            let u = f.mul(h.get(r, col), inv);
            if u.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = f.sub(h.get(r, c), f.mul(u, h.get(col + 1, c)));
                h.set(r, c, v);
            }
            for rr in 0..n {
                let v = f.add(h.get(rr, col + 1), f.mul(u, h.get(rr, r)));
                h.set(rr, col + 1, v);
            }
        }
    }
    // p_{k+1} = (t - h_kk) p_k - Σ_{i<k} h_ik (∏_{l=i+1}^{k} h_{l,l-1}) p_i
    let mut polys: Vec<Vec<FieldElem>> = vec![vec![FieldElem::ONE]];
    for k in 0..n {
        let pk = &polys[k];
        let mut next = vec![FieldElem::ZERO; k + 2];
        for (i, &c) in pk.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.sub(next[i], f.mul(h.get(k, k), c));
        }
        let mut prod = FieldElem::ONE;
        for i in (0..k).rev() {
            prod = f.mul(prod, h.get(i + 1, i));
            if prod.is_zero() {
                break;
            }
            let coef = f.mul(h.get(i, k), prod);
            if coef.is_zero() {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = f.sub(next[d], f.mul(coef, c));
            }
        }
        polys.push(next);
    }
    Ok(PolyFq::new(ctx, polys.pop().unwrap()))
}

pub fn determinant(ctx: &Arc<FieldCtx>, m: &Matrix) -> Result<FieldElem> {
    let cp = char_poly(ctx, m)?;
    let c0 = cp.constant_term();
    Ok(if m.rows.is_multiple_of(2) { c0 } else { ctx.neg(c0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn examples() {
        let f2 = gf(2).unwrap();
        let cp = char_poly(&f2, &Matrix::identity(2)).unwrap();
        assert_eq!(cp, PolyFq::from_ints(&f2, &[1, 0, 1]));
        let g = PolyFq::from_ints(&f2, &[1, 1, 1]);
        assert_eq!(char_poly(&f2, &Matrix::companion(&g).unwrap()).unwrap(), g);
        let f3 = gf(3).unwrap();
        let m = Matrix::from_ints(&f3, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(char_poly(&f3, &m).unwrap(), PolyFq::from_ints(&f3, &[-1, 0, 1]));
        let r = Matrix::zeros(2, 3);
        assert_eq!(char_poly(&f3, &r).unwrap_err(), Error::NotSquare { rows: 2, cols: 3 });
    }

    #[test]
    fn matches_cofactor_expansion_on_3x3() {
        let f5 = gf(5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m =
                Matrix::from_rows((0..3).map(|_| (0..3).map(|_| FieldElem(rng.gen_range(0..5))).collect()).collect())
                    .unwrap();
            let cp = char_poly(&f5, &m).unwrap();
            // trace and determinant against direct formulas
            let f = &f5;
            let tr = f.add(f.add(m.get(0, 0), m.get(1, 1)), m.get(2, 2));
            assert_eq!(cp.coeff(2), f.neg(tr));
            let det = {
                let minor = |a: usize, b: usize, c: usize, d: usize| {
                    f.sub(f.mul(m.get(1, a), m.get(2, b)), f.mul(m.get(1, c), m.get(2, d)))
                };
                let t0 = f.mul(m.get(0, 0), minor(1, 2, 2, 1));
                let t1 = f.mul(m.get(0, 1), minor(0, 2, 2, 0));
                let t2 = f.mul(m.get(0, 2), minor(0, 1, 1, 0));
                f.add(f.sub(t0, t1), t2)
            };
            assert_eq!(cp.constant_term(), f.neg(det));
            assert!(cp.is_monic() && cp.deg() == 3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn block_diagonal_multiplies(q in prop::sample::select(vec![2u64, 3, 4, 5]), seed in any::<u64>(),
                                     a in 1usize..=3, b in 1usize..=3) {
            let ctx = gf(q).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_mat = |n: usize| Matrix::from_rows(
                (0..n).map(|_| (0..n).map(|_| FieldElem(rng.gen_range(0..ctx.q()))).collect()).collect()).unwrap();
            let x = rand_mat(a);
            let y = rand_mat(b);
            let whole = char_poly(&ctx, &Matrix::block_diag(&[x.clone(), y.clone()])).unwrap();
            let prod = &char_poly(&ctx, &x).unwrap() * &char_poly(&ctx, &y).unwrap();
            prop_assert_eq!(whole, prod);
        }
    }
}
