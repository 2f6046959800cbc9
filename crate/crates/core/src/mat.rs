//! Small dense matrices over the library's coefficient rings.

use crate::error::{Error, Result};
use crate::exact::{CoefPoly, ExactCoef};
use crate::field::Ctx;
use crate::poly::{Poly, RatFunc};

/// Ring operations threaded through the shared context. Implemented by every
/// coefficient type that appears inside a matrix.
pub trait Ring: Clone {
    fn r_zero(ctx: &Ctx) -> Self;
    fn r_one(ctx: &Ctx) -> Self;
    fn r_is_zero(&self) -> bool;
    fn r_add(ctx: &Ctx, a: &Self, b: &Self) -> Self;
    fn r_sub(ctx: &Ctx, a: &Self, b: &Self) -> Self;
    fn r_mul(ctx: &Ctx, a: &Self, b: &Self) -> Self;
    fn r_neg(ctx: &Ctx, a: &Self) -> Self;
}

impl Ring for ExactCoef {
    fn r_zero(_: &Ctx) -> Self {
        ExactCoef::zero()
    }
    fn r_one(ctx: &Ctx) -> Self {
        ExactCoef::one(ctx)
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn r_add(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.add(ctx, b)
    }
    fn r_sub(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.sub(ctx, b)
    }
    fn r_mul(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.mul(ctx, b)
    }
    fn r_neg(ctx: &Ctx, a: &Self) -> Self {
        a.neg(ctx)
    }
}

impl Ring for CoefPoly {
    fn r_zero(_: &Ctx) -> Self {
        CoefPoly::zero()
    }
    fn r_one(ctx: &Ctx) -> Self {
        CoefPoly::one(ctx)
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn r_add(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.add(ctx, b)
    }
    fn r_sub(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.sub(ctx, b)
    }
    fn r_mul(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.mul(ctx, b)
    }
    fn r_neg(ctx: &Ctx, a: &Self) -> Self {
        a.neg(ctx)
    }
}

impl Ring for RatFunc {
    fn r_zero(_: &Ctx) -> Self {
        RatFunc::zero()
    }
    fn r_one(ctx: &Ctx) -> Self {
        RatFunc::one(&ctx.fq)
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn r_add(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.add(&ctx.fq, b)
    }
    fn r_sub(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.sub(&ctx.fq, b)
    }
    fn r_mul(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.mul(&ctx.fq, b)
    }
    fn r_neg(ctx: &Ctx, a: &Self) -> Self {
        a.neg(&ctx.fq)
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Mat<T> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.at(i, j).clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U, F: Fn(&T) -> Result<U>>(&self, f: F) -> Result<Mat<U>> {
        let mut data = Vec::with_capacity(self.data.len());
        for t in &self.data {
            data.push(f(t)?);
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Copies `src` into self with upper-left corner at (i0, j0).
    pub fn paste(&mut self, src: &Mat<T>, i0: usize, j0: usize) {
        for i in 0..src.rows {
            for j in 0..src.cols {
                *self.at_mut(i0 + i, j0 + j) = src.at(i, j).clone();
            }
        }
    }

    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> Mat<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(self.at(i0 + i, j0 + j).clone());
            }
        }
        Mat { rows, cols, data }
    }

    fn minor(&self, i0: usize, j0: usize) -> Mat<T> {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in 0..self.rows {
            if i == i0 {
                continue;
            }
            for j in 0..self.cols {
                if j == j0 {
                    continue;
                }
                data.push(self.at(i, j).clone());
            }
        }
        Mat {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }
}

impl<T: Ring> Mat<T> {
    pub fn zero(ctx: &Ctx, rows: usize, cols: usize) -> Mat<T> {
        Mat {
            rows,
            cols,
            data: vec![T::r_zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> Mat<T> {
        let mut m = Mat::zero(ctx, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = T::r_one(ctx);
        }
        m
    }

    pub fn add(&self, ctx: &Ctx, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| T::r_add(ctx, a, b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, ctx: &Ctx, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| T::r_sub(ctx, a, b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, ctx: &Ctx, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "inner dimensions must agree");
        let mut out = Mat::zero(ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.r_is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if b.r_is_zero() {
                        continue;
                    }
                    let prod = T::r_mul(ctx, a, b);
                    *out.at_mut(i, j) = T::r_add(ctx, out.at(i, j), &prod);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::r_is_zero)
    }

    /// Determinant by cofactor expansion. Kept for the small square sizes
    /// that occur here (r <= 4).
    pub fn det(&self, ctx: &Ctx) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => T::r_one(ctx),
            1 => self.at(0, 0).clone(),
            2 => T::r_sub(
                ctx,
                &T::r_mul(ctx, self.at(0, 0), self.at(1, 1)),
                &T::r_mul(ctx, self.at(0, 1), self.at(1, 0)),
            ),
            _ => {
                let mut acc = T::r_zero(ctx);
                for j in 0..n {
                    if self.at(0, j).r_is_zero() {
                        continue;
                    }
                    let minor = self.minor(0, j);
                    let term = T::r_mul(ctx, self.at(0, j), &minor.det(ctx));
                    if j % 2 == 0 {
                        acc = T::r_add(ctx, &acc, &term);
                    } else {
                        acc = T::r_sub(ctx, &acc, &term);
                    }
                }
                acc
            }
        }
    }

    /// Adjugate: adj(A) * A = det(A) * I.
    pub fn adjugate(&self, ctx: &Ctx) -> Mat<T> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 1 {
            return Mat::identity(ctx, 1);
        }
        let mut out = Mat::zero(ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                let m = self.minor(i, j).det(ctx);
                let v = if (i + j) % 2 == 0 {
                    m
                } else {
                    T::r_neg(ctx, &m)
                };
                *out.at_mut(j, i) = v;
            }
        }
        out
    }
}

/// Inverse over the rational-function field.
pub fn rat_inverse(ctx: &Ctx, m: &Mat<RatFunc>) -> Result<Mat<RatFunc>> {
    let det = m.det(ctx);
    if det.is_zero() {
        return Err(Error::Invalid("matrix is singular".into()));
    }
    let det_inv = det.inv(&ctx.fq)?;
    Ok(m.adjugate(ctx).map(|e| e.mul(&ctx.fq, &det_inv)))
}

/// Rank of a matrix over F_q(t) by fraction-free Bareiss elimination after
/// clearing denominators row by row.
pub fn rank(ctx: &Ctx, m: &Mat<RatFunc>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let fq = &ctx.fq;
    // clear denominators: multiply each row by the product of its denominators
    let mut a: Vec<Vec<Poly>> = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut lcm = Poly::one(fq);
        for j in 0..m.cols {
            let den = &m.at(i, j).den;
            let g = lcm.gcd(fq, den);
            lcm = lcm.mul(fq, &den.div_exact(fq, &g).unwrap());
        }
        let row = (0..m.cols)
            .map(|j| {
                let e = m.at(i, j);
                e.num.mul(fq, &lcm.div_exact(fq, &e.den).unwrap())
            })
            .collect();
        a.push(row);
    }
    bareiss_rank(ctx, &mut a)
}

fn bareiss_rank(ctx: &Ctx, a: &mut [Vec<Poly>]) -> usize {
    let fq = &ctx.fq;
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = Poly::one(fq);
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                // Bareiss update: (a[r][c]*a[i][j] - a[i][c]*a[r][j]) / prev, exact
                let t1 = a[r][c].mul(fq, &a[i][j]);
                let t2 = a[i][c].mul(fq, &a[r][j]);
                let num = t1.sub(fq, &t2);
                a[i][j] = num.div_exact(fq, &prev).expect("Bareiss division is exact");
            }
            a[i][c] = Poly::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// True when the row space of `a` equals the row space of `b` over F_q(t).
pub fn same_row_space(ctx: &Ctx, a: &Mat<RatFunc>, b: &Mat<RatFunc>) -> bool {
    if a.cols != b.cols {
        return false;
    }
    let ra = rank(ctx, a);
    let rb = rank(ctx, b);
    if ra != rb {
        return false;
    }
    let mut stacked = Mat::zero(ctx, a.rows + b.rows, a.cols);
    stacked.paste(a, 0, 0);
    stacked.paste(b, a.rows, 0);
    rank(ctx, &stacked) == ra
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::util::Rng;

    fn ctx() -> Ctx {
        Ctx::new(FieldSpec::new(3, 1, 1, 1).unwrap()).unwrap()
    }

    fn rf(ctx: &Ctx, coeffs: &[u64]) -> RatFunc {
        RatFunc::from_poly(
            &ctx.fq,
            Poly::from_coeffs(coeffs.iter().map(|&c| ctx.fq.scalar(c)).collect()),
        )
    }

    #[test]
    fn adjugate_inverts() {
        let ctx = ctx();
        let mut rng = Rng::new(4);
        for n in 1..=3usize {
            for _ in 0..10 {
                let m = Mat::from_rows(
                    (0..n)
                        .map(|_| {
                            (0..n)
                                .map(|_| rf(&ctx, &[rng.below(3), rng.below(3)]))
                                .collect()
                        })
                        .collect(),
                );
                let det = m.det(&ctx);
                if det.is_zero() {
                    continue;
                }
                let inv = rat_inverse(&ctx, &m).unwrap();
                let prod = m.mul(&ctx, &inv);
                assert_eq!(prod, Mat::identity(&ctx, n));
            }
        }
    }

    #[test]
    fn bareiss_rank_matches_rational_elimination() {
        // independent oracle: textbook Gaussian elimination over the
        // fraction field, no fraction-free tricks
        fn oracle_rank(ctx: &Ctx, m: &Mat<RatFunc>) -> usize {
            let fq = &ctx.fq;
            let mut rows: Vec<Vec<RatFunc>> =
                (0..m.rows).map(|i| (0..m.cols).map(|j| m.at(i, j).clone()).collect()).collect();
            let mut r = 0usize;
            for c in 0..m.cols {
                let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                    continue;
                };
                rows.swap(r, p);
                let inv = rows[r][c].inv(fq).unwrap();
                for j in 0..m.cols {
                    rows[r][j] = rows[r][j].mul(fq, &inv);
                }
                for i in 0..rows.len() {
                    if i != r && !rows[i][c].is_zero() {
                        let f = rows[i][c].clone();
                        for j in 0..m.cols {
                            let t = f.mul(fq, &rows[r][j]);
                            rows[i][j] = rows[i][j].sub(fq, &t);
                        }
                    }
                }
                r += 1;
                if r == rows.len() {
                    break;
                }
            }
            r
        }
        let ctx = ctx();
        let mut rng = Rng::new(61);
        for _ in 0..40 {
            let rows = 1 + rng.below(4) as usize;
            let cols = 1 + rng.below(5) as usize;
            let m = Mat::from_rows(
                (0..rows)
                    .map(|_| {
                        (0..cols)
                            .map(|_| rf(&ctx, &[rng.below(3), rng.below(3), rng.below(2)]))
                            .collect()
                    })
                    .collect(),
            );
            assert_eq!(rank(&ctx, &m), oracle_rank(&ctx, &m));
        }
        // low-rank constructions: products compress the rank
        for _ in 0..15 {
            let a = Mat::from_rows(
                (0..3).map(|_| (0..2).map(|_| rf(&ctx, &[rng.below(3), rng.below(3)])).collect()).collect(),
            );
            let b = Mat::from_rows(
                (0..2).map(|_| (0..4).map(|_| rf(&ctx, &[rng.below(3), rng.below(3)])).collect()).collect(),
            );
            let m = a.mul(&ctx, &b);
            let r = rank(&ctx, &m);
            assert!(r <= 2);
            assert_eq!(r, oracle_rank(&ctx, &m));
        }
    }

    #[test]
    fn rank_and_row_space() {
        let ctx = ctx();
        // rows: (1, t), (t, t^2) -> rank 1
        let m = Mat::from_rows(vec![
            vec![rf(&ctx, &[1]), rf(&ctx, &[0, 1])],
            vec![rf(&ctx, &[0, 1]), rf(&ctx, &[0, 0, 1])],
        ]);
        assert_eq!(rank(&ctx, &m), 1);
        let single = Mat::from_rows(vec![vec![rf(&ctx, &[1]), rf(&ctx, &[0, 1])]]);
        assert!(same_row_space(&ctx, &m, &single));
        let other = Mat::from_rows(vec![vec![rf(&ctx, &[1]), rf(&ctx, &[1, 1])]]);
        assert!(!same_row_space(&ctx, &m, &other));
        // empty matrices are rank 0
        let empty: Mat<RatFunc> = Mat::zero(&ctx, 0, 4);
        assert_eq!(rank(&ctx, &empty), 0);
    }
}
