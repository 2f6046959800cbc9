//! t-polynomials with series coefficients, d-matrices, specialization at
//! t = theta, and the digit-expansion map at constant points.

use crate::error::{Error, Result};
use crate::exact::CoefPoly;
use crate::field::{Ctx, K};
use crate::mat::{Mat, Ring};
use crate::poly::{binom_mod_p, RatFunc};
use crate::series::{exact_to_series, RamSeries, EXACT};

/// Sentinel t-degree for values that are genuine polynomials in t (no
/// truncated tail).
pub const T_EXACT: i64 = i64::MAX / 4;

/// Truncated element of the Tate algebra: coefficients of t^0..t^tdeg are
/// tracked, anything higher is unknown unless `tdeg == T_EXACT`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TatePoly {
    /// Shared ramification index of the coefficients (0 = wildcard).
    pub e: u32,
    pub tdeg: i64,
    /// Coefficient of t^i at index i; entries beyond the vector are exact zero.
    pub coeffs: Vec<RamSeries>,
}

impl TatePoly {
    pub fn zero(e: u32) -> TatePoly {
        TatePoly {
            e,
            tdeg: T_EXACT,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &Ctx, e: u32) -> TatePoly {
        TatePoly {
            e,
            tdeg: T_EXACT,
            coeffs: vec![RamSeries::one(ctx, e)],
        }
    }

    pub fn from_coeffs(e: u32, tdeg: i64, coeffs: Vec<RamSeries>) -> TatePoly {
        let mut t = TatePoly { e, tdeg, coeffs };
        t.normalize();
        t
    }

    pub fn constant(s: RamSeries) -> TatePoly {
        let e = s.e;
        TatePoly::from_coeffs(e, T_EXACT, vec![s])
    }

    /// The monomial t.
    pub fn t(ctx: &Ctx, e: u32) -> TatePoly {
        TatePoly::from_coeffs(e, T_EXACT, vec![RamSeries::zero(e), RamSeries::one(ctx, e)])
    }

    fn normalize(&mut self) {
        if self.tdeg < T_EXACT {
            if self.coeffs.len() as i64 > self.tdeg + 1 {
                self.coeffs.truncate((self.tdeg + 1).max(0) as usize);
            }
        }
        while self.coeffs.last().map_or(false, RamSeries::is_exact_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeff(&self, i: usize) -> RamSeries {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| RamSeries::zero(self.e))
    }

    fn merge_e(&self, o: &TatePoly) -> u32 {
        if self.e == 0 {
            o.e
        } else if o.e == 0 {
            self.e
        } else {
            assert_eq!(self.e, o.e, "ramification indices must match");
            self.e
        }
    }

    pub fn add(&self, ctx: &Ctx, o: &TatePoly) -> TatePoly {
        let e = self.merge_e(o);
        let tdeg = self.tdeg.min(o.tdeg);
        let len = self.coeffs.len().max(o.coeffs.len());
        let len = (len as i64).min(tdeg + 1).max(0) as usize;
        let coeffs = (0..len)
            .map(|i| self.coeff(i).add(ctx, &o.coeff(i)))
            .collect();
        TatePoly::from_coeffs(e, tdeg, coeffs)
    }

    pub fn neg(&self, ctx: &Ctx) -> TatePoly {
        TatePoly {
            e: self.e,
            tdeg: self.tdeg,
            coeffs: self.coeffs.iter().map(|c| c.neg(ctx)).collect(),
        }
    }

    pub fn sub(&self, ctx: &Ctx, o: &TatePoly) -> TatePoly {
        self.add(ctx, &o.neg(ctx))
    }

    pub fn mul(&self, ctx: &Ctx, o: &TatePoly) -> TatePoly {
        let e = self.merge_e(o);
        let tdeg = self.tdeg.min(o.tdeg);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return TatePoly {
                e,
                tdeg,
                coeffs: Vec::new(),
            };
        }
        let full = self.coeffs.len() + o.coeffs.len() - 1;
        let len = (full as i64).min(tdeg + 1).max(0) as usize;
        let mut coeffs = vec![RamSeries::zero(e); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_exact_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(ctx, &a.mul(ctx, b));
            }
        }
        TatePoly::from_coeffs(e, tdeg, coeffs)
    }

    pub fn scale(&self, ctx: &Ctx, s: &RamSeries) -> TatePoly {
        let e = self.merge_e(&TatePoly {
            e: s.e,
            tdeg: T_EXACT,
            coeffs: vec![],
        });
        TatePoly::from_coeffs(
            e,
            self.tdeg,
            self.coeffs.iter().map(|c| c.mul(ctx, s)).collect(),
        )
    }

    /// Frobenius twist: coefficients twist, t stays fixed.
    pub fn twist(&self, ctx: &Ctx, n: i64) -> Result<TatePoly> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.twist(ctx, n)?);
        }
        Ok(TatePoly::from_coeffs(self.e, self.tdeg, coeffs))
    }

    /// j-th hyperderivative in t: reindex with binomial weights. The tracked
    /// t-degree drops by j.
    pub fn hyperderiv_t(&self, ctx: &Ctx, j: u64) -> TatePoly {
        if j == 0 {
            return self.clone();
        }
        let tdeg = if self.tdeg >= T_EXACT {
            T_EXACT
        } else {
            self.tdeg - j as i64
        };
        let mut coeffs = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            if (n as u64) < j {
                continue;
            }
            let b = binom_mod_p(n as u64, j, ctx.spec.p);
            let scaled = if b == 0 {
                RamSeries::zero_like(c)
            } else {
                c.scale(ctx, ctx.fq.scalar(b))
            };
            coeffs.push(scaled);
        }
        TatePoly::from_coeffs(self.e, tdeg, coeffs)
    }

    /// Coefficient-wise hyperderivative in theta; t-exponents stay fixed.
    pub fn hyperderiv_theta(&self, ctx: &Ctx, j: u64) -> Result<TatePoly> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.hyperderiv_theta(ctx, j)?);
        }
        Ok(TatePoly::from_coeffs(self.e, self.tdeg, coeffs))
    }

    /// Multiplicative inverse as a t-series, provided the constant
    /// coefficient is invertible within precision. `prec_cap` bounds the
    /// series-digit expansion of each coefficient.
    pub fn inv(&self, ctx: &Ctx, prec_cap: i64) -> Result<TatePoly> {
        let c0 = self.coeff(0);
        let c0_inv = c0.inv(ctx, prec_cap).map_err(|_| {
            Error::PrecisionLoss("constant t-coefficient not invertible within precision".into())
        })?;
        let tdeg = self.tdeg;
        let n = if tdeg >= T_EXACT {
            // inverse of a genuine polynomial is an infinite series; without
            // a truncation bound only constants are invertible
            if self.coeffs.len() > 1 {
                return Err(Error::PrecisionLoss(
                    "inverse of a nonconstant exact t-polynomial needs a finite t-degree".into(),
                ));
            }
            0
        } else {
            tdeg.max(0) as usize
        };
        let mut out: Vec<RamSeries> = Vec::with_capacity(n + 1);
        out.push(c0_inv.clone());
        for k in 1..=n {
            let mut s = RamSeries::zero(self.e);
            for i in 1..=k {
                s = s.add(ctx, &self.coeff(i).mul(ctx, &out[k - i]));
            }
            out.push(s.neg(ctx).mul(ctx, &c0_inv));
        }
        Ok(TatePoly::from_coeffs(self.e, tdeg, out))
    }

    /// True when every tracked coefficient has no nonzero certified digit.
    pub fn is_zero_within_prec(&self) -> bool {
        self.coeffs.iter().all(RamSeries::is_zero_within_prec)
    }

    /// Largest vartheta-exponent carrying a nonzero certified digit across
    /// all coefficients.
    pub fn max_nonzero_exp(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .filter_map(RamSeries::max_nonzero_exp)
            .max()
    }

    /// Caps every coefficient ledger.
    pub fn truncate_prec(&self, prec: i64) -> TatePoly {
        TatePoly::from_coeffs(
            self.e,
            self.tdeg,
            self.coeffs.iter().map(|c| c.truncate(prec)).collect(),
        )
    }

    /// Caps the tracked t-degree.
    pub fn truncate_tdeg(&self, tdeg: i64) -> TatePoly {
        TatePoly::from_coeffs(self.e, self.tdeg.min(tdeg), self.coeffs.clone())
    }
}

impl RamSeries {
    fn zero_like(s: &RamSeries) -> RamSeries {
        if s.prec >= EXACT {
            RamSeries::zero(s.e)
        } else {
            RamSeries::zero_prec(s.e, s.prec)
        }
    }
}

impl Ring for TatePoly {
    fn r_zero(_: &Ctx) -> Self {
        TatePoly::zero(0)
    }
    fn r_one(ctx: &Ctx) -> Self {
        TatePoly::one(ctx, 0)
    }
    fn r_is_zero(&self) -> bool {
        self.coeffs.is_empty()
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

/// Expands the exact coefficients of a t-polynomial into series at
/// ramification index e.
pub fn coefpoly_to_tate(ctx: &Ctx, p: &CoefPoly, e: u32, prec: i64) -> Result<TatePoly> {
    let mut coeffs = Vec::with_capacity(p.c.len());
    for c in &p.c {
        coeffs.push(exact_to_series(ctx, c, e, prec)?);
    }
    Ok(TatePoly::from_coeffs(e, T_EXACT, coeffs))
}

// ---------------------------------------------------------------------------
// d-matrices
// ---------------------------------------------------------------------------

/// Entry types that admit the t-hyperderivative.
pub trait DiffT: Ring {
    fn d_t(ctx: &Ctx, x: &Self, j: u64) -> Result<Self>;
}

impl DiffT for TatePoly {
    fn d_t(ctx: &Ctx, x: &Self, j: u64) -> Result<Self> {
        Ok(x.hyperderiv_t(ctx, j))
    }
}

impl DiffT for CoefPoly {
    fn d_t(ctx: &Ctx, x: &Self, j: u64) -> Result<Self> {
        Ok(x.hyperderiv_t(ctx, j))
    }
}

impl DiffT for RatFunc {
    fn d_t(ctx: &Ctx, x: &Self, j: u64) -> Result<Self> {
        Ok(x.hyperderiv(&ctx.fq, j))
    }
}

/// Entry types that admit the theta-hyperderivative.
pub trait DiffTheta: Ring {
    fn d_theta(ctx: &Ctx, x: &Self, j: u64) -> Result<Self>;
}

impl DiffTheta for TatePoly {
    fn d_theta(ctx: &Ctx, x: &Self, j: u64) -> Result<Self> {
        x.hyperderiv_theta(ctx, j)
    }
}

impl DiffTheta for crate::exact::ExactCoef {
    fn d_theta(ctx: &Ctx, x: &Self, j: u64) -> Result<Self> {
        let r = x.as_theta_rat(ctx)?;
        Ok(crate::exact::ExactCoef::from_theta_rat(
            ctx,
            &r.hyperderiv(&ctx.fq, j),
        ))
    }
}

/// The upper-triangular block-Toeplitz expansion: block (i, k) carries the
/// (k - i)-th hyperderivative of the base for k >= i in a n x n block grid.
fn dmatrix_with<T: Ring>(
    ctx: &Ctx,
    base: &Mat<T>,
    n: usize,
    hd: impl Fn(&Ctx, &T, u64) -> Result<T>,
) -> Result<Mat<T>> {
    assert!(n >= 1);
    let (r, c) = (base.rows, base.cols);
    // precompute the derivative blocks 0..n-1
    let mut blocks = Vec::with_capacity(n);
    blocks.push(base.clone());
    for j in 1..n {
        blocks.push(base.try_map(|x| hd(ctx, x, j as u64))?);
    }
    let mut out = Mat::zero(ctx, n * r, n * c);
    for bi in 0..n {
        for bk in bi..n {
            out.paste(&blocks[bk - bi], bi * r, bk * c);
        }
    }
    Ok(out)
}

/// d_{t,n}[base] for a matrix base.
pub fn dmatrix_t<T: DiffT>(ctx: &Ctx, base: &Mat<T>, n: usize) -> Result<Mat<T>> {
    dmatrix_with(ctx, base, n, T::d_t)
}

/// d_{theta,n}[base] for a matrix base.
pub fn dmatrix_theta<T: DiffTheta>(ctx: &Ctx, base: &Mat<T>, n: usize) -> Result<Mat<T>> {
    dmatrix_with(ctx, base, n, T::d_theta)
}

/// A d-matrix remembered with its block count and base, so the expansion's
/// shape contract stays checkable after further arithmetic.
#[derive(Debug, Clone)]
pub struct DMatrix<T> {
    pub n: usize,
    pub base: Mat<T>,
    pub full: Mat<T>,
}

impl<T: Ring + PartialEq> DMatrix<T> {
    /// Upper-triangular block-Toeplitz with diagonal blocks equal to base.
    pub fn shape_ok(&self) -> bool {
        let (r, c) = (self.base.rows, self.base.cols);
        if self.full.rows != self.n * r || self.full.cols != self.n * c {
            return false;
        }
        for bi in 0..self.n {
            for bk in 0..self.n {
                let blk = self.full.block(bi * r, bk * c, r, c);
                if bk < bi {
                    if !blk.is_zero() {
                        return false;
                    }
                } else if bk == bi {
                    if blk != self.base {
                        return false;
                    }
                } else if bi > 0 && blk != self.full.block((bi - 1) * r, (bk - 1) * c, r, c) {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds the t-variable d-matrix together with its provenance.
pub fn build_dmatrix_t<T: DiffT + PartialEq>(
    ctx: &Ctx,
    base: &Mat<T>,
    n: usize,
) -> Result<DMatrix<T>> {
    let full = dmatrix_t(ctx, base, n)?;
    let d = DMatrix { n, base: base.clone(), full };
    debug_assert!(d.shape_ok());
    Ok(d)
}

/// Builds the theta-variable d-matrix together with its provenance.
pub fn build_dmatrix_theta<T: DiffTheta + PartialEq>(
    ctx: &Ctx,
    base: &Mat<T>,
    n: usize,
) -> Result<DMatrix<T>> {
    let full = dmatrix_theta(ctx, base, n)?;
    let d = DMatrix { n, base: base.clone(), full };
    debug_assert!(d.shape_ok());
    Ok(d)
}

/// Scalar convenience wrappers.
pub fn dmatrix_t_scalar<T: DiffT>(ctx: &Ctx, x: &T, n: usize) -> Result<Mat<T>> {
    dmatrix_t(ctx, &Mat::from_rows(vec![vec![x.clone()]]), n)
}

pub fn dmatrix_theta_scalar<T: DiffTheta>(ctx: &Ctx, x: &T, n: usize) -> Result<Mat<T>> {
    dmatrix_theta(ctx, &Mat::from_rows(vec![vec![x.clone()]]), n)
}

// ---------------------------------------------------------------------------
// specialization and digit expansion
// ---------------------------------------------------------------------------

/// Substitutes t = theta = vartheta^e. The result precision is the weakest
/// per-term precision; when the value is a truncation of an unknown tail,
/// the tail is bounded by extrapolating the decay of the last three term
/// leads, and the budget must be visibly converging.
pub fn eval_at_theta(ctx: &Ctx, f: &TatePoly) -> Result<RamSeries> {
    let e = f.e as i64;
    if f.e == 0 {
        return Ok(f.coeff(0));
    }
    let mut acc = RamSeries::zero(f.e);
    let mut min_prec = EXACT;
    for (i, c) in f.coeffs.iter().enumerate() {
        let term = c.shift(e * i as i64);
        if term.prec < min_prec {
            min_prec = term.prec;
        }
        acc = acc.add(ctx, &term);
    }
    if f.tdeg < T_EXACT && f.coeffs.len() > 3 {
        // Tail budget: extrapolate the decay of the term leads that are
        // still visible above their windows. Coefficients that already sank
        // below the precision floor are covered by min_prec itself.
        let visible: Vec<(i64, i64)> = f
            .coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.max_nonzero_exp().map(|x| (i as i64, x + e * i as i64)))
            .collect();
        if visible.len() >= 2 {
            let w = &visible[visible.len().saturating_sub(3)..];
            if !w.windows(2).all(|p| p[0].1 > p[1].1) {
                return Err(Error::PrecisionExhausted(
                    "term valuations not increasing at the truncation edge".into(),
                ));
            }
            let (i1, v1) = w[w.len() - 2];
            let (i2, v2) = w[w.len() - 1];
            // per-index decay, rounded toward zero so the bound stays safe
            let per = -((v1 - v2) / (i2 - i1));
            let tail_lead = v2 + per * (f.tdeg + 1 - i2);
            min_prec = min_prec.min(-tail_lead);
        }
    }
    if min_prec <= -acc.lead_bound() && !acc.is_zero_within_prec() {
        return Err(Error::PrecisionExhausted(
            "specialization at t = theta leaves no certified digits".into(),
        ));
    }
    Ok(acc.truncate(min_prec))
}

/// Digit expansion at a constant point: coefficient m of the output is the
/// m-th t-hyperderivative evaluated at t = zeta. An algebra map in the
/// truncation order.
pub fn dzeta(ctx: &Ctx, g: &TatePoly, zeta: K, n_terms: usize) -> Vec<RamSeries> {
    (0..n_terms)
        .map(|m| {
            let d = g.hyperderiv_t(ctx, m as u64);
            let mut acc = RamSeries::zero(g.e);
            let mut zp = ctx.fq.one();
            for c in d.coeffs.iter() {
                acc = acc.add(ctx, &c.scale(ctx, zp));
                zp = ctx.fq.mul(zp, zeta);
            }
            acc
        })
        .collect()
}
