//! Twisted polynomial rings in tau (tau c = c^q tau) and sigma
//! (sigma c = c^(-1) sigma), the star anti-involution between them, and
//! application of tau-operators to series arguments.

use crate::error::Result;
use crate::exact::ExactCoef;
use crate::field::Ctx;
use crate::mat::{Mat, Ring};
use crate::series::{exact_to_series, RamSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwVar {
    Tau,
    Sigma,
}

impl TwVar {
    /// Twist direction picked up when the variable moves past a coefficient.
    fn step(self) -> i64 {
        match self {
            TwVar::Tau => 1,
            TwVar::Sigma => -1,
        }
    }
}

/// Coefficient domains a twisted polynomial can live over.
pub trait TwistCoeff: Clone {
    fn tc_zero() -> Self;
    fn tc_one(ctx: &Ctx) -> Self;
    fn tc_is_zero(&self) -> bool;
    fn tc_add(ctx: &Ctx, a: &Self, b: &Self) -> Self;
    fn tc_mul(ctx: &Ctx, a: &Self, b: &Self) -> Self;
    fn tc_neg(ctx: &Ctx, a: &Self) -> Self;
    fn tc_twist(ctx: &Ctx, a: &Self, n: i64) -> Result<Self>;
}

impl TwistCoeff for ExactCoef {
    fn tc_zero() -> Self {
        ExactCoef::zero()
    }
    fn tc_one(ctx: &Ctx) -> Self {
        ExactCoef::one(ctx)
    }
    fn tc_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn tc_add(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.add(ctx, b)
    }
    fn tc_mul(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.mul(ctx, b)
    }
    fn tc_neg(ctx: &Ctx, a: &Self) -> Self {
        a.neg(ctx)
    }
    fn tc_twist(ctx: &Ctx, a: &Self, n: i64) -> Result<Self> {
        a.twist(ctx, n)
    }
}

impl TwistCoeff for RamSeries {
    fn tc_zero() -> Self {
        RamSeries::zero(0)
    }
    fn tc_one(ctx: &Ctx) -> Self {
        RamSeries::constant(0, ctx.fq.one())
    }
    fn tc_is_zero(&self) -> bool {
        self.is_zero_within_prec()
    }
    fn tc_add(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.add(ctx, b)
    }
    fn tc_mul(ctx: &Ctx, a: &Self, b: &Self) -> Self {
        a.mul(ctx, b)
    }
    fn tc_neg(ctx: &Ctx, a: &Self) -> Self {
        a.neg(ctx)
    }
    fn tc_twist(ctx: &Ctx, a: &Self, n: i64) -> Result<Self> {
        a.twist(ctx, n)
    }
}

/// Polynomial in tau or sigma; `coeffs[i]` multiplies the i-th power of the
/// variable from the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedPoly<C> {
    pub var: TwVar,
    pub coeffs: Vec<C>,
}

impl<C: TwistCoeff> TwistedPoly<C> {
    pub fn zero(var: TwVar) -> Self {
        TwistedPoly {
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &Ctx, var: TwVar) -> Self {
        TwistedPoly::constant(var, C::tc_one(ctx))
    }

    pub fn constant(var: TwVar, c: C) -> Self {
        let mut p = TwistedPoly {
            var,
            coeffs: vec![c],
        };
        p.trim();
        p
    }

    /// c * var^i.
    pub fn monomial(var: TwVar, c: C, i: usize) -> Self {
        if c.tc_is_zero() {
            return TwistedPoly::zero(var);
        }
        let mut coeffs = vec![C::tc_zero(); i + 1];
        coeffs[i] = c;
        TwistedPoly { var, coeffs }
    }

    pub fn from_coeffs(var: TwVar, coeffs: Vec<C>) -> Self {
        let mut p = TwistedPoly { var, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, C::tc_is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::tc_zero)
    }

    pub fn add(&self, ctx: &Ctx, o: &Self) -> Self {
        assert_eq!(self.var, o.var, "mixed twisted variables");
        let len = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..len)
            .map(|i| C::tc_add(ctx, &self.coeff(i), &o.coeff(i)))
            .collect();
        TwistedPoly::from_coeffs(self.var, coeffs)
    }

    pub fn neg(&self, ctx: &Ctx) -> Self {
        TwistedPoly {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| C::tc_neg(ctx, c)).collect(),
        }
    }

    pub fn sub(&self, ctx: &Ctx, o: &Self) -> Self {
        self.add(ctx, &o.neg(ctx))
    }

    /// Noncommutative product: moving var^i past a coefficient twists it by
    /// the variable's step, i times.
    pub fn mul(&self, ctx: &Ctx, o: &Self) -> Result<Self> {
        assert_eq!(self.var, o.var, "mixed twisted variables");
        if self.is_zero() || o.is_zero() {
            return Ok(TwistedPoly::zero(self.var));
        }
        let step = self.var.step();
        let mut coeffs = vec![C::tc_zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.tc_is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.tc_is_zero() {
                    continue;
                }
                let tw = C::tc_twist(ctx, b, step * i as i64)?;
                let prod = C::tc_mul(ctx, a, &tw);
                coeffs[i + j] = C::tc_add(ctx, &coeffs[i + j], &prod);
            }
        }
        Ok(TwistedPoly::from_coeffs(self.var, coeffs))
    }

    /// The star anti-involution: sum c_i tau^i maps to sum c_i^(-i) sigma^i
    /// (and back). Requires negative twistability of the coefficients.
    pub fn star(&self, ctx: &Ctx) -> Result<Self> {
        let var = match self.var {
            TwVar::Tau => TwVar::Sigma,
            TwVar::Sigma => TwVar::Tau,
        };
        let dir = self.var.step();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(C::tc_twist(ctx, c, -dir * i as i64)?);
        }
        Ok(TwistedPoly::from_coeffs(var, coeffs))
    }
}

impl TwistedPoly<ExactCoef> {
    /// Expands the coefficients into series at ramification index e.
    pub fn to_series(&self, ctx: &Ctx, e: u32, prec: i64) -> Result<TwistedPoly<RamSeries>> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(exact_to_series(ctx, c, e, prec)?);
        }
        Ok(TwistedPoly::from_coeffs(self.var, coeffs))
    }

    /// Applies a tau-operator to a series argument: sum c_i x^(q^i).
    pub fn apply(&self, ctx: &Ctx, x: &RamSeries, prec: i64) -> Result<RamSeries> {
        assert_eq!(self.var, TwVar::Tau, "only tau-operators act on series");
        let mut acc = RamSeries::zero(x.e);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = exact_to_series(ctx, c, x.e, prec)?;
            let xp = x.twist(ctx, i as i64)?;
            acc = acc.add(ctx, &cs.mul(ctx, &xp));
        }
        Ok(acc)
    }
}

/// Entry-wise star with transposition: (B*)_(i,j) = (B_(j,i))*. Reverses
/// products of matrices over the twisted ring.
pub fn star_mat<C: TwistCoeff>(ctx: &Ctx, m: &Mat<TwistedPoly<C>>) -> Result<Mat<TwistedPoly<C>>> {
    let mut data = Vec::with_capacity(m.data.len());
    for j in 0..m.cols {
        for i in 0..m.rows {
            data.push(m.at(i, j).star(ctx)?);
        }
    }
    Ok(Mat {
        rows: m.cols,
        cols: m.rows,
        data,
    })
}

impl<C: TwistCoeff> Ring for TwistedPoly<C> {
    fn r_zero(_: &Ctx) -> Self {
        TwistedPoly::zero(TwVar::Tau)
    }
    fn r_one(ctx: &Ctx) -> Self {
        TwistedPoly::one(ctx, TwVar::Tau)
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
            .expect("twist depth exceeded inside matrix product")
    }
    fn r_neg(ctx: &Ctx, a: &Self) -> Self {
        a.neg(ctx)
    }
}

/// Twisted-matrix product that surfaces twist-depth failures instead of
/// panicking.
pub fn tw_mat_mul<C: TwistCoeff>(
    ctx: &Ctx,
    a: &Mat<TwistedPoly<C>>,
    b: &Mat<TwistedPoly<C>>,
) -> Result<Mat<TwistedPoly<C>>> {
    assert_eq!(a.cols, b.rows);
    let zero_var = a
        .data
        .iter()
        .chain(b.data.iter())
        .find(|p| !p.is_zero())
        .map(|p| p.var)
        .unwrap_or(TwVar::Tau);
    let mut out = Vec::with_capacity(a.rows * b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = TwistedPoly::zero(zero_var);
            for k in 0..a.cols {
                let x = a.at(i, k);
                let y = b.at(k, j);
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                acc = acc.add(ctx, &x.mul(ctx, y)?);
            }
            out.push(acc);
        }
    }
    Ok(Mat {
        rows: a.rows,
        cols: b.cols,
        data: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, K};
    use crate::util::Rng;

    fn ctx() -> Ctx {
        // twist depth 4 keeps star legal on products of the degree-2 samples
        Ctx::new(FieldSpec::new(2, 1, 2, 4).unwrap()).unwrap()
    }

    fn random_tw(rng: &mut Rng, ctx: &Ctx, var: TwVar, maxdeg: usize) -> TwistedPoly<ExactCoef> {
        let d = rng.below(maxdeg as u64 + 1) as usize;
        let coeffs = (0..=d)
            .map(|_| {
                // keep exponents theta-integral so deep negative twists stay legal
                let theta_pow = rng.below(3);
                let c = K(rng.below(ctx.fq.order) as u32);
                ExactCoef::theta_pow(ctx, theta_pow).mul(ctx, &ExactCoef::constant(ctx, c))
            })
            .collect();
        TwistedPoly::from_coeffs(var, coeffs)
    }

    #[test]
    fn tau_commutation_law() {
        let ctx = ctx();
        // tau * c = c^q * tau
        let c = ExactCoef::theta(&ctx);
        let tau = TwistedPoly::monomial(TwVar::Tau, ExactCoef::one(&ctx), 1);
        let lhs = tau
            .mul(&ctx, &TwistedPoly::constant(TwVar::Tau, c.clone()))
            .unwrap();
        let cq = c.twist(&ctx, 1).unwrap();
        let rhs = TwistedPoly::monomial(TwVar::Tau, cq, 1);
        assert_eq!(lhs, rhs);
        // identity
        let one = TwistedPoly::one(&ctx, TwVar::Tau);
        let a = TwistedPoly::monomial(TwVar::Tau, ExactCoef::theta(&ctx), 2);
        assert_eq!(a.mul(&ctx, &one).unwrap(), a);
    }

    #[test]
    fn associativity_by_expansion() {
        let ctx = ctx();
        let mut rng = Rng::new(19);
        for _ in 0..20 {
            let a = random_tw(&mut rng, &ctx, TwVar::Tau, 3);
            let b = random_tw(&mut rng, &ctx, TwVar::Tau, 3);
            let c = random_tw(&mut rng, &ctx, TwVar::Tau, 3);
            let lhs = a.mul(&ctx, &b).unwrap().mul(&ctx, &c).unwrap();
            let rhs = a.mul(&ctx, &b.mul(&ctx, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn star_examples_and_antimorphism() {
        let ctx = ctx();
        // star fixes base-field constants and swaps the variable
        let c = TwistedPoly::constant(TwVar::Tau, ExactCoef::one(&ctx));
        let s = c.star(&ctx).unwrap();
        assert_eq!(s.coeff(0), ExactCoef::one(&ctx));
        assert_eq!(s.var, TwVar::Sigma);
        // star(tau) = sigma
        let tau = TwistedPoly::monomial(TwVar::Tau, ExactCoef::one(&ctx), 1);
        let st = tau.star(&ctx).unwrap();
        assert_eq!(
            st,
            TwistedPoly::monomial(TwVar::Sigma, ExactCoef::one(&ctx), 1)
        );
        // star is an involution up to the variable swap
        let mut rng = Rng::new(23);
        for _ in 0..15 {
            let a = random_tw(&mut rng, &ctx, TwVar::Tau, 2);
            let b = random_tw(&mut rng, &ctx, TwVar::Tau, 2);
            // anti-morphism: star(ab) = star(b) star(a)
            let lhs = a.mul(&ctx, &b).unwrap().star(&ctx).unwrap();
            let rhs = b
                .star(&ctx)
                .unwrap()
                .mul(&ctx, &a.star(&ctx).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
            let back = a.star(&ctx).unwrap().star(&ctx).unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn star_reverses_matrix_products() {
        let ctx = ctx();
        let mut rng = Rng::new(29);
        for _ in 0..8 {
            let a = Mat::from_rows(vec![
                vec![
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                ],
                vec![
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                ],
            ]);
            let b = Mat::from_rows(vec![
                vec![
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                ],
                vec![
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                    random_tw(&mut rng, &ctx, TwVar::Tau, 2),
                ],
            ]);
            let lhs = star_mat(&ctx, &tw_mat_mul(&ctx, &a, &b).unwrap()).unwrap();
            let rhs = tw_mat_mul(
                &ctx,
                &star_mat(&ctx, &b).unwrap(),
                &star_mat(&ctx, &a).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn apply_composition() {
        let ctx = ctx();
        let mut rng = Rng::new(31);
        // apply(theta + tau, x) = theta x + x^q
        let rho_t = TwistedPoly::from_coeffs(
            TwVar::Tau,
            vec![ExactCoef::theta(&ctx), ExactCoef::one(&ctx)],
        );
        let x = RamSeries::new(1, 2, vec![K(1), K(2), K(3)], 20);
        let out = rho_t.apply(&ctx, &x, 30).unwrap();
        let expect = x.shift_theta(1).add(&ctx, &x.twist(&ctx, 1).unwrap());
        assert!(out.sub(&ctx, &expect).is_zero_within_prec());
        // apply(1, x) = x
        let one = TwistedPoly::one(&ctx, TwVar::Tau);
        assert!(one
            .apply(&ctx, &x, 30)
            .unwrap()
            .sub(&ctx, &x)
            .is_zero_within_prec());
        // apply(ab, x) = apply(a, apply(b, x))
        for _ in 0..10 {
            let a = random_tw(&mut rng, &ctx, TwVar::Tau, 2);
            let b = random_tw(&mut rng, &ctx, TwVar::Tau, 2);
            let lhs = a.mul(&ctx, &b).unwrap().apply(&ctx, &x, 30).unwrap();
            let rhs = a.apply(&ctx, &b.apply(&ctx, &x, 30).unwrap(), 30).unwrap();
            assert!(lhs.sub(&ctx, &rhs).is_zero_within_prec());
        }
        // additivity in the argument
        let y = RamSeries::new(1, 1, vec![K(2), K(1)], 20);
        for _ in 0..10 {
            let a = random_tw(&mut rng, &ctx, TwVar::Tau, 2);
            let lhs = a.apply(&ctx, &x.add(&ctx, &y), 30).unwrap();
            let rhs = a
                .apply(&ctx, &x, 30)
                .unwrap()
                .add(&ctx, &a.apply(&ctx, &y, 30).unwrap());
            assert!(lhs.sub(&ctx, &rhs).is_zero_within_prec());
        }
    }
}
