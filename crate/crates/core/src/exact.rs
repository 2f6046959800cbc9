//! Exact coefficients: rational functions over F_{q^m} in the perfected
//! variable w with theta = w^{q^D}, and t-polynomials over them.
//!
//! Working in w instead of theta keeps every negative Frobenius twist down
//! to depth D exact: theta^(1/q^j) = w^(q^(D-j)) for j <= D.

use crate::error::{Error, Result};
use crate::field::{Ctx, K};
use crate::poly::{Poly, RatFunc};

/// Reduced fraction in F_{q^m}(w); denominator monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCoef {
    pub num: Poly,
    pub den: Poly,
}

impl ExactCoef {
    pub fn zero() -> ExactCoef {
        ExactCoef {
            num: Poly::zero(),
            den: Poly { c: vec![K(1)] },
        }
    }

    pub fn one(ctx: &Ctx) -> ExactCoef {
        ExactCoef {
            num: Poly::one(&ctx.fq),
            den: Poly::one(&ctx.fq),
        }
    }

    pub fn constant(ctx: &Ctx, k: K) -> ExactCoef {
        let _ = ctx;
        ExactCoef {
            num: Poly::constant(k),
            den: Poly { c: vec![K(1)] },
        }
    }

    pub fn from_rat(r: RatFunc) -> ExactCoef {
        ExactCoef {
            num: r.num,
            den: r.den,
        }
    }

    fn rat(&self) -> RatFunc {
        RatFunc {
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    pub fn new(ctx: &Ctx, num: Poly, den: Poly) -> Result<ExactCoef> {
        Ok(ExactCoef::from_rat(RatFunc::new(&ctx.fq, num, den)?))
    }

    /// theta as a w-monomial: w^(q^D).
    pub fn theta(ctx: &Ctx) -> ExactCoef {
        let e = ctx.spec.q_pow(ctx.spec.d_twist);
        ExactCoef {
            num: Poly::monomial(ctx.fq.one(), e as usize),
            den: Poly::one(&ctx.fq),
        }
    }

    /// theta^n for n >= 0.
    pub fn theta_pow(ctx: &Ctx, n: u64) -> ExactCoef {
        let e = ctx.spec.q_pow(ctx.spec.d_twist) * n;
        ExactCoef {
            num: Poly::monomial(ctx.fq.one(), e as usize),
            den: Poly::one(&ctx.fq),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, ctx: &Ctx, o: &ExactCoef) -> ExactCoef {
        ExactCoef::from_rat(self.rat().add(&ctx.fq, &o.rat()))
    }

    pub fn sub(&self, ctx: &Ctx, o: &ExactCoef) -> ExactCoef {
        ExactCoef::from_rat(self.rat().sub(&ctx.fq, &o.rat()))
    }

    pub fn neg(&self, ctx: &Ctx) -> ExactCoef {
        ExactCoef::from_rat(self.rat().neg(&ctx.fq))
    }

    pub fn mul(&self, ctx: &Ctx, o: &ExactCoef) -> ExactCoef {
        ExactCoef::from_rat(self.rat().mul(&ctx.fq, &o.rat()))
    }

    pub fn inv(&self, ctx: &Ctx) -> Result<ExactCoef> {
        Ok(ExactCoef::from_rat(self.rat().inv(&ctx.fq)?))
    }

    pub fn div(&self, ctx: &Ctx, o: &ExactCoef) -> Result<ExactCoef> {
        Ok(ExactCoef::from_rat(self.rat().div(&ctx.fq, &o.rat())?))
    }

    /// Frobenius twist by q^n. Constants are powered; w-exponents scale so
    /// that theta goes to theta^(q^n). Negative n needs every w-exponent
    /// divisible by q^|n|.
    pub fn twist(&self, ctx: &Ctx, n: i64) -> Result<ExactCoef> {
        let num = twist_poly(ctx, &self.num, n)?;
        let den = twist_poly(ctx, &self.den, n)?;
        ExactCoef::new(ctx, num, den)
    }

    /// True when every w-exponent is a multiple of q^D, i.e. the value is a
    /// rational function of theta alone.
    pub fn is_theta_rational(&self, ctx: &Ctx) -> bool {
        let step = ctx.spec.q_pow(ctx.spec.d_twist) as usize;
        poly_supported_on(&self.num, step) && poly_supported_on(&self.den, step)
    }

    /// Reads the value as num/den in theta when possible.
    pub fn as_theta_rat(&self, ctx: &Ctx) -> Result<RatFunc> {
        if !self.is_theta_rational(ctx) {
            return Err(Error::NonTwistable(
                "value involves fractional powers of theta".into(),
            ));
        }
        let step = ctx.spec.q_pow(ctx.spec.d_twist) as usize;
        RatFunc::new(
            &ctx.fq,
            compress(&self.num, step),
            compress(&self.den, step),
        )
    }

    /// Lifts a rational function of theta into the w-representation.
    pub fn from_theta_rat(ctx: &Ctx, r: &RatFunc) -> ExactCoef {
        let step = ctx.spec.q_pow(ctx.spec.d_twist) as usize;
        ExactCoef {
            num: stretch(&r.num, step),
            den: stretch(&r.den, step),
        }
    }

    /// Exact leading vartheta-exponent at ramification index e, straight
    /// from the polynomial degrees; None for zero.
    pub fn lead_exponent(&self, ctx: &Ctx, e: u32) -> Option<i64> {
        let dn = self.num.deg()? as i64;
        let dd = self.den.deg().unwrap_or(0) as i64;
        let qd = ctx.spec.q_pow(ctx.spec.d_twist) as i64;
        Some(((dn - dd) * e as i64).div_euclid(qd))
    }
}

fn poly_supported_on(p: &Poly, step: usize) -> bool {
    p.c.iter()
        .enumerate()
        .all(|(i, c)| c.is_zero() || i % step == 0)
}

fn compress(p: &Poly, step: usize) -> Poly {
    let mut c = Vec::new();
    for (i, &k) in p.c.iter().enumerate() {
        if i % step == 0 {
            c.push(k);
        } else {
            debug_assert!(k.is_zero());
        }
    }
    Poly::from_coeffs(c)
}

fn stretch(p: &Poly, step: usize) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let mut c = vec![K::ZERO; (p.c.len() - 1) * step + 1];
    for (i, &k) in p.c.iter().enumerate() {
        c[i * step] = k;
    }
    Poly::from_coeffs(c)
}

fn twist_poly(ctx: &Ctx, p: &Poly, n: i64) -> Result<Poly> {
    if p.is_zero() {
        return Ok(Poly::zero());
    }
    if n == 0 {
        return Ok(p.clone());
    }
    if n > 0 {
        let scale = ctx
            .spec
            .q()
            .checked_pow(n as u32)
            .ok_or_else(|| Error::Invalid("twist exponent overflow".into()))?
            as usize;
        let mut c = vec![K::ZERO; (p.c.len() - 1) * scale + 1];
        for (i, &k) in p.c.iter().enumerate() {
            if !k.is_zero() {
                c[i * scale] = ctx.frob_q(k, n);
            }
        }
        Ok(Poly::from_coeffs(c))
    } else {
        let scale = ctx
            .spec
            .q()
            .checked_pow((-n) as u32)
            .ok_or_else(|| Error::Invalid("twist exponent overflow".into()))?
            as usize;
        let mut c = vec![K::ZERO; (p.c.len() - 1) / scale + 1];
        for (i, &k) in p.c.iter().enumerate() {
            if k.is_zero() {
                continue;
            }
            if i % scale != 0 {
                return Err(Error::TwistDepthExceeded(format!(
                    "w-exponent {i} not divisible by q^{}",
                    -n
                )));
            }
            c[i / scale] = ctx.frob_q(k, n);
        }
        Ok(Poly::from_coeffs(c))
    }
}

/// Dense polynomial in t with [`ExactCoef`] coefficients. These carry the
/// sigma-multiplication matrices and endomorphism matrices; t never twists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefPoly {
    pub c: Vec<ExactCoef>,
}

impl CoefPoly {
    pub fn zero() -> CoefPoly {
        CoefPoly { c: Vec::new() }
    }

    pub fn one(ctx: &Ctx) -> CoefPoly {
        CoefPoly {
            c: vec![ExactCoef::one(ctx)],
        }
    }

    pub fn constant(e: ExactCoef) -> CoefPoly {
        let mut p = CoefPoly { c: vec![e] };
        p.trim();
        p
    }

    /// c * t^n.
    pub fn monomial(e: ExactCoef, n: usize) -> CoefPoly {
        if e.is_zero() {
            return CoefPoly::zero();
        }
        let mut c = vec![ExactCoef::zero(); n + 1];
        c[n] = e;
        CoefPoly { c }
    }

    pub fn from_coeffs(c: Vec<ExactCoef>) -> CoefPoly {
        let mut p = CoefPoly { c };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.last().map_or(false, ExactCoef::is_zero) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, i: usize) -> ExactCoef {
        self.c.get(i).cloned().unwrap_or_else(ExactCoef::zero)
    }

    pub fn add(&self, ctx: &Ctx, o: &CoefPoly) -> CoefPoly {
        let mut c = Vec::with_capacity(self.c.len().max(o.c.len()));
        for i in 0..self.c.len().max(o.c.len()) {
            c.push(self.coeff(i).add(ctx, &o.coeff(i)));
        }
        CoefPoly::from_coeffs(c)
    }

    pub fn neg(&self, ctx: &Ctx) -> CoefPoly {
        CoefPoly {
            c: self.c.iter().map(|e| e.neg(ctx)).collect(),
        }
    }

    pub fn sub(&self, ctx: &Ctx, o: &CoefPoly) -> CoefPoly {
        self.add(ctx, &o.neg(ctx))
    }

    pub fn mul(&self, ctx: &Ctx, o: &CoefPoly) -> CoefPoly {
        if self.is_zero() || o.is_zero() {
            return CoefPoly::zero();
        }
        let mut c = vec![ExactCoef::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(ctx, &a.mul(ctx, b));
            }
        }
        CoefPoly::from_coeffs(c)
    }

    /// Twists every coefficient; t stays fixed.
    pub fn twist(&self, ctx: &Ctx, n: i64) -> Result<CoefPoly> {
        let mut c = Vec::with_capacity(self.c.len());
        for e in &self.c {
            c.push(e.twist(ctx, n)?);
        }
        Ok(CoefPoly::from_coeffs(c))
    }

    /// j-th hyperderivative in t: only the t-exponents move.
    pub fn hyperderiv_t(&self, ctx: &Ctx, j: u64) -> CoefPoly {
        if j == 0 {
            return self.clone();
        }
        let mut c = vec![ExactCoef::zero(); self.c.len().saturating_sub(j as usize)];
        for (n, a) in self.c.iter().enumerate() {
            if a.is_zero() || (n as u64) < j {
                continue;
            }
            let b = crate::poly::binom_mod_p(n as u64, j, ctx.spec.p);
            if b != 0 {
                c[n - j as usize] = a.mul(ctx, &ExactCoef::constant(ctx, ctx.fq.scalar(b)));
            }
        }
        CoefPoly::from_coeffs(c)
    }
}
