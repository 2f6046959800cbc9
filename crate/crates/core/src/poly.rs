//! Dense univariate polynomials and rational functions over the working
//! constants, plus characteristic-p binomials and hyperderivatives.
//!
//! The variable is anonymous; callers decide whether a value lives in
//! F_{q^m}[theta], F_q[t], or F_{q^m}[w].

use crate::error::{Error, Result};
use crate::field::{Ctx, Fq, K};

/// C(m, j) mod p by Lucas' theorem, digit-wise in base p.
pub fn binom_mod_p(m: u64, j: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let (mut m, mut j) = (m, j);
    while j > 0 || m > 0 {
        let (md, jd) = (m % p, j % p);
        if jd > md {
            return 0;
        }
        acc = acc * binom_small(md, jd) % p;
        m /= p;
        j /= p;
    }
    acc
}

fn binom_small(n: u64, k: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// C(s, j) mod p for a p-adic integer s = a/e (p not dividing e), again by
/// Lucas on the base-p digits of s.
pub fn binom_padic_mod_p(a: i64, e: u64, j: u64, p: u64) -> u64 {
    // digits of j determine how many digits of s we need
    let mut digits_needed = 1u32;
    let mut jj = j;
    while jj > 0 {
        digits_needed += 1;
        jj /= p;
    }
    let modulus = p.pow(digits_needed) as i128;
    let e_inv = mod_inv_i128(e as i128, modulus);
    let s = (((a as i128 % modulus + modulus) % modulus) * e_inv) % modulus;
    let mut acc = 1u64;
    let mut s = s as u64;
    let mut j = j;
    while j > 0 || s > 0 {
        let (sd, jd) = (s % p, j % p);
        if jd > sd {
            return 0;
        }
        acc = acc * binom_small(sd, jd) % p;
        s /= p;
        j /= p;
    }
    acc
}

fn mod_inv_i128(a: i128, m: i128) -> i128 {
    // extended Euclid; m is a prime power and gcd(a, m) = 1 by the callers
    let (mut old_r, mut r) = (a % m, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    ((old_s % m) + m) % m
}

/// Dense polynomial; `c[i]` is the coefficient of x^i. Always trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub c: Vec<K>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one(fq: &Fq) -> Poly {
        Poly { c: vec![fq.one()] }
    }

    pub fn constant(k: K) -> Poly {
        let mut p = Poly { c: vec![k] };
        p.trim();
        p
    }

    /// c * x^n.
    pub fn monomial(k: K, n: usize) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![K::ZERO; n + 1];
        c[n] = k;
        Poly { c }
    }

    pub fn x(fq: &Fq) -> Poly {
        Poly::monomial(fq.one(), 1)
    }

    pub fn from_coeffs(c: Vec<K>) -> Poly {
        let mut p = Poly { c };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.last().map_or(false, K::is_zero) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> K {
        self.c.get(i).copied().unwrap_or(K::ZERO)
    }

    pub fn lead(&self) -> K {
        self.c.last().copied().unwrap_or(K::ZERO)
    }

    pub fn add(&self, fq: &Fq, other: &Poly) -> Poly {
        let mut c = vec![K::ZERO; self.c.len().max(other.c.len())];
        for (i, slot) in c.iter_mut().enumerate() {
            *slot = fq.add(self.coeff(i), other.coeff(i));
        }
        Poly::from_coeffs(c)
    }

    pub fn neg(&self, fq: &Fq) -> Poly {
        Poly {
            c: self.c.iter().map(|&k| fq.neg(k)).collect(),
        }
    }

    pub fn sub(&self, fq: &Fq, other: &Poly) -> Poly {
        self.add(fq, &other.neg(fq))
    }

    pub fn mul(&self, fq: &Fq, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![K::ZERO; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] = fq.add(c[i + j], fq.mul(a, b));
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn scale(&self, fq: &Fq, k: K) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|&a| fq.mul(a, k)).collect())
    }

    pub fn pow(&self, fq: &Fq, mut e: u64) -> Poly {
        let mut acc = Poly::one(fq);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(fq, &b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(fq, &b);
            }
        }
        acc
    }

    /// (quotient, remainder) with remainder degree below deg(div).
    pub fn divrem(&self, fq: &Fq, div: &Poly) -> Result<(Poly, Poly)> {
        if div.is_zero() {
            return Err(Error::DivisionByZeroWithinPrecision(
                "polynomial division by zero".into(),
            ));
        }
        let d = div.deg().unwrap();
        let lead_inv = fq.inv(div.lead())?;
        let mut rem = self.clone();
        let mut quo = vec![K::ZERO; self.c.len().saturating_sub(d)];
        while let Some(rd) = rem.deg() {
            if rd < d {
                break;
            }
            let f = fq.mul(rem.lead(), lead_inv);
            let shift = rd - d;
            quo[shift] = f;
            for i in 0..=d {
                let v = fq.sub(rem.coeff(shift + i), fq.mul(f, div.coeff(i)));
                rem.c[shift + i] = v;
            }
            rem.trim();
        }
        Ok((Poly::from_coeffs(quo), rem))
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, fq: &Fq, div: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(fq, div)?;
        if !r.is_zero() {
            return Err(Error::Invalid("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn gcd(&self, fq: &Fq, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(fq, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(fq)
    }

    pub fn monic(&self, fq: &Fq) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = fq.inv(self.lead()).expect("nonzero lead");
        self.scale(fq, inv)
    }

    pub fn eval(&self, fq: &Fq, x: K) -> K {
        let mut acc = K::ZERO;
        for &c in self.c.iter().rev() {
            acc = fq.add(fq.mul(acc, x), c);
        }
        acc
    }

    /// j-th hyperderivative: x^n -> C(n, j) x^(n-j), term-wise.
    pub fn hyperderiv(&self, fq: &Fq, j: u64) -> Poly {
        if j == 0 {
            return self.clone();
        }
        let mut c = vec![K::ZERO; self.c.len().saturating_sub(j as usize)];
        for (n, &a) in self.c.iter().enumerate() {
            if a.is_zero() || (n as u64) < j {
                continue;
            }
            let b = binom_mod_p(n as u64, j, fq.p);
            if b != 0 {
                c[n - j as usize] = fq.mul(a, fq.scalar(b));
            }
        }
        Poly::from_coeffs(c)
    }

    /// Coefficient-wise q^k power (k >= 0) together with exponent scaling is
    /// NOT what this does; this is plain coefficient Frobenius, used for
    /// polynomials in t where the variable stays fixed.
    pub fn coeff_frob(&self, ctx: &Ctx, k: i64) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|&a| ctx.frob_q(a, k)).collect())
    }
}

/// Reduced fraction of dense polynomials; denominator monic and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc {
            num: Poly::zero(),
            den: Poly { c: vec![K(1)] },
        }
    }

    pub fn one(fq: &Fq) -> RatFunc {
        RatFunc {
            num: Poly::one(fq),
            den: Poly::one(fq),
        }
    }

    pub fn from_poly(fq: &Fq, p: Poly) -> RatFunc {
        let _ = fq;
        RatFunc {
            num: p,
            den: Poly { c: vec![K(1)] },
        }
    }

    pub fn new(fq: &Fq, num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroWithinPrecision(
                "zero denominator".into(),
            ));
        }
        let mut r = RatFunc { num, den };
        r.reduce(fq);
        Ok(r)
    }

    fn reduce(&mut self, fq: &Fq) {
        if self.num.is_zero() {
            self.den = Poly::one(fq);
            return;
        }
        let g = self.num.gcd(fq, &self.den);
        if g.deg() != Some(0) {
            self.num = self.num.div_exact(fq, &g).unwrap();
            self.den = self.den.div_exact(fq, &g).unwrap();
        }
        let lead_inv = fq.inv(self.den.lead()).unwrap();
        self.num = self.num.scale(fq, lead_inv);
        self.den = self.den.scale(fq, lead_inv);
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, fq: &Fq, o: &RatFunc) -> RatFunc {
        let num = self.num.mul(fq, &o.den).add(fq, &o.num.mul(fq, &self.den));
        let den = self.den.mul(fq, &o.den);
        RatFunc::new(fq, num, den).unwrap()
    }

    pub fn neg(&self, fq: &Fq) -> RatFunc {
        RatFunc {
            num: self.num.neg(fq),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, fq: &Fq, o: &RatFunc) -> RatFunc {
        self.add(fq, &o.neg(fq))
    }

    pub fn mul(&self, fq: &Fq, o: &RatFunc) -> RatFunc {
        RatFunc::new(fq, self.num.mul(fq, &o.num), self.den.mul(fq, &o.den)).unwrap()
    }

    pub fn inv(&self, fq: &Fq) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroWithinPrecision(
                "inverse of zero rational function".into(),
            ));
        }
        RatFunc::new(fq, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, fq: &Fq, o: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(fq, &o.inv(fq)?))
    }

    pub fn scale(&self, fq: &Fq, k: K) -> RatFunc {
        RatFunc::new(fq, self.num.scale(fq, k), self.den.clone()).unwrap()
    }

    pub fn eval(&self, fq: &Fq, x: K) -> Result<K> {
        let d = self.den.eval(fq, x);
        if d.is_zero() {
            return Err(Error::DivisionByZeroWithinPrecision(
                "denominator vanishes at evaluation point".into(),
            ));
        }
        Ok(fq.mul(self.num.eval(fq, x), fq.inv(d)?))
    }

    /// j-th hyperderivative via the characteristic-p quotient formula
    ///
    ///   d^j(1/f) = sum_{e=1..j} C(j+1, e+1) (-1)^e f^{-(e+1)} d^j(f^e)
    ///
    /// combined with the product rule on num * (1/den).
    pub fn hyperderiv(&self, fq: &Fq, j: u64) -> RatFunc {
        if j == 0 {
            return self.clone();
        }
        // d^c(1/den) for c = 0..j
        let mut inv_derivs: Vec<RatFunc> = Vec::with_capacity(j as usize + 1);
        inv_derivs.push(RatFunc::new(fq, Poly::one(fq), self.den.clone()).unwrap());
        for c in 1..=j {
            let mut acc = RatFunc::zero();
            let mut fpow = Poly::one(fq);
            for e in 1..=c {
                fpow = fpow.mul(fq, &self.den); // den^e
                let b = binom_mod_p(c + 1, e + 1, fq.p);
                if b == 0 {
                    continue;
                }
                let d_fe = fpow.hyperderiv(fq, c);
                if d_fe.is_zero() {
                    continue;
                }
                let mut term = RatFunc::new(fq, d_fe, self.den.pow(fq, e + 1)).unwrap();
                term = term.scale(fq, fq.scalar(b));
                if e % 2 == 1 {
                    term = term.neg(fq);
                }
                acc = acc.add(fq, &term);
            }
            inv_derivs.push(acc);
        }
        // product rule: d^j(num * inv) = sum_i d^i(num) d^(j-i)(inv)
        let mut out = RatFunc::zero();
        for i in 0..=j {
            let dn = self.num.hyperderiv(fq, i);
            if dn.is_zero() {
                continue;
            }
            let term = inv_derivs[(j - i) as usize].mul(fq, &RatFunc::from_poly(fq, dn));
            out = out.add(fq, &term);
        }
        out
    }

    pub fn coeff_frob(&self, ctx: &Ctx, k: i64) -> RatFunc {
        RatFunc::new(
            &ctx.fq,
            self.num.coeff_frob(ctx, k),
            self.den.coeff_frob(ctx, k),
        )
        .unwrap()
    }
}
