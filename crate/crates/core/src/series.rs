//! Truncated Laurent series in a ramified variable.
//!
//! A [`RamSeries`] stores the known digits of an element of the Laurent
//! series field in vartheta, where vartheta^e = theta. Digits live at
//! integer vartheta-exponents, highest first, and `prec` records the ledger:
//! the value is known modulo O(vartheta^(-prec)). Every operation
//! propagates the worst-case window; no digit is ever reported beyond it.

use crate::error::{Error, Result};
use crate::exact::ExactCoef;
use crate::field::{Ctx, K};
use crate::poly::binom_padic_mod_p;

/// Sentinel precision for exactly known values (finite digit support).
pub const EXACT: i64 = i64::MAX / 4;

fn padd(a: i64, b: i64) -> i64 {
    // EXACT is absorbing: exact knowledge survives finite shifts
    if a >= EXACT || b >= EXACT {
        return EXACT;
    }
    a.saturating_add(b).min(EXACT)
}

fn pmin(a: i64, b: i64) -> i64 {
    a.min(b)
}

#[derive(Debug, Clone)]
pub struct RamSeries {
    /// Ramification index: vartheta^e = theta.
    pub e: u32,
    /// Exponent of `coeffs[0]`; meaningless when `coeffs` is empty.
    pub lead: i64,
    /// Digits at exponents lead, lead-1, ... with `coeffs[0]` nonzero.
    pub coeffs: Vec<K>,
    /// Known modulo O(vartheta^(-prec)).
    pub prec: i64,
}

impl PartialEq for RamSeries {
    fn eq(&self, other: &Self) -> bool {
        self.e == other.e
            && self.prec == other.prec
            && self.coeffs == other.coeffs
            && (self.coeffs.is_empty() || self.lead == other.lead)
    }
}

impl Eq for RamSeries {}

impl RamSeries {
    pub fn new(e: u32, lead: i64, coeffs: Vec<K>, prec: i64) -> RamSeries {
        let mut s = RamSeries {
            e,
            lead,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    /// The exact zero.
    pub fn zero(e: u32) -> RamSeries {
        RamSeries {
            e,
            lead: 0,
            coeffs: Vec::new(),
            prec: EXACT,
        }
    }

    /// Zero as far as the window knows: O(vartheta^(-prec)) with no digits.
    pub fn zero_prec(e: u32, prec: i64) -> RamSeries {
        RamSeries {
            e,
            lead: 0,
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn constant(e: u32, k: K) -> RamSeries {
        RamSeries::new(e, 0, vec![k], EXACT)
    }

    pub fn one(ctx: &Ctx, e: u32) -> RamSeries {
        RamSeries::constant(e, ctx.fq.one())
    }

    /// k * vartheta^exp.
    pub fn monomial(e: u32, k: K, exp: i64) -> RamSeries {
        RamSeries::new(e, exp, vec![k], EXACT)
    }

    /// theta as a vartheta-monomial.
    pub fn theta(ctx: &Ctx, e: u32) -> RamSeries {
        RamSeries::monomial(e, ctx.fq.one(), e as i64)
    }

    fn normalize(&mut self) {
        // drop digits at or below the window floor
        if self.prec < EXACT {
            let floor = -self.prec; // smallest unknown exponent boundary: keep exp > floor
            if !self.coeffs.is_empty() {
                let last_exp = self.lead - (self.coeffs.len() as i64 - 1);
                if last_exp <= floor {
                    let keep = (self.lead - floor) as i64;
                    if keep <= 0 {
                        self.coeffs.clear();
                    } else {
                        self.coeffs.truncate(keep as usize);
                    }
                }
            }
        }
        // trim leading zeros
        let mut drop = 0;
        for c in &self.coeffs {
            if c.is_zero() {
                drop += 1;
            } else {
                break;
            }
        }
        if drop > 0 {
            self.coeffs.drain(..drop);
            self.lead -= drop as i64;
        }
        // trim trailing zeros (absent digits inside the window read as zero)
        while self.coeffs.last().map_or(false, K::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lead = 0;
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec >= EXACT
    }

    /// No nonzero digit inside the certified window.
    pub fn is_zero_within_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest exponent carrying a nonzero known digit.
    pub fn max_nonzero_exp(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lead)
        }
    }

    /// Upper bound L with self = O(vartheta^L).
    pub fn lead_bound(&self) -> i64 {
        if !self.coeffs.is_empty() {
            self.lead
        } else if self.prec >= EXACT {
            -EXACT
        } else {
            -self.prec
        }
    }

    /// Known digit at an exponent: None when outside the window.
    pub fn digit(&self, exp: i64) -> Option<K> {
        if self.prec < EXACT && exp <= -self.prec {
            return None;
        }
        if self.coeffs.is_empty() || exp > self.lead {
            return Some(K::ZERO);
        }
        let idx = self.lead - exp;
        if idx < self.coeffs.len() as i64 {
            Some(self.coeffs[idx as usize])
        } else {
            Some(K::ZERO)
        }
    }

    /// Ramification index of a binary result. Index 0 acts as a wildcard so
    /// that ring-generic zeros and ones combine with any series.
    fn merge_e(&self, o: &RamSeries) -> u32 {
        if self.e == 0 {
            o.e
        } else if o.e == 0 {
            self.e
        } else {
            assert_eq!(self.e, o.e, "ramification indices must match");
            self.e
        }
    }

    pub fn add(&self, ctx: &Ctx, o: &RamSeries) -> RamSeries {
        let e = self.merge_e(o);
        let prec = pmin(self.prec, o.prec);
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return RamSeries::zero_prec_or_exact(e, prec);
        }
        let hi = match (self.coeffs.is_empty(), o.coeffs.is_empty()) {
            (false, false) => self.lead.max(o.lead),
            (false, true) => self.lead,
            (true, false) => o.lead,
            (true, true) => unreachable!(),
        };
        let lo = if prec >= EXACT {
            let tail = |s: &RamSeries| {
                if s.coeffs.is_empty() {
                    hi
                } else {
                    s.lead - s.coeffs.len() as i64 + 1
                }
            };
            tail(self).min(tail(o))
        } else {
            -prec + 1
        };
        let mut coeffs = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        let mut exp = hi;
        while exp >= lo {
            let a = self.digit_unchecked(exp);
            let b = o.digit_unchecked(exp);
            coeffs.push(ctx.fq.add(a, b));
            exp -= 1;
        }
        RamSeries::new(e, hi, coeffs, prec)
    }

    fn digit_unchecked(&self, exp: i64) -> K {
        if self.coeffs.is_empty() || exp > self.lead {
            return K::ZERO;
        }
        let idx = self.lead - exp;
        if idx >= 0 && idx < self.coeffs.len() as i64 {
            self.coeffs[idx as usize]
        } else {
            K::ZERO
        }
    }

    fn zero_prec_or_exact(e: u32, prec: i64) -> RamSeries {
        if prec >= EXACT {
            RamSeries::zero(e)
        } else {
            RamSeries::zero_prec(e, prec)
        }
    }

    pub fn neg(&self, ctx: &Ctx) -> RamSeries {
        RamSeries {
            e: self.e,
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|&k| ctx.fq.neg(k)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, ctx: &Ctx, o: &RamSeries) -> RamSeries {
        self.add(ctx, &o.neg(ctx))
    }

    pub fn scale(&self, ctx: &Ctx, k: K) -> RamSeries {
        if k.is_zero() {
            return RamSeries::zero_prec_or_exact(self.e, self.prec);
        }
        RamSeries::new(
            self.e,
            self.lead,
            self.coeffs.iter().map(|&c| ctx.fq.mul(c, k)).collect(),
            self.prec,
        )
    }

    /// Multiply by vartheta^k.
    pub fn shift(&self, k: i64) -> RamSeries {
        RamSeries {
            e: self.e,
            lead: self.lead + k,
            coeffs: self.coeffs.clone(),
            prec: if self.prec >= EXACT {
                EXACT
            } else {
                self.prec - k
            },
        }
    }

    /// Multiply by theta^k (k may be negative).
    pub fn shift_theta(&self, k: i64) -> RamSeries {
        self.shift(k * self.e as i64)
    }

    pub fn mul(&self, ctx: &Ctx, o: &RamSeries) -> RamSeries {
        let e = self.merge_e(o);
        let la = self.lead_bound();
        let lb = o.lead_bound();
        let prec = pmin(
            pmin(padd(o.prec, -la), padd(self.prec, -lb)),
            padd(self.prec, o.prec),
        );
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return RamSeries::zero_prec_or_exact(e, prec);
        }
        let hi = la + lb;
        let lo = if prec >= EXACT {
            hi - (self.coeffs.len() as i64 - 1) - (o.coeffs.len() as i64 - 1)
        } else {
            (-prec + 1).max(hi - (self.coeffs.len() as i64 - 1) - (o.coeffs.len() as i64 - 1))
        };
        if lo > hi {
            return RamSeries::zero_prec_or_exact(e, prec);
        }
        let n = (hi - lo + 1) as usize;
        let mut coeffs = vec![K::ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ea = self.lead - i as i64;
            for (j, &b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let exp = ea + o.lead - j as i64;
                if exp < lo {
                    break;
                }
                let idx = (hi - exp) as usize;
                coeffs[idx] = ctx.fq.add(coeffs[idx], ctx.fq.mul(a, b));
            }
        }
        RamSeries::new(e, hi, coeffs, prec)
    }

    /// Inverse, expanded down to `prec_cap` digits of absolute precision for
    /// exact inputs. Errors when no nonzero digit is known.
    pub fn inv(&self, ctx: &Ctx, prec_cap: i64) -> Result<RamSeries> {
        if self.coeffs.is_empty() {
            return Err(Error::DivisionByZeroWithinPrecision(
                "no nonzero digit within the certified window".into(),
            ));
        }
        let la = self.lead;
        let derived = padd(self.prec, 2 * la);
        let prec_out = pmin(derived, prec_cap);
        // write self = c * vartheta^la * (1 - s), |s| < 1
        let c_inv = ctx.fq.inv(self.coeffs[0])?;
        let mut tail = self.scale(ctx, c_inv).shift(-la); // 1 - s
        tail = RamSeries::one(ctx, self.e).sub(ctx, &tail); // s, lead <= -1
                                                            // geometric series: (1 - s)^(-1) = sum s^k, truncated at prec_out digits
        let digits_needed = prec_out; // result exponents go down to -prec_out + 1 after shifting by -la
        let rel_window = padd(digits_needed, -la) + 1;
        tail = tail.truncate(rel_window);
        let mut acc = RamSeries::one(ctx, self.e);
        let mut power = RamSeries::one(ctx, self.e);
        let tail_lead = tail.lead_bound(); // <= -1
        if !tail.is_zero_within_prec() || tail.prec < EXACT {
            let mut k = 0i64;
            loop {
                k += 1;
                if tail_lead * k < -rel_window {
                    break;
                }
                power = power.mul(ctx, &tail).truncate(rel_window);
                if power.is_zero_within_prec() {
                    break;
                }
                acc = acc.add(ctx, &power);
            }
        }
        let out = acc.scale(ctx, c_inv).shift(-la).truncate(prec_out);
        Ok(out)
    }

    /// Caps the ledger at `prec` (never extends it).
    pub fn truncate(&self, prec: i64) -> RamSeries {
        if prec >= self.prec {
            return self.clone();
        }
        RamSeries::new(self.e, self.lead, self.coeffs.clone(), prec)
    }

    /// Frobenius twist by q^n: digits are powered, exponents scale by q^n.
    /// Exact on digits because (x + y)^q = x^q + y^q.
    pub fn twist(&self, ctx: &Ctx, n: i64) -> Result<RamSeries> {
        if n == 0 {
            return Ok(self.clone());
        }
        let q = ctx.spec.q();
        if n > 0 {
            let scale = q
                .checked_pow(n as u32)
                .ok_or_else(|| Error::Invalid("twist exponent overflow".into()))?
                as i64;
            let prec = if self.prec >= EXACT {
                EXACT
            } else {
                self.prec.saturating_mul(scale).min(EXACT)
            };
            return Ok(self.map_exponents(ctx, n, |e| e * scale, prec));
        }
        let scale = q
            .checked_pow((-n) as u32)
            .ok_or_else(|| Error::Invalid("twist exponent overflow".into()))?
            as i64;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() && (self.lead - i as i64) % scale != 0 {
                return Err(Error::NonTwistable(format!(
                    "digit exponent {} not divisible by q^{}",
                    self.lead - i as i64,
                    -n
                )));
            }
        }
        let prec = if self.prec >= EXACT {
            EXACT
        } else {
            // digit j of the root is known iff j * scale > -prec
            (self.prec + scale - 1).div_euclid(scale)
        };
        Ok(self.map_exponents(ctx, n, |e| e.div_euclid(scale), prec))
    }

    fn map_exponents(&self, ctx: &Ctx, n: i64, f: impl Fn(i64) -> i64, prec: i64) -> RamSeries {
        if self.coeffs.is_empty() {
            return RamSeries::zero_prec_or_exact(self.e, prec);
        }
        let lead = f(self.lead);
        let lo = f(self.lead - self.coeffs.len() as i64 + 1);
        let mut coeffs = vec![K::ZERO; (lead - lo + 1) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let exp = f(self.lead - i as i64);
            coeffs[(lead - exp) as usize] = ctx.frob_q(c, n);
        }
        RamSeries::new(self.e, lead, coeffs, prec)
    }

    /// j-th hyperderivative with respect to theta, via the unique extension
    /// to the (separable, p not dividing e) ramified variable:
    ///
    ///   d_theta^j(vartheta^a) = C(a/e, j) vartheta^(a - j e)
    ///
    /// with the binomial read p-adically.
    pub fn hyperderiv_theta(&self, ctx: &Ctx, j: u64) -> Result<RamSeries> {
        if j == 0 {
            return Ok(self.clone());
        }
        if self.e == 0 {
            // wildcard constants (ring-generic zeros and ones) are killed
            return Ok(RamSeries::zero_prec_or_exact(0, self.prec));
        }
        if self.e as u64 % ctx.spec.p == 0 {
            return Err(Error::InseparableRamification(self.e));
        }
        let je = j as i64 * self.e as i64;
        let prec = padd(self.prec, je);
        if self.coeffs.is_empty() {
            return Ok(RamSeries::zero_prec_or_exact(self.e, prec));
        }
        let mut coeffs = vec![K::ZERO; self.coeffs.len()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = self.lead - i as i64;
            let b = binom_padic_mod_p(a, self.e as u64, j, ctx.spec.p);
            if b != 0 {
                coeffs[i] = ctx.fq.mul(c, ctx.fq.scalar(b));
            }
        }
        Ok(RamSeries::new(self.e, self.lead - je, coeffs, prec))
    }

    /// Compares two values up to their shared certified window.
    pub fn agrees_within_prec(&self, ctx: &Ctx, o: &RamSeries) -> bool {
        self.sub(ctx, o).is_zero_within_prec()
    }

    /// Canonical text form; round-trips bit-exactly through [`parse_ram_series`].
    pub fn to_text(&self, ctx: &Ctx) -> String {
        let mut terms = String::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !terms.is_empty() {
                terms.push(',');
            }
            terms.push_str(&format!("({},{})", self.lead - i as i64, c.0));
        }
        let prec = if self.prec >= EXACT {
            "exact".to_string()
        } else {
            self.prec.to_string()
        };
        format!(
            "e={}; m={}; terms=[{}]; prec={}",
            self.e, ctx.spec.m, terms, prec
        )
    }
}

/// Parses the canonical text form produced by [`RamSeries::to_text`].
pub fn parse_ram_series(ctx: &Ctx, s: &str) -> Result<RamSeries> {
    let fail = |msg: &str, col: usize| Error::parse(1, col, msg.to_string());
    let mut e: Option<u32> = None;
    let mut m: Option<u32> = None;
    let mut prec: Option<i64> = None;
    let mut terms: Vec<(i64, u64)> = Vec::new();
    for part in s.split(';') {
        let part_trim = part.trim();
        let col = 1 + (part.as_ptr() as usize - s.as_ptr() as usize);
        let Some((key, val)) = part_trim.split_once('=') else {
            return Err(fail("expected key=value", col));
        };
        match key.trim() {
            "e" => e = Some(val.trim().parse().map_err(|_| fail("bad e", col))?),
            "m" => m = Some(val.trim().parse().map_err(|_| fail("bad m", col))?),
            "prec" => {
                let v = val.trim();
                prec = Some(if v == "exact" {
                    EXACT
                } else {
                    v.parse().map_err(|_| fail("bad prec", col))?
                });
            }
            "terms" => {
                let v = val.trim();
                let inner = v
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .ok_or_else(|| fail("terms must be bracketed", col))?;
                if !inner.is_empty() {
                    for t in inner.split("),") {
                        let t = t.trim().trim_start_matches('(').trim_end_matches(')');
                        let (a, b) = t.split_once(',').ok_or_else(|| fail("bad term", col))?;
                        terms.push((
                            a.trim().parse().map_err(|_| fail("bad exponent", col))?,
                            b.trim().parse().map_err(|_| fail("bad coefficient", col))?,
                        ));
                    }
                }
            }
            other => return Err(fail(&format!("unknown key '{other}'"), col)),
        }
    }
    let e = e.ok_or_else(|| fail("missing e", 1))?;
    let m = m.ok_or_else(|| fail("missing m", 1))?;
    let prec = prec.ok_or_else(|| fail("missing prec", 1))?;
    if m != ctx.spec.m {
        return Err(Error::Invalid(format!(
            "series constants live in extension degree m={m}, context has m={}",
            ctx.spec.m
        )));
    }
    if terms.is_empty() {
        return Ok(if prec >= EXACT {
            RamSeries::zero(e)
        } else {
            RamSeries::zero_prec(e, prec)
        });
    }
    let lead = terms.iter().map(|&(x, _)| x).max().unwrap();
    let lo = terms.iter().map(|&(x, _)| x).min().unwrap();
    let mut coeffs = vec![K::ZERO; (lead - lo + 1) as usize];
    for (exp, c) in terms {
        coeffs[(lead - exp) as usize] = ctx.fq.from_encoding(c)?;
    }
    Ok(RamSeries::new(e, lead, coeffs, prec))
}

/// Evaluates an exact w-rational coefficient as a series at ramification
/// index e, expanding the denominator down to `prec` digits. The w-exponent
/// a maps to the vartheta-exponent a*e/q^D, which must be integral.
pub fn exact_to_series(ctx: &Ctx, x: &ExactCoef, e: u32, prec: i64) -> Result<RamSeries> {
    let num = wpoly_to_series(ctx, &x.num, e)?;
    let den = wpoly_to_series(ctx, &x.den, e)?;
    if x.den.deg() == Some(0) {
        return Ok(num.scale(ctx, ctx.fq.inv(x.den.coeff(0))?));
    }
    let den_inv = den.inv(ctx, padd(prec, num.lead_bound().max(0)))?;
    Ok(num.mul(ctx, &den_inv).truncate(prec))
}

fn wpoly_to_series(ctx: &Ctx, p: &crate::poly::Poly, e: u32) -> Result<RamSeries> {
    let qd = ctx.spec.q_pow(ctx.spec.d_twist) as i64;
    let mut out = RamSeries::zero(e);
    for (a, &c) in p.c.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let scaled = a as i64 * e as i64;
        if scaled % qd != 0 {
            return Err(Error::NonTwistable(format!(
                "w-exponent {a} does not map to an integral vartheta-exponent at e = {e}"
            )));
        }
        out = out.add(ctx, &RamSeries::monomial(e, c, scaled / qd));
    }
    Ok(out)
}
