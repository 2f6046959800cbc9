//! Drinfeld modules: coefficient data, exponential / logarithm /
//! quasi-periodic series with exact coefficients, entire-series evaluation
//! with convergence certificates, endomorphism verification, and the
//! rank-one period.

use crate::error::{Error, Result};
use crate::exact::ExactCoef;
use crate::field::{Ctx, FieldSpec, K};
use crate::series::{exact_to_series, RamSeries, EXACT};
use crate::twisted::{TwVar, TwistedPoly};

/// rho_t = theta + kappa_1 tau + ... + kappa_r tau^r with kappa_r invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrinfeldModule {
    pub spec: FieldSpec,
    pub rank: u32,
    /// kappa[i] is the coefficient of tau^(i+1).
    pub kappa: Vec<ExactCoef>,
}

impl DrinfeldModule {
    pub fn new(ctx: &Ctx, kappa: Vec<ExactCoef>) -> Result<DrinfeldModule> {
        if kappa.is_empty() {
            return Err(Error::Invalid(
                "a Drinfeld module needs rank at least 1".into(),
            ));
        }
        if kappa.last().unwrap().is_zero() {
            return Err(Error::Invalid(
                "leading coefficient kappa_r must be nonzero".into(),
            ));
        }
        Ok(DrinfeldModule {
            spec: ctx.spec,
            rank: kappa.len() as u32,
            kappa,
        })
    }

    /// The Carlitz module: rho_t = theta + tau.
    pub fn carlitz(ctx: &Ctx) -> DrinfeldModule {
        DrinfeldModule::new(ctx, vec![ExactCoef::one(ctx)]).unwrap()
    }

    pub fn rho_t(&self, ctx: &Ctx) -> TwistedPoly<ExactCoef> {
        let mut coeffs = Vec::with_capacity(self.rank as usize + 1);
        coeffs.push(ExactCoef::theta(ctx));
        coeffs.extend(self.kappa.iter().cloned());
        TwistedPoly::from_coeffs(TwVar::Tau, coeffs)
    }

    pub fn kappa_at(&self, i: u32) -> ExactCoef {
        if i == 0 || i > self.rank {
            ExactCoef::zero()
        } else {
            self.kappa[(i - 1) as usize].clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Exp,
    Log,
    /// Quasi-periodic series for the biderivation t -> tau^j (j >= 1), or
    /// for the inner biderivation rho_t - theta when j = 0.
    Quasi(u32),
}

/// F_q-linear entire series sum c_h z^(q^h) with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntireSeries {
    pub kind: SeriesKind,
    /// coeffs[h] multiplies z^(q^h).
    pub coeffs: Vec<ExactCoef>,
}

impl EntireSeries {
    pub fn truncation_len(&self) -> usize {
        self.coeffs.len()
    }
}

/// theta^(q^h) - theta, the recurring denominator of the coefficient
/// recursions. Nonzero for every h >= 1.
fn theta_qh_minus_theta(ctx: &Ctx, h: u32) -> ExactCoef {
    let qh = ctx.spec.q_pow(h);
    ExactCoef::theta_pow(ctx, qh).sub(ctx, &ExactCoef::theta(ctx))
}

/// Coefficients of the exponential: alpha_0 = 1 and
/// alpha_h (theta^(q^h) - theta) = sum_{i=1..min(h,r)} kappa_i alpha_{h-i}^(i).
pub fn exp_coeffs(ctx: &Ctx, dm: &DrinfeldModule, h_max: u32) -> Result<EntireSeries> {
    let mut alpha: Vec<ExactCoef> = vec![ExactCoef::one(ctx)];
    for h in 1..=h_max {
        let mut num = ExactCoef::zero();
        for i in 1..=h.min(dm.rank) {
            let prev = alpha[(h - i) as usize].twist(ctx, i as i64)?;
            num = num.add(ctx, &dm.kappa_at(i).mul(ctx, &prev));
        }
        alpha.push(num.div(ctx, &theta_qh_minus_theta(ctx, h))?);
    }
    Ok(EntireSeries {
        kind: SeriesKind::Exp,
        coeffs: alpha,
    })
}

/// Compositional inverse of the exponential: beta_0 = 1 and
/// beta_h = -sum_{i=0..h-1} beta_i alpha_{h-i}^(i).
pub fn log_coeffs(ctx: &Ctx, dm: &DrinfeldModule, h_max: u32) -> Result<EntireSeries> {
    let exp = exp_coeffs(ctx, dm, h_max)?;
    let mut beta: Vec<ExactCoef> = vec![ExactCoef::one(ctx)];
    for h in 1..=h_max as usize {
        let mut s = ExactCoef::zero();
        for i in 0..h {
            let a = exp.coeffs[h - i].twist(ctx, i as i64)?;
            s = s.add(ctx, &beta[i].mul(ctx, &a));
        }
        beta.push(s.neg(ctx));
    }
    Ok(EntireSeries {
        kind: SeriesKind::Log,
        coeffs: beta,
    })
}

/// Quasi-periodic series for the basis biderivation t -> tau^j
/// (1 <= j <= r-1): c_i = 0 for i < j and
/// c_i (theta^(q^i) - theta) = alpha_{i-j}^(j) for i >= j.
pub fn quasi_coeffs(ctx: &Ctx, dm: &DrinfeldModule, j: u32, h_max: u32) -> Result<EntireSeries> {
    if j == 0 || j >= dm.rank {
        return Err(Error::Invalid(format!(
            "basis biderivation index j = {j} out of range 1..{}",
            dm.rank
        )));
    }
    let exp = exp_coeffs(ctx, dm, h_max)?;
    let mut c: Vec<ExactCoef> = vec![ExactCoef::zero(); (j as usize).min(h_max as usize + 1)];
    for i in j..=h_max {
        let num = exp.coeffs[(i - j) as usize].twist(ctx, j as i64)?;
        c.push(num.div(ctx, &theta_qh_minus_theta(ctx, i))?);
    }
    Ok(EntireSeries {
        kind: SeriesKind::Quasi(j),
        coeffs: c,
    })
}

/// Quasi-periodic series for the inner biderivation with delta_t =
/// rho_t - theta; its value is Exp(z) - z, so the coefficients are the
/// exponential's with the z-linear term removed.
pub fn inner_quasi_coeffs(ctx: &Ctx, dm: &DrinfeldModule, h_max: u32) -> Result<EntireSeries> {
    let exp = exp_coeffs(ctx, dm, h_max)?;
    let mut coeffs = exp.coeffs;
    coeffs[0] = ExactCoef::zero();
    Ok(EntireSeries {
        kind: SeriesKind::Quasi(0),
        coeffs,
    })
}

/// Evaluates an entire q-linear series at a series argument. Convergence is
/// certified by strict decay of the term leads over a width-3 window at the
/// truncation edge; the extrapolated next term bounds the tail.
pub fn eval_entire(
    ctx: &Ctx,
    s: &EntireSeries,
    u: &RamSeries,
    prec_target: i64,
) -> Result<RamSeries> {
    if u.is_exact_zero() {
        return Ok(RamSeries::zero(u.e));
    }
    let e = u.e;
    let q = ctx.spec.q() as i64;
    let mut acc = RamSeries::zero(e);
    let mut min_prec = prec_target;
    let mut nonzero_leads: Vec<i64> = Vec::new();
    for (h, c) in s.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // exact term lead from polynomial degrees; never trust a window-
        // floored bound here
        let c_lead = c.lead_exponent(ctx, e).unwrap();
        let qh = q
            .checked_pow(h as u32)
            .ok_or_else(|| Error::Invalid("q^h overflow".into()))?;
        let u_lead = u.lead_bound().saturating_mul(qh);
        let term_lead = c_lead.saturating_add(u_lead);
        nonzero_leads.push(term_lead);
        if term_lead <= -prec_target {
            // the whole term sits below the window floor
            continue;
        }
        // expand the coefficient only as deep as the product window needs
        let cs = exact_to_series(ctx, c, e, prec_target.saturating_add(u_lead).max(1))?;
        let u_pow = u.twist(ctx, h as i64)?;
        // digits of u^(q^h) below -(prec_target + c_lead) cannot reach the window
        let term = cs
            .mul(ctx, &u_pow.truncate(prec_target.saturating_add(c_lead)))
            .truncate(prec_target);
        if term.prec < min_prec {
            min_prec = term.prec;
        }
        acc = acc.add(ctx, &term);
    }
    if nonzero_leads.is_empty() {
        return Ok(RamSeries::zero_prec(e, prec_target));
    }
    if nonzero_leads.len() < 3 {
        return Err(Error::ConvergenceNotCertified(
            "fewer than three nonzero terms before the truncation cutoff".into(),
        ));
    }
    let w = &nonzero_leads[nonzero_leads.len() - 3..];
    if !(w[0] > w[1] && w[1] > w[2]) {
        return Err(Error::ConvergenceNotCertified(format!(
            "term valuations not strictly increasing over the final window (leads {nonzero_leads:?})"
        )));
    }
    let step = (w[2] - w[1]).max(w[1] - w[0]);
    let tail_bound = w[2] + step;
    let prec_out = min_prec.min(-tail_bound).min(prec_target);
    if prec_out <= -acc.lead_bound() && !acc.is_zero_within_prec() {
        return Err(Error::ConvergenceNotCertified(
            "certified window is empty at this precision".into(),
        ));
    }
    Ok(acc.truncate(prec_out))
}

/// True exactly when b rho_t = rho_t b.
pub fn verify_endo(ctx: &Ctx, b: &TwistedPoly<ExactCoef>, dm: &DrinfeldModule) -> Result<bool> {
    let rho = dm.rho_t(ctx);
    let lhs = b.mul(ctx, &rho)?;
    let rhs = rho.mul(ctx, b)?;
    Ok(lhs == rhs)
}

/// The rank-one period at ramification index e = q - 1, by the product
/// expansion
///
///   period = (-theta) * y * prod_{i>=1} (1 - theta^(1-q^i))^(-1),
///
/// where y = c * vartheta and c in F_{q^m} satisfies c^(q-1) = -1. The
/// chosen root c is returned with the series; the period is only defined up
/// to F_q^x and the choice pins the leading coefficient.
pub fn carlitz_period(ctx: &Ctx, prec: i64) -> Result<(RamSeries, K)> {
    let q = ctx.spec.q();
    let e = (q - 1) as u32;
    if e as u64 % ctx.spec.p == 0 {
        return Err(Error::InseparableRamification(e));
    }
    let minus_one = ctx.fq.neg(ctx.fq.one());
    let c = ctx
        .fq
        .elements()
        .find(|&c| !c.is_zero() && ctx.fq.pow(c, q - 1) == minus_one)
        .ok_or_else(|| {
            Error::Invalid(
                "no (q-1)-th root of -1 in the constants; enlarge the constant extension".into(),
            )
        })?;
    // (-theta) * c * vartheta = -c * vartheta^(e+1)
    let mut acc = RamSeries::monomial(e, ctx.fq.neg(c), e as i64 + 1);
    let work_prec = prec + e as i64 + 4;
    let mut i = 1u32;
    loop {
        let drop = (q
            .checked_pow(i)
            .ok_or_else(|| Error::Invalid("q^i overflow".into()))?
            - 1) as i64
            * e as i64;
        if drop > work_prec {
            break;
        }
        // (1 - theta^(1-q^i))^(-1)
        let factor = RamSeries::one(ctx, e)
            .sub(ctx, &RamSeries::monomial(e, ctx.fq.one(), -drop))
            .inv(ctx, work_prec)?;
        acc = acc.mul(ctx, &factor);
        i += 1;
    }
    Ok((acc.truncate(prec), c))
}

// ---------------------------------------------------------------------------
// exact functional-equation checks on truncated entire series
// ---------------------------------------------------------------------------

/// Coefficients of f(c z) for a q-linear series f: term h picks up c^(q^h).
fn scale_argument(ctx: &Ctx, f: &[ExactCoef], c: &ExactCoef) -> Result<Vec<ExactCoef>> {
    let mut out = Vec::with_capacity(f.len());
    for (h, a) in f.iter().enumerate() {
        out.push(a.mul(ctx, &c.twist(ctx, h as i64)?));
    }
    Ok(out)
}

/// Coefficients of the composition f(g(z)) of q-linear series, truncated to
/// the shorter operand's reach.
fn compose_qlin(ctx: &Ctx, f: &[ExactCoef], g: &[ExactCoef]) -> Result<Vec<ExactCoef>> {
    let len = f.len().min(g.len());
    let mut out = vec![ExactCoef::zero(); len];
    for i in 0..len {
        if f[i].is_zero() {
            continue;
        }
        for j in 0..len - i {
            if g[j].is_zero() {
                continue;
            }
            let t = f[i].mul(ctx, &g[j].twist(ctx, i as i64)?);
            out[i + j] = out[i + j].add(ctx, &t);
        }
    }
    Ok(out)
}

/// Coefficients of the twisted-operator action b(f(z)) for b = sum c_i tau^i.
fn apply_twisted_qlin(
    ctx: &Ctx,
    b: &TwistedPoly<ExactCoef>,
    f: &[ExactCoef],
) -> Result<Vec<ExactCoef>> {
    let mut out = vec![ExactCoef::zero(); f.len()];
    for (i, c) in b.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (j, a) in f.iter().enumerate() {
            if i + j >= out.len() {
                break;
            }
            if a.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(ctx, &c.mul(ctx, &a.twist(ctx, i as i64)?));
        }
    }
    Ok(out)
}

/// Residual of Exp(theta z) = rho_t(Exp(z)) through the truncation length:
/// all returned coefficients must vanish.
pub fn exp_functional_residual(
    ctx: &Ctx,
    dm: &DrinfeldModule,
    exp: &EntireSeries,
) -> Result<Vec<ExactCoef>> {
    let lhs = scale_argument(ctx, &exp.coeffs, &ExactCoef::theta(ctx))?;
    let rhs = apply_twisted_qlin(ctx, &dm.rho_t(ctx), &exp.coeffs)?;
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| a.sub(ctx, b)).collect())
}

/// Residual of Log(Exp(z)) = z through the truncation length.
pub fn log_inverse_residual(
    ctx: &Ctx,
    log: &EntireSeries,
    exp: &EntireSeries,
) -> Result<Vec<ExactCoef>> {
    let mut comp = compose_qlin(ctx, &log.coeffs, &exp.coeffs)?;
    comp[0] = comp[0].sub(ctx, &ExactCoef::one(ctx));
    Ok(comp)
}

/// Residual of F(theta z) = theta F(z) + delta_t(Exp(z)) through the
/// truncation length, where delta_t is tau^j for the basis biderivations or
/// rho_t - theta for the inner one.
pub fn quasi_functional_residual(
    ctx: &Ctx,
    dm: &DrinfeldModule,
    quasi: &EntireSeries,
    exp: &EntireSeries,
) -> Result<Vec<ExactCoef>> {
    let SeriesKind::Quasi(j) = quasi.kind else {
        return Err(Error::Invalid(
            "functional residual needs a quasi-periodic series".into(),
        ));
    };
    let delta_t = if j == 0 {
        let mut rho = dm.rho_t(ctx);
        rho.coeffs[0] = ExactCoef::zero();
        TwistedPoly::from_coeffs(TwVar::Tau, rho.coeffs)
    } else {
        TwistedPoly::monomial(TwVar::Tau, ExactCoef::one(ctx), j as usize)
    };
    let lhs = scale_argument(ctx, &quasi.coeffs, &ExactCoef::theta(ctx))?;
    let theta_f: Vec<ExactCoef> = quasi
        .coeffs
        .iter()
        .map(|c| c.mul(ctx, &ExactCoef::theta(ctx)))
        .collect();
    let delta_exp = apply_twisted_qlin(ctx, &delta_t, &exp.coeffs)?;
    Ok(lhs
        .iter()
        .zip(theta_f.iter().zip(&delta_exp))
        .map(|(l, (a, b))| l.sub(ctx, a).sub(ctx, b))
        .collect())
}

/// Helper shared by the verification drivers: the weakest certified window
/// across a slice of series (None when any value is exact).
pub fn weakest_prec(values: &[RamSeries]) -> Option<i64> {
    values.iter().map(|v| v.prec).min().filter(|&p| p < EXACT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::poly::Poly;

    fn ctx3() -> Ctx {
        // F_3 with constants F_9 so the period normalization root exists
        Ctx::new(FieldSpec::new(3, 1, 2, 1).unwrap()).unwrap()
    }

    fn ctx_f4() -> Ctx {
        Ctx::new(FieldSpec::new(2, 1, 2, 2).unwrap()).unwrap()
    }

    /// rho_t = theta + tau^2 over F_4.
    fn cm_module(ctx: &Ctx) -> DrinfeldModule {
        DrinfeldModule::new(ctx, vec![ExactCoef::zero(), ExactCoef::one(ctx)]).unwrap()
    }

    #[test]
    fn carlitz_exp_first_coefficients() {
        let ctx = ctx3();
        let dm = DrinfeldModule::carlitz(&ctx);
        let exp = exp_coeffs(&ctx, &dm, 4).unwrap();
        assert_eq!(exp.coeffs[0], ExactCoef::one(&ctx));
        // alpha_1 = 1/(theta^q - theta)
        let expect = ExactCoef::one(&ctx)
            .div(&ctx, &theta_qh_minus_theta(&ctx, 1))
            .unwrap();
        assert_eq!(exp.coeffs[1], expect);
        // log: beta_1 = 1/(theta - theta^q) = -alpha_1
        let log = log_coeffs(&ctx, &dm, 4).unwrap();
        assert_eq!(log.coeffs[0], ExactCoef::one(&ctx));
        assert_eq!(log.coeffs[1], expect.neg(&ctx));
    }

    #[test]
    fn functional_equations_hold_exactly() {
        for (ctx, dm) in [
            (ctx3(), DrinfeldModule::carlitz(&ctx3())),
            (ctx_f4(), cm_module(&ctx_f4())),
        ] {
            let h = 6;
            let exp = exp_coeffs(&ctx, &dm, h).unwrap();
            for r in exp_functional_residual(&ctx, &dm, &exp).unwrap() {
                assert!(r.is_zero());
            }
            let log = log_coeffs(&ctx, &dm, h).unwrap();
            for r in log_inverse_residual(&ctx, &log, &exp).unwrap() {
                assert!(r.is_zero());
            }
            // inner biderivation
            let q0 = inner_quasi_coeffs(&ctx, &dm, h).unwrap();
            assert!(q0.coeffs[0].is_zero());
            for r in quasi_functional_residual(&ctx, &dm, &q0, &exp).unwrap() {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn quasi_basis_series() {
        let ctx = ctx_f4();
        let dm = cm_module(&ctx);
        let h = 6;
        let exp = exp_coeffs(&ctx, &dm, h).unwrap();
        let q1 = quasi_coeffs(&ctx, &dm, 1, h).unwrap();
        assert!(q1.coeffs[0].is_zero());
        // c_1 = alpha_0^(1) / (theta^q - theta) = 1/(theta^q - theta)
        let expect = ExactCoef::one(&ctx)
            .div(&ctx, &theta_qh_minus_theta(&ctx, 1))
            .unwrap();
        assert_eq!(q1.coeffs[1], expect);
        for r in quasi_functional_residual(&ctx, &dm, &q1, &exp).unwrap() {
            assert!(r.is_zero());
        }
        // out-of-range biderivation index
        assert!(quasi_coeffs(&ctx, &dm, 2, h).is_err());
    }

    #[test]
    fn endomorphism_checks() {
        let ctx = ctx_f4();
        let dm = cm_module(&ctx);
        // constants of F_4 commute with theta + tau^2
        let omega = ExactCoef::constant(&ctx, K(2));
        let b = TwistedPoly::constant(TwVar::Tau, omega);
        assert!(verify_endo(&ctx, &b, &dm).unwrap());
        // 1 always does
        let one = TwistedPoly::one(&ctx, TwVar::Tau);
        assert!(verify_endo(&ctx, &one, &dm).unwrap());
        // tau does not: theta^q != theta
        let tau = TwistedPoly::monomial(TwVar::Tau, ExactCoef::one(&ctx), 1);
        assert!(!verify_endo(&ctx, &tau, &dm).unwrap());
        // products of endomorphisms stay endomorphisms
        let b2 = b.mul(&ctx, &b).unwrap();
        assert!(verify_endo(&ctx, &b2, &dm).unwrap());
    }

    #[test]
    fn carlitz_period_is_in_the_kernel() {
        let ctx = ctx3();
        let dm = DrinfeldModule::carlitz(&ctx);
        let prec = 60;
        let (period, _c) = carlitz_period(&ctx, prec).unwrap();
        // leading exponent q in vartheta-units, i.e. theta-degree q/(q-1)
        assert_eq!(period.max_nonzero_exp(), Some(3));
        let exp = exp_coeffs(&ctx, &dm, 7).unwrap();
        let v = eval_entire(&ctx, &exp, &period, 40).unwrap();
        assert!(v.is_zero_within_prec(), "Exp(period) = {v:?}");
        assert!(v.prec >= 25, "certified window too small: {}", v.prec);
        // theta * period is in the lattice too
        let tp = period.shift_theta(1);
        let v2 = eval_entire(&ctx, &exp, &tp, 40).unwrap();
        assert!(v2.is_zero_within_prec());
        // and Exp(Log(alpha)) = alpha for small alpha
        let log = log_coeffs(&ctx, &dm, 7).unwrap();
        let alpha = RamSeries::one(&ctx, 2);
        let u = eval_entire(&ctx, &log, &alpha, 40).unwrap();
        let back = eval_entire(&ctx, &exp, &u, 40).unwrap();
        assert!(back.sub(&ctx, &alpha).is_zero_within_prec());
    }

    #[test]
    fn quasi_period_of_carlitz_is_minus_period() {
        // F_{delta_1}(lambda) = -lambda at precision
        let ctx = ctx3();
        let dm = DrinfeldModule::carlitz(&ctx);
        let (period, _) = carlitz_period(&ctx, 60).unwrap();
        let q0 = inner_quasi_coeffs(&ctx, &dm, 7).unwrap();
        let v = eval_entire(&ctx, &q0, &period, 40).unwrap();
        assert!(v.add(&ctx, &period).is_zero_within_prec());
    }

    #[test]
    fn eval_entire_is_fq_linear() {
        let ctx = ctx3();
        let dm = DrinfeldModule::carlitz(&ctx);
        let exp = exp_coeffs(&ctx, &dm, 7).unwrap();
        let x = RamSeries::new(2, -2, vec![K(1), K(4)], 30);
        let y = RamSeries::new(2, -3, vec![K(2)], 30);
        // a x + b y for a, b in F_q = F_3 (scalars 0,1,2)
        for a in 0..3u64 {
            for b in 0..3u64 {
                let (ka, kb) = (ctx.fq.scalar(a), ctx.fq.scalar(b));
                let arg = x.scale(&ctx, ka).add(&ctx, &y.scale(&ctx, kb));
                let lhs = eval_entire(&ctx, &exp, &arg, 25).unwrap();
                let rhs = eval_entire(&ctx, &exp, &x, 25)
                    .unwrap()
                    .scale(&ctx, ka)
                    .add(
                        &ctx,
                        &eval_entire(&ctx, &exp, &y, 25).unwrap().scale(&ctx, kb),
                    );
                assert!(lhs.sub(&ctx, &rhs).is_zero_within_prec());
            }
        }
    }

    #[test]
    fn rank_two_endo_expansion_example() {
        // over F_4 with rho_t = theta + tau^2 and b = c in F_4 \ F_2:
        // both sides expand to theta c + c tau^2
        let ctx = ctx_f4();
        let dm = cm_module(&ctx);
        let c = ExactCoef::constant(&ctx, K(2));
        let b = TwistedPoly::constant(TwVar::Tau, c.clone());
        let rho = dm.rho_t(&ctx);
        let lhs = b.mul(&ctx, &rho).unwrap();
        assert_eq!(lhs.coeff(0), c.mul(&ctx, &ExactCoef::theta(&ctx)));
        assert_eq!(lhs.coeff(2), c);
        let _ = Poly::zero();
    }
}
