//! Dual-motive matrices, Anderson generating functions, rigid analytic
//! trivializations, prolongations, and the extension motives built from
//! logarithm data.
//!
//! Index conventions, fixed once here and used everywhere:
//!
//! - sigma-multiplication matrix Phi: companion shape, last row
//!   ((t-theta)/kappa_r^(-r), -kappa_1^(-1)/kappa_r^(-r), ...,
//!   -kappa_(r-1)^(-r+1)/kappa_r^(-r)).
//! - Upsilon[i][j] = f_i^(j) for 0-based j (row = lattice generator,
//!   column = twist).
//! - V[i][j] = kappa_(i+j+1)^(-j) for 0-based i, j, zero past the
//!   anti-diagonal.
//! - Psi = V^(-1) [Upsilon^(1)]^(-1), and its inverse twist is assembled
//!   symbolically as Psi^(-1) = (V^(-1))^(-1) Upsilon^(-1), which avoids
//!   digit-level negative twists entirely.
//! - Prolongation bases are ordered (D_n m, ..., D_0 m), so prolongation of
//!   a matrix is the upper-triangular d-matrix in t, and dropping leading
//!   blocks projects onto lower levels.

use crate::drinfeld::{eval_entire, exp_coeffs, inner_quasi_coeffs, DrinfeldModule, EntireSeries};
use crate::error::{Error, Result};
use crate::exact::{CoefPoly, ExactCoef};
use crate::field::Ctx;
use crate::mat::{Mat, Ring};
use crate::series::{exact_to_series, RamSeries};
use crate::tate::{coefpoly_to_tate, dmatrix_t, eval_at_theta, TatePoly};

/// Working-precision knobs shared by the constructions.
#[derive(Debug, Clone, Copy)]
pub struct MotiveParams {
    /// Ramification index for all series values.
    pub e: u32,
    /// Tracked t-degree of Tate-algebra values.
    pub tdeg: i64,
    /// Series precision target (digits below vartheta^(-prec) are unknown).
    pub prec: i64,
    /// Truncation length of the entire series.
    pub h: u32,
}

/// Summary of a matrix of series values that is expected to vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualReport {
    /// Largest vartheta-exponent of a nonzero certified digit, if any.
    pub max_nonzero_exp: Option<i64>,
    /// Weakest certified window across the entries (None when all exact).
    pub weakest_prec: Option<i64>,
}

impl ResidualReport {
    pub fn of(m: &Mat<TatePoly>) -> ResidualReport {
        let max_nonzero_exp = m.data.iter().filter_map(TatePoly::max_nonzero_exp).max();
        let weakest_prec = m
            .data
            .iter()
            .flat_map(|t| t.coeffs.iter().map(|c| c.prec))
            .min()
            .filter(|&p| p < crate::series::EXACT);
        ResidualReport {
            max_nonzero_exp,
            weakest_prec,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_nonzero_exp.is_none()
    }
}

// ---------------------------------------------------------------------------
// Phi
// ---------------------------------------------------------------------------

/// The sigma-multiplication matrix on the basis (1, sigma, ..., sigma^(r-1)).
pub fn phi_rho(ctx: &Ctx, dm: &DrinfeldModule) -> Result<Mat<CoefPoly>> {
    let r = dm.rank as usize;
    if ctx.spec.d_twist < dm.rank {
        return Err(Error::TwistDepthExceeded(format!(
            "twist depth {} is smaller than the rank {}",
            ctx.spec.d_twist, dm.rank
        )));
    }
    let kr_inv = dm
        .kappa_at(dm.rank)
        .twist(ctx, -(dm.rank as i64))?
        .inv(ctx)?;
    let mut m = Mat::zero(ctx, r, r);
    for i in 0..r.saturating_sub(1) {
        *m.at_mut(i, i + 1) = CoefPoly::one(ctx);
    }
    // (t - theta)/kappa_r^(-r)
    *m.at_mut(r - 1, 0) = CoefPoly::from_coeffs(vec![
        ExactCoef::theta(ctx).neg(ctx).mul(ctx, &kr_inv),
        kr_inv.clone(),
    ]);
    for i in 1..r {
        let k = dm.kappa_at(i as u32).twist(ctx, -(i as i64))?;
        *m.at_mut(r - 1, i) = CoefPoly::constant(k.neg(ctx).mul(ctx, &kr_inv));
    }
    Ok(m)
}

/// det Phi must be (t - theta)/kappa_r^(-r) up to sign.
pub fn det_phi_is_expected(ctx: &Ctx, dm: &DrinfeldModule, phi: &Mat<CoefPoly>) -> Result<bool> {
    let det = phi.det(ctx);
    let kr_inv = dm
        .kappa_at(dm.rank)
        .twist(ctx, -(dm.rank as i64))?
        .inv(ctx)?;
    let expected = CoefPoly::from_coeffs(vec![
        ExactCoef::theta(ctx).neg(ctx).mul(ctx, &kr_inv),
        kr_inv,
    ]);
    Ok(det == expected || det == expected.neg(ctx))
}

// ---------------------------------------------------------------------------
// Anderson generating functions
// ---------------------------------------------------------------------------

/// f_u(t) = sum_m Exp(u theta^(-m-1)) t^m, coefficient by coefficient.
pub fn agf(
    ctx: &Ctx,
    exp: &EntireSeries,
    u: &RamSeries,
    params: &MotiveParams,
) -> Result<TatePoly> {
    let mut coeffs = Vec::with_capacity(params.tdeg as usize + 1);
    for m in 0..=params.tdeg {
        let arg = u.shift_theta(-(m + 1));
        coeffs.push(eval_entire(ctx, exp, &arg, params.prec)?);
    }
    Ok(TatePoly::from_coeffs(u.e, params.tdeg, coeffs))
}

/// Checks the operator identity theta f + sum_i kappa_i f^(i) = t f + Exp(u)
/// within precision; the left side applies rho_t to the coefficients.
pub fn agf_functional_residual(
    ctx: &Ctx,
    dm: &DrinfeldModule,
    exp: &EntireSeries,
    u: &RamSeries,
    f: &TatePoly,
    params: &MotiveParams,
) -> Result<TatePoly> {
    let mut lhs = f.scale(ctx, &RamSeries::theta(ctx, f.e));
    for i in 1..=dm.rank {
        let ki = exact_to_series(ctx, &dm.kappa_at(i), f.e, params.prec)?;
        lhs = lhs.add(ctx, &f.twist(ctx, i as i64)?.scale(ctx, &ki));
    }
    let t = TatePoly::t(ctx, f.e).truncate_tdeg(params.tdeg);
    let mut rhs = t.mul(ctx, f);
    let exp_u = eval_entire(ctx, exp, u, params.prec)?;
    rhs = rhs.add(ctx, &TatePoly::constant(exp_u).truncate_tdeg(params.tdeg));
    Ok(lhs.sub(ctx, &rhs))
}

// ---------------------------------------------------------------------------
// rigid analytic trivialization
// ---------------------------------------------------------------------------

/// The matrices attached to a Drinfeld module and a candidate lattice basis,
/// with the trivialization residual computed on construction.
#[derive(Debug, Clone)]
pub struct MotiveMatrices {
    pub dm: DrinfeldModule,
    pub params: MotiveParams,
    pub phi: Mat<CoefPoly>,
    pub phi_tate: Mat<TatePoly>,
    pub upsilon: Mat<TatePoly>,
    pub v: Mat<ExactCoef>,
    pub psi: Mat<TatePoly>,
    /// Psi^(-1) assembled symbolically: (V^(-1))^(-1) Upsilon^(-1).
    pub psi_twist_down: Mat<TatePoly>,
    /// Psi^(-1) - Phi Psi.
    pub residual: Mat<TatePoly>,
    pub residual_report: ResidualReport,
    /// Matrix inverse of Psi (from Upsilon^(1) V).
    pub psi_inv: Mat<TatePoly>,
}

/// Inverse of a square matrix over the exact coefficients.
pub fn exact_mat_inverse(ctx: &Ctx, m: &Mat<ExactCoef>) -> Result<Mat<ExactCoef>> {
    let det = m.det(ctx);
    if det.is_zero() {
        return Err(Error::Invalid("exact matrix is singular".into()));
    }
    let det_inv = det.inv(ctx)?;
    Ok(m.adjugate(ctx).map(|e| e.mul(ctx, &det_inv)))
}

/// Inverse of a square matrix over truncated Tate values via the adjugate,
/// guarded by a unit-determinant check.
pub fn tate_mat_inverse(ctx: &Ctx, m: &Mat<TatePoly>, prec_cap: i64) -> Result<Mat<TatePoly>> {
    let det = m.det(ctx);
    let det_inv = det.inv(ctx, prec_cap).map_err(|_| {
        Error::PrecisionLoss("matrix determinant is not a unit at working precision".into())
    })?;
    Ok(m.adjugate(ctx).map(|e| e.mul(ctx, &det_inv)))
}

fn mat_to_tate(ctx: &Ctx, m: &Mat<ExactCoef>, e: u32, prec: i64) -> Result<Mat<TatePoly>> {
    m.try_map(|x| Ok(TatePoly::constant(exact_to_series(ctx, x, e, prec)?)))
}

/// Builds Upsilon, V, Psi and the residual of the difference equation from a
/// candidate lattice basis (or any list of r values u_i).
pub fn psi_rho(
    ctx: &Ctx,
    dm: &DrinfeldModule,
    lattice: &[RamSeries],
    params: &MotiveParams,
) -> Result<MotiveMatrices> {
    let r = dm.rank as usize;
    if lattice.len() != r {
        return Err(Error::Invalid(format!(
            "expected {r} lattice values, got {}",
            lattice.len()
        )));
    }
    let exp = exp_coeffs(ctx, dm, params.h)?;
    let phi = phi_rho(ctx, dm)?;
    let phi_tate = phi.try_map(|p| coefpoly_to_tate(ctx, p, params.e, params.prec))?;

    // rows of Upsilon: twists 0..r of each AGF
    let mut fs: Vec<Vec<TatePoly>> = Vec::with_capacity(r);
    for u in lattice {
        let f = agf(ctx, &exp, u, params)?;
        let mut twists = Vec::with_capacity(r + 1);
        for j in 0..=r {
            twists.push(f.twist(ctx, j as i64)?);
        }
        fs.push(twists);
    }
    let upsilon = Mat::from_rows(
        (0..r)
            .map(|i| (0..r).map(|j| fs[i][j].clone()).collect())
            .collect(),
    );
    let upsilon_tw = Mat::from_rows(
        (0..r)
            .map(|i| (1..=r).map(|j| fs[i][j].clone()).collect())
            .collect(),
    );

    // V and its inverse twist, both exact
    let mut v = Mat::zero(ctx, r, r);
    let mut v_m1 = Mat::zero(ctx, r, r);
    for i in 0..r {
        for j in 0..r {
            let idx = (i + j + 1) as u32;
            if idx <= dm.rank {
                *v.at_mut(i, j) = dm.kappa_at(idx).twist(ctx, -(j as i64))?;
                *v_m1.at_mut(i, j) = dm.kappa_at(idx).twist(ctx, -(j as i64 + 1))?;
            }
        }
    }

    let v_inv = mat_to_tate(ctx, &exact_mat_inverse(ctx, &v)?, params.e, params.prec)?;
    let v_m1_inv = mat_to_tate(ctx, &exact_mat_inverse(ctx, &v_m1)?, params.e, params.prec)?;
    let ups_tw_inv = tate_mat_inverse(ctx, &upsilon_tw, params.prec)?;
    let ups_inv = tate_mat_inverse(ctx, &upsilon, params.prec)?;

    let psi = v_inv.mul(ctx, &ups_tw_inv);
    let psi_twist_down = v_m1_inv.mul(ctx, &ups_inv);
    let residual = psi_twist_down.sub(ctx, &phi_tate.mul(ctx, &psi));
    let residual_report = ResidualReport::of(&residual);
    let psi_inv = upsilon_tw.mul(ctx, &mat_to_tate(ctx, &v, params.e, params.prec)?);

    Ok(MotiveMatrices {
        dm: dm.clone(),
        params: *params,
        phi,
        phi_tate,
        upsilon,
        v,
        psi,
        psi_twist_down,
        residual,
        residual_report,
        psi_inv,
    })
}

/// Prolongation of the trivialization data to level n: every matrix becomes
/// its d-matrix in t and the residual is recomputed at that level.
pub struct ProlongedMotive {
    pub n: u32,
    pub phi: Mat<TatePoly>,
    pub psi: Mat<TatePoly>,
    pub psi_twist_down: Mat<TatePoly>,
    pub residual: Mat<TatePoly>,
    pub residual_report: ResidualReport,
}

pub fn prolong(ctx: &Ctx, m: &MotiveMatrices, n: u32) -> Result<ProlongedMotive> {
    let blocks = n as usize + 1;
    let phi = dmatrix_t(ctx, &m.phi_tate, blocks)?;
    let psi = dmatrix_t(ctx, &m.psi, blocks)?;
    let psi_twist_down = dmatrix_t(ctx, &m.psi_twist_down, blocks)?;
    let residual = psi_twist_down.sub(ctx, &phi.mul(ctx, &psi));
    let residual_report = ResidualReport::of(&residual);
    Ok(ProlongedMotive {
        n,
        phi,
        psi,
        psi_twist_down,
        residual,
        residual_report,
    })
}

/// Drops the leading blocks of a level-n object, landing at level
/// n - ell - 1: the upper-left square of (n - ell) x (n - ell) blocks.
pub fn prolong_projection<T: Ring>(m: &Mat<T>, r: usize, n: u32, ell: u32) -> Result<Mat<T>> {
    if ell >= n {
        return Err(Error::Invalid(format!(
            "projection depth {ell} out of range for level {n}"
        )));
    }
    let keep = (n - ell) as usize * r;
    if m.rows < keep || m.cols < keep {
        return Err(Error::Invalid(
            "matrix too small for the requested projection".into(),
        ));
    }
    Ok(m.block(0, 0, keep, keep))
}

// ---------------------------------------------------------------------------
// prolongation t-modules
// ---------------------------------------------------------------------------

/// The (n+1)-dimensional prolongation t-module: d(P_n rho)_t is theta on the
/// diagonal with -1 on the subdiagonal, and the tau^i coefficient is the
/// scalar matrix kappa_i.
#[derive(Debug, Clone)]
pub struct ProlongTModule {
    pub n: u32,
    pub d_phi_t: Mat<ExactCoef>,
    pub tau_coeffs: Vec<ExactCoef>,
}

pub fn prolong_tmodule(ctx: &Ctx, dm: &DrinfeldModule, n: u32) -> ProlongTModule {
    let size = n as usize + 1;
    let mut d = Mat::zero(ctx, size, size);
    for i in 0..size {
        *d.at_mut(i, i) = ExactCoef::theta(ctx);
        if i + 1 < size {
            *d.at_mut(i + 1, i) = ExactCoef::one(ctx).neg(ctx);
        }
    }
    ProlongTModule {
        n,
        d_phi_t: d,
        tau_coeffs: dm.kappa.clone(),
    }
}

/// Inverse of d(P_n rho)_t by forward substitution on the bidiagonal shape.
pub fn dphi_t_inverse(ctx: &Ctx, n: u32) -> Result<Mat<ExactCoef>> {
    let size = n as usize + 1;
    let theta_inv = ExactCoef::theta(ctx).inv(ctx)?;
    let mut m = Mat::zero(ctx, size, size);
    for j in 0..size {
        // solve (theta I + N) x = e_j: x_j = 1/theta, x_(i+1) = x_i / theta
        let mut cur = theta_inv.clone();
        for i in j..size {
            *m.at_mut(i, j) = cur.clone();
            cur = cur.mul(ctx, &theta_inv);
        }
    }
    Ok(m)
}

/// Coordinate-wise exponential of the prolongation module.
pub fn exp_prolong(
    ctx: &Ctx,
    exp: &EntireSeries,
    z: &[RamSeries],
    prec: i64,
) -> Result<Vec<RamSeries>> {
    z.iter().map(|zi| eval_entire(ctx, exp, zi, prec)).collect()
}

/// Anderson generating function of the prolongation module with respect to
/// the vector carrying u in slot j (1-based), computed two ways: directly
/// from the defining series through powers of d(P_n rho)_t^(-1), and by the
/// closed form (0, ..., 0, f_u, d_t f_u, ..., d_t^(n+1-j) f_u). Both are
/// returned after an entry-wise agreement check.
pub fn agf_prolong(
    ctx: &Ctx,
    dm: &DrinfeldModule,
    u: &RamSeries,
    j: u32,
    n: u32,
    params: &MotiveParams,
) -> Result<(Vec<TatePoly>, Vec<TatePoly>)> {
    if j == 0 || j > n + 1 {
        return Err(Error::Invalid(format!(
            "slot j = {j} out of range 1..={}",
            n + 1
        )));
    }
    let size = n as usize + 1;
    let exp = exp_coeffs(ctx, dm, params.h)?;
    let inv = dphi_t_inverse(ctx, n)?;

    // direct route: column j of successive inverse powers, applied to u
    let mut col: Vec<ExactCoef> = (0..size)
        .map(|i| inv.at(i, j as usize - 1).clone())
        .collect();
    let mut direct_coeffs: Vec<Vec<RamSeries>> = Vec::with_capacity(params.tdeg as usize + 1);
    for _m in 0..=params.tdeg {
        let mut coeff = Vec::with_capacity(size);
        for c in &col {
            let arg =
                exact_to_series(ctx, c, u.e, params.prec + 2 * u.lead_bound().abs())?.mul(ctx, u);
            coeff.push(eval_entire(ctx, &exp, &arg, params.prec)?);
        }
        direct_coeffs.push(coeff);
        // advance to the next inverse power
        col = (0..size)
            .map(|i| {
                let mut acc = ExactCoef::zero();
                for k in 0..size {
                    if !inv.at(i, k).is_zero() && !col[k].is_zero() {
                        acc = acc.add(ctx, &inv.at(i, k).mul(ctx, &col[k]));
                    }
                }
                acc
            })
            .collect();
    }
    let direct: Vec<TatePoly> = (0..size)
        .map(|row| {
            TatePoly::from_coeffs(
                u.e,
                params.tdeg,
                direct_coeffs.iter().map(|c| c[row].clone()).collect(),
            )
        })
        .collect();

    // closed form
    let f = agf(ctx, &exp, u, params)?;
    let closed: Vec<TatePoly> = (0..size)
        .map(|row| {
            if row + 1 < j as usize {
                TatePoly::zero(u.e)
            } else {
                f.hyperderiv_t(ctx, (row + 1 - j as usize) as u64)
            }
        })
        .collect();

    for (row, (a, b)) in direct.iter().zip(&closed).enumerate() {
        let d = a.sub(ctx, &b.clone().truncate_tdeg(a.tdeg));
        if !d.is_zero_within_prec() {
            return Err(Error::MismatchBeyondPrecision(format!(
                "prolongation AGF routes disagree in row {row}"
            )));
        }
    }
    Ok((direct, closed))
}

// ---------------------------------------------------------------------------
// quasi-logarithms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct QuasiLog {
    /// F_delta(u) for delta_t = rho_t - theta, from the AGF route.
    pub value: RamSeries,
    /// Same value from the entire-series route.
    pub series_route: RamSeries,
    /// alpha - u.
    pub expected: RamSeries,
}

/// Computes the quasi-logarithm two ways and checks both against
/// alpha - u = F_delta(u): route one sums kappa_j f_u^(j)(theta), route two
/// evaluates the inner quasi-periodic series at u.
pub fn quasi_log(
    ctx: &Ctx,
    dm: &DrinfeldModule,
    u: &RamSeries,
    alpha: &RamSeries,
    params: &MotiveParams,
) -> Result<QuasiLog> {
    let exp = exp_coeffs(ctx, dm, params.h)?;
    let exp_u = eval_entire(ctx, &exp, u, params.prec)?;
    if !exp_u.sub(ctx, alpha).is_zero_within_prec() {
        return Err(Error::MismatchBeyondPrecision(
            "Exp(u) does not match alpha within precision".into(),
        ));
    }
    let f = agf(ctx, &exp, u, params)?;
    let mut value = RamSeries::zero(u.e);
    for j in 1..=dm.rank {
        let fj = eval_at_theta(ctx, &f.twist(ctx, j as i64)?)?;
        let kj = exact_to_series(ctx, &dm.kappa_at(j), u.e, params.prec)?;
        value = value.add(ctx, &kj.mul(ctx, &fj));
    }
    let quasi = inner_quasi_coeffs(ctx, dm, params.h)?;
    let series_route = eval_entire(ctx, &quasi, u, params.prec)?;
    let expected = alpha.sub(ctx, u);
    if !value.sub(ctx, &series_route).is_zero_within_prec()
        || !value.sub(ctx, &expected).is_zero_within_prec()
    {
        return Err(Error::MismatchBeyondPrecision(
            "quasi-logarithm routes disagree within the certified window".into(),
        ));
    }
    Ok(QuasiLog {
        value,
        series_route,
        expected,
    })
}

// ---------------------------------------------------------------------------
// extension motives
// ---------------------------------------------------------------------------

/// Extension data for one logarithm pair (u, alpha) at prolongation level n.
#[derive(Debug, Clone)]
pub struct ExtensionMotive {
    pub n: u32,
    /// Block matrix ((d[Phi], 0), (h, 1)).
    pub phi_ext: Mat<TatePoly>,
    /// Block matrix ((d[Psi], 0), (g d[Psi], 1)).
    pub psi_ext: Mat<TatePoly>,
    /// Residual of the extension difference equation g^(-1) d[Phi] = g + h.
    pub g_residual_report: ResidualReport,
    /// Residual of Psi_ext^(-1) = Phi_ext Psi_ext.
    pub residual_report: ResidualReport,
    /// First entry of s_alpha specialized at t = theta, minus (u - alpha).
    pub s_theta_residual: RamSeries,
}

/// Row vector s_alpha and its symbolic inverse twist: entry i (0-based) is
/// -(sum_j kappa_(i+j+1)^(-i) f^(j+1)), and the twist-down replaces the
/// twists by one less on each factor.
fn s_alpha_rows(
    ctx: &Ctx,
    dm: &DrinfeldModule,
    f_twists: &[TatePoly],
    params: &MotiveParams,
) -> Result<(Vec<TatePoly>, Vec<TatePoly>)> {
    let r = dm.rank as usize;
    let mut s = Vec::with_capacity(r);
    let mut s_m1 = Vec::with_capacity(r);
    for i in 0..r {
        let mut acc = TatePoly::zero(params.e);
        let mut acc_m1 = TatePoly::zero(params.e);
        for j in 0..(r - i) {
            let idx = (i + j + 1) as u32;
            let k = dm.kappa_at(idx).twist(ctx, -(i as i64))?;
            let k_m1 = dm.kappa_at(idx).twist(ctx, -(i as i64 + 1))?;
            let ks = exact_to_series(ctx, &k, params.e, params.prec)?;
            let ks_m1 = exact_to_series(ctx, &k_m1, params.e, params.prec)?;
            acc = acc.add(ctx, &f_twists[j + 1].scale(ctx, &ks));
            acc_m1 = acc_m1.add(ctx, &f_twists[j].scale(ctx, &ks_m1));
        }
        s.push(acc.neg(ctx));
        s_m1.push(acc_m1.neg(ctx));
    }
    Ok((s, s_m1))
}

/// Builds the extension motive for Exp(u) = alpha at level n and checks its
/// difference equation and trivialization residual.
pub fn y_alpha(
    ctx: &Ctx,
    m: &MotiveMatrices,
    u: &RamSeries,
    alpha: &ExactCoef,
    n: u32,
    params: &MotiveParams,
) -> Result<ExtensionMotive> {
    let pairs = [(u.clone(), alpha.clone())];
    n_motive(ctx, m, &pairs, n, params)
}

/// The direct-sum extension motive for several logarithm pairs: block
/// diagonal copies of d[Phi] with the h rows stacked into the last row, and
/// the matching trivialization.
pub fn n_motive(
    ctx: &Ctx,
    m: &MotiveMatrices,
    pairs: &[(RamSeries, ExactCoef)],
    n: u32,
    params: &MotiveParams,
) -> Result<ExtensionMotive> {
    let dm = &m.dm;
    let r = dm.rank as usize;
    let blocks = n as usize + 1;
    let w = pairs.len();
    if w == 0 {
        return Err(Error::Invalid(
            "at least one logarithm pair is required".into(),
        ));
    }
    let exp = exp_coeffs(ctx, dm, params.h)?;
    let lvl = prolong(ctx, m, n)?;
    let bs = blocks * r;
    let size = w * bs + 1;

    let mut phi_ext = Mat::zero(ctx, size, size);
    let mut psi_ext = Mat::zero(ctx, size, size);
    let mut psi_ext_m1 = Mat::zero(ctx, size, size);
    for b in 0..w {
        phi_ext.paste(&lvl.phi, b * bs, b * bs);
        psi_ext.paste(&lvl.psi, b * bs, b * bs);
        psi_ext_m1.paste(&lvl.psi_twist_down, b * bs, b * bs);
    }
    *phi_ext.at_mut(size - 1, size - 1) = TatePoly::one(ctx, params.e);
    *psi_ext.at_mut(size - 1, size - 1) = TatePoly::one(ctx, params.e);
    *psi_ext_m1.at_mut(size - 1, size - 1) = TatePoly::one(ctx, params.e);

    let mut g_residual_entries: Vec<TatePoly> = Vec::new();
    let mut s_theta_residual = RamSeries::zero(params.e);

    for (b, (u, alpha)) in pairs.iter().enumerate() {
        // verify the pair
        let exp_u = eval_entire(ctx, &exp, u, params.prec)?;
        let alpha_series = exact_to_series(ctx, alpha, params.e, params.prec)?;
        if !exp_u.sub(ctx, &alpha_series).is_zero_within_prec() {
            return Err(Error::MismatchBeyondPrecision(format!(
                "Exp(u) does not match alpha within precision for pair {b}"
            )));
        }
        let f = agf(ctx, &exp, u, params)?;
        let mut f_twists = Vec::with_capacity(r + 1);
        for j in 0..=r {
            f_twists.push(f.twist(ctx, j as i64)?);
        }
        let (s, s_m1) = s_alpha_rows(ctx, dm, &f_twists, params)?;

        // g = (s, d_t s, ..., d_t^n s) and its symbolic inverse twist
        let mut g = Mat::zero(ctx, 1, bs);
        let mut g_m1 = Mat::zero(ctx, 1, bs);
        for blk in 0..blocks {
            for (i, (si, si_m1)) in s.iter().zip(&s_m1).enumerate() {
                *g.at_mut(0, blk * r + i) = si.hyperderiv_t(ctx, blk as u64);
                *g_m1.at_mut(0, blk * r + i) = si_m1.hyperderiv_t(ctx, blk as u64);
            }
        }

        // h = (alpha, 0, ..., 0)
        let mut h = Mat::zero(ctx, 1, bs);
        *h.at_mut(0, 0) = TatePoly::constant(alpha_series.clone());

        // difference equation g^(-1) d[Phi] = g + h
        let diff = g_m1.mul(ctx, &lvl.phi).sub(ctx, &g.add(ctx, &h));
        g_residual_entries.extend(diff.data.iter().cloned());

        // first entry of s at t = theta equals u - alpha
        let s0 = eval_at_theta(ctx, &s[0])?;
        let expected = u.sub(ctx, &alpha_series);
        s_theta_residual = s_theta_residual.add(ctx, &s0.sub(ctx, &expected));

        // install the row blocks
        phi_ext.paste(&h, size - 1, b * bs);
        psi_ext.paste(&g.mul(ctx, &lvl.psi), size - 1, b * bs);
        psi_ext_m1.paste(&g_m1.mul(ctx, &lvl.psi_twist_down), size - 1, b * bs);
    }

    let g_residual = Mat {
        rows: 1,
        cols: g_residual_entries.len(),
        data: g_residual_entries,
    };
    let g_residual_report = ResidualReport::of(&g_residual);

    let residual = psi_ext_m1.sub(ctx, &phi_ext.mul(ctx, &psi_ext));
    let residual_report = ResidualReport::of(&residual);

    Ok(ExtensionMotive {
        n,
        phi_ext,
        psi_ext,
        g_residual_report,
        residual_report,
        s_theta_residual,
    })
}
