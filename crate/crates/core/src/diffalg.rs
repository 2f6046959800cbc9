//! The linear fragment of hyperdifferential polynomial algebra over F_q(t):
//! the variable order, the division algorithm, prolongation ideals, and
//! elimination down to the derivative-free equations.
//!
//! Only homogeneous degree-one polynomials (plus a constant term) are
//! representable; that fragment is closed under everything the dimension
//! pipeline needs, and linear ideal membership is decided by reduction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Ctx;
use crate::galois::GaloisSystem;
use crate::mat::{same_row_space, Mat};
use crate::poly::{binom_mod_p, RatFunc};

/// d_t^ell((X_h)_(i,j)). The derived ordering is the elimination order:
/// block index first, then derivative order, then position column-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffVar {
    pub h: u32,
    pub ell: u32,
    pub j: u32,
    pub i: u32,
}

impl DiffVar {
    pub fn base(h: u32, i: u32, j: u32) -> DiffVar {
        DiffVar { h, ell: 0, j, i }
    }
}

/// Homogeneous-linear hyperdifferential polynomial with an affine constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinDiffPoly {
    pub terms: BTreeMap<DiffVar, RatFunc>,
    pub constant: RatFunc,
}

impl LinDiffPoly {
    pub fn zero() -> LinDiffPoly {
        LinDiffPoly {
            terms: BTreeMap::new(),
            constant: RatFunc::zero(),
        }
    }

    pub fn var(v: DiffVar, ctx: &Ctx) -> LinDiffPoly {
        let mut terms = BTreeMap::new();
        terms.insert(v, RatFunc::one(&ctx.fq));
        LinDiffPoly {
            terms,
            constant: RatFunc::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn leading_var(&self) -> Option<DiffVar> {
        self.terms.keys().next_back().copied()
    }

    /// Largest derivative order appearing in the polynomial.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|v| v.ell).max().unwrap_or(0)
    }

    pub fn coeff(&self, v: &DiffVar) -> RatFunc {
        self.terms.get(v).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn add(&self, ctx: &Ctx, o: &LinDiffPoly) -> LinDiffPoly {
        let mut out = self.clone();
        for (v, c) in &o.terms {
            let s = out.coeff(v).add(&ctx.fq, c);
            if s.is_zero() {
                out.terms.remove(v);
            } else {
                out.terms.insert(*v, s);
            }
        }
        out.constant = out.constant.add(&ctx.fq, &o.constant);
        out
    }

    pub fn neg(&self, ctx: &Ctx) -> LinDiffPoly {
        LinDiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(v, c)| (*v, c.neg(&ctx.fq)))
                .collect(),
            constant: self.constant.neg(&ctx.fq),
        }
    }

    pub fn sub(&self, ctx: &Ctx, o: &LinDiffPoly) -> LinDiffPoly {
        self.add(ctx, &o.neg(ctx))
    }

    pub fn scale(&self, ctx: &Ctx, c: &RatFunc) -> LinDiffPoly {
        if c.is_zero() {
            return LinDiffPoly::zero();
        }
        LinDiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(v, x)| (*v, x.mul(&ctx.fq, c)))
                .collect(),
            constant: self.constant.mul(&ctx.fq, c),
        }
    }

    /// a-th hyperderivative: the product rule splits each coefficient-times-
    /// variable term, with composition binomials on the variable side.
    pub fn apply_partial(&self, ctx: &Ctx, a: u64) -> LinDiffPoly {
        if a == 0 {
            return self.clone();
        }
        let fq = &ctx.fq;
        let mut out = LinDiffPoly::zero();
        out.constant = self.constant.hyperderiv(fq, a);
        for (v, c) in &self.terms {
            for a1 in 0..=a {
                let dc = c.hyperderiv(fq, a1);
                if dc.is_zero() {
                    continue;
                }
                let a2 = a - a1;
                let b = binom_mod_p(a2 + v.ell as u64, v.ell as u64, ctx.spec.p);
                if b == 0 {
                    continue;
                }
                let coeff = dc.scale(fq, fq.scalar(b));
                let nv = DiffVar {
                    h: v.h,
                    ell: v.ell + a2 as u32,
                    j: v.j,
                    i: v.i,
                };
                let cur = out.coeff(&nv).add(fq, &coeff);
                if cur.is_zero() {
                    out.terms.remove(&nv);
                } else {
                    out.terms.insert(nv, cur);
                }
            }
        }
        out
    }
}

/// Division by a set with pairwise-distinct leading variables: subtracts
/// multiples of members until no leading variable of the set occurs.
pub fn reduce(ctx: &Ctx, p: &LinDiffPoly, set: &BTreeMap<DiffVar, LinDiffPoly>) -> LinDiffPoly {
    let fq = &ctx.fq;
    let mut out = p.clone();
    loop {
        let Some((v, c)) = out
            .terms
            .iter()
            .rev()
            .find(|(v, _)| set.contains_key(v))
            .map(|(v, c)| (*v, c.clone()))
        else {
            return out;
        };
        let g = &set[&v];
        let factor = c
            .div(fq, &g.coeff(&v))
            .expect("set members have nonzero leads");
        out = out.sub(ctx, &g.scale(ctx, &factor));
        debug_assert!(!out.terms.contains_key(&v));
    }
}

/// Interreduction: returns a set with distinct leading variables and
/// mutually reduced tails spanning the same space.
pub fn interreduce(ctx: &Ctx, gens: &[LinDiffPoly]) -> BTreeMap<DiffVar, LinDiffPoly> {
    let mut set: BTreeMap<DiffVar, LinDiffPoly> = BTreeMap::new();
    for g in gens {
        let mut g = reduce(ctx, g, &set);
        if g.terms.is_empty() {
            continue;
        }
        let lv = g.leading_var().unwrap();
        let inv = g.coeff(&lv).inv(&ctx.fq).unwrap();
        g = g.scale(ctx, &inv);
        set.insert(lv, g);
    }
    // second pass: reduce every tail against the full set
    let keys: Vec<DiffVar> = set.keys().copied().collect();
    for k in keys {
        let g = set.remove(&k).unwrap();
        let g = reduce(ctx, &g, &set);
        if !g.terms.is_empty() {
            set.insert(k, g);
        }
    }
    set
}

/// Generators of the prolongation ideal: every ell-th hyperderivative, for
/// ell <= order_bound, of the base system rows B vect(X_0) and of the defect
/// relations d^h X_0 - X_h for h = 1..n.
pub fn generate_t(
    ctx: &Ctx,
    sys: &GaloisSystem,
    n: u32,
    order_bound: u32,
) -> Result<Vec<LinDiffPoly>> {
    if order_bound < n {
        return Err(Error::Invalid(
            "order bound must be at least the level".into(),
        ));
    }
    let r = sys.r;
    let mut base: Vec<LinDiffPoly> = Vec::new();
    for row in 0..sys.b.rows {
        let mut p = LinDiffPoly::zero();
        for j in 0..r {
            for i in 0..r {
                let c = sys.b.at(row, (j * r + i) as usize);
                if !c.is_zero() {
                    p.terms.insert(DiffVar::base(0, i + 1, j + 1), c.clone());
                }
            }
        }
        base.push(p);
    }
    for h in 1..=n {
        for j in 1..=r {
            for i in 1..=r {
                let mut p = LinDiffPoly::zero();
                p.terms
                    .insert(DiffVar { h: 0, ell: h, j, i }, RatFunc::one(&ctx.fq));
                p.terms
                    .insert(DiffVar::base(h, i, j), RatFunc::one(&ctx.fq).neg(&ctx.fq));
                base.push(p);
            }
        }
    }
    let mut out = Vec::with_capacity(base.len() * (order_bound as usize + 1));
    for g in &base {
        for ell in 0..=order_bound {
            out.push(g.apply_partial(ctx, ell as u64));
        }
    }
    Ok(out)
}

/// Elimination: Gaussian elimination pivoting on every variable of positive
/// derivative order first, keeping the rows that survive with support only
/// on the order-zero variables. Columns of the returned system are indexed
/// to match the prolonged base system: block h (descending from n) times
/// column-major position.
pub fn eliminate(ctx: &Ctx, gens: &[LinDiffPoly], r: u32, n: u32) -> Result<Mat<RatFunc>> {
    let fq = &ctx.fq;
    // collect variables, positive order first, each group descending
    let mut elim_vars: Vec<DiffVar> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for g in gens {
        if !g.constant.is_zero() {
            return Err(Error::Invalid(
                "elimination expects homogeneous generators".into(),
            ));
        }
        for v in g.terms.keys() {
            if v.ell > 0 && seen.insert(*v) {
                elim_vars.push(*v);
            }
        }
    }
    elim_vars.sort();
    elim_vars.reverse();
    let keep_cols = (n as usize + 1) * (r as usize * r as usize);
    let keep_index = |v: &DiffVar| -> usize {
        debug_assert_eq!(v.ell, 0);
        let block = (n - v.h) as usize;
        block * (r as usize * r as usize) + (v.j as usize - 1) * r as usize + (v.i as usize - 1)
    };
    let elim_index: BTreeMap<DiffVar, usize> =
        elim_vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let width = elim_vars.len() + keep_cols;
    let mut rows: Vec<Vec<RatFunc>> = Vec::with_capacity(gens.len());
    for g in gens {
        let mut row = vec![RatFunc::zero(); width];
        for (v, c) in &g.terms {
            let col = if v.ell > 0 {
                elim_index[v]
            } else {
                elim_vars.len() + keep_index(v)
            };
            row[col] = c.clone();
        }
        rows.push(row);
    }
    // eliminate left-to-right; rows whose support ends up entirely in the
    // keep block form the induced system
    let mut reduced: Vec<Vec<RatFunc>> = Vec::new();
    for col in 0..width {
        let Some(pos) = rows.iter().position(|r| !r[col].is_zero()) else {
            continue;
        };
        let pivot = rows.swap_remove(pos);
        let inv = pivot[col].inv(fq)?;
        let pivot: Vec<RatFunc> = pivot.iter().map(|x| x.mul(fq, &inv)).collect();
        for r in rows.iter_mut() {
            if !r[col].is_zero() {
                let f = r[col].clone();
                for (x, p) in r.iter_mut().zip(&pivot) {
                    *x = x.sub(fq, &f.mul(fq, p));
                }
            }
        }
        reduced.push(pivot);
        if rows.is_empty() {
            break;
        }
    }
    let mut out_rows: Vec<Vec<RatFunc>> = Vec::new();
    for row in reduced {
        if row[..elim_vars.len()].iter().all(RatFunc::is_zero) {
            out_rows.push(row[elim_vars.len()..].to_vec());
        }
    }
    Ok(if out_rows.is_empty() {
        Mat {
            rows: 0,
            cols: keep_cols,
            data: Vec::new(),
        }
    } else {
        Mat::from_rows(out_rows)
    })
}

/// Runs the elimination and checks the induced system spans exactly the
/// prolonged base system; retries with a deeper order bound before giving
/// up.
pub fn eliminate_and_check(ctx: &Ctx, sys: &GaloisSystem, n: u32) -> Result<Mat<RatFunc>> {
    let target = crate::galois::prolonged_b(ctx, sys, n)?;
    let mut order_bound = n;
    for _attempt in 0..2 {
        let gens = generate_t(ctx, sys, n, order_bound)?;
        let induced = eliminate(ctx, &gens, sys.r, n)?;
        if induced.cols == target.cols && same_row_space(ctx, &induced, &target) {
            return Ok(induced);
        }
        order_bound += 2;
    }
    Err(Error::EliminationMismatch(format!(
        "induced system does not match the prolonged base system at level {n}"
    )))
}

/// Linear ideal membership: reduce against all prolongations of the
/// generators up to the order bound.
pub fn linear_ideal_contains(
    ctx: &Ctx,
    p: &LinDiffPoly,
    gens: &[LinDiffPoly],
    order_bound: u32,
) -> bool {
    let mut prolonged = Vec::with_capacity(gens.len() * (order_bound as usize + 1));
    for g in gens {
        for ell in 0..=order_bound {
            prolonged.push(g.apply_partial(ctx, ell as u64));
        }
    }
    let set = interreduce(ctx, &prolonged);
    reduce(ctx, p, &set).is_zero()
}
