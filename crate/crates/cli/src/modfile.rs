//! Module definition files.
//!
//! Line-oriented `key = value` format with `#` comments:
//!
//! ```text
//! p = 3          # characteristic
//! e = 1          # q = p^e
//! m = 2          # constants F_{q^m}
//! D = 1          # twist depth, theta = w^(q^D)
//! r = 1          # rank
//! kappa_1 = 1    # w-rational coefficients of rho_t
//! lattice = carlitz-power            # optional lattice recipe
//! lambda_1 = e=2; m=2; terms=[(3,1)]; prec=40   # or explicit series
//! endo = [theta, 1]                  # tau-coefficients, repeatable
//! alpha = 1                          # logarithm targets, repeatable
//! ```

use std::path::Path;

use tmotive_core::drinfeld::DrinfeldModule;
use tmotive_core::error::{Error, Result};
use tmotive_core::exact::ExactCoef;
use tmotive_core::field::{Ctx, FieldSpec};
use tmotive_core::series::{parse_ram_series, RamSeries};
use tmotive_core::twisted::{TwVar, TwistedPoly};

use crate::exprs::parse_w_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeHint {
    /// kappa = (0, ..., 0, 1): the lattice of the constant-field extension
    /// of the rank-one module, spanned by omega^j times its period.
    CarlitzPower,
}

#[derive(Debug, Clone)]
pub struct ModuleDef {
    pub ctx: Ctx,
    pub dm: DrinfeldModule,
    pub lattice_hint: Option<LatticeHint>,
    pub lambdas: Vec<RamSeries>,
    pub endos: Vec<TwistedPoly<ExactCoef>>,
    pub alphas: Vec<ExactCoef>,
}

struct RawLine {
    key: String,
    value: String,
    line: usize,
    col: usize,
}

pub fn load(path: &Path) -> Result<ModuleDef> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ModuleDef> {
    let mut raws: Vec<RawLine> = Vec::new();
    for (ln, full_line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let uncommented = match full_line.find('#') {
            Some(p) => &full_line[..p],
            None => full_line,
        };
        if uncommented.trim().is_empty() {
            continue;
        }
        let Some(eq) = uncommented.find('=') else {
            return Err(Error::parse(line_no, 1, "expected 'key = value'"));
        };
        let key = uncommented[..eq].trim().to_string();
        let raw_value = &uncommented[eq + 1..];
        let lead_ws = raw_value.len() - raw_value.trim_start().len();
        raws.push(RawLine {
            key,
            value: raw_value.trim().to_string(),
            line: line_no,
            col: eq + 2 + lead_ws,
        });
    }

    let int_field = |name: &str| -> Result<u64> {
        let raw = raws
            .iter()
            .find(|r| r.key == name)
            .ok_or_else(|| Error::parse(1, 1, format!("missing field '{name}'")))?;
        raw.value
            .parse::<u64>()
            .map_err(|_| Error::parse(raw.line, raw.col, format!("bad integer for '{name}'")))
    };

    let p = int_field("p")?;
    let e = int_field("e")? as u32;
    let m = int_field("m")? as u32;
    let d = int_field("D")? as u32;
    let r = int_field("r")? as u32;
    let spec = FieldSpec::new(p, e, m, d)?;
    let ctx = Ctx::new(spec)?;

    let mut kappa = vec![None; r as usize];
    let mut lattice_hint = None;
    let mut lambdas = Vec::new();
    let mut endos = Vec::new();
    let mut alphas = Vec::new();

    for raw in &raws {
        match raw.key.as_str() {
            "p" | "e" | "m" | "D" | "r" => {}
            k if k.starts_with("kappa_") => {
                let idx: usize = k[6..]
                    .parse()
                    .map_err(|_| Error::parse(raw.line, 1, "bad kappa index"))?;
                if idx == 0 || idx > r as usize {
                    return Err(Error::parse(
                        raw.line,
                        1,
                        format!("kappa index {idx} out of range 1..={r}"),
                    ));
                }
                kappa[idx - 1] = Some(parse_w_expr(&ctx, &raw.value, raw.line, raw.col)?);
            }
            "lattice" => match raw.value.as_str() {
                "carlitz-power" => lattice_hint = Some(LatticeHint::CarlitzPower),
                other => {
                    return Err(Error::parse(
                        raw.line,
                        raw.col,
                        format!("unknown lattice recipe '{other}'"),
                    ))
                }
            },
            k if k.starts_with("lambda_") => {
                let s = parse_ram_series(&ctx, &raw.value)
                    .map_err(|e| position_error(e, raw.line, raw.col))?;
                lambdas.push(s);
            }
            "endo" => {
                let inner = raw
                    .value
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .ok_or_else(|| {
                        Error::parse(raw.line, raw.col, "endo expects a bracketed list")
                    })?;
                let mut coeffs = Vec::new();
                for part in inner.split(',') {
                    coeffs.push(parse_w_expr(&ctx, part.trim(), raw.line, raw.col)?);
                }
                endos.push(TwistedPoly::from_coeffs(TwVar::Tau, coeffs));
            }
            "alpha" => {
                alphas.push(parse_w_expr(&ctx, &raw.value, raw.line, raw.col)?);
            }
            other => {
                return Err(Error::parse(raw.line, 1, format!("unknown key '{other}'")));
            }
        }
    }

    let mut kk = Vec::with_capacity(r as usize);
    for (i, k) in kappa.into_iter().enumerate() {
        kk.push(k.ok_or_else(|| Error::parse(1, 1, format!("missing kappa_{}", i + 1)))?);
    }
    let dm = DrinfeldModule::new(&ctx, kk)?;
    Ok(ModuleDef {
        ctx,
        dm,
        lattice_hint,
        lambdas,
        endos,
        alphas,
    })
}

fn position_error(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse { col: c, msg, .. } => Error::Parse {
            line,
            col: col + c - 1,
            msg,
        },
        other => other,
    }
}

/// Materializes the lattice basis at the requested precision: explicit
/// series when given, otherwise via the declared recipe.
pub fn lattice_basis(def: &ModuleDef, prec: i64) -> Result<(u32, Vec<RamSeries>)> {
    if !def.lambdas.is_empty() {
        if def.lambdas.len() != def.dm.rank as usize {
            return Err(Error::Invalid(format!(
                "expected {} lambda values, found {}",
                def.dm.rank,
                def.lambdas.len()
            )));
        }
        let e = def.lambdas[0].e;
        if def.lambdas.iter().any(|l| l.e != e) {
            return Err(Error::Invalid(
                "lambda values use mixed ramification indices".into(),
            ));
        }
        return Ok((e, def.lambdas.clone()));
    }
    match def.lattice_hint {
        Some(LatticeHint::CarlitzPower) => carlitz_power_lattice(def, prec),
        None => Err(Error::Invalid(
            "rank >= 1 verification needs lambda_i values or a lattice recipe".into(),
        )),
    }
}

/// Lattice of rho_t = theta + tau^r: the period of the rank-one module over
/// the constants F_{q^r}, spread over a power basis of F_{q^r} / F_q.
fn carlitz_power_lattice(def: &ModuleDef, prec: i64) -> Result<(u32, Vec<RamSeries>)> {
    let ctx = &def.ctx;
    let r = def.dm.rank;
    for i in 1..r {
        if !def.dm.kappa_at(i).is_zero() {
            return Err(Error::Invalid(
                "the carlitz-power recipe needs kappa_i = 0 for i < r".into(),
            ));
        }
    }
    if def.dm.kappa_at(r) != ExactCoef::one(ctx) {
        return Err(Error::Invalid(
            "the carlitz-power recipe needs kappa_r = 1".into(),
        ));
    }
    if ctx.spec.m % r != 0 {
        return Err(Error::Invalid(
            "constants must contain F_{q^r} for the carlitz-power recipe".into(),
        ));
    }
    // same tables, viewed as a degree-(m/r) extension of F_{q^r}
    let big_spec = FieldSpec::new(ctx.spec.p, ctx.spec.e * r, ctx.spec.m / r, 1)?;
    let big_ctx = Ctx::new(big_spec)?;
    debug_assert_eq!(big_ctx.fq.modulus, ctx.fq.modulus);
    let (pi, _root) = tmotive_core::drinfeld::carlitz_period(&big_ctx, prec)?;
    // power basis of F_{q^r} over F_q from a generator of its unit group
    let qr = ctx.spec.q_pow(r);
    let sub_gen_log = (ctx.fq.order - 1) / (qr - 1);
    let y = ctx.fq.pow(ctx.fq.generator(), sub_gen_log);
    let mut basis = Vec::with_capacity(r as usize);
    let mut cur = ctx.fq.one();
    for _ in 0..r {
        basis.push(pi.scale(ctx, cur));
        cur = ctx.fq.mul(cur, y);
    }
    Ok((pi.e, basis))
}
