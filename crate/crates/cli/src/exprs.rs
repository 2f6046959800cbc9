//! Parsers for coefficient expressions in module files and system files.
//!
//! Polynomial grammar, shared by the w- and t-variable readers:
//!
//!   rational := poly ('/' poly)?
//!   poly     := term (('+' | '-') term)*
//!   term     := factor ('*' factor)*
//!   factor   := INT | VAR ('^' INT)?
//!
//! INT is a nonnegative integer; coefficients are read as canonical field
//! encodings (base-p digit vectors packed into an integer). In w-expressions
//! the token `theta` abbreviates w^(q^D).

use tmotive_core::error::{Error, Result};
use tmotive_core::exact::ExactCoef;
use tmotive_core::field::Ctx;
use tmotive_core::poly::{Poly, RatFunc};

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Var(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize, col0: usize) -> Lexer<'a> {
        Lexer {
            src,
            pos: 0,
            line,
            col: col0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col, msg.into())
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c == ' ' || c == '\t' {
                self.pos += c.len_utf8();
                self.col += 1;
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Tok> {
        self.skip_ws();
        let Some(c) = self.src[self.pos..].chars().next() else {
            return Ok(Tok::End);
        };
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '0'..='9' => {
                let start = self.pos;
                while self.src[self.pos..]
                    .chars()
                    .next()
                    .map_or(false, |c| c.is_ascii_digit())
                {
                    self.pos += 1;
                    self.col += 1;
                }
                let n: u64 = self.src[start..self.pos]
                    .parse()
                    .map_err(|_| self.err("integer too large"))?;
                return Ok(Tok::Int(n));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = self.pos;
                while self.src[self.pos..]
                    .chars()
                    .next()
                    .map_or(false, |c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                    self.col += 1;
                }
                return Ok(Tok::Var(self.src[start..self.pos].to_string()));
            }
            other => return Err(self.err(format!("unexpected character '{other}'"))),
        };
        self.pos += 1;
        self.col += 1;
        Ok(tok)
    }

    fn peek(&mut self) -> Result<Tok> {
        let save = (self.pos, self.col);
        let t = self.next()?;
        (self.pos, self.col) = save;
        Ok(t)
    }
}

/// Parses a polynomial in the named variable. `theta_alias` maps the token
/// `theta` to var^alias when set.
fn parse_poly(ctx: &Ctx, lex: &mut Lexer, var: &str, theta_alias: Option<u64>) -> Result<Poly> {
    let mut acc = Poly::zero();
    let mut negate = false;
    // optional leading sign
    match lex.peek()? {
        Tok::Minus => {
            lex.next()?;
            negate = true;
        }
        Tok::Plus => {
            lex.next()?;
        }
        _ => {}
    }
    loop {
        let term = parse_term(ctx, lex, var, theta_alias)?;
        acc = if negate {
            acc.sub(&ctx.fq, &term)
        } else {
            acc.add(&ctx.fq, &term)
        };
        match lex.peek()? {
            Tok::Plus => {
                lex.next()?;
                negate = false;
            }
            Tok::Minus => {
                lex.next()?;
                negate = true;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(ctx: &Ctx, lex: &mut Lexer, var: &str, theta_alias: Option<u64>) -> Result<Poly> {
    let mut acc = parse_factor(ctx, lex, var, theta_alias)?;
    while lex.peek()? == Tok::Star {
        lex.next()?;
        let f = parse_factor(ctx, lex, var, theta_alias)?;
        acc = acc.mul(&ctx.fq, &f);
    }
    Ok(acc)
}

fn parse_factor(ctx: &Ctx, lex: &mut Lexer, var: &str, theta_alias: Option<u64>) -> Result<Poly> {
    match lex.next()? {
        Tok::Int(n) => {
            let k = ctx
                .fq
                .from_encoding(n)
                .map_err(|_| lex.err(format!("coefficient {n} is not a valid field encoding")))?;
            Ok(Poly::constant(k))
        }
        Tok::Var(name) => {
            let exp = if lex.peek()? == Tok::Caret {
                lex.next()?;
                match lex.next()? {
                    Tok::Int(n) => n,
                    _ => return Err(lex.err("expected an integer exponent")),
                }
            } else {
                1
            };
            if name == var {
                Ok(Poly::monomial(ctx.fq.one(), exp as usize))
            } else if name == "theta" {
                let alias = theta_alias
                    .ok_or_else(|| lex.err("'theta' is not available in this context"))?;
                let total = alias
                    .checked_mul(exp)
                    .ok_or_else(|| lex.err("theta exponent overflow"))?;
                Ok(Poly::monomial(ctx.fq.one(), total as usize))
            } else {
                Err(lex.err(format!("unknown variable '{name}', expected '{var}'")))
            }
        }
        other => Err(lex.err(format!("unexpected token {other:?}"))),
    }
}

fn parse_rational(
    ctx: &Ctx,
    src: &str,
    line: usize,
    col0: usize,
    var: &str,
    theta_alias: Option<u64>,
) -> Result<RatFunc> {
    let mut lex = Lexer::new(src, line, col0);
    let num = parse_poly(ctx, &mut lex, var, theta_alias)?;
    let den = if lex.peek()? == Tok::Slash {
        lex.next()?;
        parse_poly(ctx, &mut lex, var, theta_alias)?
    } else {
        Poly::one(&ctx.fq)
    };
    if lex.peek()? != Tok::End {
        return Err(lex.err("trailing input after expression"));
    }
    if den.is_zero() {
        return Err(lex.err("zero denominator"));
    }
    RatFunc::new(&ctx.fq, num, den)
}

/// w-rational expression (module coefficients); `theta` encodes w^(q^D).
pub fn parse_w_expr(ctx: &Ctx, src: &str, line: usize, col0: usize) -> Result<ExactCoef> {
    let alias = ctx.spec.q_pow(ctx.spec.d_twist);
    let r = parse_rational(ctx, src, line, col0, "w", Some(alias))?;
    Ok(ExactCoef::from_rat(r))
}

/// t-rational expression over F_q; coefficients must fall inside the base
/// field.
pub fn parse_t_expr(ctx: &Ctx, src: &str, line: usize, col0: usize) -> Result<RatFunc> {
    let r = parse_rational(ctx, src, line, col0, "t", None)?;
    for c in r.num.c.iter().chain(r.den.c.iter()) {
        if !ctx.in_base_field(*c) {
            return Err(Error::parse(
                line,
                col0,
                "coefficient lies outside F_q".to_string(),
            ));
        }
    }
    Ok(r)
}

/// Writes a t-rational function back in the grammar above.
pub fn format_t_expr(r: &RatFunc) -> String {
    let poly = |p: &Poly| -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in p.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = match (i, c.0) {
                (0, v) => format!("{v}"),
                (1, 1) => "t".to_string(),
                (1, v) => format!("{v}*t"),
                (_, 1) => format!("t^{i}"),
                (_, v) => format!("{v}*t^{i}"),
            };
            parts.push(s);
        }
        parts.join("+")
    };
    if r.den.deg() == Some(0) && r.den.coeff(0).0 == 1 {
        poly(&r.num)
    } else {
        format!("{}/{}", poly(&r.num), poly(&r.den))
    }
}
