//! Finite-field constants.
//!
//! The working constant field is F_{q^m} with q = p^e. Elements are stored
//! as `K(u32)` where the integer encodes the coefficient vector of the
//! element on the power basis of a fixed monic irreducible polynomial over
//! F_p, packed in base p. Multiplication runs through discrete-log tables,
//! addition digit-wise in base p, so the whole table set is deterministic
//! for a given (p, e, m).

use crate::error::{Error, Result};

/// Field and twist parameters fixed for a whole computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    /// Characteristic.
    pub p: u64,
    /// q = p^e.
    pub e: u32,
    /// Constants live in F_{q^m}.
    pub m: u32,
    /// Twist depth: theta = w^{q^D}, so negative twists down to depth D stay exact.
    pub d_twist: u32,
}

impl FieldSpec {
    pub fn new(p: u64, e: u32, m: u32, d_twist: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::BadFieldSpec(format!("p = {p} is not prime")));
        }
        if e < 1 || m < 1 {
            return Err(Error::BadFieldSpec("e and m must be >= 1".into()));
        }
        Ok(FieldSpec { p, e, m, d_twist })
    }

    /// q = p^e.
    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// q^n for small n, as u64 (checked).
    pub fn q_pow(&self, n: u32) -> u64 {
        self.q().checked_pow(n).expect("q^n overflow")
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of the active finite field; meaningful only next to its [`Fq`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct K(pub u32);

impl K {
    pub const ZERO: K = K(0);

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

/// Table-backed arithmetic for F_{p^n}.
#[derive(Debug, Clone)]
pub struct Fq {
    pub p: u64,
    /// Degree over F_p.
    pub n: u32,
    /// p^n.
    pub order: u64,
    /// Monic irreducible modulus, coefficient vector over F_p, length n+1.
    pub modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

const MAX_ORDER: u64 = 1 << 20;

impl Fq {
    /// Builds tables for F_{p^n} with the lexicographically smallest monic
    /// irreducible modulus and the smallest generator of the unit group.
    pub fn new(p: u64, n: u32) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::BadFieldSpec(format!("p = {p} is not prime")));
        }
        let order = p
            .checked_pow(n)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or_else(|| Error::BadFieldSpec(format!("field order p^{n} too large")))?;
        let modulus = smallest_irreducible(p, n);
        let mut fq = Fq {
            p,
            n,
            order,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        fq.build_tables();
        Ok(fq)
    }

    fn build_tables(&mut self) {
        let order = self.order;
        let g = self.find_generator();
        let mut exp = vec![0u32; (order - 1) as usize];
        let mut log = vec![0u32; order as usize];
        let mut acc = 1u32;
        for i in 0..(order - 1) as usize {
            exp[i] = acc;
            log[acc as usize] = i as u32;
            acc = self.mul_raw(acc, g);
        }
        self.exp = exp;
        self.log = log;
    }

    /// Polynomial-basis multiplication used only while building tables.
    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let pa = decode(self.p, self.n, a);
        let pb = decode(self.p, self.n, b);
        let mut prod = vec![0u64; (2 * self.n) as usize];
        for (i, &x) in pa.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in pb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // reduce modulo the modulus
        for d in (self.n as usize..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..self.n as usize {
                let m = self.modulus[i];
                if m != 0 {
                    let idx = d - self.n as usize + i;
                    prod[idx] = (prod[idx] + self.p * self.p - c * m % self.p) % self.p;
                }
            }
        }
        encode(self.p, &prod[..self.n as usize])
    }

    fn find_generator(&self) -> u32 {
        let ord = self.order - 1;
        let primes = prime_factors(ord);
        'cand: for g in 2..self.order {
            let g = g as u32;
            for &f in &primes {
                if self.pow_raw(g, ord / f) == 1 {
                    continue 'cand;
                }
            }
            return g;
        }
        1
    }

    fn pow_raw(&self, base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, b);
            }
            b = self.mul_raw(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn zero(&self) -> K {
        K(0)
    }

    pub fn one(&self) -> K {
        K(1)
    }

    /// Embeds a prime-field residue.
    pub fn scalar(&self, c: u64) -> K {
        K((c % self.p) as u32)
    }

    pub fn from_encoding(&self, v: u64) -> Result<K> {
        if v < self.order {
            Ok(K(v as u32))
        } else {
            Err(Error::Invalid(format!(
                "encoding {v} out of range for field of order {}",
                self.order
            )))
        }
    }

    pub fn add(&self, a: K, b: K) -> K {
        if self.p == 2 {
            return K(a.0 ^ b.0);
        }
        let mut out = 0u64;
        let mut mult = 1u64;
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * mult;
            mult *= self.p;
            x /= self.p;
            y /= self.p;
        }
        K(out as u32)
    }

    pub fn neg(&self, a: K) -> K {
        if self.p == 2 {
            return a;
        }
        let mut out = 0u64;
        let mut mult = 1u64;
        let mut x = a.0 as u64;
        while x > 0 {
            let d = (self.p - x % self.p) % self.p;
            out += d * mult;
            mult *= self.p;
            x /= self.p;
        }
        K(out as u32)
    }

    pub fn sub(&self, a: K, b: K) -> K {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: K, b: K) -> K {
        if a.0 == 0 || b.0 == 0 {
            return K(0);
        }
        let ord = self.order - 1;
        let l = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % ord;
        K(self.exp[l as usize])
    }

    pub fn inv(&self, a: K) -> Result<K> {
        if a.0 == 0 {
            return Err(Error::DivisionByZeroWithinPrecision(
                "inverse of zero field element".into(),
            ));
        }
        let ord = self.order - 1;
        let l = (ord - self.log[a.0 as usize] as u64) % ord;
        Ok(K(self.exp[l as usize]))
    }

    pub fn pow(&self, a: K, e: u64) -> K {
        if a.0 == 0 {
            return if e == 0 { K(1) } else { K(0) };
        }
        let ord = self.order - 1;
        let l = (self.log[a.0 as usize] as u64).wrapping_mul(e % ord) % ord;
        K(self.exp[l as usize])
    }

    /// x -> x^(p^k), k >= 0.
    pub fn frob_p(&self, a: K, k: u32) -> K {
        if a.0 == 0 {
            return a;
        }
        let ord = self.order - 1;
        let mut l = self.log[a.0 as usize] as u64;
        for _ in 0..(k % self.n) {
            l = l * self.p % ord;
        }
        K(self.exp[l as usize])
    }

    /// Inverse of `frob_p(., 1)`; exists because the field is perfect.
    pub fn frob_p_inv(&self, a: K, k: u32) -> K {
        self.frob_p(a, (self.n - (k % self.n)) % self.n)
    }

    /// True if a^(p^d) = a, i.e. the element lies in F_{p^d}.
    pub fn in_subfield(&self, a: K, d: u32) -> bool {
        self.frob_p(a, d % self.n) == a
    }

    pub fn elements(&self) -> impl Iterator<Item = K> {
        (0..self.order as u32).map(K)
    }

    /// The fixed multiplicative generator behind the discrete-log tables.
    pub fn generator(&self) -> K {
        K(self.exp[1 % self.exp.len().max(1)])
    }
}

fn decode(p: u64, n: u32, mut v: u32) -> Vec<u64> {
    let mut out = vec![0u64; n as usize];
    for slot in out.iter_mut() {
        *slot = (v as u64) % p;
        v = ((v as u64) / p) as u32;
    }
    out
}

fn encode(p: u64, digits: &[u64]) -> u32 {
    let mut out = 0u64;
    for &d in digits.iter().rev() {
        out = out * p + d;
    }
    out as u32
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Lexicographically smallest monic irreducible of degree n over F_p,
/// returned as a coefficient vector of length n+1.
fn smallest_irreducible(p: u64, n: u32) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    let count = p.pow(n);
    for tail in 0..count {
        let mut f = decode_u64(p, n, tail);
        f.push(1); // monic
        if poly_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("an irreducible of every degree exists")
}

fn decode_u64(p: u64, n: u32, mut v: u64) -> Vec<u64> {
    let mut out = vec![0u64; n as usize];
    for slot in out.iter_mut() {
        *slot = v % p;
        v /= p;
    }
    out
}

// -- tiny F_p[x] helpers used only for modulus construction --

fn poly_mulmod(p: u64, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    let n = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (n..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for i in 0..n {
            if f[i] != 0 {
                prod[d - n + i] = (prod[d - n + i] + p * p - c * f[i] % p) % p;
            }
        }
    }
    prod.truncate(n.max(1));
    prod
}

fn poly_powmod(p: u64, base: &[u64], mut e: u64, f: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(p, &acc, &b, f);
        }
        b = poly_mulmod(p, &b, &b, f);
        e >>= 1;
    }
    acc
}

fn poly_gcd_fp(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a: Vec<u64> = a.to_vec();
    let mut b: Vec<u64> = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem_fp(p, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn poly_rem_fp(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(p, b[db]);
    while r.len() > db {
        let c = *r.last().unwrap() % p;
        if c != 0 {
            let shift = r.len() - 1 - db;
            let factor = c * lead_inv % p;
            for i in 0..=db {
                r[shift + i] = (r[shift + i] + p * p - factor * b[i] % p) % p;
            }
        }
        r.pop();
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn mod_inv(p: u64, a: u64) -> u64 {
    let mut res = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            res = res * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    res
}

fn poly_irreducible(p: u64, f: &[u64]) -> bool {
    let n = (f.len() - 1) as u32;
    let x = vec![0u64, 1];
    // x^(p^n) == x mod f
    let mut xp = x.clone();
    for _ in 0..n {
        xp = poly_powmod(p, &xp, p, f);
    }
    let mut diff = xp.clone();
    sub_x(p, &mut diff);
    trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    // gcd(x^(p^(n/l)) - x, f) == 1 for every prime l | n
    for l in prime_factors(n as u64) {
        let d = n / l as u32;
        let mut xq = x.clone();
        for _ in 0..d {
            xq = poly_powmod(p, &xq, p, f);
        }
        sub_x(p, &mut xq);
        trim(&mut xq);
        let g = poly_gcd_fp(p, f, &xq);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn sub_x(p: u64, v: &mut Vec<u64>) {
    if v.len() < 2 {
        v.resize(2, 0);
    }
    v[1] = (v[1] + p - 1) % p;
}

/// The context threaded through all arithmetic: parameters plus the table
/// set for the working constants F_{q^m}.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub spec: FieldSpec,
    pub fq: Fq,
}

impl Ctx {
    pub fn new(spec: FieldSpec) -> Result<Ctx> {
        let fq = Fq::new(spec.p, spec.e * spec.m)?;
        Ok(Ctx { spec, fq })
    }

    /// x -> x^(q^k) on constants, k possibly negative.
    pub fn frob_q(&self, a: K, k: i64) -> K {
        let n = self.fq.n as i64;
        let steps = ((k * self.spec.e as i64) % n + n) % n;
        self.fq.frob_p(a, steps as u32)
    }

    /// True if the constant lies in F_q.
    pub fn in_base_field(&self, a: K) -> bool {
        self.fq.in_subfield(a, self.spec.e)
    }
}

/// An F_p-linear embedding of the subfield F_{p^d} of one tabled field into
/// another tabled field. Built by decomposing over a power basis of a
/// generator and mapping the generator to a root of its minimal polynomial.
pub struct SubfieldEmbedding<'a> {
    src: &'a Fq,
    dst: &'a Fq,
    d: u32,
    src_basis: Vec<K>,
    dst_basis: Vec<K>,
    /// Row-reduced digit matrix of src_basis with bookkeeping for solving.
    solver: FpSolver,
}

impl<'a> SubfieldEmbedding<'a> {
    pub fn new(src: &'a Fq, dst: &'a Fq, d: u32) -> Result<SubfieldEmbedding<'a>> {
        if src.p != dst.p || src.n % d != 0 || dst.n % d != 0 {
            return Err(Error::Invalid(
                "incompatible fields for subfield embedding".into(),
            ));
        }
        // generator y of F_{p^d}^x inside src
        let sub_ord = src.p.pow(d) - 1;
        let y = K(src.exp[(((src.order - 1) / sub_ord) % (src.order - 1)) as usize]);
        let src_basis: Vec<K> = (0..d).map(|i| src.pow(y, i as u64)).collect();
        // minimal polynomial of y over F_p: dependency among 1, y, ..., y^d
        let powers: Vec<K> = (0..=d).map(|i| src.pow(y, i as u64)).collect();
        let minpoly = minimal_dependency(src, &powers)?;
        // root of that polynomial in dst lying in F_{p^d}
        let mut root = None;
        for z in dst.elements() {
            if !dst.in_subfield(z, d) {
                continue;
            }
            let mut acc = dst.zero();
            for &c in minpoly.iter().rev() {
                acc = dst.add(dst.mul(acc, z), dst.scalar(c));
            }
            if acc.is_zero() {
                root = Some(z);
                break;
            }
        }
        let z = root.ok_or_else(|| {
            Error::Invalid("no root of subfield minimal polynomial in target".into())
        })?;
        let dst_basis: Vec<K> = (0..d).map(|i| dst.pow(z, i as u64)).collect();
        let solver = FpSolver::new(src, &src_basis);
        Ok(SubfieldEmbedding {
            src,
            dst,
            d,
            src_basis,
            dst_basis,
            solver,
        })
    }

    /// Maps a source element that lies in F_{p^d}; errors otherwise.
    pub fn map(&self, a: K) -> Result<K> {
        if !self.src.in_subfield(a, self.d) {
            return Err(Error::Invalid(
                "element is not in the subfield being embedded".into(),
            ));
        }
        let coeffs = self.solver.solve(self.src, a)?;
        let mut out = self.dst.zero();
        for (c, &b) in coeffs.iter().zip(&self.dst_basis) {
            out = self.dst.add(out, self.dst.mul(self.dst.scalar(*c), b));
        }
        let _ = &self.src_basis;
        Ok(out)
    }
}

/// Monic minimal polynomial (degree d) of y over F_p, given powers[i] = y^i
/// for i = 0..=d with the first d powers independent.
fn minimal_dependency(fq: &Fq, powers: &[K]) -> Result<Vec<u64>> {
    let d = powers.len() - 1;
    let solver = FpSolver::new(fq, &powers[..d]);
    let coeffs = solver.solve(fq, powers[d])?;
    let mut out: Vec<u64> = coeffs.iter().map(|&a| (fq.p - a % fq.p) % fq.p).collect();
    out.resize(d, 0);
    out.push(1);
    Ok(out)
}

/// Solves for F_p-coordinates of field elements on a fixed basis, by Gaussian
/// elimination on base-p digit vectors.
struct FpSolver {
    p: u64,
    rows: Vec<Vec<u64>>, // reduced basis digit vectors
    pivots: Vec<usize>,
    ops: Vec<Vec<(usize, u64)>>, // how each reduced row combines original basis vectors
}

impl FpSolver {
    fn new(fq: &Fq, basis: &[K]) -> FpSolver {
        let n = fq.n as usize;
        let p = fq.p;
        let mut rows: Vec<Vec<u64>> = basis.iter().map(|b| decode(p, fq.n, b.0)).collect();
        let mut ops: Vec<Vec<(usize, u64)>> = (0..basis.len()).map(|i| vec![(i, 1u64)]).collect();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for col in 0..n {
            let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(r, pr);
            ops.swap(r, pr);
            let inv = mod_inv(p, rows[r][col]);
            for v in rows[r].iter_mut() {
                *v = *v * inv % p;
            }
            for op in ops[r].iter_mut() {
                op.1 = op.1 * inv % p;
            }
            for i in 0..rows.len() {
                if i != r && rows[i][col] != 0 {
                    let f = rows[i][col];
                    for c in 0..n {
                        rows[i][c] = (rows[i][c] + p * p - f * rows[r][c] % p) % p;
                    }
                    let extra: Vec<(usize, u64)> = ops[r]
                        .iter()
                        .map(|&(j, c)| (j, (p - f * c % p) % p))
                        .collect();
                    ops[i].extend(extra);
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        ops.truncate(r);
        FpSolver {
            p,
            rows,
            pivots,
            ops,
        }
    }

    fn solve(&self, fq: &Fq, a: K) -> Result<Vec<u64>> {
        let mut target = decode(self.p, fq.n, a.0);
        let ncoeffs = self
            .ops
            .iter()
            .flat_map(|o| o.iter().map(|&(j, _)| j + 1))
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![0u64; ncoeffs];
        for (ri, &piv) in self.pivots.iter().enumerate() {
            let c = target[piv];
            if c == 0 {
                continue;
            }
            let row = &self.rows[ri];
            for i in 0..target.len() {
                target[i] = (target[i] + self.p * self.p - c * row[i] % self.p) % self.p;
            }
            for &(j, f) in &self.ops[ri] {
                coeffs[j] = (coeffs[j] + c * f) % self.p;
            }
        }
        if target.iter().any(|&d| d != 0) {
            return Err(Error::Invalid("element outside basis span".into()));
        }
        Ok(coeffs)
    }
}
