//! Finite fields `F_q`, `q = p^e`, represented as `F_p[t]/(modulus)`.
//!
//! Elements are stored as integer codes `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! where `c_i` are the residues of the coefficient vector (constant term
//! first). The code order is the canonical element order: constant term
//! varies fastest.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polynomial::{self, Poly};

/// Largest supported field cardinality.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
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

/// A finite field context. Immutable after construction except for the
/// internal irreducible-polynomial cache.
pub struct FieldCtx {
    p: u32,
    e: u32,
    q: u32,
    /// Ascending coefficients of the monic modulus (length `e + 1`), only for `e > 1`.
    modulus: Option<Vec<u32>>,
    /// `exp[i] = g^i` for a fixed generator `g`, doubled to avoid a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    pub(crate) irreducible_cache: RwLock<BTreeMap<usize, Arc<Vec<Vec<u32>>>>>,
    /// Held while a new degree is sieved, so each degree is computed once.
    pub(crate) irreducible_fill: Mutex<()>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.modulus {
            None => write!(f, "q={}", self.p),
            Some(m) => {
                let coeffs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                write!(f, "q={}^{};mod=[{}]", self.p, self.e, coeffs.join(","))
            }
        }
    }
}

pub(crate) fn same_field(a: &Arc<FieldCtx>, b: &Arc<FieldCtx>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldCtx {
    /// Builds `F_{p^e}`. When `e > 1` and no modulus is given, the first monic
    /// irreducible of degree `e` over `F_p` in enumeration order is used.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Arc<Self>> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e < 1 {
            return Err(Error::BadExtensionDegree(e));
        }
        let size = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge {
                size,
                max: MAX_FIELD_SIZE,
            });
        }
        if e == 1 {
            if let Some(m) = modulus {
                // A degree-1 modulus carries no information but must still be well formed.
                if m.len() != 2 || m[1] != 1 || m[0] >= p {
                    return Err(Error::InvalidModulus(format!(
                        "expected a monic degree-1 vector over F_{p}, got {m:?}"
                    )));
                }
            }
            return Ok(Arc::new(Self::build(p, 1, None)));
        }

        let base = Arc::new(Self::build(p, 1, None));
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        e + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "coefficients must lie in [0, {p})"
                    )));
                }
                if m[e as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                let poly = Poly::from_codes(&base, m.to_vec());
                if !polynomial::is_irreducible(&poly)? {
                    return Err(Error::InvalidModulus(format!("{poly} is reducible over F_{p}")));
                }
                m.to_vec()
            }
            None => polynomial::first_irreducible(&base, e as usize)?.codes().to_vec(),
        };
        Ok(Arc::new(Self::build(p, e, Some(modulus))))
    }

    pub fn prime(p: u32) -> Result<Arc<Self>> {
        Self::new(p, 1, None)
    }

    /// Builds a field of cardinality `q`, factoring `q = p^e`.
    pub fn of_order(q: u64) -> Result<Arc<Self>> {
        let factors = prime_factors(q);
        if factors.len() != 1 {
            return Err(Error::Invalid(format!("{q} is not a prime power")));
        }
        let p = factors[0];
        let mut e = 0;
        let mut rest = q;
        while rest > 1 {
            rest /= p;
            e += 1;
        }
        if p > u32::MAX as u64 {
            return Err(Error::FieldTooLarge {
                size: q,
                max: MAX_FIELD_SIZE,
            });
        }
        Self::new(p as u32, e, None)
    }

    /// Parses `"q=p^e"`, `"q=p^e;mod=[c0,...,1]"`, `"q=p"`. The `q=` prefix is
    /// optional and a bare prime power such as `"4"` is accepted too.
    pub fn parse(text: &str) -> Result<Arc<Self>> {
        let mut size_part = None;
        let mut mod_part = None;
        for piece in text.split(';') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            if let Some(rest) = piece.strip_prefix("mod=") {
                mod_part = Some(rest.trim());
            } else if let Some(rest) = piece.strip_prefix("q=") {
                size_part = Some(rest.trim());
            } else if size_part.is_none() {
                size_part = Some(piece);
            } else {
                return Err(Error::Parse(format!("unexpected field spec component '{piece}'")));
            }
        }
        let size = size_part.ok_or_else(|| Error::Parse("missing field size".into()))?;
        let parse_u32 = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad integer '{s}' in field spec")))
        };
        let modulus = match mod_part {
            Some(m) => {
                let inner = m
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("modulus '{m}' must be a bracketed list")))?;
                Some(
                    inner
                        .split(',')
                        .map(parse_u32)
                        .collect::<Result<Vec<u32>>>()?,
                )
            }
            None => None,
        };
        if let Some((p, e)) = size.split_once('^') {
            Self::new(parse_u32(p)?, parse_u32(e)?, modulus.as_deref())
        } else {
            let q = parse_u32(size)?;
            match modulus {
                None => Self::of_order(q as u64),
                Some(m) => {
                    let factors = prime_factors(q as u64);
                    if factors.len() != 1 {
                        return Err(Error::Invalid(format!("{q} is not a prime power")));
                    }
                    let e = m.len().saturating_sub(1) as u32;
                    if (factors[0] as u32).checked_pow(e) != Some(q) {
                        return Err(Error::InvalidModulus(format!(
                            "modulus degree {e} does not match q={q}"
                        )));
                    }
                    Self::new(factors[0] as u32, e, Some(&m))
                }
            }
        }
    }

    fn build(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Self {
        let q = p.pow(e);
        let mut ctx = FieldCtx {
            p,
            e,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            irreducible_cache: RwLock::new(BTreeMap::new()),
            irreducible_fill: Mutex::new(()),
        };
        ctx.build_tables();
        ctx
    }

    fn build_tables(&mut self) {
        let order = (self.q - 1) as u64;
        let primes = prime_factors(order);
        let generator = (1..self.q)
            .find(|&g| {
                primes
                    .iter()
                    .all(|&l| self.pow_slow(g, order / l) != 1)
            })
            .expect("multiplicative group of a finite field is cyclic");
        let n = self.q as usize - 1;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, generator);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        self.exp = exp;
        self.log = log;
    }

    fn digits(&self, mut code: u32) -> Vec<u32> {
        let mut out = vec![0; self.e as usize];
        for d in out.iter_mut() {
            *d = code % self.p;
            code /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.e == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let m = self.modulus.as_ref().expect("extension field has a modulus");
        for top in (e..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (i, &mc) in m.iter().enumerate().take(e) {
                let idx = top - e + i;
                prod[idx] = (prod[idx] + p - (c * mc as u64) % p) % p;
            }
            prod[top] = 0;
        }
        let digits: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
        self.undigits(&digits)
    }

    fn pow_slow(&self, mut base: u32, mut n: u64) -> u32 {
        let mut acc = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Ascending coefficients of the modulus; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    // ---- code-level arithmetic ----

    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    pub(crate) fn neg(&self, a: u32) -> u32 {
        if self.e == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.e {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }

    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Inverse by the extended Euclidean algorithm on the coefficient
    /// polynomial (or on integers for prime fields).
    pub(crate) fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.e == 1 {
            return Some(inv_mod_p(a as u64, self.p as u64) as u32);
        }
        let m = self.modulus.as_ref().expect("extension field has a modulus");
        let s = inverse_mod_prime_poly(&self.digits(a), m, self.p)?;
        let mut digits = s;
        digits.resize(self.e as usize, 0);
        Some(self.undigits(&digits))
    }

    pub(crate) fn pow(&self, a: u32, n: &BigUint) -> u32 {
        if n.is_zero() {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = BigUint::from(self.q - 1);
        let reduced = (n % &order).to_u64().expect("reduced exponent fits");
        let l = (self.log[a as usize] as u64 * reduced) % (self.q as u64 - 1);
        self.exp[l as usize]
    }

    pub(crate) fn pow_u64(&self, a: u32, n: u64) -> u32 {
        self.pow(a, &BigUint::from(n))
    }

    pub(crate) fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Code of an element given by its coefficient vector (constant first).
    pub(crate) fn code_of(&self, coeffs: &[u32]) -> Result<u32> {
        if coeffs.len() > self.e as usize {
            return Err(Error::Invalid(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.e
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::Invalid(format!("coefficient {c} not in [0, {})", self.p)));
        }
        Ok(self.undigits(coeffs))
    }

    pub(crate) fn coeffs_of(&self, code: u32) -> Vec<u32> {
        self.digits(code)
    }

    pub(crate) fn format_code(&self, code: u32) -> String {
        if code < self.p {
            return code.to_string();
        }
        let mut digits = self.digits(code);
        while digits.last() == Some(&0) {
            digits.pop();
        }
        let parts: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    /// `a^{1/p}`, the inverse of the Frobenius `x -> x^p`.
    pub(crate) fn pth_root(&self, a: u32) -> u32 {
        self.pow_u64(a, (self.q / self.p) as u64)
    }
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let quo = r0 / r1;
        (r0, r1) = (r1, r0 - quo * r1);
        (s0, s1) = (s1, s0 - quo * s1);
    }
    s0.rem_euclid(p as i64) as u64
}

fn trim_u64(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// `(a mod p, b mod p) -> a mod b` over `F_p[t]`, ascending coefficients.
fn rem_mod_p(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = trim_u64(a.to_vec());
    let b = trim_u64(b.to_vec());
    let lead_inv = inv_mod_p(*b.last().expect("nonzero divisor"), p);
    let mut quo = vec![0u64; rem.len().saturating_sub(b.len()) + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() * lead_inv % p;
        quo[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] + p - c * bc % p) % p;
        }
        rem = trim_u64(rem);
    }
    (trim_u64(quo), rem)
}

fn mul_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim_u64(out)
}

fn sub_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim_u64(out)
}

/// Inverse of `a` modulo the irreducible `m` in `F_p[t]` by extended Euclid.
fn inverse_mod_prime_poly(a: &[u32], m: &[u32], p: u32) -> Option<Vec<u32>> {
    let p = p as u64;
    let mut r0: Vec<u64> = m.iter().map(|&c| c as u64).collect();
    let mut r1 = trim_u64(a.iter().map(|&c| c as u64).collect());
    if r1.is_empty() {
        return None;
    }
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (quo, rem) = rem_mod_p(&r0, &r1, p);
        let next_s = sub_mod_p(&s0, &mul_mod_p(&quo, &s1, p), p);
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, next_s);
    }
    // r0 is the gcd; a unit when m is irreducible.
    if r0.len() != 1 {
        return None;
    }
    let g_inv = inv_mod_p(r0[0], p);
    Some(s0.iter().map(|&c| (c * g_inv % p) as u32).collect())
}

/// An element of a [`FieldCtx`].
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    code: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctx.format_code(self.code))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code && same_field(&self.ctx, &other.ctx)
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    /// Element from its coefficient vector (constant term first, at most `e` entries).
    pub fn new(ctx: &Arc<FieldCtx>, coeffs: &[u32]) -> Result<Self> {
        let code = ctx.code_of(coeffs)?;
        Ok(Self::from_code(ctx, code))
    }

    pub(crate) fn from_code(ctx: &Arc<FieldCtx>, code: u32) -> Self {
        debug_assert!(code < ctx.q);
        FieldElement {
            ctx: Arc::clone(ctx),
            code,
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(ctx: &Arc<FieldCtx>, n: i64) -> Self {
        Self::from_code(ctx, ctx.from_int(n))
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_code(ctx, 0)
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_code(ctx, 1)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Position in the canonical element order.
    pub fn code(&self) -> u32 {
        self.code
    }

    /// Exactly `e` residues, constant term first.
    pub fn coeffs(&self) -> Vec<u32> {
        self.ctx.coeffs_of(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_field(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_code(&self.ctx, self.ctx.add(self.code, other.code)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_code(&self.ctx, self.ctx.sub(self.code, other.code)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_code(&self.ctx, self.ctx.mul(self.code, other.code)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let inv = self.ctx.inv(other.code).ok_or(Error::DivisionByZero)?;
        Ok(Self::from_code(&self.ctx, self.ctx.mul(self.code, inv)))
    }

    pub fn neg(&self) -> Self {
        Self::from_code(&self.ctx, self.ctx.neg(self.code))
    }

    pub fn inv(&self) -> Result<Self> {
        let inv = self.ctx.inv(self.code).ok_or(Error::DivisionByZero)?;
        Ok(Self::from_code(&self.ctx, inv))
    }

    /// `self^n`; `0^0 = 1`.
    pub fn pow(&self, n: &BigUint) -> Self {
        Self::from_code(&self.ctx, self.ctx.pow(self.code, n))
    }

    pub fn pow_u64(&self, n: u64) -> Self {
        Self::from_code(&self.ctx, self.ctx.pow_u64(self.code, n))
    }
}

/// All `q` elements in canonical order (coefficient vectors with the constant
/// term varying fastest).
pub fn enumerate_elements(ctx: &Arc<FieldCtx>) -> impl Iterator<Item = FieldElement> + '_ {
    (0..ctx.q).map(move |c| FieldElement::from_code(ctx, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(ctx: &Arc<FieldCtx>, c: &[u32]) -> FieldElement {
        FieldElement::new(ctx, c).unwrap()
    }

    #[test]
    fn make_field_examples() {
        let f2 = FieldCtx::new(2, 1, None).unwrap();
        assert_eq!(f2.q(), 2);
        assert!(f2.modulus().is_none());

        let f4 = FieldCtx::new(2, 2, Some(&[1, 1, 1])).unwrap();
        assert_eq!(f4.q(), 4);
        assert_eq!(f4.modulus(), Some(&[1, 1, 1][..]));

        assert_eq!(FieldCtx::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldCtx::new(2, 0, None).unwrap_err(), Error::BadExtensionDegree(0));
    }

    #[test]
    fn rejects_bad_moduli() {
        // t^2 + 1 = (t + 1)^2 over F_2
        assert!(matches!(
            FieldCtx::new(2, 2, Some(&[1, 0, 1])),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            FieldCtx::new(2, 2, Some(&[1, 1])),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            FieldCtx::new(3, 2, Some(&[1, 0, 2])),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            FieldCtx::new(2, 17, None),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn default_moduli_are_first_irreducible() {
        assert_eq!(FieldCtx::new(2, 2, None).unwrap().modulus(), Some(&[1, 1, 1][..]));
        assert_eq!(FieldCtx::new(2, 3, None).unwrap().modulus(), Some(&[1, 1, 0, 1][..]));
        assert_eq!(FieldCtx::new(3, 2, None).unwrap().modulus(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn parse_field_specs() {
        assert_eq!(FieldCtx::parse("q=2").unwrap().q(), 2);
        assert_eq!(FieldCtx::parse("q=2^2").unwrap().q(), 4);
        assert_eq!(FieldCtx::parse("4").unwrap().modulus(), Some(&[1, 1, 1][..]));
        let f9 = FieldCtx::parse("q=3^2;mod=[2,2,1]").unwrap();
        assert_eq!(f9.modulus(), Some(&[2, 2, 1][..]));
        assert_eq!(f9.to_string(), "q=3^2;mod=[2,2,1]");
        assert!(FieldCtx::parse("q=6").is_err());
        assert!(FieldCtx::parse("q=2^x").is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let f4 = FieldCtx::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let t = el(&f4, &[0, 1]);
        assert_eq!(t.mul(&t).unwrap(), el(&f4, &[1, 1]));

        let f5 = FieldCtx::prime(5).unwrap();
        let sum = el(&f5, &[3]).add(&el(&f5, &[4])).unwrap();
        assert_eq!(sum, el(&f5, &[2]));

        let f2 = FieldCtx::prime(2).unwrap();
        assert_eq!(FieldElement::zero(&f2).inv().unwrap_err(), Error::DivisionByZero);
        assert_eq!(
            FieldElement::one(&f2).div(&FieldElement::zero(&f2)).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn context_mismatch_is_rejected() {
        let f3 = FieldCtx::prime(3).unwrap();
        let f5 = FieldCtx::prime(5).unwrap();
        let a = FieldElement::one(&f3);
        let b = FieldElement::one(&f5);
        assert_eq!(a.add(&b).unwrap_err(), Error::ContextMismatch);
        assert_eq!(a.mul(&b).unwrap_err(), Error::ContextMismatch);
        // structurally equal contexts are the same field
        let f3b = FieldCtx::prime(3).unwrap();
        assert!(a.add(&FieldElement::one(&f3b)).is_ok());
    }

    #[test]
    fn enumeration_order() {
        let f2 = FieldCtx::prime(2).unwrap();
        let codes: Vec<Vec<u32>> = enumerate_elements(&f2).map(|x| x.coeffs()).collect();
        assert_eq!(codes, vec![vec![0], vec![1]]);
        let f3 = FieldCtx::prime(3).unwrap();
        assert_eq!(enumerate_elements(&f3).count(), 3);
        let f4 = FieldCtx::new(2, 2, None).unwrap();
        let elems: Vec<FieldElement> = enumerate_elements(&f4).collect();
        assert_eq!(elems.len(), 4);
        assert!(elems[0].is_zero());
        assert_eq!(elems[1], FieldElement::one(&f4));
        assert_eq!(elems[2].coeffs(), vec![0, 1]);
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        let f7 = FieldCtx::prime(7).unwrap();
        let z = FieldElement::zero(&f7);
        assert_eq!(z.pow_u64(0), FieldElement::one(&f7));
        assert_eq!(z.pow_u64(5), z);
    }

    fn small_fields() -> Vec<Arc<FieldCtx>> {
        [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (17, 1), (19, 1), (23, 1), (5, 2)]
            .iter()
            .map(|&(p, e)| FieldCtx::new(p, e, None).unwrap())
            .collect()
    }

    #[test]
    fn inverse_and_frobenius_exhaustive() {
        for ctx in small_fields() {
            let q = ctx.q() as u64;
            for a in enumerate_elements(&ctx) {
                assert_eq!(a.pow_u64(q), a, "a^q = a in F_{q}");
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), FieldElement::one(&ctx));
                }
            }
        }
    }

    #[test]
    fn inverse_matches_slow_multiplication() {
        for ctx in small_fields() {
            for a in 1..ctx.q() {
                let inv = ctx.inv(a).unwrap();
                assert_eq!(ctx.mul_slow(a, inv), 1);
            }
        }
    }

    #[test]
    fn commutative_associative_distributive_small() {
        for ctx in small_fields().into_iter().filter(|c| c.q() <= 9) {
            let q = ctx.q();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(ctx.add(a, b), ctx.add(b, a));
                    assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
                    assert_eq!(ctx.mul(a, b), ctx.mul_slow(a, b));
                    assert_eq!(ctx.sub(ctx.add(a, b), b), a);
                    for c in 0..q {
                        assert_eq!(ctx.add(ctx.add(a, b), c), ctx.add(a, ctx.add(b, c)));
                        assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
                        assert_eq!(
                            ctx.mul(a, ctx.add(b, c)),
                            ctx.add(ctx.mul(a, b), ctx.mul(a, c))
                        );
                    }
                }
            }
        }
    }
}
