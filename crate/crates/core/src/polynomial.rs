//! Univariate polynomials over a [`FieldCtx`], deterministic factorization
//! and irreducible enumeration.
//!
//! Coefficients are field element codes in ascending degree order with no
//! trailing zeros; the zero polynomial is the empty vector.
//!
//! Polynomials are ordered by degree and then by coefficients compared from
//! the leading term down. For monic polynomials of a fixed degree this is the
//! order of [`enumerate_monic`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{cap_exceeded, Error, Result};
use crate::finite_field::{prime_factors, same_field, FieldCtx, FieldElement};

/// Irreducible enumeration refuses degrees with `q^d` above this.
pub const IRREDUCIBLE_SIEVE_LIMIT: u64 = 10_000_000;

pub(crate) fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

// ---- coefficient-vector kernels ----

fn add_codes(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &s) in out.iter_mut().zip(short) {
        *o = ctx.add(*o, s);
    }
    trim(out)
}

fn sub_codes(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            ctx.sub(x, y)
        })
        .collect();
    trim(out)
}

fn scale_codes(ctx: &FieldCtx, a: &[u32], c: u32) -> Vec<u32> {
    trim(a.iter().map(|&x| ctx.mul(x, c)).collect())
}

fn mul_codes(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ctx.add(out[i + j], ctx.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` must be nonzero.
fn divrem_codes(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
    debug_assert!(!b.is_empty());
    if a.len() < b.len() {
        return (Vec::new(), a.to_vec());
    }
    let lead_inv = ctx.inv(*b.last().unwrap()).expect("leading coefficient is nonzero");
    let mut rem = a.to_vec();
    let mut quo = vec![0u32; a.len() - b.len() + 1];
    for shift in (0..quo.len()).rev() {
        let top = rem[shift + b.len() - 1];
        if top == 0 {
            continue;
        }
        let c = ctx.mul(top, lead_inv);
        quo[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            rem[shift + i] = ctx.sub(rem[shift + i], ctx.mul(c, bc));
        }
    }
    rem.truncate(b.len() - 1);
    (trim(quo), trim(rem))
}

fn rem_codes(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
    divrem_codes(ctx, a, b).1
}

fn monic_codes(ctx: &FieldCtx, a: &[u32]) -> Vec<u32> {
    match a.last() {
        None => Vec::new(),
        Some(&lead) => scale_codes(ctx, a, ctx.inv(lead).expect("nonzero lead")),
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
fn gcd_codes(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let r = rem_codes(ctx, &x, &y);
        x = std::mem::replace(&mut y, r);
    }
    monic_codes(ctx, &x)
}

fn mulmod_codes(ctx: &FieldCtx, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    rem_codes(ctx, &mul_codes(ctx, a, b), m)
}

fn powmod_codes(ctx: &FieldCtx, base: &[u32], mut n: u64, m: &[u32]) -> Vec<u32> {
    let mut acc = rem_codes(ctx, &[1], m);
    let mut base = rem_codes(ctx, base, m);
    while n > 0 {
        if n & 1 == 1 {
            acc = mulmod_codes(ctx, &acc, &base, m);
        }
        n >>= 1;
        if n > 0 {
            base = mulmod_codes(ctx, &base, &base, m);
        }
    }
    acc
}

fn derivative_codes(ctx: &FieldCtx, a: &[u32]) -> Vec<u32> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| ctx.mul(ctx.from_int(i as i64), c))
        .collect();
    trim(out)
}

/// `f(t) = g(t^p)` with coefficients raised to `1/p`; only valid when `f' = 0`.
fn pth_root_codes(ctx: &FieldCtx, a: &[u32]) -> Vec<u32> {
    let p = ctx.p() as usize;
    trim(a.iter().step_by(p).map(|&c| ctx.pth_root(c)).collect())
}

/// Univariate polynomial over a finite field.
#[derive(Clone)]
pub struct Poly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<u32>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_field(&self.ctx, &other.ctx)
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        if self.coeffs.len() == 1 && self.coeffs[0] >= self.ctx.p() {
            // A bare bracketed vector would read back as list form.
            return write!(f, "[{}]", self.ctx.format_code(self.coeffs[0]));
        }
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            let term = if k == 0 {
                self.ctx.format_code(c)
            } else if c == 1 {
                mono
            } else {
                format!("{}*{}", self.ctx.format_code(c), mono)
            };
            terms.push(term);
        }
        f.write_str(&terms.join("+"))
    }
}

impl Poly {
    /// Builds a polynomial from element codes (see [`FieldElement::code`]).
    pub fn from_codes(ctx: &Arc<FieldCtx>, codes: Vec<u32>) -> Self {
        debug_assert!(codes.iter().all(|&c| c < ctx.q()));
        Poly {
            ctx: Arc::clone(ctx),
            coeffs: trim(codes),
        }
    }

    /// Integer coefficients, reduced into the prime subfield.
    pub fn from_ints(ctx: &Arc<FieldCtx>, coeffs: &[i64]) -> Self {
        let codes = coeffs.iter().map(|&c| ctx.from_int(c)).collect();
        Self::from_codes(ctx, codes)
    }

    pub fn from_elements(ctx: &Arc<FieldCtx>, coeffs: &[FieldElement]) -> Result<Self> {
        let mut codes = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if !same_field(ctx, c.ctx()) {
                return Err(Error::ContextMismatch);
            }
            codes.push(c.code());
        }
        Ok(Self::from_codes(ctx, codes))
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_codes(ctx, Vec::new())
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_codes(ctx, vec![1])
    }

    /// The indeterminate `t`.
    pub fn t(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_codes(ctx, vec![0, 1])
    }

    pub fn constant(c: &FieldElement) -> Self {
        Self::from_codes(c.ctx(), vec![c.code()])
    }

    /// The monic polynomial of degree `d` at position `index` of [`enumerate_monic`].
    pub fn monic_from_index(ctx: &Arc<FieldCtx>, d: usize, mut index: u64) -> Self {
        let q = ctx.q() as u64;
        let mut codes = Vec::with_capacity(d + 1);
        for _ in 0..d {
            codes.push((index % q) as u32);
            index /= q;
        }
        codes.push(1);
        Self::from_codes(ctx, codes)
    }

    /// Inverse of [`Poly::monic_from_index`]; `None` if not monic or the index overflows.
    pub fn monic_index(&self) -> Option<u64> {
        if !self.is_monic() {
            return None;
        }
        let q = self.ctx.q() as u64;
        let d = self.coeffs.len() - 1;
        self.coeffs[..d]
            .iter()
            .rev()
            .try_fold(0u64, |acc, &c| acc.checked_mul(q)?.checked_add(c as u64))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Ascending element codes, no trailing zeros.
    pub fn codes(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        FieldElement::from_code(&self.ctx, self.coeffs.get(k).copied().unwrap_or(0))
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().map(|&c| FieldElement::from_code(&self.ctx, c))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_field(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn wrap(&self, coeffs: Vec<u32>) -> Self {
        Poly {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(add_codes(&self.ctx, &self.coeffs, &other.coeffs)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(sub_codes(&self.ctx, &self.coeffs, &other.coeffs)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(mul_codes(&self.ctx, &self.coeffs, &other.coeffs)))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.coeffs.iter().map(|&c| self.ctx.neg(c)).collect())
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Self> {
        if !same_field(&self.ctx, c.ctx()) {
            return Err(Error::ContextMismatch);
        }
        Ok(self.wrap(scale_codes(&self.ctx, &self.coeffs, c.code())))
    }

    /// `(quotient, remainder)` with `deg(remainder) < deg(divisor)`.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = divrem_codes(&self.ctx, &self.coeffs, &divisor.coeffs);
        Ok((self.wrap(q), self.wrap(r)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Monic greatest common divisor, `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(gcd_codes(&self.ctx, &self.coeffs, &other.coeffs)))
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Self) -> Result<bool> {
        if self.is_zero() {
            self.check(other)?;
            return Ok(other.is_zero());
        }
        Ok(other.rem(self)?.is_zero())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = vec![1u32];
        for _ in 0..n {
            acc = mul_codes(&self.ctx, &acc, &self.coeffs);
        }
        self.wrap(acc)
    }

    pub fn derivative(&self) -> Self {
        self.wrap(derivative_codes(&self.ctx, &self.coeffs))
    }

    pub fn make_monic(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.wrap(monic_codes(&self.ctx, &self.coeffs)))
    }

    /// Parses the polynomial grammar: a sum of terms `c`, `t`, `t^k`, `c*t^k`
    /// joined by `+`/`-`, or the list form `[c0,c1,...,cn]`. Coefficients are
    /// integers reduced mod `p` or bracketed vectors `[a0,a1]` for extension
    /// field elements.
    pub fn parse(text: &str, ctx: &Arc<FieldCtx>) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        if s.starts_with('[') && matching_bracket(&s, 0)? == s.len() - 1 {
            let entries = split_top_level(&s[1..s.len() - 1]);
            let mut codes = Vec::with_capacity(entries.len());
            for entry in entries {
                if entry.is_empty() {
                    return Err(Error::Parse(format!("empty entry in list '{s}'")));
                }
                let (neg, body) = match entry.strip_prefix('-') {
                    Some(rest) => (true, rest),
                    None => (false, entry),
                };
                let c = parse_element(body, ctx)?;
                codes.push(if neg { ctx.neg(c) } else { c });
            }
            return Ok(Self::from_codes(ctx, codes));
        }

        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut acc: Vec<u32> = Vec::new();
        while pos < bytes.len() {
            let mut negative = false;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                negative = bytes[pos] == b'-';
                pos += 1;
            } else if pos != 0 {
                return Err(Error::Parse(format!("expected '+' or '-' at offset {pos} in '{s}'")));
            }
            let start = pos;
            let mut coeff: Option<u32> = None;
            if pos < bytes.len() && bytes[pos] == b'[' {
                let end = matching_bracket(&s, pos)?;
                coeff = Some(parse_element(&s[pos..=end], ctx)?);
                pos = end + 1;
            } else {
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos > start {
                    coeff = Some(parse_element(&s[start..pos], ctx)?);
                }
            }
            let mut exponent = 0usize;
            let has_star = pos < bytes.len() && bytes[pos] == b'*';
            if has_star {
                if coeff.is_none() {
                    return Err(Error::Parse(format!("'*' without coefficient in '{s}'")));
                }
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b't' {
                pos += 1;
                exponent = 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let e_start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    exponent = s[e_start..pos]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in '{s}'")))?;
                }
            } else if has_star || coeff.is_none() {
                return Err(Error::Parse(format!("expected term at offset {start} in '{s}'")));
            }
            let mut c = coeff.unwrap_or(1);
            if negative {
                c = ctx.neg(c);
            }
            if acc.len() <= exponent {
                acc.resize(exponent + 1, 0);
            }
            acc[exponent] = ctx.add(acc[exponent], c);
        }
        Ok(Self::from_codes(ctx, acc))
    }
}

fn matching_bracket(s: &str, open: usize) -> Result<usize> {
    let mut depth = 0;
    for (i, ch) in s.char_indices().skip_while(|(i, _)| *i < open) {
        match ch {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
            _ => {}
        }
    }
    Err(Error::Parse(format!("unbalanced brackets in '{s}'")))
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Integer (reduced mod p) or `[a0,a1,...]` element literal.
fn parse_element(s: &str, ctx: &Arc<FieldCtx>) -> Result<u32> {
    let parse_int = |t: &str| {
        t.parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad coefficient '{t}'")))
    };
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let digits = inner
            .split(',')
            .map(|t| parse_int(t).map(|v| ctx.from_int(v)))
            .collect::<Result<Vec<u32>>>()?;
        ctx.code_of(&digits)
            .map_err(|e| Error::Parse(format!("coefficient '{s}': {e}")))
    } else {
        Ok(ctx.from_int(parse_int(s)?))
    }
}

/// Rabin's test: `f` of degree `d` is irreducible iff `t^{q^d} = t (mod f)`
/// and `gcd(t^{q^{d/l}} - t, f) = 1` for every prime `l | d`.
pub fn is_irreducible(f: &Poly) -> Result<bool> {
    let d = match f.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantPolynomial),
        Some(d) => d,
    };
    if d == 1 {
        return Ok(true);
    }
    let ctx = &*f.ctx;
    let m = monic_codes(ctx, &f.coeffs);
    let t = rem_codes(ctx, &[0, 1], &m);
    let q = ctx.q() as u64;
    // frob[i] = t^{q^i} mod f
    let mut frob = Vec::with_capacity(d + 1);
    frob.push(t.clone());
    for i in 1..=d {
        let next = powmod_codes(ctx, &frob[i - 1], q, &m);
        frob.push(next);
    }
    if frob[d] != t {
        return Ok(false);
    }
    for l in prime_factors(d as u64) {
        let h = sub_codes(ctx, &frob[d / l as usize], &t);
        if gcd_codes(ctx, &h, &m) != [1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First monic irreducible of degree `d` in enumeration order.
pub(crate) fn first_irreducible(ctx: &Arc<FieldCtx>, d: usize) -> Result<Poly> {
    for f in enumerate_monic(d, ctx) {
        if is_irreducible(&f)? {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// All `q^d` monic polynomials of degree `d`, lowest coefficient varying fastest.
pub fn enumerate_monic(d: usize, ctx: &Arc<FieldCtx>) -> MonicIter {
    MonicIter {
        ctx: Arc::clone(ctx),
        digits: Some(vec![0; d]),
    }
}

/// `q^d` if it fits in a `u64`.
pub fn count_monic(d: usize, ctx: &FieldCtx) -> Option<u64> {
    (ctx.q() as u64).checked_pow(u32::try_from(d).ok()?)
}

pub struct MonicIter {
    ctx: Arc<FieldCtx>,
    digits: Option<Vec<u32>>,
}

impl Iterator for MonicIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        let digits = self.digits.as_mut()?;
        let mut codes = digits.clone();
        codes.push(1);
        let out = Poly::from_codes(&self.ctx, codes);
        let q = self.ctx.q();
        let mut i = 0;
        loop {
            if i == digits.len() {
                self.digits = None;
                break;
            }
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

fn cached_irreducibles(ctx: &FieldCtx, d: usize) -> Option<Arc<Vec<Vec<u32>>>> {
    ctx.irreducible_cache.read().expect("cache lock").get(&d).cloned()
}

fn sieve_irreducibles(ctx: &Arc<FieldCtx>, d: usize) -> Result<Arc<Vec<Vec<u32>>>> {
    if let Some(hit) = cached_irreducibles(ctx, d) {
        return Ok(hit);
    }
    let total = count_monic(d, ctx)
        .filter(|&n| n <= IRREDUCIBLE_SIEVE_LIMIT)
        .ok_or_else(|| {
            cap_exceeded(
                "irreducible enumeration",
                format!("{}^{d}", ctx.q()),
                IRREDUCIBLE_SIEVE_LIMIT,
            )
        })?;
    // Lower degrees first, so the fill lock is never taken recursively.
    let smaller = (1..=d / 2)
        .map(|a| sieve_irreducibles(ctx, a))
        .collect::<Result<Vec<_>>>()?;
    let _fill = ctx.irreducible_fill.lock().expect("fill lock");
    if let Some(hit) = cached_irreducibles(ctx, d) {
        return Ok(hit);
    }
    let q = ctx.q() as u64;
    let mut reducible = vec![false; total as usize];
    // Every reducible monic of degree d has an irreducible factor of degree a <= d/2.
    for (a, small) in (1..=d / 2).zip(&smaller) {
        let cofactors = count_monic(d - a, ctx).expect("bounded by total");
        for g in small.iter() {
            let mut h = vec![0u32; d - a];
            h.push(1);
            for _ in 0..cofactors {
                let prod = mul_codes(ctx, g, &h);
                let idx = prod[..d]
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &c| acc * q + c as u64);
                reducible[idx as usize] = true;
                for digit in h.iter_mut().take(d - a) {
                    *digit += 1;
                    if *digit < ctx.q() {
                        break;
                    }
                    *digit = 0;
                }
            }
        }
    }
    let list: Vec<Vec<u32>> = if d == 0 {
        Vec::new()
    } else {
        reducible
            .iter()
            .enumerate()
            .filter(|(_, &r)| !r)
            .map(|(i, _)| Poly::monic_from_index(ctx, d, i as u64).coeffs)
            .collect()
    };
    let list = Arc::new(list);
    ctx.irreducible_cache
        .write()
        .expect("cache lock")
        .insert(d, Arc::clone(&list));
    Ok(list)
}

/// Monic irreducibles of exact degree `d`, in enumeration order. Computed by
/// sieving out products with lower-degree irreducibles and cached per field.
pub fn enumerate_irreducibles(d: usize, ctx: &Arc<FieldCtx>) -> Result<Vec<Poly>> {
    let list = sieve_irreducibles(ctx, d)?;
    Ok(list
        .iter()
        .map(|c| Poly::from_codes(ctx, c.clone()))
        .collect())
}

/// `N_d`, the number of monic irreducibles of degree `d`.
pub fn count_irreducibles(d: usize, ctx: &Arc<FieldCtx>) -> Result<u64> {
    Ok(sieve_irreducibles(ctx, d)?.len() as u64)
}

/// One row of the necklace relation `sum_{d|k} d N_d = q^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NecklaceRow {
    pub k: usize,
    pub lhs: u64,
    pub rhs: u64,
    pub equal: bool,
}

pub fn necklace_check(k: usize, ctx: &Arc<FieldCtx>) -> Result<NecklaceRow> {
    if k == 0 {
        return Err(Error::Invalid("necklace relation needs k >= 1".into()));
    }
    let rhs = count_monic(k, ctx)
        .filter(|&n| n <= IRREDUCIBLE_SIEVE_LIMIT)
        .ok_or_else(|| {
            cap_exceeded("necklace check", format!("{}^{k}", ctx.q()), IRREDUCIBLE_SIEVE_LIMIT)
        })?;
    let mut lhs = 0u64;
    for d in (1..=k).filter(|d| k % d == 0) {
        lhs += d as u64 * count_irreducibles(d, ctx)?;
    }
    Ok(NecklaceRow {
        k,
        lhs,
        rhs,
        equal: lhs == rhs,
    })
}

/// `unit * prod p_i^{r_i}` with distinct monic irreducible `p_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FieldElement,
    /// Sorted by the canonical polynomial order.
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn expand(&self) -> Poly {
        let mut acc = Poly::constant(&self.unit);
        for (p, r) in &self.factors {
            acc = acc.mul(&p.pow(*r)).expect("factors share the field");
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, r)| r == 1)
    }

    /// Largest multiplicity, 0 for constants.
    pub fn max_multiplicity(&self) -> u32 {
        self.factors.iter().map(|&(_, r)| r).max().unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|(p, r)| p.degree().unwrap_or(0) * *r as usize)
            .sum()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.unit.code() != 1 || self.factors.is_empty() {
            parts.push(self.unit.to_string());
        }
        for (p, r) in &self.factors {
            let base = if p.coeffs.iter().filter(|&&c| c != 0).count() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            };
            if *r == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{r}"));
            }
        }
        f.write_str(&parts.join(" * "))
    }
}

/// Square-free decomposition of a monic polynomial, handling characteristic
/// `p` by extracting `p`-th roots when the derivative vanishes.
fn squarefree_parts(ctx: &FieldCtx, f: &[u32], scale: u32, out: &mut Vec<(Vec<u32>, u32)>) {
    if f.len() <= 1 {
        return;
    }
    let df = derivative_codes(ctx, f);
    let mut c = gcd_codes(ctx, f, &df);
    let mut w = divrem_codes(ctx, f, &c).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd_codes(ctx, &w, &c);
        let z = divrem_codes(ctx, &w, &y).0;
        if z.len() > 1 {
            out.push((z, i * scale));
        }
        i += 1;
        c = divrem_codes(ctx, &c, &y).0;
        w = y;
    }
    if c.len() > 1 {
        let root = pth_root_codes(ctx, &c);
        squarefree_parts(ctx, &root, scale * ctx.p(), out);
    }
}

/// Splits a monic square-free polynomial into `(product of degree-k irreducibles, k)`.
fn distinct_degree(ctx: &FieldCtx, f: &[u32]) -> Vec<(Vec<u32>, usize)> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let mut h = rem_codes(ctx, &[0, 1], &rest);
    let q = ctx.q() as u64;
    let mut k = 1;
    while rest.len() > 2 * k {
        h = powmod_codes(ctx, &h, q, &rest);
        let g = gcd_codes(ctx, &rest, &sub_codes(ctx, &h, &[0, 1]));
        if g.len() > 1 {
            rest = divrem_codes(ctx, &rest, &g).0;
            h = rem_codes(ctx, &h, &rest);
            out.push((g, k));
        }
        k += 1;
    }
    if rest.len() > 1 {
        let deg = rest.len() - 1;
        out.push((rest, deg));
    }
    out
}

/// Splits a product of distinct degree-`k` irreducibles by trial division.
fn equal_degree(ctx: &Arc<FieldCtx>, g: Vec<u32>, k: usize) -> Result<Vec<Vec<u32>>> {
    if g.len() - 1 == k {
        return Ok(vec![g]);
    }
    let mut rest = g;
    let mut out = Vec::new();
    for p in sieve_irreducibles(ctx, k)?.iter() {
        let (quo, rem) = divrem_codes(ctx, &rest, p);
        if rem.is_empty() {
            out.push(p.clone());
            rest = quo;
            if rest.len() - 1 == k {
                out.push(rest);
                return Ok(out);
            }
            if rest.len() == 1 {
                return Ok(out);
            }
        }
    }
    unreachable!("distinct-degree component must split over degree-{k} irreducibles")
}

/// Deterministic factorization into monic irreducibles: square-free
/// decomposition, distinct-degree splitting, then trial division by the
/// irreducibles of each degree.
pub fn factor(f: &Poly) -> Result<Factorization> {
    let unit = f.leading().ok_or(Error::ZeroPolynomial)?;
    let ctx = &f.ctx;
    let monic = monic_codes(ctx, &f.coeffs);
    let mut parts = Vec::new();
    squarefree_parts(ctx, &monic, 1, &mut parts);
    let mut merged: BTreeMap<Poly, u32> = BTreeMap::new();
    for (part, mult) in parts {
        for (component, k) in distinct_degree(ctx, &part) {
            for p in equal_degree(ctx, component, k)? {
                *merged.entry(Poly::from_codes(ctx, p)).or_insert(0) += mult;
            }
        }
    }
    Ok(Factorization {
        unit,
        factors: merged.into_iter().collect(),
    })
}
