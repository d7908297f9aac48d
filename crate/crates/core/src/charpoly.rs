//! Character polynomials in the binomial basis `binom(X, mu)`, their values on
//! cycle types, `S_r` expectations, and truncated series in nilpotent
//! variables.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::symmetric::{enumerate_sn, factorial, MultiIndex};
use crate::Rational;

pub(crate) fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn rational_from(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub(crate) fn big_int(n: BigUint) -> BigInt {
    BigInt::from(n)
}

/// `prod_k C(ct_k, mu_k)`: the number of ways to pick `mu_k` of the `k`-cycles
/// for every `k`.
pub fn binom_eval(mu: &MultiIndex, ct: &MultiIndex) -> Rational {
    let count = mu
        .entries()
        .iter()
        .fold(BigUint::one(), |acc, &(k, m)| acc * binomial(ct.get(k), m));
    rational_from(big_int(count))
}

/// `E_{S_r}[binom(X, mu)] = prod 1 / (l^{mu_l} mu_l!)` when `||mu|| <= r`, else 0.
pub fn sn_expectation_closed(mu: &MultiIndex, r: usize) -> Rational {
    if mu.norm() > r {
        return Rational::zero();
    }
    let denom = mu.entries().iter().fold(BigUint::one(), |acc, &(l, m)| {
        acc * BigUint::from(l).pow(m as u32) * factorial(m)
    });
    Rational::new(BigInt::one(), big_int(denom))
}

/// Average of `binom(X, mu)` over every element of `S_r`.
pub fn sn_expectation_oracle(mu: &MultiIndex, r: usize, cap: u64) -> Result<Rational> {
    let perms = enumerate_sn(r, cap)?;
    let total: Rational = perms.iter().map(|p| binom_eval(mu, &p.cycle_type())).sum();
    Ok(total / rational_from(perms.len()))
}

/// Cycle types of all of `S_r`, with multiplicities.
pub fn sn_cycle_type_histogram(r: usize, cap: u64) -> Result<BTreeMap<MultiIndex, u64>> {
    let mut hist = BTreeMap::new();
    for p in enumerate_sn(r, cap)? {
        *hist.entry(p.cycle_type()).or_default() += 1;
    }
    Ok(hist)
}

/// Linear combination of `binom(X, mu)` with rational coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct CharPoly {
    terms: BTreeMap<MultiIndex, Rational>,
}

impl fmt::Debug for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CharPoly({self})")
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (mu, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c < &Rational::zero() { (true, -c) } else { (false, c.clone()) };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mu.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&format!("binom({mu})"));
            } else {
                out.push_str(&format!("{mag}*binom({mu})"));
            }
        }
        f.write_str(&out)
    }
}

impl CharPoly {
    pub fn zero() -> Self {
        CharPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(MultiIndex::empty(), c)
    }

    pub fn term(mu: MultiIndex, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mu, c);
        }
        CharPoly { terms }
    }

    /// `binom(X, mu)`.
    pub fn binom(mu: MultiIndex) -> Self {
        Self::term(mu, Rational::one())
    }

    /// `X_k`, the number of `k`-cycles.
    pub fn x(k: usize) -> Self {
        Self::binom(MultiIndex::single(k))
    }

    /// Coefficients in the binomial basis, ascending by multi-index.
    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `||mu||` among the basis elements present.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(MultiIndex::norm).max().unwrap_or(0)
    }

    fn accumulate(&mut self, mu: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mu).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (mu, c) in &other.terms {
            out.accumulate(mu.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CharPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let coeff = ca * cb;
                for (mu, n) in binom_product(a, b) {
                    out.accumulate(mu, &coeff * rational_from(big_int(n)));
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    /// Value on a permutation of the given cycle type.
    pub fn eval(&self, ct: &MultiIndex) -> Rational {
        self.terms.iter().map(|(mu, c)| c * binom_eval(mu, ct)).sum()
    }
}

pub fn charpoly_eval(p: &CharPoly, ct: &MultiIndex) -> Rational {
    p.eval(ct)
}

/// `C(x, a) C(x, b) = sum_j (a+b-j)! / (j! (a-j)! (b-j)!) C(x, a+b-j)`,
/// applied independently in every cycle length.
fn binom_product(a: &MultiIndex, b: &MultiIndex) -> Vec<(MultiIndex, BigUint)> {
    let mut keys: Vec<usize> = a.entries().iter().chain(b.entries()).map(|&(k, _)| k).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut acc: Vec<(Vec<(usize, usize)>, BigUint)> = vec![(Vec::new(), BigUint::one())];
    for k in keys {
        let (x, y) = (a.get(k), b.get(k));
        let mut next = Vec::new();
        for j in 0..=x.min(y) {
            let c = factorial(x + y - j) / (factorial(j) * factorial(x - j) * factorial(y - j));
            for (entries, coeff) in &acc {
                let mut e = entries.clone();
                e.push((k, x + y - j));
                next.push((e, coeff * &c));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(e, c)| (MultiIndex::new(e).expect("valid entries"), c))
        .collect()
}

impl FromStr for CharPoly {
    type Err = Error;

    /// Sums of products of rationals, `X<k>[^e]` and `binom(k:m,...)`, e.g.
    /// `"X1^2*X2 - 1/2*binom(1:2)"`.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty character polynomial".into()));
        }
        let mut terms: Vec<(bool, &str)> = Vec::new();
        let mut depth = 0;
        let mut start = 0;
        let mut sign = false;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 => {
                    if i > start {
                        terms.push((sign, &s[start..i]));
                    } else if i != 0 {
                        return Err(Error::Parse(format!("empty term in '{s}'")));
                    }
                    sign = ch == '-';
                    start = i + 1;
                }
                _ => {}
            }
        }
        if start >= s.len() {
            return Err(Error::Parse(format!("trailing operator in '{s}'")));
        }
        terms.push((sign, &s[start..]));

        let mut out = CharPoly::zero();
        for (negative, term) in terms {
            let mut value = CharPoly::constant(Rational::one());
            for factor in term.split('*') {
                value = value.mul(&parse_factor(factor)?);
            }
            if negative {
                value = value.scale(&-Rational::one());
            }
            out = out.add(&value);
        }
        Ok(out)
    }
}

fn parse_factor(f: &str) -> Result<CharPoly> {
    let bad = || Error::Parse(format!("bad factor '{f}'"));
    if let Some(inner) = f.strip_prefix("binom(").and_then(|r| r.strip_suffix(')')) {
        return Ok(CharPoly::binom(inner.parse()?));
    }
    if let Some(rest) = f.strip_prefix('X') {
        let (k, e) = match rest.split_once('^') {
            Some((k, e)) => (k, e.parse::<u32>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let k: usize = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        return Ok(CharPoly::x(k).pow(e));
    }
    let value = match f.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(f.parse::<BigInt>().map_err(|_| bad())?),
    };
    Ok(CharPoly::constant(value))
}

/// Monomial key of a [`NilSeries`]: exponents of the nilpotent variables and a
/// monomial in the auxiliary variables `t_k`, stored as `{k: exponent}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NilKey {
    pub eps: Vec<usize>,
    pub t: MultiIndex,
}

/// Series in `Q[eps_1, ..., eps_n][t_1, t_2, ...]` modulo `eps_i^{orders[i]}`,
/// optionally truncated above a weighted degree in `t` (`t_k` has weight `k`).
#[derive(Clone, PartialEq, Eq)]
pub struct NilSeries {
    orders: Vec<usize>,
    t_cap: Option<usize>,
    terms: BTreeMap<NilKey, Rational>,
}

impl fmt::Debug for NilSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NilSeries({self})")
    }
}

impl fmt::Display for NilSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(key, c)| {
                let mut factors = vec![c.to_string()];
                for (i, &e) in key.eps.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(format!("e{}", i + 1)),
                        _ => factors.push(format!("e{}^{e}", i + 1)),
                    }
                }
                for &(k, e) in key.t.entries() {
                    if e == 1 {
                        factors.push(format!("t{k}"));
                    } else {
                        factors.push(format!("t{k}^{e}"));
                    }
                }
                factors.join("*")
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl NilSeries {
    /// The zero series; `orders[i]` is the first vanishing power of `eps_i`.
    pub fn zero(orders: Vec<usize>, t_cap: Option<usize>) -> Self {
        NilSeries {
            orders,
            t_cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(orders: Vec<usize>, t_cap: Option<usize>, c: Rational) -> Self {
        let n = orders.len();
        let mut s = Self::zero(orders, t_cap);
        s.insert(vec![0; n], MultiIndex::empty(), c);
        s
    }

    pub fn one(orders: Vec<usize>, t_cap: Option<usize>) -> Self {
        Self::constant(orders, t_cap, Rational::one())
    }

    /// `c * eps^exps * t^t_mono`, or zero if truncated.
    pub fn monomial(
        orders: Vec<usize>,
        t_cap: Option<usize>,
        exps: Vec<usize>,
        t_mono: MultiIndex,
        c: Rational,
    ) -> Result<Self> {
        if exps.len() != orders.len() {
            return Err(Error::Invalid(format!(
                "{} exponents for {} nilpotent variables",
                exps.len(),
                orders.len()
            )));
        }
        let mut s = Self::zero(orders, t_cap);
        s.insert(exps, t_mono, c);
        Ok(s)
    }

    /// `eps_i^power`.
    pub fn eps(orders: Vec<usize>, t_cap: Option<usize>, i: usize, power: usize) -> Result<Self> {
        let len = orders.len();
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
        let mut exps = vec![0; len];
        exps[i] = power;
        Self::monomial(orders, t_cap, exps, MultiIndex::empty(), Rational::one())
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn t_cap(&self) -> Option<usize> {
        self.t_cap
    }

    pub fn terms(&self) -> &BTreeMap<NilKey, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn survives(&self, eps: &[usize], t: &MultiIndex) -> bool {
        eps.iter().zip(&self.orders).all(|(e, o)| e < o)
            && self.t_cap.is_none_or(|cap| t.norm() <= cap)
    }

    fn insert(&mut self, eps: Vec<usize>, t: MultiIndex, c: Rational) {
        if c.is_zero() || !self.survives(&eps, &t) {
            return;
        }
        let key = NilKey { eps, t };
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.orders == other.orders && self.t_cap == other.t_cap {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.eps.clone(), k.t.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.orders.clone(), self.t_cap);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.orders.clone(), self.t_cap);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let eps: Vec<usize> = a.eps.iter().zip(&b.eps).map(|(x, y)| x + y).collect();
                let t = a.t.plus(&b.t);
                out.insert(eps, t, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.orders.clone(), self.t_cap);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// `exp(x) = sum x^n / n!`, defined when every term of `x` is nilpotent.
    pub fn exp(&self) -> Result<Self> {
        let nilpotent = self.terms.keys().all(|k| {
            k.eps.iter().any(|&e| e > 0) || (!k.t.is_empty() && self.t_cap.is_some())
        });
        if !nilpotent {
            return Err(Error::NotNilpotent);
        }
        let mut out = Self::one(self.orders.clone(), self.t_cap);
        let mut power = Self::one(self.orders.clone(), self.t_cap);
        let mut n = 0u64;
        loop {
            n += 1;
            power = power.mul(self)?.scale(&Rational::new(BigInt::one(), BigInt::from(n)));
            if power.is_zero() {
                return Ok(out);
            }
            out = out.add(&power)?;
        }
    }

    /// Flattening `eps_1^{j_1} ... eps_n^{j_n} -> 1`, leaving the `t`
    /// variables: the coefficient of every `t`-monomial.
    pub fn phi(&self) -> BTreeMap<MultiIndex, Rational> {
        let mut out: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (k, c) in &self.terms {
            *out.entry(k.t.clone()).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Flattening of a series without `t` variables (all of them are set to 1
    /// otherwise).
    pub fn phi_value(&self) -> Rational {
        self.terms.values().sum()
    }
}

/// Checks `E_{S_r}[prod_l (1 + eps^l t_{dl})^{X_l}] = exp(sum_l eps^l t_{dl} / l)`
/// in `Q[eps]/(eps^{r+1})` with `t` truncated at weighted degree `t_cap`,
/// and that flattening `eps` reproduces [`sn_expectation_closed`].
pub fn g_series_identity_check(d: usize, r: usize, t_cap: usize, cap: u64) -> Result<bool> {
    if d == 0 {
        return Err(Error::Invalid("block-cycle length d must be at least 1".into()));
    }
    let orders = vec![r + 1];
    let tc = Some(t_cap);
    let histogram = sn_cycle_type_histogram(r, cap)?;
    let factor = |l: usize| -> Result<NilSeries> {
        NilSeries::monomial(
            orders.clone(),
            tc,
            vec![l],
            MultiIndex::single(d * l),
            Rational::one(),
        )
    };

    let mut lhs = NilSeries::zero(orders.clone(), tc);
    for (ct, count) in &histogram {
        let mut prod = NilSeries::one(orders.clone(), tc);
        for &(l, x) in ct.entries() {
            let base = NilSeries::one(orders.clone(), tc).add(&factor(l)?)?;
            prod = prod.mul(&base.pow(x as u32))?;
        }
        lhs = lhs.add(&prod.scale(&rational_from(*count)))?;
    }
    lhs = lhs.scale(&Rational::new(BigInt::one(), big_int(factorial(r))));

    let mut arg = NilSeries::zero(orders.clone(), tc);
    for l in 1..=r {
        arg = arg.add(&factor(l)?.scale(&Rational::new(BigInt::one(), BigInt::from(l))))?;
    }
    let rhs = arg.exp()?;
    if lhs != rhs {
        return Ok(false);
    }

    let flat = lhs.phi();
    for nu in MultiIndex::all_up_to_norm(t_cap / d) {
        let t_mono = MultiIndex::new(nu.entries().iter().map(|&(l, m)| (d * l, m)))?;
        let got = flat.get(&t_mono).cloned().unwrap_or_else(Rational::zero);
        if got != sn_expectation_closed(&nu, r) {
            return Ok(false);
        }
    }
    Ok(true)
}
