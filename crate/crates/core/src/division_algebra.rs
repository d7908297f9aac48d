//! Formal sums of division symbols `eps_g`, indexed by monic polynomials,
//! with `eps_g * eps_h = eps_{gh}` and the evaluation `eps_g(f) = [g | f]`.
//!
//! Evaluation is linear but not multiplicative: a product of sums must be
//! expanded before it is evaluated.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::charpoly::{rational_from, NilSeries};
use crate::error::{cap_exceeded, Error, Result};
use crate::finite_field::{same_field, FieldCtx};
use crate::polynomial::{count_monic, enumerate_monic, Poly};
use crate::Rational;

/// Default bound on the number of distinct symbols a product may produce.
pub const DEFAULT_TERM_LIMIT: usize = 1_000_000;

/// Element of the symbol algebra over one field.
#[derive(Clone, PartialEq, Eq)]
pub struct SymbolSum {
    ctx: Arc<FieldCtx>,
    terms: BTreeMap<Poly, Rational>,
}

impl fmt::Debug for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolSum({self})")
    }
}

impl fmt::Display for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (g, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            if !mag.is_one() {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(&format!("eps({g})"));
        }
        f.write_str(&out)
    }
}

impl SymbolSum {
    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        SymbolSum {
            ctx: Arc::clone(ctx),
            terms: BTreeMap::new(),
        }
    }

    /// `eps_1`, the identity.
    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::term(&Poly::one(ctx), Rational::one()).expect("1 is monic")
    }

    /// `eps_g`; `g` must be monic.
    pub fn eps(g: &Poly) -> Result<Self> {
        Self::term(g, Rational::one())
    }

    /// `c * eps_g`; `g` must be monic.
    pub fn term(g: &Poly, c: Rational) -> Result<Self> {
        if !g.is_monic() {
            return Err(Error::NotMonic(g.to_string()));
        }
        let mut s = Self::zero(g.ctx());
        s.accumulate(g.clone(), c);
        Ok(s)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Coefficients keyed by monic polynomial in canonical order.
    pub fn terms(&self) -> &BTreeMap<Poly, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest key degree, `None` for the zero sum.
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().filter_map(Poly::degree).max()
    }

    fn accumulate(&mut self, g: Poly, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
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
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.accumulate(g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.ctx);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(g, v)| (g.clone(), v * c)).collect();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_limited(other, DEFAULT_TERM_LIMIT)
    }

    /// Bilinear product, failing once the result holds more than `limit` symbols.
    pub fn mul_limited(&self, other: &Self, limit: usize) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.ctx);
        for (g, cg) in &self.terms {
            for (h, ch) in &other.terms {
                out.accumulate(g.mul(h)?, cg * ch);
                if out.terms.len() > limit {
                    return Err(Error::TermLimit { limit });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        self.pow_limited(n, DEFAULT_TERM_LIMIT)
    }

    /// Repeated squaring under the same term limit as [`SymbolSum::mul_limited`].
    pub fn pow_limited(&self, mut n: u32, limit: usize) -> Result<Self> {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_limited(&base, limit)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_limited(&base, limit)?;
            }
        }
        Ok(acc)
    }

    /// `sum c_g [g | f]`.
    pub fn evaluate(&self, f: &Poly) -> Result<Rational> {
        if !same_field(&self.ctx, f.ctx()) {
            return Err(Error::ContextMismatch);
        }
        let deg_f = f.degree().ok_or(Error::ZeroPolynomial)?;
        let mut total = Rational::zero();
        for (g, c) in &self.terms {
            if g.degree().unwrap_or(0) <= deg_f && g.divides(f)? {
                total += c;
            }
        }
        Ok(total)
    }

    /// The averaging homomorphism `eps_g -> (eps / q)^{deg g}` into
    /// `Q[eps]/(eps^{n+1})`.
    pub fn lambda(&self, n: usize) -> NilSeries {
        let orders = vec![n + 1];
        let q = BigInt::from(self.ctx.q());
        let mut out = NilSeries::zero(orders.clone(), None);
        for (g, c) in &self.terms {
            let d = g.degree().unwrap_or(0);
            if d > n {
                continue;
            }
            let coeff = c / Rational::from_integer(q.pow(d as u32));
            let term = NilSeries::monomial(orders.clone(), None, vec![d], Default::default(), coeff)
                .expect("one variable");
            out = out.add(&term).expect("same ring");
        }
        out
    }

    /// Parses sums like `"3*eps(t^2+t) + 1/2*eps(t)"`; a bare rational stands
    /// for a multiple of `eps(1)`.
    pub fn parse(text: &str, ctx: &Arc<FieldCtx>) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty symbol sum".into()));
        }
        let mut pieces: Vec<(bool, &str)> = Vec::new();
        let (mut depth, mut start, mut negative) = (0i32, 0usize, false);
        for (i, ch) in s.char_indices() {
            match ch {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                '+' | '-' if depth == 0 => {
                    if i > start {
                        pieces.push((negative, &s[start..i]));
                    } else if i != 0 {
                        return Err(Error::Parse(format!("empty term in '{s}'")));
                    }
                    negative = ch == '-';
                    start = i + 1;
                }
                _ => {}
            }
        }
        if start >= s.len() {
            return Err(Error::Parse(format!("trailing operator in '{s}'")));
        }
        pieces.push((negative, &s[start..]));

        let mut out = Self::zero(ctx);
        for (negative, piece) in pieces {
            let (coeff_text, symbol) = match piece.find("eps(") {
                Some(0) => ("1", piece),
                Some(pos) => {
                    let c = piece[..pos]
                        .strip_suffix('*')
                        .ok_or_else(|| Error::Parse(format!("expected '*' before eps in '{piece}'")))?;
                    (c, &piece[pos..])
                }
                None => (piece, ""),
            };
            let mut coeff = parse_rational(coeff_text)?;
            if negative {
                coeff = -coeff;
            }
            let g = if symbol.is_empty() {
                Poly::one(ctx)
            } else {
                let inner = symbol
                    .strip_prefix("eps(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("bad symbol '{symbol}'")))?;
                Poly::parse(inner, ctx)?
            };
            out = out.add(&Self::term(&g, coeff)?)?;
        }
        Ok(out)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Linear extension of divisibility indicators.
pub fn evaluate_on_poly(a: &SymbolSum, f: &Poly) -> Result<Rational> {
    a.evaluate(f)
}

pub fn lambda_map(a: &SymbolSum, n: usize) -> NilSeries {
    a.lambda(n)
}

/// Flattening `eps^j -> 1` of a series without auxiliary variables.
pub fn phi_eps(s: &NilSeries) -> Rational {
    s.phi_value()
}

/// `E_{f in Poly^n}[eps_g(f)] = q^{-deg g}` if `deg g <= n`, else 0.
pub fn expectation_epsilon(g: &Poly, n: usize) -> Result<Rational> {
    if !g.is_monic() {
        return Err(Error::NotMonic(g.to_string()));
    }
    let d = g.degree().expect("monic is nonzero");
    if d > n {
        return Ok(Rational::zero());
    }
    Ok(Rational::new(
        BigInt::one(),
        BigInt::from(g.ctx().q()).pow(d as u32),
    ))
}

/// Average of `a` over all monic polynomials of degree `n`.
pub fn expectation_oracle(a: &SymbolSum, n: usize, cap: u64) -> Result<Rational> {
    let total = count_monic(n, a.ctx())
        .filter(|&t| t <= cap)
        .ok_or_else(|| cap_exceeded("enumerating monic polynomials", format!("{}^{n}", a.ctx().q()), cap))?;
    let mut sum = Rational::zero();
    for f in enumerate_monic(n, a.ctx()) {
        sum += a.evaluate(&f)?;
    }
    Ok(sum / rational_from(total))
}

/// Exhaustive counterpart of [`expectation_epsilon`].
pub fn expectation_epsilon_oracle(g: &Poly, n: usize, cap: u64) -> Result<Rational> {
    expectation_oracle(&SymbolSum::eps(g)?, n, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::prime(2).unwrap()
    }

    fn p(s: &str, ctx: &Arc<FieldCtx>) -> Poly {
        Poly::parse(s, ctx).unwrap()
    }

    fn sym(s: &str, ctx: &Arc<FieldCtx>) -> SymbolSum {
        SymbolSum::parse(s, ctx).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn multiplication_examples() {
        let f2 = f2();
        let et = sym("eps(t)", &f2);
        assert_eq!(et.mul(&et).unwrap(), sym("eps(t^2)", &f2));
        let a = sym("3*eps(t^2+t) - 1/2*eps(t)", &f2);
        assert_eq!(SymbolSum::one(&f2).mul(&a).unwrap(), a);
        let s = sym("eps(t) + eps(t+1)", &f2);
        assert_eq!(
            s.pow(2).unwrap(),
            sym("eps(t^2) + 2*eps(t^2+t) + eps(t^2+1)", &f2)
        );
    }

    #[test]
    fn rejects_bad_input() {
        let f2 = f2();
        let f3 = FieldCtx::prime(3).unwrap();
        assert!(matches!(
            SymbolSum::eps(&Poly::from_ints(&f3, &[0, 2])),
            Err(Error::NotMonic(_))
        ));
        assert!(SymbolSum::eps(&Poly::zero(&f2)).is_err());
        assert_eq!(
            sym("eps(t)", &f2).mul(&sym("eps(t)", &f3)).unwrap_err(),
            Error::ContextMismatch
        );
        assert_eq!(
            sym("eps(t)", &f2).evaluate(&Poly::zero(&f2)).unwrap_err(),
            Error::ZeroPolynomial
        );
        for bad in ["", "eps(t", "2eps(t)", "eps(t)+", "1/0*eps(t)"] {
            assert!(SymbolSum::parse(bad, &f2).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn term_limit() {
        let f2 = f2();
        let s = sym("eps(t) + eps(t+1) + eps(t^2+t+1)", &f2);
        assert_eq!(s.pow_limited(3, 5).unwrap_err(), Error::TermLimit { limit: 5 });
        assert!(s.pow_limited(3, 100).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let f2 = f2();
        let a = sym("1/2*eps(t) + 3*eps(t^2+t) - eps(1)", &f2);
        assert_eq!(a.to_string(), "-eps(1) + 1/2*eps(t) + 3*eps(t^2+t)");
        assert_eq!(sym(&a.to_string(), &f2), a);
        assert_eq!(sym("5", &f2), sym("5*eps(1)", &f2));
    }

    #[test]
    fn evaluation_examples() {
        let f2 = f2();
        let f = p("t^2+t", &f2);
        assert_eq!(sym("eps(t)", &f2).evaluate(&f).unwrap(), q(1, 1));
        assert_eq!(sym("eps(t^2)", &f2).evaluate(&f).unwrap(), q(0, 1));
        assert_eq!(sym("2*eps(t) + 3*eps(t+1)", &f2).evaluate(&f).unwrap(), q(5, 1));
    }

    #[test]
    fn evaluation_is_not_multiplicative() {
        let f2 = f2();
        let f = p("t^2+t", &f2);
        let a = sym("eps(t)", &f2);
        let square = a.mul(&a).unwrap().evaluate(&f).unwrap();
        let product = a.evaluate(&f).unwrap() * a.evaluate(&f).unwrap();
        assert_ne!(square, product);
    }

    #[test]
    fn lambda_examples() {
        let f2 = f2();
        let l = sym("eps(t)", &f2).lambda(2);
        assert_eq!(
            l,
            NilSeries::monomial(vec![3], None, vec![1], Default::default(), q(1, 2)).unwrap()
        );
        assert!(sym("eps(t^3)", &f2).lambda(2).is_zero());
        assert_eq!(SymbolSum::one(&f2).lambda(2), NilSeries::one(vec![3], None));
    }

    #[test]
    fn expectation_examples() {
        let f2 = f2();
        let t = p("t", &f2);
        assert_eq!(expectation_epsilon(&t, 2).unwrap(), q(1, 2));
        assert_eq!(expectation_epsilon_oracle(&t, 2, 1000).unwrap(), q(1, 2));
        let g = p("t^3+t+1", &f2);
        assert_eq!(expectation_epsilon(&g, 2).unwrap(), q(0, 1));
        assert_eq!(expectation_epsilon_oracle(&g, 2, 1000).unwrap(), q(0, 1));
        let one = Poly::one(&f2);
        assert_eq!(expectation_epsilon(&one, 3).unwrap(), q(1, 1));
        assert!(expectation_epsilon_oracle(&t, 20, 1000).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(
            phi_eps(&NilSeries::one(vec![3], None).add(&NilSeries::eps(vec![3], None, 0, 1).unwrap().scale(&q(1, 2))).unwrap()),
            q(3, 2)
        );
    }
}
