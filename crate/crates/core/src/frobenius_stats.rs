//! Frobenius coset structure of a polynomial and the values of character
//! polynomials on it, one polynomial at a time or over whole ensembles.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::charpoly::{big_int, binomial, rational_from, sn_expectation_closed, CharPoly};
use crate::division_algebra::SymbolSum;
use crate::error::{cap_exceeded, Error, Result};
use crate::finite_field::FieldCtx;
use crate::parallel::map_chunks;
use crate::polynomial::{count_irreducibles, count_monic, enumerate_irreducibles, factor, Factorization, Poly};
use crate::symmetric::{factorial, spec_embed, Block, CosetSpec, MultiIndex};
use crate::young_stats::block_product_phi;
use crate::Rational;

/// Default limit on the number of polynomials an ensemble may enumerate.
pub const DEFAULT_POLY_CAP: u64 = 1_000_000;

/// The coset `tau H_f` attached to a monic polynomial: one block
/// `(deg p_i, multiplicity r_i)` per distinct irreducible factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaStructure {
    pub f: Poly,
    pub spec: CosetSpec,
    /// `factors[i]` is the irreducible behind `spec.blocks()[i]`.
    pub factors: Vec<(Poly, u32)>,
}

fn check_monic(f: &Poly) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_string()));
    }
    Ok(())
}

fn blocks_of(fac: &Factorization) -> Vec<Block> {
    let mut blocks: Vec<Block> = fac
        .factors
        .iter()
        .map(|(p, r)| Block { d: p.degree().unwrap_or(0), r: *r as usize })
        .collect();
    blocks.sort();
    blocks
}

pub fn sigma_structure(f: &Poly) -> Result<SigmaStructure> {
    check_monic(f)?;
    let mut factors = factor(f)?.factors;
    // Stable, so equal blocks keep the factorization order.
    factors.sort_by_key(|(p, r)| (p.degree().unwrap_or(0), *r));
    let blocks = factors
        .iter()
        .map(|(p, r)| Block { d: p.degree().unwrap_or(0), r: *r as usize })
        .collect();
    Ok(SigmaStructure {
        f: f.clone(),
        spec: CosetSpec::new(blocks)?,
        factors,
    })
}

/// Average of `p` over the coset `tau H_f`, enumerated element by element.
pub fn chi_oracle(f: &Poly, p: &CharPoly, cap: u64) -> Result<Rational> {
    let sigma = sigma_structure(f)?;
    let (h, tau) = spec_embed(&sigma.spec, cap)?;
    let mut sum = Rational::zero();
    for x in &h {
        sum += p.eval(&tau.compose(x)?.cycle_type());
    }
    Ok(sum / rational_from(h.len()))
}

/// `binom(X, mu)(f)` from the factorization pattern of `f` alone:
/// `Phi[prod_k (1 / (k^{mu_k} mu_k!)) (sum_{d_i | k} d_i eps_i^{k/d_i})^{mu_k}]`.
pub fn chi_formula(f: &Poly, mu: &MultiIndex) -> Result<Rational> {
    check_monic(f)?;
    Ok(chi_from_blocks(&blocks_of(&factor(f)?), mu))
}

fn chi_from_blocks(blocks: &[Block], mu: &MultiIndex) -> Rational {
    let n: usize = blocks.iter().map(|b| b.d * b.r).sum();
    let scale = sn_expectation_closed(mu, n);
    if scale.is_zero() {
        return scale;
    }
    scale * block_product_phi(blocks, mu)
}

/// `binom(X, mu)(f)` by expanding
/// `prod_k (1 / (k^{mu_k} mu_k!)) (sum_{p in Irr_{|k}} deg(p) eps_p^{k/deg p})^{mu_k}`
/// in the symbol algebra and evaluating the expanded sum on `f`.
pub fn chi_formula_symbolic(f: &Poly, mu: &MultiIndex, term_limit: usize) -> Result<Rational> {
    check_monic(f)?;
    let ctx = f.ctx();
    let mut acc = SymbolSum::one(ctx);
    for &(k, m) in mu.entries() {
        let mut sum = SymbolSum::zero(ctx);
        for d in (1..=k).filter(|d| k % d == 0) {
            for p in enumerate_irreducibles(d, ctx)? {
                sum = sum.add(&SymbolSum::term(&p.pow((k / d) as u32), rational_from(d))?)?;
            }
        }
        let denom = big_int(num_bigint::BigUint::from(k).pow(m as u32) * factorial(m));
        let factor = sum
            .pow_limited(m as u32, term_limit)?
            .scale(&Rational::new(BigInt::one(), denom));
        acc = acc.mul_limited(&factor, term_limit)?;
    }
    acc.evaluate(f)
}

/// Linear extension of [`chi_formula`] to a character polynomial.
pub fn chi_formula_charpoly(f: &Poly, p: &CharPoly) -> Result<Rational> {
    check_monic(f)?;
    let blocks = blocks_of(&factor(f)?);
    Ok(p.terms().iter().map(|(mu, c)| c * chi_from_blocks(&blocks, mu)).sum())
}

/// `X_k(f) = sum_{d | k} (d/k) #{degree-d factors dividing f at least k/d times}`.
pub fn xk_of_f(f: &Poly, k: usize) -> Result<Rational> {
    check_monic(f)?;
    if k == 0 {
        return Err(Error::Invalid("cycle length must be at least 1".into()));
    }
    let mut total = 0usize;
    for (p, r) in factor(f)?.factors {
        let d = p.degree().unwrap_or(0);
        if k % d == 0 && r as usize >= k / d {
            total += d;
        }
    }
    Ok(Rational::new(BigInt::from(total), BigInt::from(k)))
}

/// For square-free `f`: `prod_k C(n_k, mu_k)` with `n_k` the number of
/// degree-`k` irreducible factors.
pub fn squarefree_choices(f: &Poly, mu: &MultiIndex) -> Result<Rational> {
    check_monic(f)?;
    let fac = factor(f)?;
    if !fac.is_squarefree() {
        return Err(Error::Invalid(format!("{f} is not square-free")));
    }
    let mut by_degree: BTreeMap<usize, usize> = BTreeMap::new();
    for (p, _) in &fac.factors {
        *by_degree.entry(p.degree().unwrap_or(0)).or_default() += 1;
    }
    let count = mu.entries().iter().fold(num_bigint::BigUint::one(), |acc, &(k, m)| {
        acc * binomial(by_degree.get(&k).copied().unwrap_or(0), m)
    });
    Ok(rational_from(big_int(count)))
}

/// Restriction on which polynomials of an ensemble are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnsembleFilter {
    #[default]
    All,
    SquareFree,
    /// Every irreducible factor has multiplicity at most this.
    MaxMultiplicity(u32),
}

impl EnsembleFilter {
    pub fn accepts(&self, fac: &Factorization) -> bool {
        match *self {
            EnsembleFilter::All => true,
            EnsembleFilter::SquareFree => fac.is_squarefree(),
            EnsembleFilter::MaxMultiplicity(m) => fac.max_multiplicity() <= m,
        }
    }
}

impl fmt::Display for EnsembleFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleFilter::All => f.write_str("all"),
            EnsembleFilter::SquareFree => f.write_str("squarefree"),
            EnsembleFilter::MaxMultiplicity(m) => write!(f, "maxmult={m}"),
        }
    }
}

impl FromStr for EnsembleFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(EnsembleFilter::All),
            "squarefree" => Ok(EnsembleFilter::SquareFree),
            other => other
                .strip_prefix("maxmult=")
                .and_then(|m| m.parse().ok())
                .map(EnsembleFilter::MaxMultiplicity)
                .ok_or_else(|| {
                    Error::Parse(format!("unknown filter '{other}', expected all, squarefree or maxmult=m"))
                }),
        }
    }
}

/// Sums over a filtered ensemble of monic polynomials of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleSums {
    /// One sum per requested multi-index, in request order.
    pub sums: Vec<Rational>,
    /// Number of polynomials that passed the filter.
    pub count: u64,
    /// Size of the unfiltered ensemble, `q^d`.
    pub total: u64,
}

/// `sum_f binom(X, mu)(f)` over the monic degree-`d` polynomials accepted by
/// `filter`, for every `mu` at once. Work is split into contiguous index
/// ranges; the result does not depend on `threads`.
pub fn ensemble_binom_sums(
    d: usize,
    ctx: &Arc<FieldCtx>,
    mus: &[MultiIndex],
    filter: EnsembleFilter,
    cap: u64,
    threads: usize,
) -> Result<EnsembleSums> {
    let total = count_monic(d, ctx)
        .filter(|&t| t <= cap)
        .ok_or_else(|| cap_exceeded("ensemble enumeration", format!("{}^{d}", ctx.q()), cap))?;
    let parts = map_chunks(total, threads, |range| {
        let mut sums = vec![Rational::zero(); mus.len()];
        let mut count = 0u64;
        let mut cache: BTreeMap<Vec<Block>, Vec<Rational>> = BTreeMap::new();
        for idx in range {
            let f = Poly::monic_from_index(ctx, d, idx);
            let fac = factor(&f)?;
            if !filter.accepts(&fac) {
                continue;
            }
            count += 1;
            let blocks = blocks_of(&fac);
            let values = cache
                .entry(blocks)
                .or_insert_with_key(|b| mus.iter().map(|mu| chi_from_blocks(b, mu)).collect());
            for (s, v) in sums.iter_mut().zip(values.iter()) {
                *s += v;
            }
        }
        Ok((sums, count))
    })?;
    let mut sums = vec![Rational::zero(); mus.len()];
    let mut count = 0;
    for (part, c) in parts {
        for (s, v) in sums.iter_mut().zip(part) {
            *s += v;
        }
        count += c;
    }
    Ok(EnsembleSums { sums, count, total })
}

/// `(sum_f P(f), #f)` over the filtered ensemble.
pub fn ensemble_sum(
    d: usize,
    ctx: &Arc<FieldCtx>,
    p: &CharPoly,
    filter: EnsembleFilter,
    cap: u64,
    threads: usize,
) -> Result<(Rational, u64)> {
    let mus: Vec<MultiIndex> = p.terms().keys().cloned().collect();
    let sums = ensemble_binom_sums(d, ctx, &mus, filter, cap, threads)?;
    let value = p
        .terms()
        .values()
        .zip(&sums.sums)
        .map(|(c, s)| c * s)
        .sum();
    Ok((value, sums.count))
}

/// Three routes to `E_{Poly^d}[binom(X, mu)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualExpectationReport {
    pub d: usize,
    pub mu: MultiIndex,
    /// `(1/q^d) sum_f binom(X, mu)(f)`.
    pub ensemble_mean: Rational,
    /// `E_{S_d}[binom(X, mu)]`.
    pub symmetric_group: Rational,
    /// `E_{S_d}[binom(X, mu)] prod_k ((1/q^k) sum_{e | k} e N_e)^{mu_k}`.
    pub necklace_form: Rational,
}

impl EqualExpectationReport {
    pub fn all_equal(&self) -> bool {
        self.ensemble_mean == self.symmetric_group && self.symmetric_group == self.necklace_form
    }
}

pub fn equal_expectation_check(
    d: usize,
    ctx: &Arc<FieldCtx>,
    mu: &MultiIndex,
    cap: u64,
    threads: usize,
) -> Result<EqualExpectationReport> {
    let sums = ensemble_binom_sums(d, ctx, std::slice::from_ref(mu), EnsembleFilter::All, cap, threads)?;
    let ensemble_mean = sums.sums[0].clone() / rational_from(sums.total);
    Ok(EqualExpectationReport {
        d,
        mu: mu.clone(),
        ensemble_mean,
        symmetric_group: sn_expectation_closed(mu, d),
        necklace_form: necklace_form(d, ctx, mu)?,
    })
}

fn necklace_form(d: usize, ctx: &Arc<FieldCtx>, mu: &MultiIndex) -> Result<Rational> {
    let mut value = sn_expectation_closed(mu, d);
    if value.is_zero() {
        return Ok(value);
    }
    for &(k, m) in mu.entries() {
        let mut weighted = 0u64;
        for e in (1..=k).filter(|e| k % e == 0) {
            weighted += e as u64 * count_irreducibles(e, ctx)?;
        }
        let qk = BigInt::from(ctx.q()).pow(k as u32);
        let ratio = Rational::new(BigInt::from(weighted), qk);
        value *= num_traits::pow(ratio, m);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::division_algebra::DEFAULT_TERM_LIMIT;
    use crate::symmetric::DEFAULT_BRUTE_FORCE_CAP;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::prime(2).unwrap()
    }

    fn p(s: &str, ctx: &Arc<FieldCtx>) -> Poly {
        Poly::parse(s, ctx).unwrap()
    }

    fn mu(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn sigma_examples() {
        let f2 = f2();
        assert_eq!(sigma_structure(&p("t^2", &f2)).unwrap().spec, "1^2".parse().unwrap());
        assert_eq!(sigma_structure(&p("t^2+t+1", &f2)).unwrap().spec, "2^1".parse().unwrap());
        let s = sigma_structure(&p("t^4+t", &f2)).unwrap();
        assert_eq!(s.spec, "1^1,1^1,2^1".parse().unwrap());
        assert_eq!(s.factors[2].0, p("t^2+t+1", &f2));
        let f3 = FieldCtx::prime(3).unwrap();
        assert!(matches!(sigma_structure(&p("2*t", &f3)), Err(Error::NotMonic(_))));
        assert_eq!(sigma_structure(&Poly::zero(&f3)).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn sigma_blocks_follow_factors() {
        let f3 = FieldCtx::prime(3).unwrap();
        let f = p("t^2+1", &f3).pow(1).mul(&p("t", &f3).pow(3)).unwrap().mul(&p("t+1", &f3)).unwrap();
        let s = sigma_structure(&f).unwrap();
        for (b, (g, r)) in s.spec.blocks().iter().zip(&s.factors) {
            assert_eq!((b.d, b.r), (g.degree().unwrap(), *r as usize));
        }
    }

    #[test]
    fn chi_examples() {
        let f2 = f2();
        let cap = DEFAULT_BRUTE_FORCE_CAP;
        let t2 = p("t^2", &f2);
        assert_eq!(chi_oracle(&t2, &CharPoly::x(2), cap).unwrap(), q(1, 2));
        assert_eq!(chi_oracle(&t2, &CharPoly::x(1), cap).unwrap(), q(1, 1));
        let sf = p("t^2+t", &f2);
        assert_eq!(chi_oracle(&sf, &CharPoly::binom(mu("1:2")), cap).unwrap(), q(1, 1));

        assert_eq!(chi_formula(&t2, &mu("2:1")).unwrap(), q(1, 2));
        assert_eq!(chi_formula(&p("t^3+t+1", &f2), &mu("3:1")).unwrap(), q(1, 1));
        assert_eq!(chi_formula(&sf, &mu("2:1")).unwrap(), q(0, 1));
        assert_eq!(chi_formula_symbolic(&t2, &mu("2:1"), DEFAULT_TERM_LIMIT).unwrap(), q(1, 2));
    }

    #[test]
    fn xk_examples() {
        let f2 = f2();
        assert_eq!(xk_of_f(&p("t^2", &f2), 2).unwrap(), q(1, 2));
        let g = p("t^2+t+1", &f2);
        for r in 1..=3u32 {
            let f = g.pow(r);
            for l in 1..=r as i64 {
                assert_eq!(xk_of_f(&f, 2 * l as usize).unwrap(), q(1, l));
            }
        }
        assert_eq!(xk_of_f(&p("t^4+t", &f2), 1).unwrap(), q(2, 1));
    }

    #[test]
    fn squarefree_examples() {
        let f2 = f2();
        let f = p("t^4+t", &f2);
        assert_eq!(squarefree_choices(&f, &mu("1:2")).unwrap(), q(1, 1));
        assert_eq!(squarefree_choices(&f, &mu("1:1,2:1")).unwrap(), q(2, 1));
        assert!(squarefree_choices(&p("t^2", &f2), &mu("1:1")).is_err());
    }

    #[test]
    fn filters_parse() {
        assert_eq!("all".parse::<EnsembleFilter>().unwrap(), EnsembleFilter::All);
        assert_eq!("squarefree".parse::<EnsembleFilter>().unwrap(), EnsembleFilter::SquareFree);
        assert_eq!(
            "maxmult=2".parse::<EnsembleFilter>().unwrap(),
            EnsembleFilter::MaxMultiplicity(2)
        );
        assert!("maxmult=x".parse::<EnsembleFilter>().is_err());
        assert_eq!(EnsembleFilter::MaxMultiplicity(3).to_string(), "maxmult=3");
    }

    #[test]
    fn ensemble_examples() {
        let f2 = f2();
        let cap = DEFAULT_POLY_CAP;
        let (sum, count) = ensemble_sum(2, &f2, &CharPoly::x(2), EnsembleFilter::All, cap, 1).unwrap();
        assert_eq!((sum, count), (q(2, 1), 4));
        let (sum, count) = ensemble_sum(2, &f2, &CharPoly::x(1), EnsembleFilter::SquareFree, cap, 1).unwrap();
        assert_eq!((sum, count), (q(2, 1), 2));
        let p3: CharPoly = "3 + X1".parse().unwrap();
        assert_eq!(ensemble_sum(0, &f2, &p3, EnsembleFilter::All, cap, 1).unwrap(), (q(3, 1), 1));
        assert!(ensemble_sum(30, &f2, &p3, EnsembleFilter::All, cap, 1).is_err());
    }

    #[test]
    fn ensemble_is_thread_independent() {
        let f3 = FieldCtx::prime(3).unwrap();
        let p: CharPoly = "X1^2 - X2 + 1/3*binom(1:1,2:1)".parse().unwrap();
        let one = ensemble_sum(5, &f3, &p, EnsembleFilter::MaxMultiplicity(2), DEFAULT_POLY_CAP, 1).unwrap();
        for threads in [2, 5, 16] {
            assert_eq!(
                ensemble_sum(5, &f3, &p, EnsembleFilter::MaxMultiplicity(2), DEFAULT_POLY_CAP, threads).unwrap(),
                one
            );
        }
    }

    #[test]
    fn equal_expectation_examples() {
        let f2 = f2();
        let r = equal_expectation_check(2, &f2, &mu("2:1"), DEFAULT_POLY_CAP, 1).unwrap();
        assert_eq!(r.ensemble_mean, q(1, 2));
        assert!(r.all_equal());
        let r = equal_expectation_check(3, &f2, &mu("1:1"), DEFAULT_POLY_CAP, 1).unwrap();
        assert_eq!(r.ensemble_mean, q(1, 1));
        assert!(r.all_equal());
        let r = equal_expectation_check(2, &f2, &mu("1:3"), DEFAULT_POLY_CAP, 1).unwrap();
        assert_eq!(r.ensemble_mean, q(0, 1));
        assert!(r.all_equal());
    }
}
