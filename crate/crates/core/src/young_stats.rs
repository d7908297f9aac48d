//! Closed-form statistics on cosets `tau H` of Young subgroups, with
//! brute-force counterparts.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::charpoly::{big_int, binom_eval, rational_from, sn_expectation_closed, NilSeries};
use crate::error::{Error, Result};
use crate::parallel::map_chunks;
use crate::symmetric::{conjugacy_class_size, factorial, Block, CosetSpec, MultiIndex};
use crate::Rational;

/// `Phi[prod_k (sum_{i: d_i | k} d_i eps_i^{k/d_i})^{mu_k}]` in
/// `Q[eps_1, ..., eps_n]/(eps_i^{r_i+1})`.
pub fn block_product_phi(blocks: &[Block], mu: &MultiIndex) -> Rational {
    let orders: Vec<usize> = blocks.iter().map(|b| b.r + 1).collect();
    let mut acc = NilSeries::one(orders.clone(), None);
    for &(k, m) in mu.entries() {
        let mut sum = NilSeries::zero(orders.clone(), None);
        for (i, b) in blocks.iter().enumerate().filter(|(_, b)| k % b.d == 0) {
            let term = NilSeries::eps(orders.clone(), None, i, k / b.d)
                .expect("index in range")
                .scale(&rational_from(b.d));
            sum = sum.add(&term).expect("same ring");
        }
        acc = acc.mul(&sum.pow(m as u32)).expect("same ring");
        if acc.is_zero() {
            break;
        }
    }
    acc.phi_value()
}

/// Expected value of `binom(X, mu)` over the coset `tau H`.
pub fn expected_binom_on_coset(spec: &CosetSpec, mu: &MultiIndex) -> Rational {
    let base = sn_expectation_closed(mu, spec.size());
    if base.is_zero() {
        return base;
    }
    base * block_product_phi(spec.blocks(), mu)
}

/// Number of elements of `tau H` with cycle type `mu`, where `||mu|| = N`.
pub fn count_cycle_type_in_coset(spec: &CosetSpec, mu: &MultiIndex) -> Result<BigUint> {
    let n = spec.size();
    let class = conjugacy_class_size(mu, n)?;
    let value = rational_from(big_int(spec.h_order() * class))
        / rational_from(big_int(factorial(n)))
        * block_product_phi(spec.blocks(), mu);
    if !value.is_integer() || value.is_negative() {
        return Err(Error::NonIntegral(value.to_string()));
    }
    Ok(value
        .to_integer()
        .to_biguint()
        .expect("checked non-negative"))
}

/// `(1/k) sum_{i: d_i | k, d_i r_i >= k} d_i`.
pub fn expected_k_cycles(spec: &CosetSpec, k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::Invalid("cycle length must be at least 1".into()));
    }
    let total: usize = spec
        .blocks()
        .iter()
        .filter(|b| k % b.d == 0 && b.d * b.r >= k)
        .map(|b| b.d)
        .sum();
    Ok(Rational::new(BigInt::from(total), BigInt::from(k)))
}

/// Cycle types of every element of `tau H`, with multiplicities.
pub fn coset_histogram(spec: &CosetSpec, cap: u64, threads: usize) -> Result<BTreeMap<MultiIndex, u64>> {
    let order = spec.h_order_within(cap)?;
    let tau = spec.tau();
    let parts = map_chunks(order, threads, |range| {
        let mut hist: BTreeMap<MultiIndex, u64> = BTreeMap::new();
        for idx in range {
            let h = spec.embed(&spec.h_element(idx))?;
            *hist.entry(tau.compose(&h)?.cycle_type()).or_default() += 1;
        }
        Ok(hist)
    })?;
    let mut out = BTreeMap::new();
    for part in parts {
        for (ct, n) in part {
            *out.entry(ct).or_default() += n;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetBruteforce {
    pub average: Rational,
    pub histogram: BTreeMap<MultiIndex, u64>,
}

/// Enumerates `tau H`: the exact average of `binom(X, mu)` and the cycle-type histogram.
pub fn coset_bruteforce(spec: &CosetSpec, mu: &MultiIndex, cap: u64, threads: usize) -> Result<CosetBruteforce> {
    let histogram = coset_histogram(spec, cap, threads)?;
    Ok(CosetBruteforce {
        average: histogram_average(&histogram, mu),
        histogram,
    })
}

/// Exact average of `binom(X, mu)` over a cycle-type histogram.
pub fn histogram_average(histogram: &BTreeMap<MultiIndex, u64>, mu: &MultiIndex) -> Rational {
    let total: u64 = histogram.values().sum();
    let sum: Rational = histogram
        .iter()
        .map(|(ct, &n)| binom_eval(mu, ct) * rational_from(n))
        .sum();
    if total == 0 {
        return Rational::zero();
    }
    sum / rational_from(total)
}

/// All cycle-type counts of `tau H` from the closed form; they sum to `|H|`.
pub fn closed_form_histogram(spec: &CosetSpec) -> Result<BTreeMap<MultiIndex, BigUint>> {
    let mut out = BTreeMap::new();
    for mu in MultiIndex::all_of_norm(spec.size()) {
        let count = count_cycle_type_in_coset(spec, &mu)?;
        if !count.is_zero() {
            out.insert(mu, count);
        }
    }
    debug_assert_eq!(
        out.values().fold(BigUint::zero(), |a, b| a + b),
        spec.h_order()
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::DEFAULT_BRUTE_FORCE_CAP;

    fn mu(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    fn spec(s: &str) -> CosetSpec {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn expected_binom_examples() {
        for n in 1..=5 {
            let s = CosetSpec::new(vec![Block { d: 1, r: n }]).unwrap();
            for m in MultiIndex::all_up_to_norm(n) {
                assert_eq!(expected_binom_on_coset(&s, &m), sn_expectation_closed(&m, n));
            }
        }
        assert_eq!(expected_binom_on_coset(&spec("2^1"), &mu("2:1")), q(1, 1));
        assert_eq!(expected_binom_on_coset(&spec("2^1"), &mu("1:1")), q(0, 1));
    }

    #[test]
    fn count_examples() {
        let one = BigUint::from(1u32);
        assert_eq!(count_cycle_type_in_coset(&spec("2^1"), &mu("2:1")).unwrap(), one);
        assert_eq!(count_cycle_type_in_coset(&spec("1^2"), &mu("1:2")).unwrap(), one);
        assert_eq!(count_cycle_type_in_coset(&spec("1^2"), &mu("2:1")).unwrap(), one);
        assert!(matches!(
            count_cycle_type_in_coset(&spec("1^2"), &mu("1:1")),
            Err(Error::NormMismatch { .. })
        ));
    }

    #[test]
    fn k_cycle_examples() {
        assert_eq!(expected_k_cycles(&spec("1^2"), 1).unwrap(), q(1, 1));
        assert_eq!(expected_k_cycles(&spec("2^1"), 2).unwrap(), q(1, 1));
        assert_eq!(expected_k_cycles(&spec("3^1"), 2).unwrap(), q(0, 1));
        assert!(expected_k_cycles(&spec("3^1"), 0).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let b = coset_bruteforce(&spec("1^3"), &mu("1:1"), DEFAULT_BRUTE_FORCE_CAP, 1).unwrap();
        assert_eq!(b.average, q(1, 1));
        let expect: BTreeMap<MultiIndex, u64> =
            [(mu("1:3"), 1), (mu("1:1,2:1"), 3), (mu("3:1"), 2)].into_iter().collect();
        assert_eq!(b.histogram, expect);

        let b = coset_bruteforce(&spec("2^2"), &mu("1:1"), DEFAULT_BRUTE_FORCE_CAP, 2).unwrap();
        assert_eq!(b.histogram.values().sum::<u64>(), 4);

        let b = coset_bruteforce(&spec("2^1"), &mu("1:2"), DEFAULT_BRUTE_FORCE_CAP, 1).unwrap();
        assert_eq!(b.histogram, [(mu("2:1"), 1)].into_iter().collect());
        assert!(coset_bruteforce(&spec("1^8"), &mu("1:1"), 1000, 1).is_err());
    }

    #[test]
    fn histogram_is_thread_independent() {
        let s = spec("1^2,2^2,3^1");
        let one = coset_histogram(&s, DEFAULT_BRUTE_FORCE_CAP, 1).unwrap();
        for threads in [2, 3, 7] {
            assert_eq!(coset_histogram(&s, DEFAULT_BRUTE_FORCE_CAP, threads).unwrap(), one);
        }
    }

    #[test]
    fn closed_form_histogram_matches_small_specs() {
        for s in CosetSpec::enumerate_all(5, 10_000) {
            let brute = coset_histogram(&s, DEFAULT_BRUTE_FORCE_CAP, 1).unwrap();
            let closed = closed_form_histogram(&s).unwrap();
            let brute: BTreeMap<MultiIndex, BigUint> =
                brute.into_iter().map(|(k, v)| (k, BigUint::from(v))).collect();
            assert_eq!(closed, brute, "spec {s}");
        }
    }
}
