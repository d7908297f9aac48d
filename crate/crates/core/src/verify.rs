//! Self-verification suites: every closed form against an independent
//! enumeration, at a configurable scale.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::charpoly::{
    g_series_identity_check, rational_from, sn_cycle_type_histogram, sn_expectation_closed,
    CharPoly,
};
use crate::division_algebra::{expectation_epsilon, expectation_oracle, SymbolSum};
use crate::error::{cap_exceeded, Error, Result};
use crate::finite_field::FieldCtx;
use crate::frobenius_stats::{
    chi_formula, chi_formula_symbolic, chi_oracle, ensemble_binom_sums, equal_expectation_check,
    squarefree_choices, xk_of_f, EnsembleFilter,
};
use crate::polynomial::{count_monic, enumerate_monic, factor, necklace_check, Poly, IRREDUCIBLE_SIEVE_LIMIT};
use crate::symmetric::{factorial_u64, CosetSpec, MultiIndex};
use crate::young_stats::{
    coset_histogram, count_cycle_type_in_coset, expected_binom_on_coset, expected_k_cycles, histogram_average,
};
use crate::Rational;

/// Failure messages kept per suite.
const MAX_REPORTED_FAILURES: usize = 10;

/// Enumeration limits shared by all suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Largest group or coset enumerated element by element.
    pub brute_force: u64,
    /// Largest polynomial ensemble `q^d`.
    pub poly: u64,
    /// Largest symbol expansion.
    pub terms: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            brute_force: crate::symmetric::DEFAULT_BRUTE_FORCE_CAP,
            poly: crate::frobenius_stats::DEFAULT_POLY_CAP,
            terms: crate::division_algebra::DEFAULT_TERM_LIMIT,
        }
    }
}

/// How far each suite enumerates. The default is the full acceptance scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scale {
    pub necklace_qs: Vec<u64>,
    pub necklace_kmax: usize,
    pub ensemble_qs: Vec<u64>,
    pub ensemble_dmax: usize,
    /// `(q, largest degree)` pairs for the per-polynomial formula checks.
    pub formula_fields: Vec<(u64, usize)>,
    /// Largest `||mu||` for the symbol-expansion cross-check (over `F_2` only).
    pub symbolic_norm_max: usize,
    pub coset_max_n: usize,
    /// Size bound for the exhaustive block-cycle and projection checks.
    pub projection_max_n: usize,
    pub coset_h_cap: u64,
    pub sn_rmax: usize,
    pub gseries_dmax: usize,
    pub gseries_rmax: usize,
    pub gseries_tdeg: usize,
    pub epsilon_qs: Vec<u64>,
    pub epsilon_nmax: usize,
    pub stabilization_qs: Vec<u64>,
    pub stabilization_dmax: usize,
    pub threads: usize,
    pub caps: Caps,
}

impl Default for Scale {
    fn default() -> Self {
        Scale {
            necklace_qs: vec![2, 3, 4, 5],
            necklace_kmax: 8,
            ensemble_qs: vec![2, 3],
            ensemble_dmax: 6,
            formula_fields: vec![(2, 5), (3, 4)],
            symbolic_norm_max: 4,
            coset_max_n: 8,
            projection_max_n: 12,
            coset_h_cap: 10_000,
            sn_rmax: 8,
            gseries_dmax: 3,
            gseries_rmax: 6,
            gseries_tdeg: 6,
            epsilon_qs: vec![2, 3],
            epsilon_nmax: 4,
            stabilization_qs: vec![2, 3],
            stabilization_dmax: 6,
            threads: 0,
            caps: Caps::default(),
        }
    }
}

impl Scale {
    /// Restricts every polynomial suite to one field.
    pub fn with_field(mut self, q: u64) -> Self {
        self.necklace_qs = vec![q];
        self.ensemble_qs = vec![q];
        self.epsilon_qs = vec![q];
        self.stabilization_qs = vec![q];
        let deg = self.formula_fields.iter().map(|&(_, d)| d).max().unwrap_or(0);
        self.formula_fields = vec![(q, deg)];
        self
    }

    /// Sets the largest polynomial degree of every polynomial suite.
    pub fn with_degree(mut self, d: usize) -> Self {
        self.ensemble_dmax = d;
        self.stabilization_dmax = d;
        self.epsilon_nmax = d;
        for f in &mut self.formula_fields {
            f.1 = d;
        }
        self
    }

    /// Refuses scales whose enumerations exceed the configured caps.
    pub fn validate(&self) -> Result<()> {
        let monic = |q: u64, d: usize, what: &'static str, cap: u64| -> Result<()> {
            let ctx = FieldCtx::of_order(q)?;
            match count_monic(d, &ctx) {
                Some(n) if n <= cap => Ok(()),
                _ => Err(cap_exceeded(what, format!("{q}^{d}"), cap)),
            }
        };
        for &q in &self.necklace_qs {
            monic(q, self.necklace_kmax, "necklace check", IRREDUCIBLE_SIEVE_LIMIT)?;
        }
        for &q in &self.ensemble_qs {
            monic(q, self.ensemble_dmax, "ensemble enumeration", self.caps.poly)?;
        }
        for &q in &self.stabilization_qs {
            monic(q, self.stabilization_dmax, "ensemble enumeration", self.caps.poly)?;
        }
        for &q in &self.epsilon_qs {
            monic(q, self.epsilon_nmax + 1, "symbol enumeration", self.caps.poly)?;
        }
        for &(q, d) in &self.formula_fields {
            monic(q, d, "polynomial enumeration", self.caps.poly)?;
            // Worst coset is t^d, with |H| = d!.
            if factorial_u64(d).is_none_or(|h| h > self.caps.brute_force) {
                return Err(cap_exceeded("coset enumeration", format!("{d}!"), self.caps.brute_force));
            }
        }
        if self.coset_h_cap > self.caps.brute_force {
            return Err(cap_exceeded("coset enumeration", self.coset_h_cap, self.caps.brute_force));
        }
        for r in [self.sn_rmax, self.gseries_rmax] {
            if factorial_u64(r).is_none_or(|n| n > self.caps.brute_force) {
                return Err(cap_exceeded("enumerating S_n", format!("{r}!"), self.caps.brute_force));
            }
        }
        if self.gseries_dmax == 0 {
            return Err(Error::Invalid("block-cycle length bound must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub id: u8,
    pub name: &'static str,
    pub checks: u64,
    /// Total number of failed checks.
    pub failed: u64,
    /// The first few failures, described.
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    /// `PASS [3] formula vs oracle: 1234 checks`.
    pub fn summary_line(&self) -> String {
        format!(
            "{} [{}] {}: {} checks, {} failed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checks,
            self.failed
        )
    }
}

struct Tally {
    checks: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: 0, failed: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    fn finish(self, id: u8, name: &'static str, start: Instant) -> SuiteReport {
        SuiteReport {
            id,
            name,
            checks: self.checks,
            failed: self.failed,
            failures: self.failures,
            elapsed: start.elapsed(),
        }
    }
}

pub const SUITE_NAMES: [&str; 10] = [
    "necklace relations",
    "equal expectations",
    "formula vs oracle",
    "young coset statistics",
    "symmetric group expectations",
    "block-cycle sums and projections",
    "truncated series identity",
    "divisor symbol averages",
    "specific values",
    "stabilization",
];

/// Runs suite `id` (1 to 10).
pub fn run_suite(id: u8, scale: &Scale) -> Result<SuiteReport> {
    scale.validate()?;
    let start = Instant::now();
    let name = *SUITE_NAMES
        .get((id as usize).wrapping_sub(1))
        .ok_or(Error::IndexOutOfRange { index: id as usize, len: SUITE_NAMES.len() })?;
    let tally = match id {
        1 => necklace(scale)?,
        2 => equal_expectations(scale)?,
        3 => formula_vs_oracle(scale)?,
        4 => young_cosets(scale)?,
        5 => symmetric_group(scale)?,
        6 => block_cycles(scale)?,
        7 => series_identity(scale)?,
        8 => symbol_averages(scale)?,
        9 => specific_values(scale)?,
        _ => stabilization(scale)?,
    };
    Ok(tally.finish(id, name, start))
}

pub fn run_all(scale: &Scale) -> Result<Vec<SuiteReport>> {
    (1..=SUITE_NAMES.len() as u8).map(|id| run_suite(id, scale)).collect()
}

fn necklace(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for &q in &scale.necklace_qs {
        let ctx = FieldCtx::of_order(q)?;
        for k in 1..=scale.necklace_kmax {
            let row = necklace_check(k, &ctx)?;
            t.check(row.equal, || format!("q={q} k={k}: {} != {}", row.lhs, row.rhs));
        }
    }
    Ok(t)
}

fn equal_expectations(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for &q in &scale.ensemble_qs {
        let ctx = FieldCtx::of_order(q)?;
        for d in 0..=scale.ensemble_dmax {
            for mu in MultiIndex::all_up_to_norm(d) {
                let r = equal_expectation_check(d, &ctx, &mu, scale.caps.poly, scale.threads)?;
                t.check(r.all_equal(), || {
                    format!(
                        "q={q} d={d} mu={mu}: ensemble {} vs S_d {} vs necklace {}",
                        r.ensemble_mean, r.symmetric_group, r.necklace_form
                    )
                });
            }
        }
    }
    Ok(t)
}

fn formula_vs_oracle(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for &(q, dmax) in &scale.formula_fields {
        let ctx = FieldCtx::of_order(q)?;
        for d in 0..=dmax {
            for f in enumerate_monic(d, &ctx) {
                for mu in MultiIndex::all_up_to_norm(d) {
                    let formula = chi_formula(&f, &mu)?;
                    let oracle = chi_oracle(&f, &CharPoly::binom(mu.clone()), scale.caps.brute_force)?;
                    t.check(formula == oracle, || format!("q={q} f={f} mu={mu}: {formula} != {oracle}"));
                    if q == 2 && mu.norm() <= scale.symbolic_norm_max {
                        let symbolic = chi_formula_symbolic(&f, &mu, scale.caps.terms)?;
                        t.check(symbolic == formula, || {
                            format!("q={q} f={f} mu={mu}: symbolic {symbolic} != {formula}")
                        });
                    }
                }
                for k in 1..=d {
                    let xk = xk_of_f(&f, k)?;
                    let oracle = chi_oracle(&f, &CharPoly::x(k), scale.caps.brute_force)?;
                    t.check(xk == oracle, || format!("q={q} f={f} X_{k}: {xk} != {oracle}"));
                }
            }
        }
    }
    Ok(t)
}

fn young_cosets(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for spec in CosetSpec::enumerate_all(scale.coset_max_n, scale.coset_h_cap) {
        let n = spec.size();
        let hist = coset_histogram(&spec, scale.caps.brute_force, scale.threads)?;
        for mu in MultiIndex::all_up_to_norm(n) {
            let closed = expected_binom_on_coset(&spec, &mu);
            let brute = histogram_average(&hist, &mu);
            t.check(closed == brute, || format!("spec {spec} mu={mu}: {closed} != {brute}"));
        }
        let mut total = BigUint::zero();
        for mu in MultiIndex::all_of_norm(n) {
            match count_cycle_type_in_coset(&spec, &mu) {
                Ok(count) => {
                    let brute = BigUint::from(hist.get(&mu).copied().unwrap_or(0));
                    t.check(count == brute, || format!("spec {spec} type {mu}: count {count} != {brute}"));
                    total += count;
                }
                Err(e) => t.check(false, || format!("spec {spec} type {mu}: {e}")),
            }
        }
        let order = spec.h_order();
        t.check(total == order, || format!("spec {spec}: counts sum to {total}, |H| = {order}"));
        for k in 1..=n {
            let direct = expected_k_cycles(&spec, k)?;
            let general = expected_binom_on_coset(&spec, &MultiIndex::single(k));
            t.check(direct == general, || format!("spec {spec} k={k}: {direct} != {general}"));
        }
    }
    Ok(t)
}

fn symmetric_group(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for r in 0..=scale.sn_rmax {
        let hist = sn_cycle_type_histogram(r, scale.caps.brute_force)?;
        for mu in MultiIndex::all_up_to_norm(r) {
            let closed = sn_expectation_closed(&mu, r);
            let brute = histogram_average(&hist, &mu);
            t.check(closed == brute, || format!("r={r} mu={mu}: {closed} != {brute}"));
        }
        // Characters of norm above r vanish on S_r.
        for mu in MultiIndex::all_of_norm(r + 1) {
            let brute = histogram_average(&hist, &mu);
            t.check(brute.is_zero(), || format!("r={r} mu={mu}: {brute} != 0"));
        }
    }
    Ok(t)
}

fn block_cycles(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for spec in CosetSpec::enumerate_all(scale.projection_max_n, scale.coset_h_cap) {
        let n = spec.size();
        let order = spec.h_order_within(scale.caps.brute_force)?;
        let tau = spec.tau();
        let mut flat_types: BTreeMap<MultiIndex, u64> = BTreeMap::new();
        let mut walked_types: BTreeMap<MultiIndex, u64> = BTreeMap::new();
        let mut fibers: BTreeMap<Vec<Vec<usize>>, u64> = BTreeMap::new();
        for idx in 0..order {
            let h = spec.h_element(idx);
            let ct = tau.compose(&spec.embed(&h)?)?.cycle_type();
            *walked_types.entry(spec.tau_h_cycle_type(&h)?).or_default() += 1;
            let projections = (0..spec.blocks().len())
                .map(|i| spec.m_projection(&h, i))
                .collect::<Result<Vec<_>>>()?;
            for r in 1..=n {
                let sum: usize = spec
                    .blocks()
                    .iter()
                    .zip(&projections)
                    .filter(|(b, _)| r % b.d == 0)
                    .map(|(b, m)| m.cycle_type().get(r / b.d))
                    .sum();
                t.check(ct.get(r) == sum, || {
                    format!("spec {spec} h#{idx}: X_{r} = {} but projections give {sum}", ct.get(r))
                });
            }
            *flat_types.entry(ct).or_default() += 1;
            *fibers
                .entry(projections.iter().map(|m| m.images().to_vec()).collect())
                .or_default() += 1;
        }
        t.check(flat_types == walked_types, || format!("spec {spec}: cycle type multisets differ"));

        let image_size: u64 = spec
            .blocks()
            .iter()
            .map(|b| factorial_u64(b.r).expect("small rank"))
            .product();
        let fiber = order / image_size;
        t.check(fibers.len() as u64 == image_size, || {
            format!("spec {spec}: image has {} points, expected {image_size}", fibers.len())
        });
        for (point, &count) in &fibers {
            t.check(count == fiber && order % image_size == 0, || {
                format!("spec {spec}: fiber over {point:?} has {count} points, expected {fiber}")
            });
        }
    }
    Ok(t)
}

fn series_identity(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for d in 1..=scale.gseries_dmax {
        for r in 0..=scale.gseries_rmax {
            let ok = g_series_identity_check(d, r, scale.gseries_tdeg, scale.caps.brute_force)?;
            t.check(ok, || format!("d={d} r={r} t-degree {}: sides differ", scale.gseries_tdeg));
        }
    }
    Ok(t)
}

fn symbol_averages(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    for &q in &scale.epsilon_qs {
        let ctx = FieldCtx::of_order(q)?;
        for n in 0..=scale.epsilon_nmax {
            for deg in 0..=n + 1 {
                for g in enumerate_monic(deg, &ctx) {
                    let sym = SymbolSum::eps(&g)?;
                    let closed = expectation_epsilon(&g, n)?;
                    let brute = expectation_oracle(&sym, n, scale.caps.poly)?;
                    let flattened = sym.lambda(n).phi_value();
                    t.check(closed == brute && flattened == brute, || {
                        format!("q={q} N={n} g={g}: closed {closed}, lambda {flattened}, average {brute}")
                    });
                }
            }
        }
    }
    Ok(t)
}

fn specific_values(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    let half = Rational::new(1.into(), 2.into());
    let one = Rational::from_integer(1.into());
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let ctx = FieldCtx::of_order(q)?;
        let t2 = Poly::parse("t^2", &ctx)?;
        for (k, expect) in [(2usize, &half), (1, &one)] {
            let via_formula = xk_of_f(&t2, k)?;
            let via_chi = chi_formula(&t2, &MultiIndex::single(k))?;
            let via_oracle = chi_oracle(&t2, &CharPoly::x(k), scale.caps.brute_force)?;
            t.check(
                &via_formula == expect && &via_chi == expect && &via_oracle == expect,
                || format!("q={q}: X_{k}(t^2) gave {via_formula}, {via_chi}, {via_oracle}"),
            );
        }
    }
    for &(q, dmax) in &scale.formula_fields {
        let ctx = FieldCtx::of_order(q)?;
        for d in 0..=dmax {
            for f in enumerate_monic(d, &ctx) {
                if !factor(&f)?.is_squarefree() {
                    continue;
                }
                for mu in MultiIndex::all_up_to_norm(d) {
                    let chi = chi_formula(&f, &mu)?;
                    let choices = squarefree_choices(&f, &mu)?;
                    t.check(chi == choices && chi.is_integer(), || {
                        format!("q={q} f={f} mu={mu}: {chi} vs {choices} choices")
                    });
                }
            }
        }
    }
    Ok(t)
}

fn stabilization(scale: &Scale) -> Result<Tally> {
    let mut t = Tally::new();
    let dmax = scale.stabilization_dmax;
    let mus = MultiIndex::all_up_to_norm(dmax);
    for &q in &scale.stabilization_qs {
        let ctx = FieldCtx::of_order(q)?;
        let means: Vec<Vec<Rational>> = (0..=dmax)
            .map(|d| {
                let sums = ensemble_binom_sums(d, &ctx, &mus, EnsembleFilter::All, scale.caps.poly, scale.threads)?;
                Ok(sums.sums.into_iter().map(|s| s / rational_from(sums.total)).collect())
            })
            .collect::<Result<_>>()?;
        for (j, mu) in mus.iter().enumerate() {
            let base = &means[mu.norm()][j];
            for (d, row) in means.iter().enumerate().skip(mu.norm() + 1) {
                t.check(&row[j] == base, || {
                    format!("q={q} mu={mu}: mean {} at d={d} differs from {base} at d={}", row[j], mu.norm())
                });
            }
            // The stable value is the symmetric group expectation.
            let expect = sn_expectation_closed(mu, mu.norm());
            t.check(base == &expect, || format!("q={q} mu={mu}: stable value {base} != {expect}"));
        }
    }
    Ok(t)
}
