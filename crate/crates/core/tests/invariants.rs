use std::sync::Arc;

use orbitstat::division_algebra::{SymbolSum, DEFAULT_TERM_LIMIT};
use orbitstat::frobenius_stats::{chi_formula, chi_formula_symbolic, chi_oracle, sigma_structure};
use orbitstat::polynomial::{count_irreducibles, enumerate_monic};
use orbitstat::symmetric::DEFAULT_BRUTE_FORCE_CAP;
use orbitstat::young_stats::expected_binom_on_coset;
use orbitstat::{CharPoly, FieldCtx, MultiIndex, Poly, Rational};

fn field(q: u64) -> Arc<FieldCtx> {
    FieldCtx::of_order(q).unwrap()
}

fn monic_up_to(ctx: &Arc<FieldCtx>, dmax: usize) -> Vec<Poly> {
    (0..=dmax).flat_map(|d| enumerate_monic(d, ctx)).collect()
}

#[test]
fn coprime_symbols_evaluate_multiplicatively() {
    let ctx = field(2);
    let symbols = monic_up_to(&ctx, 3);
    let targets = monic_up_to(&ctx, 6);
    for g in &symbols {
        for h in &symbols {
            if !g.gcd(h).unwrap().is_one() {
                continue;
            }
            let (eg, eh) = (SymbolSum::eps(g).unwrap(), SymbolSum::eps(h).unwrap());
            let egh = eg.mul(&eh).unwrap();
            for f in &targets {
                assert_eq!(
                    eg.evaluate(f).unwrap() * eh.evaluate(f).unwrap(),
                    egh.evaluate(f).unwrap(),
                    "g={g} h={h} f={f}"
                );
            }
        }
    }
}

#[test]
fn symbol_powers_vanish_past_the_degree() {
    for q in [2, 3] {
        let ctx = field(q);
        let symbols: Vec<Poly> = monic_up_to(&ctx, 2).into_iter().filter(|g| g.degree() > Some(0)).collect();
        for f in monic_up_to(&ctx, 4) {
            let deg = f.degree().unwrap();
            for g in &symbols {
                for m in deg + 1..=deg + 2 {
                    let sym = SymbolSum::eps(g).unwrap().pow(m as u32).unwrap();
                    assert_eq!(sym.evaluate(&f).unwrap(), Rational::from_integer(0.into()));
                }
            }
        }
    }
}

#[test]
fn polynomial_values_factor_through_cosets() {
    for (q, dmax) in [(2, 6), (3, 5), (4, 3), (5, 3)] {
        let ctx = field(q);
        for f in monic_up_to(&ctx, dmax) {
            let spec = sigma_structure(&f).unwrap().spec;
            for mu in MultiIndex::all_up_to_norm(dmax) {
                assert_eq!(
                    chi_formula(&f, &mu).unwrap(),
                    expected_binom_on_coset(&spec, &mu),
                    "q={q} f={f} mu={mu}"
                );
            }
        }
    }
}

#[test]
fn symbolic_expansion_agrees_with_factored_form() {
    let ctx = field(2);
    for f in monic_up_to(&ctx, 6) {
        for mu in MultiIndex::all_up_to_norm(4) {
            assert_eq!(
                chi_formula_symbolic(&f, &mu, DEFAULT_TERM_LIMIT).unwrap(),
                chi_formula(&f, &mu).unwrap(),
                "f={f} mu={mu}"
            );
        }
    }
}

#[test]
fn oracle_agrees_over_extension_fields() {
    for q in [4, 8, 9] {
        let ctx = field(q);
        for f in monic_up_to(&ctx, 3) {
            for mu in MultiIndex::all_up_to_norm(3) {
                let oracle = chi_oracle(&f, &CharPoly::binom(mu.clone()), DEFAULT_BRUTE_FORCE_CAP).unwrap();
                assert_eq!(chi_formula(&f, &mu).unwrap(), oracle, "q={q} f={f} mu={mu}");
            }
        }
    }
}

#[test]
fn per_polynomial_values_of_x2_over_f2() {
    let ctx = field(2);
    let values: Vec<Rational> = enumerate_monic(2, &ctx)
        .map(|f| chi_formula(&f, &MultiIndex::single(2)).unwrap())
        .collect();
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    assert_eq!(values, [r(1, 2), r(1, 2), r(0, 1), r(1, 1)]);
}

#[test]
fn irreducible_cache_is_shared_safely() {
    let ctx = field(3);
    let counts: Vec<Vec<u64>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let ctx = &ctx;
                s.spawn(move || (1..=9).rev().map(|d| count_irreducibles(d, ctx).unwrap()).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let expect: Vec<u64> = vec![2184, 810, 312, 116, 48, 18, 8, 3, 3];
    for c in counts {
        assert_eq!(c, expect);
    }
}
