use std::sync::Arc;

use num_traits::Zero;
use orbitstat::charpoly::{binom_eval, sn_expectation_closed};
use orbitstat::division_algebra::{expectation_oracle, SymbolSum};
use orbitstat::polynomial::{factor, is_irreducible};
use orbitstat::symmetric::Permutation;
use orbitstat::{CharPoly, CosetSpec, FieldCtx, FieldElement, MultiIndex, NilSeries, Poly, Rational};
use proptest::prelude::*;

fn field(q: u64) -> Arc<FieldCtx> {
    FieldCtx::of_order(q).unwrap()
}

fn any_field() -> impl Strategy<Value = Arc<FieldCtx>> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 25]).prop_map(field)
}

fn poly_in(ctx: Arc<FieldCtx>, max_len: usize) -> impl Strategy<Value = Poly> {
    let q = ctx.q();
    prop::collection::vec(0..q, 0..=max_len).prop_map(move |codes| Poly::from_codes(&ctx, codes))
}

fn field_and_polys(max_len: usize) -> impl Strategy<Value = (Poly, Poly)> {
    any_field().prop_flat_map(move |ctx| (poly_in(ctx.clone(), max_len), poly_in(ctx, max_len)))
}

fn multi_index(max_k: usize, max_count: usize) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec((1..=max_k, 0..=max_count), 0..4)
        .prop_map(|pairs| MultiIndex::new(pairs).unwrap())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn charpoly() -> impl Strategy<Value = CharPoly> {
    prop::collection::vec((multi_index(3, 2), small_rational()), 0..4).prop_map(|terms| {
        terms
            .into_iter()
            .fold(CharPoly::zero(), |acc, (mu, c)| acc.add(&CharPoly::term(mu, c)))
    })
}

fn symbol_sum(ctx: Arc<FieldCtx>, max_deg: usize) -> impl Strategy<Value = SymbolSum> {
    let q = ctx.q();
    prop::collection::vec(
        (prop::collection::vec(0..q, 0..=max_deg), small_rational()),
        0..4,
    )
    .prop_map(move |terms| {
        let mut acc = SymbolSum::zero(&ctx);
        for (mut codes, c) in terms {
            codes.push(1);
            let g = Poly::from_codes(&ctx, codes);
            acc = acc.add(&SymbolSum::term(&g, c).unwrap()).unwrap();
        }
        acc
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(ctx in any_field(), a in 0u32..25, b in 0u32..25, c in 0u32..25) {
        let q = ctx.q();
        let e = |x: u32| FieldElement::new(&ctx, &ctx_digits(&ctx, x % q)).unwrap();
        let (a, b, c) = (e(a), e(b), e(c));
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        if !a.is_zero() {
            prop_assert_eq!(a.div(&a).unwrap(), FieldElement::one(&ctx));
        }
    }

    #[test]
    fn poly_text_round_trip((f, _) in field_and_polys(8)) {
        let text = f.to_string();
        prop_assert_eq!(Poly::parse(&text, f.ctx()).unwrap(), f);
    }

    #[test]
    fn division_identity((a, b) in field_and_polys(9)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.divmod(&b).unwrap();
        prop_assert_eq!(q.mul(&b).unwrap().add(&r).unwrap(), a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }

    #[test]
    fn gcd_divides_both((a, b) in field_and_polys(7)) {
        let g = a.gcd(&b).unwrap();
        if a.is_zero() && b.is_zero() {
            prop_assert!(g.is_zero());
        } else {
            prop_assert!(g.is_monic());
            prop_assert!(g.divides(&a).unwrap() && g.divides(&b).unwrap());
        }
    }

    #[test]
    fn factorization_reconstructs((f, _) in field_and_polys(9)) {
        prop_assume!(!f.is_zero());
        let fac = factor(&f).unwrap();
        prop_assert_eq!(fac.expand(), f);
        for w in fac.factors.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
        for (g, r) in &fac.factors {
            prop_assert!(*r >= 1 && g.is_monic() && is_irreducible(g).unwrap());
        }
    }

    #[test]
    fn multi_index_text_round_trip(mu in multi_index(9, 4)) {
        prop_assert_eq!(mu.to_string().parse::<MultiIndex>().unwrap(), mu);
    }

    #[test]
    fn coset_spec_text_round_trip(blocks in prop::collection::vec((1usize..5, 1usize..4), 0..4)) {
        let spec = CosetSpec::new(
            blocks.into_iter().map(|(d, r)| orbitstat::Block { d, r }).collect()
        ).unwrap();
        prop_assert_eq!(spec.to_string().parse::<CosetSpec>().unwrap(), spec);
    }

    #[test]
    fn charpoly_product_is_pointwise(a in charpoly(), b in charpoly(), ct in multi_index(4, 4)) {
        let prod = a.mul(&b);
        prop_assert_eq!(prod.eval(&ct), a.eval(&ct) * b.eval(&ct));
    }

    #[test]
    fn charpoly_text_round_trip(a in charpoly()) {
        prop_assert_eq!(a.to_string().parse::<CharPoly>().unwrap(), a);
    }

    #[test]
    fn cycle_type_norm_and_conjugation(p in permutation(7), s in permutation(7)) {
        let ct = p.cycle_type();
        prop_assert_eq!(ct.norm(), 7);
        let conj = s.compose(&p).unwrap().compose(&s.inverse()).unwrap();
        prop_assert_eq!(conj.cycle_type(), ct);
    }

    #[test]
    fn binom_is_indicator_on_full_types(p in permutation(6)) {
        let ct = p.cycle_type();
        for mu in MultiIndex::all_of_norm(6) {
            let expect = if mu == ct { 1 } else { 0 };
            prop_assert_eq!(binom_eval(&mu, &ct), Rational::from_integer(expect.into()));
        }
    }

    #[test]
    fn lambda_is_a_ring_homomorphism(
        (a, b) in prop::sample::select(vec![2u64, 3]).prop_flat_map(|q| {
            let ctx = field(q);
            (symbol_sum(ctx.clone(), 3), symbol_sum(ctx, 3))
        }),
        n in 0usize..5,
    ) {
        let lhs = a.mul(&b).unwrap().lambda(n);
        let rhs = a.lambda(n).mul(&b.lambda(n)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn flattened_lambda_is_the_average(
        a in prop::sample::select(vec![2u64, 3]).prop_flat_map(|q| symbol_sum(field(q), 4)),
        n in 0usize..=4,
    ) {
        let flattened = a.lambda(n).phi_value();
        let average = expectation_oracle(&a, n, 1_000_000).unwrap();
        prop_assert_eq!(flattened, average);
    }

    #[test]
    fn nil_exp_is_additive(
        x in prop::collection::vec(small_rational(), 3),
        y in prop::collection::vec(small_rational(), 3),
    ) {
        let orders = vec![3, 4];
        let series = |c: &[Rational]| {
            let mut s = NilSeries::zero(orders.clone(), None);
            for (i, (e1, e2)) in [(1, 0), (0, 1), (1, 2)].into_iter().enumerate() {
                let m = NilSeries::monomial(orders.clone(), None, vec![e1, e2], MultiIndex::empty(), c[i].clone())
                    .unwrap();
                s = s.add(&m).unwrap();
            }
            s
        };
        let (a, b) = (series(&x), series(&y));
        prop_assert_eq!(
            a.add(&b).unwrap().exp().unwrap(),
            a.exp().unwrap().mul(&b.exp().unwrap()).unwrap()
        );
    }

    #[test]
    fn closed_expectation_vanishes_past_size(mu in multi_index(5, 3), r in 0usize..8) {
        let e = sn_expectation_closed(&mu, r);
        prop_assert_eq!(e.is_zero(), mu.norm() > r);
    }
}

fn ctx_digits(ctx: &FieldCtx, mut code: u32) -> Vec<u32> {
    let mut out = Vec::new();
    for _ in 0..ctx.e() {
        out.push(code % ctx.p());
        code /= ctx.p();
    }
    out
}
