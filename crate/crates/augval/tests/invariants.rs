//! Property-based invariants of the value group, the base field, polynomial
//! expansion, chain evaluation, and the key transforms.

use augval::catalog;
use augval::chain::AugStep;
use augval::field::{rat, BaseValuation, Rat};
use augval::limits::substitution_value;
use augval::mobius::{inv_transform, transport_chain, transport_key, MobiusMap};
use augval::poly::{phi_expand, Poly, RatFn};
use augval::value::Value;
use augval::Chain;

use proptest::prelude::*;

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=24).prop_map(|(n, d)| rat(n, d))
}

fn value_strategy() -> impl Strategy<Value = Value> {
    prop_oneof![
        8 => rat_strategy().prop_map(Value::finite),
        1 => Just(Value::Infinity),
    ]
}

fn poly_strategy(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat_strategy(), 0..max_len).prop_map(Poly::new)
}

fn monic_poly_strategy(degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat_strategy(), degree).prop_map(|mut coeffs| {
        coeffs.push(Rat::from_integer(1.into()));
        Poly::new(coeffs)
    })
}

proptest! {
    #[test]
    fn value_addition_commutes_and_associates(
        a in rat_strategy(), b in rat_strategy(), c in rat_strategy()
    ) {
        let (a, b, c) = (Value::finite(a), Value::finite(b), Value::finite(c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn infimum_splits_over_concatenation(
        xs in prop::collection::vec(value_strategy(), 0..6),
        ys in prop::collection::vec(value_strategy(), 0..6)
    ) {
        let mut all = xs.clone();
        all.extend(ys.clone());
        prop_assert_eq!(
            Value::inf(all),
            Value::inf(xs).min(Value::inf(ys))
        );
    }

    #[test]
    fn order_translates(a in value_strategy(), b in value_strategy(), c in value_strategy()) {
        if a <= b {
            prop_assert!(&a + &c <= &b + &c);
        }
    }

    #[test]
    fn base_valuation_is_multiplicative_and_ultrametric(
        a in rat_strategy(), b in rat_strategy()
    ) {
        let nu = BaseValuation::p_adic(2).unwrap();
        prop_assert_eq!(nu.value(&(&a * &b)), &nu.value(&a) + &nu.value(&b));
        let sum = nu.value(&(&a + &b));
        let min = nu.value(&a).min(nu.value(&b));
        prop_assert!(sum >= min);
        if nu.value(&a) != nu.value(&b) {
            prop_assert_eq!(sum, min);
        }
    }

    #[test]
    fn expansion_reconstructs_and_bounds_digits(
        f in poly_strategy(8),
        phi in prop_oneof![monic_poly_strategy(1), monic_poly_strategy(2), monic_poly_strategy(3)]
    ) {
        let e = phi_expand(&f, &phi).unwrap();
        prop_assert_eq!(e.assemble(), f.clone());
        let d = phi.degree().unwrap();
        for digit in &e.digits {
            prop_assert!(digit.degree().map_or(true, |dd| dd < d));
        }
        if let (Some(df), Some(_)) = (f.degree(), phi.degree()) {
            prop_assert!(e.digits.len() <= df / d + 1);
        }
        // canonical: a second run yields the same digits
        prop_assert_eq!(phi_expand(&f, &phi).unwrap().digits, e.digits);
    }

    #[test]
    fn chain_values_are_quotient_invariant(
        num in poly_strategy(5),
        den in poly_strategy(5),
        h in poly_strategy(4)
    ) {
        prop_assume!(!den.is_zero() && !h.is_zero());
        let fr = RatFn::new(num.clone(), den.clone()).unwrap();
        let scaled = RatFn::new(&num * &h, &den * &h).unwrap();
        for chain in catalog::valuation_chains() {
            prop_assert_eq!(
                chain.eval_ratfn(&fr).unwrap(),
                chain.eval_ratfn(&scaled).unwrap()
            );
        }
    }

    #[test]
    fn socle_value_is_infinite_exactly_on_multiples(
        f in poly_strategy(7)
    ) {
        let socle = catalog::socle_quadratic();
        let key = Poly::from_ints(&[2, 0, 1]);
        let divisible = f.divmod(&key).unwrap().1.is_zero();
        prop_assert_eq!(socle.eval(&f).unwrap().is_infinite(), divisible);
    }

    #[test]
    fn inversion_transform_is_a_degree_preserving_involution(
        phi in prop_oneof![
            monic_poly_strategy(1),
            monic_poly_strategy(2),
            monic_poly_strategy(4)
        ]
    ) {
        prop_assume!(!phi.coeff(0).eq(&Rat::from_integer(0.into())));
        let once = inv_transform(&phi).unwrap();
        prop_assert_eq!(once.degree(), phi.degree());
        prop_assert_eq!(inv_transform(&once).unwrap(), phi);
    }

    #[test]
    fn equivalence_is_an_equivalence_on_value_classes(
        f in poly_strategy(5), g in poly_strategy(5), h in poly_strategy(5)
    ) {
        prop_assume!(!f.is_zero() && !g.is_zero() && !h.is_zero());
        let chain = catalog::quadratic();
        // reflexive
        prop_assert!(chain.equivalent(&f, &f).unwrap());
        // symmetric
        prop_assert_eq!(
            chain.equivalent(&f, &g).unwrap(),
            chain.equivalent(&g, &f).unwrap()
        );
        // transitive
        if chain.equivalent(&f, &g).unwrap() && chain.equivalent(&g, &h).unwrap() {
            prop_assert!(chain.equivalent(&f, &h).unwrap());
        }
    }
}

#[test]
fn base_valuation_laws_hold_on_ten_thousand_pairs() {
    let nu = BaseValuation::p_adic(2).unwrap();
    for i in 0..10_000u64 {
        let mut rng = augval::sample::sample_rng(3, i);
        let a = augval::sample::random_rational(&mut rng, &nu);
        let b = augval::sample::random_rational(&mut rng, &nu);
        assert_eq!(nu.value(&(&a * &b)), &nu.value(&a) + &nu.value(&b));
        let sum = nu.value(&(&a + &b));
        let min = nu.value(&a).min(nu.value(&b));
        assert!(sum >= min);
        if nu.value(&a) != nu.value(&b) {
            assert_eq!(sum, min);
        }
    }
}

#[test]
fn reconstruction_holds_on_a_thousand_seeded_pairs() {
    let nu = BaseValuation::p_adic(2).unwrap();
    for i in 0..1000u64 {
        let mut rng = augval::sample::sample_rng(13, i);
        let f = augval::sample::random_poly(&mut rng, &nu, 8);
        let d = (i % 3 + 1) as usize;
        let phi = augval::sample::random_monic_poly(&mut rng, &nu, d, false);
        let e = phi_expand(&f, &phi).unwrap();
        assert_eq!(e.assemble(), f);
    }
}

#[test]
fn quotient_invariance_holds_on_a_thousand_seeded_triples() {
    let chain = catalog::quadratic();
    for i in 0..1000u64 {
        let mut rng = augval::sample::sample_rng(19, i);
        let num = augval::sample::random_poly(&mut rng, &chain.base, 4);
        let den = augval::sample::random_nonzero_poly(&mut rng, &chain.base, 4);
        let h = augval::sample::random_nonzero_poly(&mut rng, &chain.base, 3);
        let fr = RatFn::new(num.clone(), den.clone()).unwrap();
        let scaled = RatFn::new(&num * &h, &den * &h).unwrap();
        assert_eq!(
            chain.eval_ratfn(&fr).unwrap(),
            chain.eval_ratfn(&scaled).unwrap()
        );
    }
}

#[test]
fn truncation_values_never_decrease_and_stabilize_below_key_degree() {
    for chain in catalog::all_chains() {
        for i in 0..200u64 {
            let mut rng = augval::sample::sample_rng(17, i);
            let f = augval::sample::random_poly(&mut rng, &chain.base, 6);
            let mut prev: Option<Value> = None;
            for n in 1..=chain.steps.len() {
                let v = chain.truncated(n).eval(&f).unwrap();
                if let Some(p) = &prev {
                    assert!(*p <= v, "truncation decreased on {f}");
                }
                prev = Some(v);
            }
            // stability below the next key degree
            for n in 1..chain.steps.len() {
                let next_deg = chain.steps[n].phi.degree().unwrap();
                if f.degree().map_or(true, |d| d < next_deg) {
                    assert_eq!(
                        chain.truncated(n).eval(&f).unwrap(),
                        chain.eval(&f).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn member_values_never_decrease_along_the_geometric_family() {
    let fam = catalog::family_geometric();
    for i in 0..150u64 {
        let mut rng = augval::sample::sample_rng(29, i);
        let f = augval::sample::random_poly(&mut rng, &fam.prefix.base, 4);
        if f.is_zero() {
            continue;
        }
        let mut prev: Option<Value> = None;
        for t in 0..=12 {
            let v = fam.member_value(t, &f).unwrap();
            if let Some(p) = &prev {
                assert!(*p <= v, "member value decreased on {f} at t = {t}");
            }
            prev = Some(v);
        }
    }
}

#[test]
fn pseudo_limit_matches_the_substitution_oracle() {
    let aug = catalog::limit_pseudo();
    let minus_two = rat(-2, 1);
    for i in 0..300u64 {
        let mut rng = augval::sample::sample_rng(31, i);
        let f = augval::sample::random_poly(&mut rng, &aug.family.prefix.base, 5);
        assert_eq!(
            aug.eval(&f, 4).unwrap(),
            substitution_value(&aug.family.prefix.base, &f, &minus_two),
            "mismatch on {f}"
        );
    }
}

#[test]
fn representation_values_agree_with_canonical_expansion() {
    let aug = catalog::limit_pseudo();
    let key = aug.limit_key.clone();
    for i in 0..100u64 {
        let mut rng = augval::sample::sample_rng(37, i);
        // build a representation with oversized, non-divisible coefficients:
        // remainders plus a multiple of the key stay non-divisible as long
        // as the remainder is nonzero
        let mut terms = Vec::new();
        for j in 0..3usize {
            let digit = augval::sample::random_poly(&mut rng, &aug.family.prefix.base, 2);
            let (_, r) = digit.divmod(&key).unwrap();
            if r.is_zero() {
                continue;
            }
            terms.push((digit, j));
        }
        if terms.is_empty() {
            continue;
        }
        let assembled = aug.assemble_terms(&terms);
        assert_eq!(
            aug.eval_terms(&terms, 4).unwrap(),
            aug.eval(&assembled, 4).unwrap(),
            "representation disagreed on {assembled}"
        );
    }
}

#[test]
fn refinement_members_correspond_under_inversion() {
    let target = catalog::quadratic();
    let current = catalog::monomial_half();
    let inv = MobiusMap::inversion();
    let pool = vec![
        Poly::x(),
        Poly::from_ints(&[2, 1]),
        Poly::from_ints(&[2, 0, 1]),
        Poly::from_ints(&[1, 0, 1]),
        Poly::from_ints(&[-2, 0, 0, 1]),
    ];
    let target_y = transport_chain(&target, &inv).unwrap().transported;
    let current_y = transport_chain(&current, &inv).unwrap().transported;
    let word = inv.decompose();
    let pool_y: Vec<Poly> = pool
        .iter()
        .map(|p| transport_key(p, &word).unwrap())
        .collect();

    let report_x = augval::chain::refine_probe(&target, &current, &pool).unwrap();
    let report_y = augval::chain::refine_probe(&target_y, &current_y, &pool_y).unwrap();
    for (rx, ry) in report_x.rows.iter().zip(&report_y.rows) {
        assert_eq!(
            rx.member, ry.member,
            "membership flipped between {} and {}",
            rx.candidate, ry.candidate
        );
    }
    assert_eq!(report_x.minimal_degree, report_y.minimal_degree);
}

#[test]
fn transport_round_trip_preserves_values() {
    let chain = catalog::cubic();
    let m = MobiusMap::from_ints(1, 2, 1, 1).unwrap();
    let there = transport_chain(&chain, &m).unwrap();
    assert!(there.verdict.passed());
    let back = transport_chain(&there.transported, &m.inverse()).unwrap();
    for i in 0..500u64 {
        let mut rng = augval::sample::sample_rng(41, i);
        let fr = augval::sample::random_ratfn(&mut rng, &chain.base, 3);
        assert_eq!(
            chain.eval_ratfn(&fr).unwrap(),
            back.transported.eval_ratfn(&fr).unwrap()
        );
    }
}

#[test]
fn monomial_chain_matches_closed_form() {
    let chain = Chain::new(
        catalog::base2(),
        vec![AugStep::new(Poly::x(), Value::rat(1, 2))],
    )
    .unwrap();
    let nu = catalog::base2();
    for i in 0..500u64 {
        let mut rng = augval::sample::sample_rng(43, i);
        let f = augval::sample::random_poly(&mut rng, &nu, 7);
        let closed = Value::inf(
            f.coeffs()
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    let v = nu.value(a);
                    if j == 0 { v } else { &v + &Value::rat(1, 2).scaled(j) }
                }),
        );
        assert_eq!(chain.eval(&f).unwrap(), closed);
    }
}
