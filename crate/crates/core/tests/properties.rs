use echelons::division::{audit, echelon_divide};
use echelons::io::{parse_series, series_json};
use echelons::oracle::oracle_membership;
use echelons::order::OrderKind;
use echelons::series::{default_var_names, exponents_up_to, rational};
use echelons::stdbasis::{enlarge, enlarge_reduced, Target};
use echelons::verify::random_instance;
use echelons::Series;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NVARS: usize = 3;

fn coefficient() -> impl Strategy<Value = echelons::series::Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rational(n, d))
}

/// A series in three variables: up to eight terms of degree at most `prec`.
fn series(prec: u32) -> impl Strategy<Value = Series> {
    let monomials = exponents_up_to(NVARS, prec);
    let count = monomials.len();
    prop::collection::vec((0..count, coefficient()), 0..8).prop_map(move |picked| {
        let mut out = Series::zero(NVARS, prec);
        for (i, c) in picked {
            let m = Series::monomial(NVARS, monomials[i].clone(), c, prec);
            out = out.add(&m).unwrap();
        }
        out
    })
}

fn any_series() -> impl Strategy<Value = Series> {
    (0u32..=5).prop_flat_map(series)
}

/// The smallest precision among the operands.
fn common(values: &[&Series]) -> u32 {
    values.iter().map(|s| s.prec()).min().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_commutes_and_associates(a in any_series(), b in any_series(), c in any_series()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        let left = a.add(&b).unwrap().add(&c).unwrap();
        let right = a.add(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_is_a_ring_product(a in any_series(), b in any_series(), c in any_series()) {
        let p = common(&[&a, &b, &c]);
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.truncate(p), b.mul(&a).unwrap().truncate(p));
        let assoc_l = ab.mul(&c).unwrap().truncate(p);
        let assoc_r = a.mul(&b.mul(&c).unwrap()).unwrap().truncate(p);
        prop_assert_eq!(assoc_l, assoc_r);
        let dist_l = a.mul(&b.add(&c).unwrap()).unwrap().truncate(p);
        let dist_r = ab.add(&a.mul(&c).unwrap()).unwrap().truncate(p);
        prop_assert_eq!(dist_l, dist_r);
    }

    #[test]
    fn results_stay_well_formed(a in any_series(), b in any_series()) {
        for s in [a.add(&b).unwrap(), a.sub(&b).unwrap(), a.mul(&b).unwrap(), a.neg(), a.scale(&rational(-2, 3))] {
            prop_assert!(s.is_well_formed());
        }
    }

    /// Polynomials truncated at a low precision multiply to something that
    /// matches the exact product up to the reported precision.
    #[test]
    fn product_precision_is_sound(a in series(6), b in series(6), pa in 0u32..=6, pb in 0u32..=6) {
        let exact = a.mul_polynomial(&b, 12).unwrap();
        let approx = a.truncate(pa).mul(&b.truncate(pb)).unwrap();
        prop_assert_eq!(approx.clone(), exact.truncate(approx.prec()));
        let sum = a.truncate(pa).add(&b.truncate(pb)).unwrap();
        prop_assert_eq!(sum.clone(), a.add(&b).unwrap().truncate(sum.prec()));
    }

    #[test]
    fn json_round_trip_is_exact(a in any_series()) {
        let vars = default_var_names(NVARS);
        let text = series_json(&a, &vars);
        let parsed = parse_series(&text, "roundtrip").unwrap();
        prop_assert_eq!(&parsed.series, &a);
        prop_assert_eq!(series_json(&parsed.series, &parsed.vars), text);
    }

    #[test]
    fn division_satisfies_its_contract(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, f) = random_instance(&mut rng, None, 6);
        let r = echelon_divide(&f, &p, None).unwrap();
        prop_assert_eq!(audit(&r, &f, &p), Vec::<String>::new());
        // The remainder is already reduced.
        let again = echelon_divide(&r.remainder, &p, None).unwrap();
        prop_assert_eq!(&again.remainder, &r.remainder);
        prop_assert!(again.quotients.iter().all(Series::is_zero));
        prop_assert_eq!(echelon_divide(&f, &p, None).unwrap(), r);
    }

    /// A zero remainder is a certificate the oracle must accept, and the
    /// oracle's own solution must reproduce the input.
    #[test]
    fn oracle_agrees_with_division_and_checks_out(seed in any::<u64>(), degree in 0u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, f) = random_instance(&mut rng, None, 5);
        let r = echelon_divide(&f, &p, None).unwrap();
        let verdict = oracle_membership(&f, &p, degree).unwrap();
        if r.remainder.truncate(degree).is_zero() {
            prop_assert!(verdict.feasible);
        }
        if let Some(quotients) = verdict.solution {
            let mut total = Series::zero(p.nvars(), degree);
            for (q, g) in quotients.iter().zip(p.generators()) {
                prop_assert!(q.within_scope(g.scope()));
                total = total.add(&q.mul_polynomial(g.series(), degree).unwrap()).unwrap();
            }
            prop_assert_eq!(total, f.truncate(degree));
        }
    }

    /// Membership modulo a degree implies membership modulo every lower one.
    #[test]
    fn oracle_is_monotone_in_degree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, f) = random_instance(&mut rng, None, 5);
        let feasible: Vec<bool> = (0..=5).map(|d| oracle_membership(&f, &p, d).unwrap().feasible).collect();
        for d in 1..feasible.len() {
            prop_assert!(!feasible[d] || feasible[d - 1], "feasible at {} but not at {}", d, d - 1);
        }
    }

    /// Every element added by enlargement lies in the original echelon.
    /// Strict ascent of initial exponents is enforced inside enlargement
    /// (a violation is an error), so success also certifies it. Constant
    /// generators make the unreduced variant grow quickly, hence two rounds.
    #[test]
    fn enlargement_is_sound(seed in any::<u64>(), reduce in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, _) = random_instance(&mut rng, Some(OrderKind::Grlex), 5);
        let target = Target::DegreeCap(4);
        let st = if reduce { enlarge_reduced(&p, &target, 2) } else { enlarge(&p, &target, 2) }.unwrap();
        for g in st.generators[p.len()..].iter().take(12) {
            let d = g.series().prec().min(p.min_prec().unwrap());
            prop_assert!(oracle_membership(&g.series().truncate(d), &p, d).unwrap().feasible);
            prop_assert!(g.scope() <= p.nvars());
        }
    }
}
