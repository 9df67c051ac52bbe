use num_bigint::BigInt;
use proptest::prelude::*;

use pshmass::approximation::{approx_mass, counterexample_report, e2_of_lambda, multiplier_order, true_mass, PshFamily};
use pshmass::cantor::{build_level, cantor_cdf, CantorParams};
use pshmass::intersection::{full_mass_defect, mass_via_recursion, residual_mass, Geometry, IntersectionData};
use pshmass::monomial::{minimalize, ExponentVector, MonomialIdeal};
use pshmass::newton::{covolume_count_in_box, newton_membership, newton_threshold};
use pshmass::potential::{potential, set_distance, QuadratureConfig};
use pshmass::sphere::{green, mobius_invariance_gap, SpherePoint};
use pshmass::{BigRational, Dyadic, Exact};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::from_frac(n, d)
}

/// A primary monomial ideal: pure powers on every axis plus a few mixed
/// generators.
fn primary_ideal(max_n: usize) -> impl Strategy<Value = MonomialIdeal> {
    (2..=max_n).prop_flat_map(|n| {
        (prop::collection::vec(1u32..=6, n), prop::collection::vec(prop::collection::vec(0u32..=5, n), 0..=4)).prop_map(
            move |(powers, mixed)| {
                let mut gens: Vec<ExponentVector> = (0..n)
                    .map(|i| {
                        let mut e = vec![0; n];
                        e[i] = powers[i];
                        ExponentVector(e)
                    })
                    .collect();
                gens.extend(mixed.into_iter().map(ExponentVector));
                MonomialIdeal::new(n, gens).unwrap()
            },
        )
    })
}

/// `(J, I)` with `I = J·K ⊆ J`, both primary.
fn nested_pair() -> impl Strategy<Value = (MonomialIdeal, MonomialIdeal)> {
    (primary_ideal(3), primary_ideal(3)).prop_filter_map("same dimension", |(j, k)| {
        let i = j.product(&k).ok()?;
        Some((j, i))
    })
}

fn rational_point(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((0i64..=48, 1i64..=8), n).prop_map(|v| v.into_iter().map(|(a, b)| q(a, b)).collect())
}

fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Trivial), Just(Geometry::Hyperplane), Just(Geometry::Point)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_monotone(a in 2.2f64..3.5, k in 1usize..=6, x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let params = CantorParams::with_default_depth(a).unwrap();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(cantor_cdf(&params, lo, k).unwrap() <= cantor_cdf(&params, hi, k).unwrap());
    }

    #[test]
    fn cdf_increment_per_interval(a in 2.2f64..3.5, k in 1usize..=6, pick in any::<prop::sample::Index>()) {
        let params = CantorParams::with_default_depth(a).unwrap();
        // deeper intervals collapse to single floats
        let k = (1..=k).rev().find(|&j| params.log_length(j) > -20.0).unwrap_or(1);
        let approx = build_level(&params, k).unwrap();
        let iv = &approx.intervals[pick.index(approx.intervals.len())];
        let hi = cantor_cdf(&params, iv.right, k).unwrap();
        prop_assert_eq!(hi, cantor_cdf(&params, iv.left, k).unwrap() + Dyadic::unit(k as u32));
    }

    #[test]
    fn intervals_nest(a in 2.2f64..3.5, k in 0usize..=5) {
        let params = CantorParams::with_default_depth(a).unwrap();
        let coarse = build_level(&params, k).unwrap();
        let fine = build_level(&params, k + 1).unwrap();
        for (i, iv) in fine.intervals.iter().enumerate() {
            let parent = &coarse.intervals[i / 2];
            prop_assert!(parent.contains_interval(iv));
            prop_assert!((iv.log_length - params.log_length(k + 1)).abs() <= 1e-9 * params.log_length(k + 1).abs());
            // another level-k interval may contain it only when f64 cannot
            // separate the two
            for (j, other) in coarse.intervals.iter().enumerate() {
                if j != i / 2 && other.contains_interval(iv) {
                    prop_assert!(other.left == parent.left || other.right == parent.right);
                }
            }
        }
    }

    #[test]
    fn minimalization_is_idempotent(gens in prop::collection::vec(prop::collection::vec(0u32..=6, 3), 1..=10)) {
        let once = minimalize(gens.into_iter().map(ExponentVector).collect());
        let twice = minimalize(once.clone());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn staircase_implies_newton(ideal in primary_ideal(3), v in prop::collection::vec(0u32..=8, 3)) {
        let v = ExponentVector(v[..ideal.n()].to_vec());
        if ideal.contains(&v) {
            let x: Vec<Q> = v.0.iter().map(|&e| Q::from_int(e as i64)).collect();
            prop_assert!(newton_membership(&ideal, &x).unwrap());
        }
    }

    #[test]
    fn newton_membership_is_upward_closed(ideal in primary_ideal(3), x in rational_point(3), dy in rational_point(3)) {
        let n = ideal.n();
        let x = &x[..n];
        let y: Vec<Q> = x.iter().zip(&dy).map(|(a, b)| a.clone() + b.clone()).collect();
        if newton_membership(&ideal, x).unwrap() {
            prop_assert!(newton_membership(&ideal, &y).unwrap());
        }
    }

    #[test]
    fn threshold_matches_membership(ideal in primary_ideal(3), prefix in rational_point(2)) {
        let n = ideal.n();
        let prefix = prefix[..n - 1].to_vec();
        let t = newton_threshold(&ideal, &prefix).unwrap();
        let mut at = prefix.clone();
        at.push(t.clone());
        prop_assert!(newton_membership(&ideal, &at).unwrap());
        if t > Q::from_int(0) {
            let eps = q(1, 1000).min(t.clone());
            *at.last_mut().unwrap() = t - eps;
            prop_assert!(!newton_membership(&ideal, &at).unwrap());
        }
    }

    #[test]
    fn inclusion_is_monotone((j, i) in nested_pair()) {
        prop_assert!(i.generators().iter().all(|g| j.contains(g)));
        prop_assert!(i.colength().unwrap() >= j.colength().unwrap());
        let b = i.pure_power_degrees().unwrap().into_iter().max().unwrap();
        let ci = covolume_count_in_box::<Q>(&i, 16, b).unwrap();
        let cj = covolume_count_in_box::<Q>(&j, 16, b).unwrap();
        prop_assert!(ci.covolume >= cj.covolume);
    }

    #[test]
    fn recursion_agrees(g in geometry(), n in 2usize..=5, num in 0i64..=12, den in 1i64..=12, mult in 1u64..=3) {
        prop_assume!(num <= den);
        let data = IntersectionData::new(g, n, q(num, den)).unwrap();
        let d = den as u64 * mult;
        prop_assert_eq!(mass_via_recursion(&data, d).unwrap(), residual_mass(&data));
    }

    #[test]
    fn mass_is_monotone_in_c(hyper in any::<bool>(), n in 2usize..=6) {
        let g = if hyper { Geometry::Hyperplane } else { Geometry::Point };
        let masses: Vec<Q> = (0..=24).map(|i| residual_mass(&IntersectionData::new(g, n, q(i, 24)).unwrap())).collect();
        prop_assert_eq!(&masses[0], &Q::from_int(1));
        prop_assert!(masses.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn defect_below_excess(g in geometry(), n in 2usize..=6, num in 0i64..=16) {
        let data = IntersectionData::new(g, n, q(num, 16)).unwrap();
        prop_assert!(full_mass_defect(&data).delta <= residual_mass(&data) - Q::from_int(1));
    }

    #[test]
    fn custom_tables_recurse(n in 2usize..=5, iota in prop::collection::vec((0i64..=9, 1i64..=9), 4), num in 0i64..=6) {
        let iota: Vec<Q> = iota[..n - 1].iter().map(|&(a, b)| q(a, b)).collect();
        let data = IntersectionData::custom(n, q(num, 6), iota).unwrap();
        prop_assert_eq!(mass_via_recursion(&data, 6).unwrap(), residual_mass(&data));
    }

    #[test]
    fn green_below_planar_log(x1 in -5.0f64..5.0, y1 in -5.0f64..5.0, x2 in -5.0f64..5.0, y2 in -5.0f64..5.0) {
        let (z, w) = (SpherePoint::new(x1, y1), SpherePoint::new(x2, y2));
        let planar = (x1 - x2).powi(2) + (y1 - y2).powi(2);
        prop_assume!(planar > 0.0);
        prop_assert!(-2.0 * std::f64::consts::PI * green(z, w) <= planar.ln() + 1e-12);
    }

    #[test]
    fn mobius_invariance(x1 in -3.0f64..3.0, y1 in -3.0f64..3.0, x2 in -3.0f64..3.0, y2 in -3.0f64..3.0) {
        prop_assert!(mobius_invariance_gap(SpherePoint::new(x1, y1), SpherePoint::new(x2, y2)) < 1e-12);
    }

    #[test]
    fn quadrature_refinement_is_stable(x in -2.0f64..3.0, y in -2.0f64..2.0, k in 2usize..=7) {
        let params = CantorParams::with_default_depth(3.0).unwrap();
        let z = SpherePoint::new(x, y);
        let c8 = QuadratureConfig::with_nodes(k, 8).unwrap();
        prop_assume!(set_distance(&z, &build_level(&params, k).unwrap()) > 0.1);
        let p8 = potential(&z, &params, &c8).unwrap().value();
        let p16 = potential(&z, &params, &QuadratureConfig::with_nodes(k, 16).unwrap()).unwrap().value();
        prop_assert!((p8 - p16).abs() < 1e-6, "{} vs {}", p8, p16);
    }

    #[test]
    fn approx_mass_increases_below_one(n in 2usize..=5, m in 1u64..=200) {
        let a: Q = approx_mass(m, n).unwrap();
        let b: Q = approx_mass(m + 1, n).unwrap();
        prop_assert!(a <= b && b < Q::from_int(1));
    }

    #[test]
    fn multiplier_order_jumps_at_integers(num in 1i64..=400, den in 1i64..=7) {
        let lambda = q(num, den);
        let order = multiplier_order(&lambda).unwrap();
        let next = multiplier_order(&(lambda.clone() + q(1, 64))).unwrap();
        prop_assert!(next >= order);
        let crosses = (lambda.clone() + q(1, 64)).ceil_i64() != lambda.ceil_i64();
        prop_assert_eq!(next > order, crosses);
    }
}

#[test]
fn e2_matches_approximants_at_integers() {
    for m in 1..=50u64 {
        let lambda = Q::from_int(m as i64);
        assert_eq!(e2_of_lambda(&lambda).unwrap(), approx_mass::<Q>(m, 2).unwrap());
    }
}

#[test]
fn high_dimensional_gap() {
    for n in 2..=5usize {
        for gamma in 2..=5u64 {
            let family = PshFamily::<Q>::cantor_high_dim(n, gamma).unwrap();
            let r = counterexample_report(&family, 50).unwrap();
            let expected = Q::new(BigInt::from(1), BigInt::from(gamma).pow(n as u32 - 1));
            assert_eq!(r.gap, expected, "n={n} gamma={gamma}");
            assert_eq!(true_mass(&family) - r.limit, expected);
        }
    }
}
