use ordrep::experiments::*;
use ordrep::prover::{prove, ConstraintMode, ProveLimits};
use ordrep::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// inverse normal distribution at 0.995, from a 50-digit evaluation
const Q995: f64 = 2.5758293035489004;

fn bound(s: f64, trials: u64, beta: f64) -> f64 {
    confidence_lower_bound(ConfidenceQuery { successes: s, trials, beta }).unwrap()
}

#[test]
fn sampling_is_deterministic_with_distinct_distances() {
    let a = sample_config(5, SampleDomain::UnitSquare, Metric::Euclidean, 7).unwrap();
    assert_eq!(a, sample_config(5, SampleDomain::UnitSquare, Metric::Euclidean, 7).unwrap());
    assert_ne!(a, sample_config(5, SampleDomain::UnitSquare, Metric::Euclidean, 8).unwrap());
    assert!(EdgeOrder::from_config(&a).is_ok());
    assert!(a.coords().iter().all(|&v| (0.0..1.0).contains(&v)));
}

#[test]
fn hundred_dimensional_cube() {
    let c = sample_config(5, SampleDomain::UnitCube(100), Metric::Euclidean, 1).unwrap();
    assert_eq!((c.n(), c.dim()), (5, 100));
    assert!(EdgeOrder::from_config(&c).is_ok());
}

#[test]
fn lehmer_ranks_are_a_bijection() {
    let mut seen = vec![false; 720];
    for r in 0..720 {
        let o = order_unrank(4, r);
        assert_eq!(order_rank(&o), r);
        seen[r as usize] = true;
    }
    assert!(seen.iter().all(|&s| s));
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..200 {
        let o = EdgeOrder::random(5, &mut rng);
        assert_eq!(order_unrank(5, order_rank(&o)), o);
    }
}

#[test]
fn coverage_store_bookkeeping() {
    let mut a = CoverageStore::new(4).unwrap();
    assert_eq!(a.total(), 720);
    assert!(a.insert_rank(3));
    assert!(!a.insert_rank(3));
    let mut b = CoverageStore::new(4).unwrap();
    b.insert_rank(3);
    b.insert_rank(700);
    a.merge(&b);
    assert_eq!(a.ranks().collect::<Vec<_>>(), vec![3, 700]);
    assert_eq!(a.distinct(), 2);
    assert!(a.contains(&order_unrank(4, 700)));
    assert!(CoverageStore::new(6).is_err());
}

#[test]
fn one_trial_finds_one_order() {
    let r = coverage_experiment(5, Metric::Euclidean, RepresentationKind::Order, 1, 3).unwrap();
    assert_eq!(r.distinct_orders_found, 1);
    assert_eq!(r.total_orders, 3_628_800);
    assert_eq!(r.fraction_of_factorial(), 1.0 / 3_628_800.0);
}

#[test]
fn four_points_cover_every_order() {
    let r = coverage_experiment(4, Metric::Euclidean, RepresentationKind::Order, 200_000, 4).unwrap();
    assert!(r.fraction_of_factorial() > 0.99, "{}", r.fraction_of_factorial());
}

#[test]
fn manhattan_covers_more_than_euclidean() {
    let run = |m| coverage_experiment(5, m, RepresentationKind::Order, 2_000_000, 5).unwrap().distinct_orders_found;
    let (l2, l1) = (run(Metric::Euclidean), run(Metric::Manhattan));
    assert!(l1 > l2, "{l1} vs {l2}");
}

#[test]
fn weaker_kinds_cover_more() {
    use RepresentationKind::*;
    let found = |k| coverage_experiment(5, Metric::Euclidean, k, 20_000, 6).unwrap().distinct_orders_found;
    let order = found(Order);
    let local = found(LocalOrder);
    let extremal = found(ExtremalNeighbours);
    assert!(order < local && local < extremal);
    assert!(extremal <= found(Nearest).min(found(Farthest)));
    assert!(found(FirstAndSecondNearest) <= found(TwoNearestSet));
}

#[test]
fn coverage_grows_with_trials() {
    let mut last = 0;
    for trials in [1u64, 10, 100, 1000, 10_000] {
        let r = coverage_experiment(5, Metric::Euclidean, RepresentationKind::ExtremalNeighbours, trials, 7).unwrap();
        assert!(r.distinct_orders_found >= last);
        last = r.distinct_orders_found;
    }
}

#[test]
fn structure_keys_match_representation_checks() {
    use RepresentationKind::*;
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..300 {
        let a = EdgeOrder::random(5, &mut rng);
        let c = sample_config(5, SampleDomain::UnitSquare, Metric::Euclidean, rand::Rng::gen(&mut rng)).unwrap();
        let b = EdgeOrder::from_config(&c).unwrap();
        let space = MetricSpace::from_order(&a);
        for kind in [Order, LocalOrder, ExtremalNeighbours, Nearest, Farthest, TwoNearestSet, FirstAndSecondNearest] {
            let same = structure_key(&a, kind) == structure_key(&b, kind);
            assert_eq!(check_representation(&space, &c, kind).unwrap(), same, "{kind:?}");
        }
    }
}

#[test]
fn quantile_matches_the_reference_value() {
    assert!((normal_quantile(0.995).unwrap() - Q995).abs() < 1e-8);
    assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
    assert!(normal_quantile(0.0).is_err() && normal_quantile(1.0).is_err());
}

#[test]
fn reference_confidence_bounds() {
    let b = bound(795.0, 10_000, 0.995);
    assert!((0.9270..=0.9275).contains(&(1.0 - b)), "{}", 1.0 - b);
    let b = bound(4156.0, 10_000, 0.995);
    assert!((0.596..=0.600).contains(&(1.0 - b)), "{}", 1.0 - b);
    assert_eq!(bound(10.0, 10, 0.5), 1.0);
}

#[test]
fn confidence_rejects_bad_input() {
    let q = |s, trials, beta| confidence_lower_bound(ConfidenceQuery { successes: s, trials, beta });
    assert!(q(1.0, 0, 0.9).is_err());
    assert!(q(11.0, 10, 0.9).is_err());
    assert!(q(-1.0, 10, 0.9).is_err());
    assert!(q(1.0, 10, 1.0).is_err());
    assert!(q(1.0, 10, 0.3).is_err());
}

#[test]
fn svg_lists_every_point_and_arrow() {
    let c = sample_config(4, SampleDomain::UnitSquare, Metric::Euclidean, 2).unwrap();
    let nn = neighbours::config_neighbours(&c, neighbours::Which::Nearest);
    let svg = render_svg(&c, Some(&nn), None).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 4);
    assert_eq!(svg.matches("<line").count(), 4);
    let cube = sample_config(4, SampleDomain::UnitCube(3), Metric::Euclidean, 2).unwrap();
    assert!(render_svg(&cube, None, None).is_err());
}

#[test]
fn sampled_orders_are_never_refuted() {
    let r = coverage_experiment(5, Metric::Euclidean, RepresentationKind::Order, 1500, 8).unwrap();
    for order in r.sampled.orders() {
        assert!(!prove(&order, ConstraintMode::FullOrder, ProveLimits::default()).unwrap().is_refuted());
    }
}

proptest! {
    #[test]
    fn quantile_inverts_the_distribution(beta in 0.001f64..0.999) {
        prop_assert!((normal_cdf(normal_quantile(beta).unwrap()) - beta).abs() < 1e-8);
    }

    #[test]
    fn bound_sits_below_the_point_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0, beta in 0.5001f64..0.9999) {
        let s = (frac * trials as f64).floor();
        let b = bound(s, trials, beta);
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(b <= (s + 0.5) / trials as f64);
    }

    #[test]
    fn coverage_is_reproducible(seed in any::<u64>()) {
        let a = coverage_experiment(4, Metric::Manhattan, RepresentationKind::LocalOrder, 50, seed).unwrap();
        let b = coverage_experiment(4, Metric::Manhattan, RepresentationKind::LocalOrder, 50, seed).unwrap();
        prop_assert_eq!(a.distinct_orders_found, b.distinct_orders_found);
        prop_assert_eq!(a.sampled.ranks().collect::<Vec<_>>(), b.sampled.ranks().collect::<Vec<_>>());
    }
}
