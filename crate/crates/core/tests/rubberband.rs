use num_rational::Ratio;
use ordrep::rubberband::*;
use ordrep::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_square(n: usize, rng: &mut ChaCha8Rng) -> PointConfig {
    let coords: Vec<f64> = (0..2 * n).map(|_| rng.gen()).collect();
    PointConfig::new(n, 2, coords, Metric::Euclidean).unwrap()
}

#[test]
fn success_means_the_order_is_represented() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut wins = 0;
    for t in 0..20 {
        let target = EdgeOrder::from_config(&unit_square(6, &mut rng)).unwrap();
        let params = RubberBandParams { seed: t, ..RubberBandParams::default() };
        let r = optimize(&target, &params, &Init::RandomUnitCube).unwrap();
        assert_eq!(r.accuracy_trace.len(), r.epochs_used + 1);
        assert!(r.epochs_used <= params.max_epochs);
        if r.success {
            wins += 1;
            let space = MetricSpace::from_order(&target);
            assert!(check_representation(&space, &r.config, RepresentationKind::Order).unwrap());
            assert_eq!(r.best_accuracy(), Ratio::from_integer(1));
        }
    }
    assert!(wins > 10, "{wins} of 20");
}

#[test]
fn warm_start_on_its_own_order_needs_no_epochs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let c = unit_square(8, &mut rng);
        let target = EdgeOrder::from_config(&c).unwrap();
        let r = optimize(&target, &RubberBandParams::default(), &Init::WarmStart(c.clone())).unwrap();
        assert!(r.success);
        assert_eq!(r.epochs_used, 0);
        assert_eq!(r.config, c);
    }
}

#[test]
fn random_orders_on_five_points_sometimes_fail() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut wins = 0;
    let runs = 60;
    for t in 0..runs {
        let target = EdgeOrder::random(5, &mut rng);
        let params = RubberBandParams { seed: t, max_epochs: 300, ..RubberBandParams::default() };
        if optimize(&target, &params, &Init::RandomUnitCube).unwrap().success {
            wins += 1;
        }
    }
    assert!(wins > 0 && wins < runs, "{wins} of {runs}");
}

#[test]
fn restarts_never_lose_accuracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let target = EdgeOrder::random(6, &mut rng);
    let params = RubberBandParams { seed: 5, max_epochs: 100, ..RubberBandParams::default() };
    let one = optimize(&target, &params, &Init::RandomUnitCube).unwrap();
    let many = optimize_restarts(&target, &params, &Init::RandomUnitCube, 4).unwrap();
    assert!(many.best_accuracy() >= one.best_accuracy());
}

#[test]
fn larger_recoveries_stretch_less() {
    // near-complete recoveries get closer to similar copies as n grows
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut spread = |n: usize| -> Option<f64> {
        let truth = unit_square(n, &mut rng);
        let target = EdgeOrder::from_config(&truth).unwrap();
        let params = RubberBandParams { fraction: 0.002, max_epochs: 5000, stall_epochs: 500, ..RubberBandParams::default() };
        let r = optimize(&target, &params, &Init::RandomUnitCube).unwrap();
        (r.best_accuracy() >= Ratio::new(999, 1000))
            .then(|| stretch_spread(&MetricSpace::from_config(&truth).unwrap(), &r.config).unwrap())
    };
    let small: Vec<f64> = (0..6).filter_map(|_| spread(8)).collect();
    let large: Vec<f64> = (0..3).filter_map(|_| spread(25)).collect();
    assert!(small.len() >= 3 && large.len() >= 2);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&large) < mean(&small), "{large:?} vs {small:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn optimisation_is_deterministic(n in 3usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = EdgeOrder::random(n, &mut rng);
        let params = RubberBandParams { seed, max_epochs: 40, ..RubberBandParams::default() };
        let a = optimize(&target, &params, &Init::RandomUnitCube).unwrap();
        let b = optimize(&target, &params, &Init::RandomUnitCube).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn an_epoch_depends_only_on_points_and_target(n in 3usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = unit_square(n, &mut rng);
        let target = EdgeOrder::random(n, &mut rng);
        let e1 = rubber_band_epoch(&c, &target, 0.1, ScanOrder::Lexicographic, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let e2 = rubber_band_epoch(&c, &target, 0.1, ScanOrder::Lexicographic, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        prop_assert_eq!(e1, e2);
    }
}
