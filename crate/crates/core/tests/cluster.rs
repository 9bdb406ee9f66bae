use ordrep::accuracy::concordance_of_keys;
use ordrep::cluster::*;
use ordrep::space::{pairs, EdgeOrder, Metric, MetricSpace, PointConfig, TiePolicy};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_space(n: usize, rng: &mut ChaCha8Rng) -> MetricSpace {
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    MetricSpace::from_config(&PointConfig::from_points(&pts, Metric::Euclidean).unwrap()).unwrap()
}

/// Largest cluster width at every level, from the step log.
fn level_maxima(tree: &ClusterTree, line: &LineRepresentation) -> Vec<u64> {
    let n = tree.n();
    let mut width = vec![0u64; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut out = vec![0];
    for s in &line.steps {
        let (ca, cb) = (owner[s.a[0]], owner[s.b[0]]);
        width[ca] = s.width_a + s.delta + s.width_b;
        width[cb] = 0;
        for o in owner.iter_mut() {
            if *o == cb {
                *o = ca;
            }
        }
        out.push(*width.iter().max().unwrap());
    }
    out
}

#[test]
fn two_points() {
    let space = MetricSpace::new(&[vec![0.0, 1.0], vec![1.0, 0.0]], TiePolicy::Reject).unwrap();
    let tree = single_linkage(&space);
    let line = cluster_embed_line(&tree).unwrap();
    assert_eq!(line.coords, vec![0, 1]);
    assert!(verify_line(&tree, &line));
    let emb = line_embed_halving(&space, 0).unwrap();
    assert_eq!(emb.line.coords, vec![0, 1]);
    assert_eq!((emb.certificates[0].gamma, emb.certificates[0].gamma_prime), (0, 0));
    assert!(emb.certificates[0].orientation_holds());
}

#[test]
fn permuted_coordinates_break_the_three_point_tree() {
    let space = MetricSpace::new(
        &[vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]],
        TiePolicy::Reject,
    )
    .unwrap();
    let tree = single_linkage(&space);
    let line = cluster_embed_line(&tree).unwrap();
    assert_eq!(line.coords, vec![0, 1, 3]);
    let mut bad = line.clone();
    bad.coords = vec![0, 3, 1];
    assert!(!verify_line(&tree, &bad));
    // swapping the two members of the first cluster keeps the tree
    bad.coords = vec![1, 0, 3];
    assert!(verify_line(&tree, &bad));
}

#[test]
fn random_trees_are_represented_within_the_width_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let n = rng.gen_range(1..=12);
        let tree = ClusterTree::random(n, &mut rng);
        let line = cluster_embed_line(&tree).unwrap();
        assert!(line.width() <= width_bound(n).unwrap());
        assert!(verify_line(&tree, &line));
        assert!(forced_at_every_level(&tree, |x, y| line.gap(x, y)));
        let m = level_maxima(&tree, &line);
        for i in 2..m.len() {
            assert!(m[i] <= 2 * m[i - 1] + m[i - 2] + 1);
        }
    }
}

#[test]
fn cross_gaps_exceed_gaps_inside_each_join() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let tree = ClusterTree::random(n, &mut rng);
        let line = cluster_embed_line(&tree).unwrap();
        for s in &line.steps {
            let cross = s.a.iter().flat_map(|&x| s.b.iter().map(move |&y| (x, y)));
            let min_cross = cross.map(|(x, y)| line.gap(x, y)).fold(f64::INFINITY, f64::min);
            for part in [&s.a, &s.b] {
                for &z in part.iter() {
                    for &w in part.iter() {
                        assert!(line.gap(z, w) < min_cross);
                    }
                }
            }
        }
    }
}

#[test]
fn single_linkage_agrees_with_generic_agglomeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let space = random_space(rng.gen_range(2..=10), &mut rng);
        let fast = single_linkage(&space);
        let slow = agglomerate(space.n(), Linkage::Single, |x, y| space.d(x, y)).unwrap();
        assert_eq!(fast, slow);
    }
}

#[test]
fn tied_images_are_not_representations() {
    // all four points equally spaced in pairs: the first join is undetermined
    let tree = ClusterTree::new(
        4,
        vec![
            Merge { a: vec![0], b: vec![1] },
            Merge { a: vec![2], b: vec![3] },
            Merge { a: vec![0, 1], b: vec![2, 3] },
        ],
    )
    .unwrap();
    let line = LineRepresentation { coords: vec![0, 1, 5, 6], steps: vec![] };
    assert!(!verify_line(&tree, &line));
}

/// Every bisection of a small member set, by brute force.
fn best_cut(members: &[usize], w: &dyn Fn(usize, usize) -> u64) -> u64 {
    let k = members.len();
    let mut best = 0;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != k / 2 {
            continue;
        }
        let mut cut = 0;
        for i in 0..k {
            for j in i + 1..k {
                if (mask >> i & 1) != (mask >> j & 1) {
                    cut += w(members[i], members[j]);
                }
            }
        }
        best = best.max(cut);
    }
    best
}

#[test]
fn bisection_against_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let k = 2 * rng.gen_range(2..=4);
        let mut members: Vec<usize> = (0..20).collect();
        members.shuffle(&mut rng);
        members.truncate(k);
        let table: Vec<Vec<u64>> = {
            let mut t = vec![vec![0u64; 20]; 20];
            for i in 0..20 {
                for j in i + 1..20 {
                    t[i][j] = rng.gen_range(0..50);
                    t[j][i] = t[i][j];
                }
            }
            t
        };
        let w = |x: usize, y: usize| table[x][y];
        let cert = balanced_bisection(&members, w, rng.gen()).unwrap();
        assert_eq!(cert.a.len(), cert.b.len());
        assert!(cert.holds());
        assert!(cert.cut <= best_cut(&members, &w));
        let total: u64 = pairs(k).iter().map(|&(i, j)| w(members[i], members[j])).sum();
        assert_eq!(cert.total, total);
    }
}

#[test]
fn rank_weights_cut_half_of_all_comparisons() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [4, 6, 8, 12, 16] {
        let space = random_space(n, &mut rng);
        let order = EdgeOrder::from_space(&space);
        let members: Vec<usize> = (0..n).collect();
        let cert = balanced_bisection(&members, |x, y| order.rank(x, y) as u64, 9).unwrap();
        let m = (n * (n - 1) / 2) as u64;
        assert_eq!(cert.total, m * (m - 1) / 2);
        assert!(2 * cert.cut >= cert.total);
    }
}

#[test]
fn accuracy_construction_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [4, 8, 16, 32] {
        for _ in 0..5 {
            let space = random_space(n, &mut rng);
            let emb = line_embed_halving(&space, rng.gen()).unwrap();
            assert_eq!(emb.certificates.len(), n - 1);
            for c in &emb.certificates {
                assert!(c.bisection.holds());
                assert!(c.orientation_holds());
                assert_eq!(c.bisection.a.len(), c.bisection.b.len());
                let p = (c.bisection.a.len() * c.bisection.b.len()) as u64;
                assert_eq!(c.gamma + c.gamma_prime, p * (p - 1) / 2);
                assert_eq!(c.reflected, c.gamma_prime > c.gamma);
            }
            assert!(verify_line(&emb.tree, &emb.line));
            let order = EdgeOrder::from_space(&space);
            let conc = concordance_of_keys(&order, &line_keys(&emb.line)).unwrap();
            assert_eq!(conc.ties, 0);
        }
    }
}

#[test]
fn reflection_keeps_widths_and_gaps() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let space = random_space(16, &mut rng);
    let emb = line_embed(&space, 1).unwrap();
    // the same tree assembled without mirroring
    let plain = cluster_embed_line(&emb.tree).unwrap();
    for (s, p) in emb.line.steps.iter().zip(&plain.steps) {
        assert_eq!((s.delta, s.width_a, s.width_b), (p.delta, p.width_a, p.width_b));
    }
}

#[test]
fn odd_sizes_run_without_the_guarantee() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let space = random_space(7, &mut rng);
    assert!(line_embed_halving(&space, 0).is_err());
    let emb = line_embed(&space, 0).unwrap();
    assert!(emb.certificates.iter().all(|c| c.bisection.holds()));
    assert!(verify_line(&emb.tree, &emb.line));
}

proptest! {
    #[test]
    fn mirroring_one_join_preserves_its_inside_gaps(n in 2usize..10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = ClusterTree::random(n, &mut rng);
        let line = cluster_embed_line(&tree).unwrap();
        let last = line.steps.last().unwrap();
        let mirrored: Vec<u64> = (0..n).map(|x| {
            if last.a.contains(&x) { last.width_a - line.coords[x] } else { line.coords[x] }
        }).collect();
        for part in [&last.a] {
            let mut g1 = Vec::new();
            let mut g2 = Vec::new();
            for (i, &x) in part.iter().enumerate() {
                for &y in &part[i + 1..] {
                    g1.push(line.coords[x].abs_diff(line.coords[y]));
                    g2.push(mirrored[x].abs_diff(mirrored[y]));
                }
            }
            g1.sort_unstable();
            g2.sort_unstable();
            prop_assert_eq!(g1, g2);
        }
    }

    #[test]
    fn bisection_meets_half_for_any_weights(
        k in 1usize..6,
        ws in proptest::collection::vec(0u64..1000, 66),
        seed in any::<u64>(),
    ) {
        let members: Vec<usize> = (0..2 * k).collect();
        let w = |x: usize, y: usize| {
            let (i, j) = if x < y { (x, y) } else { (y, x) };
            ws[ordrep::space::pair_index(12, i, j)]
        };
        let cert = balanced_bisection(&members, w, seed).unwrap();
        prop_assert!(cert.holds());
        prop_assert_eq!(cert.a.len(), k);
    }
}
