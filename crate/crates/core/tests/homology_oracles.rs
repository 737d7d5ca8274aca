//! Brute-force oracle checks for the Rips persistence pipeline: H0 against
//! a minimum-spanning-tree oracle, H1 against persistent Betti numbers from
//! boundary-matrix ranks, and invariance under relabeling and rigid motion.

use persistence_fisher::homology::{rips_persistence, PointCloud};
use pf_testkit::{h1_diagram_by_rank, mst_edge_values, random_cloud, split_diagram};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn h0_matches_the_mst_oracle_on_random_clouds() {
    let mut rng = StdRng::seed_from_u64(601);
    for trial in 0..100 {
        let n = rng.random_range(2..=12);
        let cloud = random_cloud(&mut rng, n, 2);
        let diagrams = rips_persistence(&cloud, 0, 10.0).unwrap();
        let (finite, essential) = split_diagram(&diagrams[0]);

        assert_eq!(diagrams[0].len(), n, "trial {trial}: H0 must have n points");
        assert_eq!(
            essential,
            vec![0.0],
            "trial {trial}: exactly one essential class"
        );

        let mst = mst_edge_values(&cloud);
        let deaths: Vec<f64> = finite.iter().map(|&(_, d)| d).collect();
        assert_eq!(deaths, mst, "trial {trial}: deaths differ from MST values");
        assert!(finite.iter().all(|&(b, _)| b == 0.0));
    }
}

#[test]
fn h1_matches_the_boundary_rank_oracle_on_random_clouds() {
    let mut rng = StdRng::seed_from_u64(602);
    for trial in 0..50 {
        let n = rng.random_range(4..=8);
        let cloud = random_cloud(&mut rng, n, 2);
        // Alternate between a full complex and a truncated one so essential
        // classes show up too.
        let max_scale = if trial % 2 == 0 { 10.0 } else { 0.3 };
        let diagrams = rips_persistence(&cloud, 1, max_scale).unwrap();
        let got: Vec<(f64, f64)> = {
            let (mut finite, essential) = split_diagram(&diagrams[1]);
            finite.extend(essential.into_iter().map(|b| (b, f64::INFINITY)));
            finite.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            finite
        };
        let expected = h1_diagram_by_rank(&cloud, max_scale);
        assert_eq!(got, expected, "trial {trial} (max_scale {max_scale})");
    }
}

#[test]
fn diagrams_are_invariant_under_permutation_and_rigid_motion() {
    let mut rng = StdRng::seed_from_u64(603);
    for _ in 0..10 {
        let n = rng.random_range(5..=10);
        let cloud = random_cloud(&mut rng, n, 2);
        let reference = rips_persistence(&cloud, 1, 10.0).unwrap();

        let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let (sin, cos) = angle.sin_cos();
        let (dx, dy) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let mut moved: Vec<Vec<f64>> = cloud
            .points()
            .iter()
            .map(|p| vec![cos * p[0] - sin * p[1] + dx, sin * p[0] + cos * p[1] + dy])
            .collect();
        // Relabel the points as well.
        moved.rotate_left(n / 2);
        moved.swap(0, n - 1);
        let transformed = rips_persistence(&PointCloud::new(moved).unwrap(), 1, 10.0).unwrap();

        for dim in 0..2 {
            let (fa, ea) = split_diagram(&reference[dim]);
            let (fb, eb) = split_diagram(&transformed[dim]);
            assert_eq!(fa.len(), fb.len());
            assert_eq!(ea.len(), eb.len());
            for (a, b) in fa.iter().zip(&fb) {
                assert!((a.0 - b.0).abs() <= 1e-9 && (a.1 - b.1).abs() <= 1e-9);
            }
            for (a, b) in ea.iter().zip(&eb) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}
