//! Structural properties of the split tree and WSPD: exact pair coverage,
//! separation re-verification, size scaling, and the grid selection's
//! approximation factor against exact selection.

mod common;

use common::cube_points;
use edgesq::wspd::{approx_closest_edge, build_split_tree, build_wspd, SelectionMode};

#[test]
fn wspd_covers_every_unordered_pair_exactly_once() {
    for (seed, n, dim) in [(30u64, 60usize, 2usize), (31, 500, 2), (32, 120, 3)] {
        let ps = cube_points(seed, n, dim);
        let tree = build_split_tree(&ps).unwrap();
        let wspd = build_wspd(&tree, 4.0).unwrap();
        let mut counts = vec![0u32; n * n];
        for &(a, b) in &wspd.pairs {
            for &u in tree.points_of(a) {
                for &v in tree.points_of(b) {
                    assert_ne!(u, v, "pair covers a self-pair");
                    counts[u.min(v) * n + u.max(v)] += 1;
                }
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                assert_eq!(counts[u * n + v], 1, "seed {seed}: pair ({u},{v})");
            }
        }
    }
}

#[test]
fn wspd_pairs_re_verify_their_separation() {
    let ps = cube_points(33, 200, 3);
    let tree = build_split_tree(&ps).unwrap();
    for s in [2.0, 4.0, 8.0] {
        let wspd = build_wspd(&tree, s).unwrap();
        for &(a, b) in &wspd.pairs {
            let radius = tree.node(a).radius().max(tree.node(b).radius());
            assert!(
                tree.box_distance(a, b) >= s * radius - 1e-12,
                "s={s}: pair ({a},{b}) violates separation"
            );
        }
    }
}

#[test]
fn wspd_size_grows_moderately_with_separation() {
    let ps = cube_points(34, 300, 2);
    let tree = build_split_tree(&ps).unwrap();
    let small = build_wspd(&tree, 4.0).unwrap().pairs.len();
    let large = build_wspd(&tree, 8.0).unwrap().pairs.len();
    assert!(large >= small);
    assert!(
        (large as f64) <= 20.0 * small as f64,
        "s=8 gave {large} pairs vs {small} at s=4"
    );
}

#[test]
fn grid_selection_stays_within_its_error_factor() {
    // The grid guarantee: dist <= exact * (1 + c * delta^2) with
    // c = 2 * sqrt(dim) for cells of width delta^2 * box distance.
    let delta = 0.25;
    for (seed, dim) in [(35u64, 2usize), (36, 3), (37, 4)] {
        let ps = cube_points(seed, 250, dim);
        let tree = build_split_tree(&ps).unwrap();
        let wspd = build_wspd(&tree, 4.0).unwrap();
        let c = 2.0 * (dim as f64).sqrt();
        let mut checked = 0usize;
        for &(a, b) in &wspd.pairs {
            let exact = approx_closest_edge(&ps, &tree, a, b, SelectionMode::Exact, delta).unwrap();
            let grid = approx_closest_edge(&ps, &tree, a, b, SelectionMode::Grid, delta).unwrap();
            assert!(
                grid.dist <= exact.dist * (1.0 + c * delta * delta) + 1e-12,
                "dim {dim}: grid {} vs exact {}",
                grid.dist,
                exact.dist
            );
            assert!(grid.dist >= exact.dist - 1e-12, "grid edge shorter than the minimum");
            checked += 1;
        }
        assert!(checked > 100, "dim {dim}: too few pairs to be meaningful");
    }
}
