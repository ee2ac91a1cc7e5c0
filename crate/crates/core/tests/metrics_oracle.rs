//! Metric computations cross-checked against independent closures:
//! Floyd-Warshall for the p-power metrics, Kruskal bottleneck paths for
//! the minimax metric, and a second APSP route for the lifting map.

mod common;

use common::{close, cube_points, fw_bottleneck, fw_closure, kruskal_mst, tree_path_max, weight_matrix, ORACLE_TOL};
use edgesq::metrics::{
    build_lifting_map, edge_squared_one_spanner_check, normalized_power_limit_check,
    verify_lifting_properties,
};
use edgesq::proximity::gabriel_graph;
use edgesq::{minimax_distance, stretch, MetricParams, WeightedGraph};

#[test]
fn power_metrics_match_floyd_warshall() {
    for (seed, dim) in [(1u64, 2usize), (2, 3)] {
        let ps = cube_points(seed, 30, dim);
        let n = ps.len();
        for p in [1.0, 2.0, 4.0] {
            let w = weight_matrix(&ps, p);
            let fw = fw_closure(n, &w);
            let raw = MetricParams::power(p).unwrap().matrix(&ps).unwrap();
            let norm = MetricParams::normalized(p).unwrap().matrix(&ps).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let expect = fw[i * n + j];
                    assert!(
                        close(raw.get(i, j), expect, ORACLE_TOL),
                        "p={p} raw ({i},{j}): {} vs {expect}",
                        raw.get(i, j)
                    );
                    assert!(
                        close(norm.get(i, j), expect.powf(1.0 / p), ORACLE_TOL),
                        "p={p} normalized ({i},{j})"
                    );
                }
            }
        }
    }
}

#[test]
fn minimax_matches_both_bottleneck_oracles() {
    let ps = cube_points(3, 40, 2);
    let n = ps.len();
    let m = minimax_distance(&ps).unwrap();
    let w = weight_matrix(&ps, 1.0);
    let fw = fw_bottleneck(n, &w);
    let mst = kruskal_mst(n, &w);
    for i in 0..n {
        for j in (i + 1)..n {
            let got = m.get(i, j);
            assert!(close(got, fw[i * n + j], ORACLE_TOL), "fw ({i},{j})");
            let via_mst = tree_path_max(n, &mst, i, j);
            assert!(close(got, via_mst, ORACLE_TOL), "mst path ({i},{j}): {got} vs {via_mst}");
        }
    }
}

#[test]
fn normalized_powers_descend_to_the_minimax_floor() {
    for (seed, dim) in [(4u64, 2usize), (5, 3)] {
        let ps = cube_points(seed, 25, dim);
        let report =
            normalized_power_limit_check(&ps, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]).unwrap();
        assert_eq!(report.monotone_violations, 0, "dim {dim}");
        assert_eq!(report.floor_violations, 0, "dim {dim}");
        assert!(
            report.final_gap <= 0.05 * report.diameter,
            "dim {dim}: gap {} vs diameter {}",
            report.final_gap,
            report.diameter
        );
        let gaps: Vec<f64> = report.rows.iter().map(|r| r.max_gap).collect();
        for pair in gaps.windows(2) {
            assert!(pair[1] <= pair[0] + ORACLE_TOL, "gap sequence not shrinking: {gaps:?}");
        }
    }
}

#[test]
fn lifting_verified_and_cross_checked_by_independent_apsp() {
    for seed in 0..6u64 {
        let dim = 1 + (seed as usize % 3);
        let n = 20 + 10 * seed as usize;
        let ps = cube_points(seed + 10, n, dim);
        let source = (seed as usize * 7) % n;
        let lm = build_lifting_map(&ps, source).unwrap();
        let report = verify_lifting_properties(&ps, &lm).unwrap();
        assert!(report.all_ok(), "seed {seed}: {report:?}");

        let base = fw_closure(n, &weight_matrix(&ps, 2.0));
        let image = lm.image_point_set();
        let lifted = fw_closure(n, &weight_matrix(&image, 2.0));
        for j in 0..n {
            assert!(
                close(lifted[source * n + j], base[source * n + j], ORACLE_TOL),
                "seed {seed}, source row at {j}"
            );
        }
    }
}

#[test]
fn one_spanner_check_agrees_with_full_stretch() {
    let ps = cube_points(6, 80, 2);
    let base = MetricParams::power(2.0).unwrap().matrix(&ps).unwrap();

    let gabriel = gabriel_graph(&ps).unwrap();
    let check = edge_squared_one_spanner_check(&ps, &gabriel).unwrap();
    let full = stretch(&base, &gabriel).unwrap();
    assert!(check.holds);
    assert!(full.max_stretch <= 1.0 + ORACLE_TOL);

    // A path through the square's corners stretches the opposite side:
    // both routes must agree that it is not a 1-spanner.
    let square = edgesq::PointSet::new(2, vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0]).unwrap();
    let path =
        WeightedGraph::new(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
    let check = edge_squared_one_spanner_check(&square, &path).unwrap();
    assert!(!check.holds);
    assert_eq!(check.witness, Some((0, 3)));
    assert!(close(check.worst_excess, 2.0, 1e-9), "{}", check.worst_excess);
    let square_base = MetricParams::power(2.0).unwrap().matrix(&square).unwrap();
    let full = stretch(&square_base, &path).unwrap();
    assert!(close(full.max_stretch, 3.0, 1e-9));
}
