//! Property tests: format round-trips, metric axioms, power monotonicity,
//! and filtration clock agreement on arbitrary small instances.

use edgesq::metrics::{build_lifting_map, verify_lifting_properties};
use edgesq::model::{load_graph, load_points, save_graph, save_points, PointFormat};
use edgesq::persistence::filtration_membership;
use edgesq::tol::REL_TOL;
use edgesq::{MetricParams, PointSet, WeightedGraph};
use proptest::collection::vec;
use proptest::prelude::*;

fn finite_coord() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => -1e6..1e6f64,
        1 => -1e-6..1e-6f64,
        1 => prop_oneof![Just(0.0f64), Just(1.0), Just(-1.0), Just(0.1), Just(1e300), Just(5e-324)],
    ]
}

fn point_sets(max_n: usize) -> impl Strategy<Value = PointSet> {
    (1..=3usize)
        .prop_flat_map(move |dim| vec(vec(finite_coord(), dim), 2..=max_n))
        .prop_map(|rows| PointSet::from_rows(&rows).unwrap())
}

/// Small point sets bounded away from the huge magnitudes, for closures
/// where x^4 must stay finite.
fn tame_point_sets(max_n: usize) -> impl Strategy<Value = PointSet> {
    (1..=3usize)
        .prop_flat_map(move |dim| vec(vec(-100.0..100.0f64, dim), 2..=max_n))
        .prop_map(|rows| PointSet::from_rows(&rows).unwrap())
}

fn graphs() -> impl Strategy<Value = WeightedGraph> {
    (2..=16usize)
        .prop_flat_map(|n| {
            let edge = (0..n, 0..n, 1e-9..1e9f64);
            (Just(n), vec(edge, 0..=24))
        })
        .prop_map(|(n, raw)| {
            let mut seen = std::collections::BTreeSet::new();
            let edges: Vec<(usize, usize, f64)> = raw
                .into_iter()
                .filter(|&(u, v, _)| u != v)
                .filter(|&(u, v, _)| seen.insert((u.min(v), u.max(v))))
                .collect();
            WeightedGraph::new(n, edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_json_round_trips_exactly(g in graphs()) {
        let mut buf = Vec::new();
        save_graph(&mut buf, &g).unwrap();
        let back = load_graph(buf.as_slice()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn points_round_trip_bit_for_bit(ps in point_sets(12)) {
        for format in [PointFormat::Csv, PointFormat::Json] {
            let mut buf = Vec::new();
            save_points(&mut buf, &ps, format).unwrap();
            let back = load_points(buf.as_slice(), format).unwrap();
            prop_assert_eq!(back.dim(), ps.dim());
            let bits =
                |v: &[f64]| v.iter().map(|c| c.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(back.coords()), bits(ps.coords()), "{:?}", format);
        }
    }

    #[test]
    fn power_closures_satisfy_metric_axioms(ps in tame_point_sets(10)) {
        for p in [1.0, 2.0, 4.0] {
            let m = MetricParams::power(p).unwrap().matrix(&ps).unwrap();
            prop_assert!(m.metric_violation(REL_TOL).is_none(), "p={p}");
            for i in 0..ps.len() {
                prop_assert_eq!(m.get(i, i), 0.0);
            }
        }
    }

    #[test]
    fn closure_never_exceeds_direct_squared_distance(ps in tame_point_sets(10)) {
        let m = MetricParams::power(2.0).unwrap().matrix(&ps).unwrap();
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                let sq = ps.sq_dist(i, j);
                prop_assert!(m.get(i, j) <= sq + REL_TOL * sq.max(1.0));
            }
        }
    }

    #[test]
    fn normalized_metrics_shrink_toward_minimax(ps in tame_point_sets(8)) {
        let p1 = MetricParams::normalized(1.0).unwrap().matrix(&ps).unwrap();
        let p2 = MetricParams::normalized(2.0).unwrap().matrix(&ps).unwrap();
        let p4 = MetricParams::normalized(4.0).unwrap().matrix(&ps).unwrap();
        let floor = MetricParams::minimax().matrix(&ps).unwrap();
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                let slack = REL_TOL * p1.get(i, j).max(1.0);
                prop_assert!(p2.get(i, j) <= p1.get(i, j) + slack);
                prop_assert!(p4.get(i, j) <= p2.get(i, j) + slack);
                prop_assert!(p4.get(i, j) + slack >= floor.get(i, j));
            }
        }
    }

    #[test]
    fn lifting_properties_hold_on_arbitrary_inputs(ps in tame_point_sets(12), source_pick in 0..64usize) {
        let source = source_pick % ps.len();
        let lm = build_lifting_map(&ps, source).unwrap();
        let report = verify_lifting_properties(&ps, &lm).unwrap();
        prop_assert!(report.all_ok(), "{report:?}");
    }

    #[test]
    fn filtration_clocks_always_agree(
        ps in tame_point_sets(8),
        query in vec(-150.0..150.0f64, 1..=3),
        alpha in 0.0..200.0f64,
    ) {
        let mut q = query;
        q.resize(ps.dim(), 0.0);
        let (offset, squared) = filtration_membership(&ps, &q, alpha).unwrap();
        prop_assert_eq!(offset, squared);
    }
}
