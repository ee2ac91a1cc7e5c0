//! Proximity graphs that stay faithful to the power metrics: k-NN, Gabriel,
//! Euclidean MST, and critical edge sets.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::metrics::{pairwise_powers, sssp_dense, Relax};
use crate::model::{PointSet, WeightedGraph};
use crate::tol::{rel_eq, GABRIEL_TOL, REL_TOL};
use crate::{Error, Result};

/// Undirected union of each point's `k` nearest neighbors, weighted by
/// `|u - v|^weight_power`.
///
/// Neighbor ties at the cutoff distance are settled by index: candidates are
/// ranked by `(distance, index)` and exactly `k` survive per point.
pub fn knn_graph(ps: &PointSet, k: usize, weight_power: f64) -> Result<WeightedGraph> {
    let n = ps.len();
    if k == 0 || k >= n {
        return Err(Error::param("k", format!("k = {k} out of range [1, {}]", n.saturating_sub(1))));
    }
    if !weight_power.is_finite() || weight_power < 0.0 {
        return Err(Error::param("weight_power", format!("{weight_power} must be finite and >= 0")));
    }
    let per_point: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut cand: Vec<(f64, usize)> =
                (0..n).filter(|&v| v != u).map(|v| (ps.sq_dist(u, v), v)).collect();
            cand.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cand[..k].iter().map(|&(_, v)| if u < v { (u, v) } else { (v, u) }).collect()
        })
        .collect();
    let edges: BTreeSet<(usize, usize)> = per_point.into_iter().flatten().collect();
    WeightedGraph::new(
        n,
        edges.into_iter().map(|(u, v)| (u, v, ps.sq_dist(u, v).sqrt().powf(weight_power))),
    )
}

/// Edges kept for one source row plus its near-degenerate witness count.
type GabrielRow = (Vec<(usize, usize, f64)>, usize);

/// Gabriel graph: edge `(u, v)` survives when no third point lies strictly
/// inside the open ball with diameter `uv`, weighted by squared Euclidean
/// length.
///
/// The test is the dot product `(u - w) . (v - w)`; a witness excludes only
/// below `-GABRIEL_TOL * |uv|^2`, so points on the boundary sphere do not
/// exclude. Near-degenerate witnesses log a warning.
pub fn gabriel_graph(ps: &PointSet) -> Result<WeightedGraph> {
    let n = ps.len();
    let dim = ps.dim();
    let results: Vec<GabrielRow> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut edges = Vec::new();
            let mut degenerate = 0usize;
            for v in (u + 1)..n {
                let sq = ps.sq_dist(u, v);
                let cut = -GABRIEL_TOL * sq;
                let near = GABRIEL_TOL * sq;
                let mut excluded = false;
                for w in 0..n {
                    if w == u || w == v {
                        continue;
                    }
                    let pu = ps.point(u);
                    let pv = ps.point(v);
                    let pw = ps.point(w);
                    let mut dot = 0.0;
                    for t in 0..dim {
                        dot += (pu[t] - pw[t]) * (pv[t] - pw[t]);
                    }
                    if dot.abs() <= near {
                        degenerate += 1;
                    }
                    if dot < cut {
                        excluded = true;
                        break;
                    }
                }
                if !excluded {
                    edges.push((u, v, sq));
                }
            }
            (edges, degenerate)
        })
        .collect();
    let degenerate: usize = results.iter().map(|r| r.1).sum();
    if degenerate > 0 {
        log::warn!("gabriel_graph: {degenerate} witness tests fell within the degeneracy band");
    }
    WeightedGraph::new(n, results.into_iter().flat_map(|r| r.0))
}

/// Euclidean minimum spanning tree by dense Prim, weighted by Euclidean
/// length. Ties settle on the lowest vertex index, so the edge set is
/// deterministic even for cocircular inputs.
pub fn euclidean_mst(ps: &PointSet) -> Result<WeightedGraph> {
    let n = ps.len();
    if n == 1 {
        return Ok(WeightedGraph::empty(1));
    }
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    key[0] = 0.0;
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !in_tree[v] && key[v] < best {
                best = key[v];
                u = v;
            }
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            edges.push((parent[u], u, ps.dist(parent[u], u)));
        }
        for v in 0..n {
            if !in_tree[v] {
                let d = ps.sq_dist(u, v);
                if d < key[v] {
                    key[v] = d;
                    parent[v] = u;
                }
            }
        }
    }
    WeightedGraph::new(n, edges)
}

/// Edges whose direct hop is a shortest path in the p-power metric.
#[derive(Clone, Debug)]
pub struct CriticalEdgeSet {
    /// Surviving edges, weighted by `|u - v|^p`.
    pub graph: WeightedGraph,
    pub p: f64,
    /// True when ties were excluded: an edge survives only if every detour
    /// avoiding it is strictly longer. Non-strict keeps ties.
    pub strict: bool,
}

/// Computes the critical edge set for finite power `p >= 1`.
///
/// An edge `(u, v)` is non-strictly critical when the shortest path that
/// avoids the direct hop is at least `|u - v|^p`, strictly critical when it
/// is strictly longer; comparisons use `REL_TOL` relative tolerance.
pub fn critical_edges(ps: &PointSet, p: f64, strict: bool) -> Result<CriticalEdgeSet> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::param("p", format!("power {p} must be finite and at least 1")));
    }
    let n = ps.len();
    let w = pairwise_powers(ps, p);
    let closure = crate::metrics::closure(n, &w, Relax::Sum);

    // A pair can only be critical when its direct edge already achieves the
    // closure value; only those few need the per-edge detour Dijkstra.
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|&(u, v)| rel_eq(closure.get(u, v), w[u * n + v], REL_TOL))
        .collect();
    let edges: Vec<(usize, usize, f64)> = candidates
        .into_par_iter()
        .filter_map(|(u, v)| {
            let direct = w[u * n + v];
            if !strict {
                return Some((u, v, direct));
            }
            let detour = sssp_dense(n, &w, u, Relax::Sum, Some((u, v)))[v];
            if detour > direct && !rel_eq(detour, direct, REL_TOL) {
                Some((u, v, direct))
            } else {
                None
            }
        })
        .collect();
    Ok(CriticalEdgeSet { graph: WeightedGraph::new(n, edges)?, p, strict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> PointSet {
        PointSet::new(1, points.to_vec()).unwrap()
    }

    #[test]
    fn knn_three_collinear_k1() {
        let ps = line(&[0.0, 1.0, 2.0]);
        let g = knn_graph(&ps, 1, 1.0).unwrap();
        let edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        assert_eq!(edges, vec![(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn knn_full_k_is_complete() {
        let ps = line(&[0.0, 1.0, 5.0, 9.0]);
        let g = knn_graph(&ps, 3, 2.0).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn knn_rejects_bad_k() {
        let ps = line(&[0.0, 1.0]);
        assert!(knn_graph(&ps, 0, 1.0).is_err());
        assert!(knn_graph(&ps, 2, 1.0).is_err());
    }

    #[test]
    fn knn_tie_at_cutoff_is_deterministic() {
        // Points 1 and 2 are equidistant from 0 but only one k = 1 slot is
        // open; the lower index wins and the loser never returns the favor.
        let ps = PointSet::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.8, 0.0],
            vec![0.0, 1.8],
        ])
        .unwrap();
        let g = knn_graph(&ps, 1, 1.0).unwrap();
        assert!(g.contains_edge(0, 1));
        assert!(!g.contains_edge(0, 2));
        let edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(edges, vec![(0, 1), (1, 3), (2, 4)]);
    }

    #[test]
    fn gabriel_midpoint_blocks() {
        // The third point sits inside the diameter ball of the long pair.
        let ps = PointSet::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.5]]).unwrap();
        let g = gabriel_graph(&ps).unwrap();
        assert!(!g.contains_edge(0, 1));
        assert!(g.contains_edge(0, 2));
        assert!(g.contains_edge(1, 2));
    }

    #[test]
    fn gabriel_two_points() {
        let ps = line(&[0.0, 4.0]);
        let g = gabriel_graph(&ps).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].w, 16.0);
    }

    #[test]
    fn gabriel_unit_square_keeps_diagonals() {
        // Each diagonal's ball has the other two corners exactly on its
        // boundary, which must not exclude.
        let ps = PointSet::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let g = gabriel_graph(&ps).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn mst_collinear() {
        let ps = line(&[0.0, 1.0, 3.0]);
        let g = euclidean_mst(&ps).unwrap();
        let edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        assert_eq!(edges, vec![(0, 1, 1.0), (1, 2, 2.0)]);
    }

    #[test]
    fn mst_single_point() {
        let ps = line(&[0.0]);
        assert_eq!(euclidean_mst(&ps).unwrap().edge_count(), 0);
    }

    #[test]
    fn critical_collinear_p2() {
        // 0-1-2: the outer pair has a strictly cheaper two-hop path, so only
        // the unit edges are critical, strictly and non-strictly.
        let ps = line(&[0.0, 1.0, 2.0]);
        for strict in [false, true] {
            let c = critical_edges(&ps, 2.0, strict).unwrap();
            let edges: Vec<_> = c.graph.edges().iter().map(|e| (e.u, e.v)).collect();
            assert_eq!(edges, vec![(0, 1), (1, 2)], "strict={strict}");
        }
    }

    #[test]
    fn critical_two_points() {
        let ps = line(&[0.0, 2.0]);
        let c = critical_edges(&ps, 4.0, true).unwrap();
        assert_eq!(c.graph.edge_count(), 1);
        assert_eq!(c.graph.edges()[0].w, 16.0);
    }

    #[test]
    fn critical_rejects_bad_p() {
        let ps = line(&[0.0, 1.0]);
        assert!(critical_edges(&ps, 0.5, false).is_err());
        assert!(critical_edges(&ps, f64::INFINITY, false).is_err());
    }

    #[test]
    fn strict_excludes_exact_ties() {
        // Equilateral-ish tie: point 2 on the circle with diameter (0, 1)
        // makes the two-hop p=2 path cost exactly the direct edge.
        let ps = PointSet::from_rows(&[
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let strict = critical_edges(&ps, 2.0, true).unwrap();
        let lax = critical_edges(&ps, 2.0, false).unwrap();
        assert!(!strict.graph.contains_edge(0, 1));
        assert!(lax.graph.contains_edge(0, 1));
        assert!(strict.graph.contains_edge(0, 2));
        assert!(strict.graph.contains_edge(1, 2));
    }
}
