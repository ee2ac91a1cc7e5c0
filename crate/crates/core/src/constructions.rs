//! Deterministic adversarial instances: spanner lower bounds on paired
//! unit spheres, the H-tree with subdivided segments, and a greedy
//! doubling-dimension estimator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::experiments::gaussian_direction;
use crate::metrics::{pairwise_powers, sssp_dense, Relax};
use crate::model::{DistanceMatrix, PointSet};
use crate::{Error, Result};

/// Two point families on the unit spheres of complementary coordinate
/// subspaces. Within each copy: part A occupies the first `d/2`
/// coordinates, part B the last `d/2`, both parts are spaced at least
/// `4 * eps` apart internally, and every cross pair sits at distance
/// `sqrt(2)`. Copies are translated along the first axis; invariants are
/// relative to each copy's offset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowerBoundInstance {
    pub points: PointSet,
    pub part_a: Vec<usize>,
    pub part_b: Vec<usize>,
    pub eps: f64,
    pub copies: usize,
    pub points_per_copy: usize,
    /// Translation between consecutive copies along the first axis.
    pub copy_step: f64,
}

/// Builds the lower-bound instance: maximal grids with chordal spacing
/// `4 * eps` on the unit spheres of the first and last `d/2` coordinates,
/// replicated `copies` times at spacing at least 10.
pub fn gen_euclidean_lower_bound(d: usize, eps: f64, copies: usize) -> Result<LowerBoundInstance> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::param("d", format!("{d} must be even and at least 2")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param("eps", format!("{eps} must lie in (0, 0.5)")));
    }
    if copies == 0 {
        return Err(Error::param("copies", "need at least one copy"));
    }
    let half = d / 2;
    let sphere = sphere_grid(half, 4.0 * eps);
    if sphere.len() < 2 {
        return Err(Error::param("eps", format!("{eps} too large to fit two points per part")));
    }
    let per_part = sphere.len();
    let points_per_copy = 2 * per_part;
    let copy_step = 12.0;
    let mut coords = Vec::with_capacity(copies * points_per_copy * d);
    let mut part_a = Vec::with_capacity(copies * per_part);
    let mut part_b = Vec::with_capacity(copies * per_part);
    for c in 0..copies {
        let offset = c as f64 * copy_step;
        let base = c * points_per_copy;
        for (i, s) in sphere.iter().enumerate() {
            part_a.push(base + i);
            coords.push(s[0] + offset);
            coords.extend_from_slice(&s[1..]);
            coords.extend(std::iter::repeat_n(0.0, half));
        }
        for (i, s) in sphere.iter().enumerate() {
            part_b.push(base + per_part + i);
            coords.push(offset);
            coords.extend(std::iter::repeat_n(0.0, half - 1));
            coords.extend_from_slice(s);
        }
    }
    Ok(LowerBoundInstance {
        points: PointSet::new(d, coords)?,
        part_a,
        part_b,
        eps,
        copies,
        points_per_copy,
        copy_step,
    })
}

/// A maximal set of unit vectors in `dim` dimensions with pairwise
/// distance at least `min_spacing`. Deterministic for fixed inputs.
fn sphere_grid(dim: usize, min_spacing: f64) -> Vec<Vec<f64>> {
    match dim {
        0 => unreachable!("dim >= 1 enforced by caller"),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let m = (std::f64::consts::PI / (min_spacing / 2.0).asin()).floor() as usize;
            let m = m.max(2);
            (0..m)
                .map(|j| {
                    let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    vec![theta.cos(), theta.sin()]
                })
                .collect()
        }
        _ => {
            // Greedy packing over a fixed seeded candidate cloud: maximal
            // with respect to the cloud, deterministic run to run.
            let mut rng = ChaCha8Rng::seed_from_u64(0x0915_EEED ^ dim as u64);
            let sq = min_spacing * min_spacing;
            let mut kept: Vec<Vec<f64>> = Vec::new();
            for _ in 0..2048 * dim {
                let cand = gaussian_direction(&mut rng, dim);
                let far = kept.iter().all(|k| {
                    let d2: f64 = k.iter().zip(&cand).map(|(a, b)| (a - b) * (a - b)).sum();
                    d2 >= sq
                });
                if far {
                    kept.push(cand);
                }
            }
            kept
        }
    }
}

/// Outcome of the cross-edge necessity check.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NecessityReport {
    /// Smallest detour ratio over all cross edges: shortest path avoiding
    /// the edge divided by the edge length. Infinite when removal
    /// disconnects the pair.
    pub min_ratio: f64,
    /// Cross pair attaining the minimum, if finite.
    pub witness: Option<(usize, usize)>,
    pub checked_edges: usize,
    /// Whether every cross edge has detour ratio above `1 + eps`.
    pub all_necessary: bool,
}

/// Checks that every A-to-B edge is necessary in any `(1 + eps)`-spanner
/// of the Euclidean distance: removing it must leave no path within
/// factor `1 + eps` of the direct edge.
pub fn verify_lower_bound_necessity(inst: &LowerBoundInstance) -> Result<NecessityReport> {
    if inst.copies != 1 {
        return Err(Error::param("copies", "necessity check requires a single copy"));
    }
    let n = inst.points.len();
    let w = pairwise_powers(&inst.points, 1.0);
    let pairs: Vec<(usize, usize)> = inst
        .part_a
        .iter()
        .flat_map(|&a| inst.part_b.iter().map(move |&b| (a, b)))
        .collect();
    let ratios: Vec<(f64, usize, usize)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let direct = w[a * n + b];
            let detour = sssp_dense(n, &w, a, Relax::Sum, Some((a, b)))[b];
            (detour / direct, a, b)
        })
        .collect();
    let mut min_ratio = f64::INFINITY;
    let mut witness = None;
    for &(ratio, a, b) in &ratios {
        if ratio < min_ratio {
            min_ratio = ratio;
            witness = Some((a, b));
        }
    }
    Ok(NecessityReport {
        min_ratio,
        witness,
        checked_edges: pairs.len(),
        all_necessary: min_ratio > 1.0 + inst.eps,
    })
}

/// One subdivided segment of the H-tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeEdge {
    /// Logical tree nodes (also point indices) the segment joins.
    pub parent: usize,
    pub child: usize,
    /// Depth of the parent node.
    pub level: usize,
    /// Euclidean segment length.
    pub length: f64,
    /// Interior subdivision point count.
    pub interior: usize,
    /// Point indices along the segment, endpoints included.
    pub chain: Vec<usize>,
}

/// An H-tree layout of the complete binary tree, each segment subdivided
/// finely enough that its edge-squared cost stays below
/// `1 / (8 * log2(n_tree))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HTreeInstance {
    /// All points: the `n_tree` logical nodes in heap order, then the
    /// interior subdivision points segment by segment.
    pub points: PointSet,
    pub depth: usize,
    pub n_tree: usize,
    pub tree_edges: Vec<TreeEdge>,
    /// Interior point count per segment, in `tree_edges` order.
    pub subdivision_counts: Vec<usize>,
}

impl HTreeInstance {
    /// Edge-squared cost of one subdivided segment, recomputed from the
    /// coordinates as the sum of consecutive squared gaps.
    #[must_use]
    pub fn edge_cost(&self, edge: &TreeEdge) -> f64 {
        edge.chain.windows(2).map(|w| self.points.sq_dist(w[0], w[1])).sum()
    }

    /// Edge-squared cost of the tree path between two logical nodes,
    /// walking parents to the common ancestor.
    #[must_use]
    pub fn tree_path_cost(&self, a: usize, b: usize) -> f64 {
        let mut cost = 0.0;
        let (mut a, mut b) = (a, b);
        while a != b {
            if a < b {
                std::mem::swap(&mut a, &mut b);
            }
            // In heap order the edge whose child is node v sits at v - 1.
            cost += self.edge_cost(&self.tree_edges[a - 1]);
            a = (a - 1) / 2;
        }
        cost
    }

    /// Ceiling the per-edge costs must respect, `1 / (8 * log2(n_tree))`.
    #[must_use]
    pub fn per_edge_budget(&self) -> f64 {
        1.0 / (8.0 * (self.n_tree as f64).log2())
    }
}

/// Lays out the complete binary tree of the given depth as an H-tree:
/// segment lengths halve every two levels, axes alternate, and each
/// segment of length `l` at tree size `n` gets
/// `max(0, ceil(8 * l^2 * log2(n)) - 1)` interior points.
pub fn gen_h_tree(depth: usize) -> Result<HTreeInstance> {
    if !(1..=10).contains(&depth) {
        return Err(Error::param("depth", format!("{depth} must lie in [1, 10]")));
    }
    let n_tree = (1usize << (depth + 1)) - 1;
    let log_n = (n_tree as f64).log2();
    let mut pos = vec![[0.0f64; 2]; n_tree];
    let mut coords: Vec<f64> = Vec::new();
    let mut tree_edges = Vec::with_capacity(n_tree - 1);
    for i in 0..n_tree {
        coords.extend_from_slice(&pos[i]);
        // Positions must be fixed before a node's coordinates are pushed,
        // so children are placed when their parent index is visited.
        let level = (i + 1).ilog2() as usize;
        let len = (2.0f64).powi(-((level / 2) as i32));
        let axis = level % 2;
        for (child, sign) in [(2 * i + 1, -1.0), (2 * i + 2, 1.0)] {
            if child < n_tree {
                pos[child] = pos[i];
                pos[child][axis] += sign * len;
            }
        }
    }
    let mut next_point = n_tree;
    for i in 0..n_tree {
        let level = (i + 1).ilog2() as usize;
        let len = (2.0f64).powi(-((level / 2) as i32));
        for child in [2 * i + 1, 2 * i + 2] {
            if child >= n_tree {
                continue;
            }
            let interior = ((8.0 * len * len * log_n).ceil() as usize).saturating_sub(1);
            let mut chain = Vec::with_capacity(interior + 2);
            chain.push(i);
            for j in 1..=interior {
                let t = j as f64 / (interior + 1) as f64;
                chain.push(next_point);
                next_point += 1;
                coords.push(pos[i][0] + t * (pos[child][0] - pos[i][0]));
                coords.push(pos[i][1] + t * (pos[child][1] - pos[i][1]));
            }
            chain.push(child);
            tree_edges.push(TreeEdge { parent: i, child, level, length: len, interior, chain });
        }
    }
    let subdivision_counts = tree_edges.iter().map(|e| e.interior).collect();
    Ok(HTreeInstance {
        points: PointSet::new(2, coords)?,
        depth,
        n_tree,
        tree_edges,
        subdivision_counts,
    })
}

/// Greedy cover size for one radius.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RadiusCover {
    pub r: f64,
    /// Largest greedy cover over all centers at this radius.
    pub lambda: usize,
}

/// Doubling-dimension estimate from greedy ball covers. Greedy covering
/// upper-bounds the optimum, so this is an estimate, not the exact
/// doubling constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DoublingReport {
    /// Largest cover size over all radii and centers.
    pub lambda: usize,
    /// `log2(lambda)`.
    pub dim_estimate: f64,
    pub per_radius: Vec<RadiusCover>,
}

/// For each radius `r` and center `x`, greedily covers the ball
/// `{y : dm(x, y) <= r}` with balls of radius `r / 2` centered at set
/// points, always picking the lowest-index uncovered point.
pub fn estimate_doubling_dimension(
    ps: &PointSet,
    dm: &DistanceMatrix,
    radii: &[f64],
) -> Result<DoublingReport> {
    let n = ps.len();
    if dm.n() != n {
        return Err(Error::param("dm", format!("matrix is {}x{0}, point set has {n}", dm.n())));
    }
    if radii.is_empty() {
        return Err(Error::param("radii", "must be non-empty"));
    }
    for &r in radii {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::param("radii", format!("{r} must be finite and positive")));
        }
    }
    let per_radius: Vec<RadiusCover> = radii
        .iter()
        .map(|&r| {
            let lambda = (0..n)
                .into_par_iter()
                .map(|x| {
                    let mut uncovered: Vec<usize> =
                        (0..n).filter(|&y| dm.get(x, y) <= r).collect();
                    let mut covers = 0usize;
                    while let Some(&c) = uncovered.first() {
                        covers += 1;
                        uncovered.retain(|&y| dm.get(c, y) > r / 2.0);
                    }
                    covers
                })
                .max()
                .unwrap_or(0);
            RadiusCover { r, lambda }
        })
        .collect();
    let lambda = per_radius.iter().map(|c| c.lambda).max().unwrap_or(0).max(1);
    Ok(DoublingReport {
        lambda,
        dim_estimate: (lambda as f64).log2(),
        per_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricParams;
    use crate::model::euclidean;

    #[test]
    fn lower_bound_d2_is_two_crossed_pairs() {
        let inst = gen_euclidean_lower_bound(2, 0.1, 1).unwrap();
        assert_eq!(inst.points.len(), 4);
        assert_eq!(inst.part_a, vec![0, 1]);
        assert_eq!(inst.part_b, vec![2, 3]);
        assert_eq!(inst.points.point(0), &[1.0, 0.0]);
        assert_eq!(inst.points.point(1), &[-1.0, 0.0]);
        assert_eq!(inst.points.point(2), &[0.0, 1.0]);
        assert_eq!(inst.points.point(3), &[0.0, -1.0]);
    }

    #[test]
    fn lower_bound_d4_circle_count_matches_formula() {
        let inst = gen_euclidean_lower_bound(4, 0.1, 1).unwrap();
        let expected = (std::f64::consts::PI / (0.2f64).asin()).floor() as usize;
        assert_eq!(inst.part_a.len(), expected);
        assert_eq!(inst.part_b.len(), expected);
        assert_eq!(expected, 15);
    }

    #[test]
    fn lower_bound_invariants_hold() {
        for (d, eps) in [(2usize, 0.1), (4, 0.1), (4, 0.2), (6, 0.12)] {
            let inst = gen_euclidean_lower_bound(d, eps, 1).unwrap();
            let half = d / 2;
            for &a in &inst.part_a {
                assert!(inst.points.point(a)[half..].iter().all(|&c| c == 0.0));
            }
            for &b in &inst.part_b {
                assert!(inst.points.point(b)[..half].iter().all(|&c| c == 0.0));
            }
            for part in [&inst.part_a, &inst.part_b] {
                for (i, &u) in part.iter().enumerate() {
                    for &v in &part[i + 1..] {
                        let dist = euclidean(inst.points.point(u), inst.points.point(v)).unwrap();
                        assert!(dist >= 4.0 * eps - 1e-9, "d={d} eps={eps}: {dist}");
                    }
                }
            }
            for &a in &inst.part_a {
                for &b in &inst.part_b {
                    let dist = euclidean(inst.points.point(a), inst.points.point(b)).unwrap();
                    assert!((dist - 2.0f64.sqrt()).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn lower_bound_copies_are_translated_clones() {
        let one = gen_euclidean_lower_bound(2, 0.1, 1).unwrap();
        let inst = gen_euclidean_lower_bound(2, 0.1, 3).unwrap();
        assert_eq!(inst.points.len(), 3 * one.points.len());
        assert_eq!(inst.points_per_copy, one.points.len());
        for c in 0..3 {
            for i in 0..inst.points_per_copy {
                let p = inst.points.point(c * inst.points_per_copy + i);
                let q = one.points.point(i);
                assert_eq!(p[0] - c as f64 * inst.copy_step, q[0]);
                assert_eq!(p[1], q[1]);
            }
        }
        // Closest points of neighboring copies are at least 10 apart.
        assert!(inst.copy_step - 2.0 >= 10.0);
    }

    #[test]
    fn lower_bound_rejects_bad_parameters() {
        assert!(gen_euclidean_lower_bound(3, 0.1, 1).is_err());
        assert!(gen_euclidean_lower_bound(0, 0.1, 1).is_err());
        assert!(gen_euclidean_lower_bound(2, 0.5, 1).is_err());
        assert!(gen_euclidean_lower_bound(2, 0.0, 1).is_err());
        assert!(gen_euclidean_lower_bound(2, 0.1, 0).is_err());
    }

    #[test]
    fn necessity_holds_on_the_d2_instance() {
        let inst = gen_euclidean_lower_bound(2, 0.1, 1).unwrap();
        let report = verify_lower_bound_necessity(&inst).unwrap();
        assert_eq!(report.checked_edges, 4);
        assert!(report.all_necessary);
        // Best detour goes through the antipode: (2 + sqrt(2)) / sqrt(2).
        let expected = (2.0 + 2.0f64.sqrt()) / 2.0f64.sqrt();
        assert!((report.min_ratio - expected).abs() < 1e-12, "{}", report.min_ratio);
    }

    #[test]
    fn necessity_degenerate_pair_is_infinite() {
        let inst = LowerBoundInstance {
            points: PointSet::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap(),
            part_a: vec![0],
            part_b: vec![1],
            eps: 0.1,
            copies: 1,
            points_per_copy: 2,
            copy_step: 12.0,
        };
        let report = verify_lower_bound_necessity(&inst).unwrap();
        assert_eq!(report.checked_edges, 1);
        assert!(report.min_ratio.is_infinite());
        assert!(report.all_necessary);
        assert!(report.witness.is_none());
    }

    #[test]
    fn necessity_rejects_multiple_copies() {
        let inst = gen_euclidean_lower_bound(2, 0.1, 2).unwrap();
        assert!(verify_lower_bound_necessity(&inst).is_err());
    }

    #[test]
    fn h_tree_depth_one_layout() {
        let inst = gen_h_tree(1).unwrap();
        assert_eq!(inst.n_tree, 3);
        assert_eq!(inst.tree_edges.len(), 2);
        assert_eq!(inst.points.point(0), &[0.0, 0.0]);
        assert_eq!(inst.points.point(1), &[-1.0, 0.0]);
        assert_eq!(inst.points.point(2), &[1.0, 0.0]);
        // log2(3) = 1.585, so 8 * 1 * log2(3) = 12.68 needs 12 interiors.
        let expected = (8.0 * (3.0f64).log2()).ceil() as usize - 1;
        assert!(inst.subdivision_counts.iter().all(|&k| k == expected));
        assert_eq!(inst.points.len(), 3 + 2 * expected);
    }

    #[test]
    fn h_tree_invariants_recompute_from_coordinates() {
        for depth in [1, 2, 3, 4] {
            let inst = gen_h_tree(depth).unwrap();
            assert!(!inst.points.has_duplicate_points(), "depth {depth}");
            let budget = inst.per_edge_budget();
            for edge in &inst.tree_edges {
                let cost = inst.edge_cost(edge);
                assert!(cost <= budget + 1e-9, "depth {depth}: {cost} > {budget}");
                let formula = edge.length * edge.length / (edge.interior + 1) as f64;
                assert!((cost - formula).abs() <= 1e-9 * formula.max(1.0));
            }
            for a in 0..inst.n_tree {
                for b in (a + 1)..inst.n_tree {
                    assert!(inst.tree_path_cost(a, b) <= 0.25 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn h_tree_rejects_bad_depth() {
        assert!(gen_h_tree(0).is_err());
        assert!(gen_h_tree(11).is_err());
    }

    #[test]
    fn doubling_single_point_is_zero() {
        let ps = PointSet::new(1, vec![0.0]).unwrap();
        let dm = MetricParams::power(2.0).unwrap().matrix(&ps).unwrap();
        let report = estimate_doubling_dimension(&ps, &dm, &[1.0]).unwrap();
        assert_eq!(report.lambda, 1);
        assert_eq!(report.dim_estimate, 0.0);
    }

    #[test]
    fn doubling_unit_grid_stays_small() {
        // On a unit-spaced grid the edge-squared closure walks unit steps,
        // so d_2(i, j) = |i - j| and balls are intervals.
        let ps = PointSet::new(1, (0..32).map(f64::from).collect()).unwrap();
        let dm = MetricParams::power(2.0).unwrap().matrix(&ps).unwrap();
        let report = estimate_doubling_dimension(&ps, &dm, &[4.0, 8.0]).unwrap();
        assert!(report.lambda <= 4, "lambda = {}", report.lambda);
        assert!(report.dim_estimate <= 2.0);
    }

    #[test]
    fn doubling_validates_inputs() {
        let ps = PointSet::new(1, vec![0.0, 1.0]).unwrap();
        let dm = MetricParams::power(2.0).unwrap().matrix(&ps).unwrap();
        assert!(estimate_doubling_dimension(&ps, &dm, &[]).is_err());
        assert!(estimate_doubling_dimension(&ps, &dm, &[-1.0]).is_err());
        let other = PointSet::new(1, vec![0.0]).unwrap();
        assert!(estimate_doubling_dimension(&other, &dm, &[1.0]).is_err());
    }
}
