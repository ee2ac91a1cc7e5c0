//! Exact shortest-path power metrics.
//!
//! `power_metric` closes the complete graph whose edge `(i, j)` weighs
//! `|p_i - p_j|^p`; the normalized variant raises closure values to `1/p`.
//! `minimax_distance` is the bottleneck closure (max edge on the best path),
//! which the normalized family approaches as `p` grows. All-pairs closure
//! runs one dense Dijkstra per source, settling ties by lowest index.

mod lifting;

pub use lifting::{build_lifting_map, verify_lifting_properties, LiftingMap, LiftingReport};

use rayon::prelude::*;

use crate::model::{DistanceMatrix, PointSet, WeightedGraph};
use crate::tol::{rel_le, REL_TOL};
use crate::{Error, Result};

/// Selects a member of the power-metric family.
///
/// `p` must be at least 1; `p = INFINITY` with `normalized = true` selects
/// the minimax (bottleneck) metric, and is rejected without normalization
/// because raw infinite powers are meaningless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricParams {
    p: f64,
    normalized: bool,
}

impl MetricParams {
    pub fn new(p: f64, normalized: bool) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::param("p", format!("power {p} must be at least 1")));
        }
        if p.is_infinite() && !normalized {
            return Err(Error::param("p", "infinite power requires the normalized form"));
        }
        Ok(MetricParams { p, normalized })
    }

    /// Raw p-power metric (closure of `|.|^p` weights).
    pub fn power(p: f64) -> Result<Self> {
        MetricParams::new(p, false)
    }

    /// Normalized p-power metric (closure values raised to `1/p`).
    pub fn normalized(p: f64) -> Result<Self> {
        MetricParams::new(p, true)
    }

    /// The minimax (bottleneck) metric, the normalized `p -> INFINITY` limit.
    #[must_use]
    pub fn minimax() -> Self {
        MetricParams { p: f64::INFINITY, normalized: true }
    }

    #[must_use]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[must_use]
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[must_use]
    pub fn is_minimax(&self) -> bool {
        self.p.is_infinite()
    }

    /// Computes the selected metric for a point set.
    pub fn matrix(&self, ps: &PointSet) -> Result<DistanceMatrix> {
        if self.is_minimax() {
            minimax_distance(ps)
        } else {
            power_metric(ps, *self)
        }
    }
}

/// All-pairs p-power shortest-path closure. Requires finite `p >= 1`; use
/// [`minimax_distance`] for the bottleneck limit.
pub fn power_metric(ps: &PointSet, params: MetricParams) -> Result<DistanceMatrix> {
    if params.is_minimax() {
        return Err(Error::param("p", "power_metric requires finite p; use minimax_distance"));
    }
    let n = ps.len();
    let w = pairwise_powers(ps, params.p());
    let mut m = closure(n, &w, Relax::Sum);
    if params.normalized {
        let inv = 1.0 / params.p();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = m.get(i, j).powf(inv);
                m.set(i, j, v);
            }
        }
    }
    Ok(m)
}

/// All-pairs minimax (bottleneck) distance: the smallest possible maximum
/// Euclidean edge over paths in the complete graph.
pub fn minimax_distance(ps: &PointSet) -> Result<DistanceMatrix> {
    let n = ps.len();
    let w = pairwise_powers(ps, 1.0);
    Ok(closure(n, &w, Relax::Max))
}

/// Maximum stretch of `g` against a base metric, with a witnessing pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StretchReport {
    pub max_stretch: f64,
    pub pair: Option<(usize, usize)>,
}

/// Compares the shortest-path closure of `g` against `base` entrywise and
/// returns the worst ratio. Disconnected pairs give infinite stretch with a
/// witnessing pair.
pub fn stretch(base: &DistanceMatrix, g: &WeightedGraph) -> Result<StretchReport> {
    let n = base.n();
    if g.n() != n {
        return Err(Error::InvalidGraph(format!(
            "graph has {} vertices but base metric has {n}",
            g.n()
        )));
    }
    if n <= 1 {
        return Ok(StretchReport { max_stretch: 1.0, pair: None });
    }
    let adj = g.adjacency();
    let per_source: Vec<(f64, Option<(usize, usize)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let d = sssp_sparse(&adj, i);
            let mut best = (f64::NEG_INFINITY, None);
            for (j, &dj) in d.iter().enumerate().skip(i + 1) {
                let ratio = pair_stretch(base.get(i, j), dj);
                if ratio > best.0 {
                    best = (ratio, Some((i, j)));
                }
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, None);
    for s in per_source {
        if s.0 > best.0 {
            best = s;
        }
    }
    Ok(StretchReport { max_stretch: best.0, pair: best.1 })
}

fn pair_stretch(base: f64, in_graph: f64) -> f64 {
    if in_graph.is_infinite() {
        return f64::INFINITY;
    }
    if base == 0.0 {
        if in_graph == 0.0 {
            return 1.0;
        }
        return f64::INFINITY;
    }
    in_graph / base
}

/// One power step of [`normalized_power_limit_check`].
#[derive(Clone, Copy, Debug)]
pub struct PowerLimitRow {
    pub p: f64,
    /// `max_{i<j} |normalized_p(i, j) - minimax(i, j)|`.
    pub max_gap: f64,
}

/// Outcome of the normalized-limit sweep.
#[derive(Clone, Debug)]
pub struct PowerLimitReport {
    pub rows: Vec<PowerLimitRow>,
    /// Pairs at some step whose normalized value increased beyond tolerance.
    pub monotone_violations: usize,
    /// Pairs at some step that dipped below the minimax floor beyond tolerance.
    pub floor_violations: usize,
    /// Gap at the largest power.
    pub final_gap: f64,
    /// Euclidean diameter of the input, for scale-relative gap checks.
    pub diameter: f64,
}

/// Sweeps a strictly increasing power sequence and checks that the
/// normalized metric is nonincreasing in `p` and bounded below by the
/// minimax metric, reporting the residual gap at each step.
pub fn normalized_power_limit_check(ps: &PointSet, powers: &[f64]) -> Result<PowerLimitReport> {
    if powers.is_empty() {
        return Err(Error::param("powers", "sequence must be non-empty"));
    }
    for w in powers.windows(2) {
        if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::param("powers", "sequence must be strictly increasing"));
        }
    }
    let minimax = minimax_distance(ps)?;
    let n = ps.len();
    let mut rows = Vec::with_capacity(powers.len());
    let mut prev: Option<DistanceMatrix> = None;
    let mut monotone_violations = 0;
    let mut floor_violations = 0;
    for &p in powers {
        let m = power_metric(ps, MetricParams::normalized(p)?)?;
        let mut max_gap = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = m.get(i, j);
                let floor = minimax.get(i, j);
                max_gap = max_gap.max((v - floor).abs());
                if !rel_le(floor, v, REL_TOL) {
                    floor_violations += 1;
                }
                if let Some(prev) = &prev {
                    if !rel_le(v, prev.get(i, j), REL_TOL) {
                        monotone_violations += 1;
                    }
                }
            }
        }
        rows.push(PowerLimitRow { p, max_gap });
        prev = Some(m);
    }
    let mut diameter = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            diameter = diameter.max(ps.dist(i, j));
        }
    }
    let final_gap = rows.last().map_or(0.0, |r| r.max_gap);
    Ok(PowerLimitReport { rows, monotone_violations, floor_violations, final_gap, diameter })
}

/// Result of the subgraph 1-spanner test against the edge-squared metric.
#[derive(Clone, Copy, Debug)]
pub struct OneSpannerCheck {
    pub holds: bool,
    /// Worst relative excess of the subgraph closure over the direct squared
    /// distance; infinite when disconnected.
    pub worst_excess: f64,
    pub witness: Option<(usize, usize)>,
}

/// Tests whether a subgraph of the complete squared-distance graph closes to
/// exactly the edge-squared metric.
///
/// The closure equals `d_2` iff it never exceeds the direct squared distance
/// of any pair: split a shortest `d_2` path at its hops and bound each hop
/// inside the subgraph closure. That dodges the dense all-pairs closure, and
/// agrees with `stretch(power_metric(ps, 2), g) <= 1` up to tolerance.
pub fn edge_squared_one_spanner_check(ps: &PointSet, g: &WeightedGraph) -> Result<OneSpannerCheck> {
    let n = ps.len();
    if g.n() != n {
        return Err(Error::InvalidGraph(format!("graph has {} vertices, point set has {n}", g.n())));
    }
    let adj = g.adjacency();
    let per_source: Vec<(f64, Option<(usize, usize)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let d = sssp_sparse(&adj, i);
            let mut worst = (f64::NEG_INFINITY, None);
            for (j, &dj) in d.iter().enumerate().skip(i + 1) {
                let sq = ps.sq_dist(i, j);
                let excess = if sq == 0.0 {
                    if dj == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    dj / sq - 1.0
                };
                if excess > worst.0 {
                    worst = (excess, Some((i, j)));
                }
            }
            worst
        })
        .collect();
    let mut worst = (f64::NEG_INFINITY, None);
    for s in per_source {
        if s.0 > worst.0 {
            worst = s;
        }
    }
    let worst_excess = if n <= 1 { 0.0 } else { worst.0 };
    Ok(OneSpannerCheck { holds: worst_excess <= REL_TOL, worst_excess, witness: worst.1 })
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum Relax {
    /// Additive path cost.
    Sum,
    /// Bottleneck path cost (max edge).
    Max,
}

/// Dense pairwise `|p_i - p_j|^power` weight matrix, row-major.
pub(crate) fn pairwise_powers(ps: &PointSet, power: f64) -> Vec<f64> {
    let n = ps.len();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let sq = ps.sq_dist(i, j);
            let v = if power == 2.0 {
                sq
            } else if power == 1.0 {
                sq.sqrt()
            } else {
                sq.powf(power / 2.0)
            };
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    w
}

/// All-pairs closure of a dense weight matrix: one Dijkstra per source,
/// merged in index order, symmetrized by the smaller of the two directions.
pub(crate) fn closure(n: usize, w: &[f64], relax: Relax) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| sssp_dense(n, w, s, relax, None))
        .collect();
    let mut m = DistanceMatrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        m.row_mut(i).copy_from_slice(row);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m.get(i, j).min(m.get(j, i));
            m.set(i, j, v);
        }
    }
    m
}

/// Dense single-source shortest paths over an implicit complete graph.
/// `skip` forbids one undirected edge (for detour queries). Ties in the
/// extraction step settle the lowest index first.
pub(crate) fn sssp_dense(
    n: usize,
    w: &[f64],
    src: usize,
    relax: Relax,
    skip: Option<(usize, usize)>,
) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let row = &w[u * n..(u + 1) * n];
        for v in 0..n {
            if done[v] {
                continue;
            }
            if let Some((a, b)) = skip {
                if (u == a && v == b) || (u == b && v == a) {
                    continue;
                }
            }
            let nd = match relax {
                Relax::Sum => best + row[v],
                Relax::Max => best.max(row[v]),
            };
            if nd < dist[v] {
                dist[v] = nd;
            }
        }
    }
    dist
}

/// Binary-heap Dijkstra over adjacency lists; unreachable vertices stay
/// infinite.
pub(crate) fn sssp_sparse(adj: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    use ordered_float::OrderedFloat;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse((OrderedFloat(0.0), src)));
    while let Some(Reverse((OrderedFloat(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((OrderedFloat(nd), v)));
            }
        }
    }
    dist
}
