//! Isometric lifting onto box vertices.
//!
//! Order the points by nondecreasing edge-squared distance from a source.
//! Each step climbs one new coordinate axis by the square root of the
//! distance increment, so every image is a vertex of an axis-aligned box and
//! image distances reproduce edge-squared distance differences from the
//! source exactly.

use crate::metrics::{pairwise_powers, power_metric, sssp_dense, MetricParams, Relax};
use crate::model::PointSet;
use crate::tol::{rel_eq, REL_TOL};
use crate::{Error, Result};

/// The lifting of a point set from a fixed source.
///
/// Images live in `R^n`; the image of the point with rank `r` has coordinate
/// `k` equal to `side_lengths[k]` for `k <= r` and zero above, so images are
/// stored as the shared `side_lengths` prefix vector rather than dense rows.
#[derive(Clone, Debug)]
pub struct LiftingMap {
    source: usize,
    order: Vec<usize>,
    source_dists: Vec<f64>,
    side_lengths: Vec<f64>,
    rank: Vec<usize>,
}

impl LiftingMap {
    #[must_use]
    pub fn source(&self) -> usize {
        self.source
    }

    /// Point indices sorted by nondecreasing edge-squared distance from the
    /// source (ties by index).
    #[must_use]
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Edge-squared distance from the source, in rank order.
    #[must_use]
    pub fn source_dists(&self) -> &[f64] {
        &self.source_dists
    }

    /// Box side lengths; entry `r` is the step taken at rank `r`
    /// (`side_lengths[0] = 0`).
    #[must_use]
    pub fn side_lengths(&self) -> &[f64] {
        &self.side_lengths
    }

    /// Rank of an original point index in the source-distance order.
    #[must_use]
    pub fn rank_of(&self, point: usize) -> usize {
        self.rank[point]
    }

    /// Materializes the image of one original point as a dense `R^n` vector.
    #[must_use]
    pub fn image_of(&self, point: usize) -> Vec<f64> {
        let n = self.order.len();
        let r = self.rank[point];
        let mut v = vec![0.0; n];
        v[..=r].copy_from_slice(&self.side_lengths[..=r]);
        v
    }

    /// Materializes all images, row `i` holding the image of original point
    /// `i`.
    #[must_use]
    pub fn image_point_set(&self) -> PointSet {
        let n = self.order.len();
        let mut coords = Vec::with_capacity(n * n);
        for i in 0..n {
            coords.extend_from_slice(&self.image_of(i));
        }
        PointSet::new(n, coords).expect("images are finite by construction")
    }
}

/// Builds the lifting map of `ps` from `source`.
pub fn build_lifting_map(ps: &PointSet, source: usize) -> Result<LiftingMap> {
    let n = ps.len();
    if source >= n {
        return Err(Error::param("source", format!("index {source} out of range for n = {n}")));
    }
    let w = pairwise_powers(ps, 2.0);
    let d = sssp_dense(n, &w, source, Relax::Sum, None);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let source_dists: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut side_lengths = vec![0.0; n];
    for r in 1..n {
        side_lengths[r] = (source_dists[r] - source_dists[r - 1]).max(0.0).sqrt();
    }
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    Ok(LiftingMap { source, order, source_dists, side_lengths, rank })
}

/// Verification outcome for one lifting map.
#[derive(Clone, Copy, Debug)]
pub struct LiftingReport {
    /// No image pair is farther apart than the original pair (up to 1e-9
    /// absolute slack).
    pub lipschitz_ok: bool,
    pub max_lipschitz_excess: f64,
    /// Stored order, source distances, and side lengths match a fresh
    /// recomputation, and every image sits on a box vertex.
    pub box_ok: bool,
    /// The edge-squared metric of the image set reproduces the source row.
    pub source_row_ok: bool,
    pub max_source_row_error: f64,
}

impl LiftingReport {
    #[must_use]
    pub fn all_ok(&self) -> bool {
        self.lipschitz_ok && self.box_ok && self.source_row_ok
    }
}

/// Checks the three lifting-map properties against `ps`, recomputing source
/// distances from scratch rather than trusting the stored ones.
pub fn verify_lifting_properties(ps: &PointSet, lm: &LiftingMap) -> Result<LiftingReport> {
    let n = ps.len();
    if lm.order.len() != n {
        return Err(Error::param("lifting", format!("map covers {} points, set has {n}", lm.order.len())));
    }

    let w = pairwise_powers(ps, 2.0);
    let fresh = sssp_dense(n, &w, lm.source, Relax::Sum, None);
    let mut box_ok = true;
    let mut seen = vec![false; n];
    for r in 0..n {
        let i = lm.order[r];
        seen[i] = true;
        if !rel_eq(fresh[i], lm.source_dists[r], REL_TOL) {
            box_ok = false;
        }
        if r > 0 {
            if lm.source_dists[r] < lm.source_dists[r - 1] {
                box_ok = false;
            }
            let expect = (fresh[lm.order[r]] - fresh[lm.order[r - 1]]).max(0.0).sqrt();
            if !rel_eq(lm.side_lengths[r], expect, REL_TOL) {
                box_ok = false;
            }
        }
    }
    if lm.side_lengths[0] != 0.0 || !seen.iter().all(|&s| s) {
        box_ok = false;
    }
    let images: Vec<Vec<f64>> = (0..n).map(|i| lm.image_of(i)).collect();
    for (i, im) in images.iter().enumerate() {
        let r = lm.rank[i];
        for (k, &coord) in im.iter().enumerate() {
            let expect = if k <= r { lm.side_lengths[k] } else { 0.0 };
            if coord != expect {
                box_ok = false;
            }
        }
    }

    let mut max_excess = f64::NEG_INFINITY;
    for a in 0..n {
        for b in (a + 1)..n {
            let mut sq = 0.0;
            for (xa, xb) in images[a].iter().zip(&images[b]) {
                let d = xa - xb;
                sq += d * d;
            }
            max_excess = max_excess.max(sq.sqrt() - ps.dist(a, b));
        }
    }
    if n == 1 {
        max_excess = 0.0;
    }
    let lipschitz_ok = max_excess <= 1e-9;

    let image_metric = power_metric(&lm.image_point_set(), MetricParams::power(2.0)?)?;
    let mut max_err = 0.0f64;
    let mut source_row_ok = true;
    for (j, &want) in fresh.iter().enumerate() {
        let got = image_metric.get(lm.source, j);
        if !rel_eq(got, want, REL_TOL) {
            source_row_ok = false;
        }
        let scale = want.abs().max(got.abs()).max(1e-300);
        max_err = max_err.max((got - want).abs() / scale);
    }

    Ok(LiftingReport {
        lipschitz_ok,
        max_lipschitz_excess: max_excess,
        box_ok,
        source_row_ok,
        max_source_row_error: max_err,
    })
}
