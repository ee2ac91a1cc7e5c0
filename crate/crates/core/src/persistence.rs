//! Filtration membership and intrinsic Čech edge births.
//!
//! The sublevel filtration of the distance-to-sample function coincides,
//! after the time change `alpha -> 2 * alpha^2`, with the sublevel
//! filtration of half the edge-squared distance. Membership probes check
//! both clocks; Čech edges carry births on the intrinsic clock.
//!
//! The squared clock (entry time `2 * r^2` rather than `2 * r`) is the
//! dimensionally consistent reading: traversal speed scales linearly with
//! the distance to the sample, so entry times integrate to squared lengths.
//! The membership probes exist precisely to keep that choice checkable.

use serde::{Deserialize, Serialize};

use crate::metrics::MetricParams;
use crate::model::PointSet;
use crate::{Error, Result};

/// Euclidean distance from `x` to the nearest sample point.
pub fn nearest_distance(ps: &PointSet, x: &[f64]) -> Result<f64> {
    if x.len() != ps.dim() {
        return Err(Error::DimensionMismatch { expected: ps.dim(), got: x.len() });
    }
    let mut best = f64::INFINITY;
    for p in ps.iter() {
        let sq: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        best = best.min(sq);
    }
    Ok(best.sqrt())
}

/// A membership probe: the query, its nearest-sample distance, and the
/// equivalent entry time on the squared clock.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationProbe {
    pub query: Vec<f64>,
    /// Distance to the nearest sample point.
    pub r: f64,
    /// Entry time on the squared clock, `2 * r^2`.
    pub dn_min: f64,
}

impl FiltrationProbe {
    pub fn new(ps: &PointSet, x: &[f64]) -> Result<Self> {
        let r = nearest_distance(ps, x)?;
        Ok(FiltrationProbe { query: x.to_vec(), r, dn_min: 2.0 * r * r })
    }
}

/// Tests whether `x` belongs to the offset at scale `alpha`, on both
/// clocks: `(r <= alpha, dn_min <= 2 * alpha^2)`. The two answers must
/// agree for every `alpha >= 0`.
pub fn filtration_membership(ps: &PointSet, x: &[f64], alpha: f64) -> Result<(bool, bool)> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::param("alpha", format!("{alpha} must be non-negative")));
    }
    let probe = FiltrationProbe::new(ps, x)?;
    Ok((probe.r <= alpha, probe.dn_min <= 2.0 * alpha * alpha))
}

/// An edge of the intrinsic Čech complex with its birth scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CechEdge {
    pub u: usize,
    pub v: usize,
    pub birth: f64,
}

/// All pairwise edges with intrinsic births `d_2(u, v) / 2`, sorted by
/// ascending `(birth, u, v)`. Zero-dimensional merges under this order
/// reproduce single-linkage clustering in the edge-squared metric.
pub fn intrinsic_cech_edges(ps: &PointSet) -> Result<Vec<CechEdge>> {
    let dm = MetricParams::power(2.0)?.matrix(ps)?;
    let n = ps.len();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push(CechEdge { u, v, birth: dm.get(u, v) / 2.0 });
        }
    }
    edges.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.u.cmp(&b.u)).then(a.v.cmp(&b.v)));
    Ok(edges)
}
