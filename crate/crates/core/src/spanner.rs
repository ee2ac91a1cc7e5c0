//! WSPD-based (1 + eps)-spanners for the p-power metrics.
//!
//! One approximately closest edge per well-separated pair at separation
//! `1/delta`, `delta = sqrt(eps / C)`. The calibration constant `C` absorbs
//! the stretch-chain constants; certification against the exact metric is
//! the backstop when `C` is pushed too low.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::experiments::{derive_seed, sample, SamplerKind, SamplerSpec};
use crate::metrics::{stretch, MetricParams, StretchReport};
use crate::model::{PointSet, WeightedGraph};
use crate::wspd::{approx_closest_edge, build_split_tree, build_wspd, SelectionMode};
use crate::{Error, Result};

/// Default calibration constant `C` in `delta = sqrt(eps / C)`.
pub const DEFAULT_CALIBRATION: f64 = 32.0;

/// Spanner construction parameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpannerConfig {
    pub epsilon: f64,
    /// Calibration constant `C`; smaller is sparser but risks failing
    /// certification.
    pub calibration: f64,
    pub mode: SelectionMode,
    /// Edge-weight exponent; the stretch guarantee is calibrated for 2 and
    /// other powers are experimental.
    pub metric_power: f64,
}

impl SpannerConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::param("epsilon", format!("{epsilon} must be finite and positive")));
        }
        Ok(SpannerConfig {
            epsilon,
            calibration: DEFAULT_CALIBRATION,
            mode: SelectionMode::Exact,
            metric_power: 2.0,
        })
    }

    pub fn with_calibration(mut self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::param("calibration", format!("{c} must be finite and positive")));
        }
        self.calibration = c;
        Ok(self)
    }

    #[must_use]
    pub fn with_mode(mut self, mode: SelectionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_metric_power(mut self, p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::param("p", format!("power {p} must be finite and at least 1")));
        }
        self.metric_power = p;
        Ok(self)
    }

    /// `delta = sqrt(eps / C)`, the grid scale and inverse separation.
    #[must_use]
    pub fn delta(&self) -> f64 {
        (self.epsilon / self.calibration).sqrt()
    }

    /// WSPD separation `s = 1 / delta`.
    #[must_use]
    pub fn separation(&self) -> f64 {
        1.0 / self.delta()
    }
}

/// Wall-clock phase timings; in-memory only, excluded from serialized stats
/// so reruns stay byte-identical.
#[derive(Clone, Copy, Debug, Default)]
pub struct Timings {
    pub split_tree_ms: f64,
    pub wspd_ms: f64,
    pub selection_ms: f64,
    pub total_ms: f64,
}

/// Construction statistics echoed into reports.
#[derive(Clone, Debug, Serialize)]
pub struct BuildStats {
    pub n: usize,
    pub tree_nodes: usize,
    pub pair_count: usize,
    pub delta: f64,
    pub separation: f64,
    pub mode: SelectionMode,
    pub metric_power: f64,
    /// Set for any `metric_power != 2`: no stretch guarantee backs those.
    pub experimental: bool,
    #[serde(skip)]
    pub timings: Timings,
}

/// A built spanner plus its statistics.
#[derive(Clone, Debug)]
pub struct SpannerResult {
    pub graph: WeightedGraph,
    pub pair_count: usize,
    pub edges_per_point: f64,
    pub stats: BuildStats,
    pub certified_stretch: Option<f64>,
}

/// Builds the spanner: one near-closest edge per well-separated pair,
/// weighted by `|u - v|^metric_power`.
pub fn build_spanner(ps: &PointSet, cfg: &SpannerConfig) -> Result<SpannerResult> {
    if cfg.metric_power != 2.0 {
        log::warn!(
            "spanner with metric_power {} is experimental: the stretch calibration covers p = 2",
            cfg.metric_power
        );
    }
    let n = ps.len();
    let t0 = Instant::now();
    let tree = build_split_tree(ps)?;
    let t1 = Instant::now();
    let wspd = build_wspd(&tree, cfg.separation())?;
    let t2 = Instant::now();
    let chosen = wspd
        .pairs
        .par_iter()
        .map(|&(a, b)| approx_closest_edge(ps, &tree, a, b, cfg.mode, cfg.delta()))
        .collect::<Result<Vec<_>>>()?;
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in &chosen {
        let key = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
        edges.insert(key);
    }
    let graph = WeightedGraph::new(
        n,
        edges.iter().map(|&(u, v)| {
            let sq = ps.sq_dist(u, v);
            let w = if cfg.metric_power == 2.0 { sq } else { sq.powf(cfg.metric_power / 2.0) };
            (u, v, w)
        }),
    )?;
    let t3 = Instant::now();
    let timings = Timings {
        split_tree_ms: ms(t0, t1),
        wspd_ms: ms(t1, t2),
        selection_ms: ms(t2, t3),
        total_ms: ms(t0, t3),
    };
    let pair_count = wspd.pairs.len();
    Ok(SpannerResult {
        edges_per_point: graph.edge_count() as f64 / n as f64,
        pair_count,
        stats: BuildStats {
            n,
            tree_nodes: tree.node_count(),
            pair_count,
            delta: cfg.delta(),
            separation: cfg.separation(),
            mode: cfg.mode,
            metric_power: cfg.metric_power,
            experimental: cfg.metric_power != 2.0,
            timings,
        },
        graph,
        certified_stretch: None,
    })
}

fn ms(from: Instant, to: Instant) -> f64 {
    to.duration_since(from).as_secs_f64() * 1e3
}

/// Certifies a built spanner against the exact p-power metric, storing and
/// returning the worst stretch.
pub fn certify(ps: &PointSet, result: &mut SpannerResult, cfg: &SpannerConfig) -> Result<StretchReport> {
    let base = MetricParams::power(cfg.metric_power)?.matrix(ps)?;
    let report = stretch(&base, &result.graph)?;
    result.certified_stretch = Some(report.max_stretch);
    Ok(report)
}

/// One (dim, epsilon) cell of the size-scaling study.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScalingCell {
    pub dim: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub mean_pair_count: f64,
    pub mean_edges_per_point: f64,
}

/// Size-scaling study results with per-dimension log-log fits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingReport {
    pub n: usize,
    pub seed: u64,
    pub mode: SelectionMode,
    pub cells: Vec<ScalingCell>,
    /// Per dimension, the fitted exponent `b` in
    /// `edges_per_point ~ eps^(-b)`.
    pub fitted_exponents: Vec<(usize, f64)>,
}

/// Measures spanner size on uniform cubes across dimensions and epsilons and
/// fits the growth exponent per dimension. Deterministic for a fixed seed.
pub fn size_scaling_study(
    dims: &[usize],
    epsilons: &[f64],
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ScalingReport> {
    if dims.is_empty() || epsilons.is_empty() || trials == 0 {
        return Err(Error::param("study", "dims, epsilons, and trials must be non-empty"));
    }
    if n < 2 {
        return Err(Error::param("n", "need at least two points"));
    }
    let mode = SelectionMode::Grid;
    let mut cells = Vec::new();
    for (di, &dim) in dims.iter().enumerate() {
        for (ei, &eps) in epsilons.iter().enumerate() {
            let cfg = SpannerConfig::new(eps)?.with_mode(mode);
            let mut pair_sum = 0.0;
            let mut epp_sum = 0.0;
            for trial in 0..trials {
                let spec = SamplerSpec {
                    kind: SamplerKind::UniformSquare,
                    dim,
                    seed: derive_seed(seed, &[di as u64, ei as u64, trial as u64]),
                };
                let ps = sample(&spec, n)?;
                let result = build_spanner(&ps, &cfg)?;
                pair_sum += result.pair_count as f64;
                epp_sum += result.edges_per_point;
            }
            cells.push(ScalingCell {
                dim,
                epsilon: eps,
                trials,
                mean_pair_count: pair_sum / trials as f64,
                mean_edges_per_point: epp_sum / trials as f64,
            });
        }
    }
    let mut fitted = Vec::new();
    for &dim in dims {
        let points: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.dim == dim)
            .map(|c| (c.epsilon.ln(), c.mean_edges_per_point.ln()))
            .collect();
        fitted.push((dim, -least_squares_slope(&points)));
    }
    Ok(ScalingReport { n, seed, mode, cells, fitted_exponents: fitted })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}
