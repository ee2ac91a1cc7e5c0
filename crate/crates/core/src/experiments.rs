//! Seeded samplers and the k-NN 1-spanner experiment harnesses.
//!
//! Everything here is deterministic for a fixed seed: per-trial seeds are
//! derived from the root seed by index, and parallel trials merge in order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::metrics::edge_squared_one_spanner_check;
use crate::model::PointSet;
use crate::proximity::{gabriel_graph, knn_graph};
use crate::{Error, Result};

/// Epsilon in the nearest-neighbor dilation bound
/// `1 - (1 - (1 - eps) / 2^d)^k`.
pub const BOUND_EPSILON: f64 = 0.1;

/// Derives a child seed from a root seed and an index path (splitmix-style).
#[must_use]
pub fn derive_seed(root: u64, tags: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut x = mix(root.wrapping_add(0x9E37_79B9_7F4A_7C15));
    for &t in tags {
        x = mix(x ^ t.wrapping_add(0x9E37_79B9_7F4A_7C15));
    }
    x
}

/// Point distributions for experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Uniform on the unit cube `[0, 1]^d`.
    UniformSquare,
    /// Uniform on the unit ball (normalized Gaussian direction, radius
    /// `U^(1/d)`).
    UniformBall,
    /// Uniform on the annulus between two radii.
    Annulus { inner: f64, outer: f64 },
    /// Equal-weight Gaussian modes spaced along the first axis; the
    /// negative control for neighborhood-based claims.
    GaussianMixture { modes: usize, separation: f64, sigma: f64 },
}

impl SamplerKind {
    fn validate(&self) -> Result<()> {
        match *self {
            SamplerKind::UniformSquare | SamplerKind::UniformBall => Ok(()),
            SamplerKind::Annulus { inner, outer } => {
                if !(inner >= 0.0 && outer > inner && outer.is_finite()) {
                    return Err(Error::param(
                        "annulus",
                        format!("need 0 <= inner < outer, got {inner}..{outer}"),
                    ));
                }
                Ok(())
            }
            SamplerKind::GaussianMixture { modes, separation, sigma } => {
                if modes == 0 {
                    return Err(Error::param("mixture", "need at least one mode"));
                }
                if !(sigma > 0.0 && sigma.is_finite() && separation.is_finite() && separation >= 0.0) {
                    return Err(Error::param(
                        "mixture",
                        format!("need sigma > 0 and separation >= 0, got {sigma}, {separation}"),
                    ));
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    /// `uniform-square`, `uniform-ball`, `annulus:INNER:OUTER`, or
    /// `gaussian-mixture:MODES:SEPARATION:SIGMA`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let bad = |msg: String| Error::param("sampler", msg);
        let kind = match (head, rest.len()) {
            ("uniform-square", 0) => SamplerKind::UniformSquare,
            ("uniform-ball", 0) => SamplerKind::UniformBall,
            ("annulus", 2) => SamplerKind::Annulus {
                inner: rest[0].parse().map_err(|_| bad(format!("bad inner {:?}", rest[0])))?,
                outer: rest[1].parse().map_err(|_| bad(format!("bad outer {:?}", rest[1])))?,
            },
            ("gaussian-mixture", 3) => SamplerKind::GaussianMixture {
                modes: rest[0].parse().map_err(|_| bad(format!("bad modes {:?}", rest[0])))?,
                separation: rest[1].parse().map_err(|_| bad(format!("bad separation {:?}", rest[1])))?,
                sigma: rest[2].parse().map_err(|_| bad(format!("bad sigma {:?}", rest[2])))?,
            },
            _ => return Err(bad(format!("unknown sampler {s:?}"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// A sampler plus dimension and seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    #[serde(flatten)]
    pub kind: SamplerKind,
    pub dim: usize,
    pub seed: u64,
}

/// Draws `n` points. Identical spec and `n` reproduce identical coordinates.
pub fn sample(spec: &SamplerSpec, n: usize) -> Result<PointSet> {
    spec.kind.validate()?;
    if spec.dim == 0 {
        return Err(Error::param("dim", "must be at least 1"));
    }
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let d = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coords = Vec::with_capacity(n * d);
    match spec.kind {
        SamplerKind::UniformSquare => {
            for _ in 0..n * d {
                coords.push(rng.random::<f64>());
            }
        }
        SamplerKind::UniformBall => {
            for _ in 0..n {
                let dir = gaussian_direction(&mut rng, d);
                let r = rng.random::<f64>().powf(1.0 / d as f64);
                coords.extend(dir.iter().map(|x| r * x));
            }
        }
        SamplerKind::Annulus { inner, outer } => {
            let (ilo, ihi) = (inner.powi(d as i32), outer.powi(d as i32));
            for _ in 0..n {
                let dir = gaussian_direction(&mut rng, d);
                let u = rng.random::<f64>();
                let r = (ilo + u * (ihi - ilo)).powf(1.0 / d as f64);
                coords.extend(dir.iter().map(|x| r * x));
            }
        }
        SamplerKind::GaussianMixture { modes, separation, sigma } => {
            for _ in 0..n {
                let m = rng.random_range(0..modes) as f64;
                for k in 0..d {
                    let center = if k == 0 { m * separation } else { 0.0 };
                    let z: f64 = rng.sample(StandardNormal);
                    coords.push(center + sigma * z);
                }
            }
        }
    }
    PointSet::new(d, coords)
}

pub(crate) fn gaussian_direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Generic experiment report: the config echo, one row per trial, and a
/// summary. Serializes as `{config, per_trial, summary}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport<C, T, S> {
    pub config: C,
    pub per_trial: Vec<T>,
    pub summary: S,
}

/// Configuration for the k-NN 1-spanner experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KnnSpannerTrialConfig {
    pub sampler: SamplerSpec,
    pub n: usize,
    /// Multiplier in `k = ceil(c * 2^d * ln n)`.
    pub c: f64,
    pub trials: usize,
}

impl KnnSpannerTrialConfig {
    /// The neighbor count `k = ceil(c * 2^d * ln n)` clamped to `[1, n-1]`;
    /// the flag reports whether clamping fired.
    #[must_use]
    pub fn k(&self) -> (usize, bool) {
        let raw = (self.c * (2.0f64).powi(self.sampler.dim as i32) * (self.n as f64).ln()).ceil();
        let clamped = (raw.max(1.0) as usize).min(self.n - 1);
        (clamped, clamped as f64 != raw)
    }
}

/// One trial of the k-NN 1-spanner experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KnnTrialRow {
    pub trial: usize,
    pub seed: u64,
    /// Whether every Gabriel edge appears in the k-NN graph.
    pub gabriel_subset: bool,
    pub missing_gabriel_edges: usize,
    /// Whether the k-NN closure reproduces the edge-squared metric.
    pub one_spanner: bool,
    /// Worst relative excess of the k-NN closure over `d_2`.
    pub worst_excess: f64,
}

/// Aggregates for the k-NN 1-spanner experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KnnSummary {
    pub k: usize,
    pub k_clamped: bool,
    pub one_spanner_rate: f64,
    pub gabriel_subset_rate: f64,
    /// Trials where Gabriel containment held but the 1-spanner test failed;
    /// the containment theorem says this must stay zero.
    pub implication_failures: usize,
}

/// Runs the k-NN 1-spanner experiment: per trial, sample, build the k-NN
/// graph with squared weights, and test Gabriel containment plus metric
/// equality.
pub fn knn_one_spanner_trial(
    cfg: &KnnSpannerTrialConfig,
) -> Result<ExperimentReport<KnnSpannerTrialConfig, KnnTrialRow, KnnSummary>> {
    if cfg.n < 2 {
        return Err(Error::param("n", "need at least two points"));
    }
    if cfg.trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(Error::param("c", format!("{} must be finite and positive", cfg.c)));
    }
    let (k, k_clamped) = cfg.k();
    if k_clamped {
        log::warn!("k clamped to {k} for n = {}", cfg.n);
    }
    let mut per_trial = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.sampler.seed, &[trial as u64]);
        let spec = SamplerSpec { seed, ..cfg.sampler };
        let ps = sample(&spec, cfg.n)?;
        let knn = knn_graph(&ps, k, 2.0)?;
        let gabriel = gabriel_graph(&ps)?;
        let missing = gabriel.edges().iter().filter(|e| !knn.contains_edge(e.u, e.v)).count();
        let check = edge_squared_one_spanner_check(&ps, &knn)?;
        per_trial.push(KnnTrialRow {
            trial,
            seed,
            gabriel_subset: missing == 0,
            missing_gabriel_edges: missing,
            one_spanner: check.holds,
            worst_excess: check.worst_excess,
        });
    }
    let rate = |f: fn(&KnnTrialRow) -> bool| {
        per_trial.iter().filter(|r| f(r)).count() as f64 / cfg.trials as f64
    };
    let summary = KnnSummary {
        k,
        k_clamped,
        one_spanner_rate: rate(|r| r.one_spanner),
        gabriel_subset_rate: rate(|r| r.gabriel_subset),
        implication_failures: per_trial.iter().filter(|r| r.gabriel_subset && !r.one_spanner).count(),
    };
    Ok(ExperimentReport { config: *cfg, per_trial, summary })
}

/// Configuration for the dilation probability trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbBoundConfig {
    pub sampler: SamplerSpec,
    pub n: usize,
    pub ks: Vec<usize>,
    pub trials: usize,
    pub pairs_per_trial: usize,
    /// Epsilon in the bound; defaults to [`BOUND_EPSILON`].
    pub epsilon: f64,
}

/// One `k` of the probability trace.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbBoundRow {
    pub k: usize,
    /// Fraction of counted pairs whose diameter ball holds a k-nearest
    /// neighbor of the anchor.
    pub empirical: f64,
    /// `1 - (1 - (1 - eps) / 2^d)^k`.
    pub bound: f64,
    pub counted: usize,
    /// Pairs closer than the k-NN radius, excluded from the census.
    pub excluded: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbBoundSummary {
    /// Smallest `empirical - bound` margin across the traced ks.
    pub min_margin: f64,
}

/// Traces the empirical probability that, for a sampled anchor `o` and a
/// far point `q`, the open ball with diameter `oq` contains one of `o`'s
/// `k` nearest neighbors, against the dilation lower bound. Valid for
/// uniform samplers in dimensions 1 and 2, where the bound is derived.
pub fn probability_bound_trace(
    cfg: &ProbBoundConfig,
) -> Result<ExperimentReport<ProbBoundConfig, ProbBoundRow, ProbBoundSummary>> {
    match cfg.sampler.kind {
        SamplerKind::UniformSquare | SamplerKind::UniformBall => {}
        _ => return Err(Error::param("sampler", "probability trace requires a uniform sampler")),
    }
    if !(1..=2).contains(&cfg.sampler.dim) {
        return Err(Error::param("dim", "probability trace covers dimensions 1 and 2"));
    }
    if cfg.trials == 0 || cfg.pairs_per_trial == 0 {
        return Err(Error::param("trials", "need at least one trial and one pair"));
    }
    let max_k = *cfg.ks.iter().max().ok_or_else(|| Error::param("ks", "must be non-empty"))?;
    if max_k == 0 || max_k >= cfg.n {
        return Err(Error::param("ks", format!("ks must lie in [1, {})", cfg.n)));
    }
    let d = cfg.sampler.dim;
    let mut counted = vec![0usize; cfg.ks.len()];
    let mut hit = vec![0usize; cfg.ks.len()];
    let mut excluded = vec![0usize; cfg.ks.len()];
    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.sampler.seed, &[trial as u64]);
        let ps = sample(&SamplerSpec { seed, ..cfg.sampler }, cfg.n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[u64::MAX]));
        for _ in 0..cfg.pairs_per_trial {
            let o = rng.random_range(0..cfg.n);
            let q = loop {
                let q = rng.random_range(0..cfg.n);
                if q != o {
                    break q;
                }
            };
            let mut neighbors: Vec<(f64, usize)> =
                (0..cfg.n).filter(|&w| w != o).map(|w| (ps.sq_dist(o, w), w)).collect();
            neighbors.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let oq = ps.sq_dist(o, q);
            for (ki, &k) in cfg.ks.iter().enumerate() {
                if oq <= neighbors[k - 1].0 {
                    excluded[ki] += 1;
                    continue;
                }
                counted[ki] += 1;
                let po = ps.point(o);
                let pq = ps.point(q);
                let inside = neighbors[..k].iter().any(|&(_, w)| {
                    let pw = ps.point(w);
                    let dot: f64 =
                        (0..d).map(|t| (po[t] - pw[t]) * (pq[t] - pw[t])).sum();
                    dot < 0.0
                });
                if inside {
                    hit[ki] += 1;
                }
            }
        }
    }
    let base = (1.0 - cfg.epsilon) / (2.0f64).powi(d as i32);
    let per_trial: Vec<ProbBoundRow> = cfg
        .ks
        .iter()
        .enumerate()
        .map(|(ki, &k)| ProbBoundRow {
            k,
            empirical: if counted[ki] == 0 { f64::NAN } else { hit[ki] as f64 / counted[ki] as f64 },
            bound: 1.0 - (1.0 - base).powi(k as i32),
            counted: counted[ki],
            excluded: excluded[ki],
        })
        .collect();
    let min_margin = per_trial
        .iter()
        .map(|r| r.empirical - r.bound)
        .fold(f64::INFINITY, f64::min);
    Ok(ExperimentReport { config: cfg.clone(), per_trial, summary: ProbBoundSummary { min_margin } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_reproducible() {
        let spec = SamplerSpec { kind: SamplerKind::UniformSquare, dim: 2, seed: 42 };
        let a = sample(&spec, 4).unwrap();
        let b = sample(&spec, 4).unwrap();
        assert_eq!(a.coords(), b.coords());
        assert!(a.coords().iter().all(|&c| (0.0..1.0).contains(&c)));
    }

    #[test]
    fn ball_sample_stays_inside() {
        let spec = SamplerSpec { kind: SamplerKind::UniformBall, dim: 3, seed: 9 };
        let ps = sample(&spec, 200).unwrap();
        for p in ps.iter() {
            let norm = p.iter().map(|x| x * x).sum::<f64>();
            assert!(norm <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn annulus_sample_respects_radii() {
        let spec =
            SamplerSpec { kind: SamplerKind::Annulus { inner: 0.5, outer: 1.0 }, dim: 2, seed: 3 };
        let ps = sample(&spec, 200).unwrap();
        for p in ps.iter() {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&norm), "{norm}");
        }
    }

    #[test]
    fn quadrant_counts_concentrate() {
        let spec = SamplerSpec { kind: SamplerKind::UniformSquare, dim: 2, seed: 1 };
        let n = 10_000;
        let ps = sample(&spec, n).unwrap();
        let mut quads = [0usize; 4];
        for p in ps.iter() {
            let q = (p[0] >= 0.5) as usize * 2 + (p[1] >= 0.5) as usize;
            quads[q] += 1;
        }
        let mean = n as f64 / 4.0;
        let band = 4.0 * (n as f64 * 3.0 / 16.0).sqrt();
        for q in quads {
            assert!((q as f64 - mean).abs() <= band, "quadrant count {q} outside {mean} +- {band}");
        }
    }

    #[test]
    fn sampler_spec_parses() {
        assert_eq!("uniform-square".parse::<SamplerKind>().unwrap(), SamplerKind::UniformSquare);
        assert_eq!(
            "annulus:0.5:1".parse::<SamplerKind>().unwrap(),
            SamplerKind::Annulus { inner: 0.5, outer: 1.0 }
        );
        assert_eq!(
            "gaussian-mixture:2:10:0.5".parse::<SamplerKind>().unwrap(),
            SamplerKind::GaussianMixture { modes: 2, separation: 10.0, sigma: 0.5 }
        );
        assert!("annulus:1:0.5".parse::<SamplerKind>().is_err());
        assert!("squircle".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn derive_seed_is_stable_and_spreads() {
        assert_eq!(derive_seed(1, &[2, 3]), derive_seed(1, &[2, 3]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[0]), derive_seed(2, &[0]));
    }

    #[test]
    fn complete_knn_graph_trivially_passes() {
        // c large enough that k clamps to n - 1: the k-NN graph is complete,
        // so both tests must pass in every trial.
        let cfg = KnnSpannerTrialConfig {
            sampler: SamplerSpec { kind: SamplerKind::UniformSquare, dim: 2, seed: 5 },
            n: 12,
            c: 100.0,
            trials: 3,
        };
        let report = knn_one_spanner_trial(&cfg).unwrap();
        assert_eq!(report.summary.k, 11);
        assert!(report.summary.k_clamped);
        assert_eq!(report.summary.one_spanner_rate, 1.0);
        assert_eq!(report.summary.gabriel_subset_rate, 1.0);
        assert_eq!(report.summary.implication_failures, 0);
    }

    #[test]
    fn mixture_negative_control_fails() {
        // Two far-apart tight clusters: k-NN graphs never bridge them, so
        // the 1-spanner test must fail and be reported as such.
        let cfg = KnnSpannerTrialConfig {
            sampler: SamplerSpec {
                kind: SamplerKind::GaussianMixture { modes: 2, separation: 100.0, sigma: 0.1 },
                dim: 2,
                seed: 8,
            },
            n: 60,
            c: 0.5,
            trials: 3,
        };
        let report = knn_one_spanner_trial(&cfg).unwrap();
        assert!(report.summary.one_spanner_rate < 1.0);
        assert!(report.summary.gabriel_subset_rate < 1.0);
        assert_eq!(report.summary.implication_failures, 0);
    }

    #[test]
    fn probability_trace_complete_k_saturates() {
        let cfg = ProbBoundConfig {
            sampler: SamplerSpec { kind: SamplerKind::UniformSquare, dim: 2, seed: 13 },
            n: 40,
            ks: vec![39],
            trials: 2,
            pairs_per_trial: 50,
            epsilon: BOUND_EPSILON,
        };
        let report = probability_bound_trace(&cfg).unwrap();
        let row = report.per_trial[0];
        // With k = n - 1 every other point is a k-NN, and no pair survives
        // the exclusion rule unless q is the unique farthest point; counted
        // pairs must all hit.
        if row.counted > 0 {
            assert_eq!(row.empirical, 1.0);
        }
    }

    #[test]
    fn probability_trace_validates() {
        let bad = ProbBoundConfig {
            sampler: SamplerSpec { kind: SamplerKind::UniformSquare, dim: 3, seed: 0 },
            n: 10,
            ks: vec![2],
            trials: 1,
            pairs_per_trial: 1,
            epsilon: BOUND_EPSILON,
        };
        assert!(probability_bound_trace(&bad).is_err());
    }
}
