//! Command-line front end: generators, graph builders, the spanner
//! pipeline, stretch verification, experiments, and persistence exports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input errors.
//! Every run writes a manifest next to its primary output; reruns with the
//! same manifest produce byte-identical outputs (timings excluded).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use edgesq::constructions::{gen_euclidean_lower_bound, gen_h_tree, estimate_doubling_dimension, TreeEdge};
use edgesq::experiments::{
    knn_one_spanner_trial, probability_bound_trace, KnnSpannerTrialConfig, ProbBoundConfig,
    SamplerKind, SamplerSpec, BOUND_EPSILON,
};
use edgesq::model::{
    load_graph_path, load_points_path, save_graph_path, save_matrix_csv, save_points_path,
};
use edgesq::persistence::intrinsic_cech_edges;
use edgesq::proximity::{critical_edges, euclidean_mst, gabriel_graph, knn_graph};
use edgesq::spanner::{build_spanner, certify, SpannerConfig};
use edgesq::wspd::SelectionMode;
use edgesq::{stretch, MetricParams};

#[derive(Parser)]
#[command(name = "esq", version, about = "Edge-squared metrics, spanners, and verifiers")]
struct Cli {
    /// Root random seed for anything sampled.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 means all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Suppress warnings.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a point set (random or adversarial) with sidecar metadata.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Ambient dimension (random kinds and lower-bound).
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Spacing parameter for the lower-bound instance.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Translated clones of the lower-bound instance.
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Binary-tree depth for the H-tree.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Point count for random kinds.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Points file (.csv or .json); metadata lands in OUT.meta.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a proximity graph from a points file.
    Graphs {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: GraphKind,
        /// Neighbors per point (knn).
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Metric power (critical).
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Keep only edges whose removal strictly lengthens the detour.
        #[arg(long)]
        strict: bool,
        /// Edge-weight exponent on Euclidean length (knn).
        #[arg(long, default_value_t = 2.0)]
        weight_power: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a (1+eps)-spanner of the edge-squared metric.
    Spanner {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Calibration constant for the separation (smaller is sparser).
        #[arg(long, default_value_t = edgesq::spanner::DEFAULT_CALIBRATION)]
        calib: f64,
        /// Representative selection inside well-separated pairs.
        #[arg(long, default_value = "exact")]
        mode: SelectionMode,
        /// Metric power (2 is the calibrated case).
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Certify the stretch against the exact metric; exits 1 when the
        /// certified stretch exceeds 1 + eps.
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        out: PathBuf,
        /// Optional build-statistics JSON.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Measure the stretch of a graph against a p-power metric.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Metric power; "inf" selects the minimax limit.
        #[arg(long, default_value = "2")]
        p: String,
        /// Use the normalized metric (closure raised to 1/p).
        #[arg(long)]
        normalized: bool,
        /// Fail (exit 1) when the measured stretch exceeds this.
        #[arg(long)]
        max_stretch: Option<f64>,
        /// Optional report JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional base-metric matrix export (CSV, n rows of n decimals).
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Run a randomized experiment and write its report.
    Experiment {
        #[arg(long, value_enum)]
        kind: ExperimentKind,
        /// Sampler: uniform-square, uniform-ball, annulus:IN:OUT, or
        /// gaussian-mixture:MODES:SEP:SIGMA.
        #[arg(long, default_value = "uniform-square")]
        sampler: SamplerKind,
        /// Sample dimension.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Multiplier in k = ceil(c * 2^d * ln n) (knn-one-spanner).
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Neighbor counts to trace (prob-bound).
        #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
        ks: Vec<usize>,
        /// Sampled pairs per trial (prob-bound).
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export intrinsic Cech edge births as CSV.
    Persistence {
        #[arg(long)]
        input: PathBuf,
        /// Output CSV with columns u,v,birth in ascending birth order.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the doubling dimension under a p-power metric.
    Doubling {
        #[arg(long)]
        input: PathBuf,
        /// Metric power; "inf" selects the minimax limit.
        #[arg(long, default_value = "2")]
        p: String,
        /// Use the normalized metric.
        #[arg(long)]
        normalized: bool,
        /// Ball radii to probe.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    LowerBound,
    HTree,
    UniformSquare,
    UniformBall,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphKind {
    Knn,
    Gabriel,
    Mst,
    Critical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentKind {
    KnnOneSpanner,
    ProbBound,
}

/// Whether a verification gate passed; anything else is an error.
enum Outcome {
    Pass,
    Fail(String),
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    version: &'static str,
    seed: u64,
    flags: BTreeMap<&'static str, String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    /// Wall-clock timings; these vary run to run and are excluded from
    /// determinism comparisons.
    timings_ms: BTreeMap<&'static str, u128>,
}

/// Collects manifest fields while a subcommand runs.
struct Manifest {
    subcommand: &'static str,
    seed: u64,
    flags: BTreeMap<&'static str, String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    start: Instant,
}

impl Manifest {
    fn new(subcommand: &'static str, seed: u64) -> Self {
        Manifest {
            subcommand,
            seed,
            flags: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            start: Instant::now(),
        }
    }

    fn flag(&mut self, name: &'static str, value: impl ToString) {
        self.flags.insert(name, value.to_string());
    }

    fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes `{primary}.manifest.json` listing all run outputs.
    fn write(mut self, primary: &Path) -> anyhow::Result<()> {
        let path = PathBuf::from(format!("{}.manifest.json", primary.display()));
        self.outputs.push(path.display().to_string());
        let mut timings_ms = BTreeMap::new();
        timings_ms.insert("total", self.start.elapsed().as_millis());
        let manifest = RunManifest {
            subcommand: self.subcommand,
            version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            flags: self.flags,
            inputs: self.inputs,
            outputs: self.outputs,
            timings_ms,
        };
        write_json(&path, &manifest)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Parses --p/--normalized into metric parameters; "inf" means minimax.
fn metric_from_flags(p: &str, normalized: bool) -> anyhow::Result<MetricParams> {
    if p.eq_ignore_ascii_case("inf") || p.eq_ignore_ascii_case("infinity") {
        return Ok(MetricParams::minimax());
    }
    let value: f64 = p.parse().with_context(|| format!("power {p:?} is not a number"))?;
    Ok(MetricParams::new(value, normalized)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.quiet { log::LevelFilter::Off } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();
    if cli.threads > 0 {
        if let Err(err) =
            rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()
        {
            eprintln!("error: thread pool: {err}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.cmd {
        Cmd::Gen { kind, d, eps, copies, depth, n, out } => {
            gen_cmd(cli.seed, kind, d, eps, copies, depth, n, &out)
        }
        Cmd::Graphs { input, kind, k, p, strict, weight_power, out } => {
            graphs_cmd(cli.seed, &input, kind, k, p, strict, weight_power, &out)
        }
        Cmd::Spanner { input, eps, calib, mode, p, certify, out, stats } => {
            spanner_cmd(cli.seed, &input, eps, calib, mode, p, certify, &out, stats.as_deref())
        }
        Cmd::Verify { input, graph, p, normalized, max_stretch, out, matrix_out } => verify_cmd(
            cli.seed,
            &input,
            &graph,
            &p,
            normalized,
            max_stretch,
            out.as_deref(),
            matrix_out.as_deref(),
        ),
        Cmd::Experiment { kind, sampler, d, n, c, trials, ks, pairs, out } => {
            experiment_cmd(cli.seed, kind, sampler, d, n, c, trials, &ks, pairs, &out)
        }
        Cmd::Persistence { input, out } => persistence_cmd(cli.seed, &input, &out),
        Cmd::Doubling { input, p, normalized, radii, out } => {
            doubling_cmd(cli.seed, &input, &p, normalized, &radii, &out)
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GenMeta<'a> {
    LowerBound {
        d: usize,
        eps: f64,
        copies: usize,
        points_per_copy: usize,
        copy_step: f64,
        part_a: &'a [usize],
        part_b: &'a [usize],
    },
    HTree {
        depth: usize,
        n_tree: usize,
        per_edge_budget: f64,
        subdivision_counts: &'a [usize],
        tree_edges: &'a [TreeEdge],
    },
    Sampled {
        sampler: SamplerSpec,
        n: usize,
    },
}

#[allow(clippy::too_many_arguments)]
fn gen_cmd(
    seed: u64,
    kind: GenKind,
    d: usize,
    eps: f64,
    copies: usize,
    depth: usize,
    n: usize,
    out: &Path,
) -> anyhow::Result<Outcome> {
    let mut manifest = Manifest::new("gen", seed);
    let meta_path = PathBuf::from(format!("{}.meta.json", out.display()));
    let (points, meta) = match kind {
        GenKind::LowerBound => {
            manifest.flag("kind", "lower-bound");
            manifest.flag("d", d);
            manifest.flag("eps", eps);
            manifest.flag("copies", copies);
            let inst = gen_euclidean_lower_bound(d, eps, copies)?;
            let meta = serde_json::to_value(GenMeta::LowerBound {
                d,
                eps,
                copies,
                points_per_copy: inst.points_per_copy,
                copy_step: inst.copy_step,
                part_a: &inst.part_a,
                part_b: &inst.part_b,
            })?;
            (inst.points, meta)
        }
        GenKind::HTree => {
            manifest.flag("kind", "h-tree");
            manifest.flag("depth", depth);
            let inst = gen_h_tree(depth)?;
            let meta = serde_json::to_value(GenMeta::HTree {
                depth,
                n_tree: inst.n_tree,
                per_edge_budget: inst.per_edge_budget(),
                subdivision_counts: &inst.subdivision_counts,
                tree_edges: &inst.tree_edges,
            })?;
            (inst.points, meta)
        }
        GenKind::UniformSquare | GenKind::UniformBall => {
            let (kind_name, sampler) = if matches!(kind, GenKind::UniformSquare) {
                ("uniform-square", SamplerKind::UniformSquare)
            } else {
                ("uniform-ball", SamplerKind::UniformBall)
            };
            manifest.flag("kind", kind_name);
            manifest.flag("d", d);
            manifest.flag("n", n);
            let spec = SamplerSpec { kind: sampler, dim: d, seed };
            let points = edgesq::experiments::sample(&spec, n)?;
            (points, serde_json::to_value(GenMeta::Sampled { sampler: spec, n })?)
        }
    };
    save_points_path(out, &points)?;
    write_json(&meta_path, &meta)?;
    manifest.output(out);
    manifest.output(&meta_path);
    manifest.write(out)?;
    Ok(Outcome::Pass)
}

#[allow(clippy::too_many_arguments)]
fn graphs_cmd(
    seed: u64,
    input: &Path,
    kind: GraphKind,
    k: usize,
    p: f64,
    strict: bool,
    weight_power: f64,
    out: &Path,
) -> anyhow::Result<Outcome> {
    let mut manifest = Manifest::new("graphs", seed);
    manifest.input(input);
    let ps = load_points_path(input)?;
    let graph = match kind {
        GraphKind::Knn => {
            manifest.flag("kind", "knn");
            manifest.flag("k", k);
            manifest.flag("weight-power", weight_power);
            knn_graph(&ps, k, weight_power)?
        }
        GraphKind::Gabriel => {
            manifest.flag("kind", "gabriel");
            gabriel_graph(&ps)?
        }
        GraphKind::Mst => {
            manifest.flag("kind", "mst");
            euclidean_mst(&ps)?
        }
        GraphKind::Critical => {
            manifest.flag("kind", "critical");
            manifest.flag("p", p);
            manifest.flag("strict", strict);
            critical_edges(&ps, p, strict)?.graph
        }
    };
    save_graph_path(out, &graph)?;
    manifest.output(out);
    manifest.write(out)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct SpannerStatsReport<'a> {
    stats: &'a edgesq::spanner::BuildStats,
    pair_count: usize,
    edges_per_point: f64,
    edge_count: usize,
    certified_stretch: Option<f64>,
    stretch_witness: Option<(usize, usize)>,
}

#[allow(clippy::too_many_arguments)]
fn spanner_cmd(
    seed: u64,
    input: &Path,
    eps: f64,
    calib: f64,
    mode: SelectionMode,
    p: f64,
    do_certify: bool,
    out: &Path,
    stats_out: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let mut manifest = Manifest::new("spanner", seed);
    manifest.input(input);
    manifest.flag("eps", eps);
    manifest.flag("calib", calib);
    manifest.flag("mode", serde_json::to_string(&mode)?.trim_matches('"').to_string());
    manifest.flag("p", p);
    manifest.flag("certify", do_certify);
    let ps = load_points_path(input)?;
    let cfg = SpannerConfig::new(eps)?
        .with_calibration(calib)?
        .with_metric_power(p)?
        .with_mode(mode);
    let mut result = build_spanner(&ps, &cfg)?;
    let mut witness = None;
    if do_certify {
        let report = certify(&ps, &mut result, &cfg)?;
        witness = report.pair;
    }
    save_graph_path(out, &result.graph)?;
    manifest.output(out);
    if let Some(stats_path) = stats_out {
        write_json(
            stats_path,
            &SpannerStatsReport {
                stats: &result.stats,
                pair_count: result.pair_count,
                edges_per_point: result.edges_per_point,
                edge_count: result.graph.edge_count(),
                certified_stretch: result.certified_stretch,
                stretch_witness: witness,
            },
        )?;
        manifest.output(stats_path);
    }
    manifest.write(out)?;
    if let Some(stretch) = result.certified_stretch {
        if stretch > 1.0 + eps {
            return Ok(Outcome::Fail(format!(
                "certified stretch {stretch} exceeds {}",
                1.0 + eps
            )));
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct VerifyReport {
    /// Metric power as text so the infinite limit survives JSON.
    p: String,
    normalized: bool,
    max_stretch: f64,
    witness: Option<(usize, usize)>,
    threshold: Option<f64>,
    passed: bool,
}

#[allow(clippy::too_many_arguments)]
fn verify_cmd(
    seed: u64,
    input: &Path,
    graph_path: &Path,
    p: &str,
    normalized: bool,
    max_stretch: Option<f64>,
    out: Option<&Path>,
    matrix_out: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let mut manifest = Manifest::new("verify", seed);
    manifest.input(input);
    manifest.input(graph_path);
    manifest.flag("p", p);
    manifest.flag("normalized", normalized);
    let params = metric_from_flags(p, normalized)?;
    let ps = load_points_path(input)?;
    let graph = load_graph_path(graph_path)?;
    let base = params.matrix(&ps)?;
    let report = stretch(&base, &graph)?;
    let passed = max_stretch.is_none_or(|t| report.max_stretch <= t);
    let verify_report = VerifyReport {
        p: format!("{}", params.p()),
        normalized: params.is_normalized(),
        max_stretch: report.max_stretch,
        witness: report.pair,
        threshold: max_stretch,
        passed,
    };
    if let Some(matrix_path) = matrix_out {
        let file = std::fs::File::create(matrix_path)
            .with_context(|| format!("writing {}", matrix_path.display()))?;
        save_matrix_csv(std::io::BufWriter::new(file), &base)?;
        manifest.output(matrix_path);
    }
    if let Some(out) = out {
        if let Some(t) = max_stretch {
            manifest.flag("max-stretch", t);
        }
        write_json(out, &verify_report)?;
        manifest.output(out);
        manifest.write(out)?;
    } else {
        println!("{}", serde_json::to_string_pretty(&verify_report)?);
    }
    if passed {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail(format!(
            "stretch {} exceeds {}",
            report.max_stretch,
            max_stretch.unwrap_or(f64::INFINITY)
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn experiment_cmd(
    seed: u64,
    kind: ExperimentKind,
    sampler: SamplerKind,
    d: usize,
    n: usize,
    c: f64,
    trials: usize,
    ks: &[usize],
    pairs: usize,
    out: &Path,
) -> anyhow::Result<Outcome> {
    let mut manifest = Manifest::new("experiment", seed);
    let spec = SamplerSpec { kind: sampler, dim: d, seed };
    manifest.flag("sampler", serde_json::to_string(&sampler)?);
    manifest.flag("d", d);
    manifest.flag("n", n);
    manifest.flag("trials", trials);
    match kind {
        ExperimentKind::KnnOneSpanner => {
            manifest.flag("kind", "knn-one-spanner");
            manifest.flag("c", c);
            let cfg = KnnSpannerTrialConfig { sampler: spec, n, c, trials };
            let report = knn_one_spanner_trial(&cfg)?;
            write_json(out, &report)?;
        }
        ExperimentKind::ProbBound => {
            manifest.flag("kind", "prob-bound");
            manifest.flag("ks", ks.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
            manifest.flag("pairs", pairs);
            let cfg = ProbBoundConfig {
                sampler: spec,
                n,
                ks: ks.to_vec(),
                trials,
                pairs_per_trial: pairs,
                epsilon: BOUND_EPSILON,
            };
            let report = probability_bound_trace(&cfg)?;
            write_json(out, &report)?;
        }
    }
    manifest.output(out);
    manifest.write(out)?;
    Ok(Outcome::Pass)
}

fn persistence_cmd(seed: u64, input: &Path, out: &Path) -> anyhow::Result<Outcome> {
    let mut manifest = Manifest::new("persistence", seed);
    manifest.input(input);
    let ps = load_points_path(input)?;
    let edges = intrinsic_cech_edges(&ps)?;
    let mut text = String::from("u,v,birth\n");
    for e in &edges {
        text.push_str(&format!("{},{},{}\n", e.u, e.v, e.birth));
    }
    std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    manifest.output(out);
    manifest.write(out)?;
    Ok(Outcome::Pass)
}

fn doubling_cmd(
    seed: u64,
    input: &Path,
    p: &str,
    normalized: bool,
    radii: &[f64],
    out: &Path,
) -> anyhow::Result<Outcome> {
    let mut manifest = Manifest::new("doubling", seed);
    manifest.input(input);
    manifest.flag("p", p);
    manifest.flag("normalized", normalized);
    manifest.flag("radii", radii.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    let params = metric_from_flags(p, normalized)?;
    let ps = load_points_path(input)?;
    let dm = params.matrix(&ps)?;
    let report = estimate_doubling_dimension(&ps, &dm, radii)?;
    write_json(out, &report)?;
    manifest.output(out);
    manifest.write(out)?;
    Ok(Outcome::Pass)
}
