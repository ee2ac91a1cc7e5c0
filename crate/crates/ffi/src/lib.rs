//! C ABI over the edgesq library.
//!
//! Every handle type is opaque; constructors return a status code and write
//! the new handle through an out-pointer. A non-`ESQ_STATUS_OK` status
//! leaves a message retrievable with [`esq_last_error_message`] until the
//! next failing call on the same thread. Handles must be released with
//! their matching `*_free` function, strings with [`esq_string_free`];
//! every `*_free` accepts null. Handles may move between threads but a
//! single handle must not be used from two threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use edgesq::metrics::edge_squared_one_spanner_check;
use edgesq::model::{load_graph_path, load_points_path, save_graph, save_graph_path, save_points_path};
use edgesq::persistence::{filtration_membership, nearest_distance};
use edgesq::proximity::{critical_edges, euclidean_mst, gabriel_graph, knn_graph};
use edgesq::spanner::{build_spanner, SpannerConfig};
use edgesq::wspd::SelectionMode;
use edgesq::{stretch, DistanceMatrix, MetricParams, PointSet, WeightedGraph};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EsqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Panic = 5,
}

/// An immutable set of points in R^d.
pub struct EsqPointSet(PointSet);

/// An undirected weighted graph over point indices.
pub struct EsqGraph(WeightedGraph);

/// A dense symmetric distance matrix.
pub struct EsqMatrix(DistanceMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: EsqStatus, message: impl AsRef<str>) -> EsqStatus {
    set_last_error(message.as_ref());
    status
}

fn status_for(err: &edgesq::Error) -> EsqStatus {
    match err {
        edgesq::Error::Io(_) => EsqStatus::Io,
        edgesq::Error::Json(_) | edgesq::Error::Csv(_) | edgesq::Error::InvalidRow { .. } => {
            EsqStatus::Parse
        }
        _ => EsqStatus::InvalidArgument,
    }
}

fn fail_with(err: &edgesq::Error) -> EsqStatus {
    fail(status_for(err), err.to_string())
}

/// Runs `body` with panics converted to `ESQ_STATUS_PANIC`.
fn guarded(body: impl FnOnce() -> EsqStatus) -> EsqStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in edgesq".to_string());
            fail(EsqStatus::Panic, msg)
        }
    }
}

unsafe fn path_from(ptr: *const c_char) -> Result<&'static Path, EsqStatus> {
    if ptr.is_null() {
        return Err(fail(EsqStatus::NullPointer, "path is null"));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => Err(fail(EsqStatus::InvalidArgument, "path is not valid UTF-8")),
    }
}

macro_rules! nonnull {
    ($ptr:expr, $name:literal) => {
        match $ptr.as_ref() {
            Some(r) => r,
            None => return fail(EsqStatus::NullPointer, concat!($name, " is null")),
        }
    };
}

macro_rules! out_param {
    ($ptr:expr, $name:literal) => {
        match $ptr.as_mut() {
            Some(r) => r,
            None => return fail(EsqStatus::NullPointer, concat!($name, " is null")),
        }
    };
}

/// Returns the message from the most recent failing call on this thread, or
/// an empty string. The pointer stays valid until the next failing call on
/// the same thread; do not free it.
#[no_mangle]
pub extern "C" fn esq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned by this library. Accepts null.
///
/// # Safety
/// `s` must have been returned by an edgesq function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn esq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a point set from `len` points of `dim` row-major coordinates.
///
/// # Safety
/// `coords` must point to `len * dim` readable doubles; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_point_set_new(
    coords: *const f64,
    len: usize,
    dim: usize,
    out: *mut *mut EsqPointSet,
) -> EsqStatus {
    guarded(|| {
        let out = out_param!(out, "out");
        if coords.is_null() {
            return fail(EsqStatus::NullPointer, "coords is null");
        }
        let flat = std::slice::from_raw_parts(coords, len.saturating_mul(dim));
        match PointSet::new(dim, flat.to_vec()) {
            Ok(ps) => {
                *out = Box::into_raw(Box::new(EsqPointSet(ps)));
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Loads points from a `.csv` or `.json` file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_point_set_load(
    path: *const c_char,
    out: *mut *mut EsqPointSet,
) -> EsqStatus {
    guarded(|| {
        let out = out_param!(out, "out");
        let path = match path_from(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match load_points_path(path) {
            Ok(ps) => {
                *out = Box::into_raw(Box::new(EsqPointSet(ps)));
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Saves points to a `.csv` or `.json` file.
///
/// # Safety
/// `ps` must be a live point set handle; `path` must be a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn esq_point_set_save(
    ps: *const EsqPointSet,
    path: *const c_char,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let path = match path_from(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match save_points_path(path, &ps.0) {
            Ok(()) => EsqStatus::Ok,
            Err(e) => fail_with(&e),
        }
    })
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `ps` must be null or a live point set handle.
#[no_mangle]
pub unsafe extern "C" fn esq_point_set_len(ps: *const EsqPointSet) -> usize {
    ps.as_ref().map_or(0, |p| p.0.len())
}

/// Coordinate dimension; 0 for a null handle.
///
/// # Safety
/// `ps` must be null or a live point set handle.
#[no_mangle]
pub unsafe extern "C" fn esq_point_set_dim(ps: *const EsqPointSet) -> usize {
    ps.as_ref().map_or(0, |p| p.0.dim())
}

/// Reads one coordinate of one point.
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_point_set_coord(
    ps: *const EsqPointSet,
    point: usize,
    axis: usize,
    out: *mut f64,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let out = out_param!(out, "out");
        if point >= ps.0.len() || axis >= ps.0.dim() {
            return fail(
                EsqStatus::InvalidArgument,
                format!("index ({point}, {axis}) out of range for {}x{}", ps.0.len(), ps.0.dim()),
            );
        }
        *out = ps.0.point(point)[axis];
        EsqStatus::Ok
    })
}

/// Releases a point set. Accepts null.
///
/// # Safety
/// `ps` must be null or a live point set handle; it must not be used after.
#[no_mangle]
pub unsafe extern "C" fn esq_point_set_free(ps: *mut EsqPointSet) {
    if !ps.is_null() {
        drop(Box::from_raw(ps));
    }
}

/// Computes the p-power shortest-path metric (`normalized` raises path
/// costs to 1/p).
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_power_metric(
    ps: *const EsqPointSet,
    p: f64,
    normalized: bool,
    out: *mut *mut EsqMatrix,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let out = out_param!(out, "out");
        let params = match MetricParams::new(p, normalized) {
            Ok(params) => params,
            Err(e) => return fail_with(&e),
        };
        match params.matrix(&ps.0) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(EsqMatrix(m)));
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Computes the minimax (bottleneck) distance matrix, the normalized
/// infinite-power limit.
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_minimax_metric(
    ps: *const EsqPointSet,
    out: *mut *mut EsqMatrix,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let out = out_param!(out, "out");
        match MetricParams::minimax().matrix(&ps.0) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(EsqMatrix(m)));
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Matrix side length; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn esq_matrix_n(m: *const EsqMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

/// Reads one matrix entry.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_matrix_get(
    m: *const EsqMatrix,
    i: usize,
    j: usize,
    out: *mut f64,
) -> EsqStatus {
    guarded(|| {
        let m = nonnull!(m, "m");
        let out = out_param!(out, "out");
        let n = m.0.n();
        if i >= n || j >= n {
            return fail(
                EsqStatus::InvalidArgument,
                format!("index ({i}, {j}) out of range for an {n}x{n} matrix"),
            );
        }
        *out = m.0.get(i, j);
        EsqStatus::Ok
    })
}

/// Releases a matrix. Accepts null.
///
/// # Safety
/// `m` must be null or a live matrix handle; it must not be used after.
#[no_mangle]
pub unsafe extern "C" fn esq_matrix_free(m: *mut EsqMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn graph_out(
    out: *mut *mut EsqGraph,
    result: edgesq::Result<WeightedGraph>,
) -> EsqStatus {
    let out = out_param!(out, "out");
    match result {
        Ok(g) => {
            *out = Box::into_raw(Box::new(EsqGraph(g)));
            EsqStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// Builds the k-nearest-neighbor graph with `|u - v|^weight_power` weights.
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_knn_graph(
    ps: *const EsqPointSet,
    k: usize,
    weight_power: f64,
    out: *mut *mut EsqGraph,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        graph_out(out, knn_graph(&ps.0, k, weight_power))
    })
}

/// Builds the Gabriel graph with squared-length weights.
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_gabriel_graph(
    ps: *const EsqPointSet,
    out: *mut *mut EsqGraph,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        graph_out(out, gabriel_graph(&ps.0))
    })
}

/// Builds the Euclidean minimum spanning tree.
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_euclidean_mst(
    ps: *const EsqPointSet,
    out: *mut *mut EsqGraph,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        graph_out(out, euclidean_mst(&ps.0))
    })
}

/// Computes the critical edge set of the p-power metric.
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_critical_edges(
    ps: *const EsqPointSet,
    p: f64,
    strict: bool,
    out: *mut *mut EsqGraph,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        graph_out(out, critical_edges(&ps.0, p, strict).map(|set| set.graph))
    })
}

/// Builds a (1 + eps)-spanner of the edge-squared metric; `grid` selects the
/// approximate per-pair edge selection instead of the exact one.
///
/// # Safety
/// `ps` must be a live point set handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_build_spanner(
    ps: *const EsqPointSet,
    eps: f64,
    grid: bool,
    out: *mut *mut EsqGraph,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let mode = if grid { SelectionMode::Grid } else { SelectionMode::Exact };
        let cfg = match SpannerConfig::new(eps) {
            Ok(cfg) => cfg.with_mode(mode),
            Err(e) => return fail_with(&e),
        };
        graph_out(out, build_spanner(&ps.0, &cfg).map(|r| r.graph))
    })
}

/// Maximum stretch of the graph's shortest-path closure over the base
/// matrix.
///
/// # Safety
/// `base` and `g` must be live handles; `out_max` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_stretch(
    base: *const EsqMatrix,
    g: *const EsqGraph,
    out_max: *mut f64,
) -> EsqStatus {
    guarded(|| {
        let base = nonnull!(base, "base");
        let g = nonnull!(g, "g");
        let out_max = out_param!(out_max, "out_max");
        match stretch(&base.0, &g.0) {
            Ok(report) => {
                *out_max = report.max_stretch;
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Tests whether the graph is an exact 1-spanner of the edge-squared
/// metric; `out_excess` receives the worst relative excess.
///
/// # Safety
/// `ps` and `g` must be live handles; `out_holds` and `out_excess` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn esq_one_spanner_check(
    ps: *const EsqPointSet,
    g: *const EsqGraph,
    out_holds: *mut bool,
    out_excess: *mut f64,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let g = nonnull!(g, "g");
        let out_holds = out_param!(out_holds, "out_holds");
        let out_excess = out_param!(out_excess, "out_excess");
        match edge_squared_one_spanner_check(&ps.0, &g.0) {
            Ok(check) => {
                *out_holds = check.holds;
                *out_excess = check.worst_excess;
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Number of vertices; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn esq_graph_n(g: *const EsqGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Number of edges; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn esq_graph_edge_count(g: *const EsqGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Reads edge `index` in canonical `(u, v)` order.
///
/// # Safety
/// `g` must be a live graph handle; `out_u`, `out_v`, and `out_w` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn esq_graph_edge(
    g: *const EsqGraph,
    index: usize,
    out_u: *mut usize,
    out_v: *mut usize,
    out_w: *mut f64,
) -> EsqStatus {
    guarded(|| {
        let g = nonnull!(g, "g");
        let out_u = out_param!(out_u, "out_u");
        let out_v = out_param!(out_v, "out_v");
        let out_w = out_param!(out_w, "out_w");
        match g.0.edges().get(index) {
            Some(e) => {
                *out_u = e.u;
                *out_v = e.v;
                *out_w = e.w;
                EsqStatus::Ok
            }
            None => fail(
                EsqStatus::InvalidArgument,
                format!("edge index {index} out of range for {} edges", g.0.edge_count()),
            ),
        }
    })
}

/// Serializes the graph to its canonical JSON form; the string must be
/// released with `esq_string_free`.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_graph_to_json(
    g: *const EsqGraph,
    out: *mut *mut c_char,
) -> EsqStatus {
    guarded(|| {
        let g = nonnull!(g, "g");
        let out = out_param!(out, "out");
        let mut buf = Vec::new();
        if let Err(e) = save_graph(&mut buf, &g.0) {
            return fail_with(&e);
        }
        while buf.last() == Some(&b'\n') {
            buf.pop();
        }
        match CString::new(buf) {
            Ok(s) => {
                *out = s.into_raw();
                EsqStatus::Ok
            }
            Err(_) => fail(EsqStatus::Panic, "graph JSON contained an interior NUL"),
        }
    })
}

/// Loads a graph from a JSON file, re-validating all invariants.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_graph_load(
    path: *const c_char,
    out: *mut *mut EsqGraph,
) -> EsqStatus {
    guarded(|| {
        let path = match path_from(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        graph_out(out, load_graph_path(path))
    })
}

/// Saves a graph as canonical JSON.
///
/// # Safety
/// `g` must be a live graph handle; `path` must be a valid NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn esq_graph_save(g: *const EsqGraph, path: *const c_char) -> EsqStatus {
    guarded(|| {
        let g = nonnull!(g, "g");
        let path = match path_from(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match save_graph_path(path, &g.0) {
            Ok(()) => EsqStatus::Ok,
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases a graph. Accepts null.
///
/// # Safety
/// `g` must be null or a live graph handle; it must not be used after.
#[no_mangle]
pub unsafe extern "C" fn esq_graph_free(g: *mut EsqGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Euclidean distance from `x` to the nearest sample point.
///
/// # Safety
/// `ps` must be a live point set handle; `x` must point to `dim` readable
/// doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esq_nearest_distance(
    ps: *const EsqPointSet,
    x: *const f64,
    out: *mut f64,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let out = out_param!(out, "out");
        if x.is_null() {
            return fail(EsqStatus::NullPointer, "x is null");
        }
        let query = std::slice::from_raw_parts(x, ps.0.dim());
        match nearest_distance(&ps.0, query) {
            Ok(d) => {
                *out = d;
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Evaluates both filtration membership clocks for the query point at scale
/// `alpha`; they agree for every input.
///
/// # Safety
/// `ps` must be a live point set handle; `x` must point to `dim` readable
/// doubles; `out_in_f` and `out_in_g` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn esq_filtration_membership(
    ps: *const EsqPointSet,
    x: *const f64,
    alpha: f64,
    out_in_f: *mut bool,
    out_in_g: *mut bool,
) -> EsqStatus {
    guarded(|| {
        let ps = nonnull!(ps, "ps");
        let out_in_f = out_param!(out_in_f, "out_in_f");
        let out_in_g = out_param!(out_in_g, "out_in_g");
        if x.is_null() {
            return fail(EsqStatus::NullPointer, "x is null");
        }
        let query = std::slice::from_raw_parts(x, ps.0.dim());
        match filtration_membership(&ps.0, query, alpha) {
            Ok((in_f, in_g)) => {
                *out_in_f = in_f;
                *out_in_g = in_g;
                EsqStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}
