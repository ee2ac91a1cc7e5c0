//! Core data model: point sets, weighted graphs, distance matrices.

mod io;

pub use io::{
    load_graph, load_graph_path, load_points, load_points_path, save_graph, save_graph_path,
    save_matrix_csv, save_points, save_points_path, PointFormat,
};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// An ordered list of points in `R^dim`, stored row-major.
///
/// Invariants: at least one point, every point has exactly `dim` finite
/// coordinates. Duplicate coordinates are permitted (degenerate inputs) and
/// reported through [`PointSet::has_duplicate_points`]; loaders warn on them.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from flat row-major coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be at least 1"));
        }
        if coords.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::param(
                "coords",
                format!("length {} is not a multiple of dim {}", coords.len(), dim),
            ));
        }
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::row(i / dim + 1, format!("non-finite coordinate {c}")));
            }
        }
        Ok(PointSet { dim, coords })
    }

    /// Builds a point set from one row per point.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::row(1, "empty point".to_string()));
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::row(
                    i + 1,
                    format!("expected {dim} coordinates, got {}", row.len()),
                ));
            }
            coords.extend_from_slice(row);
        }
        PointSet::new(dim, coords)
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[must_use]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    #[must_use]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean distance between points `i` and `j`.
    #[must_use]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.sq_dist(i, j).sqrt()
    }

    /// Squared Euclidean distance between points `i` and `j`.
    #[must_use]
    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        let a = self.point(i);
        let b = self.point(j);
        let mut s = 0.0;
        for k in 0..self.dim {
            let d = a[k] - b[k];
            s += d * d;
        }
        s
    }

    /// True when two points share exactly the same coordinates.
    #[must_use]
    pub fn has_duplicate_points(&self) -> bool {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            self.point(a)
                .iter()
                .zip(self.point(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        order.windows(2).any(|w| self.point(w[0]) == self.point(w[1]))
    }
}

impl Serialize for PointSet {
    /// Serializes as `{dim, points}` with one row per point, matching the
    /// JSON file format.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            dim: usize,
            points: Vec<&'a [f64]>,
        }
        Wire { dim: self.dim, points: self.iter().collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            dim: usize,
            points: Vec<Vec<f64>>,
        }
        let wire = Wire::deserialize(deserializer)?;
        let ps = PointSet::from_rows(&wire.points).map_err(D::Error::custom)?;
        if ps.dim() != wire.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} but rows have {}",
                wire.dim,
                ps.dim()
            )));
        }
        Ok(ps)
    }
}

/// Euclidean distance between two coordinate slices.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// An undirected weighted edge with canonical orientation `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// An undirected weighted graph on vertices `0..n`.
///
/// Invariants: edges are canonically oriented (`u < v`), sorted
/// lexicographically by `(u, v)`, with no duplicates, no self-loops, and
/// finite non-negative weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds a graph, canonicalizing edge orientation and sorting.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut canon: Vec<Edge> = Vec::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) has weight {w}")));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            canon.push(Edge { u, v, w });
        }
        canon.sort_unstable_by_key(|e| (e.u, e.v));
        if let Some(w) = canon.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", w[0].u, w[0].v)));
        }
        Ok(WeightedGraph { n, edges: canon })
    }

    /// An edgeless graph on `n` vertices.
    #[must_use]
    pub fn empty(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new() }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Binary search for a canonical edge.
    #[must_use]
    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search_by_key(&key, |e| (e.u, e.v)).is_ok()
    }

    /// Adjacency lists, both directions.
    #[must_use]
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        adj
    }

    /// True when every edge of `self` appears in `other` (weights ignored).
    #[must_use]
    pub fn is_edge_subset_of(&self, other: &WeightedGraph) -> bool {
        self.edges.iter().all(|e| other.contains_edge(e.u, e.v))
    }
}

/// A dense symmetric distance matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    vals: Vec<f64>,
}

impl DistanceMatrix {
    #[must_use]
    pub fn zeros(n: usize) -> Self {
        DistanceMatrix { n, vals: vec![0.0; n * n] }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.vals[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.vals[i * self.n + j] = v;
        self.vals[j * self.n + i] = v;
    }

    #[must_use]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.vals[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.vals[i * self.n..(i + 1) * self.n]
    }

    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    /// Largest entry.
    #[must_use]
    pub fn max_value(&self) -> f64 {
        self.vals.iter().copied().fold(0.0, f64::max)
    }

    /// Checks symmetry, zero diagonal, and the triangle inequality within
    /// `tol` relative slack; returns the first violating triple if any.
    #[must_use]
    pub fn metric_violation(&self, tol: f64) -> Option<(usize, usize, usize)> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Some((i, i, i));
            }
            for j in (i + 1)..self.n {
                if !crate::tol::rel_eq(self.get(i, j), self.get(j, i), tol) {
                    return Some((i, j, j));
                }
            }
        }
        for k in 0..self.n {
            for i in 0..self.n {
                let dik = self.get(i, k);
                for j in 0..self.n {
                    if !crate::tol::rel_le(self.get(i, j), dik + self.get(k, j), tol) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}
