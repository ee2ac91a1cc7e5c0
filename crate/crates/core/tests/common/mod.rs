//! Brute-force oracles shared by the integration suites. These are
//! deliberately independent implementations (Floyd-Warshall instead of
//! repeated Dijkstra, Kruskal instead of Prim, full scans instead of
//! early exits) so agreement is evidence, not tautology.

#![allow(dead_code)]

use edgesq::experiments::{sample, SamplerKind, SamplerSpec};
use edgesq::PointSet;

pub const ORACLE_TOL: f64 = 1e-9;

/// Uniform points in the unit cube; test-data generation only.
pub fn cube_points(seed: u64, n: usize, dim: usize) -> PointSet {
    sample(&SamplerSpec { kind: SamplerKind::UniformSquare, dim, seed }, n).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Flat row-major matrix of `|p_i - p_j|^power`.
pub fn weight_matrix(ps: &PointSet, power: f64) -> Vec<f64> {
    let n = ps.len();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let sq: f64 = ps
                .point(i)
                .iter()
                .zip(ps.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            w[i * n + j] = sq.powf(power / 2.0);
        }
    }
    w
}

/// Floyd-Warshall shortest-path closure (additive relaxation).
pub fn fw_closure(n: usize, w: &[f64]) -> Vec<f64> {
    let mut d = w.to_vec();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            for j in 0..n {
                let c = dik + d[k * n + j];
                if c < d[i * n + j] {
                    d[i * n + j] = c;
                }
            }
        }
    }
    d
}

/// Floyd-Warshall bottleneck closure (max relaxation).
pub fn fw_bottleneck(n: usize, w: &[f64]) -> Vec<f64> {
    let mut d = w.to_vec();
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            for j in 0..n {
                let c = dik.max(d[k * n + j]);
                if c < d[i * n + j] {
                    d[i * n + j] = c;
                }
            }
        }
    }
    d
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Kruskal MST over a dense weight matrix; returns canonical sorted
/// `(u, v, w)` edges. Ties settle by `(w, u, v)`.
pub fn kruskal_mst(n: usize, w: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    edges.sort_by(|&(a, b), &(c, d)| {
        w[a * n + b].total_cmp(&w[c * n + d]).then(a.cmp(&c)).then(b.cmp(&d))
    });
    let mut uf = UnionFind::new(n);
    let mut mst = Vec::with_capacity(n.saturating_sub(1));
    for (u, v) in edges {
        if uf.union(u, v) {
            mst.push((u, v, w[u * n + v]));
        }
    }
    mst.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    mst
}

/// Maximum edge weight on the tree path between `a` and `b`.
pub fn tree_path_max(n: usize, edges: &[(usize, usize, f64)], a: usize, b: usize) -> f64 {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut stack = vec![(a, usize::MAX, f64::NEG_INFINITY)];
    while let Some((node, from, max_w)) = stack.pop() {
        if node == b {
            return max_w;
        }
        for &(next, w) in &adj[node] {
            if next != from {
                stack.push((next, node, max_w.max(w)));
            }
        }
    }
    f64::INFINITY
}

/// Groups vertices into connected components under `merge(u, v)` pairs,
/// returning a canonical partition label per vertex for comparisons.
pub fn partition_labels(n: usize, merges: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for &(u, v) in merges {
        uf.union(u, v);
    }
    (0..n).map(|v| uf.find(v)).collect()
}
