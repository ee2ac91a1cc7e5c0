//! Fair split tree and well-separated pair decomposition.
//!
//! The split tree bisects the tight bounding box of each node at the
//! midpoint of its longest side, points on the split plane going to the
//! lower child. Two nodes are s-separated when the larger bounding-box
//! radius is at most `1/s` of the box-to-box distance; the decomposition
//! covers every unordered point pair exactly once.

use std::collections::HashMap;

use crate::model::PointSet;
use crate::{Error, Result};

/// One node of the split tree, owning `perm[lo..hi]`.
#[derive(Clone, Debug)]
pub struct SplitNode {
    pub lo: usize,
    pub hi: usize,
    pub bbox_min: Vec<f64>,
    pub bbox_max: Vec<f64>,
    pub children: Option<(usize, usize)>,
}

impl SplitNode {
    #[must_use]
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    #[must_use]
    pub fn point_count(&self) -> usize {
        self.hi - self.lo
    }

    /// Half the bounding-box diagonal.
    #[must_use]
    pub fn radius(&self) -> f64 {
        let sq: f64 = self
            .bbox_min
            .iter()
            .zip(&self.bbox_max)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum();
        0.5 * sq.sqrt()
    }

    /// Length of the longest bounding-box side.
    #[must_use]
    pub fn longest_side(&self) -> f64 {
        self.bbox_min
            .iter()
            .zip(&self.bbox_max)
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }
}

/// Fair split tree in preorder layout; node 0 is the root.
#[derive(Clone, Debug)]
pub struct SplitTree {
    nodes: Vec<SplitNode>,
    perm: Vec<usize>,
}

impl SplitTree {
    #[must_use]
    pub fn root(&self) -> usize {
        0
    }

    #[must_use]
    pub fn node(&self, id: usize) -> &SplitNode {
        &self.nodes[id]
    }

    #[must_use]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Original point indices owned by a node, in tree layout order.
    #[must_use]
    pub fn points_of(&self, id: usize) -> &[usize] {
        let node = &self.nodes[id];
        &self.perm[node.lo..node.hi]
    }

    /// Minimum distance between the bounding boxes of two nodes.
    #[must_use]
    pub fn box_distance(&self, a: usize, b: usize) -> f64 {
        let (a, b) = (&self.nodes[a], &self.nodes[b]);
        let mut sq = 0.0;
        for k in 0..a.bbox_min.len() {
            let gap = (a.bbox_min[k] - b.bbox_max[k]).max(b.bbox_min[k] - a.bbox_max[k]).max(0.0);
            sq += gap * gap;
        }
        sq.sqrt()
    }

    /// The s-separation test on box geometry.
    #[must_use]
    pub fn well_separated(&self, a: usize, b: usize, s: f64) -> bool {
        let r = self.nodes[a].radius().max(self.nodes[b].radius());
        self.box_distance(a, b) >= s * r
    }
}

/// Builds the fair split tree of a point set.
pub fn build_split_tree(ps: &PointSet) -> Result<SplitTree> {
    let n = ps.len();
    let dim = ps.dim();
    let mut tree = SplitTree { nodes: Vec::with_capacity(2 * n), perm: (0..n).collect() };
    build_node(&mut tree, ps, 0, n, dim);
    Ok(tree)
}

fn build_node(tree: &mut SplitTree, ps: &PointSet, lo: usize, hi: usize, dim: usize) -> usize {
    let mut bbox_min = vec![f64::INFINITY; dim];
    let mut bbox_max = vec![f64::NEG_INFINITY; dim];
    for &i in &tree.perm[lo..hi] {
        let p = ps.point(i);
        for k in 0..dim {
            bbox_min[k] = bbox_min[k].min(p[k]);
            bbox_max[k] = bbox_max[k].max(p[k]);
        }
    }
    let id = tree.nodes.len();
    tree.nodes.push(SplitNode { lo, hi, bbox_min, bbox_max, children: None });
    if hi - lo == 1 {
        return id;
    }

    let node = &tree.nodes[id];
    let mut axis = 0;
    let mut extent = node.bbox_max[0] - node.bbox_min[0];
    for k in 1..dim {
        let e = node.bbox_max[k] - node.bbox_min[k];
        if e > extent {
            extent = e;
            axis = k;
        }
    }
    let mid_split = if extent > 0.0 {
        let mid = 0.5 * (node.bbox_min[axis] + node.bbox_max[axis]);
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for &i in &tree.perm[lo..hi] {
            if ps.point(i)[axis] <= mid {
                lower.push(i);
            } else {
                upper.push(i);
            }
        }
        Some((lower, upper))
    } else {
        None
    };
    let (lower, upper) = match mid_split {
        Some(pair) => pair,
        // All points coincide; fall back to an index-order halving so the
        // recursion still terminates.
        None => {
            let pts = &tree.perm[lo..hi];
            let half = pts.len() / 2;
            (pts[..half].to_vec(), pts[half..].to_vec())
        }
    };
    let cut = lo + lower.len();
    tree.perm[lo..cut].copy_from_slice(&lower);
    tree.perm[cut..hi].copy_from_slice(&upper);
    let left = build_node(tree, ps, lo, cut, dim);
    let right = build_node(tree, ps, cut, hi, dim);
    tree.nodes[id].children = Some((left, right));
    id
}

/// A well-separated pair decomposition: node-id pairs plus the separation
/// they were built at.
#[derive(Clone, Debug)]
pub struct WspdDecomposition {
    pub pairs: Vec<(usize, usize)>,
    pub separation: f64,
}

/// Builds the s-WSPD over a split tree.
pub fn build_wspd(tree: &SplitTree, s: f64) -> Result<WspdDecomposition> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::param("separation", format!("{s} must be finite and positive")));
    }
    let mut pairs = Vec::new();
    let mut work: Vec<(usize, usize)> = Vec::new();
    let mut split_work: Vec<usize> = vec![tree.root()];
    while let Some(id) = split_work.pop() {
        if let Some((l, r)) = tree.node(id).children {
            work.push((l, r));
            split_work.push(l);
            split_work.push(r);
        }
    }
    while let Some((a, b)) = work.pop() {
        if tree.well_separated(a, b, s) {
            pairs.push((a, b));
            continue;
        }
        let (na, nb) = (tree.node(a), tree.node(b));
        let split_a = if na.is_leaf() {
            false
        } else if nb.is_leaf() {
            true
        } else {
            na.longest_side() >= nb.longest_side()
        };
        if split_a {
            let (l, r) = na.children.expect("non-leaf");
            work.push((l, b));
            work.push((r, b));
        } else {
            let (l, r) = nb.children.expect("two leaves are always separated");
            work.push((a, l));
            work.push((a, r));
        }
    }
    Ok(WspdDecomposition { pairs, separation: s })
}

/// Edge selection strategy for well-separated pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Brute-force bichromatic closest pair; the oracle path.
    Exact,
    /// One representative per grid cell of width `delta^2 * d(A, B)`, then
    /// brute force over representatives; returned distance is within
    /// `(1 + 2 * sqrt(dim) * delta^2)` of exact.
    Grid,
}

impl std::str::FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SelectionMode::Exact),
            "grid" => Ok(SelectionMode::Grid),
            other => Err(Error::param("mode", format!("unknown selection mode {other:?}"))),
        }
    }
}

/// An approximately closest cross pair; `u` comes from the first node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosestEdge {
    pub u: usize,
    pub v: usize,
    pub dist: f64,
}

/// Picks a (near-)closest edge between two disjoint tree nodes.
///
/// Ties settle lexicographically on `(distance, u, v)`. Grid mode snaps each
/// side to a floor-hashed grid and keeps the lowest-index point per cell;
/// when the boxes touch (distance zero) it falls back to exact.
pub fn approx_closest_edge(
    ps: &PointSet,
    tree: &SplitTree,
    a: usize,
    b: usize,
    mode: SelectionMode,
    delta: f64,
) -> Result<ClosestEdge> {
    let (na, nb) = (tree.node(a), tree.node(b));
    if na.lo < nb.hi && nb.lo < na.hi {
        return Err(Error::param("pair", format!("nodes {a} and {b} overlap")));
    }
    match mode {
        SelectionMode::Exact => Ok(closest_brute(ps, tree.points_of(a), tree.points_of(b))),
        SelectionMode::Grid => {
            if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
                return Err(Error::param("delta", format!("{delta} must lie in (0, 1]")));
            }
            let dbox = tree.box_distance(a, b);
            if dbox <= 0.0 {
                return Ok(closest_brute(ps, tree.points_of(a), tree.points_of(b)));
            }
            let cell = delta * delta * dbox;
            let ra = grid_representatives(ps, tree.points_of(a), cell);
            let rb = grid_representatives(ps, tree.points_of(b), cell);
            Ok(closest_brute(ps, &ra, &rb))
        }
    }
}

fn closest_brute(ps: &PointSet, pa: &[usize], pb: &[usize]) -> ClosestEdge {
    let mut best = ClosestEdge { u: usize::MAX, v: usize::MAX, dist: f64::INFINITY };
    for &u in pa {
        for &v in pb {
            let d = ps.sq_dist(u, v);
            if d < best.dist
                || (d == best.dist && (u, v) < (best.u, best.v))
            {
                best = ClosestEdge { u, v, dist: d };
            }
        }
    }
    ClosestEdge { dist: best.dist.sqrt(), ..best }
}

fn grid_representatives(ps: &PointSet, points: &[usize], cell: f64) -> Vec<usize> {
    let mut sorted: Vec<usize> = points.to_vec();
    sorted.sort_unstable();
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut reps = Vec::new();
    for &i in &sorted {
        let key: Vec<i64> = ps.point(i).iter().map(|c| (c / cell).floor() as i64).collect();
        if seen.insert(key, ()).is_none() {
            reps.push(i);
        }
    }
    reps
}
