//! Layouts and the geometric primitives the criteria are built from.

use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::graph::Graph;
use crate::math;
use crate::{Error, Result};

/// Orientation values with magnitude at or below this are treated as zero.
pub const ORIENTATION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::sqrt(self.dot(self))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Counter-clockwise rotation by the angle whose sine and cosine are given.
    #[inline]
    pub fn rotated(self, sin: f64, cos: f64) -> Vec2 {
        Vec2::new(cos * self.x - sin * self.y, sin * self.x + cos * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.x, self * v.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2::new(x, y)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Node positions, one row per node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    positions: Vec<Vec2>,
}

impl Layout {
    /// Wraps positions, rejecting non-finite coordinates.
    pub fn new(positions: Vec<Vec2>) -> Result<Self> {
        if let Some(bad) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteCoordinate(bad));
        }
        Ok(Layout { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub(crate) fn positions_mut(&mut self) -> &mut [Vec2] {
        &mut self.positions
    }

    pub fn into_positions(self) -> Vec<Vec2> {
        self.positions
    }

    pub fn check_for(&self, g: &Graph) -> Result<()> {
        if self.len() != g.node_count() {
            return Err(Error::LayoutSizeMismatch { expected: g.node_count(), found: self.len() });
        }
        Ok(())
    }

    pub fn centroid(&self) -> Vec2 {
        if self.positions.is_empty() {
            return Vec2::ZERO;
        }
        let mut sum = Vec2::ZERO;
        for p in &self.positions {
            sum += *p;
        }
        (1.0 / self.positions.len() as f64) * sum
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.positions[i] - self.positions[j]).norm()
    }

    /// Coordinates relative to the centroid, rotated counter-clockwise by `theta`.
    pub fn rotated_about_centroid(&self, theta: f64) -> Vec<Vec2> {
        let c = self.centroid();
        let (s, co) = math::sin_cos(theta);
        self.positions.iter().map(|&p| (p - c).rotated(s, co)).collect()
    }

    /// Largest distance between any two nodes.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.max(self.distance(i, j));
            }
        }
        best
    }
}

impl Index<usize> for Layout {
    type Output = Vec2;
    fn index(&self, i: usize) -> &Vec2 {
        &self.positions[i]
    }
}

impl IndexMut<usize> for Layout {
    fn index_mut(&mut self, i: usize) -> &mut Vec2 {
        &mut self.positions[i]
    }
}

/// Two edges with four distinct endpoints whose segments cross.
///
/// `first < second` are indices into [`Graph::edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CrossingPair {
    pub first: usize,
    pub second: usize,
}

impl CrossingPair {
    /// Endpoints `(i, j, k, l)` where `(i, j)` is the first edge.
    pub fn endpoints(&self, g: &Graph) -> (usize, usize, usize, usize) {
        let (i, j) = g.edges()[self.first];
        let (k, l) = g.edges()[self.second];
        (i, j, k, l)
    }
}

#[inline]
fn orientation(p: Vec2, q: Vec2, r: Vec2) -> i8 {
    let v = (q - p).cross(r - p);
    if v > ORIENTATION_EPS {
        1
    } else if v < -ORIENTATION_EPS {
        -1
    } else {
        0
    }
}

/// Whether segments `p1q1` and `p2q2` cross in their interiors, or overlap
/// along a common line over a stretch of positive length.
pub fn segments_cross(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> bool {
    let o1 = orientation(p1, q1, p2);
    let o2 = orientation(p1, q1, q2);
    let o3 = orientation(p2, q2, p1);
    let o4 = orientation(p2, q2, q1);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        // Collinear: project on the dominant axis of the first segment.
        let d = q1 - p1;
        let axis: fn(Vec2) -> f64 = if d.x.abs() >= d.y.abs() { |v| v.x } else { |v| v.y };
        let (a0, a1) = minmax(axis(p1), axis(q1));
        let (b0, b1) = minmax(axis(p2), axis(q2));
        return a1.min(b1) - a0.max(b0) > ORIENTATION_EPS;
    }
    false
}

#[inline]
fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Whether the two edges are eligible to cross (no shared endpoint) and do.
pub fn edges_cross(g: &Graph, layout: &Layout, a: usize, b: usize) -> bool {
    let (i, j) = g.edges()[a];
    let (k, l) = g.edges()[b];
    if i == k || i == l || j == k || j == l {
        return false;
    }
    segments_cross(layout[i], layout[j], layout[k], layout[l])
}

/// Every crossing edge pair, sorted by `(first, second)`.
///
/// Brute force over all edge pairs.
pub fn detect_crossings(g: &Graph, layout: &Layout) -> Vec<CrossingPair> {
    let m = g.edge_count();
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if edges_cross(g, layout, a, b) {
                out.push(CrossingPair { first: a, second: b });
            }
        }
    }
    out
}

/// The acute angle in `(0, π/2]` between the two crossing segments.
pub fn crossing_angle(g: &Graph, pair: CrossingPair, layout: &Layout) -> Result<f64> {
    let (i, j, k, l) = pair.endpoints(g);
    let u = layout[j] - layout[i];
    let v = layout[l] - layout[k];
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 {
        return Err(Error::ZeroLengthEdge(i, j));
    }
    if nv == 0.0 {
        return Err(Error::ZeroLengthEdge(k, l));
    }
    let cos = (u.dot(v).abs() / (nu * nv)).min(1.0);
    Ok(math::acos(cos))
}

/// An angle at `center` between the edges to `a` and `b` (`a < b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentAngle {
    pub a: usize,
    pub center: usize,
    pub b: usize,
    pub angle: f64,
}

/// Angle in `[0, π]` between `u` and `v`.
#[inline]
pub(crate) fn angle_between(u: Vec2, v: Vec2) -> f64 {
    math::atan2(u.cross(v).abs(), u.dot(v))
}

/// The triples `(a, center, b)` of edges sharing an endpoint, ordered by
/// center then by neighbor indices.
pub fn incident_pairs(g: &Graph) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for center in 0..g.node_count() {
        let nb = g.neighbors(center);
        for (x, &a) in nb.iter().enumerate() {
            for &b in &nb[x + 1..] {
                out.push((a, center, b));
            }
        }
    }
    out
}

/// Angle between every pair of edges that share an endpoint.
pub fn incident_angles(g: &Graph, layout: &Layout) -> Result<Vec<IncidentAngle>> {
    incident_pairs(g)
        .into_iter()
        .map(|(a, center, b)| {
            let u = layout[a] - layout[center];
            let v = layout[b] - layout[center];
            if u.norm() == 0.0 {
                return Err(Error::ZeroLengthEdge(a.min(center), a.max(center)));
            }
            if v.norm() == 0.0 {
                return Err(Error::ZeroLengthEdge(b.min(center), b.max(center)));
            }
            Ok(IncidentAngle { a, center, b, angle: angle_between(u, v) })
        })
        .collect()
}

/// Other nodes ordered by distance from `i`, ties broken by node index.
pub fn neighbors_by_distance(layout: &Layout, i: usize) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = (0..layout.len()).filter(|&j| j != i).map(|j| (layout.distance(i, j), j)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    v
}

/// For every node, the distances to its `k`-th and `(k+1)`-th nearest other
/// node. Requires `1 ≤ k` and `k + 1 ≤ n − 1`.
pub fn knn_cutoffs(layout: &Layout, k: usize) -> Result<Vec<(f64, f64)>> {
    let n = layout.len();
    if k == 0 || k + 1 > n.saturating_sub(1) {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok((0..n)
        .map(|i| {
            let sorted = neighbors_by_distance(layout, i);
            (sorted[k - 1].0, sorted[k].0)
        })
        .collect())
}

/// `⟨softmax(v), v⟩`, computed with the usual max shift.
pub(crate) fn soft_max_value(v: &[f64]) -> (f64, Vec<f64>) {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = v.iter().map(|&x| math::exp(x - m)).collect();
    let z: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= z);
    let value = weights.iter().zip(v).map(|(w, x)| w * x).sum();
    (value, weights)
}

/// Soft extent `⟨softmax(v), v⟩ − ⟨softmax(−v), v⟩` with both softmax
/// weight vectors.
pub(crate) fn soft_extent(v: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let (hi, p) = soft_max_value(v);
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    let (neg_lo, q) = soft_max_value(&neg);
    // ⟨softmax(−v), v⟩ = −⟨softmax(−v), −v⟩
    (hi + neg_lo, p, q)
}

/// Soft width and height of the layout rotated about its centroid by `theta`.
pub fn soft_bounding_box(layout: &Layout, theta: f64) -> (f64, f64) {
    let pts = layout.rotated_about_centroid(theta);
    let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
    (soft_extent(&xs).0, soft_extent(&ys).0)
}

/// Exact width and height of the layout rotated about its centroid by `theta`.
pub fn hard_bounding_box(layout: &Layout, theta: f64) -> (f64, f64) {
    let pts = layout.rotated_about_centroid(theta);
    if pts.is_empty() {
        return (0.0, 0.0);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    (x1 - x0, y1 - y0)
}
