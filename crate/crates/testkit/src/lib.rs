//! Reference implementations for tests: written independently of the engine
//! and from the definitions, not for speed.

pub mod gradients;
pub mod smacof;

use gdlayout_core::{Graph, Layout, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected random graph: a random spanning tree plus `extra` random edges.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let e = (a.min(b), a.max(b));
        if a != b && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == e) {
            edges.push(e);
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Layout {
    Layout::new((0..n).map(|_| Vec2::new(side * rng.random::<f64>(), side * rng.random::<f64>())).collect()).unwrap()
}

/// All-pairs hop distances by Floyd–Warshall.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b) in g.edges() {
        d[a][b] = 1.0;
        d[b][a] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn dist(a: Vec2, b: Vec2) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// Proper or collinear-overlapping intersection of two closed segments,
/// by solving for the parameters of the intersection point.
pub fn brute_force_cross(p: Vec2, q: Vec2, r: Vec2, s: Vec2) -> bool {
    let d1 = Vec2::new(q.x - p.x, q.y - p.y);
    let d2 = Vec2::new(s.x - r.x, s.y - r.y);
    let den = d1.x * d2.y - d1.y * d2.x;
    let w = Vec2::new(r.x - p.x, r.y - p.y);
    if den.abs() < 1e-12 {
        // Parallel: only collinear overlap counts.
        if (w.x * d1.y - w.y * d1.x).abs() > 1e-12 {
            return false;
        }
        let len2 = d1.x * d1.x + d1.y * d1.y;
        let t0 = (w.x * d1.x + w.y * d1.y) / len2;
        let t1 = ((s.x - p.x) * d1.x + (s.y - p.y) * d1.y) / len2;
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        return hi > 0.0 && lo < 1.0 && hi - lo > 0.0 && lo.max(0.0) < hi.min(1.0);
    }
    let t = (w.x * d2.y - w.y * d2.x) / den;
    let u = (w.x * d1.y - w.y * d1.x) / den;
    t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0
}

/// Edge-index pairs that cross, skipping pairs that share a node.
pub fn brute_force_crossings(g: &Graph, x: &Layout) -> Vec<(usize, usize)> {
    let e = g.edges();
    let mut out = Vec::new();
    for a in 0..e.len() {
        for b in a + 1..e.len() {
            let (i, j) = e[a];
            let (k, l) = e[b];
            if i == k || i == l || j == k || j == l {
                continue;
            }
            if brute_force_cross(x[i], x[j], x[k], x[l]) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Lovász hinge of flattened scores against binary labels, written from the
/// Jaccard set-function increments.
pub fn lovasz_hinge(scores: &[f64], labels: &[bool]) -> f64 {
    let mut errs: Vec<(f64, bool)> =
        scores.iter().zip(labels).map(|(&s, &y)| (1.0 - s * if y { 1.0 } else { -1.0 }, y)).collect();
    errs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let positives = labels.iter().filter(|&&y| y).count() as f64;
    let jaccard = |prefix: &[(f64, bool)]| {
        let fp = prefix.iter().filter(|e| !e.1).count() as f64;
        let missed = prefix.iter().filter(|e| e.1).count() as f64;
        let inter = positives - missed;
        let union = positives + fp;
        if union == 0.0 {
            0.0
        } else {
            1.0 - inter / union
        }
    };
    let mut total = 0.0;
    for m in 0..errs.len() {
        let inc = jaccard(&errs[..=m]) - jaccard(&errs[..m]);
        total += errs[m].0.max(0.0) * inc;
    }
    total
}
