//! Graphs, the standard test families, and hop-count distances.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A simple undirected graph on nodes `0..n`.
///
/// Edges are stored as `(i, j)` with `i < j`, in insertion order. Edge indices
/// (positions in [`Graph::edges`]) are used as keys elsewhere, e.g. for
/// crossing pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
    ideal_lengths: Option<Vec<f64>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one node".into()));
        }
        let mut adjacency = vec![false; n * n];
        let mut neighbors = vec![Vec::new(); n];
        let mut stored = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) references a node outside 0..{n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if adjacency[i * n + j] {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            adjacency[i * n + j] = true;
            adjacency[j * n + i] = true;
            neighbors[i].push(j);
            neighbors[j].push(i);
            stored.push((i, j));
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph { n, edges: stored, adjacency, neighbors, ideal_lengths: None })
    }

    /// Attaches per-edge ideal lengths, aligned with [`Graph::edges`].
    pub fn with_ideal_lengths(mut self, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != self.edges.len() {
            return Err(Error::InvalidGraph(format!("{} ideal lengths for {} edges", lengths.len(), self.edges.len())));
        }
        if let Some(bad) = lengths.iter().position(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidGraph(format!("ideal length of edge {bad} must be a positive finite number")));
        }
        self.ideal_lengths = Some(lengths);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn ideal_lengths(&self) -> Option<&[f64]> {
        self.ideal_lengths.as_deref()
    }

    /// Generates one of the standard families.
    pub fn generate(family: Family) -> Result<Self> {
        family.build()
    }
}

/// The graph families that can be generated directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cycle(usize),
    Path(usize),
    /// `w` columns by `h` rows; node `y * w + x`.
    Grid {
        w: usize,
        h: usize,
    },
    /// Complete `branch`-ary tree with `depth` levels below the root,
    /// numbered breadth first.
    BalancedTree {
        branch: usize,
        depth: usize,
    },
    Complete(usize),
    CompleteBipartite(usize, usize),
    /// The 3-dimensional hypercube.
    Cube,
    Dodecahedron,
}

impl Family {
    fn build(self) -> Result<Graph> {
        fn at_least(value: usize, min: usize, what: &str) -> Result<()> {
            if value < min {
                Err(Error::InvalidParameter(format!("{what} must be at least {min}, got {value}")))
            } else {
                Ok(())
            }
        }
        match self {
            Family::Cycle(n) => {
                at_least(n, 3, "cycle length")?;
                Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
            }
            Family::Path(n) => {
                at_least(n, 1, "path length")?;
                Graph::new(n, (1..n).map(|i| (i - 1, i)))
            }
            Family::Grid { w, h } => {
                at_least(w, 1, "grid width")?;
                at_least(h, 1, "grid height")?;
                let mut edges = Vec::new();
                for y in 0..h {
                    for x in 0..w {
                        let v = y * w + x;
                        if x + 1 < w {
                            edges.push((v, v + 1));
                        }
                        if y + 1 < h {
                            edges.push((v, v + w));
                        }
                    }
                }
                Graph::new(w * h, edges)
            }
            Family::BalancedTree { branch, depth } => {
                at_least(branch, 1, "branching factor")?;
                at_least(depth, 1, "tree depth")?;
                let mut n = 1usize;
                let mut level = 1usize;
                for _ in 0..depth {
                    level =
                        level.checked_mul(branch).ok_or_else(|| Error::InvalidParameter("tree too large".into()))?;
                    n = n.checked_add(level).ok_or_else(|| Error::InvalidParameter("tree too large".into()))?;
                }
                Graph::new(n, (1..n).map(|v| ((v - 1) / branch, v)))
            }
            Family::Complete(n) => {
                at_least(n, 1, "complete graph size")?;
                Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
            }
            Family::CompleteBipartite(a, b) => {
                at_least(a, 1, "bipartite side a")?;
                at_least(b, 1, "bipartite side b")?;
                Graph::new(a + b, (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))))
            }
            Family::Cube => Graph::new(
                8,
                (0..8usize).flat_map(|v| (0..3).map(move |bit| (v, v ^ (1 << bit))).filter(|&(a, b)| a < b)),
            ),
            Family::Dodecahedron => {
                // Generalized Petersen graph GP(10, 2): outer 10-cycle 0..10,
                // spokes to 10..20, inner star polygon with step 2.
                let mut edges = Vec::with_capacity(30);
                for i in 0..10 {
                    edges.push((i, (i + 1) % 10));
                    edges.push((i, i + 10));
                    edges.push((10 + i, 10 + (i + 2) % 10));
                }
                Graph::new(20, edges)
            }
        }
    }
}

/// All-pairs hop distances, row-major `n × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn max(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }
}

/// Breadth-first hop distances between every pair of nodes.
///
/// Fails with [`Error::DisconnectedGraph`] if some node cannot be reached,
/// since the stress weights `d^-2` are undefined for infinite distances.
pub fn shortest_paths(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.node_count();
    let mut d = vec![f64::INFINITY; n * n];
    let mut queue = VecDeque::with_capacity(n);
    let mut hops = vec![usize::MAX; n];
    for source in 0..n {
        hops.iter_mut().for_each(|h| *h = usize::MAX);
        hops[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if hops[u] == usize::MAX {
                    hops[u] = hops[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        for (target, &h) in hops.iter().enumerate() {
            if h == usize::MAX {
                return Err(Error::DisconnectedGraph(target.max(source)));
            }
            d[source * n + target] = h as f64;
        }
    }
    Ok(DistanceMatrix { n, d })
}
