//! Gabriel property: nodes are pushed out of the disks that have an edge as
//! diameter, `Σ ReLU(r_ij − ‖X_k − c_ij‖)²` over edges and other nodes.

use crate::criteria::{check_layout, unit, LossResult};
use crate::geometry::{Layout, Vec2};
use crate::graph::Graph;
use crate::{Error, Result};

/// Adds `scale ×` the gradient of the term for edge `(i, j)` and node `k`.
pub(crate) fn disk_term(
    layout: &Layout,
    (i, j): (usize, usize),
    k: usize,
    scale: f64,
    grad: &mut [Vec2],
) -> Result<f64> {
    let (edge_dir, len) = unit(layout[i], layout[j]).ok_or(Error::ZeroLengthEdge(i, j))?;
    let center = 0.5 * (layout[i] + layout[j]);
    let radius = 0.5 * len;
    let (out_dir, dist) = unit(layout[k], center).unwrap_or((Vec2::ZERO, 0.0));
    let t = radius - dist;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let f = scale * 2.0 * t;
    // ∂t/∂X_i = ½ û_ij + ½ û_kc, ∂t/∂X_j = −½ û_ij + ½ û_kc, ∂t/∂X_k = −û_kc
    grad[i] += f * (0.5 * edge_dir + 0.5 * out_dir);
    grad[j] += f * (0.5 * out_dir - 0.5 * edge_dir);
    grad[k] -= f * out_dir;
    Ok(t * t)
}

/// Number of `(edge, node)` terms.
pub(crate) fn term_count(g: &Graph) -> usize {
    g.edge_count() * g.node_count().saturating_sub(2)
}

/// Decodes a term index into `(edge, node)`, skipping the edge's endpoints.
pub(crate) fn term_at(g: &Graph, idx: usize) -> ((usize, usize), usize) {
    let others = g.node_count() - 2;
    let edge = g.edges()[idx / others];
    let mut k = idx % others;
    let (lo, hi) = edge;
    if k >= lo {
        k += 1;
    }
    if k >= hi {
        k += 1;
    }
    (edge, k)
}

pub fn loss_gabriel(g: &Graph, layout: &Layout) -> Result<LossResult> {
    check_layout(g, layout)?;
    let mut out = LossResult::zero(g.node_count());
    for &edge in g.edges() {
        for k in (0..g.node_count()).filter(|&k| k != edge.0 && k != edge.1) {
            out.value += disk_term(layout, edge, k, 1.0, &mut out.grad)?;
        }
    }
    Ok(out)
}
