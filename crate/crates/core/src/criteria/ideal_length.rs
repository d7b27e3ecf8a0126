//! Root-mean-square relative deviation from ideal edge lengths.
//!
//! Without explicit ideal lengths every edge targets the current average
//! edge length. That average is treated as a constant when differentiating.

use alloc::vec::Vec;

use crate::criteria::{check_layout, unit, LossResult};
use crate::geometry::Layout;
use crate::graph::Graph;
use crate::{math, Error, Result};

/// Per-edge targets: the graph's ideal lengths, or the current mean length.
pub fn ideal_lengths(g: &Graph, layout: &Layout) -> Vec<f64> {
    match g.ideal_lengths() {
        Some(l) => l.to_vec(),
        None => {
            let m = g.edge_count().max(1) as f64;
            let avg = g.edges().iter().map(|&(i, j)| layout.distance(i, j)).sum::<f64>() / m;
            alloc::vec![avg; g.edge_count()]
        }
    }
}

pub fn loss_ideal_edge_length(g: &Graph, layout: &Layout) -> Result<LossResult> {
    check_layout(g, layout)?;
    let mut out = LossResult::zero(g.node_count());
    if g.edge_count() == 0 {
        return Ok(out);
    }
    let targets = ideal_lengths(g, layout);
    let m = g.edge_count() as f64;
    let mut sum = 0.0;
    let mut parts = Vec::with_capacity(g.edge_count());
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let l = targets[e];
        let (dir, len) = unit(layout[i], layout[j]).ok_or(Error::ZeroLengthEdge(i, j))?;
        if l.is_nan() || l <= 0.0 {
            return Err(Error::ZeroLengthEdge(i, j));
        }
        let rel = (len - l) / l;
        sum += rel * rel;
        parts.push((i, j, dir, rel / l));
    }
    let value = math::sqrt(sum / m);
    out.value = value;
    if value > 0.0 {
        // d sqrt(S)/dX = dS/dX / (2 sqrt(S)), dS/dX_i = (2/m)(rel/l) u_ij
        let c = 1.0 / (m * value);
        for (i, j, dir, slope) in parts {
            let g = (c * slope) * dir;
            out.grad[i] += g;
            out.grad[j] -= g;
        }
    }
    Ok(out)
}

/// Loss value only, robust to zero-length edges.
pub fn ideal_length_value(g: &Graph, layout: &Layout) -> f64 {
    if g.edge_count() == 0 {
        return 0.0;
    }
    let targets = ideal_lengths(g, layout);
    let sum: f64 = g
        .edges()
        .iter()
        .zip(&targets)
        .map(|(&(i, j), &l)| {
            if l > 0.0 {
                let rel = (layout.distance(i, j) - l) / l;
                rel * rel
            } else {
                0.0
            }
        })
        .sum();
    math::sqrt(sum / g.edge_count() as f64)
}
