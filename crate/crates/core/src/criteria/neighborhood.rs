//! Neighborhood preservation via the Lovász hinge.
//!
//! Row `i` scores node `j` with `c_i − ‖X_i − X_j‖`, where `c_i` is the
//! midpoint between the distances to the `k`-th and `(k+1)`-th nearest
//! neighbors, so a score is positive exactly for the `k` nearest nodes. The
//! cutoffs are constants within a step. All off-diagonal scores of all rows
//! are fed, flattened, to one Lovász hinge against the adjacency matrix.
//!
//! Rows where `k ≥ n − 1` are left out: every other node is a neighbor there,
//! so the prediction is trivially right and has no cutoff.

use alloc::vec::Vec;

use crate::criteria::lovasz::lovasz_hinge;
use crate::criteria::{check_layout, unit, LossResult, NpConfig};
use crate::geometry::{neighbors_by_distance, Layout};
use crate::graph::Graph;
use crate::{Error, Result};

/// Score matrix entries `(i, j, score)` for the rows that take part.
pub fn neighbor_scores(g: &Graph, layout: &Layout, cfg: NpConfig) -> Result<Vec<(usize, usize, f64)>> {
    check_layout(g, layout)?;
    let n = g.node_count();
    cfg.validate(n)?;
    let mut out = Vec::new();
    for i in 0..n {
        let k = cfg.k_for(g, i);
        if k == 0 || k + 1 > n - 1 {
            continue;
        }
        let sorted = neighbors_by_distance(layout, i);
        let cut = 0.5 * (sorted[k - 1].0 + sorted[k].0);
        for j in (0..n).filter(|&j| j != i) {
            out.push((i, j, cut - layout.distance(i, j)));
        }
    }
    Ok(out)
}

pub fn loss_neighborhood(g: &Graph, layout: &Layout, cfg: NpConfig) -> Result<LossResult> {
    let entries = neighbor_scores(g, layout, cfg)?;
    let mut out = LossResult::zero(g.node_count());
    if entries.is_empty() {
        return Ok(out);
    }
    let scores: Vec<f64> = entries.iter().map(|e| e.2).collect();
    let labels: Vec<bool> = entries.iter().map(|e| g.is_adjacent(e.0, e.1)).collect();
    let (value, dscore) = lovasz_hinge(&scores, &labels);
    out.value = value;
    for (&(i, j, _), &ds) in entries.iter().zip(&dscore) {
        if ds == 0.0 {
            continue;
        }
        let (dir, _) = unit(layout[i], layout[j]).ok_or(Error::CoincidentNodes(i, j))?;
        // score = c_i − ‖X_i − X_j‖
        let gvec = ds * dir;
        out.grad[i] -= gvec;
        out.grad[j] += gvec;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::graph::Family;
    use alloc::vec;

    #[test]
    fn well_separated_neighbors_cost_nothing() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let x = Layout::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(10.0, 0.0), Vec2::new(11.0, 0.0)])
            .unwrap();
        let r = loss_neighborhood(&g, &x, NpConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn score_sign_marks_nearest() {
        let g = Graph::generate(Family::Cycle(6)).unwrap();
        let x = Layout::new((0..6).map(|i| Vec2::new(i as f64 * 1.3, (i * i) as f64 * 0.1)).collect()).unwrap();
        let entries = neighbor_scores(&g, &x, NpConfig::fixed(2)).unwrap();
        for i in 0..6 {
            let nearest: Vec<usize> = neighbors_by_distance(&x, i).iter().take(2).map(|p| p.1).collect();
            for &(a, b, s) in entries.iter().filter(|e| e.0 == i) {
                assert_eq!(s > 0.0, nearest.contains(&b), "row {a} col {b}");
            }
        }
    }

    #[test]
    fn k_out_of_range() {
        let g = Graph::generate(Family::Cycle(4)).unwrap();
        let x = Layout::new((0..4).map(|i| Vec2::new(i as f64, 0.0)).collect()).unwrap();
        assert!(loss_neighborhood(&g, &x, NpConfig::fixed(3)).is_err());
    }
}
