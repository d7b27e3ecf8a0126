//! Weighted stress `Σ_{i<j} d_ij^-2 (‖X_i − X_j‖ − d_ij)²`.

use crate::criteria::{check_layout, unit, LossResult};
use crate::geometry::{Layout, Vec2};
use crate::graph::{DistanceMatrix, Graph};
use crate::{Error, Result};

/// Pairs closer than this have no usable gradient direction.
pub const COINCIDENCE_EPS: f64 = 1e-9;

pub fn loss_stress(g: &Graph, d: &DistanceMatrix, layout: &Layout) -> Result<LossResult> {
    check_layout(g, layout)?;
    let n = g.node_count();
    let mut out = LossResult::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            out.value += stress_term(d, layout, i, j, 1.0, &mut out.grad)?;
        }
    }
    Ok(out)
}

/// Adds `scale ×` the gradient of the `(i, j)` term to `grad` and returns the
/// unscaled term value.
pub(crate) fn stress_term(
    d: &DistanceMatrix,
    layout: &Layout,
    i: usize,
    j: usize,
    scale: f64,
    grad: &mut [Vec2],
) -> Result<f64> {
    let dij = d.get(i, j);
    let (dir, len) = match unit(layout[i], layout[j]) {
        Some((u, len)) if len >= COINCIDENCE_EPS => (u, len),
        _ => return Err(Error::CoincidentNodes(i, j)),
    };
    let diff = len - dij;
    let w = 1.0 / (dij * dij);
    let g = (scale * 2.0 * w * diff) * dir;
    grad[i] += g;
    grad[j] -= g;
    Ok(w * diff * diff)
}

/// Stress value only; defined for every layout, coincident nodes included.
pub fn stress_value(d: &DistanceMatrix, layout: &Layout) -> f64 {
    let n = layout.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dij = d.get(i, j);
            let diff = layout.distance(i, j) - dij;
            total += diff * diff / (dij * dij);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{shortest_paths, Family};
    use alloc::vec;

    #[test]
    fn two_nodes() {
        let g = Graph::generate(Family::Path(2)).unwrap();
        let d = shortest_paths(&g).unwrap();
        let at = |x: f64| Layout::new(vec![Vec2::ZERO, Vec2::new(x, 0.0)]).unwrap();
        assert_eq!(loss_stress(&g, &d, &at(1.0)).unwrap().value, 0.0);
        let r = loss_stress(&g, &d, &at(2.0)).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.grad[1], Vec2::new(2.0, 0.0));
        assert_eq!(r.grad[0], Vec2::new(-2.0, 0.0));
    }

    #[test]
    fn coincident_nodes_error() {
        let g = Graph::generate(Family::Path(2)).unwrap();
        let d = shortest_paths(&g).unwrap();
        let x = Layout::new(vec![Vec2::ZERO, Vec2::ZERO]).unwrap();
        assert_eq!(loss_stress(&g, &d, &x), Err(Error::CoincidentNodes(0, 1)));
        assert_eq!(stress_value(&d, &x), 1.0);
    }
}
